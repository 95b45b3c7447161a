"""Compiled and numpy kernels must agree bit for bit."""

import numpy as np
import pytest

from sylowgl import _pykernels, kernels
from sylowgl.groups import GroupKind, build_group
from sylowgl.residue import Ctx

cy = pytest.importorskip("sylowgl._ckernels")


@pytest.fixture(scope="module")
def grp():
    return build_group(Ctx(3, 2), GroupKind.SL)


def test_backend_switch():
    assert "python" in kernels.available_backends()
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")


def test_mul_and_keys_agree():
    rng = np.random.default_rng(1)
    M = 125
    x = rng.integers(0, M, size=(500, 4))
    y = rng.integers(0, M, size=(500, 4))
    assert np.array_equal(cy.mul_ent(x, y, M), _pykernels.mul_ent(x, y, M))
    assert np.array_equal(cy.ent_keys(x, M), _pykernels.ent_keys(x, M))


def test_table_kernels_agree(grp):
    rng = np.random.default_rng(2)
    e, k, M, inv = grp.entries, grp.keys, grp.M, grp.inverse_index
    i = rng.integers(0, grp.order, 300)
    j = rng.integers(0, grp.order, 300)
    assert np.array_equal(cy.mul_idx(e, k, M, i, j), _pykernels.mul_idx(e, k, M, i, j))
    q = np.concatenate([k[i], k[i] + 1])
    assert np.array_equal(cy.lookup(k, q), _pykernels.lookup(k, q))
    sub = grp.generated([grp.index(grp.element(int(i[0]))), int(j[0])])
    gens = sub.generators
    args = (e, k, M, inv, sub.mask, gens)
    assert np.array_equal(cy.normalizes_mask(*args), _pykernels.normalizes_mask(*args))
    cand = np.arange(0, grp.order, 7)
    assert np.array_equal(cy.normalizing_among(*args, cand), _pykernels.normalizing_among(*args, cand))
    assert np.array_equal(cy.centralizes_mask(e, M, e[gens]), _pykernels.centralizes_mask(e, M, e[gens]))
    start = np.zeros(grp.order, dtype=np.uint8)
    start[grp.identity_index] = 1
    assert np.array_equal(cy.closure_mask(e, k, M, start, gens), _pykernels.closure_mask(e, k, M, start, gens))
    g = e[5]
    gi = e[inv[5]]
    assert np.array_equal(cy.conj_keys(e, g, gi, M), _pykernels.conj_keys(e, g, gi, M))


def test_group_results_independent_of_backend(backend):
    g = build_group(Ctx(3, 2), GroupKind.SYLOW_GL)
    assert g.order == 3**5
    assert g.generated(g.generator_index).order == g.order
