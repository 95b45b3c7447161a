import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sylowgl.errors import BudgetExceededError, ContainmentError, NotNormalError
from sylowgl.groups import build_group, closure_from_generators
from sylowgl.lattice import (
    all_subgroups,
    cache_path,
    centralizer,
    conjugacy_classes,
    is_normal,
    load_lattice,
    normal_core,
    normalizer,
    quotient,
)
from sylowgl.residue import Ctx, Mat2

C9 = Ctx(3, 2)


def gaussian_binomial(n, k, q):
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


@pytest.fixture(scope="module")
def sylow9():
    return build_group(C9, "SylowSL")


@pytest.fixture(scope="module")
def sl9():
    return build_group(C9, "SL")


@pytest.fixture(scope="module")
def lat9(sylow9):
    return all_subgroups(sylow9)


def test_cyclic_of_order_p():
    c = build_group(Ctx(3, 1), "SylowSL")
    assert len(all_subgroups(c)) == 2


@pytest.mark.parametrize("p", [3, 5])
def test_elementary_abelian_rank3(p):
    K = build_group(Ctx(p, 2), "KernelK", m=1)
    lat = all_subgroups(K)
    expected = {p**k: gaussian_binomial(3, k, p) for k in range(4)}
    assert lat.counts_by_order() == expected
    if p == 3:
        assert len(lat) == 28


def test_joins_agree_with_cyclic_extension(sylow9):
    a = all_subgroups(sylow9, method="cyclic-extension")
    b = all_subgroups(sylow9, method="joins")
    assert [s.key for s in a.subgroups] == [s.key for s in b.subgroups]


def test_joins_on_non_p_group():
    g = build_group(Ctx(3, 1), "SL")
    lat = all_subgroups(g)
    # SL2(3): 1, C2, 4 C3, 3 C4, 4 C6, Q8, itself
    assert lat.counts_by_order() == {1: 1, 2: 1, 3: 4, 4: 3, 6: 4, 8: 1, 24: 1}


def test_every_subgroup_closed(lat9):
    assert all(s.is_closed() for s in lat9.subgroups)
    assert lat9.subgroups[0].order == 1 and lat9.subgroups[-1].order == 81


def test_class_count_in_sylow(lat9):
    cl = conjugacy_classes(lat9)
    assert len(cl.classes) == 20


def test_orbit_stabilizer_and_partition(lat9, sylow9, sl9):
    for amb in (sylow9, sl9):
        cl = conjugacy_classes(lat9, amb)
        assert sum(c.size for c in cl.classes) == len(lat9)
        for c in cl.classes:
            P = lat9.subgroups[c.rep]
            assert c.orbit_size * normalizer(amb, P).order == amb.order
            assert c.rep == min(c.members)


def test_abelian_parent_classes_are_singletons():
    K = build_group(C9, "KernelL", m=1)
    cl = conjugacy_classes(all_subgroups(K))
    assert all(c.size == 1 for c in cl.classes)


def test_conjugacy_containment_error(lat9):
    other = build_group(Ctx(3, 2), "KernelL", m=1)
    with pytest.raises(ContainmentError):
        conjugacy_classes(lat9, other)


def test_normalizer_examples(sylow9, sl9):
    assert normalizer(sl9, sl9.full()).order == sl9.order
    K = build_group(C9, "KernelK", m=1)
    assert normalizer(sl9, K).order == sl9.order
    assert (normalizer(sl9, sylow9).order // sylow9.order) % 3 != 0
    assert is_normal(K, sl9) and not is_normal(sylow9, sl9)


def test_centralizer_examples(sylow9, sl9):
    assert centralizer(sl9, sl9.trivial()).order == sl9.order
    K = sylow9.embed(build_group(C9, "KernelK", m=1))
    assert centralizer(sylow9, K).issubset(K)
    Z = centralizer(sylow9, sylow9.full())
    assert Z.issubset(centralizer(sylow9, Z))
    with pytest.raises(ContainmentError):
        centralizer(sylow9, build_group(C9, "KernelL", m=1))


def test_quotient_examples(sylow9, sl9):
    assert quotient(sl9, sl9.full()).order == 1
    K = build_group(C9, "KernelK", m=1)
    Q = quotient(sl9, K)
    assert Q.order == 24
    R = quotient(sylow9, K)
    assert R.order == 3 and R.is_cyclic()
    with pytest.raises(NotNormalError):
        quotient(sl9, sylow9)


@settings(max_examples=50)
@given(st.integers(0, 647), st.integers(0, 647), st.integers(0, 26))
def test_quotient_product_well_defined(i, j, k):
    sl = build_group(C9, "SL")
    K = sl.embed(build_group(C9, "KernelK", m=1))
    Q = quotient(sl, K)
    kk = int(K.idx[k])
    a = Q.coset_of[sl.mul(i, j)]
    b = Q.coset_of[sl.mul(sl.mul(i, kk), j)]
    assert a == b == Q.mul(Q.coset_of[i], Q.coset_of[j])


def test_op_of_quotient(sl9):
    K = build_group(C9, "KernelK", m=1)
    Q = quotient(sl9, K)
    # O_3(SL2(3)) is trivial; O_2 would be Q8 but only O_p is asked for
    assert Q.op_preimage().order == K.order
    assert Q.sylow_preimage().order == 81


def test_normal_core(sylow9, sl9):
    core = normal_core(sl9.embed(sylow9), sl9.full())
    assert core.order == 27
    assert is_normal(core, sl9)


def test_cache_roundtrip(tmp_path, sylow9, lat9):
    lat = all_subgroups(sylow9, cache_dir=tmp_path)
    path = cache_path(tmp_path, sylow9)
    assert path.exists()
    back = load_lattice(path, sylow9)
    assert back.complete
    assert [s.key for s in back.subgroups] == [s.key for s in lat9.subgroups]
    assert all(np.array_equal(a.generators, b.generators) for a, b in zip(back.subgroups, lat.subgroups))
    again = all_subgroups(sylow9, cache_dir=tmp_path)
    assert [s.key for s in again.subgroups] == [s.key for s in lat9.subgroups]


def test_lattice_budget(sylow9):
    with pytest.raises(BudgetExceededError):
        all_subgroups(sylow9, budget=80)


def test_custom_group_lattice():
    g = closure_from_generators([Mat2(1, 3, 0, 1, C9), Mat2(4, 0, 0, 7, C9)], C9)
    assert g.order == 9
    assert len(all_subgroups(g)) == 6
