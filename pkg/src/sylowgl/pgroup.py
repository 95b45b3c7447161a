"""Structural predicates of finite p-groups, each returned with a checkable witness.

Verbal subgroups ([G,G], G^p, Frattini, Omega_1) are computed inside the
parent's element table.  ``pth_root_witness`` and ``omega_extendable_witness``
build explicit matrices and re-verify them with plain ``Mat2`` arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InternalInconsistencyError, InvalidParameterError, NotPGroupError
from .groups import GroupKind, MatrixGroup, Subgroup, build_group, kernel_shape_matrix
from .lattice import is_p_group
from .residue import Ctx, Mat2, det, mat_pow, unit_inverse


class Property(str, Enum):
    ELEMENTARY_ABELIAN = "ElementaryAbelian"
    ABELIAN = "Abelian"
    POWERFUL = "Powerful"
    OMEGA_EXTENDABLE = "OmegaExtendable"
    IS_PGROUP = "IsPGroup"
    ARITHMETIC = "Arithmetic"


@dataclass
class PropertyReport:
    property: Property
    holds: bool
    witness: tuple | None = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        w = None
        if self.witness is not None:
            w = [[list(r) for r in x.rows()] if isinstance(x, Mat2) else x for x in self.witness]
        return {"property": self.property.value, "holds": self.holds, "witness": w, "detail": self.detail}


@dataclass
class VerbalSubgroups:
    commutator: Subgroup
    agemo: Subgroup
    frattini: Subgroup
    omega1: Subgroup
    d: int


def _sub(g) -> Subgroup:
    return g.full() if isinstance(g, MatrixGroup) else g


def _require_p(S: Subgroup):
    if not is_p_group(S):
        raise NotPGroupError(f"order {S.order} is not a power of {S.ctx.p}")


def span(G: MatrixGroup, cand, start=()) -> Subgroup:
    """Subgroup generated by ``start`` and ``cand``, keeping only the candidates that were needed."""
    gens = [int(x) for x in start]
    mask = G.generated(gens).mask if gens else G.trivial().mask
    for c in np.asarray(cand, dtype=np.int64).reshape(-1):
        if not mask[c]:
            gens.append(int(c))
            mask = G.closure_mask(mask, np.array(gens))
    return Subgroup(G, np.nonzero(mask)[0], gens=np.array(gens, dtype=np.int64))


def normal_closure(S: Subgroup, cand) -> Subgroup:
    """Smallest subgroup normal in ``S`` containing ``cand``."""
    G = S.parent
    N = span(G, cand)
    grew = True
    while grew:
        grew = False
        for x in S.generators:
            c = G.conj(int(x), N.generators)
            out = c[N.mask[c] == 0]
            if len(out):
                N = span(G, out, start=N.generators)
                grew = True
    return N


def commutator_idx(G: MatrixGroup, x, y):
    """Parent indices of ``x^-1 y^-1 x y``."""
    inv = G.inverse_index
    return G.mul(G.mul(inv[x], inv[y]), G.mul(x, y))


def commutator_subgroup(g) -> Subgroup:
    S = _sub(g)
    G = S.parent
    gens = S.generators
    a, b = np.meshgrid(gens, gens, indexing="ij")
    return normal_closure(S, np.unique(commutator_idx(G, a.reshape(-1), b.reshape(-1))))


def verbal_subgroups(g) -> VerbalSubgroups:
    S = _sub(g)
    _require_p(S)
    G, p = S.parent, S.ctx.p
    pth = G.pth_power_index[S.idx]
    comm = commutator_subgroup(S)
    agemo = span(G, np.unique(pth))
    frat = span(G, agemo.generators, start=comm.generators)
    omega = span(G, S.idx[pth == G.identity_index])
    d = round(math.log(S.order // frat.order, p)) if S.order > 1 else 0
    if p**d * frat.order != S.order:
        raise InternalInconsistencyError("Frattini index is not a power of p")
    return VerbalSubgroups(comm, agemo, frat, omega, d)


def frattini_quotient_is_elementary(S: Subgroup, frat: Subgroup) -> bool:
    G, p = S.parent, S.ctx.p
    gens = S.generators
    if not frat.mask[G.pow_idx(gens, p)].all():
        return False
    a, b = np.meshgrid(gens, gens, indexing="ij")
    return bool(frat.mask[commutator_idx(G, a.reshape(-1), b.reshape(-1))].all())


def minimal_generators(g, vs: VerbalSubgroups | None = None) -> np.ndarray:
    """d(G) elements whose images form a basis of G/Phi(G); re-closed to confirm they generate."""
    S = _sub(g)
    vs = vs or verbal_subgroups(S)
    G = S.parent
    frat = vs.frattini
    mask = frat.mask.copy()
    chosen: list[int] = []
    have = frat.order
    for x in S.idx:
        if have == S.order:
            break
        if not mask[x]:
            chosen.append(int(x))
            mask = G.closure_mask(mask, np.concatenate([frat.generators, chosen]).astype(np.int64))
            have = int(mask.sum())
    chosen_arr = np.array(chosen, dtype=np.int64)
    if len(chosen) != vs.d or not np.array_equal(G.generated(chosen_arr).idx, S.idx):
        raise InternalInconsistencyError("Frattini-quotient lift does not generate the group")
    return chosen_arr


# -- predicates --------------------------------------------------------------


def is_p_group_report(g) -> PropertyReport:
    S = _sub(g)
    return PropertyReport(Property.IS_PGROUP, is_p_group(S), None, {"order": S.order, "p": S.ctx.p})


def _noncommuting_pair(S: Subgroup):
    G = S.parent
    gens = S.generators
    for i, x in enumerate(gens):
        for y in gens[i + 1:]:
            if int(G.mul(x, y)) != int(G.mul(y, x)):
                return G.element(int(x)), G.element(int(y))
    return None


def is_abelian(g) -> PropertyReport:
    S = _sub(g)
    pair = _noncommuting_pair(S)
    return PropertyReport(Property.ABELIAN, pair is None, pair, {"order": S.order})


def is_elementary_abelian(g) -> PropertyReport:
    S = _sub(g)
    p = S.ctx.p
    pair = _noncommuting_pair(S)
    if pair is not None:
        return PropertyReport(Property.ELEMENTARY_ABELIAN, False, pair, {"order": S.order, "reason": "non-commuting pair"})
    G = S.parent
    bad = S.idx[G.pth_power_index[S.idx] != G.identity_index]
    if len(bad):
        return PropertyReport(Property.ELEMENTARY_ABELIAN, False, (G.element(int(bad[0])),),
                              {"order": S.order, "reason": f"element of order > {p}"})
    rank = round(math.log(S.order, p)) if S.order > 1 else 0
    return PropertyReport(Property.ELEMENTARY_ABELIAN, True, None, {"order": S.order, "rank": rank})


def is_powerful(g) -> PropertyReport:
    """Odd-p criterion [G,G] <= G^p; a failure names x, y and their commutator outside G^p."""
    S = _sub(g)
    _require_p(S)
    G = S.parent
    vs = verbal_subgroups(S)
    holds = vs.commutator.issubset(vs.agemo)
    detail = {"order": S.order, "commutator_order": vs.commutator.order, "agemo_order": vs.agemo.order}
    if holds:
        return PropertyReport(Property.POWERFUL, True, None, detail)
    # G^p is normal, so some commutator of two generators must already escape it
    gens = S.generators
    for x in gens:
        for y in gens:
            c = int(commutator_idx(G, x, y))
            if not vs.agemo.mask[c]:
                return PropertyReport(Property.POWERFUL, False,
                                      (G.element(int(x)), G.element(int(y)), G.element(c)), detail)
    raise InternalInconsistencyError("commutator subgroup escapes G^p but no generator commutator does")


# -- explicit constructions --------------------------------------------------


def naive_root_candidate(h: Mat2, ctx: Ctx) -> Mat2:
    """``1 + p^(n-2) X`` with X the traceless lift of ``(h - 1)/p^(n-1)``; its determinant may be off."""
    if ctx.n < 3:
        raise InvalidParameterError("p-th root construction needs n >= 3")
    a, b, c, _ = kernel_shape_matrix(h, ctx.n - 1)
    s = ctx.p ** (ctx.n - 2)
    return Mat2(1 + s * a, s * b, s * c, 1 - s * a, ctx)


def pth_root_witness(h: Mat2, ctx: Ctx) -> Mat2:
    """g in K_n with ``g^p = h`` for h in K_{n,n-1}.

    The naive candidate has determinant 1 + p^(2n-4)(...); scaling its first
    column by the inverse determinant fixes det = 1 without changing g^p mod p^n.
    """
    if h.ctx != ctx:
        raise InvalidParameterError(f"{h!r} is not over {ctx}")
    if det(h, ctx) != 1:
        raise InvalidParameterError("h must have determinant 1")
    g0 = naive_root_candidate(h, ctx)
    u = unit_inverse(det(g0, ctx), ctx)
    g = g0 * Mat2(u, 0, 0, 1, ctx)
    if mat_pow(g, ctx.p, ctx) != h or det(g, ctx) != 1:
        raise InternalInconsistencyError(f"p-th root check failed for {h!r}")
    return g


def pth_roots_report(ctx: Ctx) -> PropertyReport:
    """Run ``pth_root_witness`` over every element of K_{n,n-1}."""
    top = build_group(ctx, GroupKind.KERNEL_K, m=ctx.n - 1)
    naive_ok = 0
    for h in top.elements:
        pth_root_witness(h, ctx)
        naive_ok += det(naive_root_candidate(h, ctx), ctx) == 1
    return PropertyReport(Property.POWERFUL, True, None,
                          {"verified_roots": top.order, "naive_candidates_with_det_1": int(naive_ok)})


def _lift(A: Mat2, ctx: Ctx, up: Ctx, which: str) -> Mat2:
    a, b, c, d = kernel_shape_matrix(A, ctx.n - 1)
    s = ctx.p ** (ctx.n - 1)
    if which == "L":
        return Mat2(1 + s * a, s * b, s * c, 1 + s * d, up)
    # K: lift a, b, c identically and solve for the last entry so that det = 1
    M = up.modulus
    x11, x12, x21 = (1 + s * a) % M, s * b % M, s * c % M
    x22 = (1 + x12 * x21) * pow(x11, -1, M) % M
    return Mat2(x11, x12, x21, x22, up)


def omega_extendable_witness(ctx: Ctx, which: str = "K", budget: int | None = None) -> PropertyReport:
    """Check that Omega_1 is K_{n,n-1} (resp. L), elementary abelian, and that each
    nontrivial A in it is the image of an order-p^2 element B of K_{n+1} (resp. L_{n+1})."""
    which = which.upper()
    if which not in ("K", "L"):
        raise InvalidParameterError("which must be 'K' or 'L'")
    if ctx.n < 2:
        raise InvalidParameterError("Omega-extendability needs n >= 2")
    kind = GroupKind.KERNEL_K if which == "K" else GroupKind.KERNEL_L
    kw = {} if budget is None else {"budget": budget}
    up = ctx.with_n(ctx.n + 1)
    kern = build_group(ctx, kind, m=1, **kw)
    top = build_group(ctx, kind, m=ctx.n - 1, **kw)
    detail: dict = {"group": kern.label, "order": kern.order}
    omega = verbal_subgroups(kern).omega1
    detail["omega1_equals_top_kernel"] = bool(np.array_equal(omega.keys, top.keys))
    ea = is_elementary_abelian(top)
    detail["omega1_elementary_abelian"] = ea.holds
    if not (detail["omega1_equals_top_kernel"] and ea.holds):
        return PropertyReport(Property.OMEGA_EXTENDABLE, False, ea.witness, detail)
    p = ctx.p
    one = Mat2.identity(up)
    checked = identical_ok = 0
    for A in top.elements:
        if A.is_identity():
            continue
        B = _lift(A, ctx, up, which)
        a, b, c, d = A.entries
        s = ctx.p ** (ctx.n - 1)
        identical = Mat2(a, b, c, d, up)
        identical_ok += det(identical, up) == 1 if which == "K" else 1
        down = Mat2(*(v % ctx.modulus for v in B.entries), ctx)
        Bp = mat_pow(B, p, up)
        good = down == A and Bp != one and mat_pow(Bp, p, up) == one
        if which == "K":
            good = good and det(B, up) == 1
        good = good and all(v % s == 0 for v in (B.a - 1, B.b, B.c, B.d - 1))
        if not good:
            detail["checked"] = checked
            return PropertyReport(Property.OMEGA_EXTENDABLE, False, (A, B), detail)
        checked += 1
    detail["checked"] = checked
    detail["identical_lifts_in_group"] = int(identical_ok)
    return PropertyReport(Property.OMEGA_EXTENDABLE, True, None, detail)
