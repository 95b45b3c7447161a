"""Centric and radical subgroups of a Sylow subgroup in the group fusion system,
outer actions on H^1 of the kernel, and the computable parts of the stable
elements description of H^*(G).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import fplinalg as fl
from .cohomology import FpModule, FrattiniQuotient, e2_page, graded_piece, graded_piece_dim
from .errors import ContainmentError, NotPGroupError
from .groups import GroupKind, MatrixGroup, Subgroup, build_group
from .lattice import (
    LATTICE_BUDGET,
    SubgroupLattice,
    all_subgroups,
    centralizer,
    conjugacy_classes,
    intersect,
    is_normal,
    is_p_group,
    normal_core,
    normalizer,
    quotient,
    _conj_sorted_keys,
)
from .residue import Ctx

SCHEMA = 1

H_S_FACTOR_NOTE = (
    "The H*(S)^{N(S)/S} factor of the stable-elements ring is not computed; "
    "no dimension of H*(G) is claimed."
)
GL_NORMALIZER_NOTE = (
    "For GL the invariants are taken under N_GL(Q)/Q, not N_SL(Q)/Q."
)


@dataclass
class ClassInfo:
    rep: Subgroup
    class_size: int
    orbit_size: int
    contains_craven: bool
    is_centric: bool | None
    is_radical: bool | None
    out_order: int | None
    name: str = ""
    centralizer: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "order": self.rep.order,
            "class_size": self.class_size,
            "orbit_size": self.orbit_size,
            "contains_craven": self.contains_craven,
            "is_centric": self.is_centric,
            "is_radical": self.is_radical,
            "out_order": self.out_order,
            **self.centralizer,
            "generators": [list(map(int, self.rep.parent.entries[i])) for i in self.rep.generators],
        }


@dataclass
class FusionReport:
    sylow: MatrixGroup
    ambient: MatrixGroup
    classes: list[ClassInfo]
    craven_filter: bool
    craven_order: int
    class_counts: dict = field(default_factory=dict)

    @property
    def centric_radical(self) -> list[ClassInfo]:
        return [c for c in self.classes if c.is_centric and c.is_radical]

    @property
    def centric_radical_reps(self) -> list[Subgroup]:
        return [c.rep for c in self.centric_radical]

    def to_dict(self) -> dict:
        return {
            "sylow": self.sylow.label,
            "ambient": self.ambient.label,
            "craven_filter": self.craven_filter,
            "craven_subgroup_order": self.craven_order,
            "class_counts": self.class_counts,
            "centric_radical": [c.name for c in self.centric_radical],
            "classes": [c.to_dict() for c in self.classes],
        }


@dataclass
class InvariantDims:
    group_label: str
    degrees: list[tuple[int, int]]

    def to_dict(self) -> dict:
        return {"group": self.group_label, "degrees": [{"degree": d, "dim": v} for d, v in self.degrees]}


# -- predicates --------------------------------------------------------------


def f_conjugates(P: Subgroup, s: MatrixGroup, g: MatrixGroup, orbit_budget: int = 1 << 20) -> list[Subgroup]:
    """All G-conjugates of P that lie in S, as subgroups of S."""
    Pg = g.embed(P)
    gens = g.generator_index
    g_ent = g.entries[gens]
    gi_ent = g.entries[g.inverse_index[gens]]
    start = np.sort(Pg.keys)
    seen = {start.tobytes()}
    queue = [start]
    inside = []
    while queue:
        cur = queue.pop()
        idx = s.index_of_keys(cur)
        if (idx >= 0).all():
            inside.append(Subgroup(s, idx))
        for k in range(len(gens)):
            nk = _conj_sorted_keys(cur, g_ent[k], gi_ent[k], g.M)
            b = nk.tobytes()
            if b not in seen:
                seen.add(b)
                queue.append(nk)
        if len(seen) > orbit_budget:
            raise ContainmentError("orbit budget exceeded while collecting conjugates")
    return inside


def _self_centralizing(q: Subgroup, s: MatrixGroup) -> bool:
    return centralizer(s, q).issubset(q)


def is_f_centric(P, s: MatrixGroup, g: MatrixGroup, conjugates=None) -> bool:
    """Every G-conjugate q of P inside S contains C_S(q)."""
    P = s.embed(P)
    g.embed(s.full())
    qs = f_conjugates(P, s, g) if conjugates is None else conjugates
    return all(_self_centralizing(s.embed(q), s) for q in qs)


def is_p_radical(P, g: MatrixGroup, N: Subgroup | None = None) -> bool:
    """O_p(N_G(P)/P) = 1, with O_p the core of a Sylow subgroup of the quotient."""
    P = g.embed(P)
    if not is_p_group(P):
        raise NotPGroupError("p-radical test needs a p-subgroup")
    N = normalizer(g, P) if N is None else N
    Q = quotient(N, P)
    return Q.op_preimage().order == P.order


def craven_subgroup(s: MatrixGroup, g: MatrixGroup) -> Subgroup:
    """O_p(G): the normal core of the Sylow subgroup in G, as a subgroup of S."""
    S = g.embed(s.full())
    return s.embed(normal_core(S, g.full()))


def center(g: MatrixGroup) -> Subgroup:
    return centralizer(g, g.full())


def _times_center(P: Subgroup, g: MatrixGroup) -> Subgroup:
    """P Z(G) (a subgroup, Z(G) being central)."""
    Z = center(g)
    prod = g.mul(P.idx[:, None], Z.idx[None, :]).reshape(-1)
    return Subgroup(g, prod)


def _name(P: Subgroup, named: dict[bytes, str], pos: int) -> str:
    return named.get(P.key, f"P{pos}")


def centric_radical_classification(
    s: MatrixGroup,
    g: MatrixGroup,
    craven_filter: bool = True,
    lattice: SubgroupLattice | None = None,
    cache_dir=None,
    kind_tag: str | None = None,
    named: dict | None = None,
    budget: int = LATTICE_BUDGET,
) -> FusionReport:
    """Flag each G-class of subgroups of S as centric / radical.

    With ``craven_filter`` only classes containing O_p(G) are tested (the rest
    cannot be centric and radical); without it every class is tested for
    centricity and every centric class for radicality.
    """
    g.embed(s.full())
    lat = lattice if lattice is not None else all_subgroups(s, budget=budget, cache_dir=cache_dir, kind_tag=kind_tag)
    f_lat = conjugacy_classes(lat, g)
    s_lat = conjugacy_classes(lat)
    Q = craven_subgroup(s, g)
    named = dict(named or {})
    named.setdefault(s.full().key, "S")
    infos = []
    for c in f_lat.classes:
        P = lat.subgroups[c.rep]
        has_q = Q.issubset(P)
        centric = radical = out = None
        extra: dict = {}
        if has_q or not craven_filter:
            members = [lat.subgroups[i] for i in c.members]
            centric = all(_self_centralizing(q, s) for q in members)
            if centric:
                Pg = g.embed(P)
                N = normalizer(g, Pg)
                radical = is_p_radical(Pg, g, N)
                C = centralizer(g, Pg)
                out = N.order // P.order
                pc = P.order * C.order // intersect(C, Pg).order
                extra = {"centralizer_order": C.order, "centralizer_in_p": C.issubset(Pg),
                         "centralizer_in_pz": C.issubset(_times_center(Pg, g)),
                         "out_f_order": N.order // pc}
        infos.append(ClassInfo(P, c.size, c.orbit_size, has_q, centric, radical, out, _name(P, named, c.rep), extra))
    counts = {"subgroups": len(lat), "sylow": len(s_lat.classes), "full": len(f_lat.classes)}
    return FusionReport(s, g, infos, craven_filter, Q.order, counts)


# -- outer action and invariants --------------------------------------------


def outer_action_on_h1(kernel: MatrixGroup, g: MatrixGroup, check: bool = True) -> FpModule:
    """H^1(K) as a module for G/K, one actor per standard generator of G.

    Actors: ``u`` = [[1,1],[0,1]], ``l`` = [[1,0],[1,1]] and, for GL, ``t`` = diag(r, 1).
    With ``check`` each actor is recomputed from a second coset representative.
    """
    K = g.embed(kernel)
    if not is_normal(K, g):
        raise ContainmentError("kernel is not normal in the ambient group")
    V = FrattiniQuotient(g, K)
    names = ["u", "l", "t"]
    actors = {}
    k0 = int(V.basis[0]) if len(V.basis) else g.identity_index
    for name, x in zip(names, g.generators):
        xi = g.index(x)
        a = V.dual_matrix(xi)
        if check and not np.array_equal(a, V.dual_matrix(int(g.mul(xi, k0)))):
            raise ContainmentError(f"actor {name} depends on the coset representative")
        actors[name] = a
    return FpModule(g.p, V.d, actors, V.labels())


def closed_actor_group(m: FpModule, limit: int = 1 << 16) -> list[np.ndarray]:
    """All products of the actor matrices (the image of the acting group in GL(M))."""
    p = m.p
    eye = np.eye(m.dim, dtype=np.int64)
    seen = {eye.tobytes(): eye}
    frontier = [eye]
    gens = list(m.actors.values())
    while frontier:
        nxt = []
        for a in frontier:
            for b in gens:
                c = fl.matmul(a, b, p)
                k = c.tobytes()
                if k not in seen:
                    seen[k] = c
                    nxt.append(c)
        frontier = nxt
        if len(seen) > limit:
            raise ContainmentError("actor group larger than the closure limit")
    return list(seen.values())


def invariant_dims(module: FpModule, cap: int, label: str = "") -> InvariantDims:
    """Dimension of the joint fixed space of all actors on each graded piece up to ``cap``."""
    out = []
    for d in range(cap + 1):
        piece = graded_piece(module, d)
        if not module.actors:
            out.append((d, piece.dim))
            continue
        eye = np.eye(piece.dim, dtype=np.int64)
        stacked = np.vstack([(a - eye) % module.p for a in piece.actors.values()])
        out.append((d, piece.dim - fl.rank(stacked, module.p)))
    return InvariantDims(label, out)


# -- the report --------------------------------------------------------------


def groups_for(ctx: Ctx, kind: str, budget: int | None = None):
    """(kernel, sylow, ambient) for SL or GL."""
    kw = {} if budget is None else {"budget": budget}
    if kind.upper() == "SL":
        return (build_group(ctx, GroupKind.KERNEL_K, m=1, **kw), build_group(ctx, GroupKind.SYLOW_SL, **kw),
                build_group(ctx, GroupKind.SL, **kw))
    return (build_group(ctx, GroupKind.KERNEL_L, m=1, **kw), build_group(ctx, GroupKind.SYLOW_GL, **kw),
            build_group(ctx, GroupKind.GL, **kw))


def stable_ingredients_report(ctx: Ctx, kind: str, cap: int, craven_filter: bool = True,
                              cache_dir=None, budget: int | None = None) -> dict:
    kind = kind.upper()
    K, S, G = groups_for(ctx, kind, budget)
    kname = "K_n" if kind == "SL" else "L_n"
    rep = centric_radical_classification(S, G, craven_filter=craven_filter, cache_dir=cache_dir,
                                         kind_tag=kind.lower(), named={S.embed(K).key: kname})
    mod = outer_action_on_h1(K, G)
    inv = invariant_dims(mod, cap, label=kname)
    e2 = e2_page(ctx, kind, (cap, cap))
    notes = [H_S_FACTOR_NOTE]
    if kind == "GL":
        notes.append(GL_NORMALIZER_NOTE)
    return {
        "schema": SCHEMA,
        "p": ctx.p,
        "n": ctx.n,
        "kind": kind,
        "fusion": rep.to_dict(),
        "out_orders": {c.name: c.out_order for c in rep.centric_radical},
        "kernel_invariants": inv.to_dict(),
        "kernel_piece_dims": [graded_piece_dim(mod.dim, d) for d in range(cap + 1)],
        "e2": e2.to_json_obj(),
        "notes": notes,
    }


def report_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)
