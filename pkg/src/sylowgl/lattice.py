"""Subgroup lattices, conjugacy classes of subgroups, normalizers and quotients."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from . import kernels
from .errors import (
    BudgetExceededError,
    ContainmentError,
    InvalidParameterError,
    NotNormalError,
)
from .groups import MatrixGroup, Subgroup, _unpack, element_orders

log = logging.getLogger(__name__)

LATTICE_BUDGET = 3**10
CACHE_SCHEMA = 1


def _as_group(g) -> MatrixGroup:
    return g.as_group() if isinstance(g, Subgroup) else g


def _p_power(n: int, p: int) -> int | None:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k if n == 1 else None


def prime_of(g: MatrixGroup) -> int:
    return g.ctx.p


def is_p_group(g) -> bool:
    return _p_power(g.order, g.ctx.p) is not None


@dataclass
class SubgroupClass:
    """One conjugacy class: positions into ``SubgroupLattice.subgroups``."""

    members: list[int]
    orbit_size: int

    @property
    def rep(self) -> int:
        return self.members[0]

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass
class SubgroupLattice:
    parent: MatrixGroup
    subgroups: list[Subgroup]
    classes: list[SubgroupClass] | None = None
    ambient: MatrixGroup | None = None
    complete: bool = True
    _index: dict = field(default=None, repr=False)

    def __post_init__(self):
        self._index = {s.key: i for i, s in enumerate(self.subgroups)}

    def __len__(self):
        return len(self.subgroups)

    def find(self, sub) -> int:
        """Position of a subgroup (from any parent with the same context), or -1."""
        if isinstance(sub, MatrixGroup):
            sub = sub.full()
        return self._index.get(sub.key, -1)

    def representatives(self) -> list[Subgroup]:
        return [self.subgroups[c.rep] for c in self.classes]

    def class_of(self, pos: int) -> int:
        for ci, c in enumerate(self.classes):
            if pos in c.members:
                return ci
        raise KeyError(pos)

    def counts_by_order(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for s in self.subgroups:
            out[s.order] = out.get(s.order, 0) + 1
        return dict(sorted(out.items()))


def _sort_key(s: Subgroup):
    return (s.order, tuple(s.idx.tolist()))


# -- enumeration -------------------------------------------------------------


def all_subgroups(
    g,
    budget: int = LATTICE_BUDGET,
    method: str = "auto",
    cache_dir=None,
    kind_tag: str | None = None,
    max_seconds: float | None = None,
) -> SubgroupLattice:
    """Every subgroup of ``g``, in canonical order (by order, then element indices).

    For p-groups the lattice is grown layer by layer: each subgroup of order
    p^(k+1) is the join of a subgroup H of order p^k with a cyclic subgroup
    <x>, x normalizing H with x^p in H.  ``method="joins"`` runs the plain
    iterated-join closure from all cyclic subgroups instead (any finite group).

    With ``cache_dir`` the finished (or, on ``max_seconds`` overrun, partial)
    lattice is stored and picked up by later calls.
    """
    g = _as_group(g)
    if g.order > budget:
        raise BudgetExceededError(f"lattice of a group of order {g.order} exceeds budget {budget}")
    if method == "auto":
        method = "cyclic-extension" if is_p_group(g) else "joins"
    path = None
    if cache_dir is not None:
        path = cache_path(cache_dir, g, kind_tag)
        if path.exists():
            lat = load_lattice(path, g)
            if lat.complete:
                return lat
            if method == "cyclic-extension":
                return _cyclic_extension(g, start=lat.subgroups, path=path, max_seconds=max_seconds)
    if method == "cyclic-extension":
        if not is_p_group(g):
            raise InvalidParameterError("cyclic-extension enumeration needs a p-group")
        return _cyclic_extension(g, path=path, max_seconds=max_seconds)
    if method == "joins":
        lat = _join_closure(g)
        if path is not None:
            save_lattice(lat, path)
        return lat
    raise InvalidParameterError(f"unknown lattice method {method!r}")


def _cyclic_extension(g: MatrixGroup, start=None, path=None, max_seconds=None) -> SubgroupLattice:
    p = g.ctx.p
    t0 = time.monotonic()
    if start:
        found = {s.key: s for s in start}
        top = max(s.order for s in start)
        layer = sorted((s for s in start if s.order == top), key=_sort_key)
    else:
        triv = g.trivial()
        found = {triv.key: triv}
        layer = [triv]
    pth = g.pth_power_index
    while layer:
        nxt: dict[bytes, Subgroup] = {}
        for H in layer:
            gens = H.generators
            cand = np.nonzero((H.mask[pth] == 1) & (H.mask == 0))[0]
            if not len(cand):
                continue
            ok = kernels.normalizing_among(g.entries, g.keys, g.M, g.inverse_index, H.mask, gens, cand)
            cand = cand[ok]
            seen = np.zeros(g.order, dtype=bool)
            for x in cand:
                if seen[x]:
                    continue
                parts = [H.idx]
                cur = H.idx
                for _ in range(p - 1):
                    cur = g.mul(x, cur)
                    parts.append(cur)
                idx = np.sort(np.concatenate(parts))
                seen[idx] = True
                key = g.keys[idx].tobytes()
                if key not in nxt and key not in found:
                    nxt[key] = Subgroup(g, idx, gens=np.append(gens, x))
        layer = sorted(nxt.values(), key=_sort_key)
        found.update(nxt)
        log.info("layer of order %s: %d subgroups", layer[0].order if layer else "-", len(layer))
        if path is not None and layer:
            partial = SubgroupLattice(g, sorted(found.values(), key=_sort_key), complete=False)
            save_lattice(partial, path)
            if max_seconds is not None and time.monotonic() - t0 > max_seconds:
                raise BudgetExceededError(
                    f"lattice enumeration stopped after {max_seconds}s with {len(found)} subgroups; "
                    f"partial result cached at {path}, rerun to resume"
                )
    lat = SubgroupLattice(g, sorted(found.values(), key=_sort_key))
    if path is not None:
        save_lattice(lat, path)
    return lat


def cyclic_subgroups(g: MatrixGroup) -> list[Subgroup]:
    out: dict[bytes, Subgroup] = {}
    orders = element_orders(g)
    for x in range(g.order):
        k = int(orders[x])
        powers = [g.identity_index]
        cur = g.identity_index
        for _ in range(k - 1):
            cur = int(g.mul(cur, x))
            powers.append(cur)
        s = Subgroup(g, powers, gens=[x])
        out.setdefault(s.key, s)
    return sorted(out.values(), key=_sort_key)


def _join_closure(g: MatrixGroup) -> SubgroupLattice:
    atoms = cyclic_subgroups(g)
    found = {s.key: s for s in atoms}
    frontier = list(atoms)
    while frontier:
        new = []
        for A in frontier:
            for C in atoms:
                if C.issubset(A):
                    continue
                gens = np.concatenate([A.generators, C.generators])
                J = Subgroup(g, np.nonzero(g.closure_mask(A.mask, gens))[0], gens=gens)
                if J.key not in found:
                    found[J.key] = J
                    new.append(J)
        frontier = new
    return SubgroupLattice(g, sorted(found.values(), key=_sort_key))


# -- conjugacy ---------------------------------------------------------------


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            if b < a:
                a, b = b, a
            self.parent[b] = a


def _conj_sorted_keys(keys, g_ent, ginv_ent, M):
    e = np.stack(_unpack(keys, M), axis=1)
    return np.sort(kernels.conj_keys(e, g_ent, ginv_ent, M))


def conjugacy_classes(lat: SubgroupLattice, ambient: MatrixGroup | None = None, orbit_budget: int = 1 << 22) -> SubgroupLattice:
    """Partition the lattice into orbits under conjugation by ``ambient`` (default: the parent)."""
    parent = lat.parent
    if ambient is None:
        ambient = parent
    if ambient is not parent:
        ambient.embed(parent.full())  # raises ContainmentError
    subs = lat.subgroups
    uf = _UnionFind(len(subs))
    M = parent.M
    gens = parent.full().generators
    for i, s in enumerate(subs):
        for x in gens:
            j = lat.find(Subgroup(parent, parent.conj(int(x), s.idx)))
            if j < 0:
                raise InvalidParameterError("lattice is not closed under conjugation; is it complete?")
            uf.union(i, j)
    orbit_size: dict[int, int] = {}
    if ambient is parent:
        for i in range(len(subs)):
            r = uf.find(i)
            orbit_size[r] = orbit_size.get(r, 0) + 1
    else:
        amb_gens = ambient.generator_index
        g_ent = ambient.entries[amb_gens]
        ginv_ent = ambient.entries[ambient.inverse_index[amb_gens]]
        s_root = [uf.find(i) for i in range(len(subs))]
        covered: set[int] = set()
        for r in sorted(set(s_root)):
            if r in covered:
                continue
            start = subs[r].keys
            seen = {start.tobytes()}
            queue = [start]
            hits = [r]
            while queue:
                cur = queue.pop()
                for k in range(len(amb_gens)):
                    nk = _conj_sorted_keys(cur, g_ent[k], ginv_ent[k], M)
                    b = nk.tobytes()
                    if b in seen:
                        continue
                    seen.add(b)
                    queue.append(nk)
                    j = lat._index.get(b, -1)
                    if j >= 0:
                        hits.append(j)
                if len(seen) > orbit_budget:
                    raise BudgetExceededError(f"orbit of a subgroup of order {subs[r].order} exceeds {orbit_budget}")
            for j in hits:
                uf.union(r, j)
                covered.add(s_root[j])
            orbit_size[r] = len(seen)
        orbit_size = {uf.find(r): sz for r, sz in orbit_size.items()}
    groups: dict[int, list[int]] = {}
    for i in range(len(subs)):
        groups.setdefault(uf.find(i), []).append(i)
    classes = [SubgroupClass(sorted(m), orbit_size[r]) for r, m in groups.items()]
    classes.sort(key=lambda c: c.rep)
    return SubgroupLattice(parent, subs, classes=classes, ambient=ambient, complete=lat.complete)


def normalizer(ambient: MatrixGroup, sub) -> Subgroup:
    P = ambient.embed(sub)
    mask = kernels.normalizes_mask(ambient.entries, ambient.keys, ambient.M, ambient.inverse_index, P.mask, P.generators)
    return Subgroup(ambient, np.nonzero(mask)[0])


def centralizer(ambient: MatrixGroup, sub) -> Subgroup:
    P = ambient.embed(sub)
    mask = kernels.centralizes_mask(ambient.entries, ambient.M, ambient.entries[P.generators])
    return Subgroup(ambient, np.nonzero(mask)[0])


def is_normal(sub, ambient) -> bool:
    """Whether ``sub`` is normal in ``ambient`` (a group or a subgroup of the same parent)."""
    if isinstance(ambient, MatrixGroup):
        ambient = ambient.full()
    G = ambient.parent
    P = G.embed(sub)
    if not P.issubset(ambient):
        raise ContainmentError("subgroup not contained in the ambient group")
    for x in ambient.generators:
        c = G.conj(int(x), P.generators)
        if (c < 0).any() or not P.mask[c].all():
            return False
    return True


def intersect(a: Subgroup, b: Subgroup) -> Subgroup:
    b = a.parent.embed(b)
    return Subgroup(a.parent, np.nonzero(a.mask & b.mask)[0])


# -- quotients ---------------------------------------------------------------


class QuotientGroup:
    """``numerator / denominator`` as cosets of a normal subgroup.

    Cosets are numbered by increasing least element; ``coset_of`` maps each
    parent index to its coset (-1 outside the numerator).
    """

    def __init__(self, numerator: Subgroup, denominator: Subgroup):
        G = numerator.parent
        self.parent = G
        self.numerator = numerator
        self.denominator = denominator
        coset_of = np.full(G.order, -1, dtype=np.int64)
        n_cosets = numerator.order // denominator.order
        if denominator.order <= min(n_cosets, 32):
            # least element of each coset xD, one vectorized pass per element of D
            least = numerator.idx.copy()
            for y in denominator.idx:
                np.minimum(least, G.mul(numerator.idx, y), out=least)
            reps = np.unique(least)
            coset_of[numerator.idx] = np.searchsorted(reps, least)
        else:
            reps = []
            for x in numerator.idx:
                if coset_of[x] >= 0:
                    continue
                coset_of[G.mul(x, denominator.idx)] = len(reps)
                reps.append(int(x))
            reps = np.array(reps, dtype=np.int64)
        self.reps = reps
        self.coset_of = coset_of

    @property
    def order(self) -> int:
        return len(self.reps)

    def __len__(self):
        return len(self.reps)

    @cached_property
    def identity(self) -> int:
        return int(self.coset_of[self.parent.identity_index])

    def mul(self, i, j):
        return self.coset_of[self.parent.mul(self.reps[np.asarray(i)], self.reps[np.asarray(j)])]

    def inv(self, i):
        return self.coset_of[self.parent.inverse_index[self.reps[np.asarray(i)]]]

    @cached_property
    def table(self) -> np.ndarray:
        n = self.order
        i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        return self.mul(i.reshape(-1), j.reshape(-1)).reshape(n, n)

    def element_order(self, i: int) -> int:
        k, cur = 1, i
        while cur != self.identity:
            cur = int(self.mul(cur, i))
            k += 1
        return k

    def is_cyclic(self) -> bool:
        return any(self.element_order(i) == self.order for i in range(self.order))

    def is_abelian(self) -> bool:
        gens = self.numerator.generators
        c = self.coset_of[gens]
        return all(int(self.mul(a, b)) == int(self.mul(b, a)) for a in c for b in c)

    def preimage(self, cosets) -> Subgroup:
        keep = np.isin(self.coset_of, np.asarray(cosets, dtype=np.int64)) & (self.coset_of >= 0)
        return Subgroup(self.parent, np.nonzero(keep)[0])

    def image(self, sub) -> np.ndarray:
        sub = self.parent.embed(sub)
        c = self.coset_of[sub.idx]
        if (c < 0).any():
            raise ContainmentError("subgroup not inside the numerator")
        return np.unique(c)

    def sylow_preimage(self) -> Subgroup:
        return sylow_containing(self.numerator, self.denominator)

    def op_preimage(self) -> Subgroup:
        """Preimage of O_p of the quotient: the intersection of all its Sylow p-subgroups."""
        return normal_core(self.sylow_preimage(), self.numerator)

    def op_subgroup(self) -> np.ndarray:
        return self.image(self.op_preimage())


def quotient(numer, denom) -> QuotientGroup:
    if isinstance(numer, MatrixGroup):
        numer = numer.full()
    D = numer.parent.embed(denom)
    if not D.issubset(numer):
        raise ContainmentError("denominator not contained in numerator")
    if not is_normal(D, numer):
        raise NotNormalError("denominator is not normal in the numerator")
    return QuotientGroup(numer, D)


def sylow_containing(N: Subgroup, T: Subgroup | None = None) -> Subgroup:
    """A Sylow p-subgroup of ``N`` containing the p-subgroup ``T``, grown greedily.

    Repeatedly adjoin a p-element of N_N(T) outside T (replaced by the power
    whose p-th power falls in T) until the order reaches the p-part of |N|.
    """
    G = N.parent
    p = G.ctx.p
    target = 1
    rest = N.order
    while rest % p == 0:
        rest //= p
        target *= p
    if T is None:
        T = G.trivial()
    T = G.embed(T)
    pel = np.zeros(G.order, dtype=bool)
    pel[N.idx[G.pow_idx(N.idx, target) == G.identity_index]] = True
    while T.order < target:
        cand = np.nonzero(pel & (T.mask == 0))[0]
        cand = cand[kernels.normalizing_among(G.entries, G.keys, G.M, G.inverse_index, T.mask, T.generators, cand)]
        if not len(cand):
            raise InvalidParameterError("no p-element normalizes T; T is not a p-subgroup of N")
        x = int(cand[0])
        while True:
            xp = int(G.pow_idx(np.array([x]), p)[0])
            if T.mask[xp]:
                break
            x = xp
        parts = [T.idx]
        cur = T.idx
        for _ in range(p - 1):
            cur = G.mul(x, cur)
            parts.append(cur)
        T = Subgroup(G, np.concatenate(parts), gens=np.append(T.generators, x))
    return T


def normal_core(T: Subgroup, N: Subgroup) -> Subgroup:
    """Intersection of all N-conjugates of T (iterated conjugation by N's generators)."""
    G = T.parent
    mask = T.mask.copy()
    gens = N.generators
    while True:
        before = int(mask.sum())
        for x in gens:
            idx = np.nonzero(mask)[0]
            conj = np.zeros(G.order, dtype=np.uint8)
            conj[G.conj(int(x), idx)] = 1
            mask &= conj
        if int(mask.sum()) == before:
            break
    return Subgroup(G, np.nonzero(mask)[0])


# -- cache -------------------------------------------------------------------


def cache_path(cache_dir, g: MatrixGroup, kind_tag: str | None = None) -> Path:
    tag = kind_tag or g.kind.value
    if g.m is not None:
        tag += f"{g.m}"
    digest = hashlib.sha256(g.keys.tobytes()).hexdigest()[:12]
    return Path(cache_dir) / f"lattice-v{CACHE_SCHEMA}-p{g.ctx.p}-n{g.ctx.n}-{tag}-{digest}.npz"


def default_cache_dir() -> Path | None:
    env = os.environ.get("SYLOWGL_CACHE_DIR")
    return Path(env) if env else None


def save_lattice(lat: SubgroupLattice, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    subs = lat.subgroups
    sizes = np.array([s.order for s in subs], dtype=np.int64)
    gsizes = np.array([len(s.generators) for s in subs], dtype=np.int64)
    g = lat.parent
    meta = {
        "schema": CACHE_SCHEMA,
        "p": g.ctx.p,
        "n": g.ctx.n,
        "kind": g.kind.value,
        "m": g.m,
        "parent_order": g.order,
        "parent_digest": hashlib.sha256(g.keys.tobytes()).hexdigest(),
        "complete": bool(lat.complete),
    }
    tmp = path.with_suffix(".tmp.npz")
    np.savez(
        tmp,
        meta=np.frombuffer(json.dumps(meta, sort_keys=True).encode(), dtype=np.uint8),
        sizes=sizes,
        flat=np.concatenate([s.idx for s in subs]) if subs else np.zeros(0, np.int64),
        gen_sizes=gsizes,
        gen_flat=np.concatenate([s.generators for s in subs]) if subs else np.zeros(0, np.int64),
    )
    os.replace(tmp, path)


def load_lattice(path, g: MatrixGroup) -> SubgroupLattice:
    with np.load(path) as z:
        meta = json.loads(z["meta"].tobytes().decode())
        if meta["schema"] != CACHE_SCHEMA:
            raise InvalidParameterError(f"cache schema {meta['schema']} != {CACHE_SCHEMA}")
        if meta["parent_digest"] != hashlib.sha256(g.keys.tobytes()).hexdigest():
            raise InvalidParameterError("cache was written for a different group")
        sizes, flat = z["sizes"], z["flat"]
        gsizes, gflat = z["gen_sizes"], z["gen_flat"]
    bounds = np.concatenate([[0], np.cumsum(sizes)])
    gbounds = np.concatenate([[0], np.cumsum(gsizes)])
    subs = [
        Subgroup(g, flat[bounds[i]:bounds[i + 1]], gens=gflat[gbounds[i]:gbounds[i + 1]])
        for i in range(len(sizes))
    ]
    return SubgroupLattice(g, subs, complete=meta["complete"])
