"""Enumerated matrix groups over Z/p^n.

A :class:`MatrixGroup` stores its elements as a key-sorted ``(N, 4)`` entry
table; a :class:`Subgroup` is a sorted array of row indices into its parent.
All the heavy lifting goes through :mod:`sylowgl.kernels`.
"""

from __future__ import annotations

from enum import Enum
from functools import cached_property

import numpy as np

from . import kernels
from .errors import (
    BudgetExceededError,
    ContainmentError,
    InvalidElementError,
    InvalidParameterError,
    NotAMemberError,
)
from .residue import Ctx, Mat2

DEFAULT_BUDGET = 1 << 22

_KEY_LIMIT = 1 << 63


class GroupKind(str, Enum):
    GL = "GL"
    SL = "SL"
    SYLOW_GL = "SylowGL"
    SYLOW_SL = "SylowSL"
    KERNEL_L = "KernelL"
    KERNEL_K = "KernelK"
    CUSTOM = "Custom"


def _kind(kind) -> GroupKind:
    if isinstance(kind, GroupKind):
        return kind
    for k in GroupKind:
        if str(kind).lower() in (k.value.lower(), k.name.lower()):
            return k
    raise InvalidParameterError(f"unknown group kind {kind!r}")


def closed_form_order(ctx: Ctx, kind, m: int | None = None) -> int:
    p, n = ctx.p, ctx.n
    kind = _kind(kind)
    if kind is GroupKind.GL:
        return p ** (4 * n - 3) * (p - 1) ** 2 * (p + 1)
    if kind is GroupKind.SL:
        return p ** (3 * n - 2) * (p - 1) * (p + 1)
    if kind is GroupKind.SYLOW_GL:
        return p ** (4 * n - 3)
    if kind is GroupKind.SYLOW_SL:
        return p ** (3 * n - 2)
    if kind is GroupKind.KERNEL_L:
        return p ** (4 * (n - m))
    if kind is GroupKind.KERNEL_K:
        return p ** (3 * (n - m))
    raise InvalidParameterError("no closed form for custom groups")


def label_for(ctx: Ctx, kind, m: int | None = None) -> str:
    kind = _kind(kind)
    p, n = ctx.p, ctx.n
    return {
        GroupKind.GL: f"GL2(Z/{p}^{n})",
        GroupKind.SL: f"SL2(Z/{p}^{n})",
        GroupKind.SYLOW_GL: f"S_{p}({n},GL)",
        GroupKind.SYLOW_SL: f"S_{p}({n},SL)",
        GroupKind.KERNEL_L: f"L_{{{n},{m}}}",
        GroupKind.KERNEL_K: f"K_{{{n},{m}}}",
        GroupKind.CUSTOM: f"<custom over Z/{p}^{n}>",
    }[kind]


class MatrixGroup:
    """A finite group of 2x2 matrices, fully enumerated in canonical (key) order."""

    def __init__(self, ctx: Ctx, kind, entries, generators=None, m: int | None = None, label=None):
        M = ctx.modulus
        if M**4 >= _KEY_LIMIT:
            raise InvalidParameterError(f"modulus {M} too large for packed element keys")
        entries = np.asarray(entries, dtype=np.int64).reshape(-1, 4) % M
        keys = kernels.ent_keys(entries, M)
        order = np.argsort(keys, kind="stable")
        keys = keys[order]
        if len(keys) > 1 and (np.diff(keys) == 0).any():
            keys, first = np.unique(keys, return_index=True)
            entries = entries[order][first]
        else:
            entries = entries[order]
        self.ctx = ctx
        self.kind = _kind(kind)
        self.m = m
        self.entries = np.ascontiguousarray(entries)
        self.keys = np.ascontiguousarray(keys)
        self.label = label or label_for(ctx, self.kind, m)
        self._generators = None if generators is None else [g for g in generators]

    @property
    def order(self) -> int:
        return len(self.keys)

    def __len__(self):
        return len(self.keys)

    def __repr__(self):
        return f"<MatrixGroup {self.label} order={self.order}>"

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def M(self) -> int:
        return self.ctx.modulus

    # -- element access ------------------------------------------------------

    def index_of_keys(self, keys) -> np.ndarray:
        return kernels.lookup(self.keys, keys)

    def index(self, x: Mat2) -> int:
        if x.ctx != self.ctx:
            raise NotAMemberError(f"{x!r} lives over {x.ctx}, group over {self.ctx}")
        i = int(self.index_of_keys(np.array([x.key]))[0])
        if i < 0:
            raise NotAMemberError(f"{x!r} is not in {self.label}")
        return i

    def __contains__(self, x: Mat2) -> bool:
        return x.ctx == self.ctx and int(self.index_of_keys(np.array([x.key]))[0]) >= 0

    def element(self, i: int) -> Mat2:
        a, b, c, d = (int(v) for v in self.entries[i])
        return Mat2(a, b, c, d, self.ctx)

    @cached_property
    def elements(self) -> list[Mat2]:
        return [self.element(i) for i in range(self.order)]

    @cached_property
    def identity_index(self) -> int:
        i = int(self.index_of_keys(np.array([Mat2.identity(self.ctx).key]))[0])
        if i < 0:
            raise InvalidElementError(f"{self.label} does not contain the identity")
        return i

    @cached_property
    def inverse_index(self) -> np.ndarray:
        e = self.entries
        M = self.M
        dt = (e[:, 0] * e[:, 3] % M - e[:, 1] * e[:, 2] % M) % M
        dinv = _inv_units(dt, M)
        inv = np.stack([e[:, 3] * dinv % M, (-e[:, 1]) % M * dinv % M, (-e[:, 2]) % M * dinv % M, e[:, 0] * dinv % M], axis=1)
        return np.ascontiguousarray(self.index_of_keys(kernels.ent_keys(inv, M)))

    @cached_property
    def pth_power_index(self) -> np.ndarray:
        """Index of ``x^p`` for every element x (-1 would mean the power left the table)."""
        return self.pow_idx(np.arange(self.order), self.p)

    def mul(self, i, j):
        """Indices of products ``x_i x_j`` (vectorized; -1 where the product leaves the group)."""
        return kernels.mul_idx(self.entries, self.keys, self.M, i, j)

    def pow_idx(self, idx, e: int) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        result = np.full(idx.shape, self.identity_index, dtype=np.int64)
        base = idx.copy()
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def conj(self, g: int, idx) -> np.ndarray:
        """Indices of ``g x g^-1`` for ``x`` in ``idx``."""
        gi = self.inverse_index[g]
        return self.index_of_keys(kernels.conj_keys(self.entries[np.asarray(idx, dtype=np.int64)], self.entries[g], self.entries[gi], self.M))

    # -- generators and subgroups -------------------------------------------

    @property
    def generators(self) -> list[Mat2]:
        if self._generators is None:
            self._generators = [self.element(i) for i in self.full().generators]
        return list(self._generators)

    @cached_property
    def generator_index(self) -> np.ndarray:
        return np.array([self.index(g) for g in self.generators], dtype=np.int64)

    def closure_mask(self, member, gens) -> np.ndarray:
        return kernels.closure_mask(self.entries, self.keys, self.M, member, np.asarray(gens, dtype=np.int64))

    def generated(self, gens) -> "Subgroup":
        gens = np.asarray(gens, dtype=np.int64).reshape(-1)
        start = np.zeros(self.order, dtype=np.uint8)
        start[self.identity_index] = 1
        mask = self.closure_mask(start, gens)
        return Subgroup(self, np.nonzero(mask)[0], gens=gens)

    def subgroup(self, idx, gens=None) -> "Subgroup":
        return Subgroup(self, idx, gens=gens)

    def full(self) -> "Subgroup":
        gens = None
        if self._generators is not None:
            gens = np.array([self.index(g) for g in self._generators], dtype=np.int64)
        return Subgroup(self, np.arange(self.order), gens=gens)

    def trivial(self) -> "Subgroup":
        return Subgroup(self, [self.identity_index], gens=np.zeros(0, dtype=np.int64))

    def embed(self, sub) -> "Subgroup":
        """Re-index a subgroup (or group) living elsewhere as a subgroup of ``self``."""
        if isinstance(sub, MatrixGroup):
            sub = sub.full()
        if sub.parent is self:
            return sub
        if sub.parent.ctx != self.ctx:
            raise ContainmentError("subgroup and ambient use different contexts")
        idx = self.index_of_keys(sub.keys)
        if (idx < 0).any():
            raise ContainmentError(f"subgroup of order {sub.order} is not contained in {self.label}")
        gens = None
        if sub._gens is not None:
            gens = idx[np.searchsorted(sub.idx, sub._gens)]
        return Subgroup(self, np.sort(idx), gens=gens)


def _inv_units(values, M):
    table = np.zeros(M, dtype=np.int64)
    for u in np.unique(values):
        table[u] = pow(int(u), -1, M)
    return table[values]


class Subgroup:
    """Elements of a parent group, as sorted row indices into the parent's table."""

    def __init__(self, parent: MatrixGroup, idx, gens=None):
        idx = np.unique(np.asarray(idx, dtype=np.int64))
        self.parent = parent
        self.idx = idx
        self._gens = None if gens is None else np.asarray(gens, dtype=np.int64).reshape(-1)

    @property
    def order(self) -> int:
        return len(self.idx)

    def __len__(self):
        return len(self.idx)

    @property
    def ctx(self) -> Ctx:
        return self.parent.ctx

    @cached_property
    def keys(self) -> np.ndarray:
        return self.parent.keys[self.idx]

    @property
    def entries(self) -> np.ndarray:
        return self.parent.entries[self.idx]

    @cached_property
    def key(self) -> bytes:
        return self.keys.tobytes()

    def __hash__(self):
        return hash(self.key)

    def __eq__(self, other):
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.ctx == other.ctx and self.key == other.key

    def __repr__(self):
        return f"<Subgroup order={self.order} of {self.parent.label}>"

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.order, dtype=np.uint8)
        m[self.idx] = 1
        return m

    def __contains__(self, x: Mat2) -> bool:
        if x not in self.parent:
            return False
        return bool(self.mask[self.parent.index(x)])

    def issubset(self, other: "Subgroup") -> bool:
        if other.parent is self.parent:
            return bool(other.mask[self.idx].all())
        return bool(np.isin(self.keys, other.keys, assume_unique=True).all())

    def elements(self) -> list[Mat2]:
        return [self.parent.element(i) for i in self.idx]

    @property
    def generators(self) -> np.ndarray:
        """A generating set (parent indices); found greedily if none was recorded."""
        if self._gens is None:
            self._gens = _greedy_generators(self.parent, self.idx)
        return self._gens

    def is_closed(self) -> bool:
        """Independent re-check: the set equals the closure of its generators."""
        if self.order == 0 or not self.mask[self.parent.identity_index]:
            return False
        return bool(np.array_equal(self.parent.generated(self.generators).idx, self.idx))

    def as_group(self, label=None) -> MatrixGroup:
        gens = [self.parent.element(i) for i in self.generators]
        g = MatrixGroup(self.ctx, GroupKind.CUSTOM, self.entries, generators=gens, label=label)
        return g


def _greedy_generators(parent: MatrixGroup, idx) -> np.ndarray:
    """Add elements of ``idx`` not yet generated: highest element order first in
    p-groups, otherwise in a fixed pseudo-random order."""
    idx = np.asarray(idx, dtype=np.int64)
    target = np.zeros(parent.order, dtype=np.uint8)
    target[idx] = 1
    cur = np.zeros(parent.order, dtype=np.uint8)
    cur[parent.identity_index] = 1
    gens: list[int] = []
    if _is_power_of(parent.order, parent.p):
        orders = element_orders(parent, idx)
        ranked = idx[np.lexsort((idx, -orders))]
    else:
        # element orders are expensive here; a seeded shuffle finds generators just as fast
        ranked = np.random.default_rng(0).permutation(idx)
    have = 1
    for x in ranked:
        if have == len(idx):
            break
        if cur[x]:
            continue
        gens.append(int(x))
        cur = parent.closure_mask(cur, np.array(gens))
        have = int(cur.sum())
    return np.array(gens, dtype=np.int64)


# -- enumeration by direct parametrization -----------------------------------


def _grid(*ranges):
    mesh = np.meshgrid(*[np.arange(r, dtype=np.int64) for r in ranges], indexing="ij")
    return [m.reshape(-1) for m in mesh]


def _solve_d(A, B, C, M):
    """The unique D with A*D - B*C = 1, for unit A."""
    return (1 + B * C % M) % M * _inv_units(A, M) % M


def _enumerate(ctx: Ctx, kind: GroupKind, m: int | None):
    p, n, M = ctx.p, ctx.n, ctx.modulus
    q = p ** (n - 1)
    if kind is GroupKind.SYLOW_GL:
        a, b, c, d = _grid(q, M, q, q)
        return np.stack([(1 + p * a) % M, b, p * c % M, (1 + p * d) % M], axis=1)
    if kind is GroupKind.SYLOW_SL:
        a, b, c = _grid(q, M, q)
        A, C = (1 + p * a) % M, p * c % M
        return np.stack([A, b, C, _solve_d(A, b, C, M)], axis=1)
    if kind in (GroupKind.KERNEL_L, GroupKind.KERNEL_K):
        pm, r = p**m, p ** (n - m)
        if kind is GroupKind.KERNEL_L:
            a, b, c, d = _grid(r, r, r, r)
            return np.stack([(1 + pm * a) % M, pm * b % M, pm * c % M, (1 + pm * d) % M], axis=1)
        a, b, c = _grid(r, r, r)
        A, B, C = (1 + pm * a) % M, pm * b % M, pm * c % M
        return np.stack([A, B, C, _solve_d(A, B, C, M)], axis=1)
    if kind in (GroupKind.SL, GroupKind.GL):
        a, c = _grid(M, M)
        keep = (a % p != 0) | (c % p != 0)
        a, c = a[keep], c[keep]
        unit_a = a % p != 0
        # particular solution of a*d0 - b0*c = 1, then the line (b0 + t*a, d0 + t*c)
        d0 = np.where(unit_a, _inv_units(np.where(unit_a, a, 1), M), 0)
        b0 = np.where(unit_a, 0, (-_inv_units(np.where(unit_a, 1, c), M)) % M)
        t = np.arange(M, dtype=np.int64)
        A = np.repeat(a, M)
        C = np.repeat(c, M)
        B = (np.repeat(b0, M) + np.tile(t, len(a)) * A) % M
        D = (np.repeat(d0, M) + np.tile(t, len(a)) * C) % M
        sl = np.stack([A, B, C, D], axis=1)
        if kind is GroupKind.SL:
            return sl
        units = np.array([u for u in range(1, M) if u % p], dtype=np.int64)
        # right-multiply by diag(1, u): [[a, b u], [c, d u]]
        out = np.repeat(sl, len(units), axis=0)
        uu = np.tile(units, len(sl))
        out[:, 1] = out[:, 1] * uu % M
        out[:, 3] = out[:, 3] * uu % M
        return out
    raise InvalidParameterError(f"cannot enumerate kind {kind}")


def primitive_root(ctx: Ctx) -> int:
    """Least generator of (Z/p^n)^* (p odd, so the unit group is cyclic)."""
    p, M = ctx.p, ctx.modulus
    phi = M // p * (p - 1)
    primes = [q for q in range(2, p) if (p - 1) % q == 0 and all(q % r for r in range(2, q))]
    if ctx.n > 1:
        primes.append(p)
    for r in range(2, M):
        if r % p and all(pow(r, phi // q, M) != 1 for q in primes):
            return r
    return 1


def _standard_generators(ctx: Ctx, kind: GroupKind):
    if kind is GroupKind.SL:
        return [Mat2(1, 1, 0, 1, ctx), Mat2(1, 0, 1, 1, ctx)]
    if kind is GroupKind.GL:
        return [Mat2(1, 1, 0, 1, ctx), Mat2(1, 0, 1, 1, ctx), Mat2(primitive_root(ctx), 0, 0, 1, ctx)]
    return None


def build_group(ctx: Ctx, kind, m: int | None = None, budget: int = DEFAULT_BUDGET) -> MatrixGroup:
    """Enumerate one of the named groups by parametrizing its defining shape.

    ``kind`` is one of GL, SL, SylowGL, SylowSL, KernelL, KernelK; kernels need
    ``1 <= m < n``.  Raises :class:`BudgetExceededError` when the closed-form
    order exceeds ``budget``.
    """
    kind = _kind(kind)
    if kind is GroupKind.CUSTOM:
        raise InvalidParameterError("use closure_from_generators for custom groups")
    if kind in (GroupKind.KERNEL_L, GroupKind.KERNEL_K):
        if m is None or not 1 <= m < ctx.n:
            raise InvalidParameterError(f"kernel level m={m} needs 1 <= m < n={ctx.n}")
    else:
        m = None
    expected = closed_form_order(ctx, kind, m)
    if expected > budget:
        raise BudgetExceededError(f"{label_for(ctx, kind, m)} has {expected} elements, budget is {budget}")
    entries = _enumerate(ctx, kind, m)
    return MatrixGroup(ctx, kind, entries, generators=_standard_generators(ctx, kind), m=m)


def closure_from_generators(gens, ctx: Ctx, budget: int = DEFAULT_BUDGET, label=None) -> MatrixGroup:
    """Breadth-first closure of ``gens`` under multiplication, with no ambient table."""
    M = ctx.modulus
    gens = list(gens)
    for g in gens:
        if g.ctx != ctx:
            raise InvalidElementError(f"generator {g!r} not over {ctx}")
        if (g.a * g.d - g.b * g.c) % ctx.p == 0:
            raise InvalidElementError(f"generator {g!r} is singular")
    gen_ent = np.array([g.entries for g in gens], dtype=np.int64).reshape(-1, 4)
    ident = np.array([[1, 0, 0, 1]], dtype=np.int64)
    known = kernels.ent_keys(ident, M)
    frontier = ident
    while len(frontier) and len(gen_ent):
        prod = kernels.mul_ent(frontier[:, None, :], gen_ent[None, :, :], M).reshape(-1, 4)
        pk = kernels.ent_keys(prod, M)
        pk, first = np.unique(pk, return_index=True)
        fresh = ~np.isin(pk, known, assume_unique=True)
        frontier = prod[first[fresh]]
        known = np.union1d(known, pk[fresh])
        if len(known) > budget:
            raise BudgetExceededError(f"closure exceeded {budget} elements")
    entries = np.stack(_unpack(known, M), axis=1)
    return MatrixGroup(ctx, GroupKind.CUSTOM, entries, generators=gens, label=label)


def _unpack(keys, M):
    keys, d = np.divmod(keys, M)
    keys, c = np.divmod(keys, M)
    a, b = np.divmod(keys, M)
    return a, b, c, d


def kernel_shape_matrix(x: Mat2, level: int) -> tuple[int, int, int, int]:
    """For ``x = 1 + p^level X`` return X's entries read mod p; raise if x has another shape."""
    p = x.ctx.p
    pl = p**level
    shifted = ((x.a - 1) % x.ctx.modulus, x.b, x.c, (x.d - 1) % x.ctx.modulus)
    if any(v % pl for v in shifted):
        raise InvalidElementError(f"{x!r} is not of the form 1 + {p}^{level} X")
    return tuple((v // pl) % p for v in shifted)


def theta(x: Mat2, frm: Ctx, to: Ctx) -> Mat2:
    """The isomorphism L_{m,m-1} -> L_{n,n-1}, ``1 + p^(m-1) X -> 1 + p^(n-1) X``."""
    if x.ctx != frm:
        raise InvalidElementError(f"{x!r} is not over {frm}")
    if frm.p != to.p or frm.n < 2 or to.n < 2:
        raise InvalidParameterError("theta needs the same prime and exponents >= 2")
    X = kernel_shape_matrix(x, frm.n - 1)
    s = to.p ** (to.n - 1)
    return Mat2(1 + s * X[0], s * X[1], s * X[2], 1 + s * X[3], to)


def _prime_factors(k: int) -> list[int]:
    out, f = [], 2
    while f * f <= k:
        if k % f == 0:
            out.append(f)
            while k % f == 0:
                k //= f
        f += 1
    if k > 1:
        out.append(k)
    return out


def _is_power_of(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def element_order(x: Mat2, g: MatrixGroup) -> int:
    i = g.index(x)
    return int(element_orders(g, np.array([i]))[0])


def element_orders(g: MatrixGroup, idx=None) -> np.ndarray:
    """Orders of the given elements, by trimming the group exponent bound prime by prime."""
    idx = np.arange(g.order) if idx is None else np.asarray(idx, dtype=np.int64)
    if _is_power_of(g.order, g.p):
        # p-group: iterate the p-th power map until the identity is reached
        pth = g.pth_power_index
        e = np.ones(len(idx), dtype=np.int64)
        cur = idx.copy()
        live = cur != g.identity_index
        while live.any():
            e[live] *= g.p
            cur[live] = pth[cur[live]]
            live &= cur != g.identity_index
        return e
    e = np.full(len(idx), g.order, dtype=np.int64)
    one = g.identity_index
    for q in _prime_factors(g.order):
        active = e % q == 0
        while active.any():
            sel = np.nonzero(active)[0]
            trial = e[sel] // q
            ok = np.zeros(len(sel), dtype=bool)
            for t in np.unique(trial):
                where = trial == t
                ok[where] = g.pow_idx(idx[sel[where]], int(t)) == one
            e[sel[ok]] //= q
            active[sel[~ok]] = False
            active &= e % q == 0
    return e


def reduce_entries(g: MatrixGroup, to: Ctx) -> np.ndarray:
    """Keys, in the smaller context, of every element of ``g`` reduced mod p^to.n."""
    if to.p != g.ctx.p or to.n >= g.ctx.n:
        raise InvalidParameterError(f"cannot reduce {g.ctx} to {to}")
    return kernels.ent_keys(g.entries % to.modulus, to.modulus)
