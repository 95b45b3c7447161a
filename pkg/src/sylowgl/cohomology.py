"""H^1 of the congruence kernels as F_p[C_p]-modules, the graded model
Lambda(M) (x) S(M) with its induced action, C_p cohomology, and the E_2 page.

Matrices act on column vectors: ``A[:, j]`` is the image of basis vector j.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import fplinalg as fl
from .errors import InvalidActorError, InvalidParameterError, StructureError
from .groups import GroupKind, MatrixGroup, Subgroup, build_group
from .lattice import QuotientGroup, is_normal
from .pgroup import minimal_generators, verbal_subgroups
from .residue import Ctx, Mat2

SCHEMA = 1


@dataclass
class FpModule:
    p: int
    dim: int
    actors: dict[str, np.ndarray]
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        for name, a in self.actors.items():
            a = np.asarray(a, dtype=np.int64) % self.p
            if a.shape != (self.dim, self.dim):
                raise InvalidActorError(f"actor {name} has shape {a.shape}, expected {(self.dim, self.dim)}")
            if self.dim and fl.det(a, self.p) == 0:
                raise InvalidActorError(f"actor {name} is singular mod {self.p}")
            self.actors[name] = a

    def actor(self, name: str) -> np.ndarray:
        if name not in self.actors:
            raise InvalidActorError(f"no actor named {name!r}; have {sorted(self.actors)}")
        return self.actors[name]

    def restrict(self, names) -> "FpModule":
        return FpModule(self.p, self.dim, {k: self.actors[k] for k in names}, list(self.labels))


@dataclass
class GradedPiece:
    degree: int
    p: int
    basis: list[tuple[tuple[int, ...], tuple[int, ...]]]
    actors: dict[str, np.ndarray]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def as_module(self) -> FpModule:
        return FpModule(self.p, self.dim, dict(self.actors), [basis_label(b) for b in self.basis])


def basis_label(b) -> str:
    ext, sym = b
    parts = [f"x{i + 1}" for i in ext]
    parts += [f"y{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(sym) if e]
    return "*".join(parts) or "1"


# -- H^1 of a kernel ---------------------------------------------------------


class FrattiniQuotient:
    """V = K/Phi(K) for a kernel K living inside the element table of ``parent``.

    The basis is the images of ``minimal_generators``; coordinates of every
    element of K are tabulated through the coset decomposition.
    """

    def __init__(self, parent: MatrixGroup, kernel):
        self.parent = parent
        K = parent.embed(kernel)
        self.kernel = K
        self.p = parent.p
        vs = verbal_subgroups(K)
        self.frattini = vs.frattini
        self.d = vs.d
        self.basis = minimal_generators(K, vs)
        Q = QuotientGroup(K, vs.frattini)
        if Q.order != self.p**self.d:
            raise StructureError("Frattini quotient has the wrong order")
        coords = np.full((Q.order, self.d), -1, dtype=np.int64)
        G = parent
        for e in itertools.product(range(self.p), repeat=self.d):
            x = G.identity_index
            for b, k in zip(self.basis, e):
                x = int(G.mul(x, G.pow_idx(np.array([b]), k)[0]))
            c = int(Q.coset_of[x])
            if coords[c, 0] >= 0:
                raise StructureError("Frattini quotient is not elementary abelian on the chosen basis")
            coords[c] = e
        self._quot = Q
        self._coords = coords

    def coords(self, idx) -> np.ndarray:
        c = self._quot.coset_of[np.asarray(idx, dtype=np.int64)]
        if (c < 0).any():
            raise StructureError("element outside the kernel")
        return self._coords[c]

    def conjugation_matrix(self, g: int) -> np.ndarray:
        """Matrix of ``v -> g v g^-1`` on V (g a parent index normalizing K)."""
        img = self.parent.conj(int(g), self.basis)
        if (img < 0).any() or not self.kernel.mask[img].all():
            raise StructureError("conjugating element does not normalize the kernel")
        return self.coords(img).T % self.p

    def dual_matrix(self, g: int) -> np.ndarray:
        """Action on H^1 = Hom(V, F_p): ``(g.f)(v) = f(g^-1 v g)``, i.e. the inverse transpose."""
        return fl.inverse(self.conjugation_matrix(g), self.p).T % self.p

    def labels(self) -> list[str]:
        return [f"x{i + 1}" for i in range(self.d)]


def sylow_lift(ctx: Ctx) -> Mat2:
    """The fixed lift of a generator of S/K: the unitriangular matrix with b = 1."""
    return Mat2(1, 1, 0, 1, ctx)


def h1_module(kernel: MatrixGroup, sylow: MatrixGroup, lift: Mat2 | None = None) -> FpModule:
    """M = H^1(K, F_p) with the C_p = S/K action induced by conjugation, actor name ``sigma``."""
    S = sylow
    K = S.embed(kernel)
    if not is_normal(K, S):
        raise StructureError("kernel is not normal in the Sylow subgroup")
    if S.order != K.order * S.p:
        raise StructureError("Sylow/kernel quotient is not of order p")
    u = sylow_lift(S.ctx) if lift is None else lift
    if u not in S or u in K:
        raise StructureError("lift does not map to a generator of the quotient")
    V = FrattiniQuotient(S, K)
    sigma = V.dual_matrix(S.index(u))
    return FpModule(S.p, V.d, {"sigma": sigma}, V.labels())


def check_cp_actor(m: FpModule, actor: str = "sigma") -> np.ndarray:
    a = m.actor(actor)
    if not np.array_equal(fl.matpow(a, m.p, m.p), np.eye(m.dim, dtype=np.int64)):
        raise InvalidActorError(f"actor {actor} does not have order dividing {m.p}")
    return a


def module_jordan_type(m: FpModule, actor: str = "sigma") -> list[int]:
    """Jordan block sizes of the unipotent actor, from the ranks of (sigma - 1)^k."""
    a = check_cp_actor(m, actor)
    p = m.p
    n = (a - np.eye(m.dim, dtype=np.int64)) % p
    ranks = [m.dim]
    cur = np.eye(m.dim, dtype=np.int64)
    for _ in range(p + 1):
        cur = fl.matmul(cur, n, p)
        ranks.append(fl.rank(cur, p))
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, p + 2)]
    parts: list[int] = []
    for k in range(1, p + 1):
        exactly = at_least[k - 1] - at_least[k]
        parts += [k] * exactly
    return sorted(parts, reverse=True)


# -- graded model ------------------------------------------------------------


def exterior_power(a, e: int, p: int, method: str = "expand") -> np.ndarray:
    """Matrix of Lambda^e(a) on the basis of increasing index subsets.

    ``expand`` multiplies out (a x_j1) ^ ... ^ (a x_je) directly; ``minors``
    uses the e x e minors of a.  The two must agree.
    """
    a = np.asarray(a, dtype=np.int64) % p
    k = a.shape[0]
    subsets = list(itertools.combinations(range(k), e))
    pos = {s: i for i, s in enumerate(subsets)}
    out = np.zeros((len(subsets), len(subsets)), dtype=np.int64)
    for col, J in enumerate(subsets):
        if method == "minors":
            for row, I in enumerate(subsets):
                out[row, col] = fl.det(a[np.ix_(I, J)], p) if e else 1
            continue
        for seq in itertools.product(range(k), repeat=e):
            if len(set(seq)) < e:
                continue
            coef = 1
            for i, j in zip(seq, J):
                coef = coef * int(a[i, j]) % p
            if not coef:
                continue
            # sign of the permutation sorting seq
            inv = sum(1 for x in range(e) for y in range(x + 1, e) if seq[x] > seq[y])
            out[pos[tuple(sorted(seq))], col] += -coef if inv % 2 else coef
    return out % p


def symmetric_monomials(k: int, s: int) -> list[tuple[int, ...]]:
    """Exponent vectors of degree-s monomials in k variables, graded lexicographic."""
    out = []
    for combo in itertools.combinations_with_replacement(range(k), s):
        v = [0] * k
        for i in combo:
            v[i] += 1
        out.append(tuple(v))
    return out


def symmetric_power(a, s: int, p: int) -> np.ndarray:
    """Matrix of S^s(a) on ``symmetric_monomials``: y_j -> sum_i a[i, j] y_i, extended multiplicatively."""
    a = np.asarray(a, dtype=np.int64) % p
    k = a.shape[0]
    monos = symmetric_monomials(k, s)
    pos = {m: i for i, m in enumerate(monos)}
    out = np.zeros((len(monos), len(monos)), dtype=np.int64)
    for col, mono in enumerate(monos):
        poly = {tuple([0] * k): 1}
        for j, ej in enumerate(mono):
            for _ in range(ej):
                nxt: dict[tuple[int, ...], int] = {}
                for m, c in poly.items():
                    for i in range(k):
                        if a[i, j]:
                            mm = list(m)
                            mm[i] += 1
                            t = tuple(mm)
                            nxt[t] = (nxt.get(t, 0) + c * int(a[i, j])) % p
                poly = nxt
        for m, c in poly.items():
            out[pos[m], col] = (out[pos[m], col] + c) % p
    return out


def _piece_basis(k: int, degree: int):
    basis = []
    blocks = []
    for e in range(min(k, degree) + 1):
        if (degree - e) % 2:
            continue
        s = (degree - e) // 2
        ext = list(itertools.combinations(range(k), e))
        sym = symmetric_monomials(k, s)
        blocks.append((e, s, len(ext) * len(sym)))
        basis += [(x, y) for x in ext for y in sym]
    return basis, blocks


def graded_piece_dim(k: int, degree: int) -> int:
    if k == 0:
        return int(degree == 0)
    return sum(math.comb(k, e) * math.comb((degree - e) // 2 + k - 1, k - 1)
               for e in range(min(k, degree) + 1) if (degree - e) % 2 == 0)


def graded_piece(m: FpModule, degree: int) -> GradedPiece:
    """Degree-``degree`` part of Lambda(M) (x) S(M), |x| = 1, |y| = 2, with induced actors."""
    if degree < 0:
        raise InvalidParameterError("degree must be nonnegative")
    k, p = m.dim, m.p
    basis, blocks = _piece_basis(k, degree)
    actors = {}
    for name, a in m.actors.items():
        mats = [np.kron(exterior_power(a, e, p), symmetric_power(a, s, p)) % p for e, s, _ in blocks]
        out = np.zeros((len(basis), len(basis)), dtype=np.int64)
        off = 0
        for b in mats:
            n = b.shape[0]
            out[off:off + n, off:off + n] = b
            off += n
        actors[name] = out
    return GradedPiece(degree, p, basis, actors)


def poincare_series(dim_m: int, cap: int) -> list[int]:
    """Coefficients of (1+t)^k / (1-t^2)^k through degree ``cap``."""
    if cap < 0:
        raise InvalidParameterError("cap must be nonnegative")
    num = [math.comb(dim_m, i) for i in range(dim_m + 1)]
    inv = [0] * (cap + 1)
    for s in range(cap // 2 + 1):
        inv[2 * s] = math.comb(s + dim_m - 1, dim_m - 1) if dim_m else int(s == 0)
    return [sum(num[i] * inv[d - i] for i in range(min(d, dim_m) + 1)) for d in range(cap + 1)]


# -- C_p cohomology ----------------------------------------------------------


def cp_cohomology(m, i: int, actor: str = "sigma") -> int:
    """dim H^i(C_p, m) from the 2-periodic resolution."""
    if isinstance(m, GradedPiece):
        m = m.as_module()
    if i < 0:
        raise InvalidParameterError("cohomological degree must be nonnegative")
    if m.dim == 0:
        return 0
    a = check_cp_actor(m, actor)
    p = m.p
    eye = np.eye(m.dim, dtype=np.int64)
    t = (a - eye) % p
    rank_t = fl.rank(t, p)
    if i == 0:
        return m.dim - rank_t
    norm = np.zeros_like(eye)
    cur = eye
    for _ in range(p):
        norm = (norm + cur) % p
        cur = fl.matmul(cur, a, p)
    rank_n = fl.rank(norm, p)
    if i % 2:
        return (m.dim - rank_n) - rank_t
    return (m.dim - rank_t) - rank_n


# -- E_2 page ----------------------------------------------------------------


@dataclass
class E2Table:
    p: int
    n: int
    kind: str
    caps: tuple[int, int]
    dims: list[list[int]]

    def cell(self, i: int, j: int) -> int:
        return self.dims[i][j]

    def to_json_obj(self) -> dict:
        return {"schema": SCHEMA, "p": self.p, "n": self.n, "kind": self.kind,
                "caps": list(self.caps), "dims": self.dims}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        imax, jmax = self.caps
        w.writerow(["j\\i"] + list(range(imax + 1)))
        for j in range(jmax, -1, -1):
            w.writerow([j] + [self.dims[i][j] for i in range(imax + 1)])
        return buf.getvalue()

    def diff(self, other: "E2Table") -> list[dict]:
        imax = min(self.caps[0], other.caps[0])
        jmax = min(self.caps[1], other.caps[1])
        return [{"i": i, "j": j, "left": self.dims[i][j], "right": other.dims[i][j]}
                for i in range(imax + 1) for j in range(jmax + 1) if self.dims[i][j] != other.dims[i][j]]


def kernel_and_sylow(ctx: Ctx, kind: str, budget: int | None = None):
    kind = kind.upper()
    kw = {} if budget is None else {"budget": budget}
    if kind == "SL":
        return build_group(ctx, GroupKind.KERNEL_K, m=1, **kw), build_group(ctx, GroupKind.SYLOW_SL, **kw)
    if kind == "GL":
        return build_group(ctx, GroupKind.KERNEL_L, m=1, **kw), build_group(ctx, GroupKind.SYLOW_GL, **kw)
    raise InvalidParameterError(f"kind must be SL or GL, not {kind!r}")


def e2_from_module(m: FpModule, caps: tuple[int, int]) -> list[list[int]]:
    imax, jmax = caps
    pieces = [graded_piece(m, j).as_module() for j in range(jmax + 1)]
    return [[cp_cohomology(pieces[j], i) for j in range(jmax + 1)] for i in range(imax + 1)]


def e2_page(ctx: Ctx, kind: str, caps: tuple[int, int], budget: int | None = None) -> E2Table:
    """E_2^{i,j} = H^i(C_p, H^j(K)) for 1 -> K -> S -> C_p -> 1, H^j(K) from the graded model."""
    if ctx.n < 2:
        raise InvalidParameterError("the E_2 page needs n >= 2")
    if min(caps) < 0:
        raise InvalidParameterError("caps must be nonnegative")
    K, S = kernel_and_sylow(ctx, kind, budget)
    m = h1_module(K, S)
    return E2Table(ctx.p, ctx.n, kind.upper(), (int(caps[0]), int(caps[1])), e2_from_module(m, caps))
