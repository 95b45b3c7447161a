"""Exact arithmetic of 2x2 matrices over Z/p^n."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    ContextError,
    ContextMismatchError,
    InvalidReductionError,
    SingularMatrixError,
)

#: residues are plain Python ints kept in [0, p^n)
Residue = int

_INT63 = 1 << 63


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Ctx:
    """The ring Z/p^n for an odd prime p.

    Contexts with ``p^(2n) >= 2^63`` are rejected so that a product of two
    reduced residues always fits a signed 64-bit word.
    """

    p: int
    n: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not isinstance(self.n, int):
            raise ContextError("p and n must be integers")
        if self.p == 2:
            raise ContextError("p = 2 is not supported; p must be an odd prime")
        if not is_prime(self.p):
            raise ContextError(f"p = {self.p} is not prime")
        if self.n < 1:
            raise ContextError(f"n must be >= 1, got {self.n}")
        if self.p ** (2 * self.n) >= _INT63:
            raise ContextError(f"p^(2n) = {self.p}^{2 * self.n} does not fit in 63 bits")

    @property
    def modulus(self) -> int:
        return self.p**self.n

    def with_n(self, n: int) -> "Ctx":
        return Ctx(self.p, n)

    def __str__(self):
        return f"Z/{self.p}^{self.n}"


@dataclass(frozen=True)
class Mat2:
    """Row-major 2x2 matrix ``[[a, b], [c, d]]`` with entries reduced mod p^n."""

    a: int
    b: int
    c: int
    d: int
    ctx: Ctx

    def __post_init__(self):
        M = self.ctx.modulus
        for name in "abcd":
            object.__setattr__(self, name, int(getattr(self, name)) % M)

    @classmethod
    def identity(cls, ctx: Ctx) -> "Mat2":
        return cls(1, 0, 0, 1, ctx)

    @classmethod
    def from_rows(cls, rows, ctx: Ctx) -> "Mat2":
        (a, b), (c, d) = rows
        return cls(a, b, c, d, ctx)

    @classmethod
    def from_key(cls, key: int, ctx: Ctx) -> "Mat2":
        M = ctx.modulus
        key, d = divmod(int(key), M)
        key, c = divmod(key, M)
        a, b = divmod(key, M)
        return cls(a, b, c, d, ctx)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    @property
    def key(self) -> int:
        """Packed integer ``((a*M + b)*M + c)*M + d``; sorting keys sorts matrices lexicographically."""
        M = self.ctx.modulus
        return ((self.a * M + self.b) * M + self.c) * M + self.d

    def rows(self):
        return ((self.a, self.b), (self.c, self.d))

    def is_identity(self) -> bool:
        return self.entries == (1, 0, 0, 1)

    def __mul__(self, other: "Mat2") -> "Mat2":
        return mat_mul(self, other, self.ctx)

    def __pow__(self, k: int) -> "Mat2":
        return mat_pow(self, k, self.ctx)

    def __repr__(self):
        return f"Mat2([[{self.a}, {self.b}], [{self.c}, {self.d}]] mod {self.ctx.modulus})"


def _check(m: Mat2, ctx: Ctx):
    if m.ctx != ctx:
        raise ContextMismatchError(f"matrix over {m.ctx} used in context {ctx}")


def mat_mul(x: Mat2, y: Mat2, ctx: Ctx) -> Mat2:
    _check(x, ctx)
    _check(y, ctx)
    M = ctx.modulus
    return Mat2(
        (x.a * y.a + x.b * y.c) % M,
        (x.a * y.b + x.b * y.d) % M,
        (x.c * y.a + x.d * y.c) % M,
        (x.c * y.b + x.d * y.d) % M,
        ctx,
    )


def det(m: Mat2, ctx: Ctx) -> Residue:
    _check(m, ctx)
    return (m.a * m.d - m.b * m.c) % ctx.modulus


def unit_inverse(u: int, ctx: Ctx) -> Residue:
    """Inverse of a unit mod p^n (extended Euclid via ``pow``)."""
    u %= ctx.modulus
    if u % ctx.p == 0:
        raise SingularMatrixError(f"{u} is not a unit mod {ctx.modulus}")
    return pow(u, -1, ctx.modulus)


def mat_inverse(m: Mat2, ctx: Ctx) -> Mat2:
    _check(m, ctx)
    dt = det(m, ctx)
    if dt % ctx.p == 0:
        raise SingularMatrixError(f"det = {dt} is not a unit mod {ctx.modulus}")
    di = pow(dt, -1, ctx.modulus)
    return Mat2(m.d * di, -m.b * di, -m.c * di, m.a * di, ctx)


def reduce_mod(m: Mat2, frm: Ctx, to: Ctx) -> Mat2:
    """Entrywise reduction Z/p^n -> Z/p^k (the map gamma_{n,k})."""
    _check(m, frm)
    if to.p != frm.p or to.n >= frm.n:
        raise InvalidReductionError(f"cannot reduce from {frm} to {to}")
    return Mat2(m.a, m.b, m.c, m.d, to)


def mat_pow(m: Mat2, k: int, ctx: Ctx) -> Mat2:
    _check(m, ctx)
    if k < 0:
        raise ValueError("exponent must be nonnegative")
    result = Mat2.identity(ctx)
    base = m
    while k:
        if k & 1:
            result = mat_mul(result, base, ctx)
        base = mat_mul(base, base, ctx)
        k >>= 1
    return result


def commutator(x: Mat2, y: Mat2, ctx: Ctx) -> Mat2:
    """``x^-1 y^-1 x y``."""
    return mat_inverse(x, ctx) * mat_inverse(y, ctx) * x * y
