import pytest
from hypothesis import given
from hypothesis import strategies as st

from sylowgl.errors import ContextError, ContextMismatchError, InvalidReductionError, SingularMatrixError
from sylowgl.residue import Ctx, Mat2, det, mat_inverse, mat_mul, mat_pow, reduce_mod, unit_inverse

C9 = Ctx(3, 2)
C27 = Ctx(3, 3)


def M(rows, ctx):
    return Mat2.from_rows(rows, ctx)


def ctxs():
    return st.sampled_from([Ctx(3, 1), Ctx(3, 2), Ctx(3, 3), Ctx(5, 2), Ctx(7, 2)])


def mats(ctx):
    r = st.integers(0, ctx.modulus - 1)
    return st.builds(Mat2, r, r, r, r, st.just(ctx))


def units(ctx):
    return mats(ctx).filter(lambda m: det(m, ctx) % ctx.p)


@pytest.mark.parametrize("p,n", [(2, 3), (9, 1), (4, 2), (3, 0), (7, 12)])
def test_bad_contexts(p, n):
    with pytest.raises(ContextError):
        Ctx(p, n)


def test_modulus_and_reduction_on_construction():
    assert C27.modulus == 27
    assert Mat2(28, -1, 27, 54, C27).entries == (1, 26, 0, 0)


def test_mat_mul_examples():
    x, y = M([[1, 0], [3, 1]], C9), M([[1, 3], [0, 1]], C9)
    assert mat_mul(x, y, C9) == M([[1, 3], [3, 1]], C9)
    x, y = M([[1, 0], [3, 1]], C27), M([[1, 3], [0, 1]], C27)
    assert x * y == M([[1, 3], [3, 10]], C27)
    assert y * x == M([[10, 3], [3, 1]], C27)
    assert x * y != y * x


def test_mat_mul_context_mismatch():
    with pytest.raises(ContextMismatchError):
        mat_mul(Mat2.identity(C9), Mat2.identity(C27), C9)


def test_det_examples():
    assert det(Mat2.identity(C9), C9) == 1
    assert det(M([[1, 3], [0, 1]], C9), C9) == 1
    assert det(M([[4, 0], [0, 4]], C9), C9) == 7


def test_inverse_examples():
    assert mat_inverse(Mat2.identity(C9), C9).is_identity()
    assert mat_inverse(M([[1, 3], [0, 1]], C9), C9) == M([[1, 6], [0, 1]], C9)
    with pytest.raises(SingularMatrixError):
        mat_inverse(M([[3, 0], [0, 3]], C9), C9)
    with pytest.raises(SingularMatrixError):
        unit_inverse(6, C9)
    assert unit_inverse(2, C9) == 5


def test_reduce_examples():
    assert reduce_mod(M([[4, 3], [6, 7]], C27), C27, C9) == M([[4, 3], [6, 7]], C9)
    assert reduce_mod(M([[10, 9], [18, 19]], C27), C27, C9).is_identity()
    for bad in (C27, Ctx(3, 4), Ctx(5, 1)):
        with pytest.raises(InvalidReductionError):
            reduce_mod(Mat2.identity(C27), C27, bad)


def test_pow_examples():
    B = M([[1, 3], [0, 1]], C27)
    assert mat_pow(B, 0, C27).is_identity()
    assert B**3 == M([[1, 9], [0, 1]], C27)
    assert not (B**3).is_identity()
    assert (B**9).is_identity()
    with pytest.raises(ValueError):
        mat_pow(B, -1, C27)


def test_key_roundtrip_and_order():
    x = M([[2, 5], [7, 1]], C9)
    assert Mat2.from_key(x.key, C9) == x
    assert (M([[1, 8], [8, 8]], C9).key < M([[2, 0], [0, 0]], C9).key)


@given(st.data())
def test_associativity_and_identity(data):
    ctx = data.draw(ctxs())
    x, y, z = (data.draw(mats(ctx)) for _ in range(3))
    assert (x * y) * z == x * (y * z)
    one = Mat2.identity(ctx)
    assert one * x == x == x * one


@given(st.data())
def test_det_multiplicative(data):
    ctx = data.draw(ctxs())
    x, y = data.draw(mats(ctx)), data.draw(mats(ctx))
    assert det(x * y, ctx) == det(x, ctx) * det(y, ctx) % ctx.modulus


@given(st.data())
def test_reduce_is_homomorphism(data):
    ctx = data.draw(st.sampled_from([Ctx(3, 3), Ctx(5, 2), Ctx(3, 4)]))
    to = ctx.with_n(data.draw(st.integers(1, ctx.n - 1)))
    x, y = data.draw(mats(ctx)), data.draw(mats(ctx))
    r = lambda m: reduce_mod(m, ctx, to)
    assert r(x * y) == r(x) * r(y)
    assert det(r(x), to) == det(x, ctx) % to.modulus


@given(st.data())
def test_inverse_property(data):
    ctx = data.draw(ctxs())
    x = data.draw(units(ctx))
    assert (mat_inverse(x, ctx) * x).is_identity()
    assert (x * mat_inverse(x, ctx)).is_identity()


@given(st.data(), st.integers(0, 200), st.integers(0, 200))
def test_pow_adds_exponents(data, j, k):
    ctx = data.draw(ctxs())
    x = data.draw(mats(ctx))
    assert x**j * x**k == x ** (j + k)
