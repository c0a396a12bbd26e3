import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarlist.errors import PolarError
from polarlist.kernels import (
    f_kernel,
    f_vec,
    g_kernel,
    g_vec,
    get_precision,
    h_kernel,
    h_vec,
    quantize_llr,
)


@pytest.mark.parametrize("a,b,want", [(2, -3, -2), (0, 5, 0), (-4, -4, 4), (0, -5, 0), (-1, 0, 0)])
def test_f_values(a, b, want):
    for prec in (8, 16, 32):
        assert f_kernel(a, b, prec) == want


@pytest.mark.parametrize("args,want", [((2, 3, 0), 5), ((2, 3, 1), 1)])
def test_g_values(args, want):
    assert g_kernel(*args) == want


@pytest.mark.parametrize("prec,la,lb,sa,want", [
    (8, 100, 100, 0, 127),
    (8, 100, -100, 1, -127),
    (16, 30000, 30000, 0, 32767),
    (16, 30000, -30000, 1, -32767),
])
def test_g_saturates(prec, la, lb, sa, want):
    assert g_kernel(la, lb, sa, prec) == want


def test_g_float_clamps_at_float32_max():
    big = float(np.finfo(np.float32).max)
    assert g_kernel(big, big, 0, 32) == big
    assert g_vec([big], [big], [0], 32)[0] == big


def test_h_table():
    assert h_kernel(1, 0) == (1, 0)
    assert h_kernel(1, 1) == (0, 1)
    assert h_kernel(0, 0) == (0, 0)
    assert h_kernel(0, 1) == (1, 1)


class TestQuantize:
    def test_rounds_then_scales(self):
        assert quantize_llr(1.7, 8, 8) == 14

    def test_saturates(self):
        assert quantize_llr(100, 8, 8) == 127
        assert quantize_llr(-100, 8, 8) == -127
        assert quantize_llr(1e6, 16) == 32767

    def test_float_identity(self):
        assert quantize_llr(-0.1, 32) == pytest.approx(-0.1)
        assert quantize_llr(-0.1, 32, scale=99) == pytest.approx(-0.1)

    def test_half_away_from_zero(self):
        np.testing.assert_array_equal(quantize_llr([0.0625, -0.0625, 0.1875], 8, 8), [1, -1, 2])

    def test_default_scales(self):
        assert get_precision(8).default_scale == 8
        assert get_precision(16).default_scale == 64
        assert quantize_llr(1.0, 16) == 64

    def test_array_dtype(self):
        assert quantize_llr(np.zeros(4), 8).dtype == np.int8
        assert quantize_llr(np.zeros(4), 16).dtype == np.int16

    def test_bad_scale(self):
        with pytest.raises(PolarError):
            quantize_llr(1.0, 8, 0)


def test_unknown_precision():
    with pytest.raises(PolarError):
        get_precision(12)


# block kernels must agree with scalar application for every length

fixed8 = st.integers(-127, 127)
fixed16 = st.integers(-32767, 32767)
floats = st.floats(-1e4, 1e4, allow_nan=False, width=32)


def _pairs(elem):
    return st.integers(1, 70).flatmap(
        lambda m: st.tuples(st.lists(elem, min_size=m, max_size=m),
                            st.lists(elem, min_size=m, max_size=m),
                            st.lists(st.integers(0, 1), min_size=m, max_size=m)))


@pytest.mark.parametrize("prec,elem", [(8, fixed8), (16, fixed16), (32, floats)])
def test_blocks_match_scalars(prec, elem):
    dtype = get_precision(prec).llr_dtype

    @settings(max_examples=60, deadline=None)
    @given(_pairs(elem))
    def check(data):
        la, lb, sa = (np.array(v) for v in data)
        la, lb = la.astype(dtype), lb.astype(dtype)
        fv = f_vec(la, lb)
        gv = g_vec(la, lb, sa, prec)
        for i in range(la.size):
            assert fv[i] == f_kernel(la[i].item(), lb[i].item(), prec)
            assert gv[i] == g_kernel(la[i].item(), lb[i].item(), int(sa[i]), prec)
        hx, hy = h_vec(sa, sa[::-1].copy())
        np.testing.assert_array_equal(hx, sa ^ sa[::-1])
        np.testing.assert_array_equal(hy, sa[::-1])

    check()


@settings(max_examples=200, deadline=None)
@given(st.integers(-127, 127), st.integers(-127, 127), st.integers(0, 1))
def test_fixed8_never_leaves_range(a, b, s):
    assert -127 <= g_kernel(a, b, s, 8) <= 127
    assert -127 <= f_kernel(a, b, 8) <= 127
