import math

import gmpy2
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sigapprox.numeric import ExtendedArith, Precision, StandardArith, log2_abs, mpfr_to_json


def test_precision_parse():
    assert Precision.parse(None) == Precision.standard()
    assert Precision.parse("float64") == Precision.standard()
    assert Precision.parse("64") == Precision.standard()
    assert Precision.parse("512") == Precision.extended(512)
    assert Precision.extended(256).label() == "mpfr256"


@pytest.mark.parametrize("args", [("weird", None), ("extended", 32), ("standard", 128)])
def test_precision_rejects_bad_modes(args):
    with pytest.raises(ValueError):
        Precision(*args)


@given(st.floats(-700, 700))
def test_sigmoids_agree_between_arithmetics(x):
    s = StandardArith().sigmoid(x)
    ar = ExtendedArith(256)
    with ar.active():
        e = float(ar.sigmoid(ar.num(x)))
    assert math.isclose(s, e, rel_tol=1e-14, abs_tol=1e-300)


def test_extended_keeps_huge_values():
    ar = ExtendedArith(256)
    with ar.active():
        big = ar.exp(ar.num(10_000))
        assert ar.is_finite(big)
        assert log2_abs(big) == pytest.approx(10_000 / math.log(2), rel=1e-12)
    assert not StandardArith().is_finite(float("inf"))


def test_mpfr_json_is_exact():
    with gmpy2.context(gmpy2.get_context(), precision=200):
        x = gmpy2.mpfr(1) / 3
        assert gmpy2.mpfr(mpfr_to_json(x), 200) == x
