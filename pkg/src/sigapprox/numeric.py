"""Arithmetic backends for building and evaluating networks.

Two backends share one small interface: ``num`` converts a Python number,
and ``exp``/``log``/``sqrt``/``sigmoid`` act on scalars of that type.
The standard backend uses IEEE doubles; the extended backend uses
``gmpy2.mpfr`` at a fixed number of bits.  Arithmetic between mpfr values
follows the active gmpy2 context, so every build and every evaluation in
extended precision runs inside ``backend.active()``.
"""

from __future__ import annotations

import contextlib
import math
import os
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import numpy as np

PRECISION_ENV = "SIGAPPROX_PRECISION"


@dataclass(frozen=True)
class Precision:
    """Evaluation/build precision: ``standard`` (float64) or ``extended`` with ``bits``."""

    mode: str = "standard"
    bits: int | None = None

    def __post_init__(self):
        if self.mode not in ("standard", "extended"):
            raise ValueError(f"unknown precision mode {self.mode!r}")
        if self.mode == "extended":
            if self.bits is None or int(self.bits) < 64:
                raise ValueError("extended precision needs bits >= 64")
        elif self.bits is not None:
            raise ValueError("standard precision takes no bit count")

    @classmethod
    def standard(cls) -> "Precision":
        return cls("standard", None)

    @classmethod
    def extended(cls, bits: int) -> "Precision":
        return cls("extended", int(bits))

    @property
    def is_extended(self) -> bool:
        return self.mode == "extended"

    def label(self) -> str:
        return "float64" if self.mode == "standard" else f"mpfr{self.bits}"

    @classmethod
    def parse(cls, text: str | int | None) -> "Precision":
        """Parse ``"standard"``, ``"64"``/``"float64"`` or a bit count such as ``"512"``."""
        if text is None:
            return cls.standard()
        s = str(text).strip().lower()
        if s in ("", "standard", "float64", "double", "64"):
            return cls.standard()
        return cls.extended(int(s))


def default_precision() -> Precision:
    """Precision named by the ``SIGAPPROX_PRECISION`` environment variable (standard if unset)."""
    return Precision.parse(os.environ.get(PRECISION_ENV))


class StandardArith:
    """float64 scalars."""

    precision = Precision.standard()
    dtype = np.float64

    def num(self, x) -> float:
        if isinstance(x, Fraction):
            return x.numerator / x.denominator
        return float(x)

    def exp(self, x):
        return math.exp(x)

    def log(self, x):
        return math.log(x)

    def sqrt(self, x):
        return math.sqrt(x)

    def sigmoid(self, x):
        if x >= 0:
            return 1.0 / (1.0 + math.exp(-x))
        e = math.exp(x)
        return e / (1.0 + e)

    def zero(self):
        return 0.0

    def is_finite(self, x) -> bool:
        return math.isfinite(x)

    @contextlib.contextmanager
    def active(self):
        yield self


class ExtendedArith:
    """gmpy2.mpfr scalars at ``bits`` bits of mantissa."""

    dtype = object

    def __init__(self, bits: int):
        self.bits = int(bits)
        self.precision = Precision.extended(self.bits)

    def num(self, x):
        if isinstance(x, Fraction):
            return gmpy2.mpfr(x.numerator, self.bits) / x.denominator
        if isinstance(x, str):
            return gmpy2.mpfr(x, self.bits)
        return gmpy2.mpfr(x, self.bits)

    def exp(self, x):
        return gmpy2.exp(x)

    def log(self, x):
        return gmpy2.log(x)

    def sqrt(self, x):
        return gmpy2.sqrt(x)

    def sigmoid(self, x):
        return 1 / (1 + gmpy2.exp(-x))

    def zero(self):
        return 0

    def is_finite(self, x) -> bool:
        return gmpy2.is_finite(gmpy2.mpfr(x))

    @contextlib.contextmanager
    def active(self):
        ctx = gmpy2.get_context().copy()
        ctx.precision = self.bits
        ctx.emax = gmpy2.get_emax_max()
        ctx.emin = gmpy2.get_emin_min()
        with ctx:
            yield self


def arith_for(prec: Precision | None):
    """Backend matching a Precision (standard when ``None``)."""
    if prec is None or not prec.is_extended:
        return StandardArith()
    return ExtendedArith(prec.bits)


def mpfr_to_json(x) -> str:
    """Shortest decimal string that reads back to the same mpfr at its precision."""
    if x == 0:
        return "0"
    if not isinstance(x, type(gmpy2.mpfr(0))):
        x = gmpy2.mpfr(x)
    mant, exp, _ = x.digits(10)
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    mant = mant.rstrip("0") or "0"
    return f"{sign}0.{mant}e{exp}"


def log2_abs(x) -> float:
    """log2 |x| for float or mpfr values (``-inf`` at zero), safe beyond the double range."""
    if x == 0:
        return -math.inf
    if isinstance(x, float):
        return math.log2(abs(x))
    return float(gmpy2.log2(abs(gmpy2.mpfr(x))))
