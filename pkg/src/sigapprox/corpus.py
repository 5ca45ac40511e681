"""Named target functions with analytic derivatives.

Most entries are one-dimensional profiles g lifted to d dimensions as
f(x) = g(x_1 + ... + x_d), so that d^l f(x) = g^{(|l|)}(sum x).  The lifted
order-q partials are Lipschitz with constant sqrt(d) * sup |g^{(q+1)}|, which
is the declared C (s = 1) over the sum range [-2ad, 2ad].
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from numpy.polynomial import hermite

from .blocks import multi_indices
from .taylor_oracle import SmoothFunction


def _poly_derivs(coefs):
    """n-th derivative of a polynomial given by ascending coefficients."""
    base = np.polynomial.Polynomial(coefs)

    def g(n, t):
        return base.deriv(n)(t) if n else base(t)

    return g


PROFILES: dict[str, tuple[Callable, int, str]] = {
    "sin": (lambda n, t: np.sin(t + n * math.pi / 2), 0, "sin(sum x)"),
    "cos": (lambda n, t: (math.pi / 2) ** n * np.cos(math.pi * t / 2 + n * math.pi / 2), 1, "cos(pi/2 * sum x)"),
    "exp": (lambda n, t: np.exp(t - 1.0), 1, "exp(sum x) / e"),
    "square": (_poly_derivs([0.0, 0.0, 1.0]), 1, "(sum x)^2"),
    "cubic": (_poly_derivs([0.0, -1.0, 0.0, 1.0]), 1, "(sum x)^3 - sum x"),
    "linear": (_poly_derivs([0.0, 1.0]), 1, "sum x"),
    "zero": (lambda n, t: np.zeros_like(np.asarray(t, dtype=float)), 0, "0"),
}


def _lifted(name: str, d: int, a: float, q: int | None) -> SmoothFunction:
    g, q_default, desc = PROFILES[name]
    q = q_default if q is None else q
    t = np.linspace(-2 * a * d, 2 * a * d, 20001)
    C = math.sqrt(d) * float(np.max(np.abs(g(q + 1, t)))) if name != "zero" else 1.0

    def value(X):
        return g(0, X.sum(axis=1))

    def partial(ell, X):
        return g(sum(ell), X.sum(axis=1))

    return SmoothFunction(name, d, value, partial, q, 1.0, C, a, desc)


def _gauss(d: int, a: float, q: int | None) -> SmoothFunction:
    """exp(-|x|^2); d^n/dt^n exp(-t^2) = (-1)^n H_n(t) exp(-t^2) (physicists' Hermite)."""
    q = 0 if q is None else q

    def herm(n, t):
        c = np.zeros(n + 1)
        c[n] = 1.0
        return (-1) ** n * hermite.hermval(t, c) * np.exp(-t * t)

    def value(X):
        return np.exp(-np.sum(X * X, axis=1))

    def partial(ell, X):
        out = np.ones(X.shape[0])
        for j, e in enumerate(ell):
            out = out * herm(e, X[:, j])
        return out

    if q == 0:
        C = math.sqrt(2.0) * math.exp(-0.5)  # max |grad exp(-|x|^2)|, attained at |x| = 1/sqrt(2)
    else:
        # grid estimate of the largest gradient norm among order-q partials
        g = np.linspace(-2 * a, 2 * a, 201)
        X = np.stack(np.meshgrid(*([g] * d), indexing="ij"), axis=-1).reshape(-1, d)
        C = 0.0
        for ell in multi_indices(d, q):
            if sum(ell) != q:
                continue
            grad = [partial(tuple(e + (i == j) for i, e in enumerate(ell)), X) for j in range(d)]
            C = max(C, float(np.max(np.sqrt(np.sum(np.square(grad), axis=0)))))
    return SmoothFunction("gauss", d, value, partial, q, 1.0, C, a, "exp(-|x|^2)")


NAMES = tuple(sorted(list(PROFILES) + ["gauss"]))


def get_function(name: str, d: int | None = None, a: float = 1.0, q: int | None = None) -> SmoothFunction:
    """Corpus entry by name; ``q`` overrides the declared smoothness order (s stays 1)."""
    if name == "gauss":
        return _gauss(2 if d is None else d, a, q)
    if name not in PROFILES:
        raise KeyError(f"unknown function {name!r}; choose from {', '.join(NAMES)}")
    return _lifted(name, 1 if d is None else d, a, q)
