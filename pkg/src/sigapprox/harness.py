"""Measurement driver: sup-norm errors on grids, convergence sweeps and per-block suites.

Measurement paths use fixed grids; randomized suites take an explicit seed.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import assembly, blocks
from .activation import norm_d2, norm_d3
from .blocks import BlockAccuracy, multi_indices
from .corpus import get_function
from .network_core import SigmoidNetwork, evaluate_batch
from .numeric import Precision
from .partition import (
    GridPartition,
    bspline_weight,
    distance_to_faces,
    partition_of_unity_residual,
)
from .taylor_oracle import SmoothFunction, phi_recursion, piecewise_taylor

REGIONS = ("theorem1-certified", "inner-cubes", "full-domain")
LEMMA_IDS = ("L1", "L2", "L3", "L4", "L6", "L8", "L9", "L10", "L11", "L12", "T1-arch", "T1-rate", "PoU")

# grid sizes when every point is a multiple-precision forward pass
EXTENDED_GRID = {1: 2000, 2: 40}
STANDARD_GRID = {1: 100_000, 2: 700}


# --------------------------------------------------------------------------- grids and evaluation


def uniform_grid(lo: float, hi: float, n: int, d: int) -> np.ndarray:
    """n^d points of [lo, hi)^d; the right end is excluded to respect half-open cubes."""
    g = np.linspace(lo, hi, n, endpoint=False)
    return np.stack(np.meshgrid(*([g] * d), indexing="ij"), axis=-1).reshape(-1, d)


def _eval_chunk(args):
    net, X, prec = args
    return evaluate_batch(net, X, prec)


def evaluate_parallel(net: SigmoidNetwork, X: np.ndarray, prec: Precision, workers: int = 1, chunk: int = 256) -> np.ndarray:
    """Forward pass over X, split into chunks across processes when workers > 1."""
    if workers <= 1 or X.shape[0] <= chunk:
        return evaluate_batch(net, X, prec)
    parts = [X[i : i + chunk] for i in range(0, X.shape[0], chunk)]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        outs = list(ex.map(_eval_chunk, [(net, P, prec) for P in parts]))
    return np.concatenate(outs, axis=0)


def as_float(Y) -> np.ndarray:
    return np.array([float(v) for v in np.asarray(Y).ravel()], dtype=float)


# --------------------------------------------------------------------------- sweeps


@dataclass
class SweepSpec:
    """One convergence sweep. ``precision=None`` picks extended bits per M automatically."""

    function_name: str
    M_values: tuple
    d: int = 1
    q: int | None = None
    a: float = 1.0
    grid_points_per_axis: int | None = None
    precision: Precision | None = None
    region: str = "theorem1-certified"
    workers: int = 1
    face_samples: bool = True

    def __post_init__(self):
        self.M_values = tuple(int(m) for m in self.M_values)
        if not self.M_values or any(b <= a for a, b in zip(self.M_values, self.M_values[1:])):
            raise ValueError("M_values must be non-empty and strictly increasing")
        if self.region not in REGIONS:
            raise ValueError(f"region must be one of {REGIONS}")

    def function(self) -> SmoothFunction:
        return get_function(self.function_name, d=self.d, a=self.a, q=self.q)

    @property
    def p(self) -> float:
        return self.function().p

    def points_per_axis(self) -> int:
        if self.grid_points_per_axis is not None:
            return int(self.grid_points_per_axis)
        table = STANDARD_GRID if self.precision is not None and not self.precision.is_extended else EXTENDED_GRID
        return table.get(self.d, 20)

    def grid(self, M: int) -> np.ndarray:
        """Uniform grid of the region; for d = 1 also points at fixed offsets around every fine face."""
        n, a, d = self.points_per_axis(), self.a, self.d
        lo, hi = (-a / 2, a / 2) if self.region == "theorem1-certified" else (-a, a)
        X = uniform_grid(lo, hi, n, d)
        if d == 1 and self.face_samples:
            X = np.unique(np.concatenate([X[:, 0], face_offsets(a, M, self.p, lo, hi)])).reshape(-1, 1)
        if self.region == "inner-cubes":
            fine = GridPartition(a, M, d, "fine")
            X = X[distance_to_faces(fine, X) >= 2 / M ** (2 * self.p + 2)]
        return X

    def to_dict(self) -> dict:
        f = self.function()
        return {
            "function_name": self.function_name, "M_values": list(self.M_values), "d": self.d,
            "p": f.p, "q": f.q, "a": self.a, "grid_points_per_axis": self.points_per_axis(),
            "precision": "auto" if self.precision is None else self.precision.label(),
            "region": self.region, "face_samples": self.face_samples,
        }


FACE_OFFSETS = (0.0, 0.25, 0.5, 0.75, 0.9, 1.1, 1.5, 2.0, 3.0)


def face_offsets(a: float, M: int, p: float, lo: float, hi: float) -> np.ndarray:
    """Coordinates within a few multiples of 1/M^{2p+2} of the faces of all shifted fine partitions.

    Uniform grids coarser than the strip width miss the strips entirely, so the
    sup norm there would go unmeasured.
    """
    m = 1 / M ** (2 * p + 2)
    faces = -a + np.arange(2 * M * M + 1) * (a / (M * M))
    offs = np.array(FACE_OFFSETS) * m
    pts = (faces[:, None] + np.concatenate([offs, -offs])[None, :]).ravel()
    return pts[(pts >= lo) & (pts < hi)]


def sup_error(net: SigmoidNetwork, f: SmoothFunction, spec: SweepSpec, M: int | None = None, prec: Precision | None = None) -> float:
    """Grid maximum of |net(x) - f(x)| over the sweep region (a lower bound on the true sup).

    Returns nan when the forward pass produces non-finite values.
    """
    M = spec.M_values[0] if M is None else M
    X = spec.grid(M)
    prec = prec or (Precision.extended(int(net.meta.get("precision_bits", 53))) if net.is_extended else Precision.standard())
    Y = as_float(evaluate_parallel(net, X, prec, spec.workers))
    if not np.all(np.isfinite(Y)):
        return math.nan
    return float(np.max(np.abs(Y - f(X))))


@dataclass
class RateReport:
    spec: dict
    per_M: list
    slope: float
    intercept: float
    fitted_c: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RateReport":
        return cls(**json.loads(text))

    CSV_COLUMNS = ("M", "sup_error", "L", "r", "W0", "max_weight", "flags")

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# spec=" + json.dumps(self.spec) + "\n")
        buf.write(f"# slope={self.slope!r} intercept={self.intercept!r} fitted_c={self.fitted_c!r}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for row in self.per_M:
            w.writerow([_csv_cell(row.get(k)) for k in self.CSV_COLUMNS])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "RateReport":
        lines = text.splitlines()
        spec = json.loads(lines[0][len("# spec="):])
        fit = dict(kv.split("=") for kv in lines[1][2:].split())
        rows = []
        for rec in csv.DictReader(lines[2:]):
            rows.append({
                "M": int(rec["M"]), "sup_error": _parse_num(rec["sup_error"]),
                "L": _parse_int(rec["L"]), "r": _parse_int(rec["r"]), "W0": _parse_int(rec["W0"]),
                "max_weight": _parse_num(rec["max_weight"]),
                "flags": [s for s in rec["flags"].split(";") if s],
            })
        return cls(spec, rows, float(fit["slope"]), float(fit["intercept"]), float(fit["fitted_c"]))


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, list):
        return ";".join(v)
    if isinstance(v, float):
        return repr(v)
    return v


def _parse_num(s):
    return None if s == "" else float(s)


def _parse_int(s):
    return None if s == "" else int(s)


def fit_rate(Ms, errors) -> tuple[float, float]:
    """OLS of log error on log M over finite positive errors; (nan, nan) with fewer than two."""
    pts = [(math.log(m), math.log(e)) for m, e in zip(Ms, errors) if e is not None and math.isfinite(e) and e > 0]
    if len(pts) < 2:
        return math.nan, math.nan
    x, y = np.array(pts).T
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


def run_sweep(spec: SweepSpec, log: Callable[[str], None] | None = None) -> RateReport:
    """Build the full network for each M, measure its sup error and fit the rate."""
    f = spec.function()
    rows = []
    for M in spec.M_values:
        row = {"M": M, "sup_error": None, "L": None, "r": None, "W0": None, "max_weight": None, "flags": []}
        t0 = time.time()
        try:
            prec = spec.precision or Precision.extended(assembly.auto_bits(f, M))
            params = assembly.derive_params(f, M, prec)
            net = assembly.build_theorem1(f, M, prec, params)
            rec = assembly.architecture_record(net, f.d, f.q, M)
            row.update(L=rec["L"], r=rec["r_formula"], W0=rec["W0"], max_weight=float(net.max_abs_weight()))
            row["flags"] = list(params.flags)
            err = sup_error(net, f, spec, M, prec)
            if math.isnan(err):
                row["flags"].append("non-finite output")
            row["sup_error"] = err
        except Exception as exc:  # recorded per M, the sweep continues
            row["flags"].append(f"build failed: {type(exc).__name__}: {exc}")
        if log:
            log(f"M={M} sup_error={row['sup_error']} ({time.time() - t0:.1f}s)")
        rows.append(row)
    slope, intercept = fit_rate([r["M"] for r in rows], [r["sup_error"] for r in rows])
    consts = [r["sup_error"] * r["M"] ** (2 * f.p) for r in rows if r["sup_error"] is not None and math.isfinite(r["sup_error"])]
    return RateReport(spec.to_dict(), rows, slope, intercept, max(consts) if consts else math.nan)


# --------------------------------------------------------------------------- verification suites


@dataclass
class Check:
    name: str
    measured: float
    bound: float | None
    passed: bool
    asserted: bool = True
    detail: str = ""


@dataclass
class LemmaReport:
    lemma_id: str
    checks: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.asserted)

    def add(self, name, measured, bound=None, passed=None, asserted=True, detail=""):
        measured = float(measured)
        if passed is None:
            passed = bound is not None and measured <= bound
        self.checks.append(Check(name, measured, None if bound is None else float(bound), bool(passed), asserted, detail))

    def record(self, name, measured, detail=""):
        self.add(name, measured, None, True, False, detail)

    def to_dict(self) -> dict:
        return {"lemma_id": self.lemma_id, "passed": self.passed, "seconds": self.seconds, "checks": [asdict(c) for c in self.checks]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _ev(net, X, prec=None):
    return as_float(evaluate_batch(net, X, prec))


def suite_identity(rep: LemmaReport, R_values=(1e2, 1e3, 1e4), n=20001):
    X = np.linspace(-1, 1, n).reshape(-1, 1)
    for R in R_values:
        net = blocks.build_identity(BlockAccuracy(1.0, R=R), prec=Precision.standard())
        err = np.max(np.abs(_ev(net, X) - X[:, 0]))
        rep.add(f"identity R={R:g}", err, blocks.identity_error_bound(1.0, R))


def suite_mult(rep: LemmaReport, R_values=(1e2, 1e3, 1e4), n=401):
    X = uniform_grid(-1, 1, n, 2)
    X = np.vstack([X, [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0]]])
    for R in R_values:
        net = blocks.build_mult(BlockAccuracy(1.0, R=R), prec=Precision.standard())
        err = np.max(np.abs(_ev(net, X) - X[:, 0] * X[:, 1]))
        rep.add(f"product R={R:g}", err, blocks.mult_error_bound(1.0, R))


def suite_relu(rep: LemmaReport, R_values=(1e2, 1e3, 1e4), n=20001):
    X = np.linspace(-1, 1, n).reshape(-1, 1)
    for R in R_values:
        net = blocks.build_relu(BlockAccuracy(1.0, R=R), prec=Precision.standard())
        err = np.max(np.abs(_ev(net, X) - np.maximum(X[:, 0], 0)))
        rep.add(f"relu R={R:g}", err, blocks.relu_error_bound(1.0, R))


def suite_polynomial(rep: LemmaReport, scales=(1, 10, 100), seed=0, n=4000):
    """Random-coefficient polynomials; R runs over multiples of the block's minimum admissible R."""
    rng = np.random.default_rng(seed)
    prec = Precision.extended(256)
    for d, N in ((1, 1), (1, 2), (2, 1)):
        idx = multi_indices(d, N)
        coeffs = {e: float(rng.uniform(-1, 1)) for e in idx}
        rbar = max(abs(v) for v in coeffs.values())
        X = rng.uniform(-1, 1, (n, d + len(idx)))
        exact = sum(coeffs[e] * X[:, d + i] * np.prod(X[:, :d] ** np.array(e), axis=1) for i, e in enumerate(idx))
        R_min = blocks.monomial_R_min(N, 1.0)
        for k in scales:
            R = R_min * k
            net = blocks.build_polynomial(coeffs, N, BlockAccuracy(1.0, R=R), d=d, prec=prec)
            err = np.max(np.abs(_ev(net, X, prec) - exact))
            rep.add(f"polynomial d={d} N={N} R={k}*R_min", err, blocks.polynomial_error_bound(d, N, rbar, 1.0, R))


def kdelta_sample(lo, hi, delta, n, rng, pad=0.5) -> tuple[np.ndarray, np.ndarray]:
    """Points of a padded box with their K_delta membership mask (inside or outside, away from faces)."""
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    X = rng.uniform(lo - pad, hi + pad, (n, lo.size))
    near = np.any((np.abs(X - lo) <= delta) | (np.abs(X - hi) <= delta), axis=1)
    return X, ~near


def suite_indicator(rep: LemmaReport, seed=0, n=20000):
    rng = np.random.default_rng(seed)
    for d in (1, 2):
        lo, hi = -0.3 * np.ones(d), 0.4 * np.ones(d)
        for eps, delta in ((1e-3, 0.05), (1e-6, 0.01)):
            net = blocks.build_indicator(lo, hi, eps, delta, prec=Precision.standard())
            X, ok = kdelta_sample(lo, hi, delta, n, rng)
            Y = _ev(net, X)
            ind = np.all((X >= lo) & (X < hi), axis=1).astype(float)
            rep.add(f"indicator d={d} eps={eps:g} on K_delta", np.max(np.abs(Y[ok] - ind[ok])), eps)
            rep.add(f"indicator d={d} eps={eps:g} range", float(np.all((Y >= 0) & (Y <= 1)) == 0), 0.0)
        # gated test block: inputs (x, lo, s)
        eps, delta, sb, side = 1e-3, 0.05, 2.0, 0.7
        prec = Precision.extended(192)
        net = blocks.build_test(d, side, eps, delta, sb, prec=prec)
        X, ok = kdelta_sample(lo, lo + side, delta, 3000, rng)
        s = rng.uniform(-sb, sb, X.shape[0])
        Z = np.hstack([X, np.tile(lo, (X.shape[0], 1)), s[:, None]])
        Y = _ev(net, Z, prec)
        target = s * np.all((X >= lo) & (X < lo + side), axis=1)
        rep.add(f"test block d={d} on K_delta", np.max(np.abs(Y[ok] - target[ok])), eps)
        rep.add(f"test block d={d} everywhere (|y - s 1| - 2|s|)", np.max(np.abs(Y - target) - 2 * np.abs(s)), eps)


def suite_recursion(rep: LemmaReport, seed=0, n=10_000, rel=1e-10):
    """Indicator recursion against the direct piecewise Taylor polynomial.

    Deviations are measured relative to the larger of |value| and the sample's value scale,
    so that points where the Taylor value happens to vanish do not inflate the ratio.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for d in (1, 2):
        for q in (0, 1, 2):
            f = get_function("cos" if d == 1 else "gauss", d=d, q=q)
            for M in (2, 3, 4):
                coarse = GridPartition(1.0, M, d, "coarse")
                fine = coarse.with_level("fine")
                X = rng.uniform(-1, 1, (n, d))
                ref = piecewise_taylor(f, fine, X)
                got = phi_recursion(f, coarse, fine, X).phi_1_3
                scale = np.maximum(np.abs(ref), np.max(np.abs(ref)))
                r = float(np.max(np.abs(got - ref) / scale))
                worst = max(worst, r)
                rep.add(f"recursion d={d} q={q} M={M}", r, rel)
    rep.record("worst relative deviation", worst)


def _shell_masks(X, M, p, a=1.0, d=1):
    fine = GridPartition(a, M, d, "fine")
    dist = distance_to_faces(fine, X)
    m = 1 / M ** (2 * p + 2)
    return dist < m, dist >= 2 * m, fine


def _auto(f, M):
    return Precision.extended(assembly.auto_bits(f, M))


def suite_hat(rep: LemmaReport, M_values=(3, 4), n=1500, name="sin"):
    f = get_function(name)
    for M in M_values:
        prec = _auto(f, M)
        P = assembly.derive_params(f, M, prec)
        net = assembly.build_w_net(P)
        X = uniform_grid(-1, 1, n, 1)
        Y = _ev(net, X, prec)
        strip, _, fine = _shell_masks(X, M, f.p)
        w = bspline_weight(fine, X)
        err = float(np.max(np.abs(Y - w)[~strip]))
        rep.record(f"hat M={M} fitted c (error * M^2p) off strips", err * M ** (2 * f.p))
        rep.add(f"hat M={M} |f_w| <= 2^(d+1)", np.max(np.abs(Y)), 2.0 ** 2)
        rep.add(f"hat M={M} depth", net.depth, assembly.depth_w(1), net.depth == assembly.depth_w(1))


def suite_check(rep: LemmaReport, M_values=(3, 4), n=3000, name="sin"):
    f = get_function(name)
    for M in M_values:
        prec = _auto(f, M)
        P = assembly.derive_params(f, M, prec)
        for compact in (False, True):
            net = assembly.build_check_net(f, P, compact=compact)
            X = uniform_grid(-1, 1, n, 1)
            Y = _ev(net, X, prec)
            strip, deep, _ = _shell_masks(X, M, f.p)
            ok = strip | deep
            target = strip.astype(float)
            tag = "compact" if compact else "full"
            rep.add(f"check {tag} M={M} outside transition shell", np.max(np.abs(Y - target)[ok]), 1 / M ** (2 * f.p + 2))
            rep.add(f"check {tag} M={M} range", float(not np.all((Y >= 0) & (Y <= 1))), 0.0)


def face_strip_sample(M: int, p: float, n: int, rng, a: float = 1.0) -> np.ndarray:
    """Points within 1/M^{2p+2} of a fine face (d = 1), clipped to [-a, a)."""
    m = 1 / M ** (2 * p + 2)
    faces = -a + np.arange(M * M + 1) * (2 * a / (M * M))
    X = rng.choice(faces, n) + rng.uniform(-m, m, n) * (1 - 1e-9)
    X = X[(X >= -a) & (X < a)]
    return X.reshape(-1, 1)


def suite_clip(rep: LemmaReport, M_values=(3, 4), n=1000, seed=0, name="sin"):
    rng = np.random.default_rng(seed)
    f = get_function(name)
    for M in M_values:
        prec = _auto(f, M)
        P = assembly.derive_params(f, M, prec)
        net = assembly.build_net_p2_true(f, P)
        raw = assembly.build_net_p2(f, P)
        X = face_strip_sample(M, f.p, n, rng)
        Y = _ev(net, X, prec)
        rep.add(f"clipped M={M} on face strips", np.max(np.abs(Y)), 1 / M ** (2 * f.p + 2) + 10 * assembly.clip_tolerance(P))
        G = uniform_grid(-1, 1, 1500, 1)
        Yg = _ev(net, G, prec)
        Rg = _ev(raw, G, prec)
        rep.add(f"clipped M={M} |f_true| <= |f_net| + 1", np.max(np.abs(Yg) - np.abs(Rg)), 1.0)
        _, deep, _ = _shell_masks(G, M, f.p)
        rep.record(f"clipped M={M} fitted c (error * M^2p) deep inside", np.max(np.abs(Yg - f(G))[deep]) * M ** (2 * f.p))


def suite_partition(rep: LemmaReport, M_values=(3, 4), n=1500, name="sin"):
    f = get_function(name)
    for M in M_values:
        prec = _auto(f, M)
        P = assembly.derive_params(f, M, prec)
        net = assembly.build_net_partition(f, P)
        X = uniform_grid(-1, 1, n, 1)
        fine = GridPartition(1.0, M, 1, "fine")
        err = np.max(np.abs(_ev(net, X, prec) - bspline_weight(fine, X) * f(X)))
        rep.record(f"partition M={M} fitted c (error * M^2p)", err * M ** (2 * f.p))
        rep.add(f"partition M={M} depth", net.depth, None, net.depth == assembly.depth_partition(1, f.q))


def suite_arch(rep: LemmaReport, ds=(1, 2), qs=(0, 1), Ms=(2, 3, 4)):
    """Depth and width formulas for every builder plus the weight count of the padded full network."""
    for d in ds:
        for q in qs:
            f = get_function("sin" if q == 0 else "cos", d=d, q=q) if d == 1 else get_function("gauss", d=d, q=q)
            for M in Ms:
                prec = Precision.extended(128)  # structure only, values are not evaluated
                P = assembly.derive_params(f, M, prec)
                tag = f"d={d} q={q} M={M}"
                nets = {
                    "corner": (assembly.build_net_p2(f, P), assembly.depth_net_p2(q), assembly.width_net_p2(d, q, M)),
                    "hat": (assembly.build_w_net(P), assembly.depth_w(d), assembly.width_w(d, M)),
                    "check": (assembly.build_check_net(f, P), assembly.depth_check(), assembly.width_check(d, M)),
                    "clipped": (assembly.build_net_p2_true(f, P), assembly.depth_net_true(q), assembly.width_net_true(d, q, M)),
                    "partition": (assembly.build_net_partition(f, P), assembly.depth_partition(d, q), assembly.width_partition(d, q, M)),
                }
                for k, (net, L, r) in nets.items():
                    rep.add(f"{k} {tag} depth", net.depth, L, net.depth == L)
                    rep.add(f"{k} {tag} width <= formula", net.max_width, r)
                T = assembly.build_theorem1(f, M, prec, P)
                rec = assembly.architecture_record(T, d, q, M)
                rep.add(f"full {tag} depth", rec["L"], rec["L_formula"], rec["L"] == rec["L_formula"])
                rep.add(f"full {tag} width <= formula", rec["max_width"], rec["r_formula"])
                rep.add(f"full {tag} W0", rec["W0"], rec["W0_formula"], rec["W0"] == rec["W0_formula"])


def suite_rate(rep: LemmaReport, name="sin", M_values=(2, 3, 4, 5, 6)):
    r = run_sweep(SweepSpec(name, M_values))
    p = r.spec["p"]
    for row in r.per_M:
        rep.record(f"sup error M={row['M']}", row["sup_error"] if row["sup_error"] is not None else math.nan)
    rep.add(f"{name} log-log slope", r.slope, -2 * p + 0.5)


def suite_pou(rep: LemmaReport, seed=0, n=10_000):
    rng = np.random.default_rng(seed)
    for d in (1, 2):
        for M in (2, 3, 4, 5):
            X = rng.uniform(-0.5, 0.5, (n, d))
            rep.add(f"partition of unity d={d} M={M}", np.max(partition_of_unity_residual(1.0, M, d, X)), 1e-12)


SUITES: dict[str, Callable] = {
    "L1": suite_identity, "L2": suite_mult, "L3": suite_polynomial, "L4": suite_indicator,
    "L6": suite_recursion, "L8": suite_relu, "L9": suite_hat, "L10": suite_check,
    "L11": suite_clip, "L12": suite_partition, "T1-arch": suite_arch, "T1-rate": suite_rate, "PoU": suite_pou,
}


def run_lemma_suite(lemma_id: str, **params) -> LemmaReport:
    if lemma_id not in SUITES:
        raise KeyError(f"unknown lemma id {lemma_id!r}; choose from {', '.join(LEMMA_IDS)}")
    rep = LemmaReport(lemma_id)
    t0 = time.time()
    SUITES[lemma_id](rep, **params)
    rep.seconds = time.time() - t0
    return rep


def sigma_norm_report() -> dict:
    return {"sup|sigma''|": norm_d2(), "sup|sigma'''|": norm_d3()}


def weight_constant(f: SmoothFunction, M: int, net: SigmoidNetwork, cq: float) -> float:
    """Measured max |weight| over max{a, cq}^12 e^{6 2^{2(d+1)+1} a d} M^{10p+2d+10}, computed in logs."""
    return math.exp(net.log10_max_weight() * math.log(10) - assembly.log_alpha_full(f.d, f.p, M, f.a, cq))
