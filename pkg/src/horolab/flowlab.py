"""Diagonal-flow schedules, their classification, and expansion ladders.

The flow is a_t = diag(e^{nt}, e^{-r_1(t)}, ..., e^{-r_n(t)}) with
r_1 >= ... >= r_n >= 0 and sum r_i = n t.  This module provides the
schedule presets, the xi-coefficient decomposition of the flow direction,
the (n0, uniform, k) classification, the equispaced Vandermonde constants,
grid certification of expansion suprema, boundedness witnesses with their
fixed-vector cross-check, the limiting-vector residual, and the
operator-norm residual of the polynomial straightening of a curve orbit.

Large exponents are kept in log space; matrix identities are evaluated in
a conjugated form whose factors stay O(1) before any e^{t} scaling is
applied entrywise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction as Q
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import curvejet
from .curvejet import CurveFrame, CurveSpec, ordered_regular_frame
from .weightlab import (
    ModuleVector,
    WeightModule,
    estimate_D1,
    fixed_check,
    h_block,
)
from .weightlab import groups as _groups


class ScheduleError(Exception):
    pass


REL_TOL = 1e-12


@dataclass(frozen=True)
class FlowSchedule:
    """Exponent schedule t -> (r_1, ..., r_n), validated at every call."""

    n: int
    name: str
    fn: Callable[[float], np.ndarray]
    slopes: Optional[Tuple[Q, ...]] = None

    @staticmethod
    def equal(n: int) -> "FlowSchedule":
        def fn(t: float) -> np.ndarray:
            return np.full(n, t, dtype=float)

        return FlowSchedule(n=n, name="equal", fn=fn)

    @staticmethod
    def linear(slopes: Sequence) -> "FlowSchedule":
        cs = tuple(Q(c) for c in slopes)
        n = len(cs)
        if n < 1:
            raise ScheduleError("need at least one slope")
        if any(a < b for a, b in zip(cs, cs[1:])):
            raise ScheduleError("slopes must be non-increasing")
        if cs[-1] < 0:
            raise ScheduleError("slopes must be nonnegative")
        if sum(cs) != n:
            raise ScheduleError(f"slopes must sum to n={n}, got {sum(cs)}")
        floats = np.array([float(c) for c in cs])

        def fn(t: float) -> np.ndarray:
            return floats * t

        label = ",".join(str(c) for c in cs)
        return FlowSchedule(n=n, name=f"linear:{label}", fn=fn, slopes=cs)

    @staticmethod
    def sublinear_tail(n: int) -> "FlowSchedule":
        """Tail exponents grow like sqrt(t); the head absorbs the rest."""
        if n < 2:
            raise ScheduleError("sublinear tail needs n >= 2")

        def fn(t: float) -> np.ndarray:
            tail = min(math.sqrt(t), t) if t > 0 else 0.0
            out = np.full(n, tail, dtype=float)
            out[0] = n * t - (n - 1) * tail
            return out

        return FlowSchedule(n=n, name="sublinear-tail", fn=fn)

    @staticmethod
    def preset(text: str, n: Optional[int] = None) -> "FlowSchedule":
        if text == "equal":
            if n is None:
                raise ScheduleError("equal preset needs n")
            return FlowSchedule.equal(n)
        if text.startswith("linear:"):
            parts = [p for p in text[len("linear:"):].split(",") if p.strip()]
            sched = FlowSchedule.linear([Q(p) for p in parts])
            if n is not None and sched.n != n:
                raise ScheduleError(f"linear preset has n={sched.n}, wanted {n}")
            return sched
        if text == "sublinear-tail":
            if n is None:
                raise ScheduleError("sublinear-tail preset needs n")
            return FlowSchedule.sublinear_tail(n)
        raise ScheduleError(f"unknown schedule preset: {text!r}")

    def r(self, t: float) -> np.ndarray:
        if t < 0:
            raise ScheduleError("t must be nonnegative")
        vals = np.asarray(self.fn(float(t)), dtype=float)
        if vals.shape != (self.n,):
            raise ScheduleError("schedule returned wrong arity")
        scale = max(1.0, self.n * abs(t))
        tol = REL_TOL * scale
        if any(vals[i] < vals[i + 1] - tol for i in range(self.n - 1)):
            raise ScheduleError(f"exponents not sorted at t={t}: {vals}")
        if vals[-1] < -tol:
            raise ScheduleError(f"negative exponent at t={t}: {vals}")
        if abs(float(vals.sum()) - self.n * t) > tol:
            raise ScheduleError(f"exponent sum off at t={t}: {vals}")
        return vals

    def exponents(self, t: float) -> np.ndarray:
        """Diagonal of log a_t: (n t, -r_1, ..., -r_n)."""
        r = self.r(t)
        return np.concatenate(([self.n * t], -r))

    def a_matrix(self, t: float) -> np.ndarray:
        return np.diag(np.exp(self.exponents(t)))


# -- xi decomposition --------------------------------------------------------------


@dataclass
class XiCoefficients:
    t: float
    values: np.ndarray
    sum_error: float
    reconstruction_error: float

    @property
    def ok(self) -> bool:
        scale = max(1.0, abs(self.t))
        return (
            self.sum_error <= 1e-11 * scale
            and self.reconstruction_error <= 1e-11 * scale
        )


def xi_coefficients(schedule: FlowSchedule, t: float) -> XiCoefficients:
    """Coordinates of log a_t in the block-element basis.

    xi_n = r_n and xi_i = (i/n)(r_i - r_{i+1}); the report carries the
    defect of sum(xi) = t and of the diagonal reconstruction.
    """
    n = schedule.n
    r = schedule.r(t)
    xi = np.empty(n)
    xi[n - 1] = r[n - 1]
    for i in range(1, n):
        xi[i - 1] = Q(i, n) * (r[i - 1] - r[i])
    recon = np.zeros(n + 1)
    for i in range(1, n + 1):
        recon += xi[i - 1] * np.array([float(x) for x in h_block(n, i)])
    target = schedule.exponents(t)
    return XiCoefficients(
        t=float(t),
        values=xi,
        sum_error=abs(float(xi.sum()) - t),
        reconstruction_error=float(np.max(np.abs(recon - target))),
    )


# -- classification ----------------------------------------------------------------


@dataclass
class FlowClassification:
    n: int
    n0: Optional[int]
    uniform: Optional[bool]
    k: int
    verdicts: Tuple[str, ...]
    gap_verdicts: Tuple[str, ...]
    probes: Tuple[float, ...]
    notes: Tuple[str, ...]

    @property
    def determined(self) -> bool:
        return self.n0 is not None and self.uniform is not None


_GROWTH_EPS = 0.05


def _trend(v_quarter: float, v_half: float, v_full: float) -> str:
    g1 = v_half - v_quarter
    g2 = v_full - v_half
    if g1 > _GROWTH_EPS and g2 > _GROWTH_EPS and v_full > 1.0:
        return "divergent"
    if abs(g2) <= _GROWTH_EPS and v_full <= max(1.0, v_quarter + _GROWTH_EPS):
        return "bounded"
    return "undetermined"


def classify(schedule: FlowSchedule, t_probe_max: float = 40.0) -> FlowClassification:
    """Probe the schedule and classify (n0, uniformity, admissible k).

    Verdicts come from growth across t_probe_max/4, /2, and full; anything
    that does not stabilize is reported "undetermined" rather than guessed.
    k is the smallest integer with n t + r_1(t) - k t <= 0 across a dense
    probe grid (2n always qualifies).
    """
    n = schedule.n
    tq = t_probe_max / 4
    th = t_probe_max / 2
    probes = (tq, th, t_probe_max)
    rq, rh, rf = schedule.r(tq), schedule.r(th), schedule.r(t_probe_max)
    verdicts = tuple(_trend(rq[i], rh[i], rf[i]) for i in range(n))
    notes: List[str] = []

    n0: Optional[int] = None
    if all(v != "undetermined" for v in verdicts):
        div = [i for i, v in enumerate(verdicts) if v == "divergent"]
        if div == list(range(len(div))):
            n0 = len(div)
        else:
            notes.append("divergent indices are not an initial prefix")
    else:
        notes.append("per-index growth did not stabilize")

    uniform: Optional[bool] = None
    gap_verdicts: Tuple[str, ...] = ()
    if n == 1:
        uniform = True
    else:
        gaps = []
        for r in (rq, rh, rf):
            gaps.append([r[j] - r[j + 1] for j in range(n - 1)])
        gv = tuple(
            _trend(gaps[0][j], gaps[1][j], gaps[2][j]) for j in range(n - 1)
        )
        gap_verdicts = gv
        if all(v != "undetermined" for v in gv):
            uniform = all(v == "bounded" for v in gv)
        else:
            notes.append("gap growth did not stabilize")

    grid = np.linspace(t_probe_max / 200.0, t_probe_max, 400)
    tol = 1e-9 * max(1.0, n * t_probe_max)
    k = 2 * n
    for cand in range(1, 2 * n + 1):
        sup = max(n * t + schedule.r(t)[0] - cand * t for t in grid)
        if sup <= tol:
            k = cand
            break
    return FlowClassification(
        n=n,
        n0=n0,
        uniform=uniform,
        k=k,
        verdicts=verdicts,
        gap_verdicts=gap_verdicts,
        probes=probes,
        notes=tuple(notes),
    )


# -- Vandermonde constants -----------------------------------------------------------


@dataclass
class VandermondeConstants:
    d: int
    interval: Tuple[Q, Q]
    certified: float
    empirical: float
    certified_exact: Q
    empirical_exact: Q
    nodes: Tuple[Q, ...]

    @property
    def certified_valid(self) -> bool:
        """Exact check that the closed-form constant really lower-bounds
        the sharp one; false flags an interval where the closed form does
        not apply."""
        return self.empirical_exact >= self.certified_exact


def vandermonde_constant(d: int, interval: Tuple = (1, 2)) -> VandermondeConstants:
    """Sup-norm coefficient constants on equispaced nodes.

    certified is the closed form |J|^d / (d^(d+1) (1 + eta_d)); empirical
    is the sharp constant 1 / ||V^{-1}||_inf (max row sum of the inverse
    Vandermonde), computed exactly.  For degree-d polynomials f with
    coefficients c, sup_J |f| >= empirical * max|c_i| always, and the
    certified form is a valid (smaller) floor on intervals near the origin
    like [1, 2]; certified_valid reports the exact comparison.
    """
    from . import exact

    if d < 0:
        raise ValueError("d must be nonnegative")
    a, b = Q(interval[0]), Q(interval[1])
    if not b > a:
        raise ValueError("degenerate interval")
    if d == 0:
        return VandermondeConstants(
            d=0,
            interval=(a, b),
            certified=1.0,
            empirical=1.0,
            certified_exact=Q(1),
            empirical_exact=Q(1),
            nodes=(a,),
        )
    length = b - a
    nodes = tuple(a + Q(i, d) * length for i in range(d + 1))
    v = tuple(tuple(node ** j for j in range(d + 1)) for node in nodes)
    v_inv = exact.inverse(v)
    max_row_sum = max(sum(abs(x) for x in row) for row in v_inv)
    empirical_exact = 1 / max_row_sum
    certified_exact = length ** d / (Q(d) ** (d + 1) * (1 + b))
    return VandermondeConstants(
        d=d,
        interval=(a, b),
        certified=float(certified_exact),
        empirical=float(empirical_exact),
        certified_exact=certified_exact,
        empirical_exact=empirical_exact,
        nodes=nodes,
    )


# -- expansion supremum ---------------------------------------------------------------


@dataclass
class ExpansionResult:
    t: float
    alpha: float
    value: float
    log_value: float
    eta_at_max: float
    grid_size: int
    degree_bound: int
    rejected: bool
    reason: str = ""


def _u_top_float(x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    u = np.eye(n + 1)
    u[0, 1:] = x
    return u


def _module_floats(v) -> np.ndarray:
    if isinstance(v, ModuleVector):
        return v.to_floats()
    return np.asarray(v, dtype=float)


def frame_degree_bound(module: WeightModule, frame: CurveFrame) -> int:
    """Degree in eta of the weight components of u(R(c eta)) v.

    Each level raise by i costs polynomial degree i when the frame rows
    are tail-free (moment frames); residual tail coefficients push a raise
    up to degree k, so the bound scales by k in that case.
    """
    levels = module.levels()
    span = int(max(levels) - min(levels))
    tail_free = all(
        frame.coeff_table.get((j, i), 0) == 0 or i == j
        for (j, i) in frame.coeff_table
    )
    if tail_free:
        return span
    return span * frame.k


def _eta_grid(interval: Tuple[float, float], count: int) -> np.ndarray:
    a, b = float(interval[0]), float(interval[1])
    uniform = np.linspace(a, b, count)
    j = np.arange(count)
    cheb = (a + b) / 2 + (b - a) / 2 * np.cos(np.pi * j / (count - 1))
    return np.unique(np.concatenate([uniform, cheb]))


def expansion_supremum(
    module: WeightModule,
    v,
    schedule: FlowSchedule,
    frame: CurveFrame,
    t: float,
    alpha: float = 1.0,
    interval: Tuple = (1.0, 2.0),
    grid: Optional[int] = None,
    k: Optional[int] = None,
    enforce_alpha: bool = True,
) -> ExpansionResult:
    """Grid maximum M_t of ||a_t u(R(alpha e^{-t} eta)) v||_sup over eta.

    Exponent bookkeeping happens in log space: for each basis coordinate
    the weight's value on log a_t is added to log of the unscaled
    coordinate, so t = 20 does not overflow.  The window scale alpha must
    keep k log(alpha) + n t + r_1(t) - k t below a small margin (the
    certification regime); violations reject the input unless the caller
    explicitly disables the check for witness-mode ladders.
    """
    if module.n != schedule.n or module.n != frame.n:
        raise ValueError("module, schedule, and frame sizes disagree")
    coords = _module_floats(v)
    if coords.shape != (module.dim,):
        raise ValueError("vector has wrong dimension")
    degree = frame_degree_bound(module, frame)
    if grid is None:
        grid = max(4 * (degree + 1), 33)
    reason = ""
    if alpha < 1.0:
        return ExpansionResult(
            t=float(t), alpha=float(alpha), value=float("nan"),
            log_value=float("nan"), eta_at_max=float("nan"), grid_size=0,
            degree_bound=degree, rejected=True, reason="alpha must be >= 1",
        )
    if enforce_alpha:
        kk = k if k is not None else classify(schedule).k
        r1 = float(schedule.r(t)[0])
        margin = kk * math.log(alpha) + schedule.n * t + r1 - kk * t
        if margin > 1e-6 * max(1.0, t):
            return ExpansionResult(
                t=float(t), alpha=float(alpha), value=float("nan"),
                log_value=float("nan"), eta_at_max=float("nan"), grid_size=0,
                degree_bound=degree, rejected=True,
                reason=f"window condition violated: margin {margin:.3g} > 0",
            )
    if not np.any(coords):
        return ExpansionResult(
            t=float(t), alpha=float(alpha), value=0.0, log_value=-math.inf,
            eta_at_max=float(interval[0]), grid_size=0, degree_bound=degree,
            rejected=False,
        )
    exps = schedule.exponents(t)
    weight_shift = np.array([float(w.evaluate(exps)) for w in module.weights])
    scale = float(alpha) * math.exp(-t)
    etas = _eta_grid((float(interval[0]), float(interval[1])), grid)
    best = -math.inf
    best_eta = etas[0]
    for eta in etas:
        x = frame.r_poly(scale * eta)
        rho = module.group_action_float(_u_top_float(x))
        w = rho @ coords
        with np.errstate(divide="ignore"):
            logs = np.where(w != 0, np.log(np.abs(w)) + weight_shift, -math.inf)
        m = float(np.max(logs))
        if m > best:
            best = m
            best_eta = float(eta)
    return ExpansionResult(
        t=float(t),
        alpha=float(alpha),
        value=math.exp(best) if best > -math.inf else 0.0,
        log_value=best,
        eta_at_max=best_eta,
        grid_size=len(etas),
        degree_bound=degree,
        rejected=False,
        reason=reason,
    )


@dataclass
class ExpansionBound:
    d2: float
    c_certified: float
    d1_min: float
    degree: int
    per_level: Dict[str, float]


def assemble_expansion_bound(
    module: WeightModule,
    frame: CurveFrame,
    interval: Tuple = (1, 2),
    grid_density: int = 7,
) -> ExpansionBound:
    """Certified floor D2 = C_{d,J} * min_b D1(b) / 2 for unit vectors.

    D1(b) is the grid estimate of the surviving-component norm for unit
    vectors concentrated at level b; the minimum runs over the populated
    levels of the module.  D1 is an estimate, not a certificate: the floor
    inherits grid resolution (see the shipped notes on the gap).
    """
    degree = frame_degree_bound(module, frame)
    consts = vandermonde_constant(degree, interval)
    c_cert = consts.certified
    kappa = [float(k) for k in frame.kappa]
    per_level: Dict[str, float] = {}
    d1_min = math.inf
    for b in module.level_set():
        est = estimate_D1(module, b, [Q(k) for k in kappa], grid_density=grid_density)
        per_level[str(b)] = est.value
        d1_min = min(d1_min, est.value)
    return ExpansionBound(
        d2=c_cert * d1_min / 2.0,
        c_certified=c_cert,
        d1_min=d1_min,
        degree=degree,
        per_level=per_level,
    )


def expansion_ladder(
    module: WeightModule,
    v,
    schedule: FlowSchedule,
    frame: CurveFrame,
    t_values: Sequence[float],
    alpha: float = 1.0,
    interval: Tuple = (1.0, 2.0),
    bound: Optional[float] = None,
    enforce_alpha: bool = True,
) -> List[Dict[str, object]]:
    """Rows (t, eta, M_t, bound, verdict) for CSV export."""
    rows: List[Dict[str, object]] = []
    for t in t_values:
        res = expansion_supremum(
            module, v, schedule, frame, t,
            alpha=alpha, interval=interval, enforce_alpha=enforce_alpha,
        )
        if res.rejected:
            verdict = "rejected"
        elif bound is None:
            verdict = "ok"
        else:
            verdict = "ok" if res.value >= bound else "below-bound"
        rows.append(
            {
                "t": float(t),
                "eta": res.eta_at_max,
                "M_t": res.value,
                "bound": float("nan") if bound is None else float(bound),
                "verdict": verdict,
            }
        )
    return rows


# -- growth witness -------------------------------------------------------------------


@dataclass
class GrowthWitness:
    mode: str
    verdict: str
    slope: float
    t_values: Tuple[float, ...]
    values: Tuple[float, ...]
    n0: Optional[int]
    subgroup: str
    fixed: Optional[bool]
    consistent: Optional[bool]
    rejected: bool = False
    reason: str = ""


def growth_witness(
    module: WeightModule,
    v: ModuleVector,
    schedule: FlowSchedule,
    frame: CurveFrame,
    interval: Tuple = (1.0, 2.0),
    t_values: Optional[Sequence[float]] = None,
    mode: str = "unit",
) -> GrowthWitness:
    """Boundedness ladder for M_t, cross-checked against fixed vectors.

    mode "unit" keeps the window at scale e^{-t} and requires a
    non-uniform schedule; a bounded verdict must coincide with v being
    fixed by the block parabolic.  mode "slow-shrink" widens the window to
    alpha_t = e^{t/2}; boundedness there must coincide with being fixed by
    the full block subgroup.  Verdict "bounded" means less than 2x
    variation across the top half of the ladder; clear least-squares
    growth in log M_t reads "divergent"; anything else "undetermined".
    """
    if mode not in ("unit", "slow-shrink"):
        raise ValueError("mode must be 'unit' or 'slow-shrink'")
    if t_values is None:
        t_values = np.linspace(2.0, 20.0, 10)
    t_values = tuple(float(t) for t in t_values)
    cls = classify(schedule)
    n0 = cls.n0
    if n0 is None or n0 == 0:
        return GrowthWitness(
            mode=mode, verdict="undetermined", slope=float("nan"),
            t_values=t_values, values=(), n0=n0, subgroup="", fixed=None,
            consistent=None, rejected=True,
            reason="schedule classification did not produce a block index",
        )
    if mode == "unit":
        if cls.uniform is not False:
            return GrowthWitness(
                mode=mode, verdict="undetermined", slope=float("nan"),
                t_values=t_values, values=(), n0=n0, subgroup="", fixed=None,
                consistent=None, rejected=True,
                reason="unit mode needs a non-uniform schedule",
            )
        subgroup = ("Q", n0)
        sub_label = f"Q_{n0}"
    else:
        subgroup = ("G", n0)
        sub_label = f"G_{n0}"
    vals: List[float] = []
    for t in t_values:
        alpha = 1.0 if mode == "unit" else math.exp(t / 2)
        res = expansion_supremum(
            module, v, schedule, frame, t,
            alpha=alpha, interval=interval, enforce_alpha=False,
        )
        vals.append(res.value)
    values = tuple(vals)
    logs = np.log(np.maximum(values, 1e-300))
    slope = float(np.polyfit(t_values, logs, 1)[0])
    top = values[len(values) // 2 :]
    lo, hi = min(top), max(top)
    if hi <= 0:
        verdict = "bounded"
    elif hi / max(lo, 1e-300) < 2.0:
        verdict = "bounded"
    elif slope > 0.01 and hi / max(lo, 1e-300) >= 2.0:
        verdict = "divergent"
    else:
        verdict = "undetermined"
    fixed = fixed_check(v, subgroup)
    consistent: Optional[bool]
    if verdict == "bounded":
        consistent = fixed
    elif verdict == "divergent":
        consistent = not fixed
    else:
        consistent = None
    return GrowthWitness(
        mode=mode,
        verdict=verdict,
        slope=slope,
        t_values=t_values,
        values=values,
        n0=n0,
        subgroup=sub_label,
        fixed=fixed,
        consistent=consistent,
    )


# -- limiting vector ------------------------------------------------------------------


@dataclass
class QFixedResult:
    t: float
    eta: float
    n0: int
    kappa_n: float
    residual: float
    flowed: np.ndarray
    limit: np.ndarray
    rejected: bool = False
    reason: str = ""


def qfixed_limit(
    frame: CurveFrame,
    schedule: FlowSchedule,
    n0: int,
    eta: float,
    t: float,
    kappa_tol: float = 1e-12,
) -> QFixedResult:
    """Residual of the flowed last basis vector against its limit.

    Compares a_t u(R(e^{-t} eta)) e_n with exp((log eta) H_{n0}) w(kappa_n) e_n
    in sup norm; the residual decays like e^{-r_n(t)} when n0 = n and
    through the tail coefficients otherwise.
    """
    n = frame.n
    if schedule.n != n:
        raise ValueError("frame and schedule sizes disagree")
    if not 1 <= n0 <= n:
        raise ValueError("n0 out of range")
    if eta <= 0:
        raise ValueError("eta must be positive")
    kappa_n = float(frame.kappa[-1])
    if abs(kappa_n) < kappa_tol:
        return QFixedResult(
            t=float(t), eta=float(eta), n0=n0, kappa_n=kappa_n,
            residual=float("nan"), flowed=np.zeros(n + 1),
            limit=np.zeros(n + 1), rejected=True,
            reason=f"kappa_n = {kappa_n:.3e} below tolerance",
        )
    e_n = np.zeros(n + 1)
    e_n[n] = 1.0
    x = frame.r_poly(math.exp(-t) * eta)
    flowed = schedule.a_matrix(t) @ _u_top_float(x) @ e_n
    h = np.array([float(c) for c in h_block(n, n0)])
    scaling = np.diag(np.exp(math.log(eta) * h))
    w = np.array(
        [[float(c) for c in row] for row in _groups.w_limit(n, n0, Q(kappa_n))]
    )
    limit = scaling @ w @ e_n
    residual = float(np.max(np.abs(flowed - limit)))
    return QFixedResult(
        t=float(t), eta=float(eta), n0=n0, kappa_n=kappa_n,
        residual=residual, flowed=flowed, limit=limit,
    )


# -- straightening residual ------------------------------------------------------------


@dataclass
class ApproxResult:
    t: float
    h: float
    k: int
    residual: float
    vt_sup: float
    exact_taylor: bool
    rejected: bool = False
    reason: str = ""


_REMAINDER_PAD = 3


def _straightening_tail(
    curve: CurveSpec, frame: CurveFrame, s: float, h: float
) -> np.ndarray:
    """Row defect (phi(s+h) - phi(s)) B^{-1} - R(h), evaluated so that the
    order-(k+1) cancellation is not lost to rounding.

    Polynomial curves subtract exactly in rationals.  Curves with an
    analytic derivative supplier use the remainder jets of orders k+1
    onward instead of the catastrophically cancelling float difference.
    Plain sampled curves fall back to the direct difference, whose noise
    floor is the machine epsilon of phi amplified by B^{-1}.
    """
    n, k = frame.n, frame.k
    if curve.poly is not None:
        sq, hq = Q(s), Q(h)
        delta = tuple(
            a - b
            for a, b in zip(curve.evaluate_exact(sq + hq), curve.evaluate_exact(sq))
        )
        from . import exact as _exact

        row = _exact.matvec(_exact.transpose(frame.b_inverse), delta)
        tail = tuple(rj - pj for rj, pj in zip(row, frame.r_poly_exact(hq)))
        return np.array([float(x) for x in tail])
    if curve.deriv_fn is not None:
        jet_rows = curvejet.jet(curve, s, k + _REMAINDER_PAD)
        b_inv = frame.b_inverse_floats()
        tail = np.zeros(n)
        for i in range(k + 1, k + _REMAINDER_PAD + 1):
            row = jet_rows.derivative(i) / math.factorial(i)
            tail += (row @ b_inv) * h ** i
        return tail
    delta = curve.evaluate(float(s) + h) - curve.evaluate(float(s))
    return delta @ frame.b_inverse_floats() - frame.r_poly(h)


def approx_residual(
    curve: CurveSpec,
    s: float,
    schedule: FlowSchedule,
    k: int,
    t: float,
    eta: float,
    alpha: float = 1.0,
) -> ApproxResult:
    """Operator-norm defect of the polynomial straightening at scale t.

    Evaluates || a_t u(phi(s+h)) [v_t^{-1} a_t u(R(h)) v u(phi(s))]^{-1} - I ||
    with h = alpha e^{-t} eta, where v embeds the frame's triangular factor.
    The product collapses to I + E_t v_t where E_t is the a_t-conjugated
    Taylor defect, supported on the first row; that row is evaluated by
    _straightening_tail and scaled in log space, so nothing overflows and
    the conjugation gains no spurious rounding.  Also reports the sup
    entry of v_t = a_t v a_t^{-1}, which stays bounded because the frame
    factor is upper triangular against decreasing exponents.  Schedules
    whose r_1 outruns k t - n t are rejected unless the frame's Taylor
    expansion is exact (polynomial curve of degree <= k).
    """
    n = curve.n
    if schedule.n != n:
        raise ValueError("curve and schedule sizes disagree")
    frame = ordered_regular_frame(curve, s, k)
    exact_taylor = curve.poly is not None and all(
        len(row) - 1 <= k for row in curve.poly
    )
    r = schedule.r(t)
    cond = n * t + float(r[0]) - k * t
    if cond > 1e-6 * max(1.0, t) and not exact_taylor:
        return ApproxResult(
            t=float(t), h=float("nan"), k=k, residual=float("nan"),
            vt_sup=float("nan"), exact_taylor=exact_taylor, rejected=True,
            reason=f"k={k} too small: n t + r_1 - k t = {cond:.3g} > 0",
        )
    h = alpha * math.exp(-t) * eta
    tail = _straightening_tail(curve, frame, float(s), h)
    d = schedule.exponents(t)
    # first row of the conjugated defect: tail_j e^{d_0 - d_j}
    scaled = np.zeros(n + 1)
    for j in range(1, n + 1):
        tf = float(tail[j - 1])
        if tf != 0.0:
            scaled[j] = math.copysign(
                math.exp(math.log(abs(tf)) + d[0] - d[j]), tf
            )
    b_fwd = np.array([[float(x) for x in row] for row in frame.b_matrix])
    v = np.eye(n + 1)
    v[1:, 1:] = b_fwd
    with np.errstate(over="ignore"):
        grid = np.exp(np.subtract.outer(d, d))
    v_t = np.where(v != 0.0, v * grid, 0.0)
    residual = float(np.linalg.norm(scaled @ v_t, 2))
    return ApproxResult(
        t=float(t),
        h=h,
        k=k,
        residual=residual,
        vt_sup=float(np.max(np.abs(v_t))),
        exact_taylor=exact_taylor,
    )


def moment_frame(n: int, k: Optional[int] = None, s=0) -> CurveFrame:
    """Frame of the power curve at s; at s = 0 the frame polynomial is
    exactly (h, h^2, ..., h^n)."""
    return ordered_regular_frame(CurveSpec.moment(n), s, k if k is not None else n)
