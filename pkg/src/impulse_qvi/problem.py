"""Game instances, the builtin function catalog, and assumption checks.

A :class:`GameProblem` bundles the drift ``b``, the running gain ``f``, the
discount rate, the two finite action sets and their impulse costs.  Player-xi
(the maximizer) picks actions from ``max_actions`` and pays ``max_cost``;
player-eta (the minimizer) picks from ``min_actions`` and pays ``min_cost``.

State-space functions are vectorized: they take arrays of shape ``(..., n)``.
Cost functions take a single action vector of shape ``(n,)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Box",
    "ZeroDrift",
    "ConstantDrift",
    "SaturatedAffineDrift",
    "ConstantGain",
    "ClippedLinearGain",
    "PeakGain",
    "ProportionalCost",
    "FixedPlusProportionalCost",
    "GameProblem",
    "AssumptionReport",
    "sample_points",
    "estimate_sup_norms",
    "validate_h1",
    "validate_h2",
    "validate",
    "value_bound",
]


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``[lower, upper]`` in R^n."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.ndim != 1 or lo.shape != hi.shape:
            raise ValueError("box bounds must be 1-d arrays of equal length")
        if lo.size == 0:
            raise ValueError("box must have at least one axis")
        if not np.all(np.isfinite(lo)) or not np.all(np.isfinite(hi)):
            raise ValueError("box bounds must be finite")
        if not np.all(lo < hi):
            raise ValueError(f"degenerate box: lower={lo}, upper={hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dimension(self) -> int:
        return self.lower.size

    def corners(self) -> np.ndarray:
        bits = itertools.product((0, 1), repeat=self.dimension)
        return np.array([np.where(b, self.upper, self.lower) for b in bits])

    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)


# --------------------------------------------------------------------------
# Catalog.  Every entry is bounded and Lipschitz on all of R^n.
# --------------------------------------------------------------------------


class ZeroDrift:
    kind = "zero"

    def __init__(self, dimension: int = 1):
        self.dimension = int(dimension)

    def __call__(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def params(self):
        return {}


class ConstantDrift:
    kind = "constant"

    def __init__(self, velocity):
        self.velocity = np.atleast_1d(np.asarray(velocity, dtype=float))
        self.dimension = self.velocity.size

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(self.velocity, x.shape).copy()

    def params(self):
        return {"d": self.velocity.tolist()}


class SaturatedAffineDrift:
    """``b(x) = A @ clip(x, -s, s) + d``.

    Saturating the argument keeps ``b`` bounded while leaving it affine on
    the cube ``[-s, s]^n``.
    """

    kind = "saturated_affine"

    def __init__(self, A, d=None, saturation=1.0):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        if A.shape[0] != A.shape[1]:
            raise ValueError("A must be square")
        self.A = A
        self.dimension = A.shape[0]
        self.d = np.zeros(self.dimension) if d is None else np.atleast_1d(np.asarray(d, dtype=float))
        self.saturation = np.broadcast_to(np.asarray(saturation, dtype=float), (self.dimension,)).copy()
        if np.any(self.saturation <= 0):
            raise ValueError("saturation must be positive")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        y = np.clip(x, -self.saturation, self.saturation)
        return y @ self.A.T + self.d

    def params(self):
        return {"A": self.A.tolist(), "d": self.d.tolist(), "s": self.saturation.tolist()}


class ConstantGain:
    kind = "constant"

    def __init__(self, value=1.0):
        self.value = float(value)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape[:-1], self.value)

    def params(self):
        return {"value": self.value}


class ClippedLinearGain:
    """``f(x) = clip(w . x + offset, lower, upper)``."""

    kind = "clipped_linear"

    def __init__(self, weights, offset=0.0, lower=0.0, upper=1.0):
        self.weights = np.atleast_1d(np.asarray(weights, dtype=float))
        self.offset = float(offset)
        self.lower = float(lower)
        self.upper = float(upper)
        if not self.lower <= self.upper:
            raise ValueError("clip interval is empty")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.clip(x @ self.weights + self.offset, self.lower, self.upper)

    def params(self):
        return {"w": self.weights.tolist(), "offset": self.offset, "lower": self.lower, "upper": self.upper}


class PeakGain:
    """``f(x) = height * (1 - min(||x - center||, 1))``."""

    kind = "peak"

    def __init__(self, center, height=1.0):
        self.center = np.atleast_1d(np.asarray(center, dtype=float))
        self.height = float(height)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x - self.center, axis=-1)
        return self.height * (1.0 - np.minimum(r, 1.0))

    def params(self):
        return {"center": self.center.tolist(), "height": self.height}


class ProportionalCost:
    """``c(a) = k1 * ||a||``."""

    kind = "proportional"

    def __init__(self, k1):
        self.k1 = float(k1)

    def __call__(self, a):
        return self.k1 * float(np.linalg.norm(a))

    def params(self):
        return {"k1": self.k1}


class FixedPlusProportionalCost:
    """``c(a) = k0 + k1 * ||a||``; strictly subadditive when ``k0 > 0``."""

    kind = "fixed_plus_proportional"

    def __init__(self, k0, k1=0.0):
        self.k0 = float(k0)
        self.k1 = float(k1)

    def __call__(self, a):
        return self.k0 + self.k1 * float(np.linalg.norm(a))

    def params(self):
        return {"k0": self.k0, "k1": self.k1}


# --------------------------------------------------------------------------
# Problem
# --------------------------------------------------------------------------


def _as_action_array(actions, name: str) -> np.ndarray:
    arr = np.asarray(actions, dtype=float)
    if arr.size == 0:
        raise ValueError(f"{name} must be nonempty")
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a list of vectors")
    if np.any(np.all(arr == 0.0, axis=1)):
        raise ValueError(f"{name} contains a zero action")
    return arr


@dataclass(frozen=True)
class GameProblem:
    """A two-player zero-sum impulse game on R^n.

    ``max_actions`` / ``max_cost`` belong to player-xi (maximizer),
    ``min_actions`` / ``min_cost`` to player-eta (minimizer).  ``domain`` is
    optional and only used as the default region for sampled estimates.
    """

    drift: Callable
    gain: Callable
    discount: float
    max_actions: np.ndarray
    min_actions: np.ndarray
    max_cost: Callable
    min_cost: Callable
    domain: Box | None = None
    max_costs: np.ndarray = field(init=False, repr=False)
    min_costs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        lam = float(self.discount)
        if not lam > 0 or not math.isfinite(lam):
            raise ValueError(f"discount must be positive, got {self.discount}")
        U = _as_action_array(self.max_actions, "max_actions")
        V = _as_action_array(self.min_actions, "min_actions")
        if U.shape[1] != V.shape[1]:
            raise ValueError("action sets have different dimensions")
        if self.domain is not None and self.domain.dimension != U.shape[1]:
            raise ValueError("domain dimension does not match the action dimension")
        object.__setattr__(self, "discount", lam)
        object.__setattr__(self, "max_actions", U)
        object.__setattr__(self, "min_actions", V)
        c = np.array([float(self.max_cost(a)) for a in U])
        chi = np.array([float(self.min_cost(a)) for a in V])
        if np.any(c < 0) or np.any(chi < 0) or not (np.all(np.isfinite(c)) and np.all(np.isfinite(chi))):
            raise ValueError("impulse costs must be finite and nonnegative")
        object.__setattr__(self, "max_costs", c)
        object.__setattr__(self, "min_costs", chi)

    @property
    def dimension(self) -> int:
        return self.max_actions.shape[1]

    def replace(self, **changes) -> "GameProblem":
        kw = dict(
            drift=self.drift, gain=self.gain, discount=self.discount,
            max_actions=self.max_actions, min_actions=self.min_actions,
            max_cost=self.max_cost, min_cost=self.min_cost, domain=self.domain,
        )
        kw.update(changes)
        return GameProblem(**kw)


# --------------------------------------------------------------------------
# Assumption checks
# --------------------------------------------------------------------------


@dataclass
class AssumptionReport:
    """Sampled estimates and exact finite-set checks of the standing assumptions.

    Fields left as ``None`` were not evaluated by the check that produced the
    report; :meth:`merge` combines an H1 report with an H2 report.
    """

    lipschitz_b_estimate: float | None = None
    lipschitz_f_estimate: float | None = None
    bound_b: float | None = None
    bound_f: float | None = None
    subadditivity_c_ok: bool | None = None
    strict_subadditivity_chi_ok: bool | None = None
    zero_lower_bound_ok: bool | None = None
    proportional_h2_ok: bool | None = None
    h2_vacuous: bool | None = None
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        flags = (
            self.subadditivity_c_ok,
            self.strict_subadditivity_chi_ok,
            self.zero_lower_bound_ok,
            self.proportional_h2_ok,
        )
        return all(f is not False for f in flags)

    def merge(self, other: "AssumptionReport") -> "AssumptionReport":
        out = AssumptionReport()
        for name in (
            "lipschitz_b_estimate", "lipschitz_f_estimate", "bound_b", "bound_f",
            "subadditivity_c_ok", "strict_subadditivity_chi_ok", "zero_lower_bound_ok",
            "proportional_h2_ok", "h2_vacuous",
        ):
            mine = getattr(self, name)
            setattr(out, name, mine if mine is not None else getattr(other, name))
        out.violations = self.violations + other.violations
        out.notes = self.notes + other.notes
        return out

    def to_lines(self) -> list[str]:
        def fmt(v):
            if v is None:
                return "n/a"
            if isinstance(v, bool):
                return "true" if v else "false"
            return repr(float(v))

        lines = [
            f"lipschitz_b_estimate={fmt(self.lipschitz_b_estimate)}",
            f"lipschitz_f_estimate={fmt(self.lipschitz_f_estimate)}",
            f"bound_b={fmt(self.bound_b)}",
            f"bound_f={fmt(self.bound_f)}",
            f"subadditivity_c_ok={fmt(self.subadditivity_c_ok)}",
            f"strict_subadditivity_chi_ok={fmt(self.strict_subadditivity_chi_ok)}",
            f"zero_lower_bound_ok={fmt(self.zero_lower_bound_ok)}",
            f"proportional_h2_ok={fmt(self.proportional_h2_ok)}",
            f"h2_vacuous={fmt(self.h2_vacuous)}",
            f"passed={fmt(self.ok)}",
        ]
        for name, witness, values in self.violations:
            lines.append(f"violation={name} witness={witness} values={values}")
        for note in self.notes:
            lines.append(f"note={note}")
        return lines


def sample_points(domain: Box, samples: int, seed: int) -> np.ndarray:
    """Corners, then the center, then ``samples`` uniform draws.

    Draws are prefix-stable in ``samples`` for a fixed seed, so a larger
    sample set always contains a smaller one.
    """
    rng = np.random.default_rng(seed)
    draws = rng.uniform(size=(int(samples), domain.dimension))
    draws = domain.lower + draws * (domain.upper - domain.lower)
    return np.vstack([domain.corners(), domain.center()[None, :], draws])


def _max_quotient(points: np.ndarray, values: np.ndarray) -> float:
    if values.ndim == 1:
        values = values[:, None]
    best = 0.0
    # row blocks keep memory bounded for a few thousand points
    for start in range(0, len(points), 256):
        p = points[start:start + 256]
        dx = np.linalg.norm(p[:, None, :] - points[None, :, :], axis=-1)
        dv = np.linalg.norm(values[start:start + 256, None, :] - values[None, :, :], axis=-1)
        mask = dx > 0
        if np.any(mask):
            best = max(best, float(np.max(dv[mask] / dx[mask])))
    return best


def estimate_sup_norms(problem: GameProblem, domain: Box | None = None,
                       samples: int = 512, seed: int = 0) -> tuple[float, float]:
    """Sampled ``(||b||_inf, ||f||_inf)`` over ``domain`` (default: problem.domain)."""
    domain = _resolve_domain(problem, domain)
    pts = sample_points(domain, samples, seed)
    bound_b = float(np.max(np.linalg.norm(problem.drift(pts), axis=-1)))
    bound_f = float(np.max(np.abs(problem.gain(pts))))
    return bound_b, bound_f


def _resolve_domain(problem: GameProblem, domain: Box | None) -> Box:
    domain = domain if domain is not None else problem.domain
    if domain is None:
        raise ValueError("a sampling domain is required (problem.domain is unset)")
    return domain


def _index_of(actions: np.ndarray, a: np.ndarray) -> int | None:
    hits = np.flatnonzero(np.all(actions == a, axis=1))
    return int(hits[0]) if hits.size else None


def validate_h1(problem: GameProblem, domain: Box | None = None,
                samples: int = 512, seed: int = 0) -> AssumptionReport:
    """Estimate the H1 constants on ``domain`` and check the cost conditions.

    Lipschitz constants and sup norms are maxima over sampled points (see
    :func:`sample_points`).  Subadditivity is checked over every ordered pair
    whose sum lies in the action set; the zero lower bound is exact since the
    sets are finite.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    domain = _resolve_domain(problem, domain)
    if domain.dimension != problem.dimension:
        raise ValueError("domain dimension does not match the problem")
    pts = sample_points(domain, samples, seed)
    bv = problem.drift(pts)
    fv = problem.gain(pts)

    report = AssumptionReport(
        lipschitz_b_estimate=_max_quotient(pts, bv),
        lipschitz_f_estimate=_max_quotient(pts, fv),
        bound_b=float(np.max(np.linalg.norm(bv, axis=-1))),
        bound_f=float(np.max(np.abs(fv))),
    )

    U, c = problem.max_actions, problem.max_costs
    report.subadditivity_c_ok = True
    for i, j in itertools.product(range(len(U)), repeat=2):
        k = _index_of(U, U[i] + U[j])
        if k is not None and not c[k] <= c[i] + c[j]:
            report.subadditivity_c_ok = False
            report.violations.append(
                ("subadditivity_c", (U[i].tolist(), U[j].tolist()), (c[i], c[j], c[k]))
            )

    V, chi = problem.min_actions, problem.min_costs
    report.strict_subadditivity_chi_ok = True
    for i, j in itertools.product(range(len(V)), repeat=2):
        k = _index_of(V, V[i] + V[j])
        if k is not None and not chi[k] < chi[i] + chi[j]:
            report.strict_subadditivity_chi_ok = False
            report.violations.append(
                ("strict_subadditivity_chi", (V[i].tolist(), V[j].tolist()), (chi[i], chi[j], chi[k]))
            )

    report.zero_lower_bound_ok = bool(c.min() > 0 and chi.min() > 0)
    if not report.zero_lower_bound_ok:
        if c.min() <= 0:
            i = int(np.argmin(c))
            report.violations.append(("zero_lower_bound_c", U[i].tolist(), c[i]))
        if chi.min() <= 0:
            i = int(np.argmin(chi))
            report.violations.append(("zero_lower_bound_chi", V[i].tolist(), chi[i]))
    return report


def validate_h2(problem: GameProblem, scale_samples) -> AssumptionReport:
    """Check ``c(k xi) <= k c(xi)`` for every sampled ``k`` with ``k xi`` in U.

    Membership is exact vector equality.  When no pair qualifies the check
    passes vacuously and ``h2_vacuous`` is set.
    """
    scales = [float(k) for k in scale_samples]
    if not scales:
        raise ValueError("scale_samples must be nonempty")
    if any(k <= 0 for k in scales):
        raise ValueError("scale samples must be positive")
    U, c = problem.max_actions, problem.max_costs
    report = AssumptionReport(proportional_h2_ok=True)
    tested = 0
    for k in scales:
        for i, xi in enumerate(U):
            j = _index_of(U, k * xi)
            if j is None:
                continue
            tested += 1
            if not c[j] <= k * c[i]:
                report.proportional_h2_ok = False
                report.violations.append(("proportional_h2", (k, xi.tolist()), (c[j], k * c[i])))
    report.h2_vacuous = tested == 0
    # small multiples of every action are never all present in a finite set
    report.notes.append(
        "finite action set: H2 is only checked on the sampled scales; arbitrarily small multiples are absent"
    )
    return report


def validate(problem: GameProblem, domain: Box | None = None, samples: int = 512,
             seed: int = 0, scale_samples=(0.25, 0.5, 2.0, 3.0, 4.0)) -> AssumptionReport:
    """Both checks, merged."""
    return validate_h1(problem, domain, samples, seed).merge(validate_h2(problem, scale_samples))


def value_bound(problem: GameProblem, domain: Box | None = None,
                samples: int = 512, seed: int = 0) -> float:
    """``||f||_inf / lambda``: both value functions lie in ``[-B, B]``."""
    _, bound_f = estimate_sup_norms(problem, domain, samples, seed)
    return bound_f / problem.discount
