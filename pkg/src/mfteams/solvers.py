"""Team-size layer: manager equilibrium, planner optimum, partnership equilibrium.

Each solver is a total case classifier over the parameter space. Where the
available characterisation only gives sufficient conditions, the solver
returns an ``Unclassified`` outcome carrying a numeric scan instead of
asserting an equilibrium. Every positive solution can be checked against a
log-grid scan of its objective with the ``verify_*`` helpers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .model import BOUNDARY_ATOL, DomainError, ModelParams, PowerProfile, best_response_effort
from .roots import expand_upper, find_root

GRID_POINTS = 2000
GRID_DECADES = 3.0
GRID_SLACK = 1e-9


class ManagerVariant(str, Enum):
    ZERO_TEAM = "ZeroTeam"
    INTERIOR = "Interior"
    NO_EQUILIBRIUM = "NoEquilibrium"


class PlannerVariant(str, Enum):
    NO_OPTIMUM = "NoOptimum"
    UNIQUE_ZERO = "UniqueZero"
    UNIQUE_POSITIVE = "UniquePositive"
    ZERO_AND_POSITIVE = "ZeroAndPositive"
    ANY_NONNEGATIVE = "AnyNonnegative"
    ANY_POSITIVE = "AnyPositive"
    UNCLASSIFIED = "Unclassified"


class PartnershipVariant(str, Enum):
    ZERO_EQUILIBRIUM = "ZeroEquilibrium"
    UNIQUE_POSITIVE = "UniquePositive"
    UNCLASSIFIED = "Unclassified"


class Limit(str, Enum):
    ZERO_PLUS = "ZeroPlus"
    INFINITY = "Infinity"


@dataclass
class Diagnostics:
    reason: str
    numeric_scan: Optional[np.ndarray] = None  # shape (n, 2): z, objective
    best_candidate: Optional[float] = None
    candidate_verified: bool = False
    notes: list[str] = field(default_factory=list)


@dataclass
class ManagerOutcome:
    variant: ManagerVariant
    z_star: Optional[float] = None
    effort: Optional[PowerProfile] = None
    v_manager: Optional[float] = None
    v_worker: Optional[float] = None


@dataclass
class PlannerOutcome:
    variant: PlannerVariant
    z_star: Optional[float] = None
    v_central: Optional[float] = None
    effort: Optional[PowerProfile] = None
    limit: Optional[Limit] = None
    case: str = ""
    diagnostics: Optional[Diagnostics] = None


@dataclass
class PartnershipOutcome:
    variant: PartnershipVariant
    z_star: Optional[float] = None
    v_partner: Optional[float] = None
    effort: Optional[PowerProfile] = None
    case: str = ""
    diagnostics: Optional[Diagnostics] = None


def _near(a: float, b: float) -> bool:
    return abs(a - b) <= BOUNDARY_ATOL


def _log_grid(center: float, n: int = GRID_POINTS, decades: float = GRID_DECADES) -> np.ndarray:
    return center * np.logspace(-decades, decades, n)


def _dominates(best: float, values, slack: float = GRID_SLACK) -> bool:
    tol = slack * max(abs(best), 1e-300)
    vals = np.asarray(values, dtype=float)
    return bool(np.all(vals <= best + tol))


# --------------------------------------------------------------------------
# manager


def expected_rank_reward(params: ModelParams, z: float, z_star: float) -> float:
    """Expected per-member reward of a size-``z`` team against size-``z_star`` rivals.

    ``K (1+p) z**-eps / (1 + p (z/z_star)**(eps-2))``
    """
    if not (z > 0 and z_star > 0):
        raise DomainError("team sizes must be positive")
    ratio = (z / z_star) ** (params.eps - 2)
    return params.K * (1 + params.p) * z ** (-params.eps) / (1 + params.p * ratio)


def manager_objective(params: ModelParams, z: float, z_star: float) -> float:
    """Manager profit from choosing size ``z`` when all rivals use ``z_star``."""
    if z < 0:
        raise DomainError("team size must be >= 0")
    if not z_star > 0:
        raise DomainError("rival team size must be > 0")
    if z == 0:
        return 0.0
    share = params.theta * z**params.eps * expected_rank_reward(params, z, z_star)
    return share - params.kappa0 - params.size_cost(z)


def manager_equilibrium(params: ModelParams) -> ManagerOutcome:
    K, p, eps, theta = params.K, params.p, params.eps, params.theta
    kappa0, k, delta = params.kappa0, params.k, params.delta

    if K * (1 + p) * theta <= kappa0 + BOUNDARY_ATOL:
        return ManagerOutcome(
            ManagerVariant.ZERO_TEAM,
            z_star=0.0,
            effort=PowerProfile(0.0, p),
            v_manager=0.0,
            v_worker=0.0,
        )
    if (1 - kappa0 / (K * theta)) * delta >= (2 - eps) * p / (1 + p) - BOUNDARY_ATOL:
        z = (K * theta * p * (2 - eps) / (k * delta * (1 + p))) ** (1 / delta)
        v_manager = K * theta * (p * (eps + delta - 2) + delta) / (delta * (1 + p)) - kappa0
        if -BOUNDARY_ATOL <= v_manager < 0:
            v_manager = 0.0
        v_worker = 0.5 * K * (1 - theta) * (1 + params.beta) * z ** (-eps)
        return ManagerOutcome(
            ManagerVariant.INTERIOR,
            z_star=z,
            effort=best_response_effort(params, z, params.manager_cost),
            v_manager=v_manager,
            v_worker=v_worker,
        )
    return ManagerOutcome(ManagerVariant.NO_EQUILIBRIUM)


def verify_manager_global_max(params: ModelParams, z_star: float, n: int = GRID_POINTS) -> tuple[bool, Diagnostics]:
    """Check that ``z_star`` is a best reply to itself for the manager.

    Scans ``z -> manager_objective(z; z_star)`` on a log grid spanning three
    decades either side of ``z_star`` and compares against the not-assembled
    option (profit 0) and the ``z -> 0+`` limit ``-kappa0``.
    """
    grid = _log_grid(z_star, n)
    values = np.array([manager_objective(params, z, z_star) for z in grid])
    best = manager_objective(params, z_star, z_star)
    extra = [0.0, -params.kappa0]
    ok = _dominates(best, values) and _dominates(best, extra)
    i = int(np.argmax(values))
    diag = Diagnostics(
        reason="global_max" if ok else "dominated",
        numeric_scan=np.column_stack([grid, values]),
        best_candidate=float(grid[i]) if values[i] >= 0 else 0.0,
    )
    return ok, diag


# --------------------------------------------------------------------------
# central planner


def planner_objective(params: ModelParams, z: float) -> float:
    """Average member welfare net of per-capita size costs at a common size ``z``."""
    if not z > 0:
        raise DomainError("planner objective needs z > 0")
    return (
        0.5 * params.K * (1 + params.beta) * z ** (-params.eps)
        - params.kappa0 / z
        - params.k * z ** (params.delta - 1)
    )


def _planner_limit_at_zero(params: ModelParams) -> float:
    A = 0.5 * params.K * (1 + params.beta)
    eps, delta = params.eps, params.delta
    if params.kappa0 > 0:
        return -math.inf
    # kappa0 == 0: A z^-eps - k z^(delta-1)
    reward_exp, cost_exp = -eps, delta - 1
    if reward_exp == 0 and cost_exp == 0:
        return A - params.k
    if cost_exp < reward_exp:
        return -math.inf
    if reward_exp < cost_exp:
        return math.inf if reward_exp < 0 else A
    coef = A - params.k
    return math.copysign(math.inf, coef) if coef != 0 else 0.0


def _planner_scan(params: ModelParams, reason: str) -> Diagnostics:
    grid = np.logspace(-6, 6, 1201)
    values = np.array([planner_objective(params, z) for z in grid])
    i = int(np.argmax(values))
    return Diagnostics(reason=reason, numeric_scan=np.column_stack([grid, values]), best_candidate=float(grid[i]))


def central_planner_optimum(params: ModelParams) -> PlannerOutcome:
    K, beta, eps = params.K, params.beta, params.eps
    kappa0, k, delta = params.kappa0, params.k, params.delta
    A = 0.5 * K * (1 + beta)

    def positive(z: float, case: str, value: Optional[float] = None) -> PlannerOutcome:
        return PlannerOutcome(
            PlannerVariant.UNIQUE_POSITIVE,
            z_star=z,
            v_central=planner_objective(params, z) if value is None else value,
            effort=best_response_effort(params, z),
            case=case,
        )

    zero = PlannerOutcome(PlannerVariant.UNIQUE_ZERO, z_star=0.0, v_central=0.0)

    if _near(eps, 0.0):
        if delta < 1 - BOUNDARY_ATOL:
            return PlannerOutcome(PlannerVariant.NO_OPTIMUM, limit=Limit.INFINITY, case="eps0-delta<1")
        if _near(delta, 1.0):
            if kappa0 > 0:
                if A <= k + BOUNDARY_ATOL:
                    return PlannerOutcome(PlannerVariant.UNIQUE_ZERO, z_star=0.0, v_central=0.0, case="eps0-delta1")
                return PlannerOutcome(PlannerVariant.NO_OPTIMUM, limit=Limit.INFINITY, case="eps0-delta1")
            if _near(A, k):
                return PlannerOutcome(PlannerVariant.ANY_NONNEGATIVE, v_central=0.0, case="eps0-delta1-kappa0")
            if A < k:
                return PlannerOutcome(PlannerVariant.UNIQUE_ZERO, z_star=0.0, v_central=0.0, case="eps0-delta1-kappa0")
            return PlannerOutcome(PlannerVariant.ANY_POSITIVE, v_central=A - k, case="eps0-delta1-kappa0")
        if kappa0 == 0:
            return PlannerOutcome(PlannerVariant.NO_OPTIMUM, limit=Limit.ZERO_PLUS, case="eps0-delta>1-kappa0")
        z = (kappa0 / (k * (delta - 1))) ** (1 / delta)
        threshold = kappa0 * delta / (delta - 1) * z ** (-1.0)
        if _near(A, threshold):
            return PlannerOutcome(
                PlannerVariant.ZERO_AND_POSITIVE, z_star=z, v_central=0.0, effort=best_response_effort(params, z),
                case="eps0-delta>1",
            )
        if A > threshold:
            return positive(z, "eps0-delta>1", A - threshold)
        zero.case = "eps0-delta>1"
        return zero

    if _near(eps, 1.0):
        if kappa0 < A - BOUNDARY_ATOL:
            return PlannerOutcome(PlannerVariant.NO_OPTIMUM, limit=Limit.ZERO_PLUS, case="eps1")
        zero.case = "eps1"
        return zero

    # mixed division effect: only two regions are characterised
    if delta < 1 and eps + delta < 1 and kappa0 == 0:
        base = eps * A / ((1 - delta) * k)
        z = base ** (1 / (delta + eps - 1))
        value = A * base ** (-eps / (delta + eps - 1)) - k * base ** ((delta - 1) / (delta + eps - 1))
        return positive(z, "mixed-a", value)
    if delta >= 1 and kappa0 > 0 and A > k + kappa0:
        def stationarity(z):
            return -eps * A * z ** (1 - eps) + kappa0 - k * (delta - 1) * z**delta

        def stationarity_prime(z):
            return -eps * (1 - eps) * A * z ** (-eps) - k * delta * (delta - 1) * z ** (delta - 1)

        hi = expand_upper(stationarity, 0.0, 1.0)
        z = find_root(stationarity, 0.0, hi, stationarity_prime, rtol=1e-14)
        value = kappa0 * (1 / eps - 1) / z - k * (1 + (delta - 1) / eps) * z ** (delta - 1)
        out = positive(z, "mixed-b", value)
        ok, diag = verify_planner_global_max(params, z)
        if not ok:
            diag.reason = "grid_scan_disagrees"
            out.diagnostics = diag
        return out
    return PlannerOutcome(
        PlannerVariant.UNCLASSIFIED, case="mixed-other", diagnostics=_planner_scan(params, "mixed_eps_uncovered")
    )


def verify_planner_global_max(params: ModelParams, z_star: float, n: int = GRID_POINTS) -> tuple[bool, Diagnostics]:
    grid = _log_grid(z_star, n)
    values = np.array([planner_objective(params, z) for z in grid])
    best = planner_objective(params, z_star)
    ok = _dominates(best, values) and _dominates(best, [0.0, _planner_limit_at_zero(params)])
    i = int(np.argmax(values))
    return ok, Diagnostics(
        reason="global_max" if ok else "dominated",
        numeric_scan=np.column_stack([grid, values]),
        best_candidate=float(grid[i]),
    )


# --------------------------------------------------------------------------
# partnership


def partnership_H(params: ModelParams, z: float, z_star: float) -> float:
    """Member objective of a size-``z`` partnership facing size-``z_star`` rivals."""
    if not (z > 0 and z_star > 0):
        raise DomainError("team sizes must be positive")
    K, p, beta, eps = params.K, params.p, params.beta, params.eps
    x = (z / z_star) ** (2 - eps)
    gain = K * (1 + p) * (1 + beta) * z ** (2 - 2 * eps) / (2 * z_star ** (2 - eps)) / (p + x)
    return gain - (params.kappa0 + params.size_cost(z)) / z


def _partnership_limit_at_zero(params: ModelParams, z_star: float) -> float:
    K, p, beta, eps = params.K, params.p, params.beta, params.eps
    gain = K * (1 + p) * (1 + beta) / (2 * z_star * p) if eps == 1 else 0.0
    if params.kappa0 > 0 or params.delta < 1:
        return -math.inf
    if params.delta == 1:
        return gain - params.k
    return gain


def partnership_stationarity(params: ModelParams, z: float) -> float:
    """Derivative condition of ``H(.; z)`` at its own reference size, times ``z**2``.

    ``[(1-eps) - (2-eps)/(2(1+p))] K (1+beta) z**(1-eps) + k (1-delta) z**delta + kappa0``
    """
    K, p, beta, eps = params.K, params.p, params.beta, params.eps
    slope = ((1 - eps) - (2 - eps) / (2 * (1 + p))) * K * (1 + beta)
    return slope * z ** (1 - eps) + params.k * (1 - params.delta) * z**params.delta + params.kappa0


def _partner_value(params: ModelParams, z: float) -> float:
    return partnership_H(params, z, z)


def _zero_partnership_eps0(params: ModelParams) -> Optional[bool]:
    """Whether size 0 is a partnership equilibrium when eps = 0 (None if uncovered)."""
    K, p, beta = params.K, params.p, params.beta
    kappa0, k, delta = params.kappa0, params.k, params.delta
    A0 = 0.5 * (1 + beta) * K * (1 + p)
    if kappa0 == 0:
        return _near(delta, 1.0) and A0 <= k + BOUNDARY_ATOL
    if _near(delta, 1.0):
        return 2 * k / ((1 + beta) * K * (1 + p)) >= 1 - BOUNDARY_ATOL
    if delta < 1:
        # the reward term dominates as z grows, so some positive size beats zero
        return False
    if delta >= 2:
        ratio = (
            2**delta * kappa0 ** (delta - 1) * k * delta**delta
            / ((1 + beta) ** delta * K**delta * (1 + p) ** delta * (delta - 1) ** (delta - 1))
        )
        return ratio >= 1 - BOUNDARY_ATOL
    return None


def _partnership_scan(params: ModelParams, reason: str) -> Diagnostics:
    grid = np.logspace(-6, 6, GRID_POINTS)
    values = np.array([partnership_stationarity(params, z) for z in grid])
    candidates = []
    for i in np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]:
        candidates.append(find_root(lambda z: partnership_stationarity(params, z), grid[i], grid[i + 1]))
    diag = Diagnostics(reason=reason, numeric_scan=np.column_stack([grid, values]))
    for z in candidates:
        ok, _ = verify_partnership_global_max(params, z)
        diag.notes.append(f"stationary z={z:.17g} value={_partner_value(params, z):.17g} grid_max={ok}")
        if ok and diag.best_candidate is None:
            diag.best_candidate = z
            diag.candidate_verified = True
    if diag.best_candidate is None and candidates:
        diag.best_candidate = candidates[0]
    return diag


def partnership_equilibrium(params: ModelParams) -> PartnershipOutcome:
    K, p, beta, eps = params.K, params.p, params.beta, params.eps
    kappa0, k, delta = params.kappa0, params.k, params.delta

    def positive(z: float, case: str) -> PartnershipOutcome:
        return PartnershipOutcome(
            PartnershipVariant.UNIQUE_POSITIVE,
            z_star=z,
            v_partner=_partner_value(params, z),
            effort=best_response_effort(params, z),
            case=case,
        )

    if _near(eps, 0.0):
        zero_eq = _zero_partnership_eps0(params)
        covered = delta >= 3 and p >= 1 / 3
        if covered:
            A = p * K * (1 + beta) / (1 + p)
            if kappa0 == 0:
                z = (A / (k * (delta - 1))) ** (1 / (delta - 1))
            else:
                def gamma(x):
                    return A * x + k * (1 - delta) * x**delta + kappa0

                def gamma_prime(x):
                    return A + k * delta * (1 - delta) * x ** (delta - 1)

                x_peak = (A / (k * delta * (delta - 1))) ** (1 / (delta - 1))
                hi = expand_upper(gamma, x_peak, 2 * x_peak)
                z = find_root(gamma, x_peak, hi, gamma_prime, rtol=1e-14)
            value = _partner_value(params, z)
            if value >= -BOUNDARY_ATOL:
                return positive(z, "I(iii)")
        if zero_eq:
            return PartnershipOutcome(PartnershipVariant.ZERO_EQUILIBRIUM, z_star=0.0, v_partner=0.0, case="I(i-ii)")
        if covered and zero_eq is False:
            return PartnershipOutcome(
                PartnershipVariant.UNCLASSIFIED, case="I(iii)",
                diagnostics=_partnership_scan(params, "no_equilibrium"),
            )
        return PartnershipOutcome(
            PartnershipVariant.UNCLASSIFIED, case="I", diagnostics=_partnership_scan(params, "conditions_not_met")
        )

    if _near(eps, 1.0):
        if 0.5 * (1 + beta) * K * (1 + p) <= kappa0 + BOUNDARY_ATOL:
            return PartnershipOutcome(PartnershipVariant.ZERO_EQUILIBRIUM, z_star=0.0, v_partner=0.0, case="II(i)")
        base = K * (1 + beta) / (2 * (1 + p))
        if delta >= 2 and 2 * (1 + delta) > (1 + p) ** 2 and base < kappa0:
            z = ((kappa0 - base) / (k * (delta - 1))) ** (1 / delta)
            if kappa0 <= base * (1 + (delta - 1) * (1 + p)) / delta + BOUNDARY_ATOL:
                return positive(z, "II(ii)")
            # zero is not an equilibrium here either, and z is the only candidate
            return PartnershipOutcome(
                PartnershipVariant.UNCLASSIFIED, case="II(ii)", diagnostics=_partnership_scan(params, "no_equilibrium")
            )
        return PartnershipOutcome(
            PartnershipVariant.UNCLASSIFIED, case="II", diagnostics=_partnership_scan(params, "conditions_not_met")
        )

    return PartnershipOutcome(
        PartnershipVariant.UNCLASSIFIED, case="mixed", diagnostics=_partnership_scan(params, "mixed_eps_uncovered")
    )


def verify_partnership_global_max(params: ModelParams, z_star: float, n: int = GRID_POINTS) -> tuple[bool, Diagnostics]:
    """Check that ``H(.; z_star)`` peaks at ``z_star`` and beats staying out."""
    grid = _log_grid(z_star, n)
    values = np.array([partnership_H(params, z, z_star) for z in grid])
    best = partnership_H(params, z_star, z_star)
    ok = _dominates(best, values) and _dominates(best, [0.0, _partnership_limit_at_zero(params, z_star)])
    i = int(np.argmax(values))
    return ok, Diagnostics(
        reason="global_max" if ok else "dominated",
        numeric_scan=np.column_stack([grid, values]),
        best_candidate=float(grid[i]),
    )


@dataclass
class MonotonicityReport:
    betas: list[float]
    z_stars: list[float]
    values: list[float]
    excluded: list[float]
    predicted_sign: int
    z_direction: Optional[int]
    value_increasing: bool
    numeric_points: list[float] = field(default_factory=list)

    @property
    def agrees(self) -> bool:
        return self.z_direction == self.predicted_sign and not self.excluded


def _direction(seq, tol: float) -> Optional[int]:
    d = np.diff(np.asarray(seq, dtype=float))
    if d.size == 0 or np.all(np.abs(d) <= tol):
        return 0
    if np.all(d > 0):
        return 1
    if np.all(d < 0):
        return -1
    return None


def partnership_beta_monotonicity(params: ModelParams, beta_grid, tol: float = 1e-9) -> MonotonicityReport:
    """Empirical direction of the partnership size and value as ``beta`` varies.

    Grid points where no positive equilibrium is available are excluded and
    listed. Outside the closed-form cases a numerically verified stationary
    point (unique positive root passing the grid check, with nonnegative
    value) is accepted and recorded in ``numeric_points``.
    """
    p, eps = params.p, params.eps
    s = 2 * p - 2 * p * eps - eps
    predicted = 0 if abs(s) <= BOUNDARY_ATOL else (1 if s > 0 else -1)
    betas, zs, vs, excluded, numeric = [], [], [], [], []
    for beta in sorted(beta_grid):
        q = params.replace(beta=float(beta))
        out = partnership_equilibrium(q)
        if out.variant is PartnershipVariant.UNIQUE_POSITIVE:
            z = out.z_star
        elif (
            out.variant is PartnershipVariant.UNCLASSIFIED
            and out.diagnostics is not None
            and out.diagnostics.candidate_verified
            and _partner_value(q, out.diagnostics.best_candidate) >= 0
        ):
            z = out.diagnostics.best_candidate
            numeric.append(float(beta))
        else:
            excluded.append(float(beta))
            continue
        betas.append(float(beta))
        zs.append(z)
        vs.append(_partner_value(q, z))
    z_dir = _direction(zs, tol * max(1.0, max(zs, default=1.0)))
    v_inc = _direction(vs, 0.0) == 1 if len(vs) > 1 else True
    return MonotonicityReport(betas, zs, vs, excluded, predicted, z_dir, v_inc, numeric)
