"""Intra-team layer: parameters, rank reward, state dynamics and member values.

Every effort rate and team intensity used by the solvers has the power form
``a * (1 - r)**p``, so :class:`PowerProfile` is the only control type.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Iterable, Sequence

import numpy as np

from .quadrature import adaptive_simpson

# absolute slack used whenever a case-boundary inequality is tested for equality
BOUNDARY_ATOL = 1e-12


class DomainError(ValueError):
    """An argument lies outside the domain on which a formula is defined."""


@dataclass(frozen=True)
class ModelParams:
    K: float
    p: float
    eps: float
    beta: float
    theta: float
    c: float
    kappa0: float
    k: float
    delta: float

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise DomainError(f"{f.name} must be a finite number, got {value!r}")
        checks = [
            (self.K > 0, "K must be > 0"),
            (self.p > 0, "p must be > 0"),
            (0 <= self.eps <= 1, "eps must lie in [0, 1]"),
            (0 <= self.beta < 1, "beta must lie in [0, 1)"),
            (0 < self.theta < 1, "theta must lie in (0, 1)"),
            (self.c > 0, "c must be > 0"),
            (self.kappa0 >= 0, "kappa0 must be >= 0"),
            (self.k > 0, "k must be > 0"),
            (self.delta > 0, "delta must be > 0"),
        ]
        for ok, message in checks:
            if not ok:
                raise DomainError(message)

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def size_cost(self, z: float) -> float:
        """Variable size cost ``k * z**delta``."""
        return self.k * z**self.delta

    @property
    def manager_cost(self) -> float:
        """Worker effort cost under a manager, who keeps share ``theta``."""
        return self.c / (1.0 - self.theta)


@dataclass(frozen=True)
class PowerProfile:
    """The function ``x -> coeff * (1 - x)**exponent`` on ``[0, 1]``."""

    coeff: float
    exponent: float

    def __post_init__(self):
        if not self.coeff >= 0:
            raise DomainError(f"profile coefficient must be >= 0, got {self.coeff}")
        if not self.exponent > 0:
            raise DomainError(f"profile exponent must be > 0, got {self.exponent}")

    def __call__(self, x):
        return self.coeff * (1.0 - np.asarray(x, dtype=float)) ** self.exponent

    @property
    def is_zero(self) -> bool:
        return self.coeff == 0.0

    def scaled(self, factor: float) -> "PowerProfile":
        return PowerProfile(self.coeff * factor, self.exponent)


def _check_rank(r):
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0) or np.any(arr > 1) or np.any(np.isnan(arr)):
        raise DomainError(f"rank fraction must lie in [0, 1], got {r!r}")


def reward(params: ModelParams, z: float, r):
    """Per-member rank reward ``K (1+p) (1-r)**p z**-eps``."""
    if not z > 0:
        raise DomainError(f"reward is defined for team size z > 0, got {z}")
    _check_rank(r)
    value = params.K * (1 + params.p) * (1.0 - np.asarray(r, dtype=float)) ** params.p * z ** (-params.eps)
    return float(value) if np.ndim(value) == 0 else value


def team_gain(params: ModelParams, r):
    """Total team reward ``z**eps * G_z(r)``, free of any division effect."""
    _check_rank(r)
    value = params.K * (1 + params.p) * (1.0 - np.asarray(r, dtype=float)) ** params.p
    return float(value) if np.ndim(value) == 0 else value


def rho_closed_form(intensity: PowerProfile, t):
    """Fraction of teams finished by time ``t`` when every team uses ``intensity``.

    Solves ``rho' = C (1 - rho)**(p+1)``, ``rho(0) = 0``.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("time must be >= 0")
    C, p = intensity.coeff, intensity.exponent
    value = -np.expm1(-np.log1p(p * C * t) / p)
    return float(value) if np.ndim(value) == 0 else value


def cumulative_intensity(intensity: PowerProfile, t):
    """Integrated hazard ``int_0^t lambda(rho(s)) ds = log(1 + pCt) / p``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("time must be >= 0")
    C, p = intensity.coeff, intensity.exponent
    value = np.log1p(p * C * t) / p
    return float(value) if np.ndim(value) == 0 else value


def invert_cumulative(intensity: PowerProfile, level):
    """Time at which the integrated hazard reaches ``level``.

    Returns ``inf`` for a zero intensity and positive level: the jump never
    occurs and the team is given rank 1.
    """
    level = np.asarray(level, dtype=float)
    if np.any(level < 0):
        raise DomainError("hazard level must be >= 0")
    C, p = intensity.coeff, intensity.exponent
    if C == 0:
        value = np.where(level > 0, np.inf, 0.0)
    else:
        value = np.expm1(p * level) / (p * C)
    return float(value) if np.ndim(value) == 0 else value


def best_response_effort(params: ModelParams, z: float, effective_cost: float | None = None) -> PowerProfile:
    """Equilibrium member effort ``(1-beta) z G_z(r) / (2 c_eff)``.

    ``effective_cost`` is ``c`` for a partnership or planner team,
    ``c / (1 - theta)`` under a manager, or a harmonic mean of heterogeneous
    costs. A team of size zero exerts no effort.
    """
    c_eff = params.c if effective_cost is None else effective_cost
    if not c_eff > 0:
        raise DomainError(f"effective cost must be > 0, got {c_eff}")
    if z < 0:
        raise DomainError(f"team size must be >= 0, got {z}")
    if z == 0:
        return PowerProfile(0.0, params.p)
    coeff = (1 - params.beta) * params.K * (1 + params.p) * z ** (1 - params.eps) / (2 * c_eff)
    return PowerProfile(coeff, params.p)


def symmetric_intensity(params: ModelParams, z: float, effective_cost: float | None = None) -> PowerProfile:
    """Team jump intensity ``z * alpha_z`` when every member plays the equilibrium."""
    return best_response_effort(params, z, effective_cost).scaled(z)


def zero_lambda_value(params: ModelParams, z: float, r: float, effective_cost: float | None = None) -> float:
    """Member value when all other teams are idle: ``(1+beta)/2 * G_z(r)``.

    The team's own exponential jump time makes the effort cost exactly
    offset half of the bonus, independently of the cost coefficient.
    """
    if not r < 1:
        raise DomainError("zero-intensity value is defined for r < 1")
    return 0.5 * (1 + params.beta) * reward(params, z, r)


def member_value(
    params: ModelParams,
    lam: PowerProfile,
    z: float,
    r: float,
    effective_cost: float | None = None,
    rtol: float = 1e-10,
) -> float:
    """Equilibrium value of a team member at rank state ``r``.

    Evaluates the explicit double-integral solution of the linear value ODE
    for competitor intensity ``lam``. The inner integral of
    ``(1-y)**(p-1) / lam(y)`` has the elementary antiderivative
    ``-log(1-y) / a`` for a power profile; the outer integral is computed
    numerically after substituting ``u = (1-x)**p``, which turns the
    ``(1-x)**(p-1)`` endpoint behaviour into a bounded integrand.
    """
    c = params.c if effective_cost is None else effective_cost
    if not c > 0:
        raise DomainError(f"effective cost must be > 0, got {c}")
    if not z > 0:
        raise DomainError(f"member value needs z > 0, got {z}")
    _check_rank(r)
    if r == 1:
        return 0.0
    if lam.is_zero:
        return zero_lambda_value(params, z, r, c)
    if not math.isclose(lam.exponent, params.p, rel_tol=1e-12):
        raise DomainError("competitor intensity must share the reward exponent p")

    K, p, beta, eps = params.K, params.p, params.beta, params.eps
    a = lam.coeff
    prefactor = (1 - beta**2) / (4 * c) * K**2 * (1 + p) ** 2 * z ** (2 - 2 * eps)
    decay = K * (1 + p) * (1 - beta) / (2 * c) * z ** (2 - eps)
    log_tail_r = math.log1p(-r)

    def integrand(u: float) -> float:
        # u = (1-x)**p, dx = -(1/p) (1-x)**(1-p) du
        # work with log(1-x) directly; 1 - x underflows long before u does
        if u <= 0.0:
            return 0.0
        log_w = math.log(u) / p
        inner = (log_tail_r - log_w) / a
        log_lam = math.log(a) + lam.exponent * log_w
        log_outer = (2 * p - 1) * log_w - log_lam + (1 - p) * log_w - math.log(p)
        return math.exp(log_outer - decay * inner)

    # integrate over s = u / upper so the absolute floor does not swamp small tails
    upper = (1.0 - r) ** p
    scaled = adaptive_simpson(lambda s: integrand(upper * s), 0.0, 1.0, rtol=rtol)
    return prefactor * upper * scaled


def symmetric_value(params: ModelParams, z: float, r: float = 0.0, effective_cost: float | None = None) -> float:
    """Closed form of :func:`member_value` when competitors mirror the team.

    ``K (1+beta) / 2 * z**-eps * (1-r)**p``; note it does not involve the cost.
    """
    if not z > 0:
        raise DomainError(f"member value needs z > 0, got {z}")
    _check_rank(r)
    return 0.5 * params.K * (1 + params.beta) * z ** (-params.eps) * (1 - r) ** params.p


def effective_cost_harmonic(costs: Iterable[tuple[float, float]] | Sequence[tuple[float, float]]) -> float:
    """Harmonic-mean cost of a team whose members have heterogeneous costs.

    ``costs`` holds ``(c_j, weight_j)`` pairs; weights are normalised.
    """
    pairs = list(costs)
    if not pairs:
        raise DomainError("cost distribution is empty")
    total = 0.0
    acc = 0.0
    for c_j, w_j in pairs:
        if not c_j > 0:
            raise DomainError(f"member cost must be > 0, got {c_j}")
        if w_j < 0:
            raise DomainError(f"weights must be >= 0, got {w_j}")
        total += w_j
        acc += w_j / c_j
    if not total > 0:
        raise DomainError("weights must sum to a positive total")
    return total / acc
