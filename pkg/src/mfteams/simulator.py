"""Finite-population Monte Carlo check of the mean-field predictions.

Teams draw unit exponentials ``Z``; under a common team intensity
``C (1-r)**p`` the completion time and rank are exact transforms of ``Z``::

    tau  = (exp(p Z) - 1) / (p C)
    rank = 1 - exp(-Z)

Members are not simulated one by one. By symmetry a member's effort cost over
``[0, tau]`` is ``c a / (p z) * (1 - exp(-p Z))`` with ``a = C / z`` the member
effort coefficient, so each team draw fixes every member's payoff.

Draws are generated in fixed-size chunks; chunk ``j`` uses the stream seeded
by ``(seed, j)``, so a team's draw depends only on ``(seed, index)`` and the
output is identical for any worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .model import DomainError, ModelParams, PowerProfile, best_response_effort, invert_cumulative, rho_closed_form

CHUNK_SIZE = 1 << 16
KS_GRID_POINTS = 1000


def worker_count(n_tasks: int) -> int:
    """Worker threads to use, capped by ``MFT_THREADS`` when set."""
    cap = os.environ.get("MFT_THREADS")
    n = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(n, n_tasks))


@dataclass(frozen=True)
class SimulationConfig:
    n_teams: int
    seed: int
    params: ModelParams
    z: float
    intensity: PowerProfile
    member_deviation: float = 1.0
    reward_share: float = 1.0  # 1 - theta for workers under a manager

    def __post_init__(self):
        if not (isinstance(self.n_teams, (int, np.integer)) and self.n_teams >= 1):
            raise DomainError(f"n_teams must be a positive integer, got {self.n_teams!r}")
        if not self.z > 0:
            raise DomainError(f"team size must be > 0, got {self.z}")
        if not self.intensity.coeff > 0:
            raise DomainError("simulated intensity must have a positive coefficient")
        if self.member_deviation < 0:
            raise DomainError("member deviation multiplier must be >= 0")
        if not 0 < self.reward_share <= 1:
            raise DomainError("reward share must lie in (0, 1]")

    @classmethod
    def symmetric(cls, params: ModelParams, z: float, n_teams: int, seed: int = 0,
                  effective_cost: Optional[float] = None, reward_share: float = 1.0) -> "SimulationConfig":
        """Every team of size ``z`` plays the intra-team equilibrium effort."""
        effort = best_response_effort(params, z, effective_cost)
        return cls(n_teams, seed, params, z, effort.scaled(z), reward_share=reward_share)

    @property
    def member_coeff(self) -> float:
        return self.intensity.coeff / self.z


@dataclass
class SimulationDraw:
    z_exp: np.ndarray
    tau: np.ndarray
    rank: np.ndarray


@dataclass
class Estimate:
    mean: float
    stderr: float

    def within(self, target: float, n_se: float = 3.0) -> bool:
        return abs(self.mean - target) <= n_se * self.stderr

    def __str__(self):
        return f"{self.mean:.10g} +/- {self.stderr:.3g}"


@dataclass
class SimulationReport:
    n_teams: int
    draws: SimulationDraw
    empirical_cdf: np.ndarray  # sorted completion times
    ks_distance_vs_rho: float
    mean_team_reward: Estimate
    mean_member_reward: Estimate
    mean_effort_cost: Estimate
    mean_member_payoff: Estimate
    probe_member_payoff: Estimate
    stderr_defined: bool
    member_reward: np.ndarray  # share * G_z(rank) per team
    effort_cost: np.ndarray  # per-member effort cost per team

    def ecdf(self, t):
        return np.searchsorted(self.empirical_cdf, t, side="right") / self.n_teams


def _estimate(x: np.ndarray) -> Estimate:
    if x.size < 2:
        return Estimate(float(np.mean(x)), math.nan)
    return Estimate(float(np.mean(x)), float(np.std(x, ddof=1) / math.sqrt(x.size)))


def _draw_chunk(seed: int, index: int, size: int) -> np.ndarray:
    ss = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, index])
    return np.random.Generator(np.random.PCG64(ss)).standard_exponential(size)


def draw_exponentials(seed: int, n: int) -> np.ndarray:
    """Unit-rate exponentials for teams ``0..n-1``; chunk layout is fixed."""
    sizes = [min(CHUNK_SIZE, n - start) for start in range(0, n, CHUNK_SIZE)]
    tasks = list(enumerate(sizes))
    workers = worker_count(len(tasks))
    if workers == 1:
        parts = [_draw_chunk(seed, i, s) for i, s in tasks]
    else:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda t: _draw_chunk(seed, *t), tasks))
    return np.concatenate(parts)


def completion_times(intensity: PowerProfile, z_exp: np.ndarray) -> np.ndarray:
    return invert_cumulative(intensity, z_exp)


def member_effort_cost(params: ModelParams, z: float, member_coeff: float, z_exp) -> np.ndarray:
    """``c int_0^tau alpha(rho(t))**2 dt`` for effort ``member_coeff (1-r)**p``."""
    p = params.p
    return params.c * member_coeff / (p * z) * -np.expm1(-p * np.asarray(z_exp))


def run_simulation(config: SimulationConfig) -> SimulationReport:
    params, z = config.params, config.z
    z_exp = draw_exponentials(config.seed, config.n_teams)
    tau = completion_times(config.intensity, z_exp)
    rank = -np.expm1(-z_exp)

    team_reward = params.K * (1 + params.p) * np.exp(-params.p * z_exp)  # (1-rank)**p = exp(-pZ)
    member_reward = config.reward_share * team_reward * z ** (-params.eps)
    cost = member_effort_cost(params, z, config.member_coeff, z_exp)
    m = config.member_deviation
    payoff = member_reward - cost
    probe = member_reward * (params.beta + (1 - params.beta) * m) - m**2 * cost

    draws = SimulationDraw(z_exp, tau, rank)
    report = SimulationReport(
        n_teams=config.n_teams,
        draws=draws,
        empirical_cdf=np.sort(tau),
        ks_distance_vs_rho=math.nan,
        mean_team_reward=_estimate(team_reward),
        mean_member_reward=_estimate(member_reward),
        mean_effort_cost=_estimate(cost),
        mean_member_payoff=_estimate(payoff),
        probe_member_payoff=_estimate(probe),
        stderr_defined=config.n_teams >= 2,
        member_reward=member_reward,
        effort_cost=cost,
    )
    report.ks_distance_vs_rho = empirical_rho_check(report, config.intensity)
    return report


def empirical_rho_check(report: SimulationReport, intensity: PowerProfile, n_grid: int = KS_GRID_POINTS) -> float:
    """Sup distance between the completion-time ECDF and ``rho`` on a time grid.

    The grid is placed at the ``(j + 1/2) / n_grid`` quantiles of ``rho`` for
    ``intensity``.
    """
    u = (np.arange(n_grid) + 0.5) / n_grid
    p, C = intensity.exponent, intensity.coeff
    t = np.expm1(-p * np.log1p(-u)) / (p * C)
    return float(np.max(np.abs(report.ecdf(t) - rho_closed_form(intensity, t))))


@dataclass
class DeviationScan:
    multipliers: list[float]
    payoffs: list[Estimate]

    @property
    def argmax(self) -> float:
        i = int(np.argmax([e.mean for e in self.payoffs]))
        return self.multipliers[i]


def deviation_payoff_scan(config: SimulationConfig, multipliers: Sequence[float],
                          report: Optional[SimulationReport] = None) -> DeviationScan:
    """Expected payoff of one member scaling her effort by each multiplier.

    A single member does not move the team's intensity, so the same team
    draws serve every multiplier.
    """
    ms = [float(m) for m in multipliers]
    if any(m < 0 for m in ms):
        raise DomainError("multipliers must be >= 0")
    if report is None:
        report = run_simulation(config)
    beta = config.params.beta
    out = []
    for m in ms:
        payoff = report.member_reward * (beta + (1 - beta) * m) - m**2 * report.effort_cost
        out.append(_estimate(payoff))
    return DeviationScan(ms, out)


def analytic_deviation_coefficients(config: SimulationConfig) -> tuple[float, float]:
    """``(A, B)`` with expected probe payoff ``A (beta + (1-beta) m) - B m**2``."""
    params, z = config.params, config.z
    A = config.reward_share * params.K * z ** (-params.eps)
    B = params.c * config.member_coeff / (z * (1 + params.p))
    return A, B


def simulate_deviating_team(params: ModelParams, z: float, z_star: float, n_teams: int, seed: int = 0,
                            effective_cost: Optional[float] = None) -> Estimate:
    """Mean rank reward ``G_z(rank)`` of a size-``z`` team among size-``z_star`` rivals.

    The rivals set the rank clock ``rho``; the deviating team's hazard is its
    own equilibrium intensity integrated along that clock.
    """
    rivals = best_response_effort(params, z_star, effective_cost).scaled(z_star)
    own = best_response_effort(params, z, effective_cost).scaled(z)
    z_exp = draw_exponentials(seed, n_teams)
    # own hazard is (own.coeff / rivals.coeff) times the rivals' hazard at every time
    tau = invert_cumulative(rivals, z_exp * rivals.coeff / own.coeff)
    rank = rho_closed_form(rivals, tau)
    g = params.K * (1 + params.p) * (1 - rank) ** params.p * z ** (-params.eps)
    return _estimate(np.asarray(g))
