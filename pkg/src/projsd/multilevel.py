"""Multi-level driver over nested convex sets.

Runs the single-level iteration on a schedule of levels whose stability
constants grow while the approximation errors shrink, handing the stopped
iterate of each level to the next as its starting point.  The level
transitions are validated against the coupling inequality between
neighboring constants, and the closed-form example schedule generator
reproduces the exponential constant models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (EtaTooLarge, LambdaTooSmall, NoSuchLevel,
                     TauOutOfRange, TransitionInvalid)
from .geometry import SpaceGeometry, bregman_distance
from .models import ForwardModel, NoisyData
from .sets import ConvexSet, bregman_project
from .solver import RunReport, SolverConfig, run_algorithm1

__all__ = [
    "Level",
    "Schedule",
    "MultiLevelReport",
    "validate_transition",
    "validate_schedule",
    "select_final_level",
    "run_multi_level",
    "example_schedule",
]


@dataclass
class Level:
    """One level of the schedule: the restricted operator, its set, and
    the certified constants of the restriction.

    ``cset`` and ``model`` may be None for validation-only schedules
    (closed-form constant models with no concrete operator attached).
    ``reference`` is the level's best approximating solution when known;
    it enables the starting-radius diagnostics.
    """

    index: int
    eta: float
    C: float
    L: float
    Lhat: float
    cset: ConvexSet | None = None
    model: ForwardModel | None = None
    data: NoisyData | None = None
    reference: np.ndarray | None = None

    def ctilde(self, space: SpaceGeometry) -> float:
        return 0.5 * (space.Cp / space.p) ** (-2.0 / space.p) \
            * self.L * self.C ** 2

    def rho(self, space: SpaceGeometry) -> float:
        """Level convergence radius; infinite when the level is linear."""
        ct = self.ctilde(space)
        if ct == 0.0:
            return math.inf
        disc = 1.0 - 8.0 * ct * self.eta
        if disc <= 0.0:
            raise EtaTooLarge(
                f"level {self.index}: 8 * ctilde * eta = "
                f"{8 * ct * self.eta} >= 1")
        bracket = (1.0 + math.sqrt(disc)) / (2.0 * ct) - 2.0 * self.eta
        return (space.Cp / space.p) * self.Lhat ** (-space.p) \
            * bracket ** space.p


@dataclass
class Schedule:
    """Ordered levels plus the uniform tolerance and target residual."""

    levels: list[Level]
    epsilon: float
    eta_hat: float

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("tolerance constant epsilon must be positive")
        if self.eta_hat <= 0:
            raise ValueError("eta_hat must be positive")

    @property
    def etas(self) -> list[float]:
        return [lv.eta for lv in self.levels]


@dataclass
class MultiLevelReport:
    """Outcome of a multi-level run."""

    per_level: list[tuple[int, int, float, RunReport]]
    x_final: np.ndarray | None
    stop_reason: str
    start_radius_ok: list[bool | None] = field(default_factory=list)

    @property
    def final_residual(self) -> float:
        return self.per_level[-1][2] if self.per_level else math.nan


def validate_transition(space: SpaceGeometry, level_n: Level,
                        level_next: Level, epsilon: float):
    """Evaluate the neighbor-level coupling inequality.

    Returns ``(lhs, rhs, ok)`` where ``lhs = (3 + eps) * eta_n`` and
    ``rhs`` is the next level's admissible-start budget; ``ok`` requires
    strict inequality.
    """
    ct = level_next.ctilde(space)
    eta1 = level_next.eta
    if ct == 0.0:
        bracket = math.inf
    else:
        disc = 1.0 - 8.0 * ct * eta1
        if disc <= 0.0:
            raise EtaTooLarge(
                f"level {level_next.index}: 8 * ctilde * eta = "
                f"{8 * ct * eta1} >= 1")
        bracket = (1.0 + math.sqrt(disc)) / (2.0 * ct) - 2.0 * eta1
    lhs = (3.0 + epsilon) * level_n.eta
    rhs = (space.Cp / space.p) ** (1.0 / space.p) \
        / (level_next.Lhat * level_next.C) * bracket - eta1
    return lhs, rhs, lhs < rhs


def select_final_level(eta_sequence, epsilon: float, eta_hat: float) -> int:
    """First index whose approximation error satisfies
    ``(3 + eps) * eta_N <= eta_hat``.

    Raises
    ------
    NoSuchLevel
        If the sequence never gets small enough.
    """
    for n, eta in enumerate(eta_sequence):
        if (3.0 + epsilon) * eta <= eta_hat:
            return n
    raise NoSuchLevel(
        f"no level with ({3 + epsilon}) * eta <= {eta_hat} in "
        f"{len(list(eta_sequence))} levels")


def validate_schedule(space: SpaceGeometry, schedule: Schedule):
    """All neighbor-pair transition checks plus the final-level selection.

    Returns ``(transitions, final_index)`` where transitions is a list of
    ``(n, lhs, rhs, ok)``.  Raises TransitionInvalid if any pair fails or
    the schedule does not end exactly at the selected final level.
    """
    transitions = []
    ok_all = True
    for lv, nxt in zip(schedule.levels, schedule.levels[1:]):
        lhs, rhs, ok = validate_transition(space, lv, nxt, schedule.epsilon)
        transitions.append((lv.index, lhs, rhs, ok))
        ok_all &= ok
    final = select_final_level(schedule.etas, schedule.epsilon,
                               schedule.eta_hat)
    if not ok_all:
        bad = [n for n, _, _, ok in transitions if not ok]
        raise TransitionInvalid(f"transition check failed at levels {bad}")
    if final != len(schedule.levels) - 1:
        raise TransitionInvalid(
            f"schedule has {len(schedule.levels)} levels but the "
            f"discrepancy target is first met at level {final}")
    return transitions, final


def run_multi_level(space: SpaceGeometry, schedule: Schedule, x00,
                    max_iterations_per_level: int = 10 ** 6
                    ) -> MultiLevelReport:
    """Run the schedule level by level.

    Each level runs the single-level iteration with its own discrepancy
    threshold ``(3 + eps) * eta_n`` and hands the stopped iterate to the
    next level; since the sets are nested no projection is needed, but a
    numerical membership check with corrective projection is applied as
    floating-point hygiene.
    """
    validate_schedule(space, schedule)
    for lv in schedule.levels:
        if lv.cset is None or lv.model is None or lv.data is None:
            raise TransitionInvalid(
                f"level {lv.index} has no concrete set/model/data to run")

    x = space.check_dim(np.asarray(x00, dtype=float)).copy()
    eps = schedule.epsilon
    per_level: list[tuple[int, int, float, RunReport]] = []
    radius_ok: list[bool | None] = []
    stop_reason = "DiscrepancyMet"
    last_index = schedule.levels[-1].index
    for lv in schedule.levels:
        model = lv.model.with_constants(lip=lv.L, lhat=lv.Lhat, cstab=lv.C)
        # The sets are nested, so this projection is a no-op in exact
        # arithmetic; it only repairs floating-point membership drift.
        if not lv.cset.contains(space, x, tol=1e-12):
            x = bregman_project(space, lv.cset, x)
        if lv.reference is not None:
            radius_ok.append(
                float(bregman_distance(space, x, lv.reference))
                < lv.rho(space))
        else:
            radius_ok.append(None)
        # Final level: the selection rule guarantees (3+eps)*eta_N <=
        # eta_hat, so stopping at the target residual is at least as
        # strict a result and stays well defined when eta_N == 0.
        threshold = schedule.eta_hat if lv.index == last_index \
            else (3.0 + eps) * lv.eta
        config = SolverConfig(eta=lv.eta, eta_hat=threshold,
                              max_iterations=max_iterations_per_level,
                              diagnostic_reference=lv.reference)
        report = run_algorithm1(space, lv.cset, model, lv.data, x, config)
        per_level.append((lv.index, report.stopped_at_k,
                          report.final_residual, report))
        x = report.x_final
        if report.stop_reason != "DiscrepancyMet":
            stop_reason = report.stop_reason
            break
    else:
        final_res = per_level[-1][2]
        if not final_res <= schedule.eta_hat:
            stop_reason = "TargetResidualMissed"
    return MultiLevelReport(per_level=per_level, x_final=x,
                            stop_reason=stop_reason,
                            start_radius_ok=radius_ok)


def example_schedule(lam: float, tau: float, space: SpaceGeometry,
                     eta_hat: float, max_levels: int = 64,
                     allow_small_lambda: bool = False) -> Schedule:
    """Closed-form exponential schedule with provably valid transitions.

    Constant models per level index ``a``::

        eta_a  = lam * exp(-a) / (a + 2)
        C_a    = 2 * exp(a)
        Lhat_a = (a + 1) * exp(-a)
        L_a    = tau * exp(-a)

    with tolerance constant ``epsilon = 1``.  The curvature weight ``tau``
    must satisfy ``0 < tau < (Cp/p)**(3/p) / (16 * lam * (4 e + 1))``; the
    transition inequality then holds at every level.  The schedule stops
    at the first level whose discrepancy threshold ``4 * eta_a`` is at or
    below ``eta_hat``.

    Raises
    ------
    LambdaTooSmall
        If ``lam < 100 * eta_hat`` (unless ``allow_small_lambda``); small
        initial errors defeat the purpose of a coarse first level.
    TauOutOfRange
        If ``tau`` violates its admissibility bound.
    NoSuchLevel
        If ``max_levels`` levels do not reach the target residual.
    """
    if eta_hat <= 0:
        raise ValueError("eta_hat must be positive")
    if lam < 100.0 * eta_hat and not allow_small_lambda:
        raise LambdaTooSmall(
            f"lam = {lam} < 100 * eta_hat = {100 * eta_hat}")
    tau_max = (space.Cp / space.p) ** (3.0 / space.p) \
        / (16.0 * lam * (4.0 * math.e + 1.0))
    if not 0.0 < tau < tau_max:
        raise TauOutOfRange(
            f"tau = {tau} outside the admissible interval (0, {tau_max})")

    epsilon = 1.0
    etas = [lam * math.exp(-a) / (a + 2.0) for a in range(max_levels)]
    final = select_final_level(etas, epsilon, eta_hat)
    levels = [
        Level(index=a,
              eta=etas[a],
              C=2.0 * math.exp(a),
              L=tau * math.exp(-a),
              Lhat=(a + 1.0) * math.exp(-a))
        for a in range(final + 1)
    ]
    return Schedule(levels=levels, epsilon=epsilon, eta_hat=eta_hat)
