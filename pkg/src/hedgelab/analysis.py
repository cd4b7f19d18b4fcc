"""Regret and Nash-gap metering, plus closed forms for the adversarial instance."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .game import MatchTrace, PayoffMatrix


@dataclass(frozen=True)
class RegretReport:
    """Cumulative regret metrics of a finished match.

    reg_x / reg_y compare against the best fixed action in hindsight; the
    dynamic variants (dreg_x / dreg_y) compare against the best action of
    each round separately, so dreg >= reg always.
    """

    reg_x: float
    reg_y: float
    social: float
    max_individual: float
    dreg_x: float
    dreg_y: float
    per_round: list | None = None


class RegretMeter:
    """Single-pass accumulator of every regret metric; O(m + n) state.

    Usable directly as a play_match observer. Argmax bookkeeping runs on
    cumulative vectors, so nothing per-round is retained.
    """

    def __init__(self, payoffs: PayoffMatrix):
        self.cum_gain = np.zeros(payoffs.m)
        self.cum_loss = np.zeros(payoffs.n)
        self.gain_total = 0.0
        self.loss_total = 0.0
        self.dreg_x = 0.0
        self.dreg_y = 0.0
        self.rounds = 0
        self.last_pair_gap = 0.0

    def __call__(self, t, x, y, g, loss):
        self.update(t, x, y, g, loss)

    def update(self, t, x, y, g, loss):
        self.cum_gain += g
        self.cum_loss += loss
        px = float(x @ g)
        py = float(y @ loss)
        self.gain_total += px
        self.loss_total += py
        gmax = float(g.max())
        lmin = float(loss.min())
        self.dreg_x += gmax - px
        self.dreg_y += py - lmin
        self.last_pair_gap = gmax - lmin
        self.rounds = t

    @property
    def reg_x(self) -> float:
        if self.rounds == 0:
            return 0.0
        return float(self.cum_gain.max()) - self.gain_total

    @property
    def reg_y(self) -> float:
        if self.rounds == 0:
            return 0.0
        return self.loss_total - float(self.cum_loss.min())

    @property
    def averaged_pair_gap(self) -> float:
        """Nash gap of the time-averaged strategy pair seen so far."""
        if self.rounds == 0:
            return 0.0
        return (float(self.cum_gain.max()) - float(self.cum_loss.min())) / self.rounds

    def report(self, per_round=None) -> RegretReport:
        rx, ry = self.reg_x, self.reg_y
        return RegretReport(
            reg_x=rx,
            reg_y=ry,
            social=rx + ry,
            max_individual=max(rx, ry),
            dreg_x=self.dreg_x,
            dreg_y=self.dreg_y,
            per_round=per_round,
        )

    def snapshot(self, gap_mode: str = "averaged_pair") -> dict:
        """Metric row for the current round; gap_mode picks which pair the
        nash_gap column describes ("averaged_pair" or "last_pair")."""
        if gap_mode == "averaged_pair":
            gap = self.averaged_pair_gap
        elif gap_mode == "last_pair":
            gap = self.last_pair_gap
        else:
            raise ValueError(f"unknown gap_mode {gap_mode!r}")
        rx, ry = self.reg_x, self.reg_y
        return {
            "t": self.rounds,
            "reg_x": rx,
            "reg_y": ry,
            "social": rx + ry,
            "max_ind": max(rx, ry),
            "dreg_x": self.dreg_x,
            "dreg_y": self.dreg_y,
            "nash_gap": gap,
        }


def regret_report(trace: MatchTrace, keep_per_round: bool = False) -> RegretReport:
    """Regret metrics of a recorded match, identical to live metering."""
    meter = RegretMeter(trace.payoffs)
    rows = [] if keep_per_round else None
    for i in range(trace.horizon):
        meter.update(i + 1, trace.x[i], trace.y[i], trace.gains[i], trace.losses[i])
        if keep_per_round:
            rows.append(meter.snapshot())
    return meter.report(per_round=rows)


def nash_gap(payoffs: PayoffMatrix, x, y) -> float:
    """How far the pair (x, y) is from equilibrium: the row player's best
    improvement plus the column player's best improvement."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != (payoffs.m,) or y.shape != (payoffs.n,):
        raise DimensionMismatchError(
            f"strategies of shapes {x.shape}/{y.shape} do not match a "
            f"{payoffs.m}x{payoffs.n} game"
        )
    return float((payoffs.entries @ y).max()) - float((payoffs.entries.T @ x).min())


def adversarial_top_prob(num_actions: int, rate: float, delta: float, t: int) -> float:
    """Closed-form probability the learner puts on action 1 of the adversarial
    instance at round t, valid whatever the opponent plays.

    Round 1 is the uniform first iterate, exactly 1/num_actions; from round 2
    on the weight ratio between action 1 and any other action is
    exp(rate * delta * t).
    """
    if num_actions < 2:
        raise ValueError(f"num_actions must be >= 2, got {num_actions}")
    if rate < 0 or not math.isfinite(rate):
        raise ValueError(f"rate must be finite and >= 0, got {rate}")
    if not (0.0 < delta <= 1.0):
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    if t == 1:
        return 1.0 / num_actions
    return 1.0 / (1.0 + (num_actions - 1) * math.exp(-rate * delta * t))


@dataclass(frozen=True)
class LowerBoundValue:
    """An adversarial-instance regret floor: the gap size that attains it,
    the floor itself, and which analysis branch produced it."""

    delta_star: float
    value: float
    branch: str


def _check_lb_args(num_actions: int, rate: float, horizon: int) -> None:
    if num_actions < 2:
        raise ValueError(f"num_actions must be >= 2, got {num_actions}")
    if rate <= 0 or not math.isfinite(rate):
        raise ValueError(f"rate must be finite and > 0, got {rate}")
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")


def external_regret_lower_bound(num_actions: int, rate: float, horizon: int) -> LowerBoundValue:
    """Regret floor for a learner with the given rate on the adversarial
    instance run for `horizon` rounds with gap delta_star."""
    _check_lb_args(num_actions, rate, horizon)
    m, eta, big_t = num_actions, rate, horizon
    log_term = math.log((m - 1) * (big_t + 1))
    delta_star = min(1.0, log_term / (eta * (big_t + 1)))
    if eta >= log_term / (big_t + 1):
        value = math.log(m) / eta - (log_term + 1.0) / (eta * (big_t + 1))
        branch = "large_rate"
    else:
        value = (math.log(m) - eta - (m - 1) * math.exp(-eta * (big_t + 1))) / eta
        branch = "small_rate"
    return LowerBoundValue(delta_star, value, branch)


def dynamic_regret_lower_bound(num_actions: int, rate: float, horizon: int) -> LowerBoundValue:
    """Dynamic-regret floor for the averaged dynamic on the adversarial
    instance; the effective horizon scale is sqrt(horizon + 1) + 1."""
    _check_lb_args(num_actions, rate, horizon)
    m, eta, big_t = num_actions, rate, horizon
    kappa = math.sqrt(big_t + 1.0) + 1.0
    log_term = math.log((m - 1) * kappa)
    delta_star = min(1.0, log_term / (eta * kappa))
    if eta >= log_term / kappa:
        value = math.log(m) * math.log(big_t + 1.0) / (2.0 * eta) - (log_term + 1.0) / (
            eta * kappa
        )
        branch = "large_rate"
    else:
        value = (
            math.log(big_t + 1.0)
            / (2.0 * eta)
            * (math.log(m) - eta - (m - 1) * math.exp(-eta * kappa))
        )
        branch = "small_rate"
    return LowerBoundValue(delta_star, value, branch)
