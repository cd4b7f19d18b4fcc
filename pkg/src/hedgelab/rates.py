"""Learning-rate plans: feasibility, regret-bound formulas, and the preset table.

A rate plan holds each player's learning rate together with a curvature split
parameter (the fraction of the stability budget spent on the player's own
smoothness term). Bounds come in two coordinate systems: the native one
(eta_x, eta_y, c_x, c_y) and a transformed one (a_x, a_y, s_x, s_y) in which
every bound is a posynomial and hence convex in log coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import (
    DegenerateGameError,
    InfeasibleError,
    MissingHorizonError,
    OutOfDomainError,
    ZeroRateError,
)

# Relative tolerance deciding whether a point sits on the stability boundary,
# where the individual bounds blow up.
BOUNDARY_RTOL = 1e-12


def _tied(u: float, v: float) -> bool:
    return abs(u - v) <= BOUNDARY_RTOL * max(abs(u), abs(v))


@dataclass(frozen=True)
class RateParams:
    """Per-player learning rates and curvature splits.

    Rates are >= 0 (0 means the player ignores feedback and plays uniform);
    splits lie in (0, 1].
    """

    eta_x: float
    eta_y: float
    c_x: float
    c_y: float

    def __post_init__(self):
        for name in ("eta_x", "eta_y"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        for name in ("c_x", "c_y"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must lie in (0, 1], got {v}")


@dataclass(frozen=True)
class TransformedParams:
    """Rate plan in the transformed coordinates a_x = eta_x/c_x, a_y = eta_y/c_y
    plus the slack coordinates s_x, s_y >= 0 measuring the distance from the
    two stability boundaries (s = 0 means the matching bound is infinite)."""

    a_x: float
    a_y: float
    s_x: float
    s_y: float

    def __post_init__(self):
        for name in ("a_x", "a_y"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0:
                raise ValueError(f"{name} must be finite and > 0, got {v}")
        for name in ("s_x", "s_y"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")

    def log_coords(self):
        """(log a_x, log a_y, log s_x, log s_y); defined only when both slacks are positive."""
        if self.s_x <= 0 or self.s_y <= 0:
            raise OutOfDomainError("log coordinates need s_x > 0 and s_y > 0")
        return (
            math.log(self.a_x),
            math.log(self.a_y),
            math.log(self.s_x),
            math.log(self.s_y),
        )


@dataclass(frozen=True)
class BoundInputs:
    """Log action counts feeding every bound formula."""

    log_m: float
    log_n: float

    @classmethod
    def from_actions(cls, m: int, n: int) -> "BoundInputs":
        if m < 1 or n < 1:
            raise ValueError(f"action counts must be >= 1, got ({m}, {n})")
        return cls(math.log(m), math.log(n))

    @property
    def log_m_plus(self) -> float:
        return self.log_m + 0.5

    @property
    def log_n_plus(self) -> float:
        return self.log_n + 0.5

    @property
    def scale(self) -> float:
        """Normalizer sqrt((log m + 1/2)(log n + 1/2)) + sqrt(log m log n)."""
        return math.sqrt(self.log_m_plus * self.log_n_plus) + math.sqrt(self.log_m * self.log_n)


def to_transformed(rp: RateParams) -> TransformedParams:
    """Map a rate plan to transformed coordinates; needs positive rates and splits < 1."""
    if rp.eta_x <= 0 or rp.eta_y <= 0:
        raise OutOfDomainError("transformed coordinates need positive rates")
    if rp.c_x >= 1 or rp.c_y >= 1:
        raise OutOfDomainError("transformed coordinates need c_x, c_y in (0, 1)")
    a_x = rp.eta_x / rp.c_x
    a_y = rp.eta_y / rp.c_y
    s_x = (1.0 / rp.c_x - 1.0) / a_x - a_y
    s_y = (1.0 / rp.c_y - 1.0) / a_y - a_x
    # A boundary point can land a hair below zero through rounding.
    if -BOUNDARY_RTOL * max(1.0, a_y) <= s_x < 0:
        s_x = 0.0
    if -BOUNDARY_RTOL * max(1.0, a_x) <= s_y < 0:
        s_y = 0.0
    if s_x < 0 or s_y < 0:
        raise OutOfDomainError("rate plan is outside the stability region")
    return TransformedParams(a_x, a_y, s_x, s_y)


def from_transformed(tp: TransformedParams) -> RateParams:
    c_x = 1.0 / (1.0 + tp.a_x * (tp.a_y + tp.s_x))
    c_y = 1.0 / (1.0 + tp.a_y * (tp.a_x + tp.s_y))
    return RateParams(c_x * tp.a_x, c_y * tp.a_y, c_x, c_y)


def is_feasible(rp: RateParams) -> bool:
    """Whether the rate product stays inside the stability region.

    The comparison is exact except on the boundary itself, where membership
    is granted within relative tolerance BOUNDARY_RTOL (the tight
    cardinality-aware social point sits exactly there).
    """
    prod = rp.eta_x * rp.eta_y
    for cap in (rp.c_x * (1.0 - rp.c_y), rp.c_y * (1.0 - rp.c_x)):
        if prod > cap and not _tied(prod, cap):
            return False
    return True


def social_bound_terms(rp: RateParams, b: BoundInputs):
    """Per-player social-bound terms and their sum.

    The x term is log(m)/eta_x + eta_x/(2 c_x); the y term is symmetric; the
    sum bounds the social regret of any feasible plan.
    """
    if rp.eta_x == 0 or rp.eta_y == 0:
        raise ZeroRateError("social bound terms need positive rates")
    term_x = b.log_m / rp.eta_x + rp.eta_x / (2.0 * rp.c_x)
    term_y = b.log_n / rp.eta_y + rp.eta_y / (2.0 * rp.c_y)
    return term_x, term_y, term_x + term_y


def individual_bounds(rp: RateParams, b: BoundInputs):
    """Per-player regret bounds (x_bound, y_bound) for a feasible plan.

    On the stability boundary the matching bound is math.inf (a deliberate
    tagged value, not an overflow); strictly inside, both are finite.
    """
    if not is_feasible(rp):
        raise InfeasibleError("rate plan violates the stability region")
    if rp.eta_x == 0 or rp.eta_y == 0:
        raise ZeroRateError("individual bounds need positive rates")
    term_x, term_y, total = social_bound_terms(rp, b)
    prod = rp.eta_x * rp.eta_y
    half_x = rp.eta_x / (2.0 * rp.c_x)
    half_y = rp.eta_y / (2.0 * rp.c_y)
    if _tied(prod, rp.c_x * (1.0 - rp.c_y)):
        bound_x = math.inf
    else:
        margin = (1.0 - rp.c_y) / (2.0 * rp.eta_y) - half_x
        bound_x = term_x + (half_x / margin) * total
    if _tied(prod, rp.c_y * (1.0 - rp.c_x)):
        bound_y = math.inf
    else:
        margin = (1.0 - rp.c_x) / (2.0 * rp.eta_x) - half_y
        bound_y = term_y + (half_y / margin) * total
    return bound_x, bound_y


def individual_bounds_from_transformed(tp: TransformedParams, b: BoundInputs):
    """The same per-player bounds evaluated directly in transformed coordinates."""
    m, n = b.log_m, b.log_n
    mp, np_ = b.log_m_plus, b.log_n_plus
    a, ay, s, sy = tp.a_x, tp.a_y, tp.s_x, tp.s_y
    mix = m / a + np_ * a + n / ay + mp * ay
    if sy == 0.0:
        bound_x = math.inf
    else:
        bound_x = (m / a + ay * m + a / 2.0 + a * n) + s * m + (a / sy) * (mix + s * m)
    if s == 0.0:
        bound_y = math.inf
    else:
        bound_y = (n / ay + a * n + ay / 2.0 + ay * m) + sy * n + (ay / s) * (mix + sy * n)
    return bound_x, bound_y


# ---------------------------------------------------------------------------
# Preset table
# ---------------------------------------------------------------------------

PRESETS = (
    "U-Social",
    "U-X-only",
    "U-MaxInd-Cl",
    "U-MaxInd-Num",
    "A-Social",
    "A-X-only",
    "A-MaxInd-Cl",
    "A-MaxInd-Num",
)

# Which measured regret each preset's bound speaks about.
PRESET_TARGETS = {
    "U-Social": "social",
    "U-X-only": "reg_x",
    "U-MaxInd-Cl": "max_ind",
    "U-MaxInd-Num": "max_ind",
    "A-Social": "social",
    "A-X-only": "reg_x",
    "A-MaxInd-Cl": "max_ind",
    "A-MaxInd-Num": "max_ind",
}

_SQ3 = math.sqrt(3.0)


def _check_preset(name: str) -> None:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose one of {', '.join(PRESETS)}")


def _aware_inputs(name: str, m: int, n: int) -> BoundInputs:
    if m < 2 or n < 2:
        raise DegenerateGameError(f"preset {name} needs m >= 2 and n >= 2, got ({m}, {n})")
    return BoundInputs.from_actions(m, n)


@lru_cache(maxsize=None)
def _unaware_numeric_rates() -> RateParams:
    from .optim import minimize_unaware_coefficients

    point, _ = minimize_unaware_coefficients()
    return from_transformed(point)


@lru_cache(maxsize=None)
def _aware_numeric_result(m: int, n: int):
    from .optim import minimize

    return minimize("max", BoundInputs.from_actions(m, n))


def preset_rates(name: str, m: int, n: int) -> RateParams:
    """Rates of one of the eight named plans for an m-by-n game."""
    _check_preset(name)
    if name == "U-Social":
        return RateParams(0.5, 0.5, 0.5, 0.5)
    if name == "U-X-only":
        return RateParams(1.0, 0.0, 1.0, 1.0)
    if name == "U-MaxInd-Cl":
        r = 1.0 / (2.0 * _SQ3)
        return RateParams(r, r, 0.5, 0.5)
    if name == "U-MaxInd-Num":
        return _unaware_numeric_rates()
    b = _aware_inputs(name, m, n)
    if name == "A-X-only":
        return RateParams(math.sqrt(b.log_m / b.log_n_plus), 0.0, 1.0, 1.0)
    if name == "A-MaxInd-Num":
        return _aware_numeric_result(m, n).rates
    split = math.sqrt(b.log_m_plus * b.log_n_plus) / b.scale
    eta_x = math.sqrt(b.log_m * b.log_m_plus) / b.scale
    eta_y = math.sqrt(b.log_n * b.log_n_plus) / b.scale
    if name == "A-MaxInd-Cl":
        return RateParams(eta_x / 2.0, eta_y / 2.0, split, split)
    return RateParams(eta_x, eta_y, split, split)  # A-Social


def theoretical_upper(
    name: str,
    m: int,
    n: int,
    horizon: int | None = None,
    dynamic: bool = False,
) -> float:
    """Regret bound the named preset promises for its target metric.

    With dynamic=True (social presets only) the bound covers the worse
    player's dynamic regret and grows with the horizon, which must be given.
    """
    _check_preset(name)
    if dynamic:
        if name not in ("U-Social", "A-Social"):
            raise ValueError(f"preset {name} carries no dynamic-regret bound")
        if horizon is None:
            raise MissingHorizonError("dynamic bounds need a horizon")
        if horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {horizon}")
        return theoretical_upper(name, m, n) * (math.log(horizon) + 1.0)
    b_any = BoundInputs.from_actions(m, n)
    if name == "U-Social":
        return 2.0 * (b_any.log_m + b_any.log_n) + 1.0
    if name == "U-X-only":
        return b_any.log_m + 0.5
    if name in ("U-MaxInd-Cl", "U-MaxInd-Num"):
        return 3.0 * _SQ3 * (b_any.log_m + b_any.log_n) + 1.0 / _SQ3
    b = _aware_inputs(name, m, n)
    root_xy = math.sqrt(b.log_m * b.log_n_plus)
    root_yx = math.sqrt(b.log_m_plus * b.log_n)
    if name == "A-Social":
        return 2.0 * (root_xy + root_yx)
    if name == "A-X-only":
        return 1.5 * root_xy
    if name == "A-MaxInd-Cl":
        return (20.0 / 3.0) * (root_xy + root_yx)
    return _aware_numeric_result(m, n).objective_value  # A-MaxInd-Num
