"""Learner state machines built on the optimistic exponential-weights update."""

from __future__ import annotations

from typing import Protocol

import numpy as np

from .errors import (
    DimensionMismatchError,
    NonFiniteWeightError,
    UtilityOutOfRangeError,
)

# Reconstructed utilities carry float drift, so the range check leaves a hair
# of slack above 1; a genuinely out-of-range entry like 1.5 still raises.
UTILITY_SLACK = 1e-9


class Learner(Protocol):
    dim: int

    def next_strategy(self) -> np.ndarray: ...

    def observe(self, utilities) -> None: ...


def uniform_strategy(dim: int) -> np.ndarray:
    if dim < 1:
        raise ValueError(f"need at least one action, got {dim}")
    return np.full(dim, 1.0 / dim)


class OptimisticHedge:
    """Exponential weights with the most recent utility counted twice.

    The weight of action i after t-1 observations is
    exp(rate * (sum of past utilities + the latest utility)), the latest
    utility standing in as a prediction of the upcoming one. Weights start
    all-ones, so the first strategy is uniform. rate == 0 plays the exact
    uniform strategy every round rather than a numerical limit.
    """

    def __init__(self, dim: int, rate: float):
        if dim < 1:
            raise ValueError(f"need at least one action, got {dim}")
        rate = float(rate)
        if not np.isfinite(rate) or rate < 0:
            raise ValueError(f"rate must be finite and >= 0, got {rate}")
        self.dim = int(dim)
        self.rate = rate
        self.cum = np.zeros(self.dim)
        self.last = np.zeros(self.dim)
        self.round = 1

    def next_strategy(self) -> np.ndarray:
        if self.rate == 0.0:
            return uniform_strategy(self.dim)
        scores = self.rate * (self.cum + self.last)
        if not np.all(np.isfinite(scores)):
            raise NonFiniteWeightError("non-finite exponential-weights score")
        scores -= scores.max()  # keep every exponent <= 0
        np.exp(scores, out=scores)
        return scores / scores.sum()

    def observe(self, utilities) -> None:
        u = np.asarray(utilities, dtype=np.float64)
        if u.shape != (self.dim,):
            raise DimensionMismatchError(f"expected {self.dim} utilities, got shape {u.shape}")
        if float(np.abs(u).max()) > 1.0 + UTILITY_SLACK:
            raise UtilityOutOfRangeError("utilities must lie in [-1, 1]")
        self.cum += u
        self.last = u
        self.round += 1


class UniformPlayer:
    """Plays the uniform strategy every round and ignores feedback."""

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError(f"need at least one action, got {dim}")
        self.dim = int(dim)

    def next_strategy(self) -> np.ndarray:
        return uniform_strategy(self.dim)

    def observe(self, utilities) -> None:
        u = np.asarray(utilities, dtype=np.float64)
        if u.shape != (self.dim,):
            raise DimensionMismatchError(f"expected {self.dim} utilities, got shape {u.shape}")


def _kahan_add(total: np.ndarray, comp: np.ndarray, term: np.ndarray) -> None:
    y = term - comp
    s = total + y
    comp[:] = (s - total) - y
    total[:] = s


class AveragedHedge:
    """Plays the running mean of an inner optimistic-Hedge learner's iterates.

    The environment only reports utilities of the averaged strategies, so the
    inner learner's own utility is reconstructed each round as
    t * (averaged utility) - (sum of previously reconstructed utilities).
    Both running sums use compensated summation to keep the reconstruction
    drift below the 1e-10 the equivalence tests demand.
    """

    def __init__(self, dim: int, rate: float):
        self.inner = OptimisticHedge(dim, rate)
        self.dim = self.inner.dim
        self.round = 1
        self._iter_sum = np.zeros(self.dim)
        self._iter_comp = np.zeros(self.dim)
        self._hat_sum = np.zeros(self.dim)
        self._hat_comp = np.zeros(self.dim)
        self._pending: np.ndarray | None = None
        self.last_inner: np.ndarray | None = None
        self.last_reconstructed: np.ndarray | None = None

    def next_strategy(self) -> np.ndarray:
        if self._pending is None:
            inner = self.inner.next_strategy()
            self.last_inner = inner
            _kahan_add(self._iter_sum, self._iter_comp, inner)
            self._pending = self._iter_sum / self.round
        return self._pending

    def observe(self, utilities) -> None:
        if self._pending is None:
            raise RuntimeError("observe() called before next_strategy()")
        u = np.asarray(utilities, dtype=np.float64)
        if u.shape != (self.dim,):
            raise DimensionMismatchError(f"expected {self.dim} utilities, got shape {u.shape}")
        recon = self.round * u - self._hat_sum
        self.last_reconstructed = recon
        self.inner.observe(recon)
        _kahan_add(self._hat_sum, self._hat_comp, recon)
        self.round += 1
        self._pending = None
