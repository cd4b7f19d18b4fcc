"""Two-player zero-sum matrix games and the round-based match protocol.

The row player picks a mixed strategy x over m actions, the column player a
mixed strategy y over n actions; the row player gains x^T A y and the column
player loses it. Per round the row player sees the gain vector A y and the
column player the loss vector A^T x.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import (
    DimensionMismatchError,
    EntryOutOfRangeError,
    InvalidDeltaError,
    MatrixFormatError,
    TooFewActionsError,
)

Observer = Callable[[int, np.ndarray, np.ndarray, np.ndarray, np.ndarray], None]


@dataclass(frozen=True)
class PayoffMatrix:
    """Validated payoff matrix with entries in [-1, 1]; the array is read-only."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise DimensionMismatchError(f"expected a 2-d matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise EntryOutOfRangeError("matrix entries must be finite")
        if float(np.abs(a).max()) > 1.0:
            raise EntryOutOfRangeError("matrix entries must lie in [-1, 1]")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]


def make_payoff_matrix(m: int, n: int, entries) -> PayoffMatrix:
    """Build an m-by-n payoff matrix from entries given in row-major order."""
    if m < 1 or n < 1:
        raise DimensionMismatchError("both players need at least one action")
    a = np.asarray(entries, dtype=np.float64)
    if a.size != m * n:
        raise DimensionMismatchError(f"expected {m * n} entries, got {a.size}")
    return PayoffMatrix(a.reshape(m, n))


def adversarial_matrix(m: int, n: int, delta: float) -> PayoffMatrix:
    """Instance whose unique equilibrium puts both players on action 1.

    Entry (1, j) is delta for j != 1, entry (i, 1) is -delta for i != 1, and
    everything else (including the corner) is 0. Against it, any learner's
    per-round gain gap between action 1 and any other action is exactly delta
    no matter what the opponent plays, which makes regret trajectories
    predictable in closed form.
    """
    if m < 2 or n < 2:
        raise TooFewActionsError("adversarial instance needs m >= 2 and n >= 2")
    if not (0.0 < delta <= 1.0):
        raise InvalidDeltaError(f"delta must lie in (0, 1], got {delta}")
    a = np.zeros((m, n))
    a[0, 1:] = delta
    a[1:, 0] = -delta
    return PayoffMatrix(a)


def matching_pennies() -> PayoffMatrix:
    return PayoffMatrix(np.array([[1.0, -1.0], [-1.0, 1.0]]))


def gradients(payoffs: PayoffMatrix, x: np.ndarray, y: np.ndarray):
    """Per-round feedback (gain vector for the row player, loss vector for the column player)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != (payoffs.m,) or y.shape != (payoffs.n,):
        raise DimensionMismatchError(
            f"strategies of shapes {x.shape}/{y.shape} do not match a {payoffs.m}x{payoffs.n} game"
        )
    return payoffs.entries @ y, payoffs.entries.T @ x


@dataclass(frozen=True)
class MatchTrace:
    """Full per-round record of a match: strategies and both feedback vectors.

    Row i holds round t = i + 1.
    """

    payoffs: PayoffMatrix
    x: np.ndarray
    y: np.ndarray
    gains: np.ndarray
    losses: np.ndarray

    @property
    def horizon(self) -> int:
        return self.x.shape[0]


def play_match(
    payoffs: PayoffMatrix,
    x_learner,
    y_learner,
    horizon: int,
    observer: Observer | None = None,
    record: bool = True,
) -> MatchTrace | None:
    """Run the uncoupled repeated game for `horizon` rounds.

    Each round both learners commit a strategy, then the row learner observes
    the gain vector and the column learner observes the negated loss vector
    (so one learner implementation serves both roles). `observer`, if given,
    is called with (t, x, y, gains, losses) before the learners update; with
    record=False no trace is kept and None is returned (memory mode).
    """
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")
    if x_learner.dim != payoffs.m or y_learner.dim != payoffs.n:
        raise DimensionMismatchError(
            f"learner dims {x_learner.dim}/{y_learner.dim} do not match a "
            f"{payoffs.m}x{payoffs.n} game"
        )
    a = payoffs.entries
    if record:
        xs = np.empty((horizon, payoffs.m))
        ys = np.empty((horizon, payoffs.n))
        gs = np.empty((horizon, payoffs.m))
        ls = np.empty((horizon, payoffs.n))
    for t in range(1, horizon + 1):
        x = x_learner.next_strategy()
        y = y_learner.next_strategy()
        g = a @ y
        loss = a.T @ x
        if record:
            xs[t - 1] = x
            ys[t - 1] = y
            gs[t - 1] = g
            ls[t - 1] = loss
        if observer is not None:
            observer(t, x, y, g, loss)
        x_learner.observe(g)
        y_learner.observe(-loss)
    if not record:
        return None
    return MatchTrace(payoffs, xs, ys, gs, ls)


def load_matrix_file(path) -> PayoffMatrix:
    """Read a matrix file: a 'm n' header line, then m rows of n reals.

    Blank lines and lines starting with '#' are skipped; '#' also starts a
    trailing comment on any line.
    """
    text = Path(path).read_text()
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        rows.append((lineno, line.split()))
    if not rows:
        raise MatrixFormatError("matrix file has no content")
    header_line, header = rows[0]
    if len(header) != 2:
        raise MatrixFormatError(f"line {header_line}: header must be 'm n'")
    try:
        m, n = int(header[0]), int(header[1])
    except ValueError:
        raise MatrixFormatError(f"line {header_line}: header must hold two integers") from None
    if m < 1 or n < 1:
        raise MatrixFormatError(f"line {header_line}: dimensions must be >= 1")
    body = rows[1:]
    if len(body) != m:
        raise MatrixFormatError(f"expected {m} matrix rows, found {len(body)}")
    out = np.empty((m, n))
    for i, (lineno, fields) in enumerate(body):
        if len(fields) != n:
            raise MatrixFormatError(f"line {lineno}: expected {n} values, found {len(fields)}")
        try:
            out[i] = [float(v) for v in fields]
        except ValueError:
            raise MatrixFormatError(f"line {lineno}: non-numeric value") from None
    return PayoffMatrix(out)
