"""Minimization of the regret-bound surfaces in log coordinates.

In the transformed coordinates each per-player bound is a posynomial, so in
log coordinates z = (log a_x, log a_y, log s_x, log s_y) it is a sum of
exponentials of affine functions: smooth, convex, with termwise gradients.
The solver is projected gradient descent with a backtracking line search;
max-type objectives are handled by log-sum-exp smoothing with a sharpening
continuation schedule followed by an exact-max readout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateGameError, InvalidGammaError
from .rates import (
    BoundInputs,
    RateParams,
    TransformedParams,
    from_transformed,
)


def _x_bound_terms(b: BoundInputs):
    """Posynomial table (coefficients, exponent rows) of the x-player bound."""
    m, n = b.log_m, b.log_n
    mp, np_ = b.log_m_plus, b.log_n_plus
    coefs = np.array([m, m, np_, m, m, mp, n, np_, m])
    expos = np.array(
        [
            [-1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
            [1.0, 1.0, 0.0, -1.0],
            [1.0, -1.0, 0.0, -1.0],
            [2.0, 0.0, 0.0, -1.0],
            [1.0, 0.0, 1.0, -1.0],
        ]
    )
    return coefs, expos


def _y_bound_terms(b: BoundInputs):
    """The y-player bound is the x-player bound with the roles mirrored."""
    coefs, expos = _x_bound_terms(BoundInputs(b.log_n, b.log_m))
    return coefs, expos[:, [1, 0, 3, 2]]


def _social_terms(b: BoundInputs):
    """The social bound at zero slack, a posynomial in (log a_x, log a_y) only."""
    coefs = np.array([b.log_m, b.log_n_plus, b.log_n, b.log_m_plus])
    expos = np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, -1.0], [0.0, 1.0]])
    return coefs, expos


# Worst-case coefficient posynomials of the cardinality-unaware tradeoff:
# the coefficients multiplying log m / log n inside each player's bound,
# written in the same four transformed coordinates. All coefficients are 1.
_COEF_TABLES = [
    # on log m inside the x bound: (1 + a_x/s_y)(1/a_x + a_y + s_x)
    np.array(
        [
            [-1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
            [1.0, 1.0, 0.0, -1.0],
            [1.0, 0.0, 1.0, -1.0],
        ]
    ),
    # on log n inside the x bound: (a_x/s_y)(1/a_y + a_x + s_y)
    np.array(
        [
            [1.0, -1.0, 0.0, -1.0],
            [2.0, 0.0, 0.0, -1.0],
            [1.0, 0.0, 0.0, 0.0],
        ]
    ),
    # on log m inside the y bound: (a_y/s_x)(1/a_x + a_y + s_x)
    np.array(
        [
            [-1.0, 1.0, -1.0, 0.0],
            [0.0, 2.0, -1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
        ]
    ),
    # on log n inside the y bound: (1 + a_y/s_x)(1/a_y + a_x + s_y)
    np.array(
        [
            [0.0, -1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0, 0.0],
            [1.0, 1.0, -1.0, 0.0],
            [0.0, 1.0, -1.0, 1.0],
        ]
    ),
]


def _eval_posy(coefs: np.ndarray, expos: np.ndarray, z: np.ndarray):
    terms = coefs * np.exp(expos @ z)
    return float(terms.sum()), expos.T @ terms


def eval_log_bounds(coords, b: BoundInputs):
    """Both bound surfaces and their analytic gradients at log coordinates.

    Returns (x_bound, y_bound, grad_x, grad_y) with coords ordered as
    (log a_x, log a_y, log s_x, log s_y).
    """
    z = np.asarray(coords, dtype=np.float64)
    if z.shape != (4,):
        raise ValueError(f"expected 4 log coordinates, got shape {z.shape}")
    bx, gx = _eval_posy(*_x_bound_terms(b), z)
    by, gy = _eval_posy(*_y_bound_terms(b), z)
    return bx, by, gx, gy


@dataclass(frozen=True)
class OptimizeOptions:
    max_iters: int = 20000
    grad_tol: float = 1e-8
    init_step: float = 1.0
    step_shrink: float = 0.5
    armijo: float = 1e-4
    coord_bound: float = 12.0
    # Sharpness schedule for smoothed max objectives.
    rho_stages: tuple = (10.0, 316.22776601683796, 1e4)


@dataclass(frozen=True)
class OptimizeResult:
    point: TransformedParams
    rates: RateParams
    x_bound: float
    y_bound: float
    objective_value: float
    iterations: int
    converged: bool


def _descend(fun, z0: np.ndarray, opts: OptimizeOptions):
    """Projected gradient descent with backtracking; keeps coords in a box.

    fun(z) -> (value, gradient). Returns (z, iterations, converged) where
    converged means the projected gradient vanished at an interior point; a
    stationary point pinned to the box reports converged=False.
    """
    lo, hi = -opts.coord_bound, opts.coord_bound
    z = np.clip(np.asarray(z0, dtype=np.float64), lo, hi)
    val, grad = fun(z)
    step = opts.init_step
    iters = 0
    stationary = False
    for iters in range(1, opts.max_iters + 1):
        proj_grad = z - np.clip(z - grad, lo, hi)
        if float(np.linalg.norm(proj_grad)) <= opts.grad_tol:
            stationary = True
            break
        step = min(step * 2.0, 1e6)
        while True:
            z_new = np.clip(z - step * grad, lo, hi)
            dz = z_new - z
            val_new, grad_new = fun(z_new)
            if val_new <= val + opts.armijo * float(grad @ dz):
                break
            step *= opts.step_shrink
            if step < 1e-18:
                return z, iters, False
        z, val, grad = z_new, val_new, grad_new
    at_box = bool(np.any((z <= lo + 1e-12) | (z >= hi - 1e-12)))
    return z, iters, stationary and not at_box


def _smoothed_max(tables, rho: float):
    """Log-sum-exp upper envelope of several posynomials, with gradient."""

    def fun(z):
        vals = []
        grads = []
        for coefs, expos in tables:
            v, g = _eval_posy(coefs, expos, z)
            vals.append(v)
            grads.append(g)
        vals = np.array(vals)
        top = vals.max()
        w = np.exp(rho * (vals - top))
        wsum = w.sum()
        value = top + math.log(wsum) / rho
        grad = sum(wi * gi for wi, gi in zip(w, grads)) / wsum
        return value, grad

    return fun


def _exact_max(tables, z):
    return max(_eval_posy(coefs, expos, z)[0] for coefs, expos in tables)


def _min_norm_hull(grads: np.ndarray) -> np.ndarray:
    """Minimum-norm point in the convex hull of a few gradient rows.

    Exact subset enumeration; fine for the handful of surfaces we ever
    stack. The norm of the result is the first-order residual of the
    pointwise-max objective: it vanishes exactly at a minimizer.
    """
    k = grads.shape[0]
    best = grads[0]
    best_sq = float(grads[0] @ grads[0])
    for mask in range(1, 1 << k):
        idx = [i for i in range(k) if mask >> i & 1]
        sub = grads[idx]
        gram = sub @ sub.T
        try:
            lam = np.linalg.solve(gram, np.ones(len(idx)))
        except np.linalg.LinAlgError:
            continue
        total = lam.sum()
        if total <= 0.0 or np.any(lam / total < -1e-12):
            continue
        point = sub.T @ (lam / total)
        sq = float(point @ point)
        if sq < best_sq:
            best_sq = sq
            best = point
    return best


def _polish_max(tables, z0, budget: int, opts: OptimizeOptions):
    """Descend the exact pointwise max along minimum-norm subgradients.

    Smoothing gets near the kink where the surfaces cross; this finishes
    the job on the unsmoothed max, where plain gradient descent stalls.
    """
    lo, hi = -opts.coord_bound, opts.coord_bound
    z = np.clip(np.asarray(z0, dtype=np.float64), lo, hi)
    step = opts.init_step
    iters = 0
    stationary = False
    for iters in range(1, max(budget, 1) + 1):
        evals = [_eval_posy(coefs, expos, z) for coefs, expos in tables]
        top = max(v for v, _ in evals)
        cut = top - 1e-9 * (1.0 + abs(top))
        active = np.stack([g for v, g in evals if v >= cut])
        p = _min_norm_hull(active)
        p_sq = float(p @ p)
        if math.sqrt(p_sq) <= opts.grad_tol * (1.0 + abs(top)):
            stationary = True
            break
        step = min(step * 2.0, 1e6)
        accepted = False
        while step >= 1e-18:
            z_new = np.clip(z - step * p, lo, hi)
            if _exact_max(tables, z_new) <= top - opts.armijo * step * p_sq:
                accepted = True
                break
            step *= opts.step_shrink
        if not accepted:
            # Line search hit float resolution; nothing further to gain.
            break
        z = np.clip(z - step * p, lo, hi)
    at_box = bool(np.any((z <= lo + 1e-12) | (z >= hi - 1e-12)))
    return z, iters, stationary and not at_box


def _minimize_smoothed_max(tables, z0, opts: OptimizeOptions):
    """Continuation over the sharpness schedule, then an exact-max polish.

    Stages run to a tolerance that tracks the smoothing error (1/rho),
    within a slice of the iteration budget; the polish consumes the rest
    and owns the convergence verdict. Returns the best point seen.
    """
    z = np.asarray(z0, dtype=np.float64)
    total_iters = 0
    stage_cap = max(100, opts.max_iters // 10)
    for rho in opts.rho_stages:
        stage_opts = OptimizeOptions(
            max_iters=min(stage_cap, opts.max_iters - total_iters),
            grad_tol=max(opts.grad_tol, 1.0 / rho),
            init_step=opts.init_step,
            step_shrink=opts.step_shrink,
            armijo=opts.armijo,
            coord_bound=opts.coord_bound,
            rho_stages=opts.rho_stages,
        )
        z, iters, _ = _descend(_smoothed_max(tables, rho), z, stage_opts)
        total_iters += iters
    z, iters, converged = _polish_max(
        tables, z, opts.max_iters - total_iters, opts
    )
    total_iters += iters
    return z, _exact_max(tables, z), total_iters, converged


def _default_start(b: BoundInputs) -> np.ndarray:
    return np.array(
        [
            0.5 * math.log(b.log_m / b.log_n_plus),
            0.5 * math.log(b.log_n / b.log_m_plus),
            0.0,
            0.0,
        ]
    )


def minimize(
    objective: str,
    b: BoundInputs,
    gamma: float | None = None,
    options: OptimizeOptions | None = None,
) -> OptimizeResult:
    """Minimize one of the bound objectives over the transformed points.

    objective is "social" (sum of the social terms), "weighted" (gamma times
    the x bound plus (1 - gamma) times the y bound; needs gamma in [0, 1]),
    or "max" (the worse of the two bounds). The social optimum sits at zero
    slack, where both individual bounds are infinite by design.
    """
    opts = options or OptimizeOptions()
    if b.log_m <= 0 or b.log_n <= 0:
        raise DegenerateGameError("bound objectives need m >= 2 and n >= 2")
    z0 = _default_start(b)

    if objective == "social":
        coefs, expos = _social_terms(b)
        z, iters, converged = _descend(
            lambda z2: _eval_posy(coefs, expos, z2), z0[:2], opts
        )
        point = TransformedParams(math.exp(z[0]), math.exp(z[1]), 0.0, 0.0)
        value = _eval_posy(coefs, expos, z)[0]
        return OptimizeResult(
            point=point,
            rates=from_transformed(point),
            x_bound=math.inf,
            y_bound=math.inf,
            objective_value=value,
            iterations=iters,
            converged=converged,
        )

    if objective == "weighted":
        if gamma is None or not (0.0 <= gamma <= 1.0):
            raise InvalidGammaError(f"gamma must lie in [0, 1], got {gamma}")
        cx, ex = _x_bound_terms(b)
        cy, ey = _y_bound_terms(b)

        def fun(z):
            vx, gx = _eval_posy(cx, ex, z)
            vy, gy = _eval_posy(cy, ey, z)
            return gamma * vx + (1.0 - gamma) * vy, gamma * gx + (1.0 - gamma) * gy

        z, iters, converged = _descend(fun, z0, opts)
        return _result_at(z, b, iters, converged, weight=gamma)

    if objective == "max":
        tables = [_x_bound_terms(b), _y_bound_terms(b)]
        z, _, iters, converged = _minimize_smoothed_max(tables, z0, opts)
        return _result_at(z, b, iters, converged)

    raise ValueError(f"unknown objective {objective!r}")


def _result_at(
    z: np.ndarray,
    b: BoundInputs,
    iters: int,
    converged: bool,
    weight: float | None = None,
) -> OptimizeResult:
    bx, by, _, _ = eval_log_bounds(z, b)
    value = max(bx, by) if weight is None else weight * bx + (1.0 - weight) * by
    point = TransformedParams(*(math.exp(v) for v in z))
    return OptimizeResult(
        point=point,
        rates=from_transformed(point),
        x_bound=bx,
        y_bound=by,
        objective_value=value,
        iterations=iters,
        converged=converged,
    )


def minimize_unaware_coefficients(options: OptimizeOptions | None = None):
    """Minimize the worst of the four size-independent bound coefficients.

    Returns (point, worst_coefficient). Whatever the action counts, each
    player's bound is at most (coefficient on log m) * log m +
    (coefficient on log n) * log n + O(1) at the returned point, and the
    worst coefficient is what this solves for. The optimum is 3*sqrt(3).
    """
    opts = options or OptimizeOptions()
    tables = [(np.ones(e.shape[0]), e) for e in _COEF_TABLES]
    z0 = np.zeros(4)
    z, best_val, _, _ = _minimize_smoothed_max(tables, z0, opts)
    point = TransformedParams(*(math.exp(v) for v in z))
    return point, best_val


def gradient_check(coords, b: BoundInputs, step: float = 1e-5) -> float:
    """Worst relative error between analytic and central-difference gradients."""
    z = np.asarray(coords, dtype=np.float64)
    if z.shape != (4,):
        raise ValueError(f"expected 4 log coordinates, got shape {z.shape}")
    if step <= 0:
        raise ValueError(f"step must be > 0, got {step}")
    worst = 0.0
    for coefs, expos in (_x_bound_terms(b), _y_bound_terms(b)):
        _, grad = _eval_posy(coefs, expos, z)
        for i in range(4):
            zp = z.copy()
            zp[i] += step
            zm = z.copy()
            zm[i] -= step
            fd = (_eval_posy(coefs, expos, zp)[0] - _eval_posy(coefs, expos, zm)[0]) / (
                2.0 * step
            )
            denom = max(1.0, abs(grad[i]), abs(fd))
            worst = max(worst, abs(fd - grad[i]) / denom)
    return worst
