"""Derivative-free minimization by the Nelder-Mead simplex method.

Self-contained and fully deterministic: ties in the vertex ordering are
broken by insertion order, random multi-start points come from a seeded
generator, and no global state is consulted. Bounds are enforced by
clamping trial points onto the box, which keeps the simplex inside the
feasible region without penalty terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEGENERATE_VOLUME = 1e-30


@dataclass(frozen=True)
class SimplexConfig:
    """Coefficients and stopping rules.

    Termination requires both the objective spread across the simplex to
    fall below the f tolerance and the vertex diameter to fall below
    x_tol; either alone can trigger far from a minimum on flat or steep
    objectives. The f tolerance is max(f_tol, f_tol_rel * |best f|): the
    absolute part governs objectives of order one, while the relative
    part lets objectives far from unit scale terminate at their own
    roundoff floor instead of chasing an absolute spread their evaluation
    noise can never reach. initial_step may be a scalar or a
    per-dimension sequence.
    """

    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    f_tol: float = 1e-12
    f_tol_rel: float = 4e-12
    x_tol: float = 1e-10
    max_iter: int = 5000
    initial_step: float | tuple[float, ...] = 0.1

    def __post_init__(self):
        if self.reflection <= 0.0:
            raise ValueError("reflection coefficient must be > 0")
        if self.expansion <= 1.0:
            raise ValueError("expansion coefficient must be > 1")
        if not 0.0 < self.contraction < 1.0:
            raise ValueError("contraction coefficient must be in (0, 1)")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError("shrink coefficient must be in (0, 1)")
        if self.f_tol <= 0.0 or self.x_tol <= 0.0:
            raise ValueError("tolerances must be > 0")
        if not 0.0 <= self.f_tol_rel < 1.0:
            raise ValueError("f_tol_rel must be in [0, 1)")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        steps = np.atleast_1d(np.asarray(self.initial_step, dtype=float))
        if np.any(~np.isfinite(steps)) or np.any(steps <= 0.0):
            raise ValueError("initial_step entries must be finite and > 0")


@dataclass(frozen=True)
class Bounds:
    """Coordinate box; entries may be -inf/+inf for unbounded directions."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("lower and upper must be 1-d arrays of equal length")
        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)):
            raise ValueError("bounds must not contain NaN")
        if np.any(lower > upper):
            raise ValueError("every lower bound must be <= its upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def box(cls, pairs) -> "Bounds":
        arr = np.asarray(pairs, dtype=float)
        return cls(arr[:, 0], arr[:, 1])

    @classmethod
    def unbounded(cls, dim: int) -> "Bounds":
        return cls(np.full(dim, -np.inf), np.full(dim, np.inf))

    def clamp(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper)))


@dataclass
class OptResult:
    """Outcome of one minimization.

    f is the objective re-evaluated at x on return. restarts_used counts
    recoveries from a degenerate (volume-collapsed) simplex.
    """

    x: np.ndarray = field(repr=False)
    f: float
    iterations: int
    converged: bool
    restarts_used: int


def _steps_for(config: SimplexConfig, dim: int) -> np.ndarray:
    steps = np.atleast_1d(np.asarray(config.initial_step, dtype=float))
    if steps.size == 1:
        return np.full(dim, float(steps[0]))
    if steps.size != dim:
        raise ValueError(f"initial_step has {steps.size} entries for dimension {dim}")
    return steps.astype(float)


def _build_simplex(base: np.ndarray, steps: np.ndarray, bounds: Bounds) -> np.ndarray:
    dim = base.size
    verts = np.tile(base, (dim + 1, 1))
    for i in range(dim):
        trial = base.copy()
        trial[i] += steps[i]
        trial = bounds.clamp(trial)
        if trial[i] == base[i]:
            # step left the box; try the other direction
            trial[i] = base[i] - steps[i]
            trial = bounds.clamp(trial)
        verts[i + 1] = trial
    return verts


def _volume(verts: np.ndarray) -> float:
    dim = verts.shape[1]
    edges = verts[1:] - verts[0]
    det = np.linalg.det(edges)
    return abs(det) / math.factorial(dim)


def nelder_mead(objective, x0, config: SimplexConfig | None = None,
                bounds: Bounds | None = None) -> OptResult:
    """Minimize objective from the starting point x0.

    Non-finite objective values are treated as +inf so the simplex backs
    away from them. A simplex whose volume collapses below
    DEGENERATE_VOLUME while its diameter is still well above x_tol has
    lost a search direction (typically by flattening against a bound or
    along a valley); it is rebuilt around the best vertex at its own
    current scale, and each rebuild counts in restarts_used. Collapse at
    convergence scale is not degeneracy, it is the normal endgame, so no
    restart fires there. Iterations are bounded by config.max_iter
    regardless of restarts.
    """
    cfg = config if config is not None else SimplexConfig()
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    dim = x0.size
    if dim < 1:
        raise ValueError("x0 must have at least one coordinate")
    box = bounds if bounds is not None else Bounds.unbounded(dim)
    if box.lower.size != dim:
        raise ValueError(f"bounds dimension {box.lower.size} != x0 dimension {dim}")
    steps = _steps_for(cfg, dim)

    def feval(x: np.ndarray) -> float:
        v = float(objective(x))
        return v if math.isfinite(v) else math.inf

    verts = _build_simplex(box.clamp(x0), steps, box)
    fvals = np.array([feval(v) for v in verts])

    iterations = 0
    restarts = 0
    converged = False
    # each rebuild must pay for itself: no further restart until the best
    # value has improved since the previous one by more than the f
    # tolerance, so evaluation noise cannot arm restarts indefinitely
    restart_gate = math.inf

    while iterations < cfg.max_iter:
        order = np.argsort(fvals, kind="stable")
        verts = verts[order]
        fvals = fvals[order]

        f_spread = fvals[-1] - fvals[0]
        diameter = float(np.max(np.abs(verts[1:] - verts[0]))) if dim else 0.0
        f_goal = max(cfg.f_tol, cfg.f_tol_rel * abs(fvals[0]))
        if f_spread < f_goal and diameter < cfg.x_tol:
            converged = True
            break

        # degenerate = the simplex has lost a search direction: its volume
        # is both absolutely negligible and vanishing relative to its own
        # extent (a healthy simplex near convergence shrinks isotropically
        # and keeps the relative volume of order one). Re-inflate at the
        # current scale; a fixed-size rebuild would fight bound clamping
        # forever on boundary optima.
        volume = _volume(verts)
        gate_margin = (
            max(cfg.f_tol, cfg.f_tol_rel * abs(restart_gate))
            if math.isfinite(restart_gate)
            else 0.0
        )
        if (
            volume < DEGENERATE_VOLUME
            and volume < 1e-6 * diameter**dim / math.factorial(dim)
            and fvals[0] < restart_gate - gate_margin
        ):
            restart_gate = fvals[0]
            verts = _build_simplex(verts[0], np.full(dim, 0.5 * diameter), box)
            fvals = np.array([feval(v) for v in verts])
            restarts += 1
            iterations += 1
            continue

        iterations += 1
        centroid = verts[:-1].mean(axis=0)
        xr = box.clamp(centroid + cfg.reflection * (centroid - verts[-1]))
        fr = feval(xr)

        if fr < fvals[0]:
            xe = box.clamp(centroid + cfg.expansion * (xr - centroid))
            fe = feval(xe)
            if fe < fr:
                verts[-1], fvals[-1] = xe, fe
            else:
                verts[-1], fvals[-1] = xr, fr
        elif fr < fvals[-2]:
            verts[-1], fvals[-1] = xr, fr
        else:
            if fr < fvals[-1]:
                xc = box.clamp(centroid + cfg.contraction * (xr - centroid))
                fc = feval(xc)
                accept = fc <= fr
            else:
                xc = box.clamp(centroid + cfg.contraction * (verts[-1] - centroid))
                fc = feval(xc)
                accept = fc < fvals[-1]
            if accept:
                verts[-1], fvals[-1] = xc, fc
            else:
                for i in range(1, dim + 1):
                    verts[i] = box.clamp(verts[0] + cfg.shrink * (verts[i] - verts[0]))
                    fvals[i] = feval(verts[i])

    order = np.argsort(fvals, kind="stable")
    best = verts[order[0]].copy()
    return OptResult(
        x=best,
        f=feval(best),
        iterations=iterations,
        converged=converged,
        restarts_used=restarts,
    )


def multi_start(objective, bounds: Bounds, n_starts: int, seed,
                config: SimplexConfig | None = None) -> OptResult:
    """Run nelder_mead from n_starts seeded uniform points in a finite box
    and return the best run.

    The returned x, f and converged flag belong to the winning run (ties
    on f go to the earliest start); iterations and restarts_used are
    totals over all runs. With n_starts = 1 this is exactly nelder_mead
    from the single seeded point.
    """
    if not bounds.is_finite():
        raise ValueError("multi_start requires finite bounds")
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    rng = np.random.default_rng(seed)
    dim = bounds.lower.size
    starts = bounds.lower + rng.random((n_starts, dim)) * (bounds.upper - bounds.lower)

    best: OptResult | None = None
    total_iterations = 0
    total_restarts = 0
    for x0 in starts:
        res = nelder_mead(objective, x0, config, bounds)
        total_iterations += res.iterations
        total_restarts += res.restarts_used
        if best is None or res.f < best.f:
            best = res
    assert best is not None
    return OptResult(
        x=best.x,
        f=best.f,
        iterations=total_iterations,
        converged=best.converged,
        restarts_used=total_restarts,
    )
