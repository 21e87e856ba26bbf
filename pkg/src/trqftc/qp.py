"""Dense box-constrained convex quadratic programming."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray


class QPError(RuntimeError):
    pass


def solve_box_qp(
    H: NDArray[np.float64],
    g: NDArray[np.float64],
    lo: NDArray[np.float64],
    hi: NDArray[np.float64],
    x0: NDArray[np.float64] | None = None,
    max_iter: int | None = None,
    active0: NDArray[np.int64] | None = None,
) -> tuple[NDArray[np.float64], NDArray[np.float64], int]:
    """Minimize ``0.5 x'Hx + g'x`` subject to ``lo <= x <= hi``.

    Primal active-set method; ``H`` must be symmetric positive definite on
    every free subspace. Infinite bounds are allowed. ``active0`` guesses
    the active set (-1 lower, +1 upper, 0 free), e.g. from a neighbouring
    problem; wrong guesses are released by the multiplier test.

    Returns
    -------
    x : minimizer.
    grad : ``Hx + g`` at the minimizer (bound multipliers on the active set).
    iters : number of active-set iterations.
    """
    n = g.shape[0]
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if np.any(lo > hi):
        raise QPError("inconsistent bounds")
    x = np.clip(np.zeros(n) if x0 is None else np.asarray(x0, dtype=float), lo, hi)
    fixed = lo == hi
    # working set: -1 at lower bound, +1 at upper bound, 0 free
    ws = np.zeros(n, dtype=int)
    # start from the bounds the initial point already sits on
    if active0 is not None:
        guess_lo = (np.asarray(active0) < 0) & np.isfinite(lo)
        guess_hi = (np.asarray(active0) > 0) & np.isfinite(hi)
        x[guess_lo] = lo[guess_lo]
        x[guess_hi] = hi[guess_hi]
    ws[x == hi] = 1
    ws[x == lo] = -1
    ws[fixed] = -1
    max_iter = max_iter or 10 * n + 10

    for it in range(1, max_iter + 1):
        free = ws == 0
        grad = H @ x + g
        if free.any():
            Hf = H[np.ix_(free, free)]
            step = np.linalg.solve(Hf, -grad[free])
            xf = x[free]
            lo_f, hi_f = lo[free], hi[free]
            # largest feasible fraction of the step
            with np.errstate(divide="ignore", invalid="ignore"):
                t_hi = np.where(step > 0, (hi_f - xf) / step, np.inf)
                t_lo = np.where(step < 0, (lo_f - xf) / step, np.inf)
            t_bound = np.minimum(t_hi, t_lo)
            j = int(np.argmin(t_bound))
            tau = min(1.0, float(t_bound[j]))
            x[free] = xf + tau * step
            if tau < 1.0:
                idx = np.flatnonzero(free)[j]
                if step[j] > 0:
                    x[idx] = hi[idx]
                    ws[idx] = 1
                else:
                    x[idx] = lo[idx]
                    ws[idx] = -1
                continue
            grad = H @ x + g
        # multiplier check on releasable bounds
        viol = np.zeros(n)
        at_lo = (ws == -1) & ~fixed
        at_hi = ws == 1
        viol[at_lo] = np.maximum(0.0, -grad[at_lo])
        viol[at_hi] = np.maximum(0.0, grad[at_hi])
        k = int(np.argmax(viol))
        scale = 1.0 + float(np.max(np.abs(g)))
        if viol[k] <= 1e-12 * scale:
            return x, grad, it
        ws[k] = 0
    raise QPError(f"active-set iteration limit {max_iter} reached")
