"""Derivative-free one-dimensional maximization."""

import math

INVPHI = (math.sqrt(5) - 1) / 2


def golden_section_max(f, lo, hi, tol=1e-9, max_iter=500):
    """Maximize a unimodal ``f`` on ``[lo, hi]``.

    Returns ``(x, f(x))`` once the bracket is narrower than ``tol``.
    """
    if hi < lo:
        lo, hi = hi, lo
    x1 = hi - INVPHI * (hi - lo)
    x2 = lo + INVPHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INVPHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INVPHI * (hi - lo)
            f2 = f(x2)
    x = 0.5 * (lo + hi)
    return x, f(x)


def scan_then_golden(f, lo, hi, step, tol=1e-9):
    """Coarse scan at ``step`` to bracket the maximum, then golden-section."""
    n = max(int(round((hi - lo) / step)), 1)
    grid = [lo + (hi - lo) * i / n for i in range(n + 1)]
    vals = [f(x) for x in grid]
    best = max(range(len(grid)), key=vals.__getitem__)
    a = grid[max(best - 1, 0)]
    b = grid[min(best + 1, n)]
    return golden_section_max(f, a, b, tol)
