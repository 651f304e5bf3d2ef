"""Adaptive Simpson quadrature with a global relative tolerance."""
from __future__ import annotations

import numpy as np

MAX_DEPTH = 60


class QuadratureError(RuntimeError):
    pass


def adaptive_simpson(f, a: float, b: float, rel_tol: float = 1e-8, panels: int = 256,
                     max_depth: int = MAX_DEPTH) -> float:
    """Integrate a vectorised ``f`` over ``[a, b]``.

    The interval is cut into ``panels`` equal pieces (so narrow features are
    seen), then every piece is bisected until the Richardson error estimate
    ``|S_left + S_right - S| / 15`` is below its share of ``rel_tol * |I|``.
    Active panels are processed as one batch per depth.
    """
    if not b > a:
        return 0.0
    edges = np.linspace(a, b, panels + 1)
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    vals = np.asarray(f(np.concatenate([lo, mid, hi[-1:]])), dtype=float)
    f_lo = vals[:panels]
    f_mid = vals[panels:2 * panels]
    f_hi = np.concatenate([f_lo[1:], vals[-1:]])
    whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi)
    scale = abs(float(whole.sum()))
    tol = np.full(panels, rel_tol * scale / panels)

    total = 0.0
    depth = 0
    while len(lo):
        if depth > max_depth:
            raise QuadratureError(f"no convergence within depth {max_depth}")
        q1, q3 = 0.5 * (lo + mid), 0.5 * (mid + hi)
        fv = np.asarray(f(np.concatenate([q1, q3])), dtype=float)
        f_q1, f_q3 = fv[: len(lo)], fv[len(lo):]
        left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_q1 + f_mid)
        right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_q3 + f_hi)
        err = left + right - whole
        done = np.abs(err) <= 15.0 * tol
        total += float(np.sum((left + right + err / 15.0)[done]))
        keep = ~done
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        f_lo, f_q1, f_mid, f_q3, f_hi = f_lo[keep], f_q1[keep], f_mid[keep], f_q3[keep], f_hi[keep]
        left, right, tol = left[keep], right[keep], tol[keep] / 2.0
        lo, mid, hi = (np.concatenate([lo, mid]), np.concatenate([q1[keep], q3[keep]]),
                       np.concatenate([mid, hi]))
        f_lo, f_mid, f_hi = (np.concatenate([f_lo, f_mid]), np.concatenate([f_q1, f_q3]),
                             np.concatenate([f_mid, f_hi]))
        whole = np.concatenate([left, right])
        tol = np.concatenate([tol, tol])
        depth += 1
    return total
