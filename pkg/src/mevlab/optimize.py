"""Derivative-free maximizers used by every fitting routine.

Objectives are allowed to return -inf (or nan, treated the same) anywhere:
censored and bias-corrected likelihoods do so at extreme dependence values.
The scalar search therefore starts from a finite probe grid and keeps the
search bracket inside the finite region instead of raising.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import EstimationError, UsageError

_GOLDEN = 0.5 * (3.0 - math.sqrt(5.0))  # minimizing-side golden ratio step


@dataclass(frozen=True)
class OptimResult:
    argmax: np.ndarray
    value: float
    iterations: int
    converged: bool
    diagnostics: str

    @property
    def x(self) -> float:
        """Scalar argmax convenience accessor."""
        return float(np.atleast_1d(self.argmax)[0])


def _safe(f):
    def g(x):
        v = f(x)
        if v is None or math.isnan(v):
            return -math.inf
        return v

    return g


def maximize_scalar(f, lo, hi, tol=1e-6, probes=33, maxiter=200) -> OptimResult:
    """Maximize f on [lo, hi] by golden-section with parabolic acceleration.

    A uniform probe grid locates the finite region and a starting bracket;
    -inf probes simply shrink the bracket.  For a unimodal objective the
    returned argmax is within `tol` of the true one.
    """
    if not lo < hi:
        raise UsageError("need lo < hi")
    f = _safe(f)
    grid = np.linspace(lo, hi, probes)
    vals = np.array([f(x) for x in grid])
    if not np.any(np.isfinite(vals)):
        raise EstimationError("objective is -inf on the whole probe grid")
    best = int(np.argmax(vals))
    a = grid[max(best - 1, 0)]
    b = grid[min(best + 1, probes - 1)]
    # golden/parabolic interior point bookkeeping (Brent-style, maximizing)
    x = grid[best]
    fx = vals[best]
    w, fw = x, fx  # second best
    v, fv = x, fx  # previous second best
    d = e = b - a
    it = 0
    while it < maxiter:
        m = 0.5 * (a + b)
        tol1 = tol * abs(x) + 1e-12
        tol2 = 2.0 * tol1
        if abs(x - m) <= tol2 - 0.5 * (b - a):
            break
        use_golden = True
        if abs(e) > tol1:
            # parabola through (x, w, v)
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            e_prev = e
            e = d
            if abs(p) < abs(0.5 * q * e_prev) and q * (a - x) < p < q * (b - x):
                d = p / q
                u = x + d
                if u - a < tol2 or b - u < tol2:
                    d = tol1 if x < m else -tol1
                use_golden = False
        if use_golden:
            e = (b if x < m else a) - x
            d = _GOLDEN * e
        u = x + (d if abs(d) >= tol1 else (tol1 if d > 0 else -tol1))
        fu = f(u)
        it += 1
        if fu >= fx:
            if u < x:
                b = x
            else:
                a = x
            v, fv, w, fw, x, fx = w, fw, x, fx, u, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if not math.isfinite(fu):
                continue
            if fu >= fw or w == x:
                v, fv, w, fw = w, fw, u, fu
            elif fu >= fv or v == x or v == w:
                v, fv = u, fu
    converged = it < maxiter
    note = "ok"
    if x - lo <= 10 * tol or hi - x <= 10 * tol:
        note = "argmax at or near a bound"
    if not converged:
        note = "iteration cap reached"
    return OptimResult(
        argmax=np.array([x]), value=fx, iterations=it, converged=converged,
        diagnostics=note,
    )


def maximize_simplex(f, x0, scale, tol=1e-8, maxiter=2000) -> OptimResult:
    """Nelder-Mead maximization from x0 with per-coordinate initial steps.

    The returned value is never below f(x0).  Terminates when the simplex
    diameter and the value spread both fall under `tol`, or at the iteration
    cap (reported as non-converged).
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    scale = np.broadcast_to(np.asarray(scale, dtype=float), (n,)).copy()
    f = _safe(f)
    f0 = f(x0)
    if not math.isfinite(f0):
        raise EstimationError("objective not finite at the starting point")

    pts = [x0]
    for i in range(n):
        step = scale[i] if scale[i] != 0.0 else 1e-4
        e = x0.copy()
        e[i] += step
        pts.append(e)
    pts = np.array(pts)
    vals = np.array([f0] + [f(p) for p in pts[1:]])

    alpha_r, gamma_e, rho_c, sigma_s = 1.0, 2.0, 0.5, 0.5
    it = 0
    while it < maxiter:
        order = np.argsort(-vals)  # descending: best first
        pts, vals = pts[order], vals[order]
        diam = np.max(np.abs(pts[1:] - pts[0]))
        spread = vals[0] - vals[-1]
        if diam < tol and (not math.isfinite(spread) or spread < max(tol, tol * abs(vals[0]))):
            break
        it += 1
        centroid = pts[:-1].mean(axis=0)
        worst = pts[-1]
        xr = centroid + alpha_r * (centroid - worst)
        fr = f(xr)
        if fr > vals[0]:
            xe = centroid + gamma_e * (xr - centroid)
            fe = f(xe)
            if fe > fr:
                pts[-1], vals[-1] = xe, fe
            else:
                pts[-1], vals[-1] = xr, fr
        elif fr > vals[-2]:
            pts[-1], vals[-1] = xr, fr
        else:
            # failed contractions shrink the whole simplex, so flat or tied
            # objectives still terminate
            if fr > vals[-1]:
                xc = centroid + rho_c * (xr - centroid)
                fc = f(xc)
                accept = fc >= fr
            else:
                xc = centroid + rho_c * (worst - centroid)
                fc = f(xc)
                accept = fc > vals[-1]
            if accept:
                pts[-1], vals[-1] = xc, fc
            else:
                for i in range(1, n + 1):
                    pts[i] = pts[0] + sigma_s * (pts[i] - pts[0])
                    vals[i] = f(pts[i])
    order = np.argsort(-vals)
    pts, vals = pts[order], vals[order]
    converged = it < maxiter
    return OptimResult(
        argmax=pts[0], value=float(vals[0]), iterations=it, converged=converged,
        diagnostics="ok" if converged else "iteration cap reached",
    )
