"""The Hopf curve Σ = {Δ = 0} in the (k1, k2) plane and its c2 family.

Σ is traced as a graph over k1: for each k1 the root k2 of Δ(k1, ·, c2)
in (0, k1] is bracketed on a log-spaced scan and polished with Brent's
method. The diagonal k1 = k2 meets Σ in two points for small c2; the
two merge at a tangency point T for a critical c2 and vanish beyond it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial

import numpy as np
from scipy.optimize import brentq

from .exceptions import ConvergenceError, DegeneracyError, DomainError
from .hopf import classify_l1, lyapunov_l1, omega0_at
from .model import TABLE_VALUES, k1_max, table_params
from .stability import delta_at_A4, delta_gradient, delta_scale

#: Interaction coefficients of the Hopf point Q, rounded to five decimals.
Q_ROUNDED = (0.00331, 0.00100)

_SCAN_POINTS = 256
_SIGN = {"subcritical": "+", "supercritical": "-", "degenerate": "0"}


@dataclass(frozen=True)
class CurvePoint:
    k1: float
    k2: float
    omega0: float
    l1_sign: str
    delta_residual: float
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class TangencyResult:
    c2_star: float
    T: tuple
    gradient: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def delta_of(k1: float, k2: float, c2: float = TABLE_VALUES["c2"]) -> float:
    """Δ at the coexistence equilibrium for the table parameters with (k1, k2, c2)."""
    return delta_at_A4(table_params(k1, k2, c2))


def delta_denominator(k1: float, k2: float, c2: float = TABLE_VALUES["c2"]) -> float:
    """Common denominator of the A4 coordinates; Δ times its 4th power is polynomial."""
    t = TABLE_VALUES
    return t["alpha1"] ** 2 * t["phi1"] * t["phi2"] + t["mu1"] ** 2 * t["c1"] * c2 * k1 * k2


# (power of c2 k1, power of k2, coefficient) of Δ·den^4 for the table values,
# rounded to four significant digits.
_ROUNDED_TERMS = (
    (0, 0, 1699.422), (1, 0, 2337.623), (0, 1, 6.860e7), (2, 0, 1114.941),
    (0, 2, 2.175e12), (1, 1, 4.994e8), (3, 0, 214.747), (2, 1, 4.079e8),
    (1, 2, 1.529e13), (3, 1, 7.809e7), (2, 2, 4.319e13), (1, 3, 1.540e17),
    (4, 1, 4.755e6), (3, 2, 1.752e13), (2, 3, 6.741e17), (4, 2, -2.940e10),
    (3, 3, 1.703e18), (2, 4, -1.634e22), (4, 3, -6.618e16), (3, 4, 4.437e22),
    (4, 4, -1.643e21),
)


def rounded_delta_polynomial(k1: float, k2: float, c2: float = TABLE_VALUES["c2"]):
    """Four-digit polynomial approximation of ``Δ · den^4``.

    Returns ``(value, scale)`` where ``scale`` is the sum of the absolute
    values of the terms; rounding errors are relative to ``scale``, not to
    ``value``, which vanishes on Σ. Used only as a cross-check.
    """
    terms = np.array([c * (c2 * k1) ** i * k2**j for i, j, c in _ROUNDED_TERMS])
    return float(terms.sum()), float(np.abs(terms).sum())


def _check_k1(k1: float, c2: float) -> float:
    if not k1 > 0:
        raise DomainError(f"k1 = {k1:.6g} must be positive")
    bound = k1_max(table_params(k1, k1, c2))
    if not k1 < bound:
        raise DomainError(f"k1 = {k1:.6g} outside (0, k1_max = {bound:.6g}) for c2 = {c2:g}")
    return bound


def _sign_changes(f, grid):
    values = np.array([f(x) for x in grid])
    signs = np.sign(values)
    idx = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    exact = [grid[i] for i in np.nonzero(values == 0)[0]]
    return values, [(grid[i], grid[i + 1]) for i in idx], exact


def _curve_point(k1: float, k2: float, c2: float, diagnostics: dict) -> CurvePoint:
    p = table_params(k1, k2, c2)
    band = 1e-8
    report = lyapunov_l1(p, sigma_band=band, with_transversality=False)
    return CurvePoint(k1, k2, omega0_at(p, sigma_band=band), _SIGN[classify_l1(report.l1, 0.0)],
                      delta_at_A4(p), diagnostics)


def solve_sigma_k2(k1: float, c2: float = TABLE_VALUES["c2"]) -> CurvePoint | None:
    """The point of Σ above ``k1``: root ``k2`` in (0, k1] of Δ(k1, ·, c2).

    Returns ``None`` when Δ does not change sign on (0, k1]. With several
    sign changes the smallest root is returned and ``diagnostics["roots"]``
    records how many brackets were found.
    """
    _check_k1(k1, c2)
    grid = np.geomspace(k1 * 1e-8, k1, _SCAN_POINTS)
    f = lambda k2: delta_of(k1, k2, c2)
    _, brackets, exact = _sign_changes(f, grid)
    roots = [brentq(f, a, b, xtol=1e-15, rtol=1e-14) for a, b in brackets] + exact
    if not roots:
        return None
    roots.sort()
    k2 = roots[0]
    diagnostics = {"roots": len(roots), "scale": delta_scale(table_params(k1, k2, c2))}
    if len(roots) > 1:
        diagnostics["multiple"] = True
    return _curve_point(k1, k2, c2, diagnostics)


def _diagonal_grid(c2: float, n: int = 2048) -> np.ndarray:
    bound = k1_max(table_params(1e-6, 1e-6, c2))
    return np.geomspace(bound * 1e-6, bound * (1 - 1e-9), n)


def diagonal_roots(c2: float, n_scan: int = 2048) -> list[float]:
    """Roots of ``N(k1) = Δ(k1, k1, c2)`` on the scanned range (0, k1_max)."""
    f = lambda k: delta_of(k, k, c2)
    _, brackets, exact = _sign_changes(f, _diagonal_grid(c2, n_scan))
    return sorted([brentq(f, a, b, xtol=1e-16, rtol=1e-14) for a, b in brackets] + exact)


def _sigma_intervals(c2: float):
    bound = k1_max(table_params(1e-6, 1e-6, c2))
    edges = [0.0] + diagonal_roots(c2) + [bound]
    keep = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        if solve_sigma_k2(mid, c2) is not None:
            keep.append((lo, hi))
    return keep


def default_k1_grid(c2: float, n_points: int) -> np.ndarray:
    """About ``n_points`` k1 values spread over the ranges where Σ exists."""
    intervals = _sigma_intervals(c2)
    if not intervals:
        return np.empty(0)
    lengths = np.array([hi - lo for lo, hi in intervals])
    counts = np.maximum(2, np.round(n_points * lengths / lengths.sum()).astype(int))
    parts = []
    for (lo, hi), m in zip(intervals, counts):
        pad = 1e-9 * (hi - lo)
        parts.append(np.linspace(max(lo + pad, hi * 1e-9), hi - pad, m))
    return np.concatenate(parts)


def _solve_slice(k1, c2):
    return solve_sigma_k2(float(k1), c2)


def trace_sigma(c2: float = TABLE_VALUES["c2"], n_points: int = 200, k1_grid=None,
                executor=None) -> list[CurvePoint]:
    """Sample Σ for fixed ``c2``, ordered by k1.

    The default grid spans the parts of (0, k1_max) above which Σ exists,
    split at the diagonal roots. ``executor`` may be any object with a
    ``map`` method (e.g. a ``concurrent.futures`` pool) to solve slices in
    parallel; the result order does not depend on it.
    """
    if n_points < 2:
        raise DomainError("n_points must be at least 2")
    grid = default_k1_grid(c2, n_points) if k1_grid is None else np.asarray(k1_grid, dtype=float)
    solve = partial(_solve_slice, c2=c2)
    results = list(executor.map(solve, grid)) if executor is not None else [solve(k) for k in grid]
    return sorted((r for r in results if r is not None), key=lambda r: r.k1)


def gradient_delta(k1: float, k2: float, c2: float = TABLE_VALUES["c2"]) -> np.ndarray:
    """``(dΔ/dk1, dΔ/dk2)`` by Richardson-extrapolated central differences."""
    return delta_gradient(table_params(k1, k2, c2))


def _n_and_slope(k1: float, c2: float):
    h = 1e-4 * k1
    n = lambda k: delta_of(k, k, c2)
    central = lambda s: (n(k1 + s) - n(k1 - s)) / (2 * s)
    return n(k1), (4 * central(h / 2) - central(h)) / 3


def _count_roots(c2: float) -> int:
    return len(diagonal_roots(c2))


def find_tangency(c2_lo: float = TABLE_VALUES["c2"], c2_hi: float = 1000.0,
                  max_newton: int = 30) -> TangencyResult:
    """Critical ``c2`` at which the diagonal k1 = k2 is tangent to Σ_c2.

    Bisection on c2 over the number of diagonal roots (2 below, 0 above)
    followed by Newton's method on ``{N = 0, dN/dk1 = 0}`` in (k1, c2),
    with ``N(k1, c2) = Δ(k1, k1, c2)``.
    """
    counts = (_count_roots(c2_lo), _count_roots(c2_hi))
    if counts != (2, 0):
        raise ConvergenceError(
            f"cannot bracket the tangency: {counts[0]} diagonal roots at c2={c2_lo:g}, "
            f"{counts[1]} at c2={c2_hi:g}")
    lo, hi = c2_lo, c2_hi
    while hi - lo > 1e-4:
        mid = 0.5 * (lo + hi)
        if _count_roots(mid) >= 2:
            lo = mid
        else:
            hi = mid
    k1 = float(np.mean(diagonal_roots(lo)))
    c2 = lo

    # Newton on scaled unknowns (k1 / k1_ref, c2 / c2_ref)
    k_ref, c_ref = k1, c2
    u = np.array([1.0, 1.0])

    def residual(v):
        n, slope = _n_and_slope(v[0] * k_ref, v[1] * c_ref)
        return np.array([n, slope * k_ref])

    history = []
    for it in range(max_newton):
        r = residual(u)
        history.append(float(np.abs(r).max()))
        jac = np.empty((2, 2))
        for j in range(2):
            e = np.zeros(2)
            e[j] = 1e-5
            jac[:, j] = (residual(u + e) - residual(u - e)) / 2e-5
        step = np.linalg.solve(jac, -r)
        u = u + step
        if np.abs(step).max() < 1e-12:
            break
    else:
        raise ConvergenceError(f"tangency Newton did not converge, residuals {history}")
    k1, c2 = u[0] * k_ref, u[1] * c_ref

    # d2c2/dk1^2 along N(k1, c2(k1)) = 0 at a critical point: -N_kk / N_c
    h = 1e-3 * k1
    n_kk = (delta_of(k1 + h, k1 + h, c2) - 2 * delta_of(k1, k1, c2) + delta_of(k1 - h, k1 - h, c2)) / h**2
    dc = 1e-4 * c2
    n_c = (delta_of(k1, k1, c2 + dc) - delta_of(k1, k1, c2 - dc)) / (2 * dc)
    curvature = -n_kk / n_c
    if not curvature < 0:
        raise DegeneracyError(f"tangency is not a maximum of c2 along the curve (d2c2/dk1^2 = {curvature:.3g})")

    bound = k1_max(table_params(k1, k1, c2))
    diagnostics = {
        "d2c2_dk1": curvature,
        "newton_residuals": history,
        "bracket": (lo, hi),
        "k1_max": bound,
        "scanned_range": (float(_diagonal_grid(c2)[0]), float(_diagonal_grid(c2)[-1])),
        "N": delta_of(k1, k1, c2),
    }
    return TangencyResult(float(c2), (float(k1), float(k1)), gradient_delta(k1, k1, c2), diagnostics)


def hopf_point_q(c2: float = TABLE_VALUES["c2"]) -> tuple[float, float]:
    """Q snapped onto Σ: k2 = 0.001 held fixed, k1 solved from Δ = 0 near 0.00331."""
    k2 = Q_ROUNDED[1]
    f = lambda k1: delta_of(k1, k2, c2)
    k1 = brentq(f, 0.0032, 0.0034, xtol=1e-18, rtol=1e-15)
    return float(k1), k2


def snap_to_sigma(k1: float, k2: float, c2: float = TABLE_VALUES["c2"], vary: str = "k1",
                  rel_window: float = 0.05) -> tuple[float, float]:
    """Move ``(k1, k2)`` onto Σ by solving Δ = 0 in one coordinate.

    The other coordinate is kept; the root is searched within
    ``rel_window`` of the starting value.
    """
    if vary not in ("k1", "k2"):
        raise DomainError(f"vary must be 'k1' or 'k2', not {vary!r}")
    start = k1 if vary == "k1" else k2
    if vary == "k1":
        f = lambda k: delta_of(k, k2, c2)
    else:
        f = lambda k: delta_of(k1, k, c2)
    grid = np.linspace(start * (1 - rel_window), start * (1 + rel_window), 65)
    _, brackets, exact = _sign_changes(f, grid)
    roots = [brentq(f, a, b, xtol=1e-18, rtol=1e-15) for a, b in brackets] + exact
    if not roots:
        raise ConvergenceError(f"no zero of Δ within {rel_window:.0%} of {vary} = {start:.6g}")
    root = float(min(roots, key=lambda r: abs(r - start)))
    return (root, k2) if vary == "k1" else (k1, root)
