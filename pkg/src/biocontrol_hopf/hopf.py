"""First Lyapunov coefficient by the projection method.

At a Hopf point with ``A q = iω0 q``, ``A^T p = -iω0 p`` and ``<p, q> = 1``::

    h11 = -A^{-1} B(q, conj(q))
    h20 = (2iω0 I - A)^{-1} B(q, q)
    G21 = <p, C(q, q, conj(q)) + B(conj(q), h20) + 2 B(q, h11)>
    l1  = Re(G21) / (2 ω0)

``l1 > 0`` means the Hopf point is unstable and the bifurcating cycle is
repelling (subcritical); ``l1 < 0`` gives an attracting cycle.
The magnitude of ``l1`` depends on how ``q`` is scaled; its sign does not.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from typing import Callable

import numpy as np

from .exceptions import ConsistencyError, DegeneracyError, NotOnSigmaError
from .model import ModelParams, bilinear_B, equilibria, jacobian, trilinear_C
from .settings import DEFAULT_TOLERANCES, ToleranceSettings
from .spectra import eigenpair_at, eigenvalues, normalize_phase, solve_shifted
from .stability import a_coefficients, delta_gradient


@dataclass(frozen=True)
class HopfReport:
    omega0: float
    q: np.ndarray
    p: np.ndarray
    h11: np.ndarray
    h20: np.ndarray
    G21: complex
    l1: float
    transversality: float | None = None
    normalization: str = "unit-norm"
    delta: float | None = None

    @property
    def criticality(self) -> str:
        return classify_l1(self.l1)


def classify_l1(l1: float, tol: float = DEFAULT_TOLERANCES.hopf_l1_tol) -> str:
    if l1 > tol:
        return "subcritical"
    if l1 < -tol:
        return "supercritical"
    return "degenerate"


def sigma_residual(p: ModelParams) -> float:
    """``Δ / (a1 a2 a3)``: zero exactly on the Hopf curve."""
    c = a_coefficients(p)
    return c.delta / abs(c.a1 * c.a2 * c.a3)


def _check_on_sigma(p: ModelParams, band: float):
    rel = sigma_residual(p)
    if abs(rel) > band:
        raise NotOnSigmaError(
            f"not on the Hopf curve: |Δ|/(a1 a2 a3) = {abs(rel):.3g} exceeds {band:.3g}")
    return rel


def omega0_at(p: ModelParams, sigma_band: float | None = None,
              tol: ToleranceSettings = DEFAULT_TOLERANCES) -> float:
    """Hopf frequency ``sqrt(a3 / a1)`` at a point on Σ.

    On Σ the quartic factors as ``(λ^2 + ω^2)(λ^2 + bλ + c)``, so
    ``a1 = b`` and ``a3 = b ω^2``.
    """
    band = tol.sigma_band if sigma_band is None else sigma_band
    _check_on_sigma(p, band)
    c = a_coefficients(p)
    ratio = c.a3 / c.a1
    if not ratio > 0:
        raise DegeneracyError(f"a3/a1 = {ratio:.6g} is not positive")
    omega = float(np.sqrt(ratio))
    if band <= tol.sigma_band:
        pair = eigenvalues(jacobian(p, equilibria(p).A4)).critical_pair()
        if abs(abs(pair.imag) - omega) > 1e-6:
            raise ConsistencyError(
                f"sqrt(a3/a1) = {omega:.10g} disagrees with eigenvalue {pair:.10g}")
    return omega


def omega0_from_a2_a4(p: ModelParams) -> float:
    """Hopf frequency from ``ω^4 - a2 ω^2 + a4 = 0`` (larger root).

    Independent of :func:`omega0_at`; agrees with it only on Σ.
    """
    c = a_coefficients(p)
    disc = c.a2**2 / 4 - c.a4
    return float(np.sqrt(c.a2 / 2 + np.sqrt(max(disc, 0.0))))


def lyapunov_from_forms(A, B: Callable, C: Callable | None = None, q=None,
                        omega0: float | None = None) -> HopfReport:
    """Projection-method coefficients for ``x' = A x + B(x,x)/2 + C(x,x,x)/6``.

    Parameters
    ----------
    A : (4, 4) array
        Jacobian at the equilibrium; must have a simple pair ``±iω0``.
    B, C : callable
        Multilinear forms of second and third derivatives.
    q : array, optional
        Right eigenvector to use instead of the unit-norm default.
    omega0 : float, optional
        Hopf frequency; defaults to ``Im`` of the critical eigenvalue of ``A``.
    """
    A = np.asarray(A, dtype=float)
    if omega0 is None:
        omega0 = abs(eigenvalues(A).critical_pair().imag)
    tag = "unit-norm" if q is None else "override"
    pair = eigenpair_at(A, 1j * omega0, q=q)
    q, p = pair.q, pair.p
    qb = np.conj(q)
    h11 = solve_shifted(A, 0.0, B(q, qb))
    try:
        h20 = solve_shifted(A, 2j * omega0, B(q, q))
    except Exception as exc:
        raise DegeneracyError(f"resonance: 2iω0 is an eigenvalue ({exc})") from exc
    cubic = np.zeros(4, dtype=complex) if C is None else C(q, q, qb)
    G21 = complex(np.vdot(p, cubic + B(qb, h20) + 2.0 * B(q, h11)))
    l1 = G21.real / (2.0 * omega0)
    return HopfReport(float(omega0), q, p, h11, h20, G21, float(l1), normalization=tag)


def lyapunov_l1(p: ModelParams, q_override=None, sigma_band: float | None = None,
                direction=None, with_transversality: bool = True,
                tol: ToleranceSettings = DEFAULT_TOLERANCES) -> HopfReport:
    """Hopf report at the coexistence equilibrium of ``p`` (which must lie on Σ).

    ``q_override`` replaces the default unit-norm eigenvector, e.g. to
    reproduce reference values computed with a different scaling of ``q``.
    """
    band = tol.sigma_band if sigma_band is None else sigma_band
    rel = _check_on_sigma(p, band)
    omega = omega0_at(p, sigma_band=band, tol=tol)
    A = jacobian(p, equilibria(p).A4)
    report = lyapunov_from_forms(A, partial(bilinear_B, p), trilinear_C, q=q_override, omega0=omega)
    trans = transversality_at(p, direction) if with_transversality else None
    return HopfReport(report.omega0, report.q, report.p, report.h11, report.h20, report.G21,
                      report.l1, trans, report.normalization, rel)


def track_eigenvalue(matrix_at: Callable[[float], np.ndarray], s: float, lam0: complex,
                     ambiguity: float = 0.5) -> complex:
    """Eigenvalue of ``matrix_at(s)`` nearest ``lam0`` (minimal-distance assignment)."""
    vals = eigenvalues(matrix_at(s)).values
    dist = np.sort(np.abs(vals - lam0))
    if dist[1] > 0 and dist[0] > ambiguity * dist[1]:
        raise DegeneracyError("eigenvalue tracking is ambiguous")
    return complex(vals[np.argmin(np.abs(vals - lam0))])


def crossing_speed(matrix_at: Callable[[float], np.ndarray], lam0: complex, h: float,
                   s0: float = 0.0, max_halvings: int = 6) -> float:
    """``d Re λ(s) / ds`` at ``s0`` for the eigenvalue branch through ``lam0``.

    Central differences at steps ``h`` and ``h/2`` combined by one Richardson
    extrapolation. The step is halved when branch tracking is ambiguous.
    """
    for _ in range(max_halvings):
        try:
            def central(step):
                up = track_eigenvalue(matrix_at, s0 + step, lam0)
                down = track_eigenvalue(matrix_at, s0 - step, lam0)
                return (up.real - down.real) / (2 * step)

            return float((4 * central(h / 2) - central(h)) / 3)
        except DegeneracyError:
            h /= 2
    raise DegeneracyError("could not track the critical eigenvalue pair")


def transversality_at(p: ModelParams, direction=None, rel_step: float = 1e-6) -> float:
    """Speed of the critical pair's real part along ``direction`` in (k1, k2).

    ``direction`` defaults to the unit gradient of Δ, along which the pair
    moves into the left half-plane, so the default value is negative at a
    transversal Hopf point.
    """
    if direction is None:
        direction = delta_gradient(p)
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    lam0 = eigenvalues(jacobian(p, equilibria(p).A4)).critical_pair()
    h = rel_step * max(p.k1, p.k2)

    def matrix_at(s):
        shifted = p.replace(k1=p.k1 + s * direction[0], k2=p.k2 + s * direction[1])
        return jacobian(shifted, equilibria(shifted).A4)

    return crossing_speed(matrix_at, lam0, h)


def classify_hopf(target, tol: float = DEFAULT_TOLERANCES.hopf_l1_tol, **kwargs) -> str:
    """``"subcritical"``, ``"supercritical"`` or ``"degenerate"``.

    ``target`` is a :class:`HopfReport` or a :class:`ModelParams` on Σ.
    """
    if isinstance(target, HopfReport):
        return classify_l1(target.l1, tol)
    report = lyapunov_l1(target, with_transversality=False, **kwargs)
    return classify_l1(report.l1, tol)


def principal_axes(q) -> np.ndarray:
    """Rephase ``q`` so that ``Re q`` and ``Im q`` are orthogonal, ``|Re q| >= |Im q|``."""
    q = np.asarray(q, dtype=complex)
    a, b = q.real, q.imag
    theta = 0.5 * np.arctan2(-2 * a @ b, a @ a - b @ b)
    r = q * np.exp(1j * theta)
    if np.linalg.norm(r.real) < np.linalg.norm(r.imag):
        r = r * 1j
    return r


__all__ = [
    "HopfReport", "classify_hopf", "classify_l1", "crossing_speed", "lyapunov_from_forms",
    "lyapunov_l1", "normalize_phase", "omega0_at", "omega0_from_a2_a4", "principal_axes",
    "sigma_residual", "track_eigenvalue", "transversality_at",
]
