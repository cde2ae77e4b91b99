"""Time integration, periodic orbits near the Hopf point, Floquet multipliers.

The integrator is the Dormand-Prince 5(4) pair with a PI step-size
controller and cubic Hermite dense output. Periodic orbits are located by
Newton shooting on a Poincaré section through the equilibrium; the
section normal is ``Im q`` of the critical eigenvector after rotating
``q`` so that its real and imaginary parts are orthogonal.

Shooting works in deviation coordinates ``y = x - x_eq``. Because the
model is quadratic, ``y' = A y + B(y, y) / 2`` holds exactly there, and
small cycles are not drowned in the size of the equilibrium itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import brentq

from .exceptions import (AccuracyError, DegeneracyError, DomainError, IntegrationError,
                         InvalidInputError, OrbitNotFoundError)
from .hopf import lyapunov_from_forms, principal_axes
from .model import ModelParams, bilinear_B, equilibria, jacobian
from .spectra import eigenpair_at, eigenvalues
from .stability import delta_at_A4

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4

_SAFETY = 0.9
_ALPHA = 0.7 / 5 - 0.75 * 0.04
_BETA = 0.04


@dataclass
class Trajectory:
    """Accepted integration points with derivatives for Hermite interpolation.

    ``stats`` holds ``steps`` (accepted), ``rejected`` and ``max_error``
    (largest accepted scaled error estimate, at most 1).
    """

    t: np.ndarray
    x: np.ndarray
    f: np.ndarray
    stats: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    @property
    def final(self) -> np.ndarray:
        return self.x[-1]

    def at(self, t: float) -> np.ndarray:
        """Cubic Hermite interpolant of the state at time ``t``."""
        if not self.t[0] <= t <= self.t[-1]:
            raise InvalidInputError(f"t = {t} outside [{self.t[0]}, {self.t[-1]}]")
        i = min(np.searchsorted(self.t, t, side="right") - 1, len(self.t) - 2)
        return hermite(self.t[i], self.x[i], self.f[i], self.t[i + 1], self.x[i + 1], self.f[i + 1], t)


def hermite(t0, y0, f0, t1, y1, f1, t):
    h = t1 - t0
    s = (t - t0) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s**2 * (3 - 2 * s)
    h11 = s**2 * (s - 1)
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


def dp_step(f: Callable, t: float, y: np.ndarray, h: float, f0: np.ndarray | None = None):
    """One Dormand-Prince step; returns ``(y_new, f_new, error_vector)``."""
    k = [f(t, y) if f0 is None else f0]
    for i in range(1, 7):
        yi = y + h * sum(a * kj for a, kj in zip(_A[i], k))
        k.append(f(t + _C[i] * h, yi))
    y_new = y + h * sum(b * kj for b, kj in zip(_B5[:6], k[:6]))
    err = h * sum(e * kj for e, kj in zip(_E, k))
    return y_new, k[6], err


def _initial_step(f0, y0, sc, h_max):
    d0 = np.sqrt(np.mean((y0 / sc) ** 2))
    d1 = np.sqrt(np.mean((f0 / sc) ** 2))
    h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    return min(h, h_max)


def solve_ode(f: Callable, t0: float, y0, t_end: float, rtol: float = 1e-9, atol=None,
              h0: float | None = None, max_steps: int = 1_000_000,
              on_step: Callable | None = None, record: bool = True) -> Trajectory:
    """Integrate ``y' = f(t, y)`` from ``t0`` to ``t_end`` with adaptive DP 5(4).

    Each accepted step satisfies ``|err_i| <= atol_i + rtol * max(|y_i|, |y_new_i|)``
    for the local error estimate. ``atol`` defaults to ``rtol``.

    ``on_step(t, y, fy, t_new, y_new, f_new)`` is called after every accepted
    step; a truthy return value stops the integration there.

    Raises
    ------
    IntegrationError
        On step-size underflow or a non-finite state.
    """
    if not rtol > 0:
        raise InvalidInputError(f"tolerance must be positive, got {rtol}")
    y = np.array(y0, dtype=float)
    atol = rtol if atol is None else atol
    atol = np.broadcast_to(np.asarray(atol, dtype=float), y.shape)
    t = float(t0)
    span = t_end - t0
    if span <= 0:
        raise InvalidInputError("t_end must exceed the start time")
    fy = f(t, y)
    h = h0 or _initial_step(fy, y, atol + rtol * np.abs(y), span)
    ts, ys, fs = [t], [y.copy()], [fy]
    steps = rejected = 0
    max_err = 0.0
    err_prev = 1e-4
    while t < t_end:
        if steps + rejected >= max_steps:
            raise IntegrationError(f"step budget of {max_steps} exhausted", t=t, state=y)
        h = min(h, t_end - t)
        if h <= 1e-14 * max(1.0, abs(t)):
            raise IntegrationError(f"step size underflow at t = {t:.6g}", t=t, state=y)
        with np.errstate(over="ignore", invalid="ignore"):
            y_new, f_new, err = dp_step(f, t, y, h, fy)
        if not np.all(np.isfinite(y_new)):
            rejected += 1
            h *= 0.25
            continue
        sc = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        en = float(np.sqrt(np.mean((err / sc) ** 2)))
        if en <= 1.0:
            t_old, y_old, f_old = t, y, fy
            t = t_end if t + h >= t_end - 1e-15 * abs(t_end) else t + h
            y, fy = y_new, f_new
            steps += 1
            max_err = max(max_err, en)
            if record:
                ts.append(t)
                ys.append(y.copy())
                fs.append(fy)
            fac = _SAFETY * max(en, 1e-10) ** -_ALPHA * err_prev**_BETA
            err_prev = max(en, 1e-4)
            h *= min(5.0, max(0.2, fac))
            if on_step is not None and on_step(t_old, y_old, f_old, t, y, fy):
                break
        else:
            rejected += 1
            h *= max(0.2, _SAFETY * en**-_ALPHA)
    if not record:
        ts, ys, fs = [ts[0], t], [ys[0], y.copy()], [fs[0], fy]
    return Trajectory(np.array(ts), np.array(ys), np.array(fs),
                      {"steps": steps, "rejected": rejected, "max_error": max_err})


def model_rhs(p: ModelParams) -> Callable:
    """Fast ``f(t, x)`` for the model (no input validation)."""
    a1b1 = p.alpha1 + p.beta1
    a2b2 = p.alpha2 + p.beta2
    r1 = p.phi1 / p.c1
    r2 = p.phi2 / p.c2

    def f(t, x):
        P, M, L, G = x
        return np.array([
            p.phi1 * M - r1 * M * M - a1b1 * P - p.k1 * P * G,
            p.alpha1 * P - p.mu1 * M,
            p.phi2 * G - r2 * G * G - a2b2 * L + p.k2 * P * G,
            p.alpha2 * L - p.mu2 * G,
        ])

    return f


def integrate(p: ModelParams, x0, t_end: float, tol: float = 1e-9, t0: float = 0.0,
              record: bool = True) -> Trajectory:
    """Trajectory of the model from ``x0`` over ``[t0, t_end]``.

    ``tol`` bounds the local error estimate per step relative to
    ``1 + |x_i|`` componentwise.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (4,) or not np.all(np.isfinite(x0)):
        raise InvalidInputError(f"initial state must be 4 finite numbers, got {x0}")
    return solve_ode(model_rhs(p), t0, x0, t_end, rtol=tol, atol=tol, record=record)


# ---------------------------------------------------------------------------
# periodic orbits


@dataclass
class PeriodicOrbit:
    """A periodic orbit through ``anchor`` on the Poincaré section.

    ``radius`` is the distance of the anchor from the equilibrium and
    ``amplitude`` the largest such distance over one period.
    ``residuals`` is the Newton history of the section mismatch.
    """

    anchor: np.ndarray
    period: float
    multipliers: np.ndarray
    verdict: str
    equilibrium: np.ndarray
    radius: float
    amplitude: float
    residuals: list
    closure: float
    trajectory: Trajectory | None = None
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ShootingProblem:
    """Autonomous field in deviation coordinates around an equilibrium.

    ``g(y)`` must vanish at ``y = 0``; ``dg(y)`` is its Jacobian.
    """

    g: Callable
    dg: Callable
    q: np.ndarray
    omega: float
    x_eq: np.ndarray

    def augmented(self, t, z):
        y = z[:4]
        phi = z[4:].reshape(4, 4)
        return np.concatenate([self.g(y), (self.dg(y) @ phi).ravel()])


def _section(q):
    """Section normal ``Im q``, start direction ``Re q`` and an orthonormal
    basis of the section whose first vector is the start direction."""
    r = principal_axes(q)
    normal = r.imag / np.linalg.norm(r.imag)
    direction = r.real / np.linalg.norm(r.real)
    rest = null_space(np.vstack([normal, direction]))
    return normal, direction, np.column_stack([direction, rest])


def _return(problem: ShootingProblem, y0, normal, t_max, tol, variational=True, record=False):
    """Flow ``y0`` (on the section) to its next crossing in the same direction.

    Returns ``(y_T, Phi_T, T, trajectory)``.
    """
    n = 20 if variational else 4
    z0 = np.concatenate([y0, np.eye(4).ravel()]) if variational else np.array(y0, float)
    rhs = problem.augmented if variational else (lambda t, y: problem.g(y))
    scale = max(np.abs(y0).max(), 1e-300)
    atol = np.full(n, tol * scale)
    if variational:
        atol[4:] = tol
    g0 = normal @ problem.g(y0)
    orientation = np.sign(g0)
    state = {"left": False, "hit": None}

    def on_step(t, z, fz, t1, z1, f1):
        s0, s1 = normal @ z[:4], normal @ z1[:4]
        if not state["left"]:
            if np.sign(s1) == -orientation and abs(s1) > 0:
                state["left"] = True
            return False
        if s0 * orientation < 0 <= s1 * orientation or s1 == 0:
            state["hit"] = (t, z, fz, t1 - t)
            return True
        return False

    traj = solve_ode(rhs, 0.0, z0, t_max, rtol=tol, atol=atol, on_step=on_step, record=record)
    if state["hit"] is None:
        raise OrbitNotFoundError("no return to the Poincaré section within the time limit")
    t, z, fz, h = state["hit"]
    # refine the crossing time with exact single steps from the last accepted point
    cross = lambda tau: normal @ dp_step(rhs, t, z, tau, fz)[0][:4] if tau > 0 else normal @ z[:4]
    tau = brentq(cross, 0.0, h, xtol=1e-15 * max(1.0, t), rtol=1e-15)
    zT = dp_step(rhs, t, z, tau, fz)[0] if tau > 0 else z
    phi = zT[4:].reshape(4, 4) if variational else None
    return zT[:4], phi, t + tau, traj


def _classify_multipliers(multipliers, tol):
    """Index of the trivial multiplier and the stability verdict.

    Moduli within ``tol`` of 1 are undecided; ``tol`` is widened to a
    hundred times the error of the trivial multiplier.
    """
    trivial = int(np.argmin(np.abs(multipliers - 1)))
    tol = max(tol, 100 * abs(multipliers[trivial] - 1))
    others = np.abs(np.delete(multipliers, trivial))
    if np.any(np.abs(others - 1) <= tol):
        return trivial, "indeterminate"
    unstable = int(np.sum(others > 1))
    if unstable == 0:
        return trivial, "stable"
    if unstable == 1:
        return trivial, "unstable-saddle-cycle"
    return trivial, "indeterminate"


def shoot_periodic_orbit(problem: ShootingProblem, hint_radius: float, tol: float = 1e-11,
                         newton_tol: float = 1e-9, max_iter: int = 30,
                         multiplier_tol: float = 1e-6, period_factor: float = 3.0) -> PeriodicOrbit:
    """Newton shooting for a cycle around the equilibrium of ``problem``.

    The unknowns are the three section coordinates of the anchor; the
    return time follows from locating the section crossing. The initial
    guess is ``hint_radius * Re(q) / |Re(q)|``.
    """
    if not hint_radius > 0:
        raise DegeneracyError(f"hint radius must be positive, got {hint_radius}")
    normal, direction, basis = _section(problem.q)
    t_max = period_factor * 2 * np.pi / problem.omega
    s = hint_radius * (basis.T @ direction)
    history = []
    for it in range(max_iter):
        y0 = basis @ s
        yT, phi, T, _ = _return(problem, y0, normal, t_max, tol)
        F = basis.T @ yT - s
        res = float(np.linalg.norm(F))
        history.append(res)
        size = float(np.linalg.norm(s))
        if size < 1e-6 * hint_radius:
            raise OrbitNotFoundError("the orbit collapsed onto the equilibrium", residuals=history)
        if res <= newton_tol * size:
            break
        f = problem.g(yT)
        proj = np.eye(4) - np.outer(f, normal) / (normal @ f)
        DP = basis.T @ proj @ phi @ basis
        step = np.linalg.solve(DP - np.eye(3), -F)
        # damp steps that would more than halve or double the orbit
        limit = 0.5 * size
        if np.linalg.norm(step) > limit:
            step *= limit / np.linalg.norm(step)
        s = s + step
        if len(history) > 4 and res > 10 * min(history):
            raise OrbitNotFoundError("Newton iteration diverged", residuals=history)
    else:
        raise OrbitNotFoundError(f"no convergence in {max_iter} Newton steps", residuals=history)

    y0 = basis @ s
    yT, phi, T, traj = _return(problem, y0, normal, t_max, tol, record=True)
    multipliers = eigenvalues(phi).values
    trivial, verdict = _classify_multipliers(multipliers, multiplier_tol)
    if abs(multipliers[trivial] - 1) > 1e-2:
        raise AccuracyError(
            f"trivial multiplier {multipliers[trivial]:.6g} is not close to 1; tighten the tolerance")
    devs = np.linalg.norm(traj.x[:, :4], axis=1)
    anchor = problem.x_eq + y0
    return PeriodicOrbit(
        anchor=anchor, period=float(T), multipliers=multipliers, verdict=verdict,
        equilibrium=problem.x_eq, radius=float(np.linalg.norm(y0)), amplitude=float(devs.max()),
        residuals=history, closure=float(np.linalg.norm(yT - y0)),
        trajectory=Trajectory(traj.t, traj.x[:, :4] + problem.x_eq, traj.f[:, :4], traj.stats),
        diagnostics={"trivial_index": trivial, "monodromy": phi, "section_normal": normal},
    )


def model_problem(p: ModelParams):
    """Shooting problem at A4 plus the critical eigenvalue and its eigenvector."""
    x4 = equilibria(p).A4
    A = jacobian(p, x4)
    lam = eigenvalues(A).critical_pair()
    if lam.imag < 0:
        lam = lam.conjugate()
    if not lam.imag > 0:
        raise DegeneracyError("the critical eigenvalues at A4 are not a complex pair")
    pair = eigenpair_at(A, lam)

    def g(y):
        return A @ y + 0.5 * bilinear_B(p, y, y)

    def dg(y):
        return jacobian(p, x4 + y)

    return ShootingProblem(g, dg, pair.q, float(lam.imag), x4), lam, A


def predicted_radius(A, B: Callable, lam: complex, q, C: Callable | None = None) -> float:
    """Normal-form estimate of the cycle's extent along ``Re q``.

    For the unit eigenvector ``q`` (rotated to principal axes) the cycle is
    ``2 Re(ζ q)`` with ``|ζ| = sqrt(-γ / (ω l1))``.
    """
    gamma, omega = lam.real, lam.imag
    shifted = np.asarray(A) - gamma * np.eye(4)
    l1 = lyapunov_from_forms(shifted, B, C, q=q, omega0=omega).l1
    if gamma * l1 >= 0:
        raise DomainError(f"no small cycle predicted: Re λ = {gamma:.3g}, l1 = {l1:.3g}")
    r = principal_axes(q)
    return float(2 * np.sqrt(-gamma / (omega * l1)) * np.linalg.norm(r.real))


def find_periodic_orbit(p: ModelParams, hint_radius: float | None = None, **kwargs) -> PeriodicOrbit:
    """Cycle born at the Hopf bifurcation of A4, for ``(k1, k2)`` in S₋ near Σ.

    ``hint_radius`` defaults to the normal-form prediction. Keyword
    arguments go to :func:`shoot_periodic_orbit`.

    Raises
    ------
    DomainError
        If A4 is not stable (Δ <= 0) and no hint is given.
    DegeneracyError
        At the Hopf point itself, where the cycle has zero size.
    OrbitNotFoundError
        If Newton shooting fails.
    """
    problem, lam, A = model_problem(p)
    if abs(lam.real) <= 1e-9 * lam.imag:
        raise DegeneracyError("at the Hopf point the cycle shrinks to the equilibrium")
    if hint_radius is None:
        if not delta_at_A4(p) > 0:
            raise DomainError("default hint needs a stable A4 (Δ > 0); pass hint_radius")
        hint_radius = predicted_radius(A, lambda x, y: bilinear_B(p, x, y), lam, problem.q)
    orbit = shoot_periodic_orbit(problem, hint_radius, **kwargs)
    orbit.diagnostics["eigenvalue"] = lam
    orbit.diagnostics["hint_radius"] = hint_radius
    return orbit


def monodromy(problem: ShootingProblem, orbit: PeriodicOrbit, tol: float = 1e-11) -> np.ndarray:
    z0 = np.concatenate([orbit.anchor - problem.x_eq, np.eye(4).ravel()])
    atol = np.full(20, tol)
    atol[:4] *= max(np.abs(z0[:4]).max(), 1e-300)
    traj = solve_ode(problem.augmented, 0.0, z0, orbit.period, rtol=tol, atol=atol, record=False)
    return traj.final[4:].reshape(4, 4)


def floquet_multipliers(p: ModelParams, orbit: PeriodicOrbit, tol: float = 1e-11) -> np.ndarray:
    """Eigenvalues of the monodromy matrix over one period of ``orbit``.

    Raises
    ------
    DomainError
        If the orbit is degenerate (zero radius or period).
    AccuracyError
        If no multiplier lies within 1e-2 of 1.
    """
    if not orbit.period > 0 or not orbit.radius > 0:
        raise DomainError("floquet_multipliers needs a non-degenerate periodic orbit")
    problem, _, _ = model_problem(p)
    multipliers = eigenvalues(monodromy(problem, orbit, tol)).values
    if np.min(np.abs(multipliers - 1)) > 1e-2:
        raise AccuracyError(f"no multiplier near 1 in {multipliers}; tighten the tolerance")
    return multipliers
