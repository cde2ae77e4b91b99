"""Synthetic 4D systems with a Hopf point and known answers.

In hidden coordinates ``w = (u, v, y3, y4)`` with ``z = u + i v``::

    z'  = (γ + iω) z + c z|z|^2 + σ y3 z
    y3' = m3 y3 + κ |z|^2
    y4' = m4 y4

and the observed state is ``y = S w`` for an orthogonal ``S``. The
coupling through ``y3`` exercises the ``h11`` term of the projection
formula. Everything of interest is known in closed form:

* at ``γ = 0``, ``l1 = 2 (Re c - σκ/m3) / ω`` for the unit-norm eigenvector;
* for ``γ (Re c - σκ/m3) < 0`` there is a cycle with ``|z| = r``,
  ``r^2 = -γ / (Re c - σκ/m3)``, ``y3 = -κ r^2 / m3`` and angular speed
  ``ω + Im(c) r^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import ShootingProblem


def random_rotation(seed: int | None = None, dim: int = 4) -> np.ndarray:
    rng = np.random.default_rng(seed)
    qm, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return qm * np.sign(np.diag(r))


@dataclass(frozen=True)
class PlantedHopf:
    gamma: float
    omega: float
    c: complex
    m3: float = -1.0
    m4: float = -2.0
    sigma: float = 0.0
    kappa: float = 0.0
    S: np.ndarray = field(default_factory=lambda: np.eye(4))

    # hidden-coordinate field and its derivatives

    def _hidden(self, w):
        u, v, y3, y4 = w
        z = u + 1j * v
        dz = (self.gamma + 1j * self.omega) * z + self.c * z * abs(z) ** 2 + self.sigma * y3 * z
        return np.array([dz.real, dz.imag, self.m3 * y3 + self.kappa * abs(z) ** 2, self.m4 * y4])

    def _hidden_jac(self, w):
        u, v, y3, _ = w
        g, om, cr, ci, s = self.gamma, self.omega, self.c.real, self.c.imag, self.sigma
        rr = u * u + v * v
        # d/du, d/dv of Re and Im of c z |z|^2
        re_u = cr * (rr + 2 * u * u) - ci * 2 * u * v
        re_v = cr * 2 * u * v - ci * (rr + 2 * v * v)
        im_u = ci * (rr + 2 * u * u) + cr * 2 * u * v
        im_v = ci * 2 * u * v + cr * (rr + 2 * v * v)
        return np.array([
            [g + s * y3 + re_u, -om + re_v, s * u, 0.0],
            [om + im_u, g + s * y3 + im_v, s * v, 0.0],
            [2 * self.kappa * u, 2 * self.kappa * v, self.m3, 0.0],
            [0.0, 0.0, 0.0, self.m4],
        ])

    def field(self, y):
        return self.S @ self._hidden(self.S.T @ y)

    def jac(self, y):
        return self.S @ self._hidden_jac(self.S.T @ y) @ self.S.T

    @property
    def A(self) -> np.ndarray:
        return self.jac(np.zeros(4))

    def B(self, x, y):
        """Second-derivative form in observed coordinates (complex-safe)."""
        a, b = self.S.T @ x, self.S.T @ y
        s, k = self.sigma, self.kappa
        out = np.array([
            s * (a[2] * b[0] + a[0] * b[2]),
            s * (a[2] * b[1] + a[1] * b[2]),
            2 * k * (a[0] * b[0] + a[1] * b[1]),
            0.0 * a[0],
        ])
        return self.S @ out

    def C(self, x, y, z):
        """Third-derivative form of ``c z|z|^2`` in observed coordinates."""
        a, b, d = self.S.T @ x, self.S.T @ y, self.S.T @ z
        cr, ci = self.c.real, self.c.imag

        def sym(i, j, k):
            # third derivative of u*(u^2+v^2) style monomials, symmetrized
            return a[i] * b[j] * d[k] + a[i] * b[k] * d[j] + a[j] * b[i] * d[k] \
                + a[j] * b[k] * d[i] + a[k] * b[i] * d[j] + a[k] * b[j] * d[i]

        # Re(c z|z|^2) = cr (u^3 + u v^2) - ci (u^2 v + v^3)
        # Im(c z|z|^2) = ci (u^3 + u v^2) + cr (u^2 v + v^3)
        uuu = sym(0, 0, 0)
        uvv = sym(0, 1, 1)
        uuv = sym(0, 0, 1)
        vvv = sym(1, 1, 1)
        p1 = uuu + uvv
        p2 = uuv + vvv
        out = np.array([cr * p1 - ci * p2, ci * p1 + cr * p2, 0.0 * uuu, 0.0 * uuu])
        return self.S @ out

    # closed-form answers

    @property
    def effective_cubic(self) -> float:
        return self.c.real - self.sigma * self.kappa / self.m3

    @property
    def l1_exact(self) -> float:
        """First Lyapunov coefficient at ``γ = 0`` for a unit-norm eigenvector."""
        return 2 * self.effective_cubic / self.omega

    @property
    def cycle_radius(self) -> float:
        return float(np.sqrt(-self.gamma / self.effective_cubic))

    @property
    def cycle_y3(self) -> float:
        return -self.kappa * self.cycle_radius**2 / self.m3

    @property
    def period(self) -> float:
        return 2 * np.pi / (self.omega + self.c.imag * self.cycle_radius**2)

    @property
    def multipliers(self) -> np.ndarray:
        """Floquet multipliers of the planted cycle."""
        r, y3 = self.cycle_radius, self.cycle_y3
        radial = np.array([
            [self.gamma + 3 * self.c.real * r**2 + self.sigma * y3, self.sigma * r],
            [2 * self.kappa * r, self.m3],
        ])
        exps = np.linalg.eigvals(radial)
        T = self.period
        return np.concatenate([[1.0], np.exp(exps * T), [np.exp(self.m4 * T)]])

    def q(self) -> np.ndarray:
        """Unit eigenvector for ``γ + iω``."""
        return self.S @ np.array([1.0, -1j, 0.0, 0.0]) / np.sqrt(2)

    def problem(self) -> ShootingProblem:
        return ShootingProblem(self.field, self.jac, self.q(), self.omega, np.zeros(4))

    def at_hopf(self) -> "PlantedHopf":
        return PlantedHopf(0.0, self.omega, self.c, self.m3, self.m4, self.sigma, self.kappa, self.S)

    def hidden(self, y) -> np.ndarray:
        return self.S.T @ np.asarray(y)
