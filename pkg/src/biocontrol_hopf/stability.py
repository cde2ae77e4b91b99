"""Local stability of the four equilibria.

The boundary equilibria A1, A2, A3 have closed-form spectra. The
coexistence equilibrium A4 is decided by the Routh-Hurwitz conditions on
its characteristic quartic, whose coefficients are also available in
closed form.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import ConsistencyError, DomainError, InvalidInputError
from .model import ModelParams, equilibria, jacobian, reproduction_numbers
from .settings import DEFAULT_TOLERANCES, ToleranceSettings
from .spectra import QuarticCoefficients, Spectrum, char_poly, eigenvalues


class RouthHurwitz(NamedTuple):
    stable: bool
    delta: float
    positive_coeffs: bool


def routh_hurwitz(c: QuarticCoefficients) -> RouthHurwitz:
    """Routh-Hurwitz test for a real quartic with ``a0 > 0``.

    All roots have negative real part iff ``a1..a4 > 0`` and
    ``Δ = a1 a2 a3 - a0 a3^2 - a1^2 a4 > 0``.
    """
    c = QuarticCoefficients(*c)
    if not c.a0 > 0:
        raise DomainError(f"leading coefficient must be positive, got {c.a0}")
    positive = all(a > 0 for a in c[1:])
    delta = c.delta
    return RouthHurwitz(bool(positive and delta > 0), float(delta), bool(positive))


def _a4_pieces(p: ModelParams):
    x = equilibria(p).A4
    s1 = p.alpha1 + p.beta1 + p.mu1 + p.k1 * x[3]
    s2 = p.alpha2 + p.beta2 + p.mu2
    host = p.alpha1 * p.phi1 / p.c1 * x[1]
    para = p.alpha2 * p.phi2 / p.c2 * x[3]
    cross = p.alpha2 * p.k1 * p.k2 * x[0] * x[3]
    return x, s1, s2, host, para, cross


def a_coefficients(p: ModelParams) -> QuarticCoefficients:
    """Characteristic-polynomial coefficients of ``J(A4)`` in closed form."""
    _, s1, s2, host, para, cross = _a4_pieces(p)
    a1 = s1 + s2
    a2 = host + para + s1 * s2
    a3 = s1 * para + s2 * host + cross
    a4 = host * para + p.mu1 * cross
    return QuarticCoefficients(1.0, a1, a2, a3, a4)


def a4_statement_form(p: ModelParams) -> float:
    """``a4`` written through ``P4`` and ``M4`` instead of ``M4 G4``.

    Algebraically equal to ``a_coefficients(p).a4``; kept as a cross-check.
    """
    R1, R2 = reproduction_numbers(p)
    x = equilibria(p).A4
    return p.alpha2 * p.alpha1 * p.phi1 * (
        p.k2 * (1 - 1 / R1) * x[0] + p.phi2 / p.c1 * (1 - 1 / R2) * x[1])


def delta_at_A4(p: ModelParams) -> float:
    """Routh-Hurwitz quantity Δ at the coexistence equilibrium.

    Δ > 0: A4 asymptotically stable; Δ < 0: unstable; Δ = 0: Hopf candidate.
    """
    return a_coefficients(p).delta


def delta_scale(p: ModelParams) -> float:
    """``a1 a2 a3``, the natural magnitude against which Δ is compared."""
    c = a_coefficients(p)
    return abs(c.a1 * c.a2 * c.a3)


def delta_gradient(p: ModelParams, rel_step: float = 1e-7, floor: float = 1e-4) -> np.ndarray:
    """``(dΔ/dk1, dΔ/dk2)`` by Richardson-extrapolated central differences."""
    grad = np.empty(2)
    for i, name in enumerate(("k1", "k2")):
        k = getattr(p, name)
        h = rel_step * max(k, floor)

        def central(step):
            up = delta_at_A4(p.replace(**{name: k + step}))
            down = delta_at_A4(p.replace(**{name: k - step}))
            return (up - down) / (2 * step)

        grad[i] = (4 * central(h / 2) - central(h)) / 3
    return grad


def boundary_spectra(p: ModelParams, which: str) -> Spectrum:
    """Closed-form eigenvalues of the Jacobian at A1, A2 or A3."""
    R1, R2 = reproduction_numbers(p)
    s1 = 1 - 1 / R1
    s2 = 1 - 1 / R2
    t1 = p.alpha1 + p.beta1 + p.mu1
    t2 = p.alpha2 + p.beta2 + p.mu2
    sq = lambda v: np.sqrt(complex(v))
    if which == "A1":
        d1 = sq(t1**2 + 4 * p.alpha1 * p.phi1 * s1)
        d2 = sq(t2**2 + 4 * p.alpha2 * p.phi2 * s2)
        vals = [(-t1 + d1) / 2, (-t1 - d1) / 2, (-t2 + d2) / 2, (-t2 - d2) / 2]
    elif which == "A2":
        d1 = sq(t1**2 - 4 * p.alpha1 * p.phi1 * s1)
        d2 = sq(t2**2 + 4 * p.alpha2 * p.phi2 * s2 + 4 * p.c1 * p.alpha2 * p.mu1 / p.alpha1 * s1 * p.k2)
        vals = [(-t1 + d1) / 2, (-t1 - d1) / 2, (-t2 + d2) / 2, (-t2 - d2) / 2]
    elif which == "A3":
        shift = p.c2 * p.k1 * s2
        d1 = sq((p.alpha1 + p.beta1 - p.mu1 + shift) ** 2 + 4 * p.alpha1 * p.phi1)
        d2 = sq(t2**2 - 4 * p.alpha2 * p.phi2 * s2)
        vals = [(-(t1 + shift) + d1) / 2, (-(t1 + shift) - d1) / 2, (-t2 + d2) / 2, (-t2 - d2) / 2]
    else:
        raise InvalidInputError(f"closed-form spectra exist for A1, A2, A3, not {which!r}")
    vals = np.array(vals, dtype=complex)
    vals[np.abs(vals.imag) == 0] = vals[np.abs(vals.imag) == 0].real
    return Spectrum(np.array(sorted(vals, key=lambda v: (-v.real, -v.imag))))


def complex_subpair(p: ModelParams, which: str) -> bool | None:
    """Whether the damped sub-pair at A2 (host) or A3 (parasitoid) is complex.

    The pair is complex exactly when ``phi > [t^2 + 4 mu (alpha + beta)] / (4 alpha)``
    with ``t = alpha + beta + mu`` for the relevant species. Returns ``None``
    for equilibria without such a threshold.
    """
    if which == "A2":
        a, b, m, phi = p.alpha1, p.beta1, p.mu1, p.phi1
    elif which == "A3":
        a, b, m, phi = p.alpha2, p.beta2, p.mu2, p.phi2
    else:
        return None
    return phi > ((a + b + m) ** 2 + 4 * m * (a + b)) / (4 * a)


class Kind(str, enum.Enum):
    STABLE = "asymptotically-stable"
    SADDLE = "saddle"
    MARGINAL_HOPF = "marginal-hopf-candidate"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class Classification:
    """Stability verdict for one equilibrium.

    ``n`` and ``p`` count eigenvalues with negative and positive real part;
    ``on_axis`` counts those inside the tolerance band around the imaginary
    axis. ``delta`` and ``routh_hurwitz`` are only filled for A4.
    """

    which: str
    kind: Kind
    n: int
    p: int
    on_axis: int
    spectrum: Spectrum
    delta: float | None = None
    routh_hurwitz: RouthHurwitz | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        if self.kind is Kind.SADDLE:
            return f"saddle {self.n}-{self.p}"
        return self.kind.value


def classify(p: ModelParams, which: str, tol: ToleranceSettings = DEFAULT_TOLERANCES) -> Classification:
    """Classify equilibrium ``which`` (``"A1"`` .. ``"A4"``) from its spectrum."""
    eq = equilibria(p)
    x = eq[which]
    J = jacobian(p, x)
    spectrum = eigenvalues(J)
    band = tol.axis_band * np.abs(J).sum(axis=1).max()
    n, pos, on_axis = spectrum.counts(band)
    R1, R2 = reproduction_numbers(p)
    diagnostics = {"band": band, "R1": R1, "R2": R2}
    sub = complex_subpair(p, which)
    if sub is not None:
        diagnostics["complex_subpair"] = sub

    if abs(R1 - 1) <= 1e-12 or abs(R2 - 1) <= 1e-12:
        kind = Kind.DEGENERATE
    elif on_axis == 0:
        kind = Kind.STABLE if pos == 0 else Kind.SADDLE
    elif on_axis == 2 and n == 2:
        axis = [v for v in spectrum if abs(v.real) <= band]
        is_pair = abs(axis[0] - np.conj(axis[1])) <= band + 1e-12 and abs(axis[0].imag) > band
        kind = Kind.MARGINAL_HOPF if is_pair else Kind.DEGENERATE
    else:
        kind = Kind.DEGENERATE

    delta = rh = None
    if which == "A4":
        coeffs = a_coefficients(p)
        rh = routh_hurwitz(coeffs)
        delta = rh.delta
        diagnostics["char_poly"] = char_poly(J)
        if kind is Kind.STABLE and not rh.stable:
            raise ConsistencyError(f"spectrum says stable but Routh-Hurwitz fails (Δ={delta:.6g})")
        if kind is Kind.SADDLE and rh.stable:
            raise ConsistencyError(f"spectrum has {pos} unstable eigenvalue(s) but Δ={delta:.6g} > 0")
    return Classification(which, kind, n, pos, on_axis, spectrum, delta, rh, diagnostics)


def classify_all(p: ModelParams, tol: ToleranceSettings = DEFAULT_TOLERANCES) -> list[Classification]:
    return [classify(p, name, tol) for name in ("A1", "A2", "A3", "A4")]
