"""Four-compartment host-parasitoid model.

State ``x = (P, M, L, G)``: host pupae, adult hosts, parasitoid larvae and
adult parasitoids. The vector field is

.. code-block:: text

    P' = phi1 (1 - M/c1) M - (alpha1 + beta1) P - k1 P G
    M' = alpha1 P - mu1 M
    L' = phi2 (1 - G/c2) G - (alpha2 + beta2) L + k2 P G
    G' = alpha2 L - mu2 G

It is quadratic, so its Taylor expansion about any point is exact after
the second-order term: ``f(x0 + v) = f(x0) + J(x0) v + B(v, v) / 2``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import DomainError, InvalidInputError

PARAMETER_NAMES = (
    "alpha1", "beta1", "mu1", "phi1", "c1", "k1",
    "alpha2", "beta2", "mu2", "phi2", "c2", "k2",
)


@dataclass(frozen=True)
class ModelParams:
    """Rates, capacities and interaction coefficients of the model.

    Values must be finite and non-negative; the carrying capacities ``c1``
    and ``c2`` must be strictly positive. Zero rates are accepted so that
    limiting cases (e.g. the uncoupled system ``k1 = k2 = 0``) can be
    evaluated.
    """

    alpha1: float
    beta1: float
    mu1: float
    phi1: float
    c1: float
    k1: float
    alpha2: float
    beta2: float
    mu2: float
    phi2: float
    c2: float
    k2: float

    def __post_init__(self):
        for name in PARAMETER_NAMES:
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidInputError(f"parameter {name} is not finite: {value!r}")
            if value < 0:
                raise InvalidInputError(f"parameter {name} must be non-negative, got {value}")
            object.__setattr__(self, name, value)
        if self.c1 == 0 or self.c2 == 0:
            raise InvalidInputError("carrying capacities c1 and c2 must be positive")

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in PARAMETER_NAMES}

    @property
    def is_positive(self) -> bool:
        return all(getattr(self, name) > 0 for name in PARAMETER_NAMES)


#: Field values used throughout the analysis (k1, k2 are the controls).
TABLE_VALUES = {
    "alpha1": 0.7, "beta1": 0.003, "mu1": 0.6, "phi1": 2.3, "c1": 400000.0,
    "alpha2": 0.3, "beta2": 0.0015, "mu2": 0.4, "phi2": 4.0, "c2": 100.0,
}


def table_params(k1: float, k2: float, c2: float | None = None) -> ModelParams:
    """Table parameter set with the interaction pair ``(k1, k2)``."""
    values = dict(TABLE_VALUES, k1=k1, k2=k2)
    if c2 is not None:
        values["c2"] = c2
    return ModelParams(**values)


class ReproductionNumbers(NamedTuple):
    R1: float
    R2: float


@dataclass(frozen=True)
class EquilibriumSet:
    """The four closed-form equilibria, each a length-4 array ``(P, M, L, G)``."""

    A1: np.ndarray
    A2: np.ndarray
    A3: np.ndarray
    A4: np.ndarray

    def __getitem__(self, name: str) -> np.ndarray:
        if name not in ("A1", "A2", "A3", "A4"):
            raise KeyError(name)
        return getattr(self, name)

    def items(self):
        return [(name, getattr(self, name)) for name in ("A1", "A2", "A3", "A4")]


@dataclass(frozen=True)
class Admissibility:
    ok: bool
    violations: tuple = ()

    def __bool__(self):
        return self.ok


def _as_state(x, dtype=float) -> np.ndarray:
    x = np.asarray(x, dtype=dtype)
    if x.shape != (4,):
        raise InvalidInputError(f"state must have 4 components, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError(f"state has non-finite components: {x}")
    return x


def vector_field(p: ModelParams, x) -> np.ndarray:
    """Time derivative ``(P', M', L', G')`` at state ``x``."""
    P, M, L, G = _as_state(x)
    return np.array([
        p.phi1 * (1.0 - M / p.c1) * M - (p.alpha1 + p.beta1) * P - p.k1 * P * G,
        p.alpha1 * P - p.mu1 * M,
        p.phi2 * (1.0 - G / p.c2) * G - (p.alpha2 + p.beta2) * L + p.k2 * P * G,
        p.alpha2 * L - p.mu2 * G,
    ])


def jacobian(p: ModelParams, x) -> np.ndarray:
    """Jacobian matrix of the vector field at ``x``."""
    P, M, L, G = _as_state(x)
    return np.array([
        [-p.alpha1 - p.beta1 - p.k1 * G, p.phi1 - 2.0 * p.phi1 * M / p.c1, 0.0, -p.k1 * P],
        [p.alpha1, -p.mu1, 0.0, 0.0],
        [p.k2 * G, 0.0, -p.alpha2 - p.beta2, p.phi2 - 2.0 * p.phi2 * G / p.c2 + p.k2 * P],
        [0.0, 0.0, p.alpha2, -p.mu2],
    ])


def bilinear_B(p: ModelParams, x, y) -> np.ndarray:
    """Symmetric bilinear form of second derivatives, ``B(x, y)``.

    Works for real and complex vectors (no conjugation is applied).
    """
    x = np.asarray(x)
    y = np.asarray(y)
    cross = x[0] * y[3] + x[3] * y[0]
    b1 = -2.0 * p.phi1 / p.c1 * x[1] * y[1] - p.k1 * cross
    b3 = -2.0 * p.phi2 / p.c2 * x[3] * y[3] + p.k2 * cross
    zero = 0.0 * b1
    return np.array([b1, zero, b3, zero])


def trilinear_C(x, y, z) -> np.ndarray:
    """Third-derivative form; identically zero for this quadratic model."""
    dtype = np.result_type(np.asarray(x), np.asarray(y), np.asarray(z), float)
    return np.zeros(4, dtype=dtype)


def reproduction_numbers(p: ModelParams) -> ReproductionNumbers:
    R1 = p.alpha1 * p.phi1 / (p.mu1 * (p.alpha1 + p.beta1))
    R2 = p.alpha2 * p.phi2 / (p.mu2 * (p.alpha2 + p.beta2))
    return ReproductionNumbers(R1, R2)


def k1_max(p: ModelParams) -> float:
    """Upper bound on ``k1`` keeping the coexistence equilibrium non-negative."""
    R1, R2 = reproduction_numbers(p)
    if R1 <= 1 or R2 <= 1:
        raise DomainError(f"k1_max requires R1 > 1 and R2 > 1 (R1={R1:.6g}, R2={R2:.6g})")
    return p.alpha1 * p.phi1 * (1 - 1 / R1) / (p.c2 * p.mu1 * (1 - 1 / R2))


def equilibria(p: ModelParams) -> EquilibriumSet:
    R1, R2 = reproduction_numbers(p)
    s1 = 1 - 1 / R1
    s2 = 1 - 1 / R2

    A1 = np.zeros(4)
    A2 = np.array([p.c1 * p.mu1 / p.alpha1 * s1, p.c1 * s1, 0.0, 0.0])
    A3 = np.array([0.0, 0.0, p.c2 * p.mu2 / p.alpha2 * s2, p.c2 * s2])

    den = p.alpha1**2 * p.phi1 * p.phi2 + p.mu1**2 * p.c1 * p.c2 * p.k1 * p.k2
    host = p.alpha1 * p.phi1 * s1 - p.mu1 * p.c2 * p.k1 * s2
    para = p.c1 * p.mu1 * p.k2 * s1 + p.alpha1 * p.phi2 * s2
    A4 = np.array([
        p.c1 * p.mu1 * p.phi2 / den * host,
        p.c1 * p.alpha1 * p.phi2 / den * host,
        p.c2 * p.mu2 * p.alpha1 * p.phi1 / (p.alpha2 * den) * para,
        p.c2 * p.alpha1 * p.phi1 / den * para,
    ])
    for name, point in (("A2", A2), ("A3", A3), ("A4", A4)):
        if not np.all(np.isfinite(point)):
            raise DomainError(f"equilibrium {name} has non-finite coordinates: {point}")
    return EquilibriumSet(A1, A2, A3, A4)


def coexistence_equilibrium(p: ModelParams) -> np.ndarray:
    return equilibria(p).A4


def is_admissible(p: ModelParams) -> Admissibility:
    """Check ``0 < k1 < k1_max``, ``0 < k2 <= k1``, ``R1 > 1`` and ``R2 > 1``."""
    violations = []
    R1, R2 = reproduction_numbers(p)
    if R1 <= 1:
        violations.append(f"R1 = {R1:.6g} <= 1")
    if R2 <= 1:
        violations.append(f"R2 = {R2:.6g} <= 1")
    if p.k1 <= 0:
        violations.append("k1 <= 0")
    if p.k2 <= 0:
        violations.append("k2 <= 0")
    if p.k2 > p.k1:
        violations.append(f"k2 = {p.k2:.6g} > k1 = {p.k1:.6g}")
    if R1 > 1 and R2 > 1:
        bound = k1_max(p)
        if p.k1 >= bound:
            violations.append(f"k1 = {p.k1:.6g} >= k1_max = {bound:.6g}")
    return Admissibility(not violations, tuple(violations))
