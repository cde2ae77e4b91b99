"""Dense 4x4 spectral tools over the complex numbers.

Eigenvalues come from the characteristic quartic: its companion matrix is
reduced by Wilkinson-shifted complex QR and each root is then Newton-polished
on the polynomial. Eigenvectors are obtained by inverse iteration from the
fixed start vector ``(1, 1, 1, 1) / 2``.

The inner product is ``<p, q> = sum(conj(p_i) q_i)`` throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import ConvergenceError, DegeneracyError, InvalidInputError, SingularityError

_START = np.full(4, 0.5, dtype=complex)


class QuarticCoefficients(NamedTuple):
    """Coefficients of ``a0 λ^4 + a1 λ^3 + a2 λ^2 + a3 λ + a4``."""

    a0: float
    a1: float
    a2: float
    a3: float
    a4: float

    @property
    def delta(self) -> float:
        """Routh-Hurwitz quantity ``a1 a2 a3 - a0 a3^2 - a1^2 a4``."""
        return self.a1 * self.a2 * self.a3 - self.a0 * self.a3**2 - self.a1**2 * self.a4

    def __call__(self, lam):
        a0, a1, a2, a3, a4 = self
        return (((a0 * lam + a1) * lam + a2) * lam + a3) * lam + a4

    def derivative(self, lam):
        a0, a1, a2, a3, _ = self
        return ((4 * a0 * lam + 3 * a1) * lam + 2 * a2) * lam + a3

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)


@dataclass(frozen=True)
class Spectrum:
    """Four eigenvalues sorted by real part, then imaginary part, descending."""

    values: np.ndarray

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def counts(self, band: float) -> tuple[int, int, int]:
        """Numbers of eigenvalues with ``Re < -band``, ``Re > band`` and on the axis."""
        re = self.values.real
        neg = int(np.sum(re < -band))
        pos = int(np.sum(re > band))
        return neg, pos, len(re) - neg - pos

    def critical_pair(self) -> complex:
        """Eigenvalue with positive imaginary part closest to the imaginary axis."""
        upper = [v for v in self.values if v.imag > 0]
        if not upper:
            raise DegeneracyError("spectrum has no complex pair")
        return min(upper, key=lambda v: abs(v.real))


@dataclass(frozen=True)
class EigenPair:
    eigenvalue: complex
    q: np.ndarray
    p: np.ndarray


def _check_matrix(m) -> np.ndarray:
    m = np.asarray(m)
    if m.shape != (4, 4):
        raise InvalidInputError(f"expected a 4x4 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix has non-finite entries")
    return m


def _sort_key(v):
    return (-v.real, -v.imag)


def char_poly(m) -> QuarticCoefficients:
    """Coefficients of ``det(m - λI)`` (``a0 = 1``), by Faddeev-LeVerrier."""
    m = _check_matrix(m)
    n = 4
    coeffs = [1.0]
    Mk = np.zeros_like(m, dtype=np.result_type(m, float))
    c = 1.0
    for k in range(1, n + 1):
        Mk = m @ Mk + c * np.eye(n)
        c = -np.trace(m @ Mk) / k
        coeffs.append(c)
    if not np.iscomplexobj(m):
        coeffs = [float(np.real(a)) for a in coeffs]
    return QuarticCoefficients(*coeffs)


def _wilkinson_shift(a, b, c, d):
    # eigenvalue of [[a, b], [c, d]] closer to d
    tr = a + d
    det = a * d - b * c
    disc = np.sqrt(tr * tr / 4 - det + 0j)
    l1 = tr / 2 + disc
    l2 = tr / 2 - disc
    return l1 if abs(l1 - d) < abs(l2 - d) else l2


def _hessenberg_qr_eigenvalues(H: np.ndarray, max_iter: int = 400) -> np.ndarray:
    H = np.array(H, dtype=complex)
    n = H.shape[0]
    out = []
    hi = n
    stall = 0
    iters = 0
    eps = np.finfo(float).eps
    while hi > 0:
        if hi == 1:
            out.append(H[0, 0])
            break
        sub = abs(H[hi - 1, hi - 2])
        scale = abs(H[hi - 1, hi - 1]) + abs(H[hi - 2, hi - 2])
        if scale == 0:
            scale = np.abs(H[:hi, :hi]).max() or 1.0
        if sub <= eps * scale:
            out.append(H[hi - 1, hi - 1])
            H = H[: hi - 1, : hi - 1]
            hi -= 1
            stall = 0
            continue
        iters += 1
        stall += 1
        if iters > max_iter:
            raise ConvergenceError("shifted QR did not converge")
        if stall % 11 == 10:
            mu = H[hi - 1, hi - 1] + 0.75 * sub * (1 + 1j)
        else:
            mu = _wilkinson_shift(H[hi - 2, hi - 2], H[hi - 2, hi - 1],
                                  H[hi - 1, hi - 2], H[hi - 1, hi - 1])
        Q, R = np.linalg.qr(H - mu * np.eye(hi))
        H = R @ Q + mu * np.eye(hi)
    return np.array(out, dtype=complex)


def polynomial_roots(c: QuarticCoefficients, polish_steps: int = 8) -> np.ndarray:
    """Roots of a quartic by companion-matrix QR and Newton polishing."""
    a0, a1, a2, a3, a4 = c
    if a0 == 0:
        raise InvalidInputError("leading coefficient must be nonzero")
    comp = np.zeros((4, 4), dtype=complex)
    comp[0] = [-a1 / a0, -a2 / a0, -a3 / a0, -a4 / a0]
    comp[1, 0] = comp[2, 1] = comp[3, 2] = 1.0
    roots, merged = _merge_multiple_roots(c, _hessenberg_qr_eigenvalues(comp))
    polished = []
    for r, is_multiple in zip(roots, merged):
        best, best_res = r, abs(c(r))
        for _ in range(0 if is_multiple else polish_steps):
            d = c.derivative(best)
            if d == 0:
                break
            trial = best - c(best) / d
            res = abs(c(trial))
            if not res < best_res:
                break
            best, best_res = trial, res
        polished.append(best)
    return np.array(polished)


def _taylor_is_multiple(c: QuarticCoefficients, mu: complex, k: int) -> bool:
    # a k-fold root at mu has p(mu) = ... = p^(k-1)(mu) = 0 up to rounding
    coeffs = np.array(c, dtype=complex)[::-1]  # a4 .. a0 by ascending power
    eps = np.finfo(float).eps
    for j in range(k):
        taylor = 0j
        bound = 0.0
        for i in range(j, 5):
            binom = np.prod(range(i - j + 1, i + 1)) / np.prod(range(1, j + 1))
            term = coeffs[i] * binom * mu ** (i - j)
            taylor += term
            bound += abs(term)
        if abs(taylor) > 1e3 * eps * max(bound, 1e-300):
            return False
    return True


def _merge_multiple_roots(c: QuarticCoefficients, roots: np.ndarray) -> np.ndarray:
    scale = max(1.0, np.abs(roots).max())
    radius = 1e-2 * scale
    roots = roots.copy()
    done = np.zeros(len(roots), dtype=bool)
    for i in range(len(roots)):
        if done[i]:
            continue
        cluster = [j for j in range(len(roots)) if not done[j] and abs(roots[j] - roots[i]) <= radius]
        if len(cluster) < 2:
            continue
        mu = roots[cluster].mean()
        if _taylor_is_multiple(c, mu, len(cluster)):
            roots[cluster] = mu
            done[cluster] = True
    return roots, done


def _pair_conjugates(vals: np.ndarray, tol: float) -> np.ndarray:
    vals = vals.copy()
    free = list(range(len(vals)))
    while free:
        i = free.pop(0)
        if abs(vals[i].imag) <= tol:
            vals[i] = vals[i].real
            continue
        j = min(free, key=lambda k: abs(vals[k] - np.conj(vals[i])), default=None)
        if j is None or abs(vals[j] - np.conj(vals[i])) > abs(vals[i].imag):
            raise ConvergenceError(f"eigenvalue {vals[i]} has no conjugate partner")
        free.remove(j)
        mid = 0.5 * (vals[i] + np.conj(vals[j]))
        vals[i], vals[j] = mid, np.conj(mid)
    return vals


def eigenvalues(m) -> Spectrum:
    """All four eigenvalues of ``m``; conjugate-paired when ``m`` is real."""
    m = _check_matrix(m)
    c = char_poly(m)
    vals = polynomial_roots(c)
    if not np.iscomplexobj(m):
        scale = max(np.abs(m).max(), 1e-300)
        vals = _pair_conjugates(vals, 1e-12 * scale)
    vals = np.array(sorted(vals, key=_sort_key), dtype=complex)
    return Spectrum(vals)


def _inverse_iteration(shifted: np.ndarray, norm: float, max_iter: int = 8) -> np.ndarray:
    # small diagonal perturbation keeps LAPACK away from an exactly singular pivot
    nudged = shifted + (1e-13 * norm * (1 + 1j)) * np.eye(4)
    x = _START.copy()
    for it in range(max_iter):
        try:
            x = np.linalg.solve(nudged, x)
        except np.linalg.LinAlgError as exc:
            raise DegeneracyError(f"inverse iteration failed: {exc}") from None
        x /= np.linalg.norm(x)
        if it >= 1 and np.linalg.norm(shifted @ x) <= 1e-10 * norm:
            return x
    raise ConvergenceError("inverse iteration did not reach the residual target")


def normalize_phase(q) -> np.ndarray:
    """Scale to unit norm with the first nonzero component real and positive."""
    q = np.asarray(q, dtype=complex)
    q = q / np.linalg.norm(q)
    big = np.abs(q).max()
    for comp in q:
        if abs(comp) > 1e-12 * big:
            return q * (abs(comp) / comp)
    return q


def eigenpair_at(m, lam: complex, q=None, gap_tol: float = 1e-8) -> EigenPair:
    """Right and left eigenvectors for the simple eigenvalue nearest ``lam``.

    The right vector ``q`` satisfies ``m q = λ q`` and, unless supplied, has
    unit norm with its first nonzero component real positive. The left vector
    satisfies ``m^T p = conj(λ) p`` (``-iω p`` when ``λ = iω``) and is scaled
    so that ``<p, q> = 1``.
    """
    m = _check_matrix(m).astype(complex)
    norm = max(np.abs(m).sum(axis=1).max(), 1e-300)
    vals = eigenvalues(m.real if np.all(m.imag == 0) else m).values
    dist = np.abs(vals - lam)
    idx = int(np.argmin(dist))
    if dist[idx] > 1e-3 * max(norm, 1.0):
        raise DegeneracyError(f"{lam} is not close to an eigenvalue (nearest {vals[idx]})")
    lam = complex(vals[idx])
    others = np.delete(vals, idx)
    if np.any(np.abs(others - lam) <= gap_tol * norm):
        raise DegeneracyError(f"eigenvalue {lam} is not simple")

    if q is None:
        q = normalize_phase(_inverse_iteration(m - lam * np.eye(4), norm))
    else:
        q = np.asarray(q, dtype=complex)
        if np.linalg.norm(m @ q - lam * q) > 1e-6 * norm * np.linalg.norm(q):
            raise InvalidInputError("supplied q is not an eigenvector for this eigenvalue")
    p = _inverse_iteration(m.T - np.conj(lam) * np.eye(4), norm)
    pq = np.vdot(p, q)
    if abs(pq) <= 1e-10 * np.linalg.norm(q):
        raise DegeneracyError("left and right eigenvectors are orthogonal (defective eigenvalue)")
    p = p / np.conj(pq)
    return EigenPair(lam, q, p)


def solve_shifted(m, shift: complex, rhs, rtol: float = 1e-13) -> np.ndarray:
    """Solve ``(shift I - m) x = rhs``.

    Raises
    ------
    SingularityError
        If ``|det(shift I - m)|`` is below ``rtol`` times the Hadamard bound
        (product of column norms), i.e. ``shift`` is numerically an eigenvalue.
    """
    m = _check_matrix(m)
    M = shift * np.eye(4) - m
    hadamard = np.prod(np.linalg.norm(M, axis=0))
    det = np.linalg.det(M)
    if hadamard == 0 or abs(det) <= rtol * hadamard:
        vals = eigenvalues(m).values
        nearest = complex(vals[np.argmin(np.abs(vals - shift))])
        raise SingularityError(
            f"shifted matrix is singular: shift {shift} coincides with eigenvalue {nearest}",
            eigenvalue=nearest)
    return np.linalg.solve(M, np.asarray(rhs, dtype=np.result_type(M, np.asarray(rhs))))
