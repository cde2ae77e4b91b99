import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import reference as ref
from biocontrol_hopf import (DegeneracyError, InvalidInputError, SingularityError, char_poly,
                             eigenpair_at, eigenvalues, equilibria, hopf_point_q, jacobian,
                             table_params)
from biocontrol_hopf.spectra import normalize_phase, polynomial_roots, solve_shifted
from biocontrol_hopf.stability import a_coefficients


def j_at_q():
    p = table_params(*hopf_point_q())
    return jacobian(p, equilibria(p).A4)


def random_matrix(seed):
    return np.random.default_rng(seed).normal(size=(4, 4))


def test_char_poly_identity():
    assert np.allclose(char_poly(np.eye(4)).as_array(), [1, -4, 6, -4, 1])


def test_char_poly_matches_closed_form_at_Q():
    p = table_params(*hopf_point_q())
    assert np.allclose(char_poly(j_at_q()).as_array(), a_coefficients(p).as_array(), rtol=1e-8, atol=0)


@given(st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_char_poly_vs_eigen_decomposition(seed):
    m = random_matrix(seed)
    want = np.real(np.poly(np.linalg.eigvals(m)))
    got = char_poly(m).as_array()
    assert np.allclose(got, want, rtol=1e-8, atol=1e-8 * np.abs(want).max())


def test_eigenvalues_at_Q():
    vals = eigenvalues(j_at_q()).values
    for v in ref.EIGENVALUES_Q:
        assert np.min(np.abs(vals - v)) <= 1e-4


def test_eigenvalues_diagonal_sorted():
    assert np.allclose(eigenvalues(np.diag([1.0, 2, 3, 4])).values, [4, 3, 2, 1])


@given(st.integers(0, 10_000))
@settings(max_examples=100, deadline=None)
def test_eigenvalues_vs_lapack(seed):
    m = random_matrix(seed)
    got = eigenvalues(m).values
    want = np.linalg.eigvals(m)
    for w in want:
        assert np.min(np.abs(got - w)) <= 1e-7 * max(1, np.abs(m).max())


def test_eigenvalues_repeated_root():
    m = np.array([[2.0, 1, 0, 0], [0, 2, 0, 0], [0, 0, -1, 0], [0, 0, 0, 3]])
    assert np.allclose(sorted(eigenvalues(m).values.real), [-1, 2, 2, 3], atol=1e-7)


def test_real_matrix_gives_conjugate_pairs():
    vals = eigenvalues(j_at_q()).values
    assert np.allclose(np.sort_complex(vals), np.sort_complex(vals.conj()))


def test_polynomial_roots_of_known_quartic():
    roots = polynomial_roots(char_poly(np.diag([1.0, -2, 0.5, 7])))
    assert np.allclose(np.sort(roots.real), [-2, 0.5, 1, 7])


def test_eigenpair_reproduces_printed_vectors():
    m = j_at_q()
    pair = eigenpair_at(m, 2.8467j)
    q = pair.q * ref.Q_VECTOR[0] / pair.q[0]
    assert np.allclose(q, ref.Q_VECTOR, rtol=1e-4, atol=0)
    p = eigenpair_at(m, pair.eigenvalue, q=q).p
    assert np.allclose(p, ref.P_VECTOR, rtol=1e-4, atol=0)


def test_eigenpair_diagonal():
    pair = eigenpair_at(np.diag([5.0, 1, 2, 3]), 5.0)
    assert np.allclose(pair.q, [1, 0, 0, 0]) and np.allclose(pair.p, [1, 0, 0, 0])
    assert np.vdot(pair.p, pair.q) == pytest.approx(1)


@given(st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_eigenpair_residuals(seed):
    m = random_matrix(seed)
    vals = np.linalg.eigvals(m)
    complex_vals = vals[np.abs(vals.imag) > 1e-3]
    if len(complex_vals) == 0 or np.min(np.abs(np.subtract.outer(vals, vals)) + np.eye(4)) < 1e-3:
        return
    pair = eigenpair_at(m, complex_vals[0])
    lam = pair.eigenvalue
    norm = np.abs(m).sum(axis=1).max()
    assert np.linalg.norm(m @ pair.q - lam * pair.q) <= 1e-10 * norm
    assert np.linalg.norm(m.T @ pair.p - np.conj(lam) * pair.p) <= 1e-10 * norm * np.linalg.norm(pair.p)
    assert np.vdot(pair.p, pair.q) == pytest.approx(1)


def test_eigenpair_errors():
    with pytest.raises(DegeneracyError):
        eigenpair_at(np.diag([1.0, 1.0, 2, 3]), 1.0)
    with pytest.raises(InvalidInputError):
        eigenpair_at(np.diag([1.0, 4.0, 2, 3]), 1.0, q=np.array([0, 1, 0, 0]))


def test_normalize_phase():
    q = normalize_phase(np.array([0, 2j, 1, 0]))
    assert np.linalg.norm(q) == pytest.approx(1)
    assert q[0] == 0 and q[1].imag == 0 and q[1].real > 0


def test_solve_shifted():
    assert np.allclose(solve_shifted(np.eye(4), 2.0, np.eye(4)[0]), np.eye(4)[0])
    m = random_matrix(3)
    rhs = np.arange(4) + 1j
    x = solve_shifted(m, 0.3 + 2j, rhs)
    assert np.allclose((0.3 + 2j) * x - m @ x, rhs)


def test_solve_shifted_singular():
    with pytest.raises(SingularityError) as info:
        solve_shifted(np.diag([1.0, 2, 3, 4]), 2.0, np.ones(4))
    assert "2" in str(info.value)
