import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biocontrol_hopf import (DomainError, InvalidInputError, Kind, a_coefficients, char_poly,
                             classify, classify_all, delta_at_A4, eigenvalues, equilibria,
                             hopf_point_q, is_admissible, jacobian, k1_max, table_params)
from biocontrol_hopf.spectra import QuarticCoefficients
from biocontrol_hopf.stability import (a4_statement_form, boundary_spectra, complex_subpair,
                                       delta_gradient, delta_scale, routh_hurwitz)

admissible_pair = st.tuples(st.floats(1e-5, 0.0219), st.floats(0.0, 1.0)).map(
    lambda t: (t[0], max(t[0] * t[1], 1e-7)))


def test_routh_hurwitz_stable_quartic():
    rh = routh_hurwitz(QuarticCoefficients(1, 4, 6, 4, 1))
    assert rh.stable and rh.delta == 64 and rh.positive_coeffs


def test_routh_hurwitz_boundary():
    rh = routh_hurwitz(QuarticCoefficients(1, 3, 3, 3, 2))
    assert rh.delta == 0 and not rh.stable


def test_routh_hurwitz_zero_coefficients():
    rh = routh_hurwitz(QuarticCoefficients(1, 0, 1, 0, 1))
    assert not rh.positive_coeffs and not rh.stable


def test_routh_hurwitz_rejects_non_positive_leading():
    with pytest.raises(DomainError):
        routh_hurwitz(QuarticCoefficients(0, 1, 1, 1, 1))


@given(admissible_pair)
@settings(max_examples=100, deadline=None)
def test_closed_form_coefficients(pair):
    p = table_params(*pair)
    closed = a_coefficients(p)
    generic = char_poly(jacobian(p, equilibria(p).A4))
    assert np.allclose(closed.as_array(), generic.as_array(), rtol=1e-8, atol=0)
    assert all(a > 0 for a in closed[1:])
    assert a4_statement_form(p) == pytest.approx(closed.a4, rel=1e-10)


def test_uncoupled_limit_factorizes():
    p = table_params(1e-12, 1e-12)
    x = equilibria(p).A4
    J = jacobian(p, x)
    host = np.real(np.poly(J[:2, :2]))
    para = np.real(np.poly(J[2:, 2:]))
    assert np.allclose(a_coefficients(p).as_array(), np.polymul(host, para), rtol=1e-8)


def test_delta_near_zero_at_rounded_Q():
    p = table_params(0.00331, 0.001)
    assert abs(delta_at_A4(p)) <= 1e-3 * delta_scale(p)


def test_delta_sign_matches_spectrum():
    stable = table_params(0.02, 0.0001)
    assert delta_at_A4(stable) > 0
    assert np.all(eigenvalues(jacobian(stable, equilibria(stable).A4)).values.real < 0)
    unstable = table_params(0.001, 0.001)
    assert delta_at_A4(unstable) < 0
    vals = eigenvalues(jacobian(unstable, equilibria(unstable).A4)).values
    assert any(v.real > 0 and abs(v.imag) > 0 for v in vals)


def test_delta_gradient_vs_wide_difference():
    p = table_params(*hopf_point_q())
    g = delta_gradient(p)
    h = 1e-9
    wide = (delta_at_A4(p.replace(k1=p.k1 + h)) - delta_at_A4(p.replace(k1=p.k1 - h))) / (2 * h)
    assert g[0] == pytest.approx(wide, rel=1e-4)
    assert g[0] > 0 and g[1] < 0


def test_boundary_spectra_signatures():
    p = table_params(1e-3, 1e-3)
    a1 = boundary_spectra(p, "A1").values.real
    assert np.sum(a1 > 0) == 2 and np.sum(a1 < 0) == 2
    for which in ("A2", "A3"):
        assert np.sum(boundary_spectra(p, which).values.real > 0) == 1


@given(admissible_pair)
@settings(max_examples=60, deadline=None)
def test_boundary_spectra_vs_generic(pair):
    p = table_params(*pair)
    for which in ("A1", "A2", "A3"):
        closed = boundary_spectra(p, which).values
        generic = eigenvalues(jacobian(p, equilibria(p)[which])).values
        assert max(np.min(np.abs(generic - v)) for v in closed) <= 1e-8


def test_boundary_spectra_rejects_A4():
    with pytest.raises(InvalidInputError):
        boundary_spectra(table_params(1e-3, 1e-3), "A4")


def test_complex_subpair_flags():
    p = table_params(1e-3, 1e-3)
    assert complex_subpair(p, "A1") is None
    assert isinstance(complex_subpair(p, "A2"), bool)


def test_classification_labels():
    labels = [c.label for c in classify_all(table_params(1e-3, 1e-3))]
    assert labels[:3] == ["saddle 2-2", "saddle 3-1", "saddle 3-1"]
    assert labels[3] == "saddle 2-2"
    assert classify(table_params(0.02, 0.0001), "A4").kind is Kind.STABLE


def test_classification_at_hopf_point():
    c = classify(table_params(*hopf_point_q()), "A4")
    assert c.kind is Kind.MARGINAL_HOPF
    assert c.on_axis == 2 and abs(c.delta) < 1e-6 * delta_scale(table_params(*hopf_point_q()))


def test_classification_at_threshold():
    p = table_params(1e-3, 1e-3).replace(phi1=0.6 * (0.7 + 0.003) / 0.7)
    assert classify(p, "A1").kind is Kind.DEGENERATE


def test_near_bound_host_vanishes():
    p = table_params(1e-3, 1e-3)
    bound = k1_max(p)
    near = table_params(bound * (1 - 1e-9), 1e-3)
    x = equilibria(near).A4
    assert abs(x[0]) < 1e-4 and abs(x[1]) < 1e-4
    assert is_admissible(near)
    stable = delta_at_A4(near) > 0
    assert stable == bool(np.all(eigenvalues(jacobian(near, x)).values.real < 0))
