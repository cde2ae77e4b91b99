import numpy as np
import pytest

from biocontrol_hopf.planted import PlantedHopf, random_rotation

CASE = PlantedHopf(-0.03, 1.4, 0.5 - 0.2j, -1.2, -0.8, 0.7, -0.4, random_rotation(11))


def test_rotation_is_orthogonal():
    S = random_rotation(4)
    assert np.allclose(S @ S.T, np.eye(4))


def test_jacobian_matches_field():
    y = np.array([0.3, -0.2, 0.1, 0.05])
    h = 1e-6
    fd = np.column_stack([(CASE.field(y + h * e) - CASE.field(y - h * e)) / (2 * h) for e in np.eye(4)])
    assert np.allclose(CASE.jac(y), fd, atol=1e-8)


def test_forms_match_taylor_expansion():
    rng = np.random.default_rng(0)
    u = rng.normal(size=4)
    # f(s u) = s A u + s^2 B(u,u)/2 + s^3 C(u,u,u)/6 exactly (cubic field)
    s = np.array([0.5, 1.0, 1.5])
    values = np.array([CASE.field(si * u) for si in s])
    design = np.column_stack([s, s**2, s**3])
    coeffs = np.linalg.lstsq(design, values, rcond=None)[0]
    assert np.allclose(coeffs[0], CASE.A @ u)
    assert np.allclose(coeffs[1], CASE.B(u, u) / 2)
    assert np.allclose(coeffs[2], CASE.C(u, u, u) / 6)


def test_cubic_form_is_symmetric():
    rng = np.random.default_rng(1)
    x, y, z = rng.normal(size=(3, 4))
    assert np.allclose(CASE.C(x, y, z), CASE.C(z, x, y))
    assert np.allclose(CASE.C(x, y, z), CASE.C(y, x, z))


def test_eigenvector():
    q = CASE.q()
    lam = complex(CASE.gamma, CASE.omega)
    assert np.allclose(CASE.A @ q, lam * q) and np.linalg.norm(q) == pytest.approx(1)


def test_cycle_is_invariant():
    r, y3 = CASE.cycle_radius, CASE.cycle_y3
    y = CASE.S @ np.array([r, 0.0, y3, 0.0])
    w = CASE.hidden(CASE.field(y))
    # radial velocity and y3 velocity vanish on the cycle
    assert abs(w[0]) < 1e-12 and abs(w[2]) < 1e-12
    assert w[1] / r == pytest.approx(2 * np.pi / CASE.period)


def test_at_hopf_keeps_everything_but_gamma():
    h = CASE.at_hopf()
    assert h.gamma == 0 and h.omega == CASE.omega and np.array_equal(h.S, CASE.S)
