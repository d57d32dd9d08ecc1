import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nullhyper.families import (
    SQRT_HALF,
    clifford_torus,
    graph_flat,
    immersion_mab,
    immersion_sigma_t,
    immersion_tangential,
    mab_lambda,
    null_hyperplane_flat,
    sigma_t_predictions,
    tangential_predictions,
    umbilic_sphere,
)
from nullhyper.models import hyperboloid_point, sphere_point

LORENTZ = np.diag([1.0, 1.0, -1.0])


def test_sigma_t_predictions_s2xs2_half():
    p = sigma_t_predictions("s2xs2", 0.5)
    l1, l2 = p["nontrivial"]
    assert l1 == pytest.approx(np.sqrt(1.5), abs=1e-6)  # 1.224745
    assert l2 == pytest.approx(-1 / np.sqrt(6), abs=1e-6)  # -0.408248
    assert p["lambdas"][1] == 0.0
    assert l1 * l2 == pytest.approx(-0.5)


def test_sigma_t_predictions_minimal_only_at_zero():
    assert sigma_t_predictions("s2xs2", 0.0)["H"] == pytest.approx(0.0, abs=1e-15)
    assert sigma_t_predictions("s2xs2", 0.0)["lambdas"] == pytest.approx([-SQRT_HALF, 0, SQRT_HALF])
    for t in (-0.5, 0.3, 0.9):
        assert abs(sigma_t_predictions("s2xs2", t)["H"]) > 1e-3


def test_sigma_t_predictions_h2xh2_zero():
    p = sigma_t_predictions("h2xh2", 0.0)
    assert p["nontrivial"] == pytest.approx((SQRT_HALF, SQRT_HALF))
    assert p["H"] == pytest.approx(np.sqrt(2) / 3)


@pytest.mark.parametrize("t", [1.0, -1.0, 1.5])
def test_sigma_t_rejects_out_of_range(t):
    with pytest.raises(ValueError):
        immersion_sigma_t("s2xs2", t)


def test_sigma_t_rejects_unknown_space():
    with pytest.raises(ValueError):
        immersion_sigma_t("flat", 0.2)


@given(st.floats(-0.95, 0.95), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_sigma_t_lies_on_tube_s2(t, a, b, c):
    fam = immersion_sigma_t("s2xs2", t)
    lo, hi = np.array(fam.sample_lower), np.array(fam.sample_upper)
    u = lo + np.array([a, b, c]) * (hi - lo)
    _, imm = fam.at(u)
    x4 = np.asarray(imm.map(u))
    x, y = np.asarray(sphere_point(x4[0], x4[1])), np.asarray(sphere_point(x4[2], x4[3]))
    assert x @ y == pytest.approx(t, abs=1e-12)


@given(st.floats(0.05, 0.95), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_sigma_t_lies_on_tube_h2(t, a, b, c):
    fam = immersion_sigma_t("h2xh2", t)
    lo, hi = np.array(fam.sample_lower), np.array(fam.sample_upper)
    u = lo + np.array([a, b, c]) * (hi - lo)
    _, imm = fam.at(u)
    x4 = np.asarray(imm.map(u))
    x = np.asarray(hyperboloid_point(x4[0], x4[1]))
    y = np.asarray(hyperboloid_point(x4[2], x4[3]))
    assert x @ LORENTZ @ y == pytest.approx(-1 / t, rel=1e-10)


def test_mab_lambda_values():
    assert mab_lambda(0.0) == 0.0
    assert mab_lambda(SQRT_HALF) == pytest.approx(SQRT_HALF)
    # -8λ₁λ₂ = 8λ² = 4c²/(1-c²)
    assert 8 * mab_lambda(0.3) ** 2 == pytest.approx(4 * 0.09 / 0.91)
    assert 8 * mab_lambda(0.3) ** 2 == pytest.approx(0.3956, abs=1e-4)
    assert 8 * mab_lambda(SQRT_HALF) ** 2 == pytest.approx(4.0)


def test_mab_point_with_and_constraint():
    fam = immersion_mab()
    a, b = np.array([1.0, 0, 0]), np.array([0, 0, 1.0])
    for c in (0.0, 0.3, SQRT_HALF):
        u = fam.extras["point_with"](c)
        assert fam.predict(u)["x_dot_a"] == pytest.approx(c, abs=1e-12)
        x4 = np.asarray(fam.at(u)[1].map(u))
        x, y = np.asarray(sphere_point(x4[0], x4[1])), np.asarray(sphere_point(x4[2], x4[3]))
        assert x @ a + y @ b == pytest.approx(0.0, abs=1e-12)


def test_mab_rejects_non_unit():
    with pytest.raises(ValueError):
        immersion_mab(a=(1.0, 1.0, 0.0))


def test_null_hyperplane_normals():
    null_hyperplane_flat((SQRT_HALF, 0, SQRT_HALF, 0))
    null_hyperplane_flat((0, SQRT_HALF, 0, SQRT_HALF))
    with pytest.raises(ValueError, match="not null"):
        null_hyperplane_flat((1.0, 0, 0, 0))
    with pytest.raises(ValueError):
        null_hyperplane_flat((1.0, 0, 1.0, 0))


def test_graph_family_is_not_expected_null():
    assert not graph_flat().expect_null


@pytest.mark.parametrize("surface", [umbilic_sphere(), umbilic_sphere(0.6), clifford_torus()])
def test_surface_frames(surface):
    rng = np.random.default_rng(0)
    for _ in range(5):
        v = rng.uniform(surface.lower, surface.upper)
        x, e1, e2, nu = (np.asarray(f(v)) for f in (surface.point, surface.e1, surface.e2, surface.normal))
        frame = np.stack([x, e1, e2, nu])
        np.testing.assert_allclose(frame @ frame.T, np.eye(4), atol=1e-12)
        # FD shape operator against the closed-form curvatures
        np.testing.assert_allclose(np.sort(surface.principal_curvatures(v)), np.sort(surface.kappa), atol=1e-8)


def test_umbilic_curvature_is_cot_radius():
    assert umbilic_sphere(np.pi / 4).kappa == pytest.approx((1.0, 1.0))
    assert umbilic_sphere(0.6).kappa[0] == pytest.approx(1 / np.tan(0.6))


def test_tangential_predictions():
    p = tangential_predictions((1.0, -1.0), 0.3)
    assert p["nontrivial"] == pytest.approx((np.cos(0.6), np.cos(0.6)))
    assert p["H"] == pytest.approx(2 / 3 * np.cos(0.6))
    u = tangential_predictions((1.0, 1.0), 1.1)
    assert u["nontrivial"] == pytest.approx((1.0, -1.0)) and u["H"] == 0.0


def test_tangential_rejects_totally_geodesic():
    s = umbilic_sphere(np.pi / 2)
    with pytest.raises(ValueError):
        immersion_tangential(s)


def test_tangential_image_on_quadric():
    fam = immersion_tangential(clifford_torus())
    u = np.array([0.5, 0.7, 1.0])
    model, imm = fam.at(u)
    pc = model.pluecker
    z = np.asarray(imm.map(u))
    np.testing.assert_allclose(z, 0.0, atol=1e-12)  # chart centred at Φ(u)
    xi = pc.to_bivector(np.array([0.01, -0.02, 0.0, 0.03]))
    assert np.max(np.abs(pc.constraints(xi))) < 1e-12
