import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nullhyper import hypersurface as hs
from nullhyper.checks import gauge_quantities, random_rotation
from nullhyper.families import (
    SQRT_HALF,
    graph_flat,
    immersion_mab,
    immersion_sigma_t,
    immersion_tangential,
    null_hyperplane_flat,
    umbilic_sphere,
)
from nullhyper.fd import fd_derivative
from nullhyper.models import PRODUCT_P


def geo_at(fam, u, **kw):
    model, imm = fam.at(u)
    return hs.analyze(imm, model, u, **kw)


def shape_at(fam, u, **kw):
    model, imm = fam.at(u)
    return hs.shape_operator(imm, model, u, **kw)


def centre(fam):
    return 0.5 * (np.array(fam.sample_lower) + np.array(fam.sample_upper))


def sign_matched(measured, predicted):
    """Distance between eigenvalue multisets up to a global sign."""
    p = np.sort(predicted)
    return min(np.max(np.abs(np.sort(s * measured) - p)) for s in (1, -1))


@pytest.mark.parametrize("space", ["s2xs2", "h2xh2"])
@pytest.mark.parametrize("t", [-0.9, -0.5, 0.0, 0.3, 0.5, 0.9])
def test_sigma_t_eigenvalues(space, t):
    fam = immersion_sigma_t(space, t)
    for u in fam.grid((2, 2, 2))[::3]:
        sd = shape_at(fam, u)
        assert abs(sd.c_plus) < 1e-9
        assert sign_matched(sd.lambdas, fam.predict(u)["lambdas"]) < 1e-6


def test_sigma_t_zero_values():
    sd = shape_at(immersion_sigma_t("s2xs2", 0.0), centre(immersion_sigma_t("s2xs2", 0.0)))
    np.testing.assert_allclose(np.sort(sd.lambdas), [-SQRT_HALF, 0, SQRT_HALF], atol=1e-9)
    assert abs(sd.mean_h) < 1e-12
    fam = immersion_sigma_t("h2xh2", 0.0)
    sd = shape_at(fam, centre(fam))
    np.testing.assert_allclose(np.sort(np.abs(sd.lambdas)), [0, SQRT_HALF, SQRT_HALF], atol=1e-9)
    assert abs(sd.mean_h) == pytest.approx(np.sqrt(2) / 3, abs=1e-9)


@pytest.mark.parametrize("space,r", [("s2xs2", 1.0), ("h2xh2", -1.0)])
def test_sigma_t_scalar_curvature_and_angle(space, r):
    fam = immersion_sigma_t(space, 0.5)
    for u in fam.grid((2, 2, 2))[::4]:
        geo = geo_at(fam, u)
        assert hs.induced_scalar_curvature(geo) == pytest.approx(r, abs=1e-5)
        assert hs.gauss_scalar_check(geo, fam.rbar) < 1e-5
        assert hs.null_scalar_formula_check(geo) < 1e-5
        sd = hs._shape_data(geo, hs.NULL_TOL)
        assert abs(sd.extras["cos_theta"]) < 1e-7
        assert sd.extras["angle_relation_residual"] < 1e-7
        assert hs.angle_identity_check(sd, fam.rbar) < 1e-5
        assert abs(hs.trace_pt_a2(geo)) < 1e-6
        assert hs.laplacian_c_check(geo) < 1e-4
        assert hs.hessian_c_check(geo) < 1e-4
        assert hs.gradient_c_check(geo) < 1e-7
        assert hs.x_derivative_check(geo) < 1e-5


def test_flat_null_hyperplane_is_trivial():
    for n in [(SQRT_HALF, 0, SQRT_HALF, 0), (0, SQRT_HALF, 0, SQRT_HALF)]:
        fam = null_hyperplane_flat(n)
        geo = geo_at(fam, centre(fam))
        sd = hs._shape_data(geo, hs.NULL_TOL)
        assert sd.c_plus == pytest.approx(0, abs=1e-15)
        np.testing.assert_allclose(sd.a_plus, 0, atol=1e-15)
        assert hs.induced_scalar_curvature(geo) == pytest.approx(0, abs=1e-15)
        assert sd.extras["gauge"]
        for check in (hs.gradient_c_check, hs.hessian_c_check, hs.laplacian_c_check,
                      hs.x_derivative_check, hs.null_scalar_formula_check):
            assert check(geo) == pytest.approx(0, abs=1e-14)
        assert hs.angle_identity_check(sd, 0.0) == 0.0
        assert hs.connection_relations_check(*reversed(fam.at(centre(fam))), centre(fam)) < 1e-12


def graph_c_oracle(u):
    """C₊ of {x⁴ = x¹²/4} from the explicit normal (-x¹/2, 0, 0, 1)."""
    n = np.array([-u[0] / 2, 0, 0, 1.0])
    return (n @ PRODUCT_P @ n) / (n @ n)


def test_graph_normal_and_c():
    fam = graph_flat()
    sd = hs.frame_and_normals(*reversed(fam.at(np.zeros(3))), np.zeros(3))
    np.testing.assert_allclose(np.abs(sd.n_plus), [0, 0, 0, 1], atol=1e-15)
    assert sd.c_plus == pytest.approx(-1.0)
    assert sd.eps_minus == -1 and sd.theta is None


@given(st.floats(-0.45, 0.45), st.floats(-0.45, 0.45), st.floats(-0.45, 0.45))
@settings(max_examples=20)
def test_graph_gradient_of_c_against_oracle(a, b, c):
    fam = graph_flat()
    u = np.array([a, b, c])
    geo = geo_at(fam, u)
    assert geo.c_plus == pytest.approx(graph_c_oracle(u), abs=1e-14)
    tv = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [a / 2, 0, 0]])
    grad = np.linalg.solve(tv.T @ tv, fd_derivative(graph_c_oracle, u, 1).value)
    rhs = -2.0 * geo.a_u.value @ geo.x_u.value
    np.testing.assert_allclose(grad, rhs, atol=1e-6)
    assert hs.hessian_c_check(geo) < 1e-5
    assert hs.laplacian_c_check(geo) < 1e-5
    assert hs.x_derivative_check(geo) < 1e-5


def model_points(n, seed=11):
    fams = [immersion_sigma_t("s2xs2", 0.4), immersion_sigma_t("h2xh2", -0.6),
            immersion_sigma_t("h2xh2", 0.0), immersion_mab(), null_hyperplane_flat(),
            graph_flat(), immersion_tangential(umbilic_sphere())]
    rng = np.random.default_rng(seed)
    for k in range(n):
        fam = fams[k % len(fams)]
        yield fam, rng.uniform(fam.sample_lower, fam.sample_upper)


def test_null_classification_is_two_sided():
    for fam, u in model_points(200):
        model, imm = fam.at(u)
        sd = hs.frame_and_normals(imm, model, u)
        geo = hs.analyze(imm, model, u)
        g_minus = model.metric.at(geo.x) @ model.pstruct.at(geo.x)
        q = abs(sd.n_minus @ g_minus @ sd.n_minus)
        assert (abs(sd.c_plus) < 1e-8) == (q < 1e-7), (fam.label, u)
        assert (abs(sd.c_plus) < 1e-8) == fam.expect_null
        assert abs(sd.c_plus) <= 1 + 1e-9
        if sd.c_minus is not None:
            assert sd.c_minus == pytest.approx(1 / abs(sd.c_plus))


def test_trivial_principal_direction():
    for fam, u in model_points(40, seed=3):
        if not fam.expect_null:
            continue
        sd = shape_at(fam, u)
        bound = 1e-7 * (1 + np.linalg.norm(sd.a_plus, 2))
        assert sd.extras["trivial_direction_residual"] <= bound


@given(st.integers(0, 2**32 - 1), st.sampled_from([-1, 1]))
@settings(max_examples=25)
def test_gauge_and_orientation_invariance(seed, orientation):
    rng = np.random.default_rng(seed)
    fam = [immersion_sigma_t("s2xs2", 0.3), immersion_mab(), graph_flat()][seed % 3]
    u = rng.uniform(fam.sample_lower, fam.sample_upper)
    model, imm = fam.at(u)
    geo1 = hs.analyze(imm, model, u)
    geo2 = hs.analyze(imm, model, u, orientation=orientation, frame_rotation=random_rotation(rng))
    a = gauge_quantities(hs._shape_data(geo1, hs.NULL_TOL), 1)
    b = gauge_quantities(hs._shape_data(geo2, hs.NULL_TOL), orientation)
    assert a.keys() == b.keys()
    for k in a:
        np.testing.assert_allclose(a[k], b[k], atol=1e-8)
    assert hs.induced_scalar_curvature(geo1) == pytest.approx(hs.induced_scalar_curvature(geo2), abs=1e-8)
    # orientation flip negates the shape operator
    assert geo2.mean_h.value == pytest.approx(orientation * geo1.mean_h.value, abs=1e-12)


def test_principal_angle_requires_null_point():
    fam = graph_flat()
    sd = shape_at(fam, np.zeros(3))
    with pytest.raises(ValueError):
        hs.principal_angle(sd)
    with pytest.raises(ValueError):
        hs.principal_angle_data(geo_at(fam, np.zeros(3)))


def test_rank_deficient_immersion():
    fam = immersion_sigma_t("s2xs2", 0.2)
    model, imm = fam.at(centre(fam))
    flat = hs.Immersion(imm.source, imm.target, lambda u: imm.map(u * np.array([1.0, 1.0, 0.0])), "flat")
    with pytest.raises(ValueError, match="rank"):
        hs.analyze(flat, model, centre(fam))


def family_shapes(fam, counts=(2, 2, 2), orientation=1):
    return [shape_at(fam, u, orientation=orientation) for u in fam.grid(counts)]


@pytest.mark.parametrize("space", ["s2xs2", "h2xh2"])
def test_cmc_relation_sigma_t(space):
    fam = immersion_sigma_t(space, 0.3)
    for o in (1, -1):
        rep = hs.cmc_relation_check(family_shapes(fam, orientation=o), fam.rbar)
        assert rep.preconditions_met, rep.reason
        assert rep.relation_residual < 1e-6
        assert rep.minus_8_l1l2 == pytest.approx(fam.rbar, abs=1e-6)


def test_cmc_relation_mab_is_minimal_and_violates():
    fam = immersion_mab()
    rep = hs.cmc_relation_check(family_shapes(fam), fam.rbar)
    assert not rep.preconditions_met and "minimal" in rep.reason
    sd = shape_at(fam, fam.extras["point_with"](0.3))
    l1, l2 = sd.extras["lambda1"], sd.extras["lambda2"]
    assert -8 * l1 * l2 == pytest.approx(4 * 0.09 / 0.91, abs=1e-6)


def test_cmc_relation_not_cmc():
    shapes = family_shapes(immersion_sigma_t("s2xs2", 0.3)) + family_shapes(immersion_sigma_t("s2xs2", 0.5))
    rep = hs.cmc_relation_check(shapes, 4.0)
    assert "not CMC" in rep.reason


@pytest.mark.parametrize("space", ["s2xs2", "h2xh2"])
def test_connection_relations_sigma_t(space):
    fam = immersion_sigma_t(space, 0.5)
    u = centre(fam)
    model, imm = fam.at(u)
    nfd, res = hs.connection_coefficients(imm, model, u)
    assert max(res.values()) < 1e-4
    assert set(res) >= {"k", "mu", "nu", "w12^3", "w31^3"}


def test_umbilic_congruence_is_minimal_and_null():
    fam = immersion_tangential(umbilic_sphere())
    for u in fam.grid((2, 2, 3)):
        sd = shape_at(fam, u)
        assert abs(sd.c_plus) < 1e-6
        assert abs(sd.mean_h) < 1e-5
