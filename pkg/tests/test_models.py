import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nullhyper.manifold import is_einstein
from nullhyper.models import (
    E12,
    PLUECKER_FORM,
    PlueckerChart,
    RetractionError,
    bivector_gram,
    build_geodesic_space,
    build_h2xh2,
    build_s2_x_r2,
    build_s2xs2,
    hodge_star_matrix,
    wedge,
)
from nullhyper.parastructure import verify_paracomplex

vec4 = arrays(np.float64, 4, elements=st.floats(-2, 2))


def test_hodge_star_is_involutive_isometry():
    star, gram = hodge_star_matrix(0), bivector_gram(0)
    np.testing.assert_allclose(star @ star, np.eye(6))
    np.testing.assert_allclose(star.T @ gram @ star, gram)
    assert np.trace(star) == 0


@given(vec4, vec4, vec4, vec4)
def test_hodge_star_defining_identity(a, b, c, d):
    alpha, beta = wedge(a, b), wedge(c, d)
    # α∧*β = ⟨⟨α,β⟩⟩ vol, with the wedge pairing given by the Plücker form
    lhs = alpha @ PLUECKER_FORM @ (hodge_star_matrix(0) @ beta)
    assert lhs == pytest.approx(alpha @ bivector_gram(0) @ beta, abs=1e-9)


@given(vec4, vec4)
def test_simple_bivectors_are_decomposable(a, b):
    xi = wedge(a, b)
    assert xi @ PLUECKER_FORM @ xi == pytest.approx(0.0, abs=1e-9)


def test_retraction_converges_quadratically():
    pc = PlueckerChart(E12)
    z = np.array([0.2, -0.15, 0.1, 0.25])
    xi = pc.to_bivector(z)
    assert np.max(np.abs(pc.constraints(xi))) <= 1e-12
    h = [e for e in pc.last_history if e > 1e-14]
    assert len(h) >= 3
    for prev, nxt in zip(h, h[1:]):
        assert nxt <= 10 * prev ** 2
    np.testing.assert_allclose(pc.from_bivector(xi), z, atol=1e-12)


def test_retraction_reports_divergence():
    pc = PlueckerChart(E12)
    with pytest.raises(RetractionError):
        pc.retract(np.zeros(6), max_iter=3)


def test_bad_base_bivector():
    with pytest.raises(ValueError):
        PlueckerChart(np.array([1.0, 0, 0, 0, 0, 1]))


@pytest.mark.parametrize("build,rbar", [(build_s2xs2, 4.0), (build_h2xh2, -4.0), (build_geodesic_space, 8.0)])
def test_models_are_einstein(build, rbar):
    m = build()
    pts = m.grid((2, 2, 2, 2)) if m.label != "geodesic-space" else list(
        np.random.default_rng(3).uniform(-0.3, 0.3, (8, 4)))
    res = is_einstein(m.metric, pts)
    assert res.einstein
    assert res.rbar == pytest.approx(rbar, abs=1e-6)
    assert m.rbar == rbar


def test_non_einstein_control():
    m = build_s2_x_r2()
    assert not is_einstein(m.metric, m.grid((2, 2, 2, 2))).einstein


def test_geodesic_space_structure():
    m = build_geodesic_space()
    pts = list(np.random.default_rng(5).uniform(-0.3, 0.3, (4, 4)))
    rep = verify_paracomplex(m.pstruct, m.metric, pts)
    assert rep.passed, rep.residuals


def test_only_riemannian_geodesic_space():
    with pytest.raises(NotImplementedError):
        build_geodesic_space(p=1)


def test_retraction_stalls_far_from_quadric():
    pc = PlueckerChart(E12)
    with pytest.raises(RetractionError, match="stalled"):
        pc.retract(np.array([3.0, 0.2, 0.1, -0.4, 0.3, 2.0]), max_iter=2)
