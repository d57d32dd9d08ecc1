import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nullhyper.linalg import eig_sym, orthonormal_complement


def test_diagonal():
    e = eig_sym(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(e.eigenvalues, [1, 2, 3])
    np.testing.assert_allclose(np.abs(e.eigenvectors), np.eye(3)[:, [1, 2, 0]])


def test_off_diagonal_sign_convention():
    e = eig_sym([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(e.eigenvalues, [-1, 1])
    # first non-negligible component positive
    assert np.all(e.eigenvectors[0] > 0)


@given(arrays(np.float64, (4, 4), elements=st.floats(-3, 3)))
def test_random_symmetric(m):
    a = m + m.T
    e = eig_sym(a)
    v, w = e.eigenvectors, e.eigenvalues
    np.testing.assert_allclose(v @ np.diag(w) @ v.T, a, atol=1e-11)
    np.testing.assert_allclose(v.T @ v, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(a), atol=1e-11)
    assert np.all(np.diff(w) >= 0)


def test_rejects_asymmetric():
    with pytest.raises(ValueError):
        eig_sym([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        eig_sym(np.ones((2, 3)))


@given(arrays(np.float64, (5, 2), elements=st.floats(-1, 1)))
def test_orthonormal_complement(basis):
    if np.linalg.matrix_rank(basis, tol=1e-3) < 2:
        return
    c = orthonormal_complement(basis)
    assert c.shape == (5, 3)
    np.testing.assert_allclose(c.T @ c, np.eye(3), atol=1e-10)
    np.testing.assert_allclose(basis.T @ c, 0, atol=1e-10)
