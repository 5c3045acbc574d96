import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hordyn.errors import DomainError
from hordyn.simplex import (
    as_simplex_point,
    project_zero_mean,
    softmax,
    softmax_jacobian,
    tangent_basis,
)

scores = arrays(np.float64, st.integers(2, 8), elements=st.floats(-50, 50))


def test_softmax_uniform():
    np.testing.assert_allclose(softmax([0, 0, 0]), np.full(3, 1 / 3), atol=1e-15)


def test_softmax_two_point_value():
    # e / (e + 1) evaluated directly
    e = np.exp(1.0)
    np.testing.assert_allclose(softmax([1, 0]), [e / (e + 1), 1 / (e + 1)], rtol=1e-15)
    np.testing.assert_allclose(softmax([1, 0])[0], 0.7310585786300049, rtol=1e-15)


def test_softmax_shift_by_100():
    v = np.array([1.0, 2.0, 3.0])
    np.testing.assert_allclose(softmax(v + 100), softmax(v), atol=1e-15)


def test_softmax_no_overflow():
    x = softmax([700.0, -700.0, 0.0])
    assert np.all(np.isfinite(x))
    assert x[0] == pytest.approx(1.0)


@pytest.mark.parametrize("bad", [[np.nan, 1.0], [np.inf, 0.0], [1.0]])
def test_softmax_rejects(bad):
    with pytest.raises(DomainError):
        softmax(bad)


@given(scores, st.floats(-1e3, 1e3))
def test_softmax_properties(v, c):
    x = softmax(v)
    assert abs(x.sum() - 1) <= 1e-12
    assert np.all(x > 0) or np.ptp(v) > 700  # underflow only for huge spreads
    assert np.linalg.norm(softmax(v + c) - x) <= 1e-12


def test_jacobian_uniform():
    J = softmax_jacobian([0, 0, 0])
    np.testing.assert_allclose(J, np.eye(3) / 3 - np.ones((3, 3)) / 9, atol=1e-16)


def _fd_jacobian(v, h=1e-6):
    n = len(v)
    J = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        J[:, j] = (softmax(v + e) - softmax(v - e)) / (2 * h)
    return J


def test_jacobian_two_point_fd():
    v = np.array([1.0, 0.0])
    np.testing.assert_allclose(softmax_jacobian(v), _fd_jacobian(v), atol=1e-6)


def test_jacobian_fd_random_points(rng):
    for _ in range(100):
        v = rng.uniform(-5, 5, size=rng.integers(2, 7))
        np.testing.assert_allclose(softmax_jacobian(v), _fd_jacobian(v), atol=1e-6)


def test_jacobian_psd_kernel_ones(rng):
    for _ in range(100):
        n = int(rng.integers(2, 8))
        v = rng.uniform(-5, 5, n)
        J = softmax_jacobian(v)
        np.testing.assert_array_equal(J, J.T)
        np.testing.assert_allclose(J.sum(axis=1), 0, atol=1e-15)
        one = np.ones(n)
        assert abs(one @ J @ one) < 1e-12
        w = rng.normal(size=n)
        w -= w.mean()
        w /= np.linalg.norm(w)
        assert w @ J @ w > 0


def test_tangent_basis_n2():
    N = tangent_basis(2)
    np.testing.assert_allclose(N[:, 0], [1 / np.sqrt(2), -1 / np.sqrt(2)], atol=1e-15)


@pytest.mark.parametrize("n", range(2, 21))
def test_tangent_basis_orthonormal(n):
    N = tangent_basis(n)
    assert N.shape == (n, n - 1)
    np.testing.assert_allclose(N.T @ N, np.eye(n - 1), atol=1e-12)
    np.testing.assert_allclose(np.ones(n) @ N, 0, atol=1e-12)


def test_tangent_basis_n3_tight():
    N = tangent_basis(3)
    assert np.abs(N.T @ N - np.eye(2)).max() <= 1e-14
    assert np.abs(np.ones(3) @ N).max() <= 1e-14


def test_tangent_basis_deterministic():
    assert tangent_basis(7).tobytes() == tangent_basis(7).tobytes()


def test_tangent_projector(rng):
    N = tangent_basis(5)
    for _ in range(20):
        z = rng.normal(size=5)
        z -= z.mean()
        assert np.linalg.norm(N @ N.T @ z - z) <= 1e-12


@pytest.mark.parametrize("n", [1, 0, 2.5])
def test_tangent_basis_rejects(n):
    with pytest.raises(DomainError):
        tangent_basis(n)


def test_project_zero_mean(rng):
    np.testing.assert_array_equal(project_zero_mean([1, 1, 1]), [0, 0, 0])
    np.testing.assert_array_equal(project_zero_mean([2, 0]), [1, -1])
    for _ in range(20):
        v = rng.normal(size=4)
        np.testing.assert_allclose(softmax(project_zero_mean(v)), softmax(v), atol=1e-15)


@settings(max_examples=50)
@given(arrays(np.float64, 4, elements=st.floats(0.01, 1)))
def test_as_simplex_point_renormalizes(w):
    x = as_simplex_point(w / w.sum())
    assert abs(x.sum() - 1) <= 1e-12


def test_as_simplex_point_rejects():
    with pytest.raises(DomainError):
        as_simplex_point([0.5, 0.6])
    with pytest.raises(DomainError):
        as_simplex_point([1.5, -0.5])
