import numpy as np
import pytest
import scipy.linalg

import pce
from pce.errors import BadDim, DimensionMismatch
from pce.graph import LleConfig, embed, lle_graph, pce_graph


def principal_angle(a, b):
    """Largest principal angle between the column spans of a and b."""
    qa, _ = np.linalg.qr(a)
    qb, _ = np.linalg.qr(b)
    s = np.linalg.svd(qa.T @ qb, compute_uv=False)
    return float(np.arccos(np.clip(s.min(), -1.0, 1.0)))


def test_pce_graph_wraps_factor():
    factor = pce.CoefficientFactor(vk=np.eye(2)[:, :1], k=1)
    g = pce_graph(factor)
    assert g.kind == "pce-factored"
    assert np.allclose(g.vk @ g.vk.T, np.diag([1.0, 0.0]))


def test_pce_graph_full_rank_is_identity():
    g = pce_graph(pce.CoefficientFactor(vk=np.eye(4), k=4))
    assert np.allclose(g.vk @ g.vk.T, np.eye(4))


def test_pce_graph_from_diag_data():
    factor = pce.principal_coefficients(pce.skinny_svd(np.diag([2.0, 0.1])), 1.0)
    g = pce_graph(factor)
    assert np.allclose(g.vk @ g.vk.T, [[1.0, 0.0], [0.0, 0.0]], atol=1e-12)


def test_lle_midpoint_weights():
    x = np.array([0.0, 0.0])
    y = np.array([4.0, 2.0])
    d = np.column_stack([x, (x + y) / 2, y])
    g = lle_graph(d, LleConfig(p=2, reg=0.0))
    assert np.allclose(g.weights[:, 1], [0.5, 0.0, 0.5], atol=1e-10)


def test_lle_duplicate_neighbors_split_evenly():
    d = np.array([[0.0, 1.0, 1.0, 5.0]])
    g = lle_graph(d, LleConfig(p=2, reg=1e-3))
    w = g.weights[:, 0]
    assert w[1] == pytest.approx(w[2], abs=1e-10)


def test_lle_columns_sum_to_one():
    rng = np.random.default_rng(0)
    d = rng.standard_normal((5, 20))
    g = lle_graph(d, LleConfig(p=4))
    assert np.allclose(g.weights.sum(axis=0), 1.0, atol=1e-8)
    assert np.all(np.diag(g.weights) == 0.0)
    assert np.all(np.count_nonzero(g.weights, axis=0) <= 4)


def test_lle_bad_neighborhood_size():
    with pytest.raises(DimensionMismatch):
        lle_graph(np.zeros((3, 4)), LleConfig(p=4))


def test_embed_diag_pencil():
    d = np.diag([2.0, 0.1])
    factor = pce.principal_coefficients(pce.skinny_svd(d), 1.0)
    theta = embed(d, pce_graph(factor), 1, ridge=0.0)
    assert np.allclose(np.abs(theta[:, 0]), [0.5, 0.0], atol=1e-10)


@pytest.mark.parametrize("shape,lam", [((8, 14), 1.0), ((14, 8), 1.0), ((10, 10), 5.0)])
def test_embed_degenerate_spectrum_and_subspace(shape, lam):
    rng = np.random.default_rng(sum(shape))
    d = rng.standard_normal(shape)
    svd = pce.skinny_svd(d)
    factor = pce.principal_coefficients(svd, lam)
    k = factor.k
    theta = embed(d, pce_graph(factor), k)
    # metric orthonormality and the all-ones pencil spectrum
    gram = theta.T @ d @ d.T @ theta
    assert np.allclose(gram, np.eye(k), atol=1e-8)
    reference = svd.u[:, :k] / svd.sigma[:k]
    assert principal_angle(theta, reference) < 1e-6


def test_embed_identity_affinity_all_ones():
    rng = np.random.default_rng(2)
    d = rng.standard_normal((6, 9))
    theta = embed(d, pce_graph(pce.CoefficientFactor(vk=np.eye(9), k=9)), 6)
    assert np.allclose(theta.T @ d @ d.T @ theta, np.eye(6), atol=1e-8)


def test_embed_dim_exceeds_rank():
    d = np.diag([2.0, 0.1])
    factor = pce.principal_coefficients(pce.skinny_svd(d), 1.0)
    with pytest.raises(BadDim):
        embed(d, pce_graph(factor), 2)


def test_eigenvalue_count_matches_k():
    rng = np.random.default_rng(3)
    d = rng.standard_normal((10, 24))
    svd = pce.skinny_svd(d)
    factor = pce.principal_coefficients(svd, 0.5 / svd.sigma[4] ** 2 * 2)
    k = factor.k
    dv = d @ factor.vk
    left = dv @ dv.T
    right = d @ d.T
    values, _ = pce.generalized_top_eigs(left, right, 10)
    assert int(np.count_nonzero(values > 1e-8)) == k


def test_lle_embed_matches_dense_generalized_solve():
    # independent oracle: scipy's dense generalized symmetric eigensolver
    rng = np.random.default_rng(7)
    d = rng.standard_normal((9, 24))
    g = lle_graph(d, LleConfig(p=5))
    a = g.weights
    sym = a + a.T - a @ a.T
    left = d @ sym @ d.T
    left = 0.5 * (left + left.T)
    right = d @ d.T
    w_ref, v_ref = scipy.linalg.eigh(left, right)
    w_ref = w_ref[::-1]
    v_ref = v_ref[:, ::-1]
    dim = 4
    theta = embed(d, g, dim)
    values, _ = pce.generalized_top_eigs(left, right, dim)
    assert np.allclose(values, w_ref[:dim], atol=1e-8)
    assert principal_angle(theta, v_ref[:, :dim]) < 1e-6
    assert np.allclose(theta.T @ right @ theta, np.eye(dim), atol=1e-8)
