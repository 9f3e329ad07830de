"""Principal coefficients embedding: dimension estimation, clean-data recovery,
model fitting and out-of-sample projection.

The pipeline is: skinny SVD of the training matrix, automatic choice of the
feature dimension k from the spectrum, the factored self-expression matrix
C = Vk Vk', and a graph embedding of C that yields the projection Theta.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadK,
    DegenerateDimension,
    DimensionMismatch,
    EmptySpectrum,
    NotSorted,
    TooLarge,
)
from .linalg import SvdFactors, skinny_svd

__all__ = [
    "PceModel",
    "CoefficientFactor",
    "estimate_dimension",
    "principal_coefficients",
    "recover_clean",
    "fit",
    "transform",
    "materialize_affinity",
]

AFFINITY_CAP = 20_000
TIE_TOL = 1e-12


@dataclass(frozen=True)
class CoefficientFactor:
    """Factored self-expression matrix: C = vk @ vk.T with vk column-orthonormal."""

    vk: np.ndarray
    k: int


@dataclass(frozen=True)
class PceModel:
    """Fitted projection.

    ``theta`` is m x k with theta.T @ D @ D.T @ theta = I for the training D.
    ``spectrum`` keeps the full training singular values so the dimension
    choice can be audited after the fact.
    """

    lam: float
    k: int
    theta: np.ndarray
    spectrum: np.ndarray
    train_cols: int
    center: np.ndarray | None = field(default=None)
    fit_seconds: float = field(default=0.0, compare=False)

    @property
    def ambient_dim(self):
        return self.theta.shape[0]


def estimate_dimension(sigma, lam):
    """Feature dimension minimizing r + lam * sum of the squared trailing values.

    Ties within 1e-12 absolute go to the smallest r.  Away from ties this
    equals the count of i with lam * sigma_i^2 > 1.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 1 or len(sigma) == 0:
        raise EmptySpectrum("need at least one singular value")
    if not np.all(np.isfinite(sigma)):
        raise NotSorted("spectrum contains non-finite values")
    if np.any(np.diff(sigma) > TIE_TOL):
        raise NotSorted("singular values must be nonincreasing")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    # cost(r) = r + lam * sum_{i>r} sigma_i^2, r = 0..len(sigma)
    tail = np.concatenate([np.cumsum((sigma**2)[::-1])[::-1], [0.0]])
    cost = np.arange(len(sigma) + 1) + lam * tail
    best = cost.min()
    return int(np.nonzero(cost <= best + TIE_TOL)[0][0])


def principal_coefficients(svd, lam):
    """First k right singular vectors, k chosen by ``estimate_dimension``.

    The n x n matrix C = vk @ vk.T is never formed here; use
    ``materialize_affinity`` when an explicit copy is wanted.
    """
    k = estimate_dimension(svd.sigma, lam)
    if k == 0:
        min_lam = (1.0 + 1e-6) / svd.sigma[0] ** 2
        raise DegenerateDimension(
            f"lambda={lam:g} keeps no dimensions for this spectrum; "
            f"use lambda > {min_lam:g}",
            min_lambda=min_lam,
        )
    return CoefficientFactor(vk=np.ascontiguousarray(svd.v[:, :k]), k=k)


def recover_clean(svd, k):
    """Split the SVD into a rank-k clean part and the residual error.

    Returns (d0, e) with d0 the best rank-k approximation and e the rest, so
    d0 + e reconstructs the input and ||e||_F^2 = sum of the trailing
    squared singular values.
    """
    if not 1 <= k <= svd.rank:
        raise BadK(f"k={k} outside 1..{svd.rank}")
    d0 = (svd.u[:, :k] * svd.sigma[:k]) @ svd.v[:, :k].T
    e = (svd.u[:, k:] * svd.sigma[k:]) @ svd.v[:, k:].T
    return d0, e


def materialize_affinity(factor, cap=AFFINITY_CAP):
    """Explicit n x n affinity C = vk @ vk.T; guarded by a size cap."""
    n = factor.vk.shape[0]
    if n > cap:
        raise TooLarge(f"materializing {n}x{n} exceeds the cap of {cap}")
    return factor.vk @ factor.vk.T


def fit(d, lam=1.0, center=False, ridge=None):
    """Fit a PCE model: estimate k, build the principal-coefficient graph and
    embed it, returning the m x k projection.

    ``center`` subtracts the per-row training mean first (off by default; the
    plain pipeline operates on raw columns).
    """
    from . import graph as _graph  # deferred: graph imports this module's types

    t0 = time.perf_counter()
    d = np.asarray(d, dtype=float)
    mean = None
    if center:
        mean = d.mean(axis=1, keepdims=True)
        d = d - mean
    svd = skinny_svd(d)
    factor = principal_coefficients(svd, lam)
    g = _graph.pce_graph(factor)
    theta = _graph.embed(d, g, factor.k, ridge=ridge, svd=svd)
    return PceModel(
        lam=float(lam),
        k=factor.k,
        theta=theta,
        spectrum=svd.spectrum,
        train_cols=d.shape[1],
        center=None if mean is None else mean[:, 0].copy(),
        fit_seconds=time.perf_counter() - t0,
    )


def transform(model, y):
    """Project columns of ``y`` into the learned feature space (z = theta' y)."""
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    if y.shape[0] != model.theta.shape[0]:
        raise DimensionMismatch(
            f"data has {y.shape[0]} rows, model expects {model.theta.shape[0]}"
        )
    if model.center is not None:
        y = y - model.center[:, None]
    return model.theta.T @ y
