"""Deterministic PCA on top of a cyclic Jacobi eigensolver."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kcswitch import kernels


@dataclass(frozen=True)
class PCAModel:
    mean: np.ndarray
    components: np.ndarray          # k x d, rows orthonormal
    explained_variance: np.ndarray  # k, non-increasing
    total_variance: float

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    @property
    def explained_variance_ratio(self) -> np.ndarray:
        if self.total_variance <= 0.0:
            return np.zeros_like(self.explained_variance)
        return self.explained_variance / self.total_variance


def symmetric_eigh(matrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a symmetric matrix, eigenvalues descending.

    Eigenvectors are returned column-wise, each flipped so its
    largest-magnitude entry is positive.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    sym = 0.5 * (matrix + matrix.T)
    values, vectors, _ = kernels.jacobi_eigh(sym)
    order = np.argsort(-values, kind="stable")
    values, vectors = values[order], vectors[:, order]
    return values, _fix_signs(vectors)


def _fix_signs(vectors):
    vectors = vectors.copy()
    for j in range(vectors.shape[1]):
        pivot = np.argmax(np.abs(vectors[:, j]))
        if vectors[pivot, j] < 0:
            vectors[:, j] = -vectors[:, j]
    return vectors


def fit_pca(X, k: int) -> PCAModel:
    """Top-``k`` principal axes of the rows of ``X`` (n x d).

    The covariance is decomposed directly when d <= n. For wide data (768-d
    embeddings over ~100 songs) the n x n Gram matrix of the centred rows is
    decomposed instead; it shares the non-zero spectrum and maps back to the
    same axes.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be a 2-D matrix")
    n, d = X.shape
    if n < 2:
        raise ValueError("PCA needs at least two rows")
    if not 1 <= k <= min(n - 1, d):
        raise ValueError(f"k={k} outside 1..{min(n - 1, d)}")
    mean = X.mean(axis=0)
    Xc = X - mean
    total = float(np.sum(Xc * Xc) / (n - 1))

    if d > n:
        gram = Xc @ Xc.T / (n - 1)
        values, u = symmetric_eigh(gram)
        values, u = values[:k], u[:, :k]
        if np.all(values > 1e-12 * max(total, 1e-300)):
            comps = (Xc.T @ u) / np.sqrt(values * (n - 1))
            # re-orthonormalise against round-off, keep orientation
            comps, r = np.linalg.qr(comps)
            comps = comps * np.sign(np.diag(r))
            comps = _fix_signs(comps).T
            return PCAModel(mean, comps, np.clip(values, 0.0, None), total)
        # rank-deficient wide data: fall through to the covariance route

    cov = Xc.T @ Xc / (n - 1)
    values, vectors = symmetric_eigh(cov)
    return PCAModel(mean, vectors[:, :k].T.copy(), np.clip(values[:k], 0.0, None), total)


def transform_pca(model: PCAModel, x) -> np.ndarray:
    """Project a vector (or the rows of a matrix) onto the model's axes."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != model.mean.shape[0]:
        raise ValueError(f"expected dimension {model.mean.shape[0]}, got {x.shape[-1]}")
    return (x - model.mean) @ model.components.T


def inverse_transform_pca(model: PCAModel, z) -> np.ndarray:
    return np.asarray(z, dtype=np.float64) @ model.components + model.mean
