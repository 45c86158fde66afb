"""Principal components by power iteration with deflation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateInput

POWER_TOL = 1e-10
POWER_MAX_ITER = 10_000


@dataclass
class PcaResult:
    coordinates: np.ndarray          # n x out_dim
    explained_variance: list[float]  # ratio of total variance per component
    components: np.ndarray           # out_dim x d, orthonormal rows
    eigenvalues: list[float]


def _orthogonal_fallback(previous: list[np.ndarray], dim: int) -> np.ndarray:
    """Deterministic unit vector orthogonal to the components found so far.

    Used when the deflated covariance has (numerically) no mass left, i.e.
    the data rank is below out_dim.
    """
    for axis in range(dim):
        v = np.zeros(dim)
        v[axis] = 1.0
        for u in previous:
            v -= np.dot(v, u) * u
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            return v / norm
    raise AssertionError("no orthogonal direction left")


def pca_project(vectors, out_dim: int = 2, tol: float = POWER_TOL,
                max_iter: int = POWER_MAX_ITER, seed: int = 0) -> PcaResult:
    """Mean-center, then extract the top out_dim covariance eigenvectors.

    Components are ordered by eigenvalue descending; each component's
    largest-magnitude entry is made positive. Explained-variance ratios are
    eigenvalues over the covariance trace.
    """
    X = np.asarray(vectors, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need at least 2 vectors")
    n, d = X.shape
    if out_dim > d:
        raise ValueError(f"out_dim {out_dim} exceeds input dimension {d}")
    centered = X - X.mean(axis=0)
    if np.max(np.abs(centered)) == 0.0:
        raise DegenerateInput("all points identical")
    cov = centered.T @ centered / (n - 1)
    total_variance = float(np.trace(cov))

    rng = np.random.default_rng(seed)
    components: list[np.ndarray] = []
    eigenvalues: list[float] = []
    work = cov.copy()
    for _ in range(out_dim):
        v = rng.standard_normal(d)
        v /= np.linalg.norm(v)
        converged = False
        for _ in range(max_iter):
            w = work @ v
            norm = np.linalg.norm(w)
            if norm < 1e-14:
                break
            w /= norm
            if np.linalg.norm(w - v) < tol:
                v = w
                converged = True
                break
            v = w
        if not converged and np.linalg.norm(work @ v) < 1e-14:
            v = _orthogonal_fallback(components, d)
        # re-orthogonalize against found components (guards deflation drift)
        for u in components:
            v -= np.dot(v, u) * u
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            v = _orthogonal_fallback(components, d)
        else:
            v /= norm
        if v[int(np.argmax(np.abs(v)))] < 0:
            v = -v
        lam = float(v @ cov @ v)
        components.append(v)
        eigenvalues.append(max(lam, 0.0))
        work = work - lam * np.outer(v, v)

    comp = np.vstack(components)
    ratios = [lam / total_variance for lam in eigenvalues]
    return PcaResult(coordinates=centered @ comp.T, explained_variance=ratios,
                     components=comp, eigenvalues=eigenvalues)
