"""Small dense linear-algebra helpers: spectral norm and sphere sampling."""

import math

import numpy as np

from .errors import ParameterError

# Fixed-seed start vectors make power iteration deterministic across calls
# without risking a start that is exactly orthogonal to the top eigenspace.
_START_RNG = np.random.Generator(np.random.PCG64(0x5EED))
_START_CACHE: dict[int, np.ndarray] = {}


def _start_vector(n: int) -> np.ndarray:
    v = _START_CACHE.get(n)
    if v is None:
        v = _START_RNG.standard_normal(n)
        v /= np.linalg.norm(v)
        _START_CACHE[n] = v
    return v


def operator_norm(a: np.ndarray, tol: float = 1e-10, max_iter: int = 500,
                  start: np.ndarray | None = None) -> float:
    """Spectral norm of ``a`` by power iteration on ``aᵀa``.

    Iterates v <- aᵀ(a v) with normalization until the Rayleigh estimate of
    the top singular value stabilizes within ``tol`` (relative) or
    ``max_iter`` sweeps. ``start`` warm-starts the iteration.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ParameterError(f"operator_norm expects a matrix, got ndim={a.ndim}")
    if a.size == 0:
        return 0.0
    if not np.any(a):
        return 0.0
    v = _start_vector(a.shape[1]) if start is None else start / np.linalg.norm(start)
    est = 0.0
    for _ in range(max_iter):
        w = a @ v
        s = np.linalg.norm(w)
        if s == 0.0:
            # v landed in the null space; nudge with the canonical start
            v = _start_vector(a.shape[1])
            continue
        v = a.T @ w
        nv = np.linalg.norm(v)
        v /= nv
        new_est = np.sqrt(nv)
        if abs(new_est - est) <= tol * max(1.0, new_est):
            return float(new_est)
        est = new_est
    return float(est)


def top_singular_vector(a: np.ndarray, tol: float = 1e-12,
                        max_iter: int = 1000) -> tuple[float, np.ndarray]:
    """Top singular value and right singular vector via power iteration."""
    a = np.asarray(a, dtype=float)
    v = _start_vector(a.shape[1])
    est = 0.0
    for _ in range(max_iter):
        w = a.T @ (a @ v)
        nv = np.linalg.norm(w)
        if nv == 0.0:
            return 0.0, v
        v = w / nv
        new_est = np.sqrt(nv)
        if abs(new_est - est) <= tol * max(1.0, new_est):
            break
        est = new_est
    return float(new_est), v


def spectral_norm(a: np.ndarray) -> float:
    """Operator norm tuned to the matrix size.

    2x2 matrices use the closed-form top singular value; LAPACK singular
    values beat Python-level power iteration by an order of magnitude for
    the other small matrices this package works with, so iteration only
    takes over for large inputs where its O(n^2)-per-sweep cost wins.
    """
    a = np.asarray(a, dtype=float)
    if a.shape == (2, 2):
        m00, m01 = float(a[0, 0]), float(a[0, 1])
        m10, m11 = float(a[1, 0]), float(a[1, 1])
        fro = m00 * m00 + m01 * m01 + m10 * m10 + m11 * m11
        det = m00 * m11 - m01 * m10
        gap = math.sqrt(max(fro * fro - 4.0 * det * det, 0.0))
        return math.sqrt(0.5 * (fro + gap))
    if a.shape[0] <= 32:
        if not np.any(a):
            return 0.0
        return float(np.linalg.svd(a, compute_uv=False)[0])
    return operator_norm(a)


def uniform_sphere(n: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from the sphere of the given radius in R^n."""
    v = rng.standard_normal(n)
    nv = np.linalg.norm(v)
    while nv == 0.0:  # probability zero, but keep the draw well-defined
        v = rng.standard_normal(n)
        nv = np.linalg.norm(v)
    return (radius / nv) * v
