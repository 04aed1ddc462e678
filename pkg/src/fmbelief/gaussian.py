"""Gaussian beliefs, PSD matrix helpers and the Gaussian Wasserstein-2 distance."""

from dataclasses import dataclass

import numpy as np

from .errors import NotPSDError, ShapeError

SYM_TOL = 1e-10
PSD_TOL = 1e-9


def _check_square(M, name="matrix"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {M.shape}")
    return M


def _check_symmetric(M, name="matrix"):
    M = _check_square(M, name)
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    if M.size and np.max(np.abs(M - M.T)) > SYM_TOL * scale:
        raise ShapeError(f"{name} is not symmetric")
    return M


def symmetrize(M):
    M = np.asarray(M, dtype=float)
    return 0.5 * (M + M.T)


def clamp_psd(M, name="matrix"):
    """Symmetrize ``M`` and zero out eigenvalues in ``[-PSD_TOL, 0)``.

    Matrices that are already PSD are returned symmetrized but otherwise
    untouched, so well-conditioned covariances keep their exact bits.
    """
    M = symmetrize(_check_square(M, name))
    if M.size == 0:
        return M
    w, V = np.linalg.eigh(M)
    if w[0] < -PSD_TOL:
        raise NotPSDError(f"{name} has eigenvalue {w[0]:.3e} < -{PSD_TOL}")
    if w[0] >= 0.0:
        return M
    w = np.clip(w, 0.0, None)
    return symmetrize((V * w) @ V.T)


def sqrt_psd(M):
    """Symmetric PSD square root via eigendecomposition.

    Small negative eigenvalues (down to ``-PSD_TOL``) are clamped to zero.
    """
    M = _check_symmetric(M)
    if M.size == 0:
        return M.copy()
    return symmetrize(_sqrt_sym(symmetrize(M)))


@dataclass(frozen=True, eq=False)
class GaussianBelief:
    """Gaussian distribution N(mean, cov) over the state."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        if mean.ndim != 1:
            raise ShapeError(f"mean must be a vector, got shape {mean.shape}")
        cov = np.atleast_2d(np.asarray(self.cov, dtype=float))
        cov = _check_symmetric(cov, "cov")
        if cov.shape[0] != mean.shape[0]:
            raise ShapeError(
                f"mean has dimension {mean.shape[0]} but cov is {cov.shape}")
        cov = clamp_psd(cov, "cov")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self):
        return self.mean.shape[0]

    def second_moment(self):
        """E||x||^2 = ||m||^2 + Tr(P)."""
        return float(self.mean @ self.mean + np.trace(self.cov))

    def transform(self, U, shift=None):
        """Law of ``U x + shift`` for x ~ self."""
        U = np.asarray(U, dtype=float)
        mean = U @ self.mean
        if shift is not None:
            mean = mean + shift
        return GaussianBelief(mean, U @ self.cov @ U.T)


def w2_gaussian(b1, b2):
    """Wasserstein-2 distance between two Gaussian beliefs.

    W2^2 = ||m1 - m2||^2 + Tr(P1 + P2 - 2 (P1^1/2 P2 P1^1/2)^1/2)
    """
    if b1.dim != b2.dim:
        raise ShapeError(f"dimension mismatch: {b1.dim} vs {b2.dim}")
    return w2_from_moments(b1.mean, b1.cov, b2.mean, b2.cov)


def _sqrt_sym(M):
    w, V = np.linalg.eigh(M)
    if w[0] < -PSD_TOL:
        raise NotPSDError(f"eigenvalue {w[0]:.3e} < -{PSD_TOL}")
    # eigenvalues at round-off level are zero to working precision; their
    # sqrt (~1e-8) would otherwise dominate the error of the result
    floor = w.size * np.finfo(float).eps * max(w[-1], 0.0)
    w = np.where(w > floor, w, 0.0)
    return (V * np.sqrt(w)) @ V.T


def w2_from_moments(m1, P1, m2, P2):
    """w2_gaussian on raw, already-validated mean/covariance arrays."""
    if np.array_equal(m1, m2) and np.array_equal(P1, P2):
        # the trace term would otherwise leave ~1e-16 round-off under the sqrt
        return 0.0
    dm = m1 - m2
    s1 = _sqrt_sym(P1)
    inner = s1 @ P2 @ s1
    cross = _sqrt_sym(0.5 * (inner + inner.T))
    tr = float(np.trace(P1) + np.trace(P2))
    d2 = float(dm @ dm) + tr - 2.0 * float(np.trace(cross))
    if d2 < -PSD_TOL * max(1.0, tr):
        raise NotPSDError(f"squared W2 distance {d2:.3e} is negative")
    return float(np.sqrt(max(d2, 0.0)))
