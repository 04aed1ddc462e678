"""Linear-Gaussian POMDP model and quadratic stage costs."""

from dataclasses import dataclass

import numpy as np

from .errors import NotPSDError, ShapeError
from .gaussian import PSD_TOL, GaussianBelief, _check_symmetric


def _min_eig(M):
    return float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])


@dataclass(frozen=True, eq=False)
class LqgModel:
    """x' = A x + B u + w,  y = C x + v,  cost x'Qx + u'Ru, prior N(m0, P0)."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    sigma_w: np.ndarray
    sigma_v: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    prior_mean: np.ndarray
    prior_cov: np.ndarray
    gamma: float = 0.99

    def __post_init__(self):
        arr = {}
        for name in ("A", "B", "C", "sigma_w", "sigma_v", "Q", "R", "prior_cov"):
            a = np.atleast_2d(np.asarray(getattr(self, name), dtype=float))
            a.setflags(write=False)
            arr[name] = a
        m0 = np.atleast_1d(np.asarray(self.prior_mean, dtype=float))
        m0.setflags(write=False)
        arr["prior_mean"] = m0

        n = arr["A"].shape[0]
        m = arr["B"].shape[1]
        p = arr["C"].shape[0]
        expected = {
            "A": (n, n), "B": (n, m), "C": (p, n), "sigma_w": (n, n),
            "sigma_v": (p, p), "Q": (n, n), "R": (m, m), "prior_cov": (n, n),
        }
        for name, shape in expected.items():
            if arr[name].shape != shape:
                raise ShapeError(f"{name} has shape {arr[name].shape}, expected {shape}")
        if m0.shape != (n,):
            raise ShapeError(f"prior_mean has shape {m0.shape}, expected ({n},)")

        for name in ("sigma_w", "prior_cov", "Q"):
            _check_symmetric(arr[name], name)
            if _min_eig(arr[name]) < -PSD_TOL:
                raise NotPSDError(f"{name} is not positive semidefinite")
        for name in ("sigma_v", "R"):
            _check_symmetric(arr[name], name)
            if _min_eig(arr[name]) <= 0.0:
                raise NotPSDError(f"{name} must be positive definite")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")

        for name, a in arr.items():
            object.__setattr__(self, name, a)
        object.__setattr__(self, "gamma", float(self.gamma))

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.B.shape[1]

    @property
    def p(self):
        return self.C.shape[0]

    @property
    def prior(self):
        return GaussianBelief(self.prior_mean, self.prior_cov)

    def replace(self, **changes):
        fields = {k: getattr(self, k) for k in self.__dataclass_fields__}
        fields.update(changes)
        return LqgModel(**fields)


def double_integrator(dt, sigma_w, sigma_v, q, r, prior, gamma=0.99):
    """Position/velocity double integrator where only position is measured."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    A = np.array([[1.0, dt], [0.0, 1.0]])
    B = np.array([[0.5 * dt * dt], [dt]])
    C = np.array([[1.0, 0.0]])
    return LqgModel(A=A, B=B, C=C, sigma_w=sigma_w, sigma_v=sigma_v, Q=q, R=r,
                    prior_mean=prior.mean, prior_cov=prior.cov, gamma=gamma)


def default_model():
    """Double integrator with the package's default experiment constants."""
    return double_integrator(
        dt=0.1,
        sigma_w=1e-3 * np.eye(2),
        sigma_v=np.array([[0.1]]),
        q=np.eye(2),
        r=np.array([[0.1]]),
        prior=GaussianBelief(np.array([10.0, 0.0]), np.eye(2)),
        gamma=0.99,
    )


def _vec(v, size, name):
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.shape != (size,):
        raise ShapeError(f"{name} has shape {v.shape}, expected ({size},)")
    return v


def stage_cost(model, x, u):
    x = _vec(x, model.n, "x")
    u = _vec(u, model.m, "u")
    return float(x @ model.Q @ x + u @ model.R @ u)


def belief_stage_cost(model, b, u):
    """Expected stage cost under a Gaussian belief: m'Qm + Tr(QP) + u'Ru."""
    if b.dim != model.n:
        raise ShapeError(f"belief has dimension {b.dim}, model has {model.n}")
    u = _vec(u, model.m, "u")
    m = b.mean
    return float(m @ model.Q @ m + np.trace(model.Q @ b.cov) + u @ model.R @ u)
