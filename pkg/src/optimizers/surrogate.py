"""
Quadratic surrogate with a Gaussian belief over its coefficients

Model functions are ordered [1, theta_j, theta_j theta_k (j <= k)].
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from core.errors import SurrogateError
from .hyperparams import n_features

logger = logging.getLogger(__name__)


def model_features(theta: Sequence[float]) -> np.ndarray:
    """[1, theta_1..theta_n, theta_j theta_k for all j <= k]"""
    theta = np.asarray(theta, dtype=float).ravel()
    j, k = np.triu_indices(theta.size)
    return np.concatenate([[1.0], theta, theta[j] * theta[k]])


def design_matrix(points: np.ndarray) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return np.vstack([model_features(p) for p in points])


def n_params_from_features(n_m: int) -> int:
    n = 0
    while n_features(n) < n_m:
        n += 1
    if n_features(n) != n_m:
        raise ValueError(f"{n_m} is not the feature count of a full quadratic model")
    return n


@dataclass(frozen=True)
class SurrogateBelief:
    """Mean and covariance of the surrogate coefficients"""
    beta: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        n_m = self.beta.shape[0]
        if self.sigma.shape != (n_m, n_m):
            raise ValueError(f"covariance shape {self.sigma.shape} does not match {n_m} coefficients")

    @property
    def n_params(self) -> int:
        return n_params_from_features(self.beta.shape[0])

    def inflated(self, amount: float) -> 'SurrogateBelief':
        """Random-walk prediction step: sigma + amount * I"""
        return SurrogateBelief(self.beta.copy(), self.sigma + amount * np.eye(self.beta.shape[0]))

    def to_dict(self):
        return {'beta': self.beta.tolist(), 'sigma': self.sigma.tolist()}


def prior_belief(n_params: int, prior_linear: float = 1e7, prior_quadratic: float = 1e5,
                 beta: Optional[np.ndarray] = None) -> SurrogateBelief:
    """
    Diffuse prior: zero mean, variance prior_linear on the constant and
    linear coefficients and prior_quadratic on the quadratic ones, so early
    iterations effectively fit a linear model.
    """
    n_m = n_features(n_params)
    diagonal = np.full(n_m, float(prior_quadratic))
    diagonal[:n_params + 1] = prior_linear
    mean = np.zeros(n_m) if beta is None else np.asarray(beta, dtype=float).copy()
    return SurrogateBelief(mean, np.diag(diagonal))


def _factor(matrix: np.ndarray, what: str):
    try:
        return cho_factor(matrix, lower=True)
    except LinAlgError as e:
        raise SurrogateError(f"{what} is not positive definite: {str(e)}")


def _symmetric(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.T)


def bayes_update(prior: SurrogateBelief, points: np.ndarray, values: Sequence[float],
                 sigmas: Sequence[float]) -> SurrogateBelief:
    """
    Gaussian posterior after observing values +- sigmas at points.

    Sigma_1^-1 = X^T W X + Sigma_0^-1 and beta_1 = Sigma_1 (X^T W y + Sigma_0^-1 beta_0)
    with W = diag(1 / sigma^2). No data returns the prior unchanged.

    Raises:
        SurrogateError: a covariance lost positive definiteness
    """
    values = np.asarray(values, dtype=float).ravel()
    sigmas = np.asarray(sigmas, dtype=float).ravel()
    if values.size == 0:
        return prior
    if sigmas.shape != values.shape:
        raise ValueError(f"{values.size} values but {sigmas.size} standard errors")
    if np.any(sigmas <= 0) or not np.all(np.isfinite(sigmas)):
        raise ValueError("measurement standard errors must be positive and finite")

    X = design_matrix(points)
    if X.shape[0] != values.size:
        raise ValueError(f"{X.shape[0]} points but {values.size} values")
    weights = 1.0 / sigmas ** 2

    n_m = prior.beta.shape[0]
    identity = np.eye(n_m)
    prior_precision = _symmetric(cho_solve(_factor(prior.sigma, "prior covariance"), identity))
    precision = X.T @ (weights[:, None] * X) + prior_precision
    factor = _factor(_symmetric(precision), "posterior precision")
    sigma = _symmetric(cho_solve(factor, identity))
    beta = cho_solve(factor, X.T @ (weights * values) + prior_precision @ prior.beta)
    return SurrogateBelief(beta, sigma)


def quadratic_form(beta: np.ndarray, n_params: int) -> Tuple[float, np.ndarray, np.ndarray]:
    """(constant, linear vector, symmetric Q) with f = c + b.theta + theta^T Q theta"""
    constant = float(beta[0])
    linear = np.asarray(beta[1:n_params + 1], dtype=float)
    Q = np.zeros((n_params, n_params))
    j, k = np.triu_indices(n_params)
    Q[j, k] = beta[n_params + 1:]
    Q = 0.5 * (Q + Q.T)
    return constant, linear, Q


def surrogate_value(beta: np.ndarray, theta: Sequence[float]) -> float:
    return float(np.asarray(beta) @ model_features(theta))


def surrogate_predict(belief: SurrogateBelief, theta: Sequence[float]) -> Tuple[float, float]:
    """(beta . phi(theta), sqrt(phi^T Sigma phi))"""
    phi = model_features(theta)
    variance = float(phi @ belief.sigma @ phi)
    return float(belief.beta @ phi), float(np.sqrt(max(variance, 0.0)))


def surrogate_gradient(beta: np.ndarray, theta: Sequence[float]) -> np.ndarray:
    """Gradient of the surrogate mean with respect to theta"""
    theta = np.asarray(theta, dtype=float).ravel()
    _, linear, Q = quadratic_form(np.asarray(beta, dtype=float), theta.size)
    return linear + 2.0 * Q @ theta


class KalmanFilter:
    """
    Linear Kalman filter with Joseph-form covariance updates.

    With F = I, Q = (s/l)^2 I, H = X and R = diag(sigma^2) it tracks the
    same belief as bayes_update followed by SurrogateBelief.inflated.
    """

    def __init__(self, x: np.ndarray, P: np.ndarray):
        self.x = np.asarray(x, dtype=float).copy()
        self.P = np.asarray(P, dtype=float).copy()

    def predict(self, F: Optional[np.ndarray] = None, Q: Optional[np.ndarray] = None):
        n = self.x.size
        F = np.eye(n) if F is None else F
        Q = np.zeros((n, n)) if Q is None else Q
        self.x = F @ self.x
        self.P = _symmetric(F @ self.P @ F.T + Q)

    def update(self, z: np.ndarray, H: np.ndarray, R: np.ndarray):
        z = np.atleast_1d(np.asarray(z, dtype=float))
        if z.size == 0:
            return
        H = np.atleast_2d(H)
        S = H @ self.P @ H.T + R
        # K = P H^T S^-1, solved against the symmetric innovation covariance
        K = cho_solve(_factor(_symmetric(S), "innovation covariance"), H @ self.P).T
        self.x = self.x + K @ (z - H @ self.x)
        I_KH = np.eye(self.x.size) - K @ H
        self.P = _symmetric(I_KH @ self.P @ I_KH.T + K @ R @ K.T)

    @property
    def belief(self) -> SurrogateBelief:
        return SurrogateBelief(self.x.copy(), self.P.copy())
