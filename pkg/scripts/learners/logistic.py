"""Logistic regression by full-batch gradient descent"""
import logging

import numpy as np
from scipy.special import expit

from .base import LogRegSpec, Model, Standardizer

logger = logging.getLogger(__name__)


class LogisticModel(Model):
    def __init__(self, standardizer: Standardizer, coef: np.ndarray, intercept: float, n_iter: int):
        super().__init__(coef.shape[0])
        self.standardizer = standardizer
        self.coef = coef
        self.intercept = intercept
        self.n_iter = n_iter

    def margin(self, X: np.ndarray) -> np.ndarray:
        return self.intercept + self.standardizer.transform(X) @ self.coef

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        return expit(self.margin(X))

    @property
    def raw_coefficients(self) -> np.ndarray:
        """Coefficients on the unstandardized feature scale"""
        return self.coef / self.standardizer.scale


def gradient_lipschitz(Z: np.ndarray, w: np.ndarray, l2: float) -> float:
    """Upper bound on the curvature of the mean weighted loss, intercept included"""
    total = w.sum()
    design = np.column_stack([np.ones(Z.shape[0]), Z])
    gram = (design * w[:, None]).T @ design / total
    return 0.25 * float(np.linalg.eigvalsh(gram)[-1]) + l2 / total


def fit_logistic(spec: LogRegSpec, X: np.ndarray, y: np.ndarray, w: np.ndarray,
                 numeric_mask: np.ndarray = None) -> LogisticModel:
    """Minimize (sum_i w_i * NLL_i + l2/2 * |coef|^2) / sum_i w_i from zero.

    The step is lr, capped at the inverse curvature bound so the descent is
    monotone on any design. The intercept is not penalized. Integer weights
    are equivalent to row duplication because every term is a weighted sum.
    """
    standardizer = Standardizer.fit(X, w, numeric_mask)
    Z = standardizer.transform(X)
    total = w.sum()
    coef = np.zeros(Z.shape[1])
    intercept = 0.0
    step = min(spec.lr, 1.0 / gradient_lipschitz(Z, w, spec.l2))

    n_iter = 0
    for n_iter in range(1, spec.max_iters + 1):
        residual = w * (expit(intercept + Z @ coef) - y)
        grad_intercept = residual.sum() / total
        grad_coef = (Z.T @ residual + spec.l2 * coef) / total
        intercept -= step * grad_intercept
        coef -= step * grad_coef
        if max(abs(step * grad_intercept), np.max(np.abs(step * grad_coef), initial=0.0)) < spec.tol:
            break

    logger.debug(f"  logreg stopped after {n_iter} iterations (step {step:.4g})")
    return LogisticModel(standardizer, coef, intercept, n_iter)
