"""Least-squares fitters: Gaussian-plus-offset peaks and weighted polynomials."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FitError, InsufficientDataError, InvalidInputError


def gaussian(x, amplitude, center, width, offset):
    return amplitude * np.exp(-((x - center) ** 2) / (2.0 * width**2)) + offset


def _gaussian_jacobian(x, p):
    amplitude, center, width, _ = p
    d = x - center
    g = np.exp(-(d**2) / (2.0 * width**2))
    return np.column_stack(
        [g, amplitude * g * d / width**2, amplitude * g * d**2 / width**3, np.ones_like(x)]
    )


@dataclass(frozen=True)
class GaussianFit:
    params: np.ndarray  # amplitude, center, width, offset
    covariance: np.ndarray
    chi2: float
    dof: int
    iterations: int

    @property
    def errors(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))


def fit_gaussian(
    x, y, p0, sigma_y=None, max_iter: int = 200, xtol: float = 1e-10, ftol: float = 1e-10
) -> GaussianFit:
    """Levenberg-Marquardt fit of ``a exp(-(x-mu)^2 / 2w^2) + b``.

    With ``sigma_y`` the residuals are weighted by ``1/sigma_y`` and the
    covariance is ``(J^T W J)^-1``.  Without it the fit is unweighted and
    the covariance is scaled by the residual variance.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 4:
        raise InsufficientDataError(f"need at least 4 points for a 4-parameter fit, got {x.size}")
    weighted = sigma_y is not None
    sw = 1.0 / np.asarray(sigma_y, dtype=float) if weighted else np.ones_like(x)

    p = np.asarray(p0, dtype=float).copy()

    def cost_of(params):
        r = (y - gaussian(x, *params)) * sw
        return r, float(r @ r)

    r, cost = cost_of(p)
    jac = _gaussian_jacobian(x, p) * sw[:, None]
    a = jac.T @ jac
    # Nielsen's gain-ratio damping update
    lam = 1e-3 * float(np.max(np.diag(a)))
    nu = 2.0
    for it in range(1, max_iter + 1):
        g = jac.T @ r
        try:
            step = np.linalg.solve(a + lam * np.eye(4), g)
        except np.linalg.LinAlgError:
            raise FitError("singular normal equations", {"params": p, "iterations": it}) from None
        trial = p + step
        r_new, cost_new = cost_of(trial)
        predicted = float(step @ (lam * step + g))
        rho = (cost - cost_new) / predicted if predicted > 0 else -1.0
        if np.isfinite(cost_new) and rho > 0:
            previous = cost
            p, r, cost = trial, r_new, cost_new
            jac = _gaussian_jacobian(x, p) * sw[:, None]
            a = jac.T @ jac
            lam *= max(1.0 / 3.0, 1.0 - (2.0 * rho - 1.0) ** 3)
            nu = 2.0
            small = np.linalg.norm(step) <= xtol * (np.linalg.norm(p) + xtol)
            flat = previous - cost <= ftol * previous
            if small or flat or cost == 0.0:
                break
        else:
            lam *= nu
            nu *= 2.0
            if np.linalg.norm(step) <= xtol * (np.linalg.norm(p) + xtol) or not np.isfinite(lam):
                # no downhill step left at machine resolution
                break
    else:
        raise FitError(
            f"no convergence after {max_iter} iterations",
            {"params": p, "cost": cost, "iterations": max_iter, "damping": lam},
        )

    p[2] = abs(p[2])
    jac = _gaussian_jacobian(x, p) * sw[:, None]
    try:
        cov = np.linalg.inv(jac.T @ jac)
    except np.linalg.LinAlgError:
        raise FitError("singular covariance at solution", {"params": p, "cost": cost}) from None
    dof = x.size - 4
    if not weighted:
        cov = cov * (cost / dof if dof > 0 else 0.0)
    return GaussianFit(p, cov, cost, dof, it)


@dataclass(frozen=True)
class PolynomialFit:
    """``c0 + c1 x + c2 x^2 + ...`` with covariance of the coefficients."""

    coefficients: np.ndarray
    covariance: np.ndarray
    chi2: float
    dof: int

    @property
    def errors(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.polynomial.polynomial.polyval(x, self.coefficients)

    def band(self, x) -> np.ndarray:
        """One-sigma uncertainty of the fitted curve at ``x``."""
        x = np.asarray(x, dtype=float)
        basis = np.vander(np.atleast_1d(x), len(self.coefficients), increasing=True)
        var = np.einsum("ij,jk,ik->i", basis, self.covariance, basis)
        return np.sqrt(np.clip(var, 0.0, None)).reshape(x.shape)


def fit_polynomial(x, y, yerr, degree: int = 2, min_points: int = 4) -> PolynomialFit:
    """Error-weighted linear least squares; covariance ``(A^T W A)^-1`` (not chi2-scaled)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    yerr = np.asarray(yerr, dtype=float)
    if x.size < min_points:
        raise InsufficientDataError(f"need at least {min_points} points, got {x.size}")
    if not np.all(np.isfinite(yerr)) or np.any(yerr <= 0):
        raise InvalidInputError("point errors must be finite and positive")
    design = np.vander(x, degree + 1, increasing=True) / yerr[:, None]
    rhs = y / yerr
    coef, _, rank, _ = np.linalg.lstsq(design, rhs, rcond=None)
    if rank < degree + 1:
        raise InvalidInputError("singular normal equations (repeated abscissae?)")
    cov = np.linalg.inv(design.T @ design)
    resid = rhs - design @ coef
    return PolynomialFit(coef, cov, float(resid @ resid), x.size - degree - 1)
