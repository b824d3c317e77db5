"""Multistart weighted least squares shared by the fitters."""
from dataclasses import dataclass

import numpy as np
from scipy import linalg, optimize

from errors import ConvergenceError, InputError

MAX_ITERATIONS = 200
TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class LsqOutcome:
    x: np.ndarray
    covariance: np.ndarray
    chi2: float
    dof: int
    n_starts: int
    n_converged: int
    nfev: int
    message: str

    @property
    def sigma(self) -> np.ndarray:
        return np.sqrt(np.abs(np.diag(self.covariance)))

    @property
    def reduced_chi2(self) -> float:
        return self.chi2 / self.dof if self.dof > 0 else float("nan")


def pseudo_inverse_covariance(jac: np.ndarray) -> np.ndarray:
    """(J^T J)^-1 by a Moore-Penrose inverse that drops zero singular values."""
    _, s, vt = linalg.svd(jac, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.full((jac.shape[1], jac.shape[1]), np.inf)
    threshold = np.finfo(float).eps * max(jac.shape) * s[0]
    keep = s > threshold
    s = s[keep]
    vt = vt[:s.size]
    return (vt.T / s ** 2) @ vt


def multistart_least_squares(residuals, starts, bounds=(-np.inf, np.inf), x_scale=1.0,
                             skip=None, name="fit") -> LsqOutcome:
    """Run least_squares (trust-region reflective) from every start and keep the lowest cost.

    Args:
        residuals (callable): weighted residual vector (model - data) / sigma.
        starts (list): initial parameter vectors.
        bounds (tuple): lower and upper bounds as accepted by scipy.
        x_scale (float or array): characteristic parameter scales.
        skip (callable): optional predicate. Starts where it returns True are not tried.
        name (str): used in error messages.

    Returns:
        outcome (LsqOutcome): best parameters, covariance (absolute sigma), chi-square, and diagnostics.
    """
    best = None
    n_tried = 0
    n_converged = 0
    nfev = 0
    last_error = ""
    for x0 in starts:
        x0 = np.asarray(x0, dtype=float)
        if skip is not None and skip(x0):
            continue
        n_tried += 1
        try:
            res = optimize.least_squares(
                residuals, x0, bounds=bounds, method="trf", x_scale=x_scale,
                xtol=TOLERANCE, ftol=TOLERANCE, gtol=TOLERANCE, max_nfev=MAX_ITERATIONS * (x0.size + 1))
        except InputError as e:
            # e.g. an iterate ran into a pole
            last_error = str(e)
            continue
        nfev += res.nfev
        if res.status <= 0 or not np.all(np.isfinite(res.x)):
            last_error = res.message
            continue
        n_converged += 1
        if best is None or res.cost < best.cost:
            best = res

    if best is None:
        raise ConvergenceError(f"No start of the {name} converged. ({n_tried} starts, last: {last_error})")

    n_points = best.fun.size
    return LsqOutcome(
        x=best.x,
        covariance=pseudo_inverse_covariance(best.jac),
        chi2=float(2 * best.cost),
        dof=n_points - best.x.size,
        n_starts=n_tried,
        n_converged=n_converged,
        nfev=nfev,
        message=best.message,
    )
