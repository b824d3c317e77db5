"""Motional Fock-state distributions."""
from dataclasses import dataclass

import numpy as np
from scipy import stats

from errors import InputError

DEFAULT_N_MAX = 64
DEFAULT_TAIL_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class FockDistribution:
    """Probabilities P(n) for n = 0..n_max."""
    probabilities: np.ndarray
    tolerance: float = DEFAULT_TAIL_TOLERANCE

    def __post_init__(self):
        probs = np.asarray(self.probabilities, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise InputError("Fock distribution needs at least one probability.")
        if np.any(probs < 0):
            raise InputError("Fock probabilities must not be negative.")
        total = probs.sum()
        if total > 1 + 1e-12:
            raise InputError(f"Fock probabilities sum above 1. ({total})")
        tail = 1 - total
        if tail >= self.tolerance:
            raise InputError(
                f"Truncation tail exceeds tolerance. Use a larger n_max."
                f" (n_max: {probs.size - 1}, tail: {tail:.3e})")
        probs.setflags(write=False)
        object.__setattr__(self, "probabilities", probs)

    @property
    def n_max(self) -> int:
        return self.probabilities.size - 1

    @property
    def n(self) -> np.ndarray:
        return np.arange(self.probabilities.size)

    def mean(self) -> float:
        return float(np.dot(self.n, self.probabilities))

    def print(self, padding: int = 2):
        pad = " " * padding
        print(pad + f"n_max: {self.n_max}")
        print(pad + f"mean n: {self.mean():.6g}")
        print(pad + f"tail: {1 - self.probabilities.sum():.3e}")


def check_n_max(n_max: int):
    if n_max < 0:
        raise InputError(f"n_max must not be negative. ({n_max})")


def fock_distribution_coherent(alpha_magnitude: float, n_max: int = DEFAULT_N_MAX,
                               tolerance: float = DEFAULT_TAIL_TOLERANCE) -> FockDistribution:
    """Poissonian populations of a coherent state, P(n) = exp(-|a|^2) |a|^(2n) / n!."""
    if alpha_magnitude < 0:
        raise InputError(f"|alpha| must not be negative. ({alpha_magnitude})")
    check_n_max(n_max)
    n = np.arange(n_max + 1)
    if alpha_magnitude == 0:
        probs = (n == 0).astype(float)
    else:
        probs = stats.poisson.pmf(n, alpha_magnitude ** 2)
    return FockDistribution(probs, tolerance)


def fock_distribution_thermal(nbar: float, n_max: int = DEFAULT_N_MAX,
                              tolerance: float = DEFAULT_TAIL_TOLERANCE) -> FockDistribution:
    """Thermal populations, P(n) = nbar^n / (1 + nbar)^(n + 1)."""
    if nbar < 0:
        raise InputError(f"nbar must not be negative. ({nbar})")
    check_n_max(n_max)
    n = np.arange(n_max + 1)
    if nbar == 0:
        probs = (n == 0).astype(float)
    else:
        # geometric distribution on n >= 0 with success probability 1 / (1 + nbar)
        probs = stats.geom.pmf(n + 1, 1 / (1 + nbar))
    return FockDistribution(probs, tolerance)
