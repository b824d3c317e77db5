"""Bayesian estimate of the detection fidelity from observed runs."""
from scipy import stats

from errors import InputError


def bayes_fidelity(successes: int, failures: int) -> tuple[float, float]:
    """Posterior mean and standard deviation of the fidelity.

    Notes:
        A uniform prior on the per-attempt error rate gives the posterior
        Beta(failures + 1, successes + 1). The fidelity is one minus that rate.
    """
    if successes < 0 or failures < 0:
        raise InputError(f"Counts must not be negative. (successes: {successes}, failures: {failures})")
    posterior = stats.beta(failures + 1, successes + 1)
    return 1 - float(posterior.mean()), float(posterior.std())
