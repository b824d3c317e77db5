"""Sequential binomial discrimination of a bright and a dark state.

Notes:
    A state detection is N sideband pulses. k successes are counted and
    compared with the threshold k_t. k <= k_t means dark, k > k_t means bright.
    At an exact likelihood tie the state is called dark.
"""
from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np
from scipy import stats

from errors import ConvergenceError, InputError

DEFAULT_P_ALPHA = 0.52
DEFAULT_P_BETA = 0.06
DEFAULT_N_REP = 22
DEFAULT_THRESHOLD_P = 0.25

# log-likelihood differences below this are treated as ties
TIE_TOLERANCE = 1e-9
LOG_SPACE_MIN_N = 100
MAX_REPETITIONS = 100000


class Classification(Enum):
    BRIGHT = "bright"
    DARK = "dark"


def check_probability(p: float, name: str):
    if not 0 <= p <= 1:
        raise InputError(f"{name} must be in [0, 1]. ({p})")


def check_model_probabilities(p_alpha: float, p_beta: float):
    if p_alpha == p_beta:
        raise InputError(f"Degenerate model. p_alpha equals p_beta. ({p_alpha})")
    if not 0 < p_beta < p_alpha < 1:
        raise InputError(f"Expected 0 < p_beta < p_alpha < 1. (p_alpha: {p_alpha}, p_beta: {p_beta})")


def binomial_likelihood(p: float, k: int, n: int) -> float:
    """L(p | k, n) = C(n, k) p^k (1 - p)^(n - k)."""
    check_probability(p, "p")
    if not 0 <= k <= n:
        raise InputError(f"Expected 0 <= k <= n. (k: {k}, n: {n})")
    if n > LOG_SPACE_MIN_N:
        return float(np.exp(stats.binom.logpmf(k, n, p)))
    return math.comb(n, k) * p ** k * (1 - p) ** (n - k)


def discrimination_threshold(p_alpha: float, p_beta: float, n: int) -> int:
    """Closed-form k_t = floor(n / (ln(pa/pb) / ln((1-pb)/(1-pa)) + 1))."""
    check_model_probabilities(p_alpha, p_beta)
    if n < 1:
        raise InputError(f"Number of repetitions must be positive. ({n})")
    ratio = math.log(p_alpha / p_beta) / math.log((1 - p_beta) / (1 - p_alpha))
    crossover = n / (ratio + 1)
    return min(n, int(math.floor(crossover + TIE_TOLERANCE)))


def brute_force_threshold(p_alpha: float, p_beta: float, n: int) -> int:
    """Largest k whose likelihood under p_alpha does not exceed the one under p_beta."""
    check_model_probabilities(p_alpha, p_beta)
    if n < 1:
        raise InputError(f"Number of repetitions must be positive. ({n})")
    k = np.arange(n + 1)
    diff = stats.binom.logpmf(k, n, p_alpha) - stats.binom.logpmf(k, n, p_beta)
    dark = np.nonzero(diff <= TIE_TOLERANCE)[0]
    # k = 0 always favors the dark state when p_alpha > p_beta
    return int(dark.max())


@dataclass(frozen=True)
class QndModel:
    p_alpha: float = DEFAULT_P_ALPHA
    p_beta: float = DEFAULT_P_BETA
    n_rep: int = DEFAULT_N_REP
    threshold_k: int = None  # derived when None
    threshold_p: float = DEFAULT_THRESHOLD_P

    def __post_init__(self):
        check_model_probabilities(self.p_alpha, self.p_beta)
        if self.n_rep < 1:
            raise InputError(f"Number of repetitions must be positive. ({self.n_rep})")
        if self.threshold_k is None:
            object.__setattr__(self, "threshold_k", discrimination_threshold(self.p_alpha, self.p_beta, self.n_rep))
        if not 0 <= self.threshold_k <= self.n_rep:
            raise InputError(f"Threshold must be in [0, N]. (k_t: {self.threshold_k}, N: {self.n_rep})")
        check_probability(self.threshold_p, "threshold_p")

    def with_n_rep(self, n_rep: int) -> "QndModel":
        """Same probabilities with N replaced and k_t derived again."""
        return QndModel(self.p_alpha, self.p_beta, n_rep, None, self.threshold_p)

    def print(self, padding: int = 2):
        pad = " " * padding
        print(pad + f"p_alpha: {self.p_alpha}")
        print(pad + f"p_beta: {self.p_beta}")
        print(pad + f"N: {self.n_rep}")
        print(pad + f"k_t: {self.threshold_k}")
        print(pad + f"threshold_p: {self.threshold_p}")


def detection_errors(model: QndModel) -> tuple[float, float]:
    """(E_d, E_b): dark state called bright, bright state called dark."""
    n, k_t = model.n_rep, model.threshold_k
    error_dark = float(stats.binom.sf(k_t, n, model.p_beta))
    error_bright = float(stats.binom.cdf(k_t, n, model.p_alpha))
    return error_dark, error_bright


@dataclass(frozen=True)
class FidelityReport:
    threshold_k: int
    threshold_p: float
    error_dark: float
    error_bright: float
    fidelity_dark: float
    fidelity_bright: float
    fidelity_overall: float
    min_repetitions: dict = field(default_factory=dict)  # target -> N

    def to_dict(self) -> dict:
        report = {
            "k_t": self.threshold_k,
            "threshold_p": self.threshold_p,
            "e_dark": self.error_dark,
            "e_bright": self.error_bright,
            "fidelity_dark": self.fidelity_dark,
            "fidelity_bright": self.fidelity_bright,
            "fidelity_overall": self.fidelity_overall,
        }
        if self.min_repetitions:
            report["min_repetitions"] = {repr(t): n for t, n in self.min_repetitions.items()}
        return report


def fidelity_report(model: QndModel) -> FidelityReport:
    error_dark, error_bright = detection_errors(model)
    return FidelityReport(
        model.threshold_k, model.threshold_p, error_dark, error_bright,
        1 - error_dark, 1 - error_bright, 1 - max(error_dark, error_bright))


def min_repetitions(p_alpha: float, p_beta: float, target_fidelity: float) -> int:
    """Smallest N whose overall fidelity (with its own k_t) reaches the target.

    Notes:
        The fidelity is not monotone in N because k_t moves in integer steps,
        so a larger N can fall below the target again.
    """
    check_model_probabilities(p_alpha, p_beta)
    if not target_fidelity < 1:
        raise InputError(f"Target fidelity must be below 1. ({target_fidelity})")
    model = QndModel(p_alpha, p_beta, 1)
    for n in range(1, MAX_REPETITIONS + 1):
        if fidelity_report(model.with_n_rep(n)).fidelity_overall >= target_fidelity:
            return n
    raise ConvergenceError(f"Target fidelity not reached. (target: {target_fidelity}, N <= {MAX_REPETITIONS})")


def classify(k: int, n: int, model: QndModel) -> Classification:
    """Bright iff k / n > threshold_p."""
    if n == 0:
        raise InputError("Cannot classify an attempt without shots. (n = 0)")
    if not 0 <= k <= n:
        raise InputError(f"Expected 0 <= k <= n. (k: {k}, n: {n})")
    return Classification.BRIGHT if k / n > model.threshold_p else Classification.DARK
