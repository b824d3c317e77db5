"""Monte Carlo time traces of repeated state detections.

Notes:
    Attempts are simulated in chunks of ATTEMPTS_PER_CHUNK.
    Chunk c draws from numpy.random.default_rng(SeedSequence([seed, c])) in a fixed order:
        1. one uniform per attempt for the bright -> dark jump
        2. (attempts, N) uniforms for the preparation check
        3. (attempts, N) uniforms for the sideband shots
    So a trace of a given length is reproducible from its seed no matter how chunks are scheduled.
"""
import concurrent.futures
from dataclasses import dataclass

import numpy as np

from errors import InputError
from motion.fock import FockDistribution
from motion.sideband import RabiModel, SidebandParams, pulse_times, sideband_signal
from .discrimination import Classification, QndModel, classify

ATTEMPTS_PER_CHUNK = 4096
DEFAULT_PREP_SUCCESS = 0.97


@dataclass(frozen=True)
class TimeTraceConfig:
    n_attempts: int
    jump_probability: float = 0.0  # per attempt, bright -> dark only
    prep_success: float = DEFAULT_PREP_SUCCESS
    rng_seed: int = 0
    initial_state: Classification = Classification.BRIGHT
    forced_jump_after: int = None  # number of bright attempts before a forced jump

    def __post_init__(self):
        if self.n_attempts < 0:
            raise InputError(f"Number of attempts must not be negative. ({self.n_attempts})")
        for name in ["jump_probability", "prep_success"]:
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise InputError(f"{name} must be in [0, 1]. ({value})")
        if not 0 <= self.rng_seed < 2 ** 64:
            raise InputError(f"Seed must be an unsigned 64-bit integer. ({self.rng_seed})")
        if self.forced_jump_after is not None and self.forced_jump_after < 0:
            raise InputError(f"Forced jump position must not be negative. ({self.forced_jump_after})")
        if not isinstance(self.initial_state, Classification):
            object.__setattr__(self, "initial_state", Classification(self.initial_state))


@dataclass(frozen=True)
class DetectionRecord:
    attempt_index: int
    k_successes: int
    n_used: int
    p_hat: float  # 0.0 when every shot was discarded
    classification: Classification
    true_state: Classification

    @property
    def misclassified(self) -> bool:
        return self.classification != self.true_state


class AnalyticSource:
    """Fixed single-shot success probabilities for each state."""
    def __init__(self, p_bright: float, p_dark: float):
        for p in [p_bright, p_dark]:
            if not 0 <= p <= 1:
                raise InputError(f"Success probability must be in [0, 1]. ({p})")
        self.p_bright = p_bright
        self.p_dark = p_dark

    @staticmethod
    def from_model(model: QndModel) -> "AnalyticSource":
        return AnalyticSource(model.p_alpha, model.p_beta)

    def shot_probabilities(self, n_rep: int) -> tuple[np.ndarray, np.ndarray]:
        return np.full(n_rep, self.p_bright), np.full(n_rep, self.p_dark)

    def __repr__(self):
        return f"AnalyticSource(p_bright={self.p_bright}, p_dark={self.p_dark})"


class MotionSource:
    """Shot probabilities from the sideband model.

    Notes:
        The N pulses of one attempt use equally spaced pulse times in [t_start, t_stop].
    """
    def __init__(self, bright: FockDistribution, dark: FockDistribution, params: SidebandParams,
                 t_start: float, t_stop: float, model=RabiModel.GENERALIZED):
        self.bright = bright
        self.dark = dark
        self.params = params
        self.t_start = t_start
        self.t_stop = t_stop
        self.model = model

    def shot_probabilities(self, n_rep: int) -> tuple[np.ndarray, np.ndarray]:
        times = pulse_times(self.t_start, self.t_stop, n_rep)
        return (np.atleast_1d(sideband_signal(self.bright, times, self.params, self.model)),
                np.atleast_1d(sideband_signal(self.dark, times, self.params, self.model)))

    def __repr__(self):
        return (f"MotionSource(mean_n_bright={self.bright.mean():.6g}, mean_n_dark={self.dark.mean():.6g},"
                f" window=({self.t_start}, {self.t_stop}))")


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, chunk]))


def chunk_bounds(n_attempts: int) -> list[tuple[int, int]]:
    return [(start, min(start + ATTEMPTS_PER_CHUNK, n_attempts))
            for start in range(0, n_attempts, ATTEMPTS_PER_CHUNK)]


def last_bright_attempt(config: TimeTraceConfig) -> int:
    """Index of the last attempt made in the bright state (-1 if none)."""
    if config.initial_state == Classification.DARK:
        return -1
    last = config.n_attempts - 1
    if config.forced_jump_after is not None:
        last = min(last, config.forced_jump_after - 1)
    if config.jump_probability == 0:
        return last
    for chunk, (start, stop) in enumerate(chunk_bounds(config.n_attempts)):
        if start > last:
            break
        jumps = chunk_rng(config.rng_seed, chunk).random(stop - start) < config.jump_probability
        hits = np.nonzero(jumps)[0]
        if hits.size > 0:
            # the jump happens after this attempt
            return min(last, start + int(hits[0]))
    return last


def simulate_chunk(chunk: int, start: int, stop: int, seed: int, last_bright: int,
                   p_bright: np.ndarray, p_dark: np.ndarray, prep_success: float,
                   model: QndModel) -> list[DetectionRecord]:
    n_rep = p_bright.size
    size = stop - start
    rng = chunk_rng(seed, chunk)
    rng.random(size)  # jump draws, consumed by last_bright_attempt()
    prep_ok = rng.random((size, n_rep)) < prep_success
    shots = rng.random((size, n_rep))

    index = np.arange(start, stop)
    bright = index <= last_bright
    p_shot = np.where(bright[:, None], p_bright[None, :], p_dark[None, :])
    success = (shots < p_shot) & prep_ok
    k = success.sum(axis=1)
    n_used = prep_ok.sum(axis=1)
    records = []
    for i in range(size):
        k_i, n_i = int(k[i]), int(n_used[i])
        if n_i == 0:
            p_hat, called = 0.0, Classification.DARK
        else:
            p_hat, called = k_i / n_i, classify(k_i, n_i, model)
        records.append(DetectionRecord(
            int(index[i]), k_i, n_i, p_hat, called,
            Classification.BRIGHT if bright[i] else Classification.DARK))
    return records


def simulate_timetrace(model: QndModel, source, config: TimeTraceConfig,
                       max_workers: int = 1) -> list[DetectionRecord]:
    """Simulate a trace of detection attempts.

    Args:
        model (QndModel): N and the classification threshold.
        source (AnalyticSource or MotionSource): single-shot success probabilities.
        config (TimeTraceConfig): trace length, jumps, preparation success, and seed.
        max_workers (int): number of worker processes. 1 runs in the calling process.

    Returns:
        records (list[DetectionRecord]): one record per attempt, in attempt order.
    """
    if config.n_attempts == 0:
        return []
    p_bright, p_dark = source.shot_probabilities(model.n_rep)
    last_bright = last_bright_attempt(config)
    bounds = chunk_bounds(config.n_attempts)
    args = [(chunk, start, stop, config.rng_seed, last_bright, p_bright, p_dark,
             config.prep_success, model)
            for chunk, (start, stop) in enumerate(bounds)]

    if max_workers == 1 or len(bounds) == 1:
        return [record for a in args for record in simulate_chunk(*a)]

    with concurrent.futures.ProcessPoolExecutor(max_workers) as executor:
        futures = [executor.submit(simulate_chunk, *a) for a in args]
        concurrent.futures.wait(futures)
        records = [record for future in futures for record in future.result()]
    return records


@dataclass(frozen=True)
class HistogramBin:
    low: float
    high: float
    count_bright: int
    count_dark: int


def histogram(records: list[DetectionRecord], n_bins: int = 22) -> list[HistogramBin]:
    """Counts of p_hat per bin on [0, 1], split by classification."""
    if n_bins < 1:
        raise InputError(f"Number of bins must be positive. ({n_bins})")
    edges = np.linspace(0, 1, n_bins + 1)
    p_hat = np.array([r.p_hat for r in records], dtype=float)
    bright = np.array([r.classification == Classification.BRIGHT for r in records], dtype=bool)
    count_bright, _ = np.histogram(p_hat[bright], bins=edges)
    count_dark, _ = np.histogram(p_hat[~bright], bins=edges)
    return [HistogramBin(float(edges[i]), float(edges[i + 1]), int(count_bright[i]), int(count_dark[i]))
            for i in range(n_bins)]


@dataclass(frozen=True)
class TraceSummary:
    n_bright: int
    n_dark: int
    misclassified_bright: int  # true bright called dark
    misclassified_dark: int  # true dark called bright

    def to_dict(self) -> dict:
        return {
            "n_bright": self.n_bright,
            "n_dark": self.n_dark,
            "misclassified_bright": self.misclassified_bright,
            "misclassified_dark": self.misclassified_dark,
        }


def summarize(records: list[DetectionRecord]) -> TraceSummary:
    n_bright = sum(r.true_state == Classification.BRIGHT for r in records)
    bad_bright = sum(r.misclassified and r.true_state == Classification.BRIGHT for r in records)
    bad_dark = sum(r.misclassified and r.true_state == Classification.DARK for r in records)
    return TraceSummary(n_bright, len(records) - n_bright, bad_bright, bad_dark)
