"""Fit of sideband Rabi traces with <n>, delta, and T2.

Notes:
    The fit runs on (<n>, |delta|, gamma = 1/T2) so that T2 = inf is the bound gamma = 0.
    The signal depends on delta^2 only, so the sign of delta is not reported.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from errors import InputError
from motion.fock import DEFAULT_N_MAX, fock_distribution_coherent
from motion.sideband import RabiModel, SidebandParams, sideband_signal
from .lsq import multistart_least_squares

MIN_SAMPLES = 6
NBAR_MAX = 16.0
DEFAULT_PULSE_TIME_S = 500e-6


def binomial_sigma(p: np.ndarray, n_shots: np.ndarray) -> np.ndarray:
    """Binomial standard error, floored at 1 / (2 n_shots)."""
    sigma = np.sqrt(p * (1 - p) / n_shots)
    return np.maximum(sigma, 1 / (2 * n_shots))


@dataclass(frozen=True, eq=False)
class RabiTrace:
    """Measured excitation probabilities after sideband pulses of length t."""
    t: np.ndarray  # s
    p_excite: np.ndarray
    n_shots: np.ndarray
    params: SidebandParams = field(default_factory=SidebandParams)
    odf_pulse_time: float = DEFAULT_PULSE_TIME_S

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float).reshape(-1)
        p = np.asarray(self.p_excite, dtype=float).reshape(-1)
        n_shots = np.broadcast_to(np.asarray(self.n_shots, dtype=float), t.shape).copy()
        if p.size != t.size:
            raise InputError(f"Times and probabilities differ in length. ({t.size} != {p.size})")
        if np.any(np.diff(t) <= 0):
            raise InputError("Pulse times must be strictly increasing.")
        if np.any(t < 0):
            raise InputError("Pulse times must not be negative.")
        if np.any((p < 0) | (p > 1)):
            raise InputError("Excitation probabilities must be in [0, 1].")
        if np.any(n_shots < 1):
            raise InputError("Each sample needs at least one shot.")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "p_excite", p)
        object.__setattr__(self, "n_shots", n_shots)

    def __len__(self):
        return self.t.size

    def sigma(self) -> np.ndarray:
        return binomial_sigma(self.p_excite, self.n_shots)

    def half_rabi_period(self) -> float:
        """Half period (s) of the n = 1 sideband oscillation."""
        return 0.5 / (self.params.eta * self.params.omega0)


def synthesize_trace(nbar: float, t, params: SidebandParams, n_shots=100,
                     rng: np.random.Generator = None, n_max: int = DEFAULT_N_MAX,
                     model=RabiModel.GENERALIZED, odf_pulse_time: float = DEFAULT_PULSE_TIME_S) -> RabiTrace:
    """Trace of a coherent state with mean occupation nbar. Shot noise is drawn when rng is given."""
    if nbar < 0:
        raise InputError(f"Mean occupation must not be negative. ({nbar})")
    dist = fock_distribution_coherent(math.sqrt(nbar), n_max)
    t = np.asarray(t, dtype=float)
    p = np.atleast_1d(sideband_signal(dist, t, params, model))
    n_shots = np.broadcast_to(np.asarray(n_shots), t.shape)
    if rng is not None:
        p = rng.binomial(n_shots.astype(np.int64), p) / n_shots
    return RabiTrace(t, p, n_shots, params, odf_pulse_time)


@dataclass(frozen=True, eq=False)
class RabiFitResult:
    nbar: float
    delta: float  # Hz, >= 0
    t2: float  # s, inf when no decoherence is resolved
    covariance: np.ndarray  # on (nbar, delta, t2)
    chi2: float
    dof: int
    n_starts: int
    n_converged: int

    @property
    def sigma(self) -> np.ndarray:
        return np.sqrt(np.abs(np.diag(self.covariance)))

    @property
    def reduced_chi2(self) -> float:
        return self.chi2 / self.dof if self.dof > 0 else float("nan")

    def to_dict(self) -> dict:
        sigma = self.sigma
        return {
            "nbar": self.nbar,
            "nbar_sigma": float(sigma[0]),
            "delta_hz": self.delta,
            "delta_sigma_hz": float(sigma[1]),
            "t2_s": self.t2,
            "t2_sigma_s": float(sigma[2]),
            "covariance": self.covariance.tolist(),
            "chi2": self.chi2,
            "reduced_chi2": self.reduced_chi2,
            "dof": self.dof,
            "starts": self.n_starts,
            "converged_starts": self.n_converged,
        }

    def print(self, padding: int = 2):
        pad = " " * padding
        sigma = self.sigma
        print(pad + f"<n>: {self.nbar:.6g} +- {sigma[0]:.2g}")
        print(pad + f"delta (Hz): {self.delta:.6g} +- {sigma[1]:.2g}")
        print(pad + f"T2 (s): {self.t2:.6g} +- {sigma[2]:.2g}")
        print(pad + f"reduced chi2: {self.reduced_chi2:.4g}")


def check_trace(trace: RabiTrace):
    if len(trace) < MIN_SAMPLES:
        raise InputError(f"Rabi fit needs at least {MIN_SAMPLES} samples. ({len(trace)})")
    if np.all(trace.p_excite == trace.p_excite[0]):
        raise InputError(f"Degenerate trace. All probabilities are equal. ({trace.p_excite[0]})")
    if trace.t[-1] - trace.t[0] < trace.half_rabi_period():
        raise InputError(
            f"Trace must span at least half a Rabi period."
            f" (span: {trace.t[-1] - trace.t[0]:.3g} s, half period: {trace.half_rabi_period():.3g} s)")


def fit_rabi_trace(trace: RabiTrace, model=RabiModel.GENERALIZED, n_max: int = DEFAULT_N_MAX) -> RabiFitResult:
    """Weighted least squares of the coherent-state sideband model against a trace."""
    check_trace(trace)
    sigma = trace.sigma()
    base = trace.params
    sideband_scale = base.eta * base.omega0
    span = trace.t[-1]

    def residuals(x):
        nbar, delta, gamma = x
        params = SidebandParams(base.eta, base.omega0, delta, 1 / gamma if gamma > 0 else math.inf,
                                base.mode_frequency)
        dist = fock_distribution_coherent(math.sqrt(max(nbar, 0.0)), n_max)
        return (sideband_signal(dist, trace.t, params, model) - trace.p_excite) / sigma

    starts = [[nbar, delta * sideband_scale, gamma / span]
              for nbar in (0.5, 2.0) for delta in (0.0, 0.3) for gamma in (0.0, 1.0)]
    outcome = multistart_least_squares(
        residuals, starts,
        bounds=([0.0, 0.0, 0.0], [NBAR_MAX, np.inf, np.inf]),
        x_scale=np.array([1.0, sideband_scale, 1 / span]),
        name="Rabi fit")

    nbar, delta, gamma = outcome.x
    t2 = 1 / gamma if gamma > 0 else math.inf
    # propagate gamma -> T2 = 1 / gamma
    jac = np.diag([1.0, 1.0, -t2 ** 2 if gamma > 0 else 0.0])
    covariance = jac @ outcome.covariance @ jac.T
    if gamma == 0:
        covariance[2, :] = covariance[:, 2] = 0.0
        covariance[2, 2] = math.inf
    return RabiFitResult(float(nbar), float(delta), float(t2), covariance, outcome.chi2, outcome.dof,
                         outcome.n_starts, outcome.n_converged)
