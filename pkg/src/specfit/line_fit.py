"""Line-center fit of the C / |f - f0| ac-Stark profile.

Notes:
    Frequencies are handled as offsets from the largest-|shift| point,
    so that the fit does not lose precision on ~380 THz absolute values.
"""
from dataclasses import dataclass
import math

import numpy as np

from errors import ConvergenceError, InputError, PoleError
from stark.shift import DEFAULT_POLE_GUARD_HZ
from .lsq import multistart_least_squares
from .points import StarkDataPoint

MIN_POINTS = 3
START_OFFSETS = (0.1, 0.2, 0.5, 1.0)  # times the grid span, on both sides
DEFAULT_WAVEMETER_SIGMA_HZ = 50e6
LITERATURE_F0_HZ = 380.7007e12
LITERATURE_F0_SIGMA_HZ = 0.3e9


@dataclass(frozen=True, eq=False)
class LineFitResult:
    f0: float  # Hz
    amplitude_c: float  # Hz^2 m^2 / W
    covariance: np.ndarray  # on (f0, C)
    wavemeter_sigma: float  # Hz
    chi2: float
    dof: int
    n_starts: int
    n_converged: int

    @property
    def f0_sigma_stat(self) -> float:
        return math.sqrt(abs(self.covariance[0, 0]))

    @property
    def f0_sigma(self) -> float:
        """Statistical and wavemeter uncertainty added in quadrature."""
        return math.hypot(self.f0_sigma_stat, self.wavemeter_sigma)

    @property
    def amplitude_sigma(self) -> float:
        return math.sqrt(abs(self.covariance[1, 1]))

    @property
    def reduced_chi2(self) -> float:
        return self.chi2 / self.dof if self.dof > 0 else float("nan")

    def literature_deviation(self) -> float:
        """Distance to the literature line center in combined sigma."""
        return (self.f0 - LITERATURE_F0_HZ) / math.hypot(self.f0_sigma, LITERATURE_F0_SIGMA_HZ)

    def to_dict(self) -> dict:
        return {
            "f0_hz": self.f0,
            "f0_sigma_stat_hz": self.f0_sigma_stat,
            "f0_sigma_hz": self.f0_sigma,
            "wavemeter_sigma_hz": self.wavemeter_sigma,
            "amplitude_c": self.amplitude_c,
            "amplitude_c_sigma": self.amplitude_sigma,
            "covariance": self.covariance.tolist(),
            "chi2": self.chi2,
            "reduced_chi2": self.reduced_chi2,
            "dof": self.dof,
            "starts": self.n_starts,
            "converged_starts": self.n_converged,
            "literature_f0_hz": LITERATURE_F0_HZ,
            "literature_deviation_sigma": self.literature_deviation(),
        }

    def print(self, padding: int = 2):
        pad = " " * padding
        print(pad + f"f0 (Hz): {self.f0:.10e} +- {self.f0_sigma:.2e}")
        print(pad + f"C: {self.amplitude_c:.6e} +- {self.amplitude_sigma:.2e}")
        print(pad + f"reduced chi2: {self.reduced_chi2:.4g}")


def fit_line_center(points: list[StarkDataPoint], pole_guard_hz: float = DEFAULT_POLE_GUARD_HZ,
                    wavemeter_sigma_hz: float = DEFAULT_WAVEMETER_SIGMA_HZ) -> LineFitResult:
    """Weighted fit of stark_over_intensity = C / |f - f0|."""
    if len(points) < MIN_POINTS:
        raise InputError(f"Line fit needs at least {MIN_POINTS} points. ({len(points)})")
    freq = np.array([p.frequency for p in points], dtype=float)
    y = np.array([p.stark_over_intensity for p in points], dtype=float)
    sigma = np.array([p.sigma for p in points], dtype=float)

    peak = int(np.argmax(np.abs(y)))
    ref = freq[peak]
    x = freq - ref
    span = float(x.max() - x.min())
    if span == 0:
        raise InputError("Line fit needs at least two distinct frequencies.")
    pole_hits = []

    def residuals(params):
        d, c = params
        dist = np.abs(x - d)
        if np.any(dist < pole_guard_hz):
            pole_hits.append(d)
            raise PoleError(f"A data point hit the pole of the line profile. (f0: {ref + d} Hz)")
        return (c / dist - y) / sigma

    starts = []
    for offset in START_OFFSETS:
        for sign in (1, -1):
            d0 = sign * offset * span
            starts.append([d0, y[peak] * abs(d0)])

    def inside_guard(x0):
        return bool(np.any(np.abs(x - x0[0]) < pole_guard_hz))

    try:
        outcome = multistart_least_squares(
            residuals, starts, x_scale=np.array([span, abs(y[peak]) * span]),
            skip=inside_guard, name="line fit")
    except ConvergenceError as e:
        if pole_hits:
            raise PoleError(f"Every start of the line fit ran into a pole. ({len(pole_hits)} hits)") from e
        raise

    d, c = outcome.x
    return LineFitResult(float(ref + d), float(c), outcome.covariance, wavemeter_sigma_hz,
                         outcome.chi2, outcome.dof, outcome.n_starts, outcome.n_converged)
