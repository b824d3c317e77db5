"""Vibronic Einstein-A coefficients from measured ac-Stark shifts."""
from dataclasses import dataclass
import math

import numpy as np

from errors import InputError
from stark.catalog import LaserField, LineCatalog, RoVibronicState, TransitionLine
from stark.shift import DEFAULT_HFS_SPACING_HZ, DEFAULT_POLE_GUARD_HZ, hyperfine_validity, line_kernel
from .points import StarkDataPoint, apply_mass_correction

LITERATURE_AVIB_PER_S = 3.87e4
LITERATURE_AVIB_SIGMA_PER_S = 0.14e4


def find_catalog_line(target_line: TransitionLine, catalog: LineCatalog) -> TransitionLine:
    for line in catalog.lines:
        if line.key() == target_line.key():
            return line
    raise InputError(f"Target line is not in the catalog. ({target_line.branch})")


def extract_avib(point: StarkDataPoint, target_line: TransitionLine, state: RoVibronicState,
                 catalog: LineCatalog, mass_correction: float = None,
                 pole_guard_hz: float = DEFAULT_POLE_GUARD_HZ) -> float:
    """Invert the Stark sum for the A_vib (1/s) of one line.

    Notes:
        A positive measured shift is read as a magnitude and takes the sign of
        the target-line kernel. A negative shift against a positive kernel is
        rejected. The contributions of every other catalog line (with their
        catalog A_vib) are subtracted before dividing by the kernel.
        mass_correction is applied when given and the point is not corrected yet.
    """
    target = find_catalog_line(target_line, catalog)
    if not target.lower.same_level(state):
        raise InputError(f"State does not couple to the target line. ({state}, {target.branch})")
    if mass_correction is not None and not point.mass_corrected:
        point = apply_mass_correction(point, mass_correction)

    laser = LaserField(point.intensity, point.frequency)
    kernel = line_kernel(target, state, laser, pole_guard_hz)
    if kernel == 0:
        raise InputError(f"Target line does not shift this sublevel. ({state}, {target.branch})")

    if point.stark_shift < 0 < kernel:
        raise InputError(
            f"Measured shift is negative but the line shifts the state upward. "
            f"({point.frequency} Hz, measured: {point.stark_shift:.6g} Hz)")
    measured = math.copysign(abs(point.stark_shift), kernel)
    others = 0.0
    for line in catalog.lines_from(state):
        if line is target:
            continue
        others += line_kernel(line, state, laser, pole_guard_hz) * line.a_vib
    a_vib = (measured - others) / kernel
    if a_vib < 0:
        raise InputError(
            f"Negative A_vib. Other lines exceed the measured shift. "
            f"({point.frequency} Hz, measured: {point.stark_shift:.6g} Hz, others: {others:.6g} Hz)")
    return a_vib


@dataclass(frozen=True, eq=False)
class AvibBatchResult:
    frequencies: np.ndarray  # Hz
    detunings: np.ndarray  # Hz
    values: np.ndarray  # 1/s
    sigmas: np.ndarray  # 1/s
    hyperfine_valid: np.ndarray  # bool

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def sem(self) -> float:
        """Standard error of the mean (0 for a single point)."""
        if self.values.size < 2:
            return 0.0
        return float(np.std(self.values, ddof=1) / math.sqrt(self.values.size))

    def literature_deviation(self) -> float:
        return (self.mean - LITERATURE_AVIB_PER_S) / math.hypot(self.sem, LITERATURE_AVIB_SIGMA_PER_S)

    def to_dict(self) -> dict:
        return {
            "points": [
                {"frequency_hz": float(f), "detuning_hz": float(d), "a_vib_per_s": float(a),
                 "sigma_per_s": float(s), "hyperfine_valid": bool(h)}
                for f, d, a, s, h in zip(self.frequencies, self.detunings, self.values,
                                         self.sigmas, self.hyperfine_valid)
            ],
            "mean_per_s": self.mean,
            "sem_per_s": self.sem,
            "literature_a_vib_per_s": LITERATURE_AVIB_PER_S,
            "literature_deviation_sigma": self.literature_deviation(),
        }

    def print(self, padding: int = 2):
        pad = " " * padding
        print(pad + f"points: {self.values.size}")
        print(pad + f"mean A_vib (1/s): {self.mean:.6g} +- {self.sem:.2g}")
        if not np.all(self.hyperfine_valid):
            print(f"Warning: {int(np.sum(~self.hyperfine_valid))} point(s) are hyperfine-sensitive.")


def extract_avib_batch(points: list[StarkDataPoint], target_line: TransitionLine, state: RoVibronicState,
                       catalog: LineCatalog, mass_correction: float = None,
                       pole_guard_hz: float = DEFAULT_POLE_GUARD_HZ,
                       hfs_spacing_hz: float = DEFAULT_HFS_SPACING_HZ) -> AvibBatchResult:
    """Per-point A_vib values with their mean and hyperfine-validity flags."""
    if len(points) == 0:
        raise InputError("No Stark data points.")
    target = find_catalog_line(target_line, catalog)
    values, sigmas, detunings, valid = [], [], [], []
    for point in points:
        a_vib = extract_avib(point, target, state, catalog, mass_correction, pole_guard_hz)
        values.append(a_vib)
        # linear inversion, so the relative error carries over
        rel = point.sigma / abs(point.stark_over_intensity) if point.stark_over_intensity != 0 else math.inf
        sigmas.append(a_vib * rel if a_vib > 0 else math.inf)
        point = point.with_detuning(target.frequency)
        detunings.append(point.detuning)
        valid.append(hyperfine_validity(point.detuning, hfs_spacing_hz).valid)
    return AvibBatchResult(
        np.array([p.frequency for p in points], dtype=float), np.array(detunings), np.array(values),
        np.array(sigmas), np.array(valid, dtype=bool))
