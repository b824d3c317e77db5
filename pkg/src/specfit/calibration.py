"""Calibration of the Rabi-fit parameters against known ac-Stark shifts.

Notes:
    Polynomials use numpy.polynomial order (lowest degree first) and take the shift in Hz.
    Default degrees: <n> quadratic, delta and T2 linear.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from numpy.polynomial import polynomial as P

from errors import InputError
from motion.fock import DEFAULT_N_MAX, fock_distribution_coherent
from motion.sideband import RabiModel, SidebandParams, sideband_signal
from .lsq import multistart_least_squares
from .rabi_fit import RabiFitResult, RabiTrace

MIN_CALIBRATION_SHIFTS = 4
DEFAULT_DEGREES = {"nbar": 2, "delta": 1, "t2": 1}
CHECK_POINTS = 201
SCAN_POINTS = 41
# relative distance to a range edge that counts as "at the boundary"
BOUNDARY_TOLERANCE = 1e-3


@dataclass(frozen=True, eq=False)
class CalibrationModel:
    nbar_coeffs: np.ndarray
    delta_coeffs: np.ndarray
    t2_coeffs: np.ndarray
    valid_range: tuple[float, float]  # Hz
    degrees: dict = field(default_factory=lambda: dict(DEFAULT_DEGREES))

    def __post_init__(self):
        for name in ["nbar_coeffs", "delta_coeffs", "t2_coeffs"]:
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        low, high = self.valid_range
        if not low < high:
            raise InputError(f"Calibration range is empty. ({low}, {high})")
        grid = np.linspace(low, high, CHECK_POINTS)
        if np.any(self.nbar(grid) < 0):
            raise InputError("Calibrated <n> becomes negative inside the valid range.")
        if np.any(self.t2(grid) <= 0):
            raise InputError("Calibrated T2 is not positive inside the valid range.")

    def nbar(self, shift):
        return P.polyval(shift, self.nbar_coeffs)

    def delta(self, shift):
        return P.polyval(shift, self.delta_coeffs)

    def t2(self, shift):
        return P.polyval(shift, self.t2_coeffs)

    def params(self, shift: float, base: SidebandParams) -> SidebandParams:
        return SidebandParams(base.eta, base.omega0, float(self.delta(shift)), float(self.t2(shift)),
                              base.mode_frequency)

    def signal(self, shift: float, t, base: SidebandParams, model=RabiModel.GENERALIZED,
               n_max: int = DEFAULT_N_MAX):
        """Calibrated sideband signal for a given ac-Stark shift."""
        nbar = max(float(self.nbar(shift)), 0.0)
        dist = fock_distribution_coherent(math.sqrt(nbar), n_max)
        return sideband_signal(dist, t, self.params(shift, base), model)

    def contains(self, shift: float) -> bool:
        return self.valid_range[0] <= shift <= self.valid_range[1]

    def to_dict(self) -> dict:
        return {
            "nbar_coeffs": self.nbar_coeffs.tolist(),
            "delta_coeffs": self.delta_coeffs.tolist(),
            "t2_coeffs": self.t2_coeffs.tolist(),
            "valid_range": list(self.valid_range),
            "degrees": dict(self.degrees),
        }

    @staticmethod
    def from_dict(data: dict) -> "CalibrationModel":
        try:
            return CalibrationModel(
                data["nbar_coeffs"], data["delta_coeffs"], data["t2_coeffs"],
                tuple(data["valid_range"]), dict(data.get("degrees", DEFAULT_DEGREES)))
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"Invalid calibration data. ({e})")

    def print(self, padding: int = 2):
        pad = " " * padding
        print(pad + f"valid range (Hz): {self.valid_range[0]:.6g} - {self.valid_range[1]:.6g}")
        print(pad + f"<n> coeffs: {self.nbar_coeffs.tolist()}")
        print(pad + f"delta coeffs: {self.delta_coeffs.tolist()}")
        print(pad + f"T2 coeffs: {self.t2_coeffs.tolist()}")


def build_calibration(points: list[tuple[float, RabiFitResult]], degrees: dict = None) -> CalibrationModel:
    """Polynomial fits of <n>, delta, and T2 against the applied shift."""
    degrees = dict(DEFAULT_DEGREES if degrees is None else degrees)
    for key in DEFAULT_DEGREES:
        if key not in degrees or degrees[key] < 0:
            raise InputError(f"Missing or invalid polynomial degree. ({key})")
    shifts = np.array([s for s, _ in points], dtype=float)
    if np.unique(shifts).size < MIN_CALIBRATION_SHIFTS:
        raise InputError(
            f"Calibration needs at least {MIN_CALIBRATION_SHIFTS} distinct shifts. ({np.unique(shifts).size})")
    t2 = np.array([r.t2 for _, r in points], dtype=float)
    if not np.all(np.isfinite(t2)):
        raise InputError("A calibration fit has an unresolved T2 (infinite).")

    nbar_coeffs = P.polyfit(shifts, [r.nbar for _, r in points], degrees["nbar"])
    delta_coeffs = P.polyfit(shifts, [r.delta for _, r in points], degrees["delta"])
    t2_coeffs = P.polyfit(shifts, t2, degrees["t2"])
    return CalibrationModel(nbar_coeffs, delta_coeffs, t2_coeffs,
                            (float(shifts.min()), float(shifts.max())), degrees)


@dataclass(frozen=True)
class StarkFitResult:
    stark_shift: float  # Hz
    sigma: float  # Hz
    at_boundary: bool
    out_of_range: bool
    chi2: float
    dof: int

    @property
    def reduced_chi2(self) -> float:
        return self.chi2 / self.dof if self.dof > 0 else float("nan")

    def to_dict(self) -> dict:
        return {
            "stark_shift_hz": self.stark_shift,
            "sigma_hz": self.sigma,
            "at_boundary": self.at_boundary,
            "out_of_range": self.out_of_range,
            "chi2": self.chi2,
            "reduced_chi2": self.reduced_chi2,
            "dof": self.dof,
        }


def stark_from_trace(trace: RabiTrace, calib: CalibrationModel, model=RabiModel.GENERALIZED,
                     n_max: int = DEFAULT_N_MAX) -> StarkFitResult:
    """One-parameter fit of the calibrated signal model. The shift is searched inside the valid range.

    Notes:
        A grid scan picks the start, then a bounded least-squares refines it.
        at_boundary is set when the optimum sits on a range edge.
        out_of_range is set when the estimate +- sigma leaves the valid range.
    """
    if len(trace) < 2:
        raise InputError(f"Stark fit needs at least 2 samples. ({len(trace)})")
    sigma = trace.sigma()
    low, high = calib.valid_range

    def residuals(x):
        return (calib.signal(x[0], trace.t, trace.params, model, n_max) - trace.p_excite) / sigma

    grid = np.linspace(low, high, SCAN_POINTS)
    costs = np.array([np.sum(residuals([s]) ** 2) for s in grid])
    order = np.argsort(costs, kind="stable")
    outcome = multistart_least_squares(
        residuals, [[grid[i]] for i in order[:2]], bounds=([low], [high]),
        x_scale=[high - low], name="Stark fit")

    shift = float(outcome.x[0])
    shift_sigma = float(outcome.sigma[0])
    edge = BOUNDARY_TOLERANCE * (high - low)
    at_boundary = shift - low <= edge or high - shift <= edge
    out_of_range = at_boundary or not (calib.contains(shift - shift_sigma) and calib.contains(shift + shift_sigma))
    if at_boundary:
        print(f"Warning: Stark fit is at the calibration boundary. ({shift:.6g} Hz)")
    return StarkFitResult(shift, shift_sigma, at_boundary, out_of_range, outcome.chi2, outcome.dof)
