"""Coherent displacement by the optical-dipole force."""
from dataclasses import dataclass
import math

import numpy as np
from scipy import optimize

from errors import ConvergenceError, InputError
from .fock import DEFAULT_N_MAX, fock_distribution_coherent
from .sideband import DEFAULT_ETA, RabiModel, SidebandParams, sideband_signal

DEFAULT_PULSE_TIME_S = 500e-6
DEFAULT_MASS_CORRECTION = 1.17
DEFAULT_ANCHOR_SIGNAL = 0.52
DEFAULT_PROBE_TIME_S = 20e-6

# search grid for the anchor root; the first crossing is taken
ALPHA_SCAN = np.linspace(0, 4, 161)


@dataclass(frozen=True)
class OdfConfig:
    stark_shift: float  # Hz, molecular dE / h
    pulse_time: float = DEFAULT_PULSE_TIME_S  # s
    coupling_constant: float = 1.0  # kappa
    mass_correction: float = DEFAULT_MASS_CORRECTION

    def __post_init__(self):
        if self.pulse_time < 0:
            raise InputError(f"ODF pulse time must not be negative. ({self.pulse_time})")
        if not self.mass_correction > 0:
            raise InputError(f"Mass correction must be positive. ({self.mass_correction})")
        if self.coupling_constant < 0:
            raise InputError(f"Coupling constant must not be negative. ({self.coupling_constant})")


def odf_displacement(config: OdfConfig, eta: float = DEFAULT_ETA) -> float:
    """|alpha| = kappa * pi * eta * (mass_correction * |dE|) * t_ODF."""
    if not eta > 0:
        raise InputError(f"Lamb-Dicke parameter must be positive. ({eta})")
    return (config.coupling_constant * math.pi * eta
            * config.mass_correction * abs(config.stark_shift) * config.pulse_time)


def anchor_alpha(params: SidebandParams, anchor_signal: float = DEFAULT_ANCHOR_SIGNAL,
                 probe_time: float = DEFAULT_PROBE_TIME_S, n_max: int = DEFAULT_N_MAX,
                 model=RabiModel.GENERALIZED) -> float:
    """Smallest |alpha| whose ideal sideband signal at probe_time equals anchor_signal."""
    if not 0 < anchor_signal < 1:
        raise InputError(f"Anchor signal must be in (0, 1). ({anchor_signal})")
    ideal = params.ideal()

    def residual(alpha):
        dist = fock_distribution_coherent(alpha, n_max)
        return sideband_signal(dist, probe_time, ideal, model) - anchor_signal

    values = [residual(a) for a in ALPHA_SCAN]
    for i in range(1, len(ALPHA_SCAN)):
        if values[i - 1] < 0 <= values[i]:
            return optimize.brentq(residual, ALPHA_SCAN[i - 1], ALPHA_SCAN[i], xtol=1e-12)
    raise ConvergenceError(
        f"Sideband signal never reaches the anchor. (anchor: {anchor_signal}, probe time: {probe_time} s)")


def calibrate_coupling(stark_shift: float, params: SidebandParams,
                       pulse_time: float = DEFAULT_PULSE_TIME_S,
                       mass_correction: float = DEFAULT_MASS_CORRECTION,
                       anchor_signal: float = DEFAULT_ANCHOR_SIGNAL,
                       probe_time: float = DEFAULT_PROBE_TIME_S,
                       n_max: int = DEFAULT_N_MAX, model=RabiModel.GENERALIZED) -> float:
    """Coupling constant kappa that maps the operating shift onto the anchor signal."""
    if stark_shift == 0:
        raise InputError("Operating Stark shift must not be zero.")
    if not pulse_time > 0:
        raise InputError(f"ODF pulse time must be positive. ({pulse_time})")
    alpha = anchor_alpha(params, anchor_signal, probe_time, n_max, model)
    unit = OdfConfig(stark_shift, pulse_time, 1.0, mass_correction)
    return alpha / odf_displacement(unit, params.eta)
