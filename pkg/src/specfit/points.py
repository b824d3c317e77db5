"""Stark-spectroscopy data points and the atom-to-molecule mass correction."""
from dataclasses import dataclass, replace
import math

from errors import InputError

DEFAULT_MASS_CORRECTION = 1.17
MASS_ATOM_AMU = 40.0  # 40Ca+
MASS_MOLECULE_AMU = 28.0  # 14N2+


@dataclass(frozen=True)
class StarkDataPoint:
    """One measured ac-Stark shift, normalized by the lattice-laser intensity."""
    frequency: float  # Hz
    intensity: float  # W/m^2
    stark_over_intensity: float  # Hz / (W/m^2)
    sigma: float  # same units
    detuning: float = None  # Hz from the target line, when known
    mass_corrected: bool = False

    def __post_init__(self):
        if not self.frequency > 0:
            raise InputError(f"Laser frequency must be positive. ({self.frequency})")
        if not self.intensity > 0:
            raise InputError(f"Intensity must be positive. ({self.intensity})")
        if not self.sigma > 0:
            raise InputError(f"Sigma must be positive. ({self.sigma})")

    @property
    def stark_shift(self) -> float:
        """Measured shift in Hz."""
        return self.stark_over_intensity * self.intensity

    def with_detuning(self, line_frequency: float) -> "StarkDataPoint":
        return replace(self, detuning=self.frequency - line_frequency)


def mass_corrected_wavelength(wavelength: float, mass_atom: float = MASS_ATOM_AMU,
                              mass_molecule: float = MASS_MOLECULE_AMU) -> float:
    """Wavelength scaled by sqrt(mass_atom / mass_molecule)."""
    if not mass_atom > 0 or not mass_molecule > 0:
        raise InputError(f"Masses must be positive. ({mass_atom}, {mass_molecule})")
    return wavelength * math.sqrt(mass_atom / mass_molecule)


def apply_mass_correction(value, factor: float = DEFAULT_MASS_CORRECTION):
    """Scale a shift (Hz) or a StarkDataPoint by the mass-correction factor.

    Notes:
        A StarkDataPoint carries a flag, so the factor can only be applied to it once.
    """
    if not factor > 0:
        raise InputError(f"Mass-correction factor must be positive. ({factor})")
    if isinstance(value, StarkDataPoint):
        if value.mass_corrected:
            raise InputError(f"Mass correction is already applied to this point. ({value.frequency} Hz)")
        return replace(value, stark_over_intensity=value.stark_over_intensity * factor,
                       sigma=value.sigma * factor, mass_corrected=True)
    return value * factor
