"""Ac-Stark shifts from a line catalog.

Notes:
    Second-order perturbation theory outside the rotating-wave approximation
    for pi-polarized light:

        dE_i = -sum_j 3 pi c^2 / (w_ij^2 (w_ij^2 - w^2)) * I * S_rot * A_vib
                      * (2 J_j + 1) * 3j(J_j, 1, J_i; -m, 0, m)^2

    Inputs and outputs are plain frequencies in Hz (dE / h).
    Angular frequencies only appear inside line_kernel().
"""
import concurrent.futures
from dataclasses import dataclass
import math

from scipy import constants

from errors import InputError, PoleError
from util import split_chunks
from .catalog import LaserField, LineCatalog, RoVibronicState, TransitionLine
from .wigner import wigner3j_squared

DEFAULT_POLE_GUARD_HZ = 1e3
DEFAULT_HFS_SPACING_HZ = 300e6
HFS_VALIDITY_FACTOR = 10

# Anchor of the scattering budget: ~1000 QND cycles at 10 GHz detuning and 10 kHz shift.
REFERENCE_DETUNING_HZ = 10e9
REFERENCE_STARK_HZ = 10e3
REFERENCE_CYCLES = 1000
PULSES_PER_CYCLE = 20

# Grids smaller than this are evaluated in the calling process.
PARALLEL_MIN_POINTS = 4096


def check_pole(line: TransitionLine, laser: LaserField, pole_guard_hz: float):
    if abs(laser.frequency - line.frequency) < pole_guard_hz:
        raise PoleError(
            f"Laser frequency is inside the pole guard of a resonance."
            f" ({line.branch}, laser: {laser.frequency} Hz, line: {line.frequency} Hz)")


def line_kernel(line: TransitionLine, state: RoVibronicState, laser: LaserField,
                pole_guard_hz: float = DEFAULT_POLE_GUARD_HZ) -> float:
    """Shift in Hz contributed by one line per unit A_vib (1/s)."""
    if state.twice_m is None:
        raise InputError(f"State needs a magnetic sublevel. ({state})")
    check_pole(line, laser, pole_guard_hz)

    twice_m = state.twice_m
    if abs(twice_m) > line.upper.twice_j:
        # pi light keeps m, and the upper level has no such sublevel
        return 0.0
    angular = (line.upper.twice_j + 1) * float(
        wigner3j_squared(line.upper.twice_j, 2, state.twice_j, -twice_m, 0, twice_m))

    w_ij = 2 * math.pi * line.frequency
    w = 2 * math.pi * laser.frequency
    # (w_ij^2 - w^2) factored for precision near resonance
    denom = w_ij ** 2 * (w_ij - w) * (w_ij + w)
    energy = -3 * math.pi * constants.c ** 2 / denom * laser.intensity * line.s_rot * angular
    return energy / constants.h


def ac_stark_shift(state: RoVibronicState, laser: LaserField, catalog: LineCatalog,
                   pole_guard_hz: float = DEFAULT_POLE_GUARD_HZ) -> float:
    """Ac-Stark shift of a state in Hz (signed)."""
    if len(catalog.lines) == 0:
        raise InputError(f"Catalog is empty. ({catalog.name})")
    shift = 0.0
    for line in catalog.lines_from(state):
        shift += line_kernel(line, state, laser, pole_guard_hz) * line.a_vib
    return shift


@dataclass(frozen=True)
class SpectrumRow:
    frequency: float
    bright_shift: float  # None when masked
    other_shift: float  # None when masked


def masked_shift(state, laser, catalog, pole_guard_hz):
    try:
        return ac_stark_shift(state, laser, catalog, pole_guard_hz)
    except PoleError:
        return None


def spectrum_row(bright_state, other_states, intensity, frequency, catalog, pole_guard_hz) -> SpectrumRow:
    laser = LaserField(intensity, frequency)
    bright = masked_shift(bright_state, laser, catalog, pole_guard_hz)
    other = 0.0
    for state in other_states:
        shift = masked_shift(state, laser, catalog, pole_guard_hz)
        if shift is None:
            other = None
            break
        other = max(other, abs(shift))
    return SpectrumRow(frequency, bright, other)


def spectrum_chunk(bright_state, other_states, intensity, frequencies, catalog, pole_guard_hz):
    return [spectrum_row(bright_state, other_states, intensity, f, catalog, pole_guard_hz)
            for f in frequencies]


def stark_spectrum(bright_state: RoVibronicState, other_states: list[RoVibronicState],
                   intensity: float, frequency_grid: list[float], catalog: LineCatalog,
                   pole_guard_hz: float = DEFAULT_POLE_GUARD_HZ,
                   max_workers: int = 1) -> list[SpectrumRow]:
    """Bright-state shift and the largest |shift| of the other states on a frequency grid.

    Notes:
        Grid points inside a pole guard are masked (None).
        The maximum over an empty list of other states is 0.
    """
    if len(catalog.lines) == 0:
        raise InputError(f"Catalog is empty. ({catalog.name})")
    frequency_grid = list(frequency_grid)
    if max_workers == 1 or len(frequency_grid) < PARALLEL_MIN_POINTS:
        return spectrum_chunk(bright_state, other_states, intensity, frequency_grid, catalog, pole_guard_hz)

    chunks = split_chunks(frequency_grid, PARALLEL_MIN_POINTS // 4)
    with concurrent.futures.ProcessPoolExecutor(max_workers) as executor:
        futures = [
            executor.submit(spectrum_chunk, bright_state, other_states, intensity, chunk, catalog, pole_guard_hz)
            for chunk in chunks
        ]
        concurrent.futures.wait(futures)
        rows = [row for future in futures for row in future.result()]
    return rows


@dataclass(frozen=True)
class ScatteringBudget:
    cycles: float
    bsb_pulses: float


def scattering_budget(detuning: float, stark_shift: float) -> ScatteringBudget:
    """Expected QND cycles before an off-resonant scattering event.

    Notes:
        Scattering goes as 1/detuning^2 and the shift as 1/detuning, so at a fixed
        shift the number of cycles grows linearly with the detuning.
    """
    if detuning == 0:
        raise InputError("Detuning must not be zero.")
    if not stark_shift > 0:
        raise InputError(f"Stark shift must be positive. ({stark_shift})")
    cycles = REFERENCE_CYCLES * (abs(detuning) / REFERENCE_DETUNING_HZ) * (REFERENCE_STARK_HZ / stark_shift)
    return ScatteringBudget(cycles, PULSES_PER_CYCLE * cycles)


@dataclass(frozen=True)
class HyperfineCheck:
    valid: bool
    message: str


def hyperfine_validity(detuning: float, hfs_spacing: float = DEFAULT_HFS_SPACING_HZ) -> HyperfineCheck:
    """Flag detunings where unresolved hyperfine structure matters (|detuning| <= 10 * spacing)."""
    limit = HFS_VALIDITY_FACTOR * hfs_spacing
    if abs(detuning) <= limit:
        return HyperfineCheck(
            False, f"hyperfine-sensitive: |detuning| = {abs(detuning):.4g} Hz <= {limit:.4g} Hz")
    return HyperfineCheck(True, f"valid: |detuning| = {abs(detuning):.4g} Hz > {limit:.4g} Hz")
