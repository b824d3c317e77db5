"""Sideband Rabi signals of a motional Fock distribution.

Notes:
    Frequencies are stored as plain Hz (Omega / 2pi).
    to_angular() is the only place where they are multiplied by 2pi.
"""
from dataclasses import dataclass, replace
from enum import Enum
import math

import numpy as np

from errors import InputError
from .fock import FockDistribution

DEFAULT_ETA = 0.1
DEFAULT_OMEGA0_HZ = 90e3
DEFAULT_MODE_FREQUENCY_HZ = 620e3


class RabiModel(Enum):
    SIMPLE = "simple"  # eta sqrt(n) Omega0
    GENERALIZED = "generalized"  # Omega0 eta exp(-eta^2/2) L^1_{n-1}(eta^2) / sqrt(n)


@dataclass(frozen=True)
class SidebandParams:
    eta: float = DEFAULT_ETA
    omega0: float = DEFAULT_OMEGA0_HZ  # Hz
    delta: float = 0.0  # Hz
    t2: float = math.inf  # s
    mode_frequency: float = DEFAULT_MODE_FREQUENCY_HZ  # Hz

    def __post_init__(self):
        if not self.eta > 0:
            raise InputError(f"Lamb-Dicke parameter must be positive. ({self.eta})")
        if not self.omega0 > 0:
            raise InputError(f"Bare Rabi frequency must be positive. ({self.omega0})")
        if not self.t2 > 0:
            raise InputError(f"T2 must be positive. ({self.t2})")
        if not math.isfinite(self.delta):
            raise InputError(f"Detuning must be finite. ({self.delta})")

    def ideal(self) -> "SidebandParams":
        """Same parameters with no detuning and no decoherence."""
        return replace(self, delta=0.0, t2=math.inf)

    def print(self, padding: int = 2):
        pad = " " * padding
        print(pad + f"eta: {self.eta}")
        print(pad + f"omega0 (Hz): {self.omega0}")
        print(pad + f"delta (Hz): {self.delta}")
        print(pad + f"T2 (s): {self.t2}")
        print(pad + f"mode frequency (Hz): {self.mode_frequency}")


def to_angular(freq):
    return 2 * math.pi * freq


def parse_model(model) -> RabiModel:
    if isinstance(model, RabiModel):
        return model
    try:
        return RabiModel(model)
    except ValueError:
        raise InputError(f"Unknown Rabi model. ({model})")


def laguerre_table(order_max: int, superscript: int, x: float) -> np.ndarray:
    """L^a_k(x) for k = 0..order_max by the three-term recurrence."""
    if order_max < 0 or superscript < 0:
        raise InputError(f"Laguerre order and superscript must not be negative. ({order_max}, {superscript})")
    table = np.empty(order_max + 1)
    table[0] = 1.0
    if order_max >= 1:
        table[1] = 1.0 + superscript - x
    for k in range(1, order_max):
        table[k + 1] = ((2 * k + 1 + superscript - x) * table[k] - (k + superscript) * table[k - 1]) / (k + 1)
    return table


def laguerre_generalized(order_k: int, superscript: int, x: float) -> float:
    """Generalized Laguerre polynomial L^a_k(x)."""
    return float(laguerre_table(order_k, superscript, x)[order_k])


def rabi_frequencies(n_max: int, params: SidebandParams, model=RabiModel.GENERALIZED) -> np.ndarray:
    """Sideband Rabi frequencies (Hz) for n = 0..n_max. The n = 0 entry is 0."""
    model = parse_model(model)
    n = np.arange(n_max + 1, dtype=float)
    freqs = np.zeros(n_max + 1)
    if n_max == 0:
        return freqs
    if model == RabiModel.SIMPLE:
        freqs[1:] = params.eta * np.sqrt(n[1:]) * params.omega0
    else:
        eta2 = params.eta ** 2
        lag = laguerre_table(n_max - 1, 1, eta2)
        freqs[1:] = params.omega0 * params.eta * math.exp(-eta2 / 2) * lag / np.sqrt(n[1:])
    return freqs


def rabi_frequency(n: int, params: SidebandParams, model=RabiModel.GENERALIZED) -> float:
    """Rabi frequency (Hz) of the |n> <-> |n-1> sideband transition."""
    if n < 0:
        raise InputError(f"Fock number must not be negative. ({n})")
    return float(rabi_frequencies(n, params, model)[n])


def sideband_signal(dist: FockDistribution, t, params: SidebandParams, model=RabiModel.GENERALIZED):
    """Excitation probability after a sideband pulse of length t (scalar or array, seconds).

    Notes:
        y = sum_n P(n) Omega_n^2 / W_n^2 * sin^2(W_n t / 2), W_n^2 = Omega_n^2 + delta^2
        P = y exp(-t/T2) + (1 - exp(-t/T2)) / 2
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise InputError("Pulse time must not be negative.")

    omega = to_angular(rabi_frequencies(dist.n_max, params, model))[1:]
    delta = to_angular(params.delta)
    probs = dist.probabilities[1:]
    w2 = omega ** 2 + delta ** 2
    w = np.sqrt(w2)
    with np.errstate(divide="ignore", invalid="ignore"):
        weight = np.where(w2 > 0, omega ** 2 / w2, 0.0)

    flat = t_arr.reshape(-1)
    y = (np.sin(np.outer(flat, w) / 2) ** 2) @ (probs * weight)
    if math.isinf(params.t2):
        signal = y
    else:
        decay = np.exp(-flat / params.t2)
        signal = y * decay + (1 - decay) / 2
    signal = np.clip(signal, 0.0, 1.0).reshape(t_arr.shape)
    if signal.ndim == 0:
        return float(signal)
    return signal


def pulse_times(t_start: float, t_stop: float, n_pulses: int) -> np.ndarray:
    if n_pulses < 1:
        raise InputError(f"Number of pulses must be positive. ({n_pulses})")
    if t_start < 0 or t_stop < t_start:
        raise InputError(f"Invalid pulse-time window. ({t_start}, {t_stop})")
    return np.linspace(t_start, t_stop, n_pulses)


def window_average_signal(dist: FockDistribution, t_start: float, t_stop: float, n_pulses: int,
                          params: SidebandParams, model=RabiModel.GENERALIZED) -> float:
    """Mean signal of n_pulses pulses with equally spaced lengths in [t_start, t_stop]."""
    times = pulse_times(t_start, t_stop, n_pulses)
    return float(np.mean(sideband_signal(dist, times, params, model)))


def max_contrast_time(bright: FockDistribution, dark: FockDistribution, params: SidebandParams,
                      t_grid, model=RabiModel.GENERALIZED) -> tuple[float, float]:
    """Pulse time on the grid with the largest bright-minus-dark signal, and that contrast."""
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0:
        raise InputError("Time grid is empty.")
    contrast = sideband_signal(bright, t_grid, params, model) - sideband_signal(dark, t_grid, params, model)
    i = int(np.argmax(contrast))
    return float(t_grid.reshape(-1)[i]), float(np.reshape(contrast, -1)[i])
