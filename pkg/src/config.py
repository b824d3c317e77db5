"""Run configuration.

Notes:
    Flat text file, one "key = value" per line, "#" starts a comment.
    Precedence: overrides (--set, --seed) > user file (--config or QND_TOOLS_CONFIG) > src/config.cfg > DEFAULTS.
"""
import math
import os

from errors import InputError

CONFIG_ENV = "QND_TOOLS_CONFIG"
BUNDLED_CONFIG = os.path.join(os.path.dirname(__file__), "config.cfg")


def parse_bool(value: str) -> bool:
    value = value.strip().lower()
    if value in ["1", "true", "yes", "on"]:
        return True
    if value in ["0", "false", "no", "off"]:
        return False
    raise ValueError(f"not a boolean: {value}")


def parse_float_list(value: str) -> tuple:
    return tuple(float(v) for v in value.split(",") if v.strip() != "")


def parse_window(value: str) -> tuple:
    window = parse_float_list(value)
    if len(window) != 2:
        raise ValueError("expected two comma-separated values")
    return window


def parse_seed(value: str) -> int:
    seed = int(value, 0)
    if not 0 <= seed < 2 ** 64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return seed


# key: (parser, default)
DEFAULTS = {
    "catalog_path": (str, "n2plus"),
    "ca_catalog_path": (str, "ca_plus"),
    "bright_state": (str, "X2Sigma_g+(v=0;N=0;J=1/2)"),
    "bright_twice_m": (int, 1),
    "intensity_w_m2": (float, 2e6),
    "detuning_hz": (float, -17e9),
    "eta": (float, 0.1),
    "omega0_hz": (float, 90e3),
    "mode_frequency_hz": (float, 620e3),
    "t_odf_s": (float, 500e-6),
    "t729_s": (float, 20e-6),
    "t729_window_s": (parse_window, (16.7e-6, 26.7e-6)),
    "t2_s": (float, math.inf),
    "delta_hz": (float, 0.0),
    "nbar_background": (float, 0.05),
    "n_max": (int, 64),
    "anchor_signal": (float, 0.52),
    "rabi_model": (str, "generalized"),
    "p_alpha": (float, 0.52),
    "p_beta": (float, 0.06),
    "n_rep": (int, 22),
    "threshold_p": (float, 0.25),
    "prep_success": (float, 0.97),
    "mass_correction": (float, 1.17),
    "mass_atom_amu": (float, 40.0),
    "mass_molecule_amu": (float, 28.0),
    "pole_guard_hz": (float, 1e3),
    "hfs_spacing_hz": (float, 300e6),
    "wavemeter_sigma_hz": (float, 50e6),
    "fidelity_targets": (parse_float_list, (0.99, 0.995, 0.999)),
    "histogram_bins": (int, 22),
    "seed": (parse_seed, 0),
    "max_workers": (int, -1),
}


class RunConfig:
    """Flat key-value settings with typed values."""

    def __init__(self, values: dict = None, sources: dict = None):
        self.values = {key: default for key, (_, default) in DEFAULTS.items()}
        self.sources = {key: "default" for key in DEFAULTS}
        if values:
            for key, value in values.items():
                self.set(key, value, (sources or {}).get(key, "code"))

    def __getitem__(self, key):
        if key not in self.values:
            raise InputError(f"Unknown config key. ({key})")
        return self.values[key]

    def __contains__(self, key):
        return key in self.values

    def set(self, key: str, value, source: str = "code"):
        if key not in DEFAULTS:
            raise InputError(f"Unknown config key. ({key}, {source})")
        parser = DEFAULTS[key][0]
        if isinstance(value, str):
            value = value.strip()
            try:
                value = parser(value)
            except ValueError as e:
                raise InputError(f"Invalid config value. ({key} = {value!r}, {source}: {e})")
        self.values[key] = value
        self.sources[key] = source

    def update_text(self, text: str, source: str):
        for line_no, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if line == "":
                continue
            if "=" not in line:
                raise InputError(f"Expected 'key = value'. ({source}, line {line_no})")
            key, value = line.split("=", 1)
            self.set(key.strip(), value, f"{source}, line {line_no}")

    def update_file(self, path: str):
        if not os.path.isfile(path):
            raise InputError(f"Config file not found. ({path})")
        print("load: " + path)
        with open(path, encoding="utf-8") as f:
            self.update_text(f.read(), path)

    def update_overrides(self, overrides: list[str]):
        """Apply "key=value" strings."""
        for item in overrides:
            if "=" not in item:
                raise InputError(f"Expected key=value. ({item})")
            key, value = item.split("=", 1)
            self.set(key.strip(), value, "command line")

    def snapshot(self) -> dict:
        """JSON-ready copy of every setting."""
        snap = {}
        for key, value in self.values.items():
            if isinstance(value, tuple):
                value = list(value)
            elif isinstance(value, float) and not math.isfinite(value):
                value = repr(value)
            snap[key] = value
        return snap

    def print(self, padding: int = 2):
        pad = " " * padding
        for key, value in self.values.items():
            if self.sources[key] != "default":
                print(pad + f"{key}: {value} ({self.sources[key]})")


def load_config(path: str = None, overrides: list[str] = None, use_bundled: bool = True,
                environ=None) -> RunConfig:
    """Build a RunConfig from the bundled file, a user file, and overrides."""
    environ = os.environ if environ is None else environ
    config = RunConfig()
    if use_bundled and os.path.isfile(BUNDLED_CONFIG):
        with open(BUNDLED_CONFIG, encoding="utf-8") as f:
            config.update_text(f.read(), "config.cfg")
        for key in config.sources:
            config.sources[key] = "default"
    if path is None:
        path = environ.get(CONFIG_ENV) or None
    if path is not None:
        config.update_file(path)
    if overrides:
        config.update_overrides(overrides)
    return config
