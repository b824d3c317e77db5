"""Classes for transition-line catalogs.

Notes:
    Catalog file (CSV, UTF-8):
        lower_label,upper_label,frequency_hz,a_vib_per_s,s_rot,twice_j_lower,twice_j_upper,branch
    Lines starting with "#" are provenance comments. They are joined into source_note.
"""
import csv
from dataclasses import dataclass, field
from enum import Enum
import os

from errors import InputError

CATALOG_HEADER = ["lower_label", "upper_label", "frequency_hz", "a_vib_per_s",
                  "s_rot", "twice_j_lower", "twice_j_upper", "branch"]

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

BUNDLED_CATALOGS = {
    "n2plus": "n2plus_a2pi_x2sigma.csv",
    "ca_plus": "ca_plus.csv",
}


class Polarization(Enum):
    PI = "pi"


@dataclass(frozen=True)
class RoVibronicState:
    """A molecular (or atomic) level, optionally with a magnetic sublevel.

    Notes:
        twice_j and twice_m hold 2J and 2m.
        twice_m is None for level descriptors stored in catalogs.
        v and n are None when the catalog does not carry them.
    """
    label: str
    twice_j: int
    twice_m: int = None
    electronic_term: str = ""
    v: int = None
    n: int = None

    def __post_init__(self):
        if self.twice_j <= 0:
            raise InputError(f"J must be positive. ({self.label}, 2J={self.twice_j})")
        if self.v is not None and self.v < 0:
            raise InputError(f"v must not be negative. ({self.label}, v={self.v})")
        if self.n is not None:
            if self.n < 0:
                raise InputError(f"N must not be negative. ({self.label}, N={self.n})")
            if self.twice_j not in (2 * self.n - 1, 2 * self.n + 1):
                raise InputError(f"J must be N-1/2 or N+1/2. ({self.label}, N={self.n}, 2J={self.twice_j})")
        if self.twice_m is not None:
            if abs(self.twice_m) > self.twice_j:
                raise InputError(f"|m| exceeds J. ({self.label}, 2J={self.twice_j}, 2m={self.twice_m})")
            if (self.twice_j - self.twice_m) % 2 != 0:
                raise InputError(f"J and m must have the same parity. ({self.label})")

    def with_m(self, twice_m: int) -> "RoVibronicState":
        return RoVibronicState(self.label, self.twice_j, twice_m, self.electronic_term, self.v, self.n)

    def sublevels(self) -> list["RoVibronicState"]:
        return [self.with_m(m) for m in range(-self.twice_j, self.twice_j + 1, 2)]

    def same_level(self, other: "RoVibronicState") -> bool:
        return self.label == other.label and self.twice_j == other.twice_j

    def __str__(self):
        if self.twice_m is None:
            return self.label
        return f"{self.label}[m={self.twice_m}/2]"


@dataclass(frozen=True)
class TransitionLine:
    lower: RoVibronicState
    upper: RoVibronicState
    frequency: float  # Hz
    a_vib: float  # 1/s
    s_rot: float
    branch: str = ""

    def __post_init__(self):
        if abs(self.upper.twice_j - self.lower.twice_j) > 2:
            raise InputError(f"Not a dipole line. |J_upper - J_lower| > 1. ({self.branch})")
        if not self.frequency > 0:
            raise InputError(f"Line frequency must be positive. ({self.branch}, {self.frequency})")
        if self.a_vib < 0:
            raise InputError(f"A_vib must not be negative. ({self.branch}, {self.a_vib})")
        if not 0 <= self.s_rot <= 1:
            raise InputError(f"S_rot must be in [0, 1]. ({self.branch}, {self.s_rot})")

    def key(self):
        return (self.lower.label, self.lower.twice_j, self.upper.label, self.upper.twice_j, self.frequency)


@dataclass(frozen=True)
class LineCatalog:
    lines: tuple[TransitionLine, ...]
    name: str = ""
    source_note: str = ""

    def __post_init__(self):
        seen = set()
        for line in self.lines:
            if line.key() in seen:
                raise InputError(f"Duplicated line in catalog. ({self.name}, {line.branch})")
            seen.add(line.key())

    def lines_from(self, state: RoVibronicState) -> list[TransitionLine]:
        """Lines whose lower level is the given state."""
        return [line for line in self.lines if line.lower.same_level(state)]

    def find_line(self, branch: str, lower: RoVibronicState = None) -> TransitionLine:
        for line in self.lines:
            if line.branch == branch and (lower is None or line.lower.same_level(lower)):
                return line
        raise InputError(f"Line not found in catalog. ({self.name}, {branch})")

    def find_level(self, label: str) -> RoVibronicState:
        for line in self.lines:
            if line.lower.label == label:
                return line.lower
        raise InputError(f"Level not found in catalog. ({self.name}, {label})")

    def without(self, line: TransitionLine) -> "LineCatalog":
        return LineCatalog(tuple(li for li in self.lines if li is not line), self.name, self.source_note)

    def print(self):
        print(f"  catalog: {self.name}")
        print(f"  lines: {len(self.lines)}")
        for line in self.lines:
            print(f"    {line.branch}: {line.lower.label} -> {line.upper.label}"
                  f" ({line.frequency:.6e} Hz, A={line.a_vib:.4g} /s, S={line.s_rot})")


@dataclass(frozen=True)
class LaserField:
    intensity: float  # W/m^2
    frequency: float  # Hz
    polarization: Polarization = field(default=Polarization.PI)

    def __post_init__(self):
        if self.intensity < 0:
            raise InputError(f"Laser intensity must not be negative. ({self.intensity})")
        if not self.frequency > 0:
            raise InputError(f"Laser frequency must be positive. ({self.frequency})")
        if self.polarization not in (Polarization.PI, Polarization.PI.value):
            raise InputError(f"Only pi polarization is supported. ({self.polarization})")


def parse_int(value: str, name: str, file: str, line_no: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise InputError(f"Invalid {name}. ({file}, line {line_no}: {value!r})")


def parse_float(value: str, name: str, file: str, line_no: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise InputError(f"Invalid {name}. ({file}, line {line_no}: {value!r})")


def load_catalog(file: str, verbose=False) -> LineCatalog:
    """Read a catalog CSV."""
    if not os.path.isfile(file):
        raise InputError(f"Catalog not found. ({file})")
    print(f"load: {file}")
    notes = []
    lines = []
    header_seen = False
    with open(file, encoding="utf-8", newline="") as f:
        for line_no, row in enumerate(csv.reader(f), start=1):
            if len(row) == 0 or (len(row) == 1 and row[0].strip() == ""):
                continue
            if row[0].lstrip().startswith("#"):
                notes.append(",".join(row).lstrip()[1:].strip())
                continue
            row = [s.strip() for s in row]
            if not header_seen:
                if row != CATALOG_HEADER:
                    raise InputError(f"Unexpected catalog header. ({file}, line {line_no})")
                header_seen = True
                continue
            if len(row) != len(CATALOG_HEADER):
                raise InputError(f"Wrong number of columns. ({file}, line {line_no})")
            lower_label, upper_label, freq, a_vib, s_rot, tj_lower, tj_upper, branch = row
            try:
                lower = RoVibronicState(lower_label, parse_int(tj_lower, "twice_j_lower", file, line_no))
                upper = RoVibronicState(upper_label, parse_int(tj_upper, "twice_j_upper", file, line_no))
                lines.append(TransitionLine(
                    lower, upper,
                    parse_float(freq, "frequency_hz", file, line_no),
                    parse_float(a_vib, "a_vib_per_s", file, line_no),
                    parse_float(s_rot, "s_rot", file, line_no),
                    branch))
            except InputError as e:
                if f"line {line_no}" in str(e):
                    raise
                raise InputError(f"{e} ({file}, line {line_no})")
    if not header_seen:
        raise InputError(f"Catalog has no header. ({file})")
    name = os.path.splitext(os.path.basename(file))[0]
    catalog = LineCatalog(tuple(lines), name, "\n".join(notes))
    if verbose:
        catalog.print()
    return catalog


def bundled_catalog_path(name: str) -> str:
    if name not in BUNDLED_CATALOGS:
        raise InputError(f"Unknown bundled catalog. ({name})")
    return os.path.join(DATA_DIR, BUNDLED_CATALOGS[name])


def resolve_catalog_path(path: str) -> str:
    """Accept a bundled catalog name or a file path."""
    if path in BUNDLED_CATALOGS:
        return bundled_catalog_path(path)
    return path


def bundled_catalog(name: str, verbose=False) -> LineCatalog:
    return load_catalog(bundled_catalog_path(name), verbose=verbose)


def catalog_levels(catalog: LineCatalog) -> list[RoVibronicState]:
    """Distinct lower levels of a catalog in file order."""
    levels = []
    for line in catalog.lines:
        if not any(line.lower.same_level(lv) for lv in levels):
            levels.append(line.lower)
    return levels
