"""Readers and writers for the CSV and JSON files of the tools.

Notes:
    Floats are written with repr() so that files parse back bit-exact.
    Masked values are written as empty fields.
"""
import csv
import json
import math
import os

import numpy as np

from errors import InputError
from inference.discrimination import Classification
from inference.timetrace import DetectionRecord, HistogramBin
from motion.fock import FockDistribution
from motion.sideband import SidebandParams
from specfit.points import StarkDataPoint
from specfit.rabi_fit import RabiTrace
from stark.shift import SpectrumRow
from util import mkdir

SPECTRUM_HEADER = ["frequency_hz", "bright_shift_hz", "other_shift_hz"]
RABI_HEADER = ["t_s", "p_excite"]
DISTRIBUTION_HEADER = ["n", "probability"]
TIMETRACE_HEADER = ["attempt", "k", "n_used", "p_hat", "classification", "true_state"]
HISTOGRAM_HEADER = ["bin_low", "bin_high", "count_bright", "count_dark"]
STARK_POINTS_HEADER = ["frequency_hz", "intensity_w_m2", "stark_over_intensity", "sigma"]
CA_REFERENCE_HEADER = ["state", "shift_hz"]
MANIFEST_HEADER = ["stark_shift_hz", "trace_path"]

DEFAULT_N_SHOTS = 100


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, Classification):
        return value.value
    return str(value)


def write_table(path: str, header: list[str], rows, verbose=True):
    folder = os.path.dirname(path)
    if folder:
        mkdir(folder)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    if verbose:
        print(f"save: {path}")


def read_table(path: str, required: list[str], optional: list[str] = ()) -> list[tuple[int, dict]]:
    """Rows as (line number, {column: text}). Header must start with the required columns."""
    if not os.path.isfile(path):
        raise InputError(f"File not found. ({path})")
    print(f"load: {path}")
    rows = []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = None
        for line_no, row in enumerate(reader, start=1):
            if len(row) == 0 or (len(row) == 1 and row[0].strip() == ""):
                continue
            if row[0].lstrip().startswith("#"):
                continue
            row = [s.strip() for s in row]
            if header is None:
                expected = list(required)
                if row[:len(expected)] != expected or any(c not in optional for c in row[len(expected):]):
                    raise InputError(
                        f"Unexpected header. ({path}, line {line_no}, expected: {','.join(expected)})")
                header = row
                continue
            if len(row) != len(header):
                raise InputError(f"Wrong number of columns. ({path}, line {line_no})")
            rows.append((line_no, dict(zip(header, row))))
    if header is None:
        raise InputError(f"File has no header. ({path})")
    return rows


def parse_field(row: tuple[int, dict], key: str, path: str, parser=float, allow_empty=False):
    line_no, values = row
    text = values.get(key, "")
    if text == "":
        if allow_empty:
            return None
        raise InputError(f"Missing value for {key}. ({path}, line {line_no})")
    try:
        value = parser(text)
    except ValueError:
        raise InputError(f"Invalid value for {key}. ({path}, line {line_no}: {text!r})")
    if isinstance(value, float) and math.isnan(value):
        raise InputError(f"NaN is not allowed for {key}. ({path}, line {line_no})")
    return value


def write_spectrum(path: str, rows: list[SpectrumRow]):
    write_table(path, SPECTRUM_HEADER, [(r.frequency, r.bright_shift, r.other_shift) for r in rows])


def read_spectrum(path: str) -> list[SpectrumRow]:
    table = read_table(path, SPECTRUM_HEADER)
    return [SpectrumRow(parse_field(row, "frequency_hz", path),
                        parse_field(row, "bright_shift_hz", path, allow_empty=True),
                        parse_field(row, "other_shift_hz", path, allow_empty=True))
            for row in table]


def write_ca_reference(path: str, shifts: list[tuple[str, float]]):
    write_table(path, CA_REFERENCE_HEADER, shifts)


def write_rabi_curve(path: str, t, columns: dict):
    """t_s,p_excite plus optional extra columns (e.g. p_background, p_dark)."""
    header = ["t_s"] + list(columns)
    data = [np.asarray(t, dtype=float)] + [np.asarray(v, dtype=float) for v in columns.values()]
    write_table(path, header, zip(*data))


def write_rabi_trace(path: str, trace: RabiTrace):
    write_table(path, RABI_HEADER + ["n_shots"],
                [(t, p, int(n)) for t, p, n in zip(trace.t, trace.p_excite, trace.n_shots)])


def read_rabi_trace(path: str, params: SidebandParams = None, odf_pulse_time: float = None,
                    default_n_shots: int = DEFAULT_N_SHOTS) -> RabiTrace:
    """Read t_s,p_excite[,n_shots]. Traces without n_shots use default_n_shots."""
    table = read_table(path, RABI_HEADER, optional=["n_shots", "p_background", "p_dark"])
    if len(table) == 0:
        raise InputError(f"Rabi trace is empty. ({path})")
    t = [parse_field(row, "t_s", path) for row in table]
    p = [parse_field(row, "p_excite", path) for row in table]
    n_shots = []
    for row in table:
        n = parse_field(row, "n_shots", path, int, allow_empty=True)
        n_shots.append(default_n_shots if n is None else n)
    kwargs = {}
    if params is not None:
        kwargs["params"] = params
    if odf_pulse_time is not None:
        kwargs["odf_pulse_time"] = odf_pulse_time
    try:
        return RabiTrace(np.array(t), np.array(p), np.array(n_shots), **kwargs)
    except InputError as e:
        raise InputError(f"{e} ({path})")


def write_distribution(path: str, dist: FockDistribution):
    write_table(path, DISTRIBUTION_HEADER, zip(dist.n, dist.probabilities))


def write_timetrace(path: str, records: list[DetectionRecord]):
    write_table(path, TIMETRACE_HEADER, [
        (r.attempt_index, r.k_successes, r.n_used, r.p_hat, r.classification, r.true_state)
        for r in records])


def parse_classification(text: str) -> Classification:
    try:
        return Classification(text)
    except ValueError:
        raise ValueError(text)


def read_timetrace(path: str) -> list[DetectionRecord]:
    table = read_table(path, TIMETRACE_HEADER)
    return [DetectionRecord(
        parse_field(row, "attempt", path, int), parse_field(row, "k", path, int),
        parse_field(row, "n_used", path, int), parse_field(row, "p_hat", path),
        parse_field(row, "classification", path, parse_classification),
        parse_field(row, "true_state", path, parse_classification)) for row in table]


def write_histogram(path: str, bins: list[HistogramBin]):
    write_table(path, HISTOGRAM_HEADER, [(b.low, b.high, b.count_bright, b.count_dark) for b in bins])


def write_stark_points(path: str, points: list[StarkDataPoint]):
    write_table(path, STARK_POINTS_HEADER + ["mass_corrected"], [
        (p.frequency, p.intensity, p.stark_over_intensity, p.sigma, p.mass_corrected) for p in points])


def parse_flag(text: str) -> bool:
    if text not in ["0", "1"]:
        raise ValueError(text)
    return text == "1"


def read_stark_points(path: str) -> list[StarkDataPoint]:
    """Read frequency_hz,intensity_w_m2,stark_over_intensity,sigma[,mass_corrected]."""
    table = read_table(path, STARK_POINTS_HEADER, optional=["mass_corrected"])
    points = []
    for row in table:
        try:
            points.append(StarkDataPoint(
                parse_field(row, "frequency_hz", path),
                parse_field(row, "intensity_w_m2", path),
                parse_field(row, "stark_over_intensity", path),
                parse_field(row, "sigma", path),
                mass_corrected=bool(parse_field(row, "mass_corrected", path, parse_flag, allow_empty=True))))
        except InputError as e:
            if f"line {row[0]}" in str(e):
                raise
            raise InputError(f"{e} ({path}, line {row[0]})")
    return points


def read_manifest(path: str) -> list[tuple[float, str]]:
    """Calibration manifest. Trace paths are relative to the manifest folder."""
    table = read_table(path, MANIFEST_HEADER)
    folder = os.path.dirname(path)
    return [(parse_field(row, "stark_shift_hz", path), os.path.join(folder, parse_field(row, "trace_path", path, str)))
            for row in table]


def json_ready(value):
    """Replace values JSON can not hold (inf, nan, numpy types)."""
    if isinstance(value, dict):
        return {str(k): json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_ready(v) for v in value]
    if isinstance(value, np.ndarray):
        return json_ready(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else repr(value)
    return value


def write_json(path: str, data: dict, verbose=True):
    folder = os.path.dirname(path)
    if folder:
        mkdir(folder)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(json_ready(data), f, indent=4, ensure_ascii=False)
        f.write("\n")
    if verbose:
        print(f"save: {path}")


def read_json(path: str) -> dict:
    if not os.path.isfile(path):
        raise InputError(f"File not found. ({path})")
    print(f"load: {path}")
    with open(path, encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise InputError(f"Invalid JSON. ({path}, line {e.lineno})")
