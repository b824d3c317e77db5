"""Main file for QND-Force-Tools."""
# std libs
import argparse
import json
import math
import os
import sys
import time

# third party
import numpy as np
from scipy import constants

# my scripts
from util import check_python_version, file_digest, mkdir, text_digest
from config import load_config, RunConfig
from errors import ConvergenceError, InputError
import csv_io
from stark.catalog import (LaserField, catalog_levels, load_catalog,
                           resolve_catalog_path, RoVibronicState)
from stark.shift import ac_stark_shift, hyperfine_validity, scattering_budget, stark_spectrum
from motion.fock import fock_distribution_coherent, fock_distribution_thermal
from motion.sideband import SidebandParams, max_contrast_time, sideband_signal, window_average_signal
from motion.odf import OdfConfig, calibrate_coupling, odf_displacement
from inference.discrimination import (Classification, QndModel, brute_force_threshold,
                                      fidelity_report, min_repetitions)
from inference.bayes import bayes_fidelity
from inference.timetrace import (AnalyticSource, MotionSource, TimeTraceConfig, histogram,
                                 simulate_timetrace, summarize)
from specfit.rabi_fit import fit_rabi_trace
from specfit.calibration import CalibrationModel, build_calibration, stark_from_trace
from specfit.line_fit import fit_line_center
from specfit.avib import extract_avib_batch
from specfit.points import mass_corrected_wavelength

TOOL_VERSION = "0.1.0"

FIT_KINDS = ["rabi", "stark", "line", "avib", "calibrate"]
SOURCES = ["analytic", "motion"]
INITIAL_STATES = [s.value for s in Classification]

# default spectrum window around the target line
SPECTRUM_HALF_WIDTH_HZ = 50e9
SPECTRUM_STEP_HZ = 0.5e9


def get_args(argv=None):
    parser = argparse.ArgumentParser(prog="qnd-force-tools")
    parser.add_argument("--config", default=None, type=str,
                        help="config file. (default: $QND_TOOLS_CONFIG or none)")
    parser.add_argument("--seed", default=None, type=int, help="random seed. it will overwrite the config.")
    parser.add_argument("--out", default="output", type=str, help="output folder")
    parser.add_argument("--set", default=[], action="append", metavar="KEY=VALUE",
                        help="overwrite a config value. can be used multiple times.")
    sub = parser.add_subparsers(dest="mode", required=True)

    spectrum_parser = sub.add_parser("spectrum", help="ac-Stark spectrum on a laser-frequency grid")
    spectrum_parser.add_argument("--start", default=None, type=float, help="first laser frequency (Hz)")
    spectrum_parser.add_argument("--stop", default=None, type=float, help="last laser frequency (Hz)")
    spectrum_parser.add_argument("--step", default=SPECTRUM_STEP_HZ, type=float, help="grid step (Hz)")
    spectrum_parser.add_argument("--ca-reference", dest="ca_reference", action="store_true",
                                 help="write Ca+ reference shifts at the operating point")

    rabi_parser = sub.add_parser("rabi", help="sideband Rabi curve")
    group = rabi_parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--alpha", default=None, type=float, help="coherent amplitude |alpha|")
    group.add_argument("--stark-shift", dest="stark_shift", default=None, type=float,
                       help="molecular ac-Stark shift (Hz)")
    rabi_parser.add_argument("--t-start", dest="t_start", default=0.0, type=float, help="first pulse time (s)")
    rabi_parser.add_argument("--t-stop", dest="t_stop", default=100e-6, type=float, help="last pulse time (s)")
    rabi_parser.add_argument("--t-step", dest="t_step", default=0.5e-6, type=float, help="pulse-time step (s)")
    rabi_parser.add_argument("--background", action="store_true",
                             help="add the thermal background and dark-state curves")

    sub.add_parser("discriminate", help="threshold, error rates, and fidelities")

    trace_parser = sub.add_parser("timetrace", help="Monte Carlo trace of state detections")
    trace_parser.add_argument("--attempts", default=268, type=int, help="number of detection attempts")
    trace_parser.add_argument("--jump-probability", dest="jump_probability", default=0.0, type=float,
                              help="bright -> dark probability per attempt")
    trace_parser.add_argument("--jump-after", dest="jump_after", default=None, type=int,
                              help="force a jump after this many bright attempts")
    trace_parser.add_argument("--source", default="analytic", choices=SOURCES,
                              help="single-shot probabilities from p_alpha/p_beta or from the sideband model")
    trace_parser.add_argument("--initial", default="bright", choices=INITIAL_STATES, help="initial state")

    fit_parser = sub.add_parser("fit", help="fit spectroscopy data")
    fit_parser.add_argument("kind", choices=FIT_KINDS, help="rabi, stark, line, avib, or calibrate")
    fit_parser.add_argument("input", type=str, help="input CSV (a manifest for calibrate)")
    fit_parser.add_argument("--calibration", default=None, type=str, help="calibration JSON for fit stark")

    budget_parser = sub.add_parser("budget", help="off-resonant scattering budget")
    budget_parser.add_argument("--detuning", default=None, type=float, help="detuning (Hz). default: config")
    budget_parser.add_argument("--stark-shift", dest="stark_shift", default=None, type=float,
                               help="ac-Stark shift (Hz). default: operating point")
    return parser.parse_args(argv)


class OperatingPoint:
    """Catalog, probe state, target line, and laser of the configured operating point."""

    def __init__(self, config: RunConfig):
        self.catalog = load_catalog(resolve_catalog_path(config["catalog_path"]))
        level = self.catalog.find_level(config["bright_state"])
        self.state = level.with_m(config["bright_twice_m"])
        lines = self.catalog.lines_from(level)
        self.target = lines[0]
        self.laser = LaserField(config["intensity_w_m2"], self.target.frequency + config["detuning_hz"])
        self.pole_guard = config["pole_guard_hz"]
        check = hyperfine_validity(config["detuning_hz"], config["hfs_spacing_hz"])
        if not check.valid:
            print(f"Warning: Operating point is {check.message}")

    def stark_shift(self) -> float:
        return ac_stark_shift(self.state, self.laser, self.catalog, self.pole_guard)

    def other_states(self) -> list[RoVibronicState]:
        return [s for lv in catalog_levels(self.catalog) if not lv.same_level(self.state) for s in lv.sublevels()]


def sideband_params(config: RunConfig) -> SidebandParams:
    return SidebandParams(config["eta"], config["omega0_hz"], config["delta_hz"], config["t2_s"],
                          config["mode_frequency_hz"])


def qnd_model(config: RunConfig) -> QndModel:
    return QndModel(config["p_alpha"], config["p_beta"], config["n_rep"], None, config["threshold_p"])


def coupling_constant(config: RunConfig, op: OperatingPoint) -> float:
    return calibrate_coupling(op.stark_shift(), sideband_params(config), config["t_odf_s"],
                              config["mass_correction"], config["anchor_signal"], config["t729_s"],
                              config["n_max"], config["rabi_model"])


def displacement(config: RunConfig, kappa: float, stark_shift: float) -> float:
    odf = OdfConfig(stark_shift, config["t_odf_s"], kappa, config["mass_correction"])
    return odf_displacement(odf, config["eta"])


def out_path(args, name: str) -> str:
    return os.path.join(args.out, name)


def grid(start: float, stop: float, step: float) -> np.ndarray:
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def spectrum(args, config):
    """Spectrum mode (ac-Stark shift vs laser frequency)"""
    op = OperatingPoint(config)
    start = op.target.frequency - SPECTRUM_HALF_WIDTH_HZ if args.start is None else args.start
    stop = op.target.frequency + SPECTRUM_HALF_WIDTH_HZ if args.stop is None else args.stop
    if not args.step > 0 or stop < start:
        raise InputError(f"Invalid frequency range. ({start}, {stop}, {args.step})")
    rows = stark_spectrum(op.state, op.other_states(), config["intensity_w_m2"], grid(start, stop, args.step),
                          op.catalog, op.pole_guard, config["max_workers"])
    path = out_path(args, "spectrum.csv")
    csv_io.write_spectrum(path, rows)
    outputs = {
        "spectrum_csv": path,
        "rows": len(rows),
        "masked_rows": sum(r.bright_shift is None or r.other_shift is None for r in rows),
        "target_line": op.target.branch,
        "operating_shift_hz": op.stark_shift(),
    }

    if args.ca_reference:
        ca = load_catalog(resolve_catalog_path(config["ca_catalog_path"]))
        laser = LaserField(config["intensity_w_m2"], op.laser.frequency)
        shifts = [(str(s), ac_stark_shift(s, laser, ca, op.pole_guard))
                  for lv in catalog_levels(ca) for s in lv.sublevels()]
        ref_path = out_path(args, "ca_reference.csv")
        csv_io.write_ca_reference(ref_path, shifts)
        outputs["ca_reference_csv"] = ref_path
    return outputs


def rabi(args, config):
    """Rabi mode (sideband signal vs pulse time)"""
    if args.t_step <= 0 or args.t_stop < args.t_start or args.t_start < 0:
        raise InputError(f"Invalid pulse-time range. ({args.t_start}, {args.t_stop}, {args.t_step})")
    params = sideband_params(config)
    model = config["rabi_model"]
    outputs = {}
    op = None
    if args.alpha is not None:
        alpha = args.alpha
        if alpha < 0:
            raise InputError(f"|alpha| must not be negative. ({alpha})")
    else:
        op = OperatingPoint(config)
        kappa = coupling_constant(config, op)
        alpha = displacement(config, kappa, args.stark_shift)
        outputs["coupling_constant"] = kappa
    outputs["alpha"] = alpha

    t = grid(args.t_start, args.t_stop, args.t_step)
    bright = fock_distribution_coherent(alpha, config["n_max"])
    columns = {"p_excite": np.atleast_1d(sideband_signal(bright, t, params, model))}
    if args.background:
        if op is None:
            op = OperatingPoint(config)
            kappa = coupling_constant(config, op)
        background = fock_distribution_thermal(config["nbar_background"], config["n_max"])
        other = [abs(ac_stark_shift(s, op.laser, op.catalog, op.pole_guard)) for s in op.other_states()]
        dark = fock_distribution_coherent(displacement(config, kappa, max(other, default=0.0)), config["n_max"])
        columns["p_background"] = np.atleast_1d(sideband_signal(background, t, params, model))
        columns["p_dark"] = np.atleast_1d(sideband_signal(dark, t, params, model))
        t_best, contrast = max_contrast_time(bright, background, params, t, model)
        outputs["max_contrast_time_s"] = t_best
        outputs["max_contrast"] = contrast

    path = out_path(args, "rabi.csv")
    csv_io.write_rabi_curve(path, t, columns)
    dist_path = out_path(args, "distribution.csv")
    csv_io.write_distribution(dist_path, bright)
    outputs.update({"rabi_csv": path, "distribution_csv": dist_path, "mean_n": bright.mean()})
    return outputs


def discriminate(args, config):
    """Discriminate mode (threshold and fidelity of the binomial test)"""
    model = qnd_model(config)
    model.print()
    report = fidelity_report(model)
    targets = {t: min_repetitions(model.p_alpha, model.p_beta, t) for t in config["fidelity_targets"]}
    data = report.to_dict()
    data["min_repetitions"] = {repr(t): n for t, n in targets.items()}
    data["k_t_brute_force"] = brute_force_threshold(model.p_alpha, model.p_beta, model.n_rep)
    print(f"  E_d: {report.error_dark:.4e}, E_b: {report.error_bright:.4e}")
    print(f"  fidelity: {report.fidelity_overall:.5f}")
    path = out_path(args, "discriminate.json")
    csv_io.write_json(path, data)
    return {"report_json": path, **data}


def timetrace(args, config):
    """Timetrace mode (Monte Carlo detection attempts)"""
    model = qnd_model(config)
    trace_config = TimeTraceConfig(args.attempts, args.jump_probability, config["prep_success"],
                                   config["seed"], Classification(args.initial), args.jump_after)
    if args.source == "analytic":
        source = AnalyticSource.from_model(model)
    else:
        op = OperatingPoint(config)
        kappa = coupling_constant(config, op)
        bright = fock_distribution_coherent(displacement(config, kappa, op.stark_shift()), config["n_max"])
        dark = fock_distribution_thermal(config["nbar_background"], config["n_max"])
        t_start, t_stop = config["t729_window_s"]
        source = MotionSource(bright, dark, sideband_params(config), t_start, t_stop, config["rabi_model"])
        print(f"  bright window signal: "
              f"{window_average_signal(bright, t_start, t_stop, model.n_rep, source.params, source.model):.4f}")
    print(f"  source: {source}")

    records = simulate_timetrace(model, source, trace_config, config["max_workers"])
    path = out_path(args, "timetrace.csv")
    csv_io.write_timetrace(path, records)
    hist_path = out_path(args, "histogram.csv")
    csv_io.write_histogram(hist_path, histogram(records, config["histogram_bins"]))

    summary = summarize(records)
    outputs = {"timetrace_csv": path, "histogram_csv": hist_path, **summary.to_dict()}
    if summary.n_bright > 0:
        outputs["bayes_bright"] = bayes_fidelity(summary.n_bright - summary.misclassified_bright,
                                                 summary.misclassified_bright)
    if summary.n_dark > 0:
        outputs["bayes_dark"] = bayes_fidelity(summary.n_dark - summary.misclassified_dark,
                                               summary.misclassified_dark)
    return outputs


def fit_rabi(args, config):
    trace = csv_io.read_rabi_trace(args.input, sideband_params(config), config["t_odf_s"])
    result = fit_rabi_trace(trace, config["rabi_model"], config["n_max"])
    result.print()
    return result.to_dict()


def fit_calibrate(args, config):
    manifest = csv_io.read_manifest(args.input)
    points = []
    for shift, trace_path in manifest:
        trace = csv_io.read_rabi_trace(trace_path, sideband_params(config), config["t_odf_s"])
        points.append((shift, fit_rabi_trace(trace, config["rabi_model"], config["n_max"])))
    calib = build_calibration(points)
    calib.print()
    path = out_path(args, "calibration.json")
    csv_io.write_json(path, calib.to_dict())
    return {"calibration_json": path,
            "fits": [{"stark_shift_hz": s, **r.to_dict()} for s, r in points]}


def fit_stark(args, config):
    calib = CalibrationModel.from_dict(csv_io.read_json(args.calibration))
    trace = csv_io.read_rabi_trace(args.input, sideband_params(config), config["t_odf_s"])
    result = stark_from_trace(trace, calib, config["rabi_model"], config["n_max"])
    return result.to_dict()


def fit_line(args, config):
    points = csv_io.read_stark_points(args.input)
    result = fit_line_center(points, config["pole_guard_hz"], config["wavemeter_sigma_hz"])
    result.print()
    return result.to_dict()


def fit_avib(args, config):
    op = OperatingPoint(config)
    points = csv_io.read_stark_points(args.input)
    result = extract_avib_batch(points, op.target, op.state, op.catalog, config["mass_correction"],
                                config["pole_guard_hz"], config["hfs_spacing_hz"])
    result.print()
    outputs = result.to_dict()
    wavelength = constants.c / op.target.frequency
    outputs["scaled_wavelength_m"] = mass_corrected_wavelength(
        wavelength, config["mass_atom_amu"], config["mass_molecule_amu"])
    return outputs


FIT_FUNCTIONS = {
    "rabi": fit_rabi,
    "calibrate": fit_calibrate,
    "stark": fit_stark,
    "line": fit_line,
    "avib": fit_avib,
}


def fit(args, config):
    """Fit mode (spectroscopy fits)"""
    outputs = FIT_FUNCTIONS[args.kind](args, config)
    path = out_path(args, f"fit_{args.kind}.json")
    csv_io.write_json(path, outputs)
    return {"report_json": path, **outputs}


def budget(args, config):
    """Budget mode (expected QND cycles before scattering)"""
    detuning = config["detuning_hz"] if args.detuning is None else args.detuning
    if args.stark_shift is None:
        shift = abs(OperatingPoint(config).stark_shift())
    else:
        shift = args.stark_shift
    result = scattering_budget(detuning, shift)
    check = hyperfine_validity(detuning, config["hfs_spacing_hz"])
    if not check.valid:
        print(f"Warning: {check.message}")
    outputs = {"detuning_hz": detuning, "stark_shift_hz": shift, "cycles": result.cycles,
               "bsb_pulses": result.bsb_pulses, "hyperfine_valid": check.valid,
               "hyperfine_message": check.message}
    path = out_path(args, "budget.json")
    csv_io.write_json(path, outputs)
    return {"report_json": path, **outputs}


MODE_FUNCTIONS = {
    "spectrum": spectrum,
    "rabi": rabi,
    "discriminate": discriminate,
    "timetrace": timetrace,
    "fit": fit,
    "budget": budget,
}


def fix_args(args, config):
    if args.seed is not None:
        config.set("seed", str(args.seed), "--seed")
    if config["max_workers"] is not None and config["max_workers"] <= 0:
        config.set("max_workers", None, "fix_args")
    if args.mode == "fit" and args.kind == "stark" and args.calibration is None:
        raise InputError("Specify a calibration file with --calibration.")


def command_name(args) -> str:
    return f"fit_{args.kind}" if args.mode == "fit" else args.mode


def print_args(args, config):
    print("-" * 16)
    print(f"Mode: {command_name(args)}")
    if args.mode == "fit":
        print(f"Input: {args.input}")
    print(f"Save folder: {args.out}")
    print(f"Seed: {config['seed']}")
    print(f"Max workers: {config['max_workers']}")
    config.print()
    print("-" * 16, flush=True)


def check_args(args):
    if os.path.isfile(args.out):
        raise InputError(f"Output path is not a folder. ({args.out})")
    for name in ["input", "calibration"]:
        path = getattr(args, name, None)
        if path is not None and not os.path.isfile(path):
            raise InputError(f"Path not found. ({path})")


def input_digest(args, config) -> str:
    texts = [json.dumps(config.snapshot(), sort_keys=True)]
    texts.append(json.dumps({k: v for k, v in sorted(vars(args).items()) if k not in ["out", "config"]},
                            sort_keys=True, default=str))
    for name in ["input", "calibration"]:
        path = getattr(args, name, None)
        if path is not None:
            texts.append(file_digest(path))
    return text_digest(*texts)


def main(args, config: RunConfig = None):
    if config is None:
        config = RunConfig()
    fix_args(args, config)
    print_args(args, config)
    check_args(args)
    mkdir(args.out)

    outputs = MODE_FUNCTIONS[args.mode](args, config)
    name = command_name(args)
    envelope = {
        "command": name,
        "input_digest": input_digest(args, config),
        "config": config.snapshot(),
        "outputs": outputs,
        "version": TOOL_VERSION,
    }
    csv_io.write_json(out_path(args, f"{name}.envelope.json"), envelope)
    return envelope


def run(argv=None) -> int:
    """Command-line entry. Returns the exit code (0: success, 2: input error, 3: no convergence)."""
    start_time = time.time()
    print(f"QND-Force-Tools ver{TOOL_VERSION}")
    try:
        args = get_args(argv)
    except SystemExit as e:
        # argparse exits with 2 on usage errors and 0 on --help
        return 0 if e.code in (0, None) else 2
    try:
        config = load_config(args.config, args.set)
        main(args, config)
    except ConvergenceError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 3
    except InputError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2
    print(f"Success! Run time (s): {(time.time() - start_time)}")
    return 0


if __name__ == "__main__":  # pragma: no cover
    # ensure that the python version is 3.10 or later
    check_python_version(3, 10)
    sys.exit(run())
