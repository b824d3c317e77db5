import json
import os

import numpy as np

from specfit.points import StarkDataPoint

# line center of the bundled N2+ R11(1/2) line
N2_LINE_HZ = 380701100000000.0


class Args:
    """Stand-in for the argparse namespace of main.get_args()."""
    def __init__(self, json_args={}):
        self.mode = "discriminate"
        self.config = None
        self.seed = None
        self.out = "test_out"
        self.set = []
        # spectrum
        self.start = None
        self.stop = None
        self.step = 0.5e9
        self.ca_reference = False
        # rabi
        self.alpha = None
        self.stark_shift = None
        self.t_start = 0.0
        self.t_stop = 100e-6
        self.t_step = 0.5e-6
        self.background = False
        # timetrace
        self.attempts = 268
        self.jump_probability = 0.0
        self.jump_after = None
        self.source = "analytic"
        self.initial = "bright"
        # fit and budget
        self.kind = "rabi"
        self.input = None
        self.calibration = None
        self.detuning = None

        if json_args != {}:
            self.init_with_json(json_args)

    def init_with_json(self, j):
        keys = vars(self).keys()
        for k in keys:
            if k in j:
                setattr(self, k, j[k])


def read_json(json_path):
    if not os.path.exists(json_path):
        return {}
    with open(json_path, encoding='utf-8') as f:
        return json.load(f)


def read_test_cases(json_name):
    json_path = os.path.join(os.path.dirname(__file__), json_name)
    return read_json(json_path)


test_cases = read_test_cases("test_cases.json")
local_test_cases = read_test_cases("local_test_cases.json")


def get_test_cases(key):
    cases = []
    if key in test_cases:
        cases += test_cases[key]
    if key in local_test_cases:
        cases += local_test_cases[key]
    return cases


def read_csv_body(path):
    """File text without the header line."""
    with open(path, encoding="utf-8") as f:
        return f.read().split("\n", 1)[1]


def lattice_detunings(n_points=20):
    """Lattice detunings (Hz) from -4 GHz to -100 GHz."""
    return -np.geomspace(4e9, 100e9, n_points)


def synthetic_line_points(detunings, amplitude=2e6, noise=0.0, rng=None):
    """Stark points on a pure 1/detuning profile around N2_LINE_HZ."""
    points = []
    for detuning in detunings:
        y = amplitude / abs(detuning)
        if rng is not None:
            y *= 1 + noise * rng.standard_normal()
        points.append(StarkDataPoint(N2_LINE_HZ + detuning, 2e6, y, 0.01 * amplitude / abs(detuning)))
    return points
