"""Tests for the stark package (wigner.py, catalog.py, shift.py)"""
import math

import numpy as np
import pytest
from scipy import constants
from sympy import Rational, pi, simplify
from sympy.physics.wigner import wigner_3j

from errors import InputError, PoleError
from stark.catalog import (LaserField, LineCatalog, bundled_catalog, catalog_levels, load_catalog,
                           RoVibronicState, TransitionLine)
from stark.shift import (ac_stark_shift, hyperfine_validity, line_kernel, scattering_budget,
                         stark_spectrum)
from stark.wigner import wigner3j, wigner3j_squared

N2_LINE_HZ = 380701100000000.0
OPERATING_DETUNING_HZ = -17e9
OPERATING_INTENSITY = 2e6

test_cases = {
    # twice (j1, j2, j3, m1, m2, m3), value
    "3j_values": [
        ((2, 2, 0, 0, 0, 0), -1 / math.sqrt(3)),
        ((1, 1, 0, 1, -1, 0), 1 / math.sqrt(2)),
        ((2, 2, 2, 0, 0, 0), 0.0),
        ((2, 2, 2, 2, -2, 0), 1 / math.sqrt(6)),
        ((1, 1, 2, 1, 1, -2), -1 / math.sqrt(3)),
    ],
    "3j_zero": [
        (2, 2, 2, 2, 2, 0),  # m sum is not zero
        (2, 2, 6, 0, 0, 0),  # triangle fails
        (2, 2, 2, 0, 0, 0),  # odd j1 + j2 + j3 with all m = 0
    ],
    "3j_error": [
        ((2, 2, 2, 4, 0, -4), "|m| exceeds j. (2j=2, 2m=4)"),
        ((2, 2, 2, 1, 0, -1), "j and m must have the same parity. (2j=2, 2m=1)"),
        ((-2, 2, 2, 0, 0, 0), "j must not be negative. (2j=-2)"),
    ],
    # (|detuning|, stark shift, cycles)
    "budget": [
        (10e9, 10e3, 1000.0),
        (100e6, 10e3, 10.0),
        (-10e9, 5e3, 2000.0),
    ],
    # (detuning, valid)
    "hyperfine": [
        (-17e9, True),
        (-3.1e9, True),
        (-2.9e9, False),
        (1e9, False),
    ],
}


def random_3j_arguments(rng, count, max_twice_j=8):
    args = []
    while len(args) < count:
        tj1, tj2 = (int(v) for v in rng.integers(0, max_twice_j + 1, 2))
        candidates = [tj3 for tj3 in range(abs(tj1 - tj2), tj1 + tj2 + 1, 2)]
        tj3 = int(rng.choice(candidates))
        tm1 = int(rng.choice(np.arange(-tj1, tj1 + 1, 2)))
        tm2 = int(rng.choice(np.arange(-tj2, tj2 + 1, 2)))
        tm3 = -tm1 - tm2
        if abs(tm3) > tj3:
            continue
        args.append((tj1, tj2, tj3, tm1, tm2, tm3))
    return args


def sympy_3j(args):
    return wigner_3j(*(Rational(a, 2) for a in args))


@pytest.mark.parametrize("args, value", test_cases["3j_values"])
def test_wigner3j_values(args, value):
    assert wigner3j(*args) == pytest.approx(value, abs=1e-15)


@pytest.mark.parametrize("args", test_cases["3j_zero"])
def test_wigner3j_selection_rules(args):
    assert wigner3j(*args) == 0.0
    assert wigner3j_squared(*args) == 0


@pytest.mark.parametrize("args, error", test_cases["3j_error"])
def test_wigner3j_invalid(args, error):
    with pytest.raises(InputError) as e:
        wigner3j(*args)
    assert str(e.value) == error


def test_wigner3j_against_sympy():
    """1000 random valid arguments against the exact-rational oracle."""
    rng = np.random.default_rng(1)
    for args in random_3j_arguments(rng, 1000):
        expected = sympy_3j(args)
        assert wigner3j(*args) == pytest.approx(float(expected), abs=1e-12), args
        squared = wigner3j_squared(*args)
        assert Rational(squared.numerator, squared.denominator) == simplify(expected ** 2), args


@pytest.mark.parametrize("tj1, tj2", [(1, 2), (2, 2), (3, 2), (4, 3), (5, 5)])
def test_wigner3j_orthogonality(tj1, tj2):
    """sum_{m1,m2} (2 j3 + 1) 3j(j3, m3) 3j(j3', m3') = delta(j3, j3') delta(m3, m3')"""
    tj3_values = list(range(abs(tj1 - tj2), tj1 + tj2 + 1, 2))
    for tj3 in tj3_values:
        for tj3p in tj3_values:
            for tm3 in range(-min(tj3, tj3p), min(tj3, tj3p) + 1, 2):
                total = 0.0
                for tm1 in range(-tj1, tj1 + 1, 2):
                    tm2 = -tm1 - tm3
                    if abs(tm2) > tj2:
                        continue
                    total += wigner3j(tj1, tj2, tj3, tm1, tm2, tm3) * wigner3j(tj1, tj2, tj3p, tm1, tm2, tm3)
                expected = 1.0 / (tj3 + 1) if tj3 == tj3p else 0.0
                assert total == pytest.approx(expected, abs=1e-12)


def test_wigner3j_symmetry():
    rng = np.random.default_rng(2)
    for args in random_3j_arguments(rng, 200):
        tj1, tj2, tj3, tm1, tm2, tm3 = args
        value = wigner3j(*args)
        # even (cyclic) permutation
        assert wigner3j(tj2, tj3, tj1, tm2, tm3, tm1) == pytest.approx(value, abs=1e-14)
        phase = -1 if ((tj1 + tj2 + tj3) // 2) % 2 else 1
        # odd permutation and m sign flip
        assert wigner3j(tj2, tj1, tj3, tm2, tm1, tm3) == pytest.approx(phase * value, abs=1e-14)
        assert wigner3j(tj1, tj2, tj3, -tm1, -tm2, -tm3) == pytest.approx(phase * value, abs=1e-14)


def operating_laser(intensity=OPERATING_INTENSITY, detuning=OPERATING_DETUNING_HZ):
    return LaserField(intensity, N2_LINE_HZ + detuning)


def n2_state(twice_m=1):
    catalog = bundled_catalog("n2plus")
    return catalog, catalog_levels(catalog)[0].with_m(twice_m)


def test_bundled_catalogs():
    catalog = bundled_catalog("n2plus")
    assert len(catalog.lines) == 1
    line = catalog.lines[0]
    assert line.branch == "R11(1/2)"
    assert line.frequency == N2_LINE_HZ
    assert line.s_rot == 0.5
    assert "Honl-London" in catalog.source_note

    ca = bundled_catalog("ca_plus")
    assert [lv.label for lv in catalog_levels(ca)] == ["S1/2", "D3/2", "D5/2"]
    assert len(ca.lines_from(catalog_levels(ca)[0])) == 2


def write_catalog(path, rows):
    header = "lower_label,upper_label,frequency_hz,a_vib_per_s,s_rot,twice_j_lower,twice_j_upper,branch"
    path.write_text("# test catalog\n" + header + "\n" + "\n".join(rows) + "\n", encoding="utf-8")
    return str(path)


test_cases["catalog_error"] = [
    (["S,P,1e14,1e6,1,1,1"], "Wrong number of columns. ({path}, line 3)"),
    (["S,P,abc,1e6,1,1,1,a"], "Invalid frequency_hz. ({path}, line 3: 'abc')"),
    (["S,P,1e14,1e6,1,1,1,a", "S,P,1e14,1e6,2,1,1,b"], "S_rot must be in [0, 1]. (b, 2.0) ({path}, line 4)"),
    (["S,P,1e14,1e6,1,1,5,a"], "Not a dipole line. |J_upper - J_lower| > 1. (a) ({path}, line 3)"),
]


@pytest.mark.parametrize("rows, error", test_cases["catalog_error"])
def test_load_catalog_errors(tmp_path, rows, error):
    path = write_catalog(tmp_path / "bad.csv", rows)
    with pytest.raises(InputError) as e:
        load_catalog(path)
    assert str(e.value) == error.format(path=path)


def test_load_catalog_header(tmp_path):
    path = tmp_path / "bad_header.csv"
    path.write_text("lower,upper\nS,P\n", encoding="utf-8")
    with pytest.raises(InputError) as e:
        load_catalog(str(path))
    assert str(e.value) == f"Unexpected catalog header. ({path}, line 1)"


def test_missing_catalog():
    with pytest.raises(InputError) as e:
        load_catalog("not_a_catalog.csv")
    assert str(e.value) == "Catalog not found. (not_a_catalog.csv)"


def test_duplicated_line():
    lower = RoVibronicState("S", 1)
    upper = RoVibronicState("P", 1)
    line = TransitionLine(lower, upper, 1e14, 1e6, 1.0, "a")
    with pytest.raises(InputError):
        LineCatalog((line, TransitionLine(lower, upper, 1e14, 2e6, 1.0, "b")), "dup")


def test_intensity_linearity():
    catalog, state = n2_state()
    shift = ac_stark_shift(state, operating_laser(1e6), catalog)
    for factor in [0.5, 2.0, 7.0]:
        scaled = ac_stark_shift(state, operating_laser(1e6 * factor), catalog)
        assert scaled == pytest.approx(factor * shift, rel=1e-14)
    assert ac_stark_shift(state, operating_laser(0.0), catalog) == 0.0


def test_line_additivity():
    ca = bundled_catalog("ca_plus")
    s_half = catalog_levels(ca)[0].with_m(-1)
    laser = operating_laser()
    total = ac_stark_shift(s_half, laser, ca)
    line_397, line_393 = ca.lines_from(s_half)
    only_397 = ac_stark_shift(s_half, laser, ca.without(line_393))
    only_393 = ac_stark_shift(s_half, laser, ca.without(line_397))
    assert total == pytest.approx(only_397 + only_393, rel=1e-14)
    assert only_397 == pytest.approx(line_kernel(line_397, s_half, laser) * line_397.a_vib, rel=1e-15)


def test_near_resonance_scaling():
    """Close to a line the shift goes as 1 / detuning."""
    catalog, state = n2_state()
    near = ac_stark_shift(state, operating_laser(detuning=-1e9), catalog)
    far = ac_stark_shift(state, operating_laser(detuning=-2e9), catalog)
    assert near / far == pytest.approx(2.0, rel=1e-4)
    # red detuning lowers the lower level
    assert near < 0
    blue = ac_stark_shift(state, operating_laser(detuning=1e9), catalog)
    assert blue > 0


def exact_operating_shift():
    """Single-line shift of |J=1/2, m=+1/2> at the operating point, evaluated to 40 digits."""
    line = bundled_catalog("n2plus").lines[0]
    c = Rational(int(constants.c))
    h = Rational(repr(constants.h))
    w_ij = 2 * pi * Rational(repr(line.frequency))
    w = 2 * pi * (Rational(repr(line.frequency)) + Rational(repr(OPERATING_DETUNING_HZ)))
    angular = 4 * wigner_3j(Rational(3, 2), 1, Rational(1, 2), Rational(-1, 2), 0, Rational(1, 2)) ** 2
    energy = (-3 * pi * c ** 2 / (w_ij ** 2 * (w_ij ** 2 - w ** 2)) * Rational(repr(OPERATING_INTENSITY))
              * Rational(repr(line.s_rot)) * Rational(repr(line.a_vib)) * angular)
    return float((energy / h).evalf(40))


def test_operating_shift():
    catalog, state = n2_state()
    shift = ac_stark_shift(state, operating_laser(), catalog)
    assert shift == pytest.approx(exact_operating_shift(), rel=1e-12)
    assert shift == pytest.approx(-11747.06, abs=0.01)
    # inside the 2.5 - 13 kHz sensitivity window of the detection
    assert 2.5e3 <= abs(shift) <= 13e3


def test_far_detuned_scaling():
    """Over +-50 GHz the bright shift halves when the detuning doubles (|detuning| > 10 GHz)."""
    catalog, state = n2_state()
    steps = np.arange(-50, 51)
    rows = stark_spectrum(state, [], OPERATING_INTENSITY, N2_LINE_HZ + 1e9 * steps, catalog)
    shifts = {int(k): row.bright_shift for k, row in zip(steps, rows)}
    for k in range(11, 26):
        for sign in (1, -1):
            assert shifts[sign * k] / shifts[2 * sign * k] == pytest.approx(2.0, rel=0.05)


def test_sublevel_symmetry():
    catalog, _ = n2_state()
    laser = operating_laser()
    up = ac_stark_shift(n2_state(1)[1], laser, catalog)
    down = ac_stark_shift(n2_state(-1)[1], laser, catalog)
    assert up == pytest.approx(down, rel=1e-15)


def test_calcium_reference_shift():
    """|S1/2, m=-1/2> of Ca+ at the operating point shifts by about 910 Hz."""
    ca = bundled_catalog("ca_plus")
    s_half = catalog_levels(ca)[0].with_m(-1)
    shift = ac_stark_shift(s_half, operating_laser(), ca)
    assert abs(shift) == pytest.approx(910, rel=0.1)


def test_kernel_without_upper_sublevel():
    ca = bundled_catalog("ca_plus")
    d_three_half = catalog_levels(ca)[1].with_m(3)
    line_866 = ca.find_line("866nm")
    assert line_kernel(line_866, d_three_half, operating_laser()) == 0.0


def test_kernel_needs_sublevel():
    catalog, _ = n2_state()
    with pytest.raises(InputError) as e:
        line_kernel(catalog.lines[0], catalog_levels(catalog)[0], operating_laser())
    assert str(e.value) == "State needs a magnetic sublevel. (X2Sigma_g+(v=0;N=0;J=1/2))"


def test_pole_guard():
    catalog, state = n2_state()
    with pytest.raises(PoleError):
        ac_stark_shift(state, operating_laser(detuning=500.0), catalog)
    # just outside the guard
    ac_stark_shift(state, operating_laser(detuning=2e3), catalog)


def test_spectrum():
    catalog, state = n2_state()
    grid = N2_LINE_HZ + np.array([-2e9, -1e9, 0.0, 1e9])
    rows = stark_spectrum(state, [], OPERATING_INTENSITY, grid, catalog)
    assert [r.frequency for r in rows] == list(grid)
    assert rows[2].bright_shift is None
    assert rows[1].bright_shift < rows[0].bright_shift < 0 < rows[3].bright_shift
    assert all(r.other_shift == 0.0 for r in rows if r.bright_shift is not None)


def test_spectrum_other_states():
    ca = bundled_catalog("ca_plus")
    levels = catalog_levels(ca)
    bright = levels[0].with_m(-1)
    others = [s for lv in levels[1:] for s in lv.sublevels()]
    laser = operating_laser()
    rows = stark_spectrum(bright, others, OPERATING_INTENSITY, [laser.frequency], ca)
    assert len(rows) == 1
    expected = max(abs(ac_stark_shift(s, laser, ca)) for s in others)
    assert rows[0].other_shift == pytest.approx(expected, rel=1e-15)


def test_spectrum_parallel_matches_serial():
    catalog, state = n2_state()
    grid = N2_LINE_HZ - 1e9 - 1e7 * np.arange(5000)
    serial = stark_spectrum(state, [], OPERATING_INTENSITY, grid, catalog, max_workers=1)
    parallel = stark_spectrum(state, [], OPERATING_INTENSITY, grid, catalog, max_workers=2)
    assert serial == parallel


@pytest.mark.parametrize("detuning, stark_shift, cycles", test_cases["budget"])
def test_scattering_budget(detuning, stark_shift, cycles):
    budget = scattering_budget(detuning, stark_shift)
    assert budget.cycles == pytest.approx(cycles, rel=1e-12)
    assert budget.bsb_pulses == pytest.approx(20 * cycles, rel=1e-12)


def test_scattering_budget_errors():
    with pytest.raises(InputError) as e:
        scattering_budget(0.0, 10e3)
    assert str(e.value) == "Detuning must not be zero."
    with pytest.raises(InputError):
        scattering_budget(10e9, 0.0)


@pytest.mark.parametrize("detuning, valid", test_cases["hyperfine"])
def test_hyperfine_validity(detuning, valid):
    check = hyperfine_validity(detuning, 300e6)
    assert check.valid == valid
    assert check.message.startswith("valid" if valid else "hyperfine-sensitive")


def test_state_validation():
    with pytest.raises(InputError) as e:
        RoVibronicState("X", 1, twice_m=3)
    assert str(e.value) == "|m| exceeds J. (X, 2J=1, 2m=3)"
    with pytest.raises(InputError):
        RoVibronicState("X", 3, n=0)
    with pytest.raises(InputError) as e:
        LaserField(1.0, 1e14, "sigma+")
    assert str(e.value) == "Only pi polarization is supported. (sigma+)"
