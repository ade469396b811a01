import numpy as np
import pytest

from tpdicke.model import DickeError, ModelParams, threshold_coupling
from tpdicke.stability import classify
from tpdicke.steady import superradiant_branches
from tpdicke.sweep import (
    CURVE_HEADER,
    PHASE_HEADER,
    Axis,
    SweepConfig,
    grid_sweep,
    photon_curve,
    read_phase_csv,
    threshold_scan,
    write_csv,
)

GAMMA3 = ModelParams(1, 1, 1, 100, 1, 3, 3)


def small_config(base=GAMMA3, n1=6, n2=4):
    return SweepConfig(base, Axis("g", 0.1, 10, n1), Axis("omega_0", 0.25, 5, n2))


# -- axes and config -----------------------------------------------------------------------


def test_axis_parse():
    ax = Axis.parse("g:0.1:10:5")
    assert (ax.name, ax.lo, ax.hi, ax.count) == ("g", 0.1, 10.0, 5)
    np.testing.assert_allclose(ax.values, np.linspace(0.1, 10, 5))
    np.testing.assert_allclose(Axis.parse("g:1:1000:4", log=True).values, [1, 10, 100, 1000])


@pytest.mark.parametrize("text", ["g:1:2", "g:a:2:3", "bogus:1:2:3", "g:1:2:1"])
def test_axis_parse_errors(text):
    with pytest.raises(ValueError):
        Axis.parse(text)


def test_log_axis_needs_positive_range():
    with pytest.raises(ValueError):
        Axis("g", 0.0, 1.0, 3, log=True)


@pytest.mark.parametrize("a, b", [("g", "g"), ("gamma", "gamma_phi")])
def test_config_rejects_overlapping_axes(a, b):
    with pytest.raises(ValueError):
        SweepConfig(GAMMA3, Axis(a, 0.1, 1, 2), Axis(b, 0.1, 1, 2))


# -- grid sweep ----------------------------------------------------------------------------


@pytest.mark.parametrize("gamma", [0.2, 1.5, 3.0])
def test_deep_subcritical_grid_is_normal(gamma):
    cfg = SweepConfig(GAMMA3.replace(gamma=gamma), Axis("g", 0.01, 0.02, 2), Axis("omega_0", 0.5, 2, 2))
    d = grid_sweep(cfg)
    assert d.shape == (2, 2)
    assert set(d.labels.ravel()) == {"N"}
    assert np.all(np.isnan(d.n_ss)) and not d.errors


def test_strong_dissipation_grid_has_bistable_band_beside_superradiance():
    d = grid_sweep(SweepConfig(GAMMA3, Axis("g", 0.1, 10, 40), Axis("omega_0", 0.25, 5, 20)))
    assert {"N", "S", "B"} <= set(d.labels.ravel())
    # every B cell touches an S cell along g at fixed omega_0 or is followed by one
    for j in range(d.shape[1]):
        col = "".join(d.labels[:, j])
        if "B" in col:
            assert "BS" in col


def test_superradiant_area_shrinks_with_qubit_number():
    cfg10 = small_config(GAMMA3.replace(gamma=1.5, n_qubits=10), 20, 10)
    cfg100 = small_config(GAMMA3.replace(gamma=1.5, n_qubits=100), 20, 10)
    assert grid_sweep(cfg10).count("SB") > grid_sweep(cfg100).count("SB")


def test_grid_matches_pointwise_classification():
    cfg = small_config()
    d = grid_sweep(cfg)
    for i, g in enumerate(cfg.axis1.values):
        for j, w0 in enumerate(cfg.axis2.values):
            c = classify(GAMMA3.replace(g=g, omega_0=w0))
            assert d.labels[i, j] == c.label.value
            assert d.abscissa_normal[i, j] == c.normal.spectral_abscissa


def test_gamma_axis_locks_both_rates():
    cfg = SweepConfig(GAMMA3, Axis("g", 1, 5, 3), Axis("gamma", 1, 3, 3))
    d = grid_sweep(cfg)
    for i, g in enumerate(cfg.axis1.values):
        for j, gm in enumerate(cfg.axis2.values):
            assert d.labels[i, j] == classify(GAMMA3.replace(g=g, gamma_down=gm, gamma_phi=gm)).label.value


def test_serial_and_parallel_agree():
    cfg = small_config()
    a, b = grid_sweep(cfg, workers=1), grid_sweep(cfg, workers=2)
    np.testing.assert_array_equal(a.labels, b.labels)
    np.testing.assert_array_equal(a.abscissa_super, b.abscissa_super)
    np.testing.assert_array_equal(a.n_ss, b.n_ss)


def test_point_failures_are_recorded_in_cell():
    # kappa = 0 is legal for dynamics but not for the closed-form steady state
    cfg = SweepConfig(GAMMA3, Axis("kappa", 0.0, 1.0, 2), Axis("g", 1, 4, 2))
    d = grid_sweep(cfg)
    assert list(d.labels[0]) == ["error", "error"]
    assert set(d.labels[1]) <= {"N", "S", "B", "I"}
    assert set(d.errors) == {(0, 0), (0, 1)}
    assert "kappa" in d.errors[(0, 0)]


# -- photon curve --------------------------------------------------------------------------


def test_curve_below_existence_edge_is_unphysical():
    curve = photon_curve(GAMMA3, (0.05, 0.6), 20)
    assert all(not p.physical and np.isnan(p.n_ss) and not p.stable for p in curve)


def test_curve_jumps_at_lower_stable_edge():
    curve = photon_curve(GAMMA3, (0.1, 5), 400)
    first = next(p for p in curve if p.stable)
    assert first.n_ss > 0.05
    assert first.g < threshold_coupling(GAMMA3)


@pytest.mark.parametrize("g", [2.5, 4.0, 8.0])
def test_photon_number_grows_with_qubit_number(g):
    values = []
    for n in (10, 50, 100):
        p = GAMMA3.replace(n_qubits=n)
        pt = photon_curve(p, (g, 2 * g), 2)[0]
        sol = superradiant_branches(p.replace(g=g))
        assert sol.plus.residual(p.replace(g=g)) < 1e-9
        values.append(pt.n_ss)
    assert values[0] < values[1] < values[2]


def test_curve_rejects_non_positive_range():
    with pytest.raises(ValueError):
        photon_curve(GAMMA3, (0.0, 1.0), 3)


# -- thresholds ----------------------------------------------------------------------------


def test_normal_instability_threshold_is_gt():
    base = ModelParams(1, 1, 1, 100, 1, 3, 3)
    r = threshold_scan(base, "g", (1e-3, 10), "normal-unstable")
    assert r.value == pytest.approx(3.0682344271583943, abs=1e-4)
    assert r.crossing == "real"


def test_gamma_threshold_center_panel():
    r = threshold_scan(ModelParams(1, 2, 5, 100, 1, 1, 1), "gamma", (0.5, 3.0), "super-stable")
    assert 1.4 <= r.value <= 1.8
    assert r.hi - r.lo <= 1e-4


def test_dephasing_scan_flips_towards_stability():
    base = ModelParams(1, 5, 1, 100, 1, 1.6, 1.0)
    r = threshold_scan(base, "gamma_phi", (0.05, 5.0), "super-stable")
    assert not classify(base.replace(gamma_phi=r.lo)).super_stable
    assert classify(base.replace(gamma_phi=r.hi)).super_stable
    flags = [classify(base.replace(gamma_phi=gf)).super_stable for gf in np.linspace(0.05, 5, 200)]
    first = flags.index(True)
    assert all(flags[first:])


def test_bisection_brackets_nest():
    r = threshold_scan(GAMMA3, "g", (1e-3, 10), "normal-unstable", tol=1e-6)
    for (lo0, hi0), (lo1, hi1) in zip(r.brackets, r.brackets[1:]):
        assert lo0 <= lo1 <= hi1 <= hi0
    for lo, hi in r.brackets:
        assert lo <= r.value <= hi


def test_constant_predicate_rejected():
    with pytest.raises(DickeError, match="both ends"):
        threshold_scan(GAMMA3, "g", (0.01, 0.02), "normal-unstable")


def test_custom_predicate_and_unknown_name():
    r = threshold_scan(GAMMA3, "g", (1e-3, 10), lambda c: c.superradiant is not None)
    assert r.crossing == "existence"
    with pytest.raises(ValueError):
        threshold_scan(GAMMA3, "nope", (0, 1), "normal-unstable")


# -- CSV -----------------------------------------------------------------------------------


def test_phase_csv_rows_and_round_trip(tmp_path):
    d = grid_sweep(SweepConfig(GAMMA3, Axis("g", 0.5, 4, 2), Axis("omega_0", 1, 2, 2)))
    path = tmp_path / "phase.csv"
    write_csv(d, path)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(PHASE_HEADER)
    assert len(lines) == 5
    rows = read_phase_csv(path)
    assert [r["label"] for r in rows] == list(d.labels.ravel())
    assert [r["axis1"] for r in rows] == [0.5, 0.5, 4.0, 4.0]
    for r, ns in zip(rows, d.n_ss.ravel()):
        assert (np.isnan(r["n_ss"]) and np.isnan(ns)) or r["n_ss"] == ns


def test_csv_is_deterministic(tmp_path):
    cfg = small_config()
    write_csv(grid_sweep(cfg), tmp_path / "a.csv")
    write_csv(grid_sweep(cfg, workers=2), tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_curve_csv(tmp_path):
    curve = photon_curve(GAMMA3, (0.5, 4), 3)
    path = tmp_path / "curve.csv"
    write_csv(curve, path)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(CURVE_HEADER)
    assert lines[1] == "0.5,nan,false,false"
    assert lines[3].endswith(",true,true")


def test_csv_write_error_names_path(tmp_path):
    target = tmp_path / "missing" / "x.csv"
    with pytest.raises(DickeError, match="missing"):
        write_csv(photon_curve(GAMMA3, (0.5, 4), 2), target)


def test_read_rejects_wrong_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(DickeError, match="header"):
        read_phase_csv(path)
