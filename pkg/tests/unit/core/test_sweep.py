"""
Unit tests for sweeps, N_max extraction and verification reports
"""

import math

import numpy as np
import pytest

from hsthermo.core.errors import InvalidParameterError, NoHeisenbergWindowError
from hsthermo.core.models import QubitThermalModel, thermal_quantities
from hsthermo.core.scheme import SchemeConfig, qfi_example_noise
from hsthermo.core.sweep import (
    DEFAULT_NMAX_TAU,
    bounds_report,
    evaluate_point,
    find_nmax,
    noise_to_ideal_ratios,
    oracle_report,
    run_metadata,
    run_sweep,
)
from hsthermo.core.types import (
    INITIAL_STATE_COLUMNS,
    SWEEP_COLUMNS,
    NmaxRule,
    SweepMode,
    SweepSpec,
)


def small_spec(**overrides):
    values = dict(n_values=[1, 2, 3], xi_values=[100.0, 400.0], eta_values=[0.1], theta_values=[2.0])
    values.update(overrides)
    return SweepSpec(**values)


class TestSweepSpec:
    """Grid validation"""

    def test_empty_grid(self):
        with pytest.raises(InvalidParameterError):
            small_spec(xi_values=[])

    @pytest.mark.parametrize("overrides", [
        {"n_values": [0, 1]},
        {"n_values": [1.5]},
        {"xi_values": [-1.0]},
        {"eta_values": [-0.1]},
        {"theta_values": [0.0]},
        {"sigma01_values": [0.7]},
    ])
    def test_invalid_values(self, overrides):
        with pytest.raises(InvalidParameterError):
            small_spec(**overrides)

    def test_columns(self):
        assert small_spec().columns == SWEEP_COLUMNS
        assert small_spec(mode=SweepMode.INITIAL_STATE).columns == SWEEP_COLUMNS + INITIAL_STATE_COLUMNS


class TestRunSweep:
    """Grid evaluation"""

    def test_grid_order(self):
        result = run_sweep(small_spec())
        assert [(row.N, row.xi) for row in result.rows] == [
            (1, 100.0), (2, 100.0), (3, 100.0), (1, 400.0), (2, 400.0), (3, 400.0)
        ]

    def test_threads_do_not_change_rows(self):
        serial = run_sweep(small_spec())
        parallel = run_sweep(small_spec(), threads=3)
        assert [row.to_dict() for row in serial.rows] == [row.to_dict() for row in parallel.rows]

    def test_ideal_mode(self):
        result = run_sweep(small_spec(mode=SweepMode.IDEAL, n_values=[1, 10]))
        assert all(row.ratio == pytest.approx(1.0) for row in result.rows)
        assert result.rows[0].qfi_ideal_over_fth == pytest.approx(3.76006, rel=1e-5)
        assert result.rows[1].qfi_over_fth == pytest.approx(376.006, rel=1e-5)

    def test_example_noise_ratio_bounded(self):
        result = run_sweep(small_spec(n_values=[1, 10, 100, 1000]))
        assert all(0.0 <= row.ratio <= 1.0 + 1e-9 for row in result.rows)
        assert all(row.qfi_over_fth >= 0.0 for row in result.rows)

    def test_general_noise_mode(self):
        result = run_sweep(small_spec(mode=SweepMode.GENERAL_NOISE, n_values=[1, 50]))
        assert all(row.ratio == pytest.approx(math.exp(-0.4), rel=1e-10) for row in result.rows)

    def test_initial_state_mode(self):
        spec = small_spec(
            mode=SweepMode.INITIAL_STATE,
            n_values=[100],
            xi_values=[1e6],
            rho00_values=[0.5],
            sigma01_values=[0.1, 0.2],
        )
        result = run_sweep(spec)
        assert [row.sigma01 for row in result.rows] == [0.1, 0.2]
        assert "rho00" in result.rows[0].to_dict()
        assert result.rows[1].qfi_over_fth / result.rows[0].qfi_over_fth == pytest.approx(4.0, rel=1e-3)

    def test_metadata(self):
        result = run_sweep(small_spec())
        assert result.metadata["mode"] == "example-noise"
        assert result.metadata["vectorization"] == "column-stacking"
        assert "generated_at" in result.metadata
        assert run_metadata(extra=1)["extra"] == 1

    def test_rows_reproducible_from_scheme(self):
        row = evaluate_point(SweepMode.EXAMPLE_NOISE, 37, 200.0, 0.2, 2.0)
        model = QubitThermalModel(theta=2.0, xi=200.0, eta=0.2)
        direct = qfi_example_noise(SchemeConfig(model=model, n_probes=37))
        assert row.qfi_over_fth * thermal_quantities(2.0).f_th == pytest.approx(direct, rel=1e-12)


class TestNmax:
    """Largest probe number with Heisenberg scaling"""

    @pytest.mark.parametrize("xi, expected", [(400.0, 435), (100.0, 109)])
    def test_reproduces_reference_values(self, xi, expected):
        nmax = find_nmax(xi, 0.1, 2.0)
        assert abs(nmax - expected) <= 0.1 * expected

    def test_insensitive_to_eta(self):
        low = find_nmax(400.0, 0.1, 2.0)
        high = find_nmax(400.0, 0.4, 2.0)
        assert abs(low - high) <= 0.1 * low

    def test_grows_with_xi(self):
        values = [find_nmax(xi, 0.1, 2.0) for xi in (100.0, 200.0, 300.0, 400.0)]
        assert values == sorted(values)
        assert len(set(values)) == 4

    def test_peak_rule_is_close_to_threshold(self):
        threshold = find_nmax(400.0, 0.1, 2.0)
        peak = find_nmax(400.0, 0.1, 2.0, rule=NmaxRule.PEAK)
        assert abs(peak - threshold) <= 0.05 * threshold

    def test_threshold_predicate_holds_up_to_nmax(self):
        model = QubitThermalModel(theta=2.0, xi=100.0, eta=0.1)
        nmax = find_nmax(100.0, 0.1, 2.0)
        ratios = noise_to_ideal_ratios(model, range(1, nmax + 2))
        assert np.all(ratios[:nmax] >= 1.0 - DEFAULT_NMAX_TAU)
        assert ratios[nmax] < 1.0 - DEFAULT_NMAX_TAU

    def test_no_heisenberg_window(self):
        with pytest.raises(NoHeisenbergWindowError) as excinfo:
            find_nmax(0.5, 0.1, 2.0, tau=0.01)
        assert excinfo.value.ratio < 0.99

    @pytest.mark.parametrize("tau", [0.0, 1.0, -0.2])
    def test_tau_range(self, tau):
        with pytest.raises(InvalidParameterError):
            find_nmax(400.0, 0.1, 2.0, tau=tau)

    def test_unbounded_in_ideal_limit(self):
        with pytest.raises(InvalidParameterError):
            find_nmax(math.inf, 0.1, 2.0)

    def test_ideal_limit_ratios_are_one(self):
        ratios = noise_to_ideal_ratios(QubitThermalModel(xi=math.inf), [1, 10, 1000])
        np.testing.assert_allclose(ratios, 1.0, rtol=1e-10)


class TestReports:
    """Bound and oracle verification reports"""

    def test_bounds_pass_at_fast_thermalization(self, example_model):
        report = bounds_report(example_model)
        assert report.passed
        names = [row.name for row in report.rows]
        assert "eps ||K|| < gap / g" in names
        assert any(name.startswith("decay bound") for name in names)
        assert report.metadata["coupling_norm"] == pytest.approx(2.0)

    def test_bounds_fail_when_inapplicable(self):
        report = bounds_report(QubitThermalModel(theta=2.0, xi=1.0))
        assert not report.passed
        row = next(row for row in report.rows if row.name == "eps ||K|| < gap / g")
        assert not row.passed
        assert row.lhs > row.rhs

    def test_oracle_report_passes(self, example_model):
        report = oracle_report(example_model, 2)
        assert report.passed
        assert all(row.lhs < 1e-7 for row in report.rows)
        assert report.to_dict()["passed"] is True
