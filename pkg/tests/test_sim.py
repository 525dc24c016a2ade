import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from subcarrier_ia.channel import ScenarioConfig
from subcarrier_ia.sim import COLUMNS, SweepConfig, dfmin_distribution, run_sweep, sweep_to_json


@pytest.fixture(scope="module")
def small_sweep():
    cfg = SweepConfig(trials=300, x_max=3.0, x_points=61, master_seed=5)
    return cfg, run_sweep(cfg, workers=1)


class TestSweep:
    def test_shape_and_header(self, small_sweep):
        _, result = small_sweep
        lines = result.to_csv_string().splitlines()
        assert lines[0] == ",".join(COLUMNS)
        assert len(lines) == 62
        assert_allclose(result.x_norm, np.linspace(0, 3, 61))

    def test_bit_identical_rerun(self, small_sweep):
        cfg, result = small_sweep
        assert run_sweep(cfg, workers=1).to_csv_string() == result.to_csv_string()

    def test_threads_do_not_change_output(self, small_sweep):
        cfg, result = small_sweep
        assert run_sweep(cfg, workers=4).to_csv_string() == result.to_csv_string()

    def test_thread_env(self, small_sweep, monkeypatch):
        cfg, result = small_sweep
        monkeypatch.setenv("IA_SIM_THREADS", "3")
        assert_array_equal(run_sweep(cfg).as_array(), result.as_array())

    def test_invariants(self, small_sweep):
        _, r = small_sweep
        assert r.violations() == []
        assert np.all(np.diff(r.max_ia_zf) >= 0)
        assert np.all(r.ia_zf <= r.max_ia_zf)
        assert np.all(r.max_ia_zf <= r.ia_upper_bound * (1 + 1e-12))

    def test_flat_columns(self, small_sweep):
        _, r = small_sweep
        for name in ("ia_upper_bound", "tdma", "int_as_noise"):
            assert np.ptp(getattr(r, name)) <= 1e-9 * np.max(getattr(r, name))

    def test_peaks_at_multiples(self, small_sweep):
        _, r = small_sweep
        at = {round(x, 6): v for x, v in zip(r.x_norm, r.ia_zf)}
        for n in (1, 2):
            assert at[n] > at[n - 0.5] and at[n] > at[n + 0.5]

    def test_zero_spacing_row(self, small_sweep):
        _, r = small_sweep
        assert r.ia_zf[0] == pytest.approx(0.0, abs=1e-6)

    def test_seed_changes_output(self, small_sweep):
        cfg, result = small_sweep
        other = SweepConfig(trials=300, x_max=3.0, x_points=61, master_seed=6)
        assert run_sweep(other, workers=1).to_csv_string() != result.to_csv_string()

    def test_json(self, small_sweep):
        import json

        cfg, result = small_sweep
        doc = json.loads(sweep_to_json(result, cfg))
        assert doc["config"]["trials"] == 300
        assert doc["columns"]["tdma"] == list(result.tdma)

    @pytest.mark.parametrize("kwargs", [{"trials": 0}, {"x_points": 1}, {"x_max": 0}, {"scenario": ScenarioConfig(k=4)}])
    def test_bad_config(self, kwargs):
        with pytest.raises(ValueError):
            SweepConfig(**kwargs)


class TestDfminDistribution:
    def test_reproducible(self):
        a = dfmin_distribution(ScenarioConfig(), 500, 3)
        b = dfmin_distribution(ScenarioConfig(), 500, 3)
        assert_array_equal(a.samples, b.samples)

    def test_slower_wave_scales_spacing(self):
        a = dfmin_distribution(ScenarioConfig(), 300, 9)
        b = dfmin_distribution(ScenarioConfig(wave_speed=3e7), 300, 9)
        assert_allclose(b.samples, a.samples / 10, rtol=1e-9)

    def test_histogram_counts_everything(self):
        s = dfmin_distribution(ScenarioConfig(), 1000, 1)
        assert s.counts.sum() == 1000
        assert s.quantiles[0.025] <= s.quantiles[0.5] <= s.quantiles[0.975]
        assert s.to_dict()["fraction_1e6_1e8"] == s.fraction_between(1e6, 1e8)
