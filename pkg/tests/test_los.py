import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import example_delays, los_scenarios, scenario_from_delays
from subcarrier_ia.alignment import (
    build_system,
    effective_channels,
    feasibility,
    ia_sum_rate,
    leakage,
    max_normalized_leakage,
    solve_beamformers,
)
from subcarrier_ia.channel import ScenarioConfig, SubcarrierPair, channel_at, sample_scenario
from subcarrier_ia.exceptions import Corollary1IsThreeUser, OrthogonalityViolated
from subcarrier_ia.los import (
    best_spacing,
    delay_differences,
    effective_amplitudes,
    ia_zf_sum_rates,
    los_feasible,
    min_time_ia_residual,
    spacing_analysis,
    spacing_grid,
    time_ia_residual,
    upper_bound,
)


def pipeline_rate(scn, delta_f, f0=0.0):
    ch = channel_at(scn, SubcarrierPair.from_spacing(delta_f, f0))
    bf = solve_beamformers(build_system(ch))
    return ia_sum_rate(effective_channels(ch, bf), leakage(ch, bf), scn.noise_variance).sum


class TestSpacingAnalysis:
    def test_worked_example(self):
        sa = spacing_analysis(scenario_from_delays(example_delays()))
        assert sa.delta_tau_sum == pytest.approx(1e-6, rel=1e-12)
        assert sa.delta_f_min == pytest.approx(1e6, rel=1e-12)
        assert not sa.degenerate

    def test_negative_sum(self):
        sa = spacing_analysis(scenario_from_delays(example_delays(tau31=6.5)))
        assert sa.delta_tau_sum == pytest.approx(-0.5e-6, rel=1e-12)
        assert sa.delta_f_min == pytest.approx(2e6, rel=1e-12)

    def test_degenerate(self):
        sa = spacing_analysis(scenario_from_delays(np.full((3, 3), 1e-6)))
        assert sa.degenerate and sa.delta_tau_sum == 0.0

    def test_default_distribution(self, default_cfg):
        dfmin = np.array([spacing_analysis(sample_scenario(default_cfg, 11, t)).delta_f_min for t in range(10_000)])
        assert np.mean((dfmin >= 1e6) & (dfmin <= 1e8)) >= 0.90

    def test_three_users_only(self):
        with pytest.raises(Corollary1IsThreeUser):
            spacing_analysis(sample_scenario(ScenarioConfig(k=4), 0, 0))


class TestLosFeasible:
    scn = scenario_from_delays(example_delays())

    def test_minimal_spacing(self):
        assert los_feasible(self.scn, 1e6) == (True, 1)

    def test_negative_multiple(self):
        scn = scenario_from_delays(example_delays(tau31=6.5))
        assert los_feasible(scn, 2e6) == (True, -1)

    def test_midpoint(self):
        feasible, _ = los_feasible(self.scn, 0.5e6)
        assert not feasible

    def test_agrees_with_alignment(self):
        for scn in los_scenarios(20, seed=3):
            sa = spacing_analysis(scn)
            for x in (7.0, 7.5, 0.3):
                feasible, n = los_feasible(scn, x * sa.delta_f_min)
                report = feasibility(build_system(channel_at(scn, SubcarrierPair.from_spacing(x * sa.delta_f_min, 2.4e9))))
                assert feasible == report.feasible
                if x == 7.0:
                    assert abs(n) == 7

    def test_degenerate_always_feasible(self):
        assert los_feasible(scenario_from_delays(np.full((3, 3), 1e-6)), 123.0)[0]


class TestEffectiveAmplitudes:
    # delta_tau_1 = 6 us - tau_11 for the worked example; delta_f_min = 1 MHz
    @pytest.mark.parametrize(
        "tau11, factor", [(5.5, 1.0), (5.0, 0.0), (6.0 - 1.0 / 6.0, 0.5)]
    )
    def test_sine_values(self, tau11, factor):
        scn = scenario_from_delays(example_delays(direct=(tau11, 1.0, 1.0)), amplitudes=np.full((3, 3), 2.0))
        assert effective_amplitudes(scn, 1)[0] == pytest.approx(2.0 * factor, abs=1e-9)

    def test_delay_differences(self):
        t = example_delays(direct=(0.5, 0.25, 0.75))
        dt = np.array(delay_differences(scenario_from_delays(t)).delta_tau) * 1e6
        assert_allclose(dt, [-0.5 + 4 - 1 + 3, -0.25 + 1 - 3 + 2, -0.75 + 2 - 2 + 3], atol=1e-9)

    def test_n_zero(self):
        with pytest.raises(OrthogonalityViolated):
            effective_amplitudes(los_scenarios(1)[0], 0)

    def test_bounded_by_direct(self):
        for scn in los_scenarios(50):
            for n in range(-20, 21):
                if n:
                    amp = effective_amplitudes(scn, n)
                    assert np.all(amp >= 0) and np.all(amp <= np.diag(scn.amplitudes))

    def test_pipeline_matches_closed_form(self):
        for scn in los_scenarios(20, seed=5):
            sa = spacing_analysis(scn)
            for n in range(1, 21):
                ch = channel_at(scn, SubcarrierPair.from_spacing(n * sa.delta_f_min))
                got = np.abs(effective_channels(ch, solve_beamformers(build_system(ch))))
                assert_allclose(got, effective_amplitudes(scn, n), rtol=1e-9)


class TestUpperBound:
    def test_snr_three(self):
        scn = scenario_from_delays(example_delays(), amplitudes=np.full((3, 3), np.sqrt(3.0)))
        assert upper_bound(scn) == pytest.approx(6.0)

    def test_vanishes_with_noise(self):
        scn = scenario_from_delays(example_delays(), noise_variance=1e30)
        assert upper_bound(scn) < 1e-29

    def test_dominates_ia_rate(self):
        rng = np.random.default_rng(1)
        for scn in los_scenarios(100, seed=6):
            sa = spacing_analysis(scn)
            spacings = np.concatenate([np.arange(1, 26), rng.uniform(0.01, 25.0, 25)]) * sa.delta_f_min
            ub = upper_bound(scn)
            for df in spacings:
                assert pipeline_rate(scn, df) <= ub


class TestBatchPipeline:
    def test_matches_object_pipeline(self):
        for scn in los_scenarios(10, seed=12):
            sa = spacing_analysis(scn)
            spacings = np.array([0.37, 1.0, 2.5, 4.0]) * sa.delta_f_min
            batch = ia_zf_sum_rates(scn, spacings, f0=1e9)
            single = [pipeline_rate(scn, df, f0=1e9) for df in spacings]
            assert_allclose(batch, single, rtol=1e-12)


class TestBestSpacing:
    def test_grid_contents(self):
        grid = spacing_grid(2e6, 6e6, 4)
        assert {2e6, 4e6, 6e6} <= set(grid)
        assert grid.size == 12 and np.all(np.diff(grid) > 0)
        assert spacing_grid(2e6, 1e5, 20).tolist() == [1e5]

    def test_single_interval_covers_multiple(self):
        # the first multiple is always on the grid, so the optimum is at least its closed form
        hits = 0
        for scn in los_scenarios(50, seed=21):
            dfm = spacing_analysis(scn).delta_f_min
            df, rate = best_spacing(scn, dfm)
            closed = np.sum(np.log2(1 + effective_amplitudes(scn, 1) ** 2 / scn.noise_variance))
            assert rate >= closed - 1e-9
            if df == dfm:
                assert rate == pytest.approx(closed, abs=1e-9)
                hits += 1
        assert hits >= 5

    def test_superset(self):
        for scn in los_scenarios(20, seed=22):
            dfm = spacing_analysis(scn).delta_f_min
            assert best_spacing(scn, 10 * dfm)[1] >= best_spacing(scn, dfm)[1]

    def test_gap_to_bound_shrinks(self):
        gaps = {1: [], 10: [], 100: []}
        for scn in los_scenarios(100, seed=23):
            dfm = spacing_analysis(scn).delta_f_min
            ub = upper_bound(scn)
            for n in gaps:
                gaps[n].append(ub - best_spacing(scn, n * dfm)[1])
        medians = [np.median(gaps[n]) for n in (1, 10, 100)]
        assert medians[0] > medians[1] > medians[2]

    def test_argmax_of_grid(self):
        for scn in los_scenarios(10, seed=24):
            dfm = spacing_analysis(scn).delta_f_min
            grid = spacing_grid(dfm, 3 * dfm, 20)
            rates = ia_zf_sum_rates(scn, grid)
            df, rate = best_spacing(scn, 3 * dfm)
            assert df == grid[np.argmax(rates)]
            assert rate == rates.max()


class TestOffsetInvariance:
    def test_offset(self):
        rng = np.random.default_rng(3)
        for scn in los_scenarios(20, seed=31):
            df = rng.uniform(0.1, 5) * spacing_analysis(scn).delta_f_min
            offset = rng.uniform(-3e9, 3e9)
            a = channel_at(scn, SubcarrierPair.from_spacing(df))
            b = channel_at(scn, SubcarrierPair.from_spacing(df, offset))
            ra, rb = feasibility(build_system(a)), feasibility(build_system(b))
            assert_allclose(ra.phase_residuals, rb.phase_residuals, atol=1e-9)
            la = max_normalized_leakage(a, solve_beamformers(build_system(a)))
            lb = max_normalized_leakage(b, solve_beamformers(build_system(b)))
            assert abs(la - lb) <= 1e-9

    def test_every_multiple_feasible(self):
        for scn in los_scenarios(20, seed=32):
            dfm = spacing_analysis(scn).delta_f_min
            for n in range(1, 11):
                assert feasibility(build_system(channel_at(scn, SubcarrierPair.from_spacing(n * dfm)))).feasible


class TestTimeIa:
    def test_arithmetic(self):
        t = np.full((3, 3), 1e-6)
        scn = scenario_from_delays(t)
        assert time_ia_residual(scn, 0.25e6) == pytest.approx(0.5)

    def test_equal_delays(self):
        scn = scenario_from_delays(np.full((3, 3), 1.3e-6))
        assert time_ia_residual(scn, 1 / 2.6e-6) == pytest.approx(0.0, abs=1e-12)

    def test_exact_minimum_against_dense_grid(self):
        for scn in los_scenarios(5, seed=41):
            top = 3 * spacing_analysis(scn).delta_f_min
            grid = np.linspace(top / 1e6, top, 1_000_000)
            taus = scn.delays[~np.eye(3, dtype=bool)]
            r = np.remainder(2 * grid[:, None] * taus - 1.0, 2.0)
            dense = np.minimum(r, 2 - r).max(axis=1).min()
            exact = min_time_ia_residual(scn, top)
            assert exact <= dense + 1e-12
            # Lipschitz bound: the dense grid cannot be far above the true minimum
            assert dense - exact <= 2 * taus.max() * (grid[1] - grid[0])

    def test_non_increasing(self):
        for scn in los_scenarios(20, seed=42):
            dfm = spacing_analysis(scn).delta_f_min
            curve = min_time_ia_residual(scn, dfm * np.arange(1, 21))
            assert np.all(np.diff(curve) <= 0)
