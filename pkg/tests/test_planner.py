"""Unit tests for the penalized joint placement/power solver."""

import json

import numpy as np
import pytest

from hawkvlc import planner, vlc

import oracle


def covered_scenario(n=3, rate_min=0.0, seed=0):
    """Users clustered tightly under the hover point so every link is live."""
    rng = np.random.default_rng(seed)
    users = rng.uniform(-1.5, 1.5, (n, 2))
    return vlc.Scenario(users=users, rate_min=rate_min)


def ladder_vector(scenario, placement=(0.0, 0.0), total=None):
    """Decision vector whose powers follow a SIC-respecting decode ladder."""
    total = 0.6 * scenario.p_max if total is None else total
    ch = vlc.channel_state(vlc.Placement(*placement), scenario)
    n = scenario.n_users
    shares = np.array([2.5 ** (n - 1 - k) for k in range(n)])
    shares = shares / shares.sum() * total
    p = np.empty(n)
    p[ch.decode_order] = shares
    return np.concatenate((np.asarray(placement, dtype=float), p))


class TestDecisionSpace:
    @pytest.mark.parametrize("n", [2, 5, 20])
    def test_dimension_law(self, n):
        rng = np.random.default_rng(1)
        s = vlc.Scenario(users=rng.uniform(-3, 3, (n, 2)))
        space = planner.decision_bounds(s)
        assert space.dim == 2 + n

    def test_bounds_shape(self):
        s = covered_scenario(4)
        space = planner.decision_bounds(s)
        r = s.disc_radius
        assert np.allclose(space.lower[:2], [-r, -r])
        assert np.allclose(space.upper[:2], [r, r])
        assert np.allclose(space.lower[2:], 0.0)
        assert np.allclose(space.upper[2:], s.p_max)


class TestPenaltyConfig:
    def test_default_count_and_value(self):
        pc = planner.PenaltyConfig.default(5)
        assert pc.factors.shape == (12,)
        assert np.all(pc.factors == 1e14)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            planner.PenaltyConfig(np.array([1.0, 0.0]))


class TestFitness:
    def test_feasible_point_equals_sum_efficiency(self):
        s = covered_scenario()
        x = ladder_vector(s)
        placement, power = planner.decode(x)
        ch = vlc.channel_state(placement, s)
        expected = vlc.spectral_efficiencies(ch, power, s.noise_power).sum()
        assert planner.fitness(x, s) == pytest.approx(expected, rel=1e-12)

    def test_budget_excess_penalized_quadratically(self):
        s = covered_scenario()
        x = ladder_vector(s)
        base = planner.fitness(x, s)
        assert base > 0.0
        # push the whole ladder over the budget by a known excess
        excess = ladder_vector(s, total=s.p_max * 1.5)
        delta = s.p_max * 0.5
        placement, power = planner.decode(excess)
        ch = vlc.channel_state(placement, s)
        se = vlc.spectral_efficiencies(ch, power, s.noise_power).sum()
        got = planner.fitness(excess, s)
        assert got == pytest.approx(se - 1e14 * delta**2, rel=1e-9)

    def test_disc_violation_term(self):
        s = covered_scenario()
        r = s.disc_radius
        x = ladder_vector(s, placement=(r + 1.0, 0.0), total=1e-5)
        overshoot = (r + 1.0) ** 2 - r**2
        got = planner.fitness(x, s)
        assert got <= -1e14 * overshoot**2 * 0.5  # dominated by the disc penalty

    def test_penalty_never_positive(self):
        s = covered_scenario()
        rng = np.random.default_rng(3)
        space = planner.decision_bounds(s)
        for _ in range(200):
            x = space.sample(rng, 1)[0]
            placement, power = planner.decode(x)
            ch = vlc.channel_state(placement, s)
            se = vlc.spectral_efficiencies(ch, power, s.noise_power).sum()
            assert planner.fitness(x, s) <= se + 1e-9

    def test_wrong_penalty_size_rejected(self):
        s = covered_scenario(3)
        with pytest.raises(ValueError):
            planner.fitness(ladder_vector(s), s, planner.PenaltyConfig(np.ones(4)))


class TestFeasibilityDominance:
    def test_feasible_beats_violating_samples(self):
        s = covered_scenario()
        rng = np.random.default_rng(11)
        space = planner.decision_bounds(s)

        feasible_fits = []
        for k in range(50):
            x = ladder_vector(s, placement=tuple(rng.uniform(-1, 1, 2)),
                              total=rng.uniform(0.2, 0.9) * s.p_max)
            placement, power = planner.decode(x)
            res = vlc.constraint_residuals(placement, power, s)
            if np.all(res <= 0.0):
                feasible_fits.append(planner.fitness(x, s))
        assert feasible_fits, "ladder construction should produce feasible points"

        violating_fits = []
        while len(violating_fits) < 50:
            x = space.sample(rng, 1)[0]
            placement, power = planner.decode(x)
            res = vlc.constraint_residuals(placement, power, s)
            if np.any(res > 1e-4):
                violating_fits.append(planner.fitness(x, s))
        assert min(feasible_fits) > max(violating_fits)


class TestSolve:
    def test_two_symmetric_users_matches_oracle(self):
        # the sum-rate optimum hovers over one of the two users (a mirrored
        # pair of optima), not on the bisector; the grid search certifies it
        users = np.array([[-1.0, 0.0], [1.0, 0.0]])
        s = vlc.Scenario(users=users)
        xs = np.linspace(-3.0, 3.0, 61)
        ys = np.linspace(-1.0, 1.0, 21)
        grid = np.linspace(0.0, s.p_max, 33)
        best, point = oracle._grid_best_two_users(s, xs, ys, grid)
        assert abs(abs(point[0]) - 1.0) <= 0.2 and abs(point[1]) <= 0.2
        sol = planner.solve(s, planner.HhoParams(30, 350), seed=21)
        assert sol.feasible
        assert sol.sum_rate / s.bandwidth == pytest.approx(best, rel=0.02)

    def test_matches_grid_oracle_small_instance(self):
        rng = np.random.default_rng(5)
        users = rng.uniform(-1.5, 1.5, (2, 2))
        s = vlc.Scenario(users=users)
        sol = planner.solve(s, planner.HhoParams(30, 350), seed=2)
        best, change = oracle.grid_oracle(s, placement_points=25, power_points=25)
        assert change < 0.005
        se = sol.sum_rate / s.bandwidth
        assert se == pytest.approx(best, rel=0.02)

    def test_deterministic(self):
        s = covered_scenario()
        a = planner.solve(s, planner.HhoParams(10, 40), seed=9)
        b = planner.solve(s, planner.HhoParams(10, 40), seed=9)
        assert a.placement == b.placement
        assert np.array_equal(a.power, b.power)
        assert a.sum_rate == b.sum_rate
        assert np.array_equal(a.trace, b.trace)

    def test_trace_monotone(self):
        s = covered_scenario()
        sol = planner.solve(s, planner.HhoParams(10, 60), seed=1)
        assert np.all(np.diff(sol.trace) >= 0.0)

    def test_feasible_flag_re_derived(self):
        s = covered_scenario()
        sol = planner.solve(s, planner.HhoParams(20, 150), seed=4)
        placement, power = sol.placement, sol.power
        res = vlc.constraint_residuals(placement, power, s)
        ch = vlc.channel_state(placement, s)
        assert sol.feasible == vlc.is_feasible(res, s, ch)

    def test_infeasible_scenario_flagged_not_hidden(self):
        # users far outside any field of view: SIC gaps cannot be met
        users = np.array([[40.0, 0.0], [-40.0, 0.0], [0.0, 40.0]])
        s = vlc.Scenario(users=users, disc_radius=10.0)
        sol = planner.solve(s, planner.HhoParams(10, 50), seed=6)
        assert not sol.feasible

    def test_wall_time_scales_linearly_enough(self):
        # coarse complexity smoke check: per-iteration cost vs S*(D + 2N + 2)
        import time

        times = {}
        for n in (5, 10, 20):
            rng = np.random.default_rng(n)
            s = vlc.Scenario(users=rng.uniform(-2, 2, (n, 2)))
            t0 = time.perf_counter()
            planner.solve(s, planner.HhoParams(20, 60), seed=1)
            times[n] = time.perf_counter() - t0
        ratio_cost = times[20] / times[5]
        ratio_model = (20 * (22 + 42)) / (20 * (7 + 12))
        assert ratio_cost < 2.0 * ratio_model


class TestSolutionSerialization:
    def test_json_round_trip_fields(self):
        s = covered_scenario()
        sol = planner.solve(s, planner.HhoParams(8, 30), seed=13)
        raw = json.loads(sol.to_json())
        assert set(raw) == {
            "scheme", "placement", "power_w", "per_user_rates_bps",
            "sum_rate_bps", "residuals", "feasible", "fitness", "seed",
        }
        assert raw["scheme"] == "hhopap"
        assert raw["seed"] == 13
        assert len(raw["power_w"]) == s.n_users
        assert raw["sum_rate_bps"] == pytest.approx(sum(raw["per_user_rates_bps"]))

    def test_json_deterministic(self):
        s = covered_scenario()
        a = planner.solve(s, planner.HhoParams(8, 30), seed=13).to_json()
        b = planner.solve(s, planner.HhoParams(8, 30), seed=13).to_json()
        assert a == b
