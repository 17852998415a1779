"""Unit tests for the comparison schemes."""

import math

import numpy as np
import pytest

from hawkvlc import baselines, planner, vlc


def tight_scenario(n=3, seed=0, **kw):
    rng = np.random.default_rng(seed)
    return vlc.Scenario(users=rng.uniform(-1.5, 1.5, (n, 2)), **kw)


QUICK = planner.HhoParams(15, 80)


class TestGrpaAllocate:
    def test_three_user_shares(self):
        s = tight_scenario(3)
        ch = vlc.channel_state(vlc.Placement(0.0, 0.0), s)
        p = baselines.grpa_allocate(ch, s, alpha=0.4)
        ladder = np.sort(p)[::-1] / s.p_max
        assert ladder == pytest.approx(np.array([1.0, 0.4, 0.16]) / 1.56, rel=1e-12)

    def test_alpha_near_one_is_equal_split(self):
        s = tight_scenario(4)
        ch = vlc.channel_state(vlc.Placement(0.0, 0.0), s)
        p = baselines.grpa_allocate(ch, s, alpha=1.0 - 1e-12)
        assert np.allclose(p, s.p_max / 4)

    def test_non_increasing_along_decode_order(self):
        s = tight_scenario(6, seed=3)
        ch = vlc.channel_state(vlc.Placement(0.3, -0.2), s)
        p = baselines.grpa_allocate(ch, s)
        ordered = p[ch.decode_order]
        assert np.all(np.diff(ordered) <= 0.0)
        # weakest user receives the largest share
        assert p[ch.decode_order[0]] == p.max()

    def test_shares_sum_to_budget(self):
        for n in (2, 5, 9):
            s = tight_scenario(n, seed=n)
            ch = vlc.channel_state(vlc.Placement(0.0, 0.0), s)
            p = baselines.grpa_allocate(ch, s)
            assert p.sum() == pytest.approx(s.p_max, rel=1e-12)


class TestGrpaSolve:
    def test_deterministic(self):
        s = tight_scenario()
        a = baselines.grpa_solve(s, QUICK, seed=5)
        b = baselines.grpa_solve(s, QUICK, seed=5)
        assert a.placement == b.placement
        assert np.array_equal(a.power, b.power)

    def test_power_is_ladder_at_found_placement(self):
        s = tight_scenario()
        sol = baselines.grpa_solve(s, QUICK, seed=5)
        ch = vlc.channel_state(sol.placement, s)
        expected = baselines.grpa_allocate(ch, s)
        assert np.allclose(sol.power, expected)

    def test_never_beats_joint_solver(self):
        # on spread-out users the rigid ladder wastes power on weak links,
        # so the joint solver should win essentially every paired run
        wins = 0
        for seed in range(5):
            rng = np.random.default_rng(seed)
            s = vlc.Scenario(users=rng.uniform(-4.0, 4.0, (6, 2)))
            joint = planner.solve(s, planner.HhoParams(25, 200), seed=seed)
            fixed = baselines.grpa_solve(s, planner.HhoParams(25, 200), seed=seed)
            wins += fixed.sum_rate <= joint.sum_rate * 1.01
        assert wins >= 4


class TestRandp:
    def test_disc_sampling_statistics(self):
        rng = np.random.default_rng(0)
        pts = np.array([
            [p.x, p.y] for p in (baselines.sample_disc_placement(rng, 10.0) for _ in range(10_000))
        ])
        radii = np.hypot(pts[:, 0], pts[:, 1])
        assert radii.max() <= 10.0
        assert np.linalg.norm(pts.mean(axis=0)) <= 0.05 * 10.0
        # area-uniform: half the mass inside r = R/sqrt(2)
        inside = np.mean(radii <= 10.0 / math.sqrt(2.0))
        assert abs(inside - 0.5) < 0.02

    def test_placement_inside_disc_always(self):
        s = tight_scenario()
        for seed in range(10):
            sol = baselines.randp_solve(s, QUICK, seed=seed)
            assert sol.placement.radius_sq() <= s.disc_radius**2 + 1e-9

    def test_deterministic(self):
        s = tight_scenario()
        a = baselines.randp_solve(s, QUICK, seed=3)
        b = baselines.randp_solve(s, QUICK, seed=3)
        assert a.placement == b.placement
        assert np.array_equal(a.power, b.power)

    def test_never_beats_joint_solver_statistically(self):
        wins = 0
        for seed in range(5):
            s = tight_scenario(3, seed=seed + 20)
            joint = planner.solve(s, planner.HhoParams(25, 200), seed=seed)
            rand = baselines.randp_solve(s, planner.HhoParams(25, 200), seed=seed)
            wins += rand.sum_rate <= joint.sum_rate * 1.001
        assert wins >= 4


class TestOfdma:
    def test_rates_independent_of_other_users(self):
        s = tight_scenario(3)
        ch = vlc.channel_state(vlc.Placement(0.0, 0.0), s)
        p1 = np.array([1e-3, 2e-3, 3e-3])
        p2 = np.array([1e-3, 9e-3, 0.0])
        r1 = baselines.ofdma_rates(ch, p1, s)
        r2 = baselines.ofdma_rates(ch, p2, s)
        assert r1[0] == pytest.approx(r2[0])  # user 0 unaffected by others

    def test_equal_gains_equal_power_equal_rates(self):
        s = vlc.Scenario(users=np.array([[1.0, 0.0], [-1.0, 0.0]]))
        ch = vlc.channel_state(vlc.Placement(0.0, 0.0), s)
        rates = baselines.ofdma_rates(ch, np.array([5e-3, 5e-3]), s)
        assert rates[0] == pytest.approx(rates[1])

    def test_subband_noise_scaling(self):
        # N subbands: bandwidth/N each, noise n0/N each
        s = tight_scenario(3)
        ch = vlc.channel_state(vlc.Placement(0.0, 0.0), s)
        p = np.array([2e-3, 0.0, 0.0])
        rates = baselines.ofdma_rates(ch, p, s)
        expected = (s.bandwidth / 3) * math.log2(
            1.0 + ch.gains[0] * 2e-3 / (s.noise_power / 3)
        )
        assert rates[0] == pytest.approx(expected)

    def test_no_sic_constraints_in_residuals(self):
        s = tight_scenario(4)
        res = baselines.ofdma_residuals(vlc.Placement(0.0, 0.0), np.full(4, 1e-3), s)
        assert len(res) == 2 + 4 + 1 + 4  # budget, optical, qos, disc, nonneg

    def test_rates_independent_of_decode_order(self):
        s = tight_scenario(4, seed=9)
        ch = vlc.channel_state(vlc.Placement(0.4, 0.1), s)
        shuffled = vlc.ChannelState(
            ch.gains, ch.distances, ch.decode_order[::-1].copy(), ch.normalized_gains
        )
        p = np.array([1e-3, 2e-3, 3e-3, 4e-3])
        assert np.allclose(baselines.ofdma_rates(ch, p, s), baselines.ofdma_rates(shuffled, p, s))

    def test_solve_feasible_on_easy_instance(self):
        s = tight_scenario(3)
        sol = baselines.ofdma_solve(s, planner.HhoParams(20, 150), seed=2)
        assert sol.scheme == "ofdma"
        assert sol.feasible
        assert sol.sum_rate > 0.0


class TestDispatch:
    def test_kinds_cover_schemes(self):
        assert {k.value for k in baselines.BaselineKind} == {"grpa", "randp", "ofdma"}

    def test_solution_tagged_with_scheme(self):
        s = tight_scenario()
        for kind in baselines.BaselineKind:
            sol = baselines.solve_baseline(kind, s, QUICK, seed=1)
            assert sol.scheme == kind.value
