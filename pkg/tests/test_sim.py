import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from macexp.channels import Pmf
from macexp.errors import InvalidDims, MacexpError, TooLarge
from macexp.linear_codes import (GeneratorMatrix, exact_split_mac_error_probability,
                                 random_full_rank_generator, split)
from macexp.sim import (BLOCK, PamTriplet, SimConfig, box_muller, confidence_interval,
                        mean_square, pam_codebooks, pam_error_oracle, pam_quantize,
                        pam_sum_is_exact, simulate_pam_mac, simulate_split_mac, _nearest_pam_point)


class TestConfig:
    def test_validation(self):
        with pytest.raises(MacexpError):
            SimConfig(0, 1)
        with pytest.raises(MacexpError):
            SimConfig(10, -1)

    def test_blocks(self):
        sizes = [s for s, _ in SimConfig(2 * BLOCK + 5, 3).blocks()]
        assert sizes == [BLOCK, BLOCK, 5]

    def test_block_streams_do_not_depend_on_trials(self):
        a = [r.random(3) for _, r in SimConfig(BLOCK + 1, 9).blocks()]
        b = [r.random(3) for _, r in SimConfig(3 * BLOCK, 9).blocks()]
        np.testing.assert_array_equal(a[1], b[1])


class TestInterval:
    def test_normal(self):
        r = confidence_interval(100, 1000)
        assert r.method == "normal"
        assert r.halfwidth == pytest.approx(1.959963984540054 * math.sqrt(0.1 * 0.9 / 1000))

    def test_wilson_zero(self):
        r = confidence_interval(0, 1000)
        assert r.method == "wilson" and r.lo == 0.0 and r.hi > 0.0

    def test_exact(self):
        r = confidence_interval(0, 50, degenerate=True)
        assert r.halfwidth == 0.0 and r.method == "exact"
        assert r.to_json()["ci"] == [0.0, 0.0]


class TestSplitSim:
    def test_reproducible(self):
        sc = split(random_full_rank_generator(2, 4, 8, 3), 2)
        a = simulate_split_mac(sc, Pmf.bernoulli(0.1), SimConfig(5000, 42))
        b = simulate_split_mac(sc, Pmf.bernoulli(0.1), SimConfig(5000, 42))
        assert a == b
        assert a.mismatches == 0 and a.joint.errors == a.parent.errors

    def test_degenerate_noise(self):
        sc = split(random_full_rank_generator(3, 2, 5, 1), 1)
        r = simulate_split_mac(sc, Pmf.point(3, 0), SimConfig(2000, 1))
        assert r.joint.errors == 0 and r.joint.method == "exact"

    @pytest.mark.parametrize("seed", range(5))
    def test_calibrated(self, seed):
        g = random_full_rank_generator(2, 4, 8, seed)
        sc = split(g, 2)
        noise = Pmf.bernoulli(0.1)
        exact = exact_split_mac_error_probability(sc, noise, "fractional")
        r = simulate_split_mac(sc, noise, SimConfig(20000, seed))
        for est, want in ((r.joint, exact.joint_err), (r.user1, exact.user1_err),
                          (r.user2, exact.user2_err)):
            sigma = math.sqrt(want * (1 - want) / est.trials)
            assert abs(est.estimate - want) <= 4 * sigma + 1e-12

    def test_uniform_noise_tie_break(self):
        # every codeword ties, so the random tie break gives 1 - 1/|C|
        sc = split(GeneratorMatrix(2, [[1, 1, 1]]), 0)
        r = simulate_split_mac(sc, Pmf.uniform(2), SimConfig(20000, 5))
        assert abs(r.joint.estimate - 0.5) < 4 * math.sqrt(0.25 / 20000)

    def test_limits(self):
        with pytest.raises(InvalidDims):
            simulate_split_mac(split(GeneratorMatrix(2, [[1, 1]]), 0), Pmf.uniform(3), SimConfig(1, 0))
        with pytest.raises(TooLarge):
            simulate_split_mac(split(random_full_rank_generator(2, 17, 20, 0), 3),
                               Pmf.bernoulli(0.1), SimConfig(1, 0))


class TestPam:
    def test_triplet_validation(self):
        for bad in ((4, 1), (9, 2), (9, 5), (-3, 1)):
            with pytest.raises(InvalidDims):
                PamTriplet(*bad)
        with pytest.raises(InvalidDims):
            PamTriplet(9, 3, 0.0)

    def test_codebooks(self):
        c1, c2, pam = pam_codebooks(PamTriplet(15, 3, 2.0))
        assert c1.tolist() == [-12.0, -6.0, 0.0, 6.0, 12.0]
        assert c2.tolist() == [-2.0, 0.0, 2.0]
        assert pam.tolist() == list(np.arange(-14.0, 15.0, 2.0))

    @given(st.integers(0, 200).map(lambda i: 2 * i + 1), st.data())
    def test_sum_is_exact(self, l0, data):
        divs = [d for d in range(1, l0 + 1, 2) if l0 % d == 0]
        assert pam_sum_is_exact(PamTriplet(l0, data.draw(st.sampled_from(divs))))

    def test_mean_square(self):
        l0 = 7
        _, _, pam = pam_codebooks(PamTriplet(l0, 1))
        assert mean_square(pam) == pytest.approx((l0 * l0 - 1) / 12)

    def test_quantize_midpoints(self):
        t = PamTriplet(7, 1)
        q = pam_quantize(np.array([0.5, -0.5, 1.5, -2.5, 2.49, 10.0, -10.0]), t)
        assert q.tolist() == [0, 0, 1, -2, 2, 3, -3]

    @given(st.lists(st.floats(-20, 20), min_size=1, max_size=50), st.sampled_from([1, 3, 5]))
    def test_quantize_matches_exhaustive(self, ys, l0):
        t = PamTriplet(2 * l0 + 1, 1, 0.7)
        y = np.array(ys)
        np.testing.assert_array_equal(pam_quantize(y, t), _nearest_pam_point(y, t))

    def test_box_muller_moments(self):
        z = box_muller(np.random.default_rng(0), 200_000)
        assert abs(z.mean()) < 0.01 and abs(z.std() - 1) < 0.01

    def test_oracle_limits(self):
        assert pam_error_oracle(PamTriplet(1, 1), 1.0) == 0.0
        assert pam_error_oracle(PamTriplet(3, 1), 1e-3) == pytest.approx(0.0, abs=1e-300)

    def test_simulation_matches_oracle(self):
        t = PamTriplet(15, 3)
        r = simulate_pam_mac(t, 0.25, SimConfig(50_000, 11))
        sigma = math.sqrt(r.oracle * (1 - r.oracle) / 50_000)
        assert abs(r.joint.estimate - r.oracle) < 3 * sigma
        assert r.mismatches == 0 and r.joint.errors == r.single_user.errors

    def test_noise_validation(self):
        with pytest.raises(MacexpError):
            simulate_pam_mac(PamTriplet(3, 1), 0.0, SimConfig(10, 0))
