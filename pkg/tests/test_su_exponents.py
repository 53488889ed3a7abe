import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from macexp.channels import (AdditiveNoiseChannel, Dmc, Pmf, binary_example_channel,
                             mac_from_additive_noise)
from macexp.errors import MacexpError, ZeroCapacity
from macexp.su_exponents import (additive_random_coding_exponent, best_known_exponent, capacity,
                                 critical_rate, expurgated_exponent, expurgated_search,
                                 expurgation_rate, gallager_e0, gallager_ex,
                                 random_coding_exponent, renyi_entropy,
                                 slepian_wolf_components, slepian_wolf_mac_exponent,
                                 time_sharing_expurgated_exponent)

import oracles

LN2 = math.log(2)
UNIFORM2 = Pmf.uniform(2)


def h_half(d):
    return 2 * math.log(math.sqrt(d) + math.sqrt(1 - d))


def z_channel(eps):
    return Dmc([[1.0, 0.0], [eps, 1 - eps]])


def random_dmc(seed, nx, ny):
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(ny) * 0.7, size=nx)
    return Dmc(w)


class TestE0Ex:
    def test_rho_zero(self):
        assert gallager_e0(random_dmc(1, 3, 4), Pmf.uniform(3), 0.0) == pytest.approx(0.0, abs=1e-15)

    def test_noiseless(self):
        assert gallager_e0(Dmc.bsc(0.0), UNIFORM2, 1.0) == pytest.approx(LN2, abs=1e-14)
        assert gallager_ex(Dmc.bsc(0.0), UNIFORM2, 1.0) == pytest.approx(LN2, abs=1e-14)

    def test_bsc002_closed_forms(self):
        b = 2 * math.sqrt(0.02 * 0.98)
        assert gallager_e0(Dmc.bsc(0.02), UNIFORM2, 1.0) == pytest.approx(LN2 - math.log(1 + b), abs=1e-14)
        assert gallager_ex(Dmc.bsc(0.02), UNIFORM2, 1.0) == pytest.approx(-math.log(0.5 + 0.5 * b), abs=1e-14)

    @pytest.mark.parametrize("rho", [1.0, 2.5, 40.0])
    def test_useless_bsc_ex(self, rho):
        assert gallager_ex(Dmc.bsc(0.5), UNIFORM2, rho) == pytest.approx(0.0, abs=1e-14)

    @given(st.integers(0, 10_000), st.integers(2, 4), st.integers(2, 4), st.floats(0.0, 1.0))
    def test_e0_matches_definition(self, seed, nx, ny, rho):
        ch = random_dmc(seed, nx, ny)
        p = np.random.default_rng(seed + 1).dirichlet(np.ones(nx))
        v = gallager_e0(ch, Pmf(p), rho)
        assert v == pytest.approx(oracles.e0_direct(ch.rows, p, rho), abs=1e-12)
        assert v >= -1e-14

    @given(st.integers(0, 10_000), st.integers(2, 4), st.floats(1.0, 30.0))
    def test_ex_matches_definition(self, seed, nx, rho):
        ch = random_dmc(seed, nx, 3)
        p = np.random.default_rng(seed + 1).dirichlet(np.ones(nx))
        assert gallager_ex(ch, Pmf(p), rho) == pytest.approx(oracles.ex_direct(ch.rows, p, rho),
                                                             abs=1e-11)

    @given(st.integers(0, 10_000))
    def test_e0_concave_in_rho(self, seed):
        ch = random_dmc(seed, 3, 3)
        p = Pmf.uniform(3)
        rhos = np.linspace(0, 1, 11)
        v = np.array([gallager_e0(ch, p, r) for r in rhos])
        assert np.all(np.diff(v, 2) <= 1e-12)
        assert np.all(np.diff(v) >= -1e-14)


class TestCapacity:
    @pytest.mark.parametrize("d", [0.0, 0.02, 0.11, 0.5])
    def test_bsc(self, d):
        h = 0.0 if d in (0.0,) else -(d * math.log(d) + (1 - d) * math.log(1 - d))
        assert capacity(Dmc.bsc(d))[0] == pytest.approx(LN2 - h, abs=1e-10)

    @pytest.mark.parametrize("eps", [0.1, 0.3, 0.7])
    def test_z_channel_against_grid(self, eps):
        ch = z_channel(eps)
        assert capacity(ch)[0] == pytest.approx(oracles.blahut_free_capacity_binary_input(ch.rows),
                                                abs=1e-9)


class TestRandomCoding:
    def test_bsc002_rate0_matches_additive(self):
        d = 0.02
        want = LN2 - h_half(d)
        assert random_coding_exponent(Dmc.bsc(d), 0.0).e_r == pytest.approx(want, abs=1e-9)
        add = additive_random_coding_exponent(AdditiveNoiseChannel(2, Pmf.bernoulli(d)), 0.0)
        assert add == pytest.approx(want, abs=1e-9)

    def test_noiseless_rate0(self):
        assert random_coding_exponent(Dmc.bsc(0.0), 0.0).e_r == pytest.approx(LN2, abs=1e-9)

    @pytest.mark.parametrize("d", [0.02, 0.1])
    def test_zero_at_capacity(self, d):
        ch = Dmc.bsc(d)
        c = capacity(ch)[0]
        assert random_coding_exponent(ch, c).e_r == pytest.approx(0.0, abs=1e-9)
        assert random_coding_exponent(ch, c + 0.05).e_r == 0.0

    def test_negative_rate(self):
        with pytest.raises(MacexpError):
            random_coding_exponent(Dmc.bsc(0.1), -0.1)

    @pytest.mark.parametrize("eps,rate", [(0.2, 0.0), (0.2, 0.15), (0.5, 0.05), (0.5, 0.2)])
    def test_z_channel_grid_oracle(self, eps, rate):
        ch = z_channel(eps)
        got = random_coding_exponent(ch, rate).e_r
        grid = oracles.binary_input_grid_exponent(ch.rows, rate, "rc", grid=401)
        assert got >= grid - 1e-9
        assert got <= grid + 1e-5

    @pytest.mark.parametrize("d", [0.05, 0.2])
    def test_additive_form_agrees(self, d):
        ch = AdditiveNoiseChannel(2, Pmf.bernoulli(d))
        for r in np.linspace(0, 0.5, 6):
            assert random_coding_exponent(ch.to_dmc(), r).e_r == pytest.approx(
                additive_random_coding_exponent(ch, r), abs=1e-9)

    def test_report_fields(self):
        rep = best_known_exponent(Dmc.bsc(0.02), 0.05)
        assert rep.e_best == max(rep.e_r, rep.e_ex)
        assert 0.0 <= rep.rho <= 1.0 and rep.ex_rho >= 1.0
        assert rep.optimizer_state == (rep.rho, rep.input_pmf)


class TestExpurgated:
    def test_useless(self):
        assert expurgated_exponent(Dmc.bsc(0.5), 0.1) == pytest.approx(0.0, abs=1e-12)

    def test_above_rc_below_rex_and_tangent(self):
        ch = Dmc.bsc(0.02)
        rex = expurgation_rate(ch)
        r = rex - 0.01
        assert expurgated_exponent(ch, r) > random_coding_exponent(ch, r).e_r
        assert abs(expurgated_exponent(ch, rex) - random_coding_exponent(ch, rex).e_r) < 1e-6

    @pytest.mark.parametrize("eps,rate", [(0.2, 0.02), (0.2, 0.1), (0.5, 0.05)])
    def test_z_channel_grid_oracle(self, eps, rate):
        ch = z_channel(eps)
        got = expurgated_exponent(ch, rate)
        grid = oracles.binary_input_grid_exponent(ch.rows, rate, "ex", grid=401)
        assert got >= grid - 1e-9
        assert got <= grid + 1e-5

    def test_truncation_flag_near_zero_rate(self):
        _, rho, _, truncated = expurgated_search(Dmc.bsc(0.02), 1e-6, rho_max=4.0)
        assert truncated and rho == pytest.approx(4.0)
        _, _, _, truncated = expurgated_search(Dmc.bsc(0.02), 0.1)
        assert not truncated


class TestRenyi:
    def test_cases(self):
        assert renyi_entropy(Pmf.uniform(5), 0.3) == pytest.approx(math.log(5), abs=1e-14)
        assert renyi_entropy(Pmf.point(3, 0), 2.0) == pytest.approx(0.0, abs=1e-15)
        h = -(0.02 * math.log(0.02) + 0.98 * math.log(0.98))
        assert h == pytest.approx(0.0980, abs=5e-5)
        assert renyi_entropy(Pmf.bernoulli(0.02), 1.0) == pytest.approx(h, abs=1e-15)
        for b in (1 - 1e-6, 1 + 1e-6):
            assert renyi_entropy(Pmf.bernoulli(0.02), b) == pytest.approx(h, abs=1e-6)

    def test_bad_order(self):
        with pytest.raises(MacexpError):
            renyi_entropy(Pmf.uniform(2), 0.0)

    @given(st.integers(0, 10_000), st.floats(0.1, 5.0), st.floats(0.1, 5.0))
    def test_non_increasing_in_order(self, seed, a, b):
        p = Pmf(np.random.default_rng(seed).dirichlet(np.ones(4)))
        lo, hi = sorted((a, b))
        assert renyi_entropy(p, lo) >= renyi_entropy(p, hi) - 1e-12


class TestAdditive:
    def test_uniform_noise(self):
        ch = AdditiveNoiseChannel(3, Pmf.uniform(3))
        assert additive_random_coding_exponent(ch, 0.0) == pytest.approx(0.0, abs=1e-14)

    def test_degenerate_noise(self):
        ch = AdditiveNoiseChannel(3, Pmf.point(3, 1))
        assert additive_random_coding_exponent(ch, 0.3) == pytest.approx(math.log(3) - 0.3, abs=1e-12)


class TestRates:
    def test_useless(self):
        with pytest.raises(ZeroCapacity):
            critical_rate(Dmc.bsc(0.5))
        with pytest.raises(ZeroCapacity):
            expurgation_rate(Dmc.bsc(0.5))

    def test_ordering(self):
        ch = Dmc.bsc(0.02)
        assert 0 < expurgation_rate(ch) < critical_rate(ch) < capacity(ch)[0]

    def test_noiseless_convention(self):
        assert critical_rate(Dmc.bsc(0.0)) == 0.0

    def test_bsc_critical_rate_closed_form(self):
        # rho = 1 slope of E_0 for the BSC with uniform input
        d = 0.1
        s = math.sqrt(d) + math.sqrt(1 - d)
        a, b = math.sqrt(d) / s, math.sqrt(1 - d) / s
        want = LN2 + a * math.log(a) + b * math.log(b)
        assert critical_rate(Dmc.bsc(d)) == pytest.approx(want, abs=1e-10)


class TestInvariants:
    @settings(max_examples=15)
    @given(st.integers(0, 10_000))
    def test_monotone_and_zero_beyond_capacity(self, seed):
        ch = random_dmc(seed, 2, 3)
        c = capacity(ch)[0]
        rates = np.linspace(0, 1.2 * max(c, 1e-3), 7)
        er = [random_coding_exponent(ch, r).e_r for r in rates]
        ex = [expurgated_exponent(ch, r) for r in rates]
        assert np.all(np.diff(er) <= 1e-8)
        assert np.all(np.diff(ex) <= 1e-8)
        assert er[-1] == pytest.approx(0.0, abs=1e-9)
        assert min(er) >= 0 and min(ex) >= 0


class TestSlepianWolf:
    def test_additive_zero_rate(self):
        mac = mac_from_additive_noise(Pmf.bernoulli(0.02))
        rep = slepian_wolf_components(mac, 0.0, 0.0)
        want = additive_random_coding_exponent(AdditiveNoiseChannel(2, Pmf.bernoulli(0.02)), 0.0)
        assert rep.value == pytest.approx(want, abs=1e-9)
        assert rep.third_dominates

    def test_beyond_sum_capacity(self):
        mac = mac_from_additive_noise(Pmf.bernoulli(0.1))
        assert slepian_wolf_mac_exponent(mac, 0.3, 0.3) == 0.0

    @pytest.mark.parametrize("q,p,r1,r2", [(0.1, 0.3, 0.0, 0.0), (0.1, 0.6, 0.02, 0.01)])
    def test_grid_oracle(self, q, p, r1, r2):
        mac = binary_example_channel(q, p)
        got = slepian_wolf_mac_exponent(mac, r1, r2)
        grid = oracles.slepian_wolf_grid(mac.table, r1, r2, grid=41)
        assert got >= grid - 1e-9
        assert got <= grid + 2e-3

    def test_negative_rates(self):
        with pytest.raises(MacexpError):
            slepian_wolf_mac_exponent(binary_example_channel(0.1, 0.3), -0.1, 0.0)


class TestTimeSharing:
    def test_zero_rate_harmonic(self):
        mac = mac_from_additive_noise(Pmf.bernoulli(0.1))
        e = best_known_exponent(Dmc.bsc(0.1), 0.0).e_best
        assert time_sharing_expurgated_exponent(mac, 0.0, 0.0) == pytest.approx(e / 2, abs=1e-9)

    def test_below_slepian_wolf_on_additive(self):
        mac = mac_from_additive_noise(Pmf.bernoulli(0.1))
        assert time_sharing_expurgated_exponent(mac, 0.05, 0.05) <= slepian_wolf_mac_exponent(
            mac, 0.05, 0.05) + 1e-9
