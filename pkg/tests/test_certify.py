import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mccert import (
    CertificationInput,
    ClampWarning,
    CountsRecord,
    InputError,
    NoiseModel,
    PhysicsError,
    certify,
    entanglement_dim_lower_bound,
    estimate_params_from_counts,
    mutual_info_lower_bound_mc,
    neg_entropy_lower_bound,
    purity_mc_from_total,
    rank_upper_bound_from_diag,
    ree_exact_mc,
    ree_lower_bound_mc,
    ree_lower_bound_noisy,
)
from mccert.certify import bootstrap, model_from_coincidences
from mccert.densmat import make_mc_state, mix, purity, random_mc_state, white_noise_state
from mccert.oracle import candidates, grid_oracle_min, sampled_oracle_min
from mccert.photonics import simulate_coincidence_counts, simulate_parity_counts


def h2(p):
    return -sum(x * math.log2(x) for x in p if x > 0)


class TestNegEntropyBound:
    def test_frozen_grid_value(self):
        # independent brute-force grid at resolution 1e-4, frozen
        assert neg_entropy_lower_bound(4, 0.5) == pytest.approx(-1.4034880984237583, abs=1e-12)

    def test_d2_by_hand(self):
        # eigenvalues 0.8, 0.2 have purity 0.68
        assert neg_entropy_lower_bound(2, 0.68) == pytest.approx(-h2([0.8, 0.2]), abs=1e-12)

    @pytest.mark.parametrize("K", range(1, 13))
    def test_endpoints(self, K):
        assert neg_entropy_lower_bound(K, 1.0) == 0.0
        assert neg_entropy_lower_bound(K, 1.0 / K) == pytest.approx(-math.log2(K), abs=1e-12)

    def test_clamping(self):
        with pytest.warns(ClampWarning):
            assert neg_entropy_lower_bound(3, 1.01) == 0.0
        with pytest.raises(PhysicsError):
            neg_entropy_lower_bound(3, 1.2)
        with pytest.raises(PhysicsError):
            neg_entropy_lower_bound(3, 0.2)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            neg_entropy_lower_bound(3, 1.0 + 1e-14)

    def test_bad_k(self):
        with pytest.raises(InputError):
            neg_entropy_lower_bound(0, 1.0)

    @pytest.mark.parametrize("d", range(2, 9))
    def test_tight_against_oracles(self, d):
        rng = np.random.default_rng(d)
        for P in np.linspace(1 / d, 1, 27)[1:-1]:
            closed = neg_entropy_lower_bound(d, P)
            if d == 2:
                phi = 0.5 + 0.5 * math.sqrt(2 * P - 1)
                assert closed == pytest.approx(-h2([phi, 1 - phi]), abs=1e-12)
            elif d <= 4:
                assert abs(grid_oracle_min(d, P, 1e-3) - closed) < 2e-3
            if d >= 3:
                best = min(c.objective for c in candidates(d, P))
                assert best == pytest.approx(closed, abs=1e-6)
                assert sampled_oracle_min(d, P, 20_000, rng) >= closed - 1e-9

    @settings(max_examples=200, deadline=None)
    @given(st.integers(2, 12), st.floats(0, 1))
    def test_monotone_in_purity(self, K, t):
        P1 = 1 / K + t * (1 - 1 / K)
        P2 = min(1.0, P1 + 1e-3)
        assert neg_entropy_lower_bound(K, P2) >= neg_entropy_lower_bound(K, P1) - 1e-12


class TestREE:
    def test_uniform_pure(self):
        assert ree_lower_bound_mc([0.25] * 4, 1.0) == pytest.approx(2.0, abs=1e-12)

    def test_nonuniform_pure(self):
        assert ree_lower_bound_mc([0.5, 0.3, 0.2], 1.0) == pytest.approx(h2([0.5, 0.3, 0.2]), abs=1e-12)

    def test_separable_is_zero(self):
        z = [0.5, 0.3, 0.2]
        assert ree_lower_bound_mc(z, sum(x * x for x in z)) <= 1e-12

    def test_exact_by_hand(self):
        rho = make_mc_state([[0.6, 0.2], [0.2, 0.4]])
        s = math.sqrt(0.05)
        expected = h2([0.6, 0.4]) - h2([0.5 + s, 0.5 - s])
        assert ree_exact_mc(rho) == pytest.approx(expected, abs=1e-12)
        assert ree_lower_bound_mc([0.6, 0.4], purity(rho)) == pytest.approx(expected, abs=1e-10)

    def test_exact_rejects_non_mc(self):
        with pytest.raises(PhysicsError):
            ree_exact_mc(white_noise_state(2))

    def test_lower_bound_random(self, rng):
        for _ in range(300):
            d = int(rng.integers(2, 6))
            rho = random_mc_state(d, rng, rank=int(rng.integers(1, d + 1)))
            zeta = np.real(np.diag(rho.entries))[:: d + 1]
            assert ree_exact_mc(rho) >= ree_lower_bound_mc(zeta, purity(rho)) - 1e-9

    def test_noisy_example(self):
        expected = 0.9 * 2.0 + 0.9 * math.log2(0.9) + 0.1 * math.log2(0.1)
        assert ree_lower_bound_noisy([0.25] * 4, 0.9, 1.0) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(1.3310, abs=5e-5)

    def test_noisy_identity_at_gamma_one(self):
        assert ree_lower_bound_noisy([0.5, 0.5], 1.0, 0.8) == ree_lower_bound_mc([0.5, 0.5], 0.8)

    def test_noisy_rejects_gamma_zero(self):
        with pytest.raises(PhysicsError):
            ree_lower_bound_noisy([0.5, 0.5], 0.0, 1.0)


class TestPurityConversion:
    def test_white_roundtrip(self):
        rho_mc = make_mc_state(np.full((3, 3), 1 / 3))
        rho = mix(rho_mc, white_noise_state(3), 0.8)
        back = purity_mc_from_total(purity(rho), 0.8, NoiseModel.white(), 3)
        assert back == pytest.approx(1.0, abs=1e-12)

    def test_clamp_example(self):
        with pytest.warns(ClampWarning):
            assert purity_mc_from_total(0.6533, 0.8, NoiseModel.white(), 3) == 1.0

    def test_out_of_range(self):
        with pytest.raises(PhysicsError):
            purity_mc_from_total(0.9, 0.5, NoiseModel.white(), 3)
        with pytest.raises(PhysicsError):
            purity_mc_from_total(1.1, 1.0, NoiseModel.noise_free(), 3)

    def test_incoherent_weights(self):
        lam = [0.5, 0.5]
        assert NoiseModel.incoherent(lam).sum_squares(2) == 0.5
        with pytest.raises(InputError):
            NoiseModel.incoherent(lam).sum_squares(3)
        with pytest.raises(InputError):
            NoiseModel.incoherent([0.6, 0.6])


class TestDimensionAndInfo:
    @pytest.mark.parametrize("d", range(1, 33))
    def test_log_d_maps_to_d(self, d):
        assert entanglement_dim_lower_bound(math.log2(d)) == d

    def test_examples(self):
        assert entanglement_dim_lower_bound(0.0) == 1
        assert entanglement_dim_lower_bound(1.5) == 3
        with pytest.warns(ClampWarning):
            assert entanglement_dim_lower_bound(-0.2) == 1

    def test_mutual_info(self):
        assert mutual_info_lower_bound_mc([0.5, 0.5], 1.0) == pytest.approx(2.0)
        assert mutual_info_lower_bound_mc([0.5, 0.5], 0.5) == pytest.approx(1.0)

    def test_rank_bound(self):
        assert rank_upper_bound_from_diag([0.5, 0, 0.5, 1e-12]) == 2
        with pytest.raises(InputError):
            rank_upper_bound_from_diag([-0.1, 1.1])


class TestEstimation:
    def test_gamma_example(self):
        rec = CountsRecord(np.array([[45, 5], [5, 45]]), 90, 10)
        inp = estimate_params_from_counts(rec)
        assert inp.gamma == pytest.approx(0.9)
        assert inp.zeta == (0.5, 0.5)
        assert inp.q == pytest.approx(0.1)
        assert inp.noise_model.kind == "white"
        assert inp.purity_total == pytest.approx(0.8)

    def test_auto_threshold(self):
        c = np.array([[5000, 1], [0, 4999]])
        with pytest.warns(ClampWarning):
            zeta, gamma, q, model = model_from_coincidences(c)
        assert gamma == 1.0 and model.kind == "none" and q == pytest.approx(1e-4)

    def test_noise_free_without_off_counts(self):
        _, gamma, q, model = model_from_coincidences(np.diag([3, 7]), "white")
        assert (gamma, q, model.kind) == (1.0, 0.0, "none")

    def test_incoherent_weights_from_counts(self):
        c = np.array([[40, 6], [4, 50]])
        _, gamma, _, model = model_from_coincidences(c, "incoherent")
        assert gamma == pytest.approx(0.9)
        assert model.lam == pytest.approx((0.6, 0.4))

    def test_failures(self):
        with pytest.raises(InputError):
            model_from_coincidences(np.zeros((2, 2)))
        with pytest.raises(PhysicsError):
            model_from_coincidences(np.array([[0, 5], [5, 0]]))
        with pytest.raises(InputError):
            model_from_coincidences(np.eye(2), "pink")
        with pytest.raises(InputError):
            CountsRecord(np.array([[1, -1], [0, 1]]), 1, 0)

    def test_negative_parity(self):
        rec = CountsRecord(np.diag([5, 5]), 10, 30)
        with pytest.raises(PhysicsError):
            estimate_params_from_counts(rec)

    def test_input_validation(self):
        with pytest.raises(InputError):
            CertificationInput(2, (0.5, 0.5), 0.9, NoiseModel.noise_free(), 0.8)
        with pytest.raises(PhysicsError):
            CertificationInput(2, (0.5, 0.5), 1.0, NoiseModel.noise_free(), 0.0)


class TestCertify:
    def test_report_bell(self):
        inp = CertificationInput(2, (0.5, 0.5), 1.0, NoiseModel.noise_free(), 1.0)
        r = certify(inp)
        assert (r.ree_lower_bound, r.d_star, r.warnings) == (1.0, 2, [])

    def test_report_collects_clamp(self):
        inp = CertificationInput(3, (1 / 3,) * 3, 0.8, NoiseModel.white(), 0.6533)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            r = certify(inp)
        kinds = [w["kind"] for w in r.warnings]
        assert "clamp" in kinds and "model" in kinds
        assert r.purity_mc == 1.0

    @pytest.mark.parametrize("d", [2, 4])
    def test_convergence_at_large_shots(self, d):
        rng = np.random.default_rng(7)
        rho_mc = random_mc_state(d, rng, rank=1)
        rho = mix(rho_mc, white_noise_state(d), 0.9)
        rec = CountsRecord(simulate_coincidence_counts(rho, 10**7, rng),
                           *simulate_parity_counts(rho, 10**7, rng))
        got = certify(estimate_params_from_counts(rec)).ree_lower_bound
        zeta = np.real(np.diag(rho_mc.entries))[:: d + 1]
        want = ree_lower_bound_noisy(zeta, 0.9, purity(rho_mc))
        assert got == pytest.approx(want, abs=0.01)

    def test_bootstrap_deterministic(self):
        rec = CountsRecord(np.array([[4500, 50], [50, 4400]]), 4000, 1000)
        a = bootstrap(rec, 50, seed=3)
        assert a == bootstrap(rec, 50, seed=3)
        assert a["failed"] == 0
        assert a["ree_lower_bound_p2_5"] <= a["ree_lower_bound_p97_5"]
        with pytest.raises(InputError):
            bootstrap(rec, 0)
