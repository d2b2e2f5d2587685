import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from photonlab import fock
from photonlab.fock import ModeId

M1 = ModeId(helicity=+1, k_index=1)
M2 = ModeId(helicity=-1, k_index=1)
M3 = ModeId(helicity=+1, k_index=2)


class TestModeId:
    def test_ordering(self):
        assert sorted([M3, M2, M1]) == [M2, M1, M3]

    def test_rejects_bad_helicity(self):
        with pytest.raises(ValueError):
            ModeId(helicity=0, k_index=1)

    def test_rejects_zero_mode(self):
        with pytest.raises(ValueError):
            ModeId(helicity=+1, k_index=0)
        with pytest.raises(ValueError):
            ModeId(helicity=+1, k_index=(0, 0, 0))

    def test_3d_index(self):
        m = ModeId(helicity=-1, k_index=(0, 1, 0))
        assert m.k_index == (0, 1, 0)


def test_annihilation_matrix_structure():
    a = fock.annihilation_matrix(4)
    assert a.shape == (5, 5)
    for n in range(1, 5):
        assert a[n - 1, n] == pytest.approx(np.sqrt(n), rel=1e-16)
    assert np.count_nonzero(a) == 4


class TestLadder:
    def test_raise_matches_sqrt_rule(self):
        for n in range(11):
            s = fock.number_state([M1], [n], 12)
            up = fock.ladder_raise(s, M1)
            ref = fock.number_state([M1], [n + 1], 12)
            assert np.allclose(up.amplitudes,
                               np.sqrt(n + 1.0) * ref.amplitudes, atol=1e-14)

    def test_lower_matches_sqrt_rule(self):
        for n in range(1, 12):
            s = fock.number_state([M1], [n], 12)
            dn = fock.ladder_lower(s, M1)
            ref = fock.number_state([M1], [n - 1], 12)
            assert np.allclose(dn.amplitudes,
                               np.sqrt(float(n)) * ref.amplitudes, atol=1e-14)

    def test_lower_annihilates_vacuum(self):
        s = fock.vacuum_state([M1, M3], 3)
        dn = fock.ladder_lower(s, M1)
        assert np.all(dn.amplitudes == 0.0)

    def test_raise_truncates_top_and_reports_loss(self):
        s = fock.number_state([M1], [5], 5)
        up = fock.ladder_raise(s, M1)
        assert np.all(up.amplitudes == 0.0)
        # the occupied top level is annihilated; its whole mass is lost
        assert up.truncation_loss == pytest.approx(1.0, rel=1e-14)

    def test_multimode_targets_correct_axis(self):
        s = fock.number_state([M1, M3], [1, 2], 4)
        up = fock.ladder_raise(s, M3)
        ref = fock.number_state([M1, M3], [1, 3], 4)
        assert np.allclose(up.amplitudes, np.sqrt(3.0) * ref.amplitudes,
                           atol=1e-14)

    @given(st.integers(0, 10**9), st.integers(2, 6))
    @settings(max_examples=40, deadline=None)
    def test_adjoint_pair(self, seed, n_max):
        # <a† x, y> = <x, a y> holds exactly on the truncated space
        r = np.random.default_rng(seed)
        shape = (n_max + 1, n_max + 1)
        x = fock.FockState((M2, M1), n_max,
                           r.normal(size=shape) + 1j * r.normal(size=shape))
        y = fock.FockState((M2, M1), n_max,
                           r.normal(size=shape) + 1j * r.normal(size=shape))
        lhs = fock.inner_product(fock.ladder_raise(x, M2), y)
        rhs = fock.inner_product(x, fock.ladder_lower(y, M2))
        assert lhs == pytest.approx(rhs, abs=1e-12 * abs(rhs) + 1e-12)


class TestCommutatorDefect:
    @pytest.mark.parametrize("n_max", [1, 3, 7])
    def test_identity_plus_corner(self, n_max):
        d = fock.commutator_defect(n_max)
        ideal = np.diag([1.0] * n_max + [-float(n_max)])
        assert np.max(np.abs(d - ideal)) < 1e-14

    def test_against_matrix_product_oracle(self):
        n_max = 5
        a = np.zeros((n_max + 1, n_max + 1))
        for n in range(1, n_max + 1):
            a[n - 1, n] = np.sqrt(n)
        oracle = a @ a.T - a.T @ a
        assert np.max(np.abs(fock.commutator_defect(n_max) - oracle)) < 1e-15


class TestStates:
    def test_number_state_occupation_bounds(self):
        with pytest.raises(ValueError):
            fock.number_state([M1], [5], 4)
        with pytest.raises(ValueError):
            fock.number_state([M1, M3], [1], 4)

    def test_number_state_is_unit_norm(self):
        s = fock.number_state([M1, M3], [2, 0], 4)
        assert s.norm() == pytest.approx(1.0, rel=1e-15)
        assert fock.number_expectation(s, M1) == pytest.approx(2.0, rel=1e-14)
        assert fock.number_expectation(s, M3) == 0.0

    def test_coherent_statistics(self):
        alpha = 0.7 - 0.4j
        s = fock.coherent_state(M1, alpha, 20)
        p = np.abs(s.amplitudes) ** 2
        mean = abs(alpha) ** 2
        assert p[0] == pytest.approx(np.exp(-mean), rel=1e-12)
        assert np.sum(np.arange(21) * p) == pytest.approx(mean, rel=1e-12)
        assert np.sum(p) == pytest.approx(1.0, abs=1e-12)
        assert s.truncation_loss == pytest.approx(1.0 - np.sum(p), abs=1e-15)

    def test_coherent_eigenvector_property(self):
        # a|alpha> = alpha|alpha> away from the truncation edge
        alpha = 0.9 + 0.3j
        s = fock.coherent_state(M1, alpha, 20)
        lowered = fock.ladder_lower(s, M1)
        resid = lowered.amplitudes - alpha * s.amplitudes
        assert np.linalg.norm(resid[:18]) < 1e-8

    def test_coherent_warns_when_truncation_tight(self):
        with pytest.warns(UserWarning):
            fock.coherent_state(M1, 3.0, 20)

    def test_vacuum(self):
        s = fock.vacuum_state([M1, M2, M3], 2)
        assert s.amplitudes[0, 0, 0] == 1.0
        assert s.norm() == 1.0


class TestTensorProduct:
    def test_outer_product_and_ordering(self):
        s1 = fock.coherent_state(M3, 0.5, 3)
        s2 = fock.number_state([M1], [2], 3)
        prod = fock.tensor_product(s1, s2)
        assert prod.modes == (M1, M3)
        # amplitude of |n1=2, n3=k> is s2[2] * s1[k]
        for k in range(4):
            assert prod.amplitudes[2, k] == pytest.approx(
                s2.amplitudes[2] * s1.amplitudes[k], rel=1e-14)

    def test_rejects_shared_modes(self):
        s1 = fock.number_state([M1], [1], 2)
        s2 = fock.number_state([M1], [0], 2)
        with pytest.raises(ValueError):
            fock.tensor_product(s1, s2)

    def test_loss_combines(self):
        s1 = fock.coherent_state(M1, 1.0, 4)
        s2 = fock.coherent_state(M3, 1.0, 4)
        prod = fock.tensor_product(s1, s2)
        expect = 1.0 - (1.0 - s1.truncation_loss) * (1.0 - s2.truncation_loss)
        assert prod.truncation_loss == pytest.approx(expect, rel=1e-12)


class TestObservables:
    def test_inner_product_conjugate_linear_first(self):
        s = fock.number_state([M1], [1], 3)
        scaled = fock.FockState(s.modes, 3, 2j * s.amplitudes)
        assert fock.inner_product(scaled, s) == pytest.approx(-2j)
        assert fock.inner_product(s, scaled) == pytest.approx(2j)

    def test_coincidence_on_split_photon_vanishes(self):
        s10 = fock.number_state([M1, M3], [1, 0], 3)
        s01 = fock.number_state([M1, M3], [0, 1], 3)
        split = fock.FockState(s10.modes, 3,
                               (s10.amplitudes + s01.amplitudes) / np.sqrt(2.0))
        assert fock.coincidence_probability(split, M1, M3) == 0.0

    def test_coincidence_on_two_photon_state(self):
        s = fock.number_state([M1, M3], [1, 1], 3)
        assert fock.coincidence_probability(s, M1, M3) == pytest.approx(1.0)

    def test_coincidence_identical_modes_rejected(self):
        s = fock.number_state([M1], [1], 3)
        with pytest.raises(ValueError):
            fock.coincidence_probability(s, M1, M1)

    def test_normalize(self):
        s = fock.FockState((M1,), 2, np.array([3.0, 4.0, 0.0], dtype=complex))
        n = s.normalize()
        assert n.norm() == pytest.approx(1.0, rel=1e-15)
        assert n.amplitudes[0] == pytest.approx(0.6)
