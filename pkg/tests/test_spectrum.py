import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fournls.spectrum import (
    DyadicBlock,
    FileFormatError,
    FourierState,
    Trajectory,
    analyze,
    blocks_covering,
    hs_norm,
    load_state,
    load_trajectory,
    odd_padded_grid_size,
    padded_grid_size,
    project_dyadic,
    project_leq,
    save_state,
    save_trajectory,
    synthesize,
)


def random_state(n_max, seed=0, norm=None):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=2 * n_max + 1) + 1j * rng.normal(size=2 * n_max + 1)
    if norm is not None:
        c *= norm / np.linalg.norm(c)
    return FourierState(n_max, c)


coeff_strategy = st.integers(min_value=0, max_value=6).flatmap(
    lambda n: st.lists(
        st.tuples(
            st.floats(-10, 10, allow_nan=False),
            st.floats(-10, 10, allow_nan=False),
        ),
        min_size=2 * n + 1,
        max_size=2 * n + 1,
    ).map(lambda pairs: FourierState(n, np.array([complex(a, b) for a, b in pairs])))
)


class TestFourierState:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            FourierState(2, np.zeros(4, dtype=complex))
        with pytest.raises(ValueError):
            FourierState(-1, np.zeros(1, dtype=complex))

    def test_rejects_nonfinite(self):
        c = np.zeros(3, dtype=complex)
        c[1] = np.nan
        with pytest.raises(ValueError):
            FourierState(1, c)

    def test_coeffs_immutable(self):
        u = FourierState.zeros(2)
        with pytest.raises(ValueError):
            u.coeffs[0] = 1.0

    def test_from_modes_and_mode(self):
        u = FourierState.from_modes(3, {-2: 1j, 3: 2.0})
        assert u.mode(-2) == 1j
        assert u.mode(3) == 2.0
        assert u.mode(0) == 0.0
        assert u.mode(5) == 0.0  # outside truncation -> zero

    def test_from_modes_out_of_range(self):
        with pytest.raises(ValueError):
            FourierState.from_modes(2, {3: 1.0})

    def test_pad_truncate_round_trip(self):
        u = random_state(4, seed=1)
        assert u.pad_to(9).truncate_to(4).allclose(u)

    def test_truncate_drops_high_modes(self):
        u = FourierState.from_modes(3, {3: 1.0, 1: 2.0})
        v = u.truncate_to(1)
        assert v.n_max == 1
        assert v.mode(1) == 2.0
        assert v.l2_norm() == 2.0

    def test_pad_to_smaller_rejected(self):
        with pytest.raises(ValueError):
            random_state(4).pad_to(2)

    @given(coeff_strategy)
    @settings(max_examples=40, deadline=None)
    def test_parseval(self, u):
        m = 2 * u.n_max + 1
        grid = synthesize(u, m)
        assert np.isclose(np.sum(np.abs(grid) ** 2) / m, u.l2_norm() ** 2,
                          rtol=1e-12, atol=1e-12)

    @given(coeff_strategy, st.integers(min_value=0, max_value=8))
    @settings(max_examples=40, deadline=None)
    def test_analyze_synthesize_round_trip(self, u, extra):
        m = 2 * u.n_max + 1 + extra
        assert analyze(synthesize(u, m), u.n_max).allclose(u, atol=1e-12)

    def test_analyze_grid_too_short(self):
        with pytest.raises(ValueError):
            analyze(np.zeros(4, dtype=complex), 2)


class TestDyadicBlocks:
    def test_level_must_be_power_of_two(self):
        for bad in (0, 3, 6, -2):
            with pytest.raises(ValueError):
                DyadicBlock(bad)

    def test_unit_block(self):
        b = DyadicBlock(1)
        assert all(b.contains(n) for n in (-1, 0, 1))
        assert not b.contains(2)

    def test_annulus(self):
        b = DyadicBlock(4)
        assert b.contains(2) and b.contains(8) and b.contains(-5)
        assert not b.contains(1) and not b.contains(9) and not b.contains(0)

    def test_mask_matches_contains(self):
        b = DyadicBlock(8)
        mask = b.mask(20)
        for i, n in enumerate(range(-20, 21)):
            assert mask[i] == b.contains(n)

    @given(st.integers(min_value=0, max_value=200))
    @settings(max_examples=30, deadline=None)
    def test_blocks_cover_every_frequency(self, n_max):
        blocks = blocks_covering(n_max)
        for n in range(-n_max, n_max + 1):
            hits = sum(b.contains(n) for b in blocks)
            # closed intervals [N/2, 2N] triple up exactly at powers of two
            assert 1 <= hits <= 3

    def test_project_dyadic_partition(self):
        u = random_state(10, seed=2)
        b = DyadicBlock(4)
        v = project_dyadic(u, b)
        for n in range(-10, 11):
            expected = u.mode(n) if b.contains(n) else 0.0
            assert v.mode(n) == expected


class TestProjections:
    def test_project_leq_idempotent(self):
        u = random_state(6, seed=3)
        assert project_leq(project_leq(u, 3), 3).allclose(project_leq(u, 3))

    def test_project_leq_keeps_radius(self):
        u = random_state(6, seed=3)
        assert project_leq(u, 2).n_max == 6

    def test_hs_norm_s0_is_l2(self):
        u = random_state(5, seed=4)
        assert np.isclose(hs_norm(u, 0.0), u.l2_norm(), rtol=1e-13)

    def test_hs_norm_single_mode(self):
        u = FourierState.from_modes(4, {3: 2.0})
        assert np.isclose(hs_norm(u, 1.0), 2.0 * (1 + 9) ** 0.5)


class TestGridSizes:
    @given(st.integers(min_value=0, max_value=300))
    @settings(max_examples=50, deadline=None)
    def test_padded_grid_alias_free(self, n_max):
        assert padded_grid_size(n_max) >= 4 * n_max + 1
        m = odd_padded_grid_size(n_max)
        assert m >= 4 * n_max + 1 and m % 2 == 1


class TestTrajectory:
    def test_requires_nonzero_dt(self):
        with pytest.raises(ValueError):
            Trajectory(0.0, 0.0, (FourierState.zeros(1),))

    def test_requires_shared_n_max(self):
        with pytest.raises(ValueError):
            Trajectory(0.0, 0.1, (FourierState.zeros(1), FourierState.zeros(2)))

    def test_times_and_len(self):
        tr = Trajectory(1.0, 0.5, tuple(FourierState.zeros(2) for _ in range(4)))
        assert len(tr) == 4
        assert np.allclose(tr.times, [1.0, 1.5, 2.0, 2.5])

    def test_coeff_array_shape(self):
        tr = Trajectory(0.0, 0.1, tuple(random_state(3, seed=k) for k in range(5)))
        assert tr.coeff_array().shape == (5, 7)


class TestFileFormats:
    def test_state_round_trip_bit_exact(self, tmp_path):
        u = random_state(7, seed=5)
        p = tmp_path / "s.json"
        save_state(u, p)
        v = load_state(p)
        assert v.n_max == u.n_max
        assert np.array_equal(v.coeffs, u.coeffs)

    def test_state_format_field(self, tmp_path):
        p = tmp_path / "s.json"
        save_state(random_state(2), p)
        doc = json.loads(p.read_text())
        assert doc["format"] == "4nls-state/1"

    def test_state_version_mismatch(self, tmp_path):
        p = tmp_path / "s.json"
        save_state(random_state(2), p)
        doc = json.loads(p.read_text())
        doc["format"] = "4nls-state/9"
        p.write_text(json.dumps(doc))
        with pytest.raises(FileFormatError):
            load_state(p)

    def test_state_wrong_coeff_count(self, tmp_path):
        p = tmp_path / "s.json"
        save_state(random_state(2), p)
        doc = json.loads(p.read_text())
        doc["coeffs"] = doc["coeffs"][:-1]
        p.write_text(json.dumps(doc))
        with pytest.raises(FileFormatError):
            load_state(p)

    def test_trajectory_round_trip_bit_exact(self, tmp_path):
        tr = Trajectory(0.0, 1e-3, tuple(random_state(4, seed=k) for k in range(6)))
        p = tmp_path / "t.jsonl"
        save_trajectory(tr, p)
        back = load_trajectory(p)
        assert back.dt == tr.dt and back.t0 == tr.t0 and len(back) == len(tr)
        for a, b in zip(back.states, tr.states):
            assert np.array_equal(a.coeffs, b.coeffs)

    def test_trajectory_corrupt_record_named(self, tmp_path):
        tr = Trajectory(0.0, 1e-3, tuple(random_state(2, seed=k) for k in range(3)))
        p = tmp_path / "t.jsonl"
        save_trajectory(tr, p)
        lines = p.read_text().splitlines()
        lines[2] = "{not json"
        p.write_text("\n".join(lines) + "\n")
        with pytest.raises(FileFormatError):
            load_trajectory(p)
