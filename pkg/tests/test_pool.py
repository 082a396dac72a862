"""Tests for the churning pool of micro-channels."""

from __future__ import annotations

import math

import numpy as np
import pytest

from acqf.bloch import (
    Direction3,
    Observable,
    Outcome,
    born_probability,
    make_ready_frame,
    measurement_frame,
)
from acqf.pool import (
    Channel,
    Pool,
    PoolConfig,
    Scheduler,
    UnknownObservable,
    UnknownSystem,
    alignment_matrix,
    apply_measurement,
    channel_born_plus,
    init_pool,
    select_channel,
    select_pair,
    step_flux,
)
from acqf.special import chi2_sf

YAW = PITCH = math.pi / 4


def default_config(**kw) -> PoolConfig:
    base = dict(n_systems=12, ready_frame=make_ready_frame(YAW, PITCH))
    base.update(kw)
    return PoolConfig(**base)


class TestPoolConfig:
    def test_requires_positive_systems(self):
        with pytest.raises(ValueError):
            default_config(n_systems=0)

    @pytest.mark.parametrize("rate", [-0.1, 1.1])
    def test_churn_rate_range(self, rate):
        with pytest.raises(ValueError):
            default_config(churn_rate=rate)

    def test_requires_some_ready_description(self):
        with pytest.raises(ValueError):
            PoolConfig(n_systems=3)

    def test_observable_subset_must_be_known(self):
        with pytest.raises(ValueError):
            default_config(observable_labels=("x", "w"))

    def test_observable_subset_no_duplicates(self):
        with pytest.raises(ValueError):
            default_config(observable_labels=("x", "x"))

    def test_observable_subset_nonempty(self):
        with pytest.raises(ValueError):
            default_config(observable_labels=())

    def test_ready_set_plain(self):
        cfg = default_config()
        labels = [s.label for s in cfg.ready_set()]
        assert labels == ["alpha", "beta", "gamma"]

    def test_ready_set_symmetrized(self):
        cfg = default_config(symmetrize=True)
        ready = cfg.ready_set()
        assert [s.label for s in ready] == [
            "alpha", "beta", "gamma", "alpha-", "beta-", "gamma-",
        ]
        for fwd, rev in zip(ready[:3], ready[3:]):
            assert rev.axis.as_tuple() == (-fwd.axis).as_tuple()

    def test_explicit_ready_states(self):
        cfg = PoolConfig(
            n_systems=4,
            ready_states=(Observable(Direction3(0.0, 0.0, 1.0), "up"),),
        )
        assert [s.label for s in cfg.ready_set()] == ["up"]

    def test_duplicate_ready_labels_rejected(self):
        pair = (
            Observable(Direction3(0.0, 0.0, 1.0), "up"),
            Observable(Direction3(1.0, 0.0, 0.0), "up"),
        )
        with pytest.raises(ValueError):
            PoolConfig(n_systems=2, ready_states=pair)

    def test_observables_default_order(self):
        labels = [o.label for o in default_config().observables()]
        assert labels == ["x", "y", "z"]

    def test_observables_subset_order(self):
        cfg = default_config(observable_labels=("z", "x"))
        assert [o.label for o in cfg.observables()] == ["z", "x"]


class TestInitPool:
    def test_all_systems_start_ready(self):
        cfg = default_config(n_systems=30)
        pool = init_pool(cfg, np.random.default_rng(0))
        assert pool.n == 30
        assert all(pool.is_ready(i) for i in range(30))

    def test_states_match_labels(self):
        cfg = default_config(n_systems=50)
        pool = init_pool(cfg, np.random.default_rng(1))
        by_label = {s.label: s.axis for s in cfg.ready_set()}
        for i in range(50):
            assert pool.state_of(i).as_tuple() == by_label[pool.label_of(i)].as_tuple()

    def test_initial_labels_roughly_uniform(self):
        cfg = default_config(n_systems=9000)
        pool = init_pool(cfg, np.random.default_rng(7))
        counts = pool.label_counts()
        # Outcome labels are tabulated too; none are occupied yet.
        for lab in ("x+", "x-", "y+", "y-", "z+", "z-"):
            assert counts[lab] == 0
        for lab in ("alpha", "beta", "gamma"):
            assert abs(counts[lab] - 3000) < 150  # within 5 percent

    def test_initial_labels_pass_chi2(self):
        cfg = default_config(n_systems=9000, symmetrize=True)
        pool = init_pool(cfg, np.random.default_rng(11))
        counts = pool.label_counts()
        ready_labels = [s.label for s in cfg.ready_set()]
        expected = 9000.0 / len(ready_labels)
        stat = sum((counts[lab] - expected) ** 2 / expected for lab in ready_labels)
        assert chi2_sf(stat, len(ready_labels) - 1) > 1e-3


class TestStepFlux:
    def test_zero_rate_freezes_pool(self):
        cfg = default_config(churn_rate=0.0)
        rng = np.random.default_rng(3)
        pool = init_pool(cfg, rng)
        before = [pool.label_of(i) for i in range(pool.n)]
        for _ in range(5):
            step_flux(pool, cfg, rng)
        assert [pool.label_of(i) for i in range(pool.n)] == before

    def test_full_rate_resets_every_outcome_label(self):
        cfg = default_config(n_systems=40)
        rng = np.random.default_rng(4)
        pool = init_pool(cfg, rng)
        for i in range(pool.n):
            apply_measurement(pool, Channel(i, pool.label_of(i), "x"), Outcome.PLUS)
        assert not any(pool.is_ready(i) for i in range(pool.n))
        step_flux(pool, cfg, rng)
        assert all(pool.is_ready(i) for i in range(pool.n))

    def test_partial_rate_recycles_expected_fraction(self):
        cfg = default_config(n_systems=4000, churn_rate=0.5)
        rng = np.random.default_rng(5)
        pool = init_pool(cfg, rng)
        for i in range(pool.n):
            apply_measurement(pool, Channel(i, pool.label_of(i), "z"), Outcome.MINUS)
        step_flux(pool, cfg, rng)
        ready = sum(pool.is_ready(i) for i in range(pool.n))
        # Binomial(4000, 0.5): three sigma is about 95.
        assert abs(ready - 2000) < 100

    def test_churned_labels_are_memoryless(self):
        # After a full churn the label histogram should be uniform over the
        # ready set regardless of what the pool held before.
        cfg = default_config(n_systems=9000)
        rng = np.random.default_rng(6)
        pool = init_pool(cfg, rng)
        for i in range(pool.n):
            apply_measurement(pool, Channel(i, pool.label_of(i), "y"), Outcome.PLUS)
        step_flux(pool, cfg, rng)
        counts = pool.label_counts()
        stat = sum(
            (counts[lab] - 3000.0) ** 2 / 3000.0 for lab in ("alpha", "beta", "gamma")
        )
        assert chi2_sf(stat, 2) > 1e-3

    def test_pool_size_never_changes(self):
        cfg = default_config(n_systems=17, churn_rate=0.3)
        rng = np.random.default_rng(8)
        pool = init_pool(cfg, rng)
        for _ in range(50):
            step_flux(pool, cfg, rng)
            assert pool.n == 17

    def test_states_stay_unit_norm(self):
        cfg = default_config(n_systems=25, churn_rate=0.4)
        rng = np.random.default_rng(9)
        pool = init_pool(cfg, rng)
        for step in range(20):
            step_flux(pool, cfg, rng)
            i, k = select_pair(pool, cfg, rng)
            ch = Channel(i, pool.label_of(i), cfg.observables()[k].label)
            outcome = Outcome.PLUS if rng.random() < 0.5 else Outcome.MINUS
            apply_measurement(pool, ch, outcome)
            for j in range(pool.n):
                assert pool.state_of(j).norm() == pytest.approx(1.0, abs=1e-12)


class TestSelection:
    def test_uniform_pair_frequencies(self):
        cfg = default_config(n_systems=6)
        rng = np.random.default_rng(10)
        pool = init_pool(cfg, rng)
        counts = np.zeros((6, 3), dtype=int)
        draws = 36_000
        for _ in range(draws):
            i, k = select_pair(pool, cfg, rng)
            counts[i, k] += 1
        expected = draws / counts.size
        stat = ((counts - expected) ** 2 / expected).sum()
        assert chi2_sf(stat, counts.size - 1) > 1e-3

    def test_round_robin_covers_all_pairs_in_one_period(self):
        cfg = default_config(n_systems=5, scheduler=Scheduler.ROUND_ROBIN)
        rng = np.random.default_rng(11)
        pool = init_pool(cfg, rng)
        seen = [select_pair(pool, cfg, rng) for _ in range(15)]
        assert len(set(seen)) == 15
        assert seen == [(i, k) for i in range(5) for k in range(3)]

    def test_round_robin_observable_varies_fastest(self):
        cfg = default_config(n_systems=2, scheduler=Scheduler.ROUND_ROBIN)
        rng = np.random.default_rng(12)
        pool = init_pool(cfg, rng)
        first_six = [select_pair(pool, cfg, rng) for _ in range(6)]
        assert first_six == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]
        # Period N*K: the next draw restarts the cycle.
        assert select_pair(pool, cfg, rng) == (0, 0)

    def test_select_channel_labels(self):
        cfg = default_config(n_systems=3)
        rng = np.random.default_rng(13)
        pool = init_pool(cfg, rng)
        ch = select_channel(pool, cfg, rng)
        assert ch.ready_label == pool.label_of(ch.system_id)
        assert ch.observable_label in ("x", "y", "z")
        assert ch.key() == (ch.system_id, ch.ready_label, ch.observable_label)


class TestChannelBornPlus:
    def test_matches_direct_born_probability(self):
        cfg = default_config(n_systems=10, symmetrize=True)
        rng = np.random.default_rng(14)
        pool = init_pool(cfg, rng)
        axes = {o.label: o.axis for o in cfg.observables()}
        for i in range(pool.n):
            for lab, axis in axes.items():
                ch = Channel(i, pool.label_of(i), lab)
                direct, _ = born_probability(pool.state_of(i), axis)
                assert abs(channel_born_plus(pool, ch) - direct) < 1e-12

    def test_constant_per_channel_key(self):
        cfg = default_config(n_systems=4)
        rng = np.random.default_rng(15)
        pool = init_pool(cfg, rng)
        ch = select_channel(pool, cfg, rng)
        p = channel_born_plus(pool, ch)
        # Churn the pool; the same key must keep the same probability
        # whenever the system returns to that ready label.
        for _ in range(20):
            step_flux(pool, cfg, rng)
            if pool.label_of(ch.system_id) == ch.ready_label:
                assert channel_born_plus(pool, ch) == p

    def test_unknown_system(self):
        cfg = default_config(n_systems=2)
        pool = init_pool(cfg, np.random.default_rng(16))
        with pytest.raises(UnknownSystem):
            channel_born_plus(pool, Channel(99, "alpha", "x"))

    def test_unknown_observable(self):
        cfg = default_config(n_systems=2)
        pool = init_pool(cfg, np.random.default_rng(17))
        with pytest.raises(UnknownObservable):
            channel_born_plus(pool, Channel(0, pool.label_of(0), "q"))


class TestApplyMeasurement:
    def test_collapse_to_plus_axis(self):
        cfg = default_config(n_systems=3)
        pool = init_pool(cfg, np.random.default_rng(18))
        ch = Channel(1, pool.label_of(1), "x")
        apply_measurement(pool, ch, Outcome.PLUS)
        assert pool.state_of(1).as_tuple() == (1.0, 0.0, 0.0)
        assert pool.label_of(1) == "x+"
        assert not pool.is_ready(1)

    def test_collapse_to_minus_axis(self):
        cfg = default_config(n_systems=3)
        pool = init_pool(cfg, np.random.default_rng(19))
        ch = Channel(2, pool.label_of(2), "z")
        apply_measurement(pool, ch, Outcome.MINUS)
        assert pool.state_of(2).as_tuple() == (0.0, 0.0, -1.0)
        assert pool.label_of(2) == "z-"

    def test_eigenstate_repeats_until_churned(self):
        cfg = default_config(n_systems=1, churn_rate=0.0)
        rng = np.random.default_rng(20)
        pool = init_pool(cfg, rng)
        ch = Channel(0, pool.label_of(0), "y")
        apply_measurement(pool, ch, Outcome.PLUS)
        follow_up = Channel(0, pool.label_of(0), "y")
        # Measuring the same observable on its own eigenstate is certain.
        assert channel_born_plus(pool, follow_up) == 1.0

    def test_unknown_system_rejected(self):
        cfg = default_config(n_systems=2)
        pool = init_pool(cfg, np.random.default_rng(21))
        with pytest.raises(UnknownSystem):
            apply_measurement(pool, Channel(5, "alpha", "x"), Outcome.PLUS)

    def test_unknown_observable_rejected(self):
        cfg = default_config(n_systems=2)
        pool = init_pool(cfg, np.random.default_rng(22))
        with pytest.raises(UnknownObservable):
            apply_measurement(pool, Channel(0, pool.label_of(0), "nope"), Outcome.PLUS)


class TestAlignmentMatrix:
    def test_shape_and_values(self):
        cfg = default_config()
        mat = alignment_matrix(cfg)
        ready = cfg.ready_set()
        obs = cfg.observables()
        assert mat.shape == (3, 3)
        for r, s in enumerate(ready):
            for c, o in enumerate(obs):
                assert mat[r, c] == pytest.approx(s.axis.dot(o.axis), abs=1e-15)

    def test_symmetrized_rows_cancel_exactly(self):
        mat = alignment_matrix(default_config(symmetrize=True))
        assert mat.shape == (6, 3)
        assert np.all(mat[:3] + mat[3:] == 0.0)


class TestPoolIntrospection:
    def test_label_counts_total(self):
        cfg = default_config(n_systems=21)
        pool = init_pool(cfg, np.random.default_rng(23))
        assert sum(pool.label_counts().values()) == 21

    def test_system_accessor(self):
        cfg = default_config(n_systems=4)
        pool = init_pool(cfg, np.random.default_rng(24))
        sys2 = pool.system(2)
        assert sys2.id == 2
        assert sys2.state.as_tuple() == pool.state_of(2).as_tuple()
        assert len(pool.systems()) == 4
        with pytest.raises(UnknownSystem):
            pool.system(-1)

    def test_single_observable_pool(self):
        cfg = PoolConfig(
            n_systems=5,
            ready_states=(Observable(Direction3(0.0, 0.0, 1.0), "up"),),
            observable_labels=("z",),
        )
        rng = np.random.default_rng(25)
        pool = init_pool(cfg, rng)
        ch = select_channel(pool, cfg, rng)
        assert ch.observable_label == "z"
        assert channel_born_plus(pool, ch) == 1.0

    def test_measurement_frame_is_lab_frame_by_default(self):
        lab = measurement_frame()
        cfg = default_config()
        assert cfg.measurement_frame.labels == lab.labels
        for a, b in zip(cfg.measurement_frame.axes, lab.axes):
            assert a.as_tuple() == b.as_tuple()
