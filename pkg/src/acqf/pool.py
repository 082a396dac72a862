"""A churning pool of spin-1/2 systems and the channels defined on it.

Each system carries one Bloch direction. Between measurements the flux
re-prepares a random subset of systems into the ready set (the ready-frame
axes, optionally with their antipodes). A channel is the triple
(system id, ready label, observable label); the Born plus-probability is a
function of that triple alone, which is what makes per-channel statistics
auditable.

Post-measurement states carry outcome labels such as "x+" and are not part
of the ready set; a measured system only becomes ready again when the flux
re-prepares it.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .bloch import Direction3, Frame, Observable, Outcome, measurement_frame

_LAB_FRAME = measurement_frame()


class UnknownSystem(KeyError):
    """Raised when a channel names a system id outside the pool."""


class UnknownObservable(KeyError):
    """Raised when a channel names an observable the pool does not measure."""


class Scheduler(Enum):
    UNIFORM = "uniform"
    ROUND_ROBIN = "round_robin"


@dataclass(frozen=True)
class QuantumSystem:
    """Read-only view of one pool member."""

    id: int
    state: Direction3


@dataclass(frozen=True)
class Channel:
    """Identity of one measurement context."""

    system_id: int
    ready_label: str
    observable_label: str

    def key(self) -> tuple[int, str, str]:
        return (self.system_id, self.ready_label, self.observable_label)


@dataclass(frozen=True)
class PoolConfig:
    """Static description of a pool.

    The ready set is normally the three ready-frame axes (six with
    symmetrize); ready_states may instead list explicit labelled
    directions, which is how degenerate toy pools (down to a single ready
    state) are expressed. observable_labels selects a subset of the
    measurement frame.
    """

    n_systems: int
    ready_frame: Frame | None = None
    measurement_frame: Frame = _LAB_FRAME
    churn_rate: float = 1.0
    symmetrize: bool = False
    scheduler: Scheduler = Scheduler.UNIFORM
    observable_labels: tuple[str, ...] | None = None
    ready_states: tuple[Observable, ...] | None = None

    def __post_init__(self) -> None:
        if self.n_systems < 1:
            raise ValueError(f"n_systems must be at least 1, got {self.n_systems!r}")
        if not 0.0 <= self.churn_rate <= 1.0:
            raise ValueError(f"churn_rate must lie in [0, 1], got {self.churn_rate!r}")
        if self.ready_frame is None and self.ready_states is None:
            raise ValueError("either ready_frame or ready_states is required")
        if self.observable_labels is not None:
            if not self.observable_labels:
                raise ValueError("at least one observable is required")
            known = self.measurement_frame.labels
            for lab in self.observable_labels:
                if lab not in known:
                    raise ValueError(f"unknown observable label {lab!r}")
            if len(set(self.observable_labels)) != len(self.observable_labels):
                raise ValueError("duplicate observable labels")
        labels = [s.label for s in self.ready_set()]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate ready-state labels")

    def observables(self) -> tuple[Observable, ...]:
        table = {o.label: o for o in self.measurement_frame.observables()}
        if self.observable_labels is None:
            return tuple(table[lab] for lab in self.measurement_frame.labels)
        return tuple(table[lab] for lab in self.observable_labels)

    def ready_set(self) -> tuple[Observable, ...]:
        if self.ready_states is not None:
            base = self.ready_states
        else:
            base = self.ready_frame.observables()
        if self.symmetrize:
            return base + tuple(Observable(-s.axis, s.label + "-") for s in base)
        return base


class Pool:
    """Mutable state of one simulated pool. Owned by a single run.

    States live in a fixed label table: indices below ready_count are the
    ready set, the rest are the outcome states of each observable in
    order (+ then -). A system's state is just its index into the table,
    and born_plus[L, K] caches the plus-probability of every (label,
    observable) pair, so the hot path never touches vector arithmetic.
    """

    __slots__ = (
        "config",
        "labels",
        "directions",
        "ready_count",
        "label_idx",
        "born_plus",
        "observable_labels",
        "_rr_cursor",
    )

    def __init__(self, config: PoolConfig, label_idx: np.ndarray) -> None:
        self.config = config
        ready = config.ready_set()
        obs = config.observables()

        labels = [s.label for s in ready]
        dirs = [s.axis.as_tuple() for s in ready]
        for ob in obs:
            for sign, suffix in ((1.0, "+"), (-1.0, "-")):
                labels.append(ob.label + suffix)
                dirs.append((sign * ob.axis.x, sign * ob.axis.y, sign * ob.axis.z))

        self.labels = tuple(labels)
        self.directions = np.array(dirs, dtype=np.float64)
        self.ready_count = len(ready)
        self.label_idx = label_idx
        self.observable_labels = tuple(ob.label for ob in obs)
        axes = np.array([ob.axis.as_tuple() for ob in obs], dtype=np.float64)
        self.born_plus = np.clip(0.5 * (1.0 + self.directions @ axes.T), 0.0, 1.0)
        self._rr_cursor = 0

    @property
    def n(self) -> int:
        return int(self.label_idx.shape[0])

    def system(self, system_id: int) -> QuantumSystem:
        return QuantumSystem(system_id, self.state_of(system_id))

    def systems(self) -> tuple[QuantumSystem, ...]:
        return tuple(self.system(i) for i in range(self.n))

    def state_of(self, system_id: int) -> Direction3:
        self._check_system(system_id)
        x, y, z = self.directions[self.label_idx[system_id]]
        return Direction3(float(x), float(y), float(z))

    def label_of(self, system_id: int) -> str:
        self._check_system(system_id)
        return self.labels[int(self.label_idx[system_id])]

    def is_ready(self, system_id: int) -> bool:
        self._check_system(system_id)
        return int(self.label_idx[system_id]) < self.ready_count

    def label_counts(self) -> dict[str, int]:
        out = dict.fromkeys(self.labels, 0)
        values, counts = np.unique(self.label_idx, return_counts=True)
        for v, c in zip(values, counts):
            out[self.labels[int(v)]] = int(c)
        return out

    def _check_system(self, system_id: int) -> None:
        if not 0 <= system_id < self.n:
            raise UnknownSystem(f"system id {system_id!r} outside pool of {self.n}")

    def _observable_index(self, label: str) -> int:
        try:
            return self.observable_labels.index(label)
        except ValueError:
            raise UnknownObservable(f"observable {label!r} not measured by this pool") from None


def init_pool(config: PoolConfig, rng: np.random.Generator) -> Pool:
    """Fresh pool with every system drawn uniformly from the ready set."""
    n_ready = len(config.ready_set())
    label_idx = rng.integers(0, n_ready, size=config.n_systems)
    return Pool(config, label_idx)


def step_flux(pool: Pool, config: PoolConfig, rng: np.random.Generator) -> Pool:
    """One churn tick: each system is independently re-prepared with
    probability churn_rate into a uniform draw from the ready set.

    Draw order is fixed: one uniform per system (skipped when churn_rate
    is 1), then one ready-set index per re-prepared system.
    """
    rate = config.churn_rate
    if rate <= 0.0:
        return pool
    if rate >= 1.0:
        pool.label_idx[:] = rng.integers(0, pool.ready_count, size=pool.n)
        return pool
    mask = rng.random(pool.n) < rate
    hits = int(mask.sum())
    if hits:
        pool.label_idx[mask] = rng.integers(0, pool.ready_count, size=hits)
    return pool


def select_pair(pool: Pool, config: PoolConfig, rng: np.random.Generator) -> tuple[int, int]:
    """(system index, observable index) for the next measurement.

    Uniform scheduling draws the system then the observable; round robin
    consumes no randomness and cycles (system, observable) pairs in
    lexicographic order, observable fastest.
    """
    k_obs = len(pool.observable_labels)
    if config.scheduler is Scheduler.UNIFORM:
        i = int(rng.integers(pool.n))
        k = int(rng.integers(k_obs))
        return i, k
    cursor = pool._rr_cursor
    pool._rr_cursor = (cursor + 1) % (pool.n * k_obs)
    return (cursor // k_obs) % pool.n, cursor % k_obs


def select_channel(pool: Pool, config: PoolConfig, rng: np.random.Generator) -> Channel:
    i, k = select_pair(pool, config, rng)
    return Channel(i, pool.labels[int(pool.label_idx[i])], pool.observable_labels[k])


def channel_born_plus(pool: Pool, channel: Channel) -> float:
    """Born plus-probability of a channel, from its labels alone."""
    pool._check_system(channel.system_id)
    try:
        label_i = pool.labels.index(channel.ready_label)
    except ValueError:
        raise KeyError(f"unknown state label {channel.ready_label!r}") from None
    k = pool._observable_index(channel.observable_label)
    return float(pool.born_plus[label_i, k])


def apply_measurement(pool: Pool, channel: Channel, outcome: Outcome) -> Pool:
    """Collapse the channel's system onto the outcome state.

    Only the system id and observable label are consulted; the post state
    is the observable axis (plus) or its antipode (minus), carrying an
    outcome label, so the system leaves the ready set until the flux
    re-prepares it.
    """
    pool._check_system(channel.system_id)
    k = pool._observable_index(channel.observable_label)
    slot = pool.ready_count + 2 * k + (0 if outcome is Outcome.PLUS else 1)
    pool.label_idx[channel.system_id] = slot
    return pool


def alignment_matrix(config: PoolConfig) -> np.ndarray:
    """Dot products of every ready direction with every observable axis."""
    dirs = np.array([s.axis.as_tuple() for s in config.ready_set()], dtype=np.float64)
    axes = np.array([o.axis.as_tuple() for o in config.observables()], dtype=np.float64)
    return dirs @ axes.T
