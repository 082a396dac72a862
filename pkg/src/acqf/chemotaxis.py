"""The motivating scenario: a bacterium choosing steps on a 1-D lattice.

The world is a clipped linear nutrient field c(x) = max(0, c0 + g*x).
Each step the organism is primed toward the neighbouring site with more
nutrient, one measurement channel realizes the decision, and the organism
moves one site right (macro R) or left (macro L).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .agents import AgentPolicy, ChannelHistory, DecisionEvent, MacroChoice, decide
from .pool import Channel, Pool, PoolConfig, apply_measurement, init_pool, select_pair, step_flux


@dataclass(frozen=True)
class World:
    """c(x) = max(0, c0 + gradient * x); c0 must be non-negative."""

    c0: float
    gradient: float

    def __post_init__(self) -> None:
        if self.c0 < 0.0:
            raise ValueError(f"c0 must be non-negative, got {self.c0!r}")

    def concentration(self, position: int) -> float:
        return max(0.0, self.c0 + self.gradient * position)


@dataclass
class Bacterium:
    position: int
    pool: Pool
    policy: AgentPolicy
    history: ChannelHistory = field(default_factory=ChannelHistory)


@dataclass(frozen=True)
class Trajectory:
    positions: tuple[int, ...]
    events: tuple[DecisionEvent, ...]

    def __post_init__(self) -> None:
        if len(self.positions) != len(self.events) + 1:
            raise ValueError("a trajectory holds one more position than events")


def prime(world: World, position: int, rng: np.random.Generator) -> MacroChoice:
    """Intent from the local gradient: toward the richer neighbour site.

    Exact ties are broken by a fair coin from the run's generator (draw
    below one half means R), so a flat world gives an unbiased intent.
    """
    right = world.concentration(position + 1)
    left = world.concentration(position - 1)
    if right > left:
        return MacroChoice.R
    if left > right:
        return MacroChoice.L
    return MacroChoice.R if float(rng.random()) < 0.5 else MacroChoice.L


def run_scenario(
    world: World,
    bacterium: Bacterium,
    steps: int,
    config: PoolConfig,
    rng: np.random.Generator,
) -> Trajectory:
    """Advance the bacterium `steps` moves, logging every decision.

    Step order: churn, prime, select channel, Born lookup, decide, apply
    collapse, move. The bacterium is mutated in place and the full path
    (including the starting site) is returned.
    """
    if steps < 1:
        raise ValueError(f"steps must be at least 1, got {steps!r}")
    pool = bacterium.pool
    policy = bacterium.policy
    history = bacterium.history
    positions = [bacterium.position]
    events = []
    for step in range(steps):
        step_flux(pool, config, rng)
        intent = prime(world, bacterium.position, rng)
        i, k = select_pair(pool, config, rng)
        channel = Channel(i, pool.labels[int(pool.label_idx[i])], pool.observable_labels[k])
        p_plus = float(pool.born_plus[pool.label_idx[i], k])
        event = decide(policy, intent, channel, p_plus, history, rng, step)
        apply_measurement(pool, channel, event.outcome)
        bacterium.position += 1 if event.macro is MacroChoice.R else -1
        positions.append(bacterium.position)
        events.append(event)
    return Trajectory(tuple(positions), tuple(events))


def make_bacterium(
    config: PoolConfig,
    policy: AgentPolicy,
    rng: np.random.Generator,
    position: int = 0,
) -> Bacterium:
    return Bacterium(position=position, pool=init_pool(config, rng), policy=policy)


def drift_statistic(trajectory: Trajectory) -> tuple[float, float]:
    """(mean step, standard error of the mean) over the per-step moves."""
    steps = np.diff(np.asarray(trajectory.positions, dtype=np.float64))
    n = steps.size
    mean = float(steps.mean())
    if n < 2:
        return mean, 0.0
    return mean, float(steps.std(ddof=1) / math.sqrt(n))
