"""Choice policies: how a macro intent becomes a measurement outcome.

Three policies are provided. Born never interferes with chance. Volitional
overrides the outcome toward the intent with probability bias_beta.
BudgetedVolitional always wants to override (beta = 1) but keeps every
channel's running Plus-frequency inside a Wilson score band around the
channel's Born probability, falling back to honest Born sampling whenever
an override would leave the band. The band is evaluated at the channel's
post-decision trial count, so a forced outcome can never exit it; Born
fallbacks are unconstrained chance and carry no such guarantee.

The macro mapping is fixed: Plus means R, Minus means L.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .bloch import Outcome, sample_outcome
from .pool import Channel, PoolConfig, alignment_matrix
from .special import normal_upper_quantile, wilson_half_width


class MacroChoice(Enum):
    R = "R"
    L = "L"


class PolicyKind(Enum):
    BORN = "born"
    VOLITIONAL = "volitional"
    BUDGETED = "budgeted"


@lru_cache(maxsize=64)
def _band_z(tolerance_delta: float) -> float:
    # Upper quantile at delta per tail: delta = 0.025 gives the familiar
    # two-sided 95% score band (z = 1.95996...).
    return normal_upper_quantile(tolerance_delta)


@dataclass(frozen=True)
class AgentPolicy:
    kind: PolicyKind
    bias_beta: float = 0.0
    tolerance_delta: float = 0.025

    def __post_init__(self) -> None:
        if not 0.0 <= self.bias_beta <= 1.0:
            raise ValueError(f"bias_beta must lie in [0, 1], got {self.bias_beta!r}")
        if not 0.0 < self.tolerance_delta < 0.5:
            raise ValueError(
                f"tolerance_delta must lie in (0, 0.5), got {self.tolerance_delta!r}"
            )

    @property
    def band_z(self) -> float:
        return _band_z(self.tolerance_delta)


@dataclass(frozen=True)
class DecisionEvent:
    step: int
    channel: Channel
    born_p_plus: float
    intent: MacroChoice
    outcome: Outcome
    overridden: bool

    @property
    def macro(self) -> MacroChoice:
        return macro_from_outcome(self.outcome)


class ChannelHistory:
    """Per-channel (plus, total) counts for one run."""

    __slots__ = ("_counts",)

    def __init__(self) -> None:
        self._counts: dict[tuple[int, str, str], list[int]] = {}

    def counts(self, key: tuple[int, str, str]) -> tuple[int, int]:
        c = self._counts.get(key)
        return (c[0], c[1]) if c is not None else (0, 0)

    def record(self, key: tuple[int, str, str], outcome: Outcome) -> None:
        c = self._counts.get(key)
        if c is None:
            c = [0, 0]
            self._counts[key] = c
        c[1] += 1
        if outcome is Outcome.PLUS:
            c[0] += 1

    def __len__(self) -> int:
        return len(self._counts)

    def items(self):
        return self._counts.items()


def outcome_from_macro(choice: MacroChoice) -> Outcome:
    return Outcome.PLUS if choice is MacroChoice.R else Outcome.MINUS


def macro_from_outcome(outcome: Outcome) -> MacroChoice:
    return MacroChoice.R if outcome is Outcome.PLUS else MacroChoice.L


def decide(
    policy: AgentPolicy,
    intent: MacroChoice,
    channel: Channel,
    born_p_plus: float,
    history: ChannelHistory,
    rng: np.random.Generator,
    step: int = 0,
) -> DecisionEvent:
    """Realize one outcome for the channel and record it in the history.

    Draw accounting is part of the determinism contract: Born consumes one
    uniform; Volitional consumes a coin (only when bias_beta > 0) plus one
    uniform if the coin fails; BudgetedVolitional consumes one uniform
    only on fallback.
    """
    if not 0.0 <= born_p_plus <= 1.0:
        raise ValueError(f"born_p_plus out of range: {born_p_plus!r}")
    overridden = False
    if policy.kind is PolicyKind.BORN:
        outcome = sample_outcome(born_p_plus, float(rng.random()))
    elif policy.kind is PolicyKind.VOLITIONAL:
        if policy.bias_beta > 0.0 and float(rng.random()) < policy.bias_beta:
            outcome = outcome_from_macro(intent)
            overridden = True
        else:
            outcome = sample_outcome(born_p_plus, float(rng.random()))
    else:
        n_plus, n_total = history.counts(channel.key())
        if n_total == 0:
            # The first trial on a channel is always honest; a band on
            # zero counts is meaningless.
            outcome = sample_outcome(born_p_plus, float(rng.random()))
        else:
            wanted = outcome_from_macro(intent)
            after = n_total + 1
            forced_freq = (n_plus + (1 if wanted is Outcome.PLUS else 0)) / after
            band = wilson_half_width(born_p_plus, after, policy.band_z)
            if abs(forced_freq - born_p_plus) <= band:
                outcome = wanted
                overridden = True
            else:
                outcome = sample_outcome(born_p_plus, float(rng.random()))
    history.record(channel.key(), outcome)
    return DecisionEvent(step, channel, born_p_plus, intent, outcome, overridden)


def baseline_macro_drift(config: PoolConfig) -> float:
    """Probability of macro R per decision under Born policy with uniform
    scheduling on a fully churned pool.

    Mean over ready directions u and observable axes v of (1 + u.v) / 2.
    For a symmetrized pool the antipodal rows cancel pairwise (exact in
    floating point), giving exactly 0.5.
    """
    dots = alignment_matrix(config)
    if config.symmetrize:
        half = dots.shape[0] // 2
        total = float((dots[:half] + dots[half:]).sum())
    else:
        total = float(dots.sum())
    return 0.5 * (1.0 + total / dots.size)
