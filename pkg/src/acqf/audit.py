"""Statistical audit of measurement logs against Born predictions.

Every channel gets an exact two-sided binomial test of its Plus count
against its Born probability. Channel p-values are combined two ways:
Fisher's method (chi-squared survival of -2 sum ln p) and Bonferroni on
the minimum. The verdict is Violation when either combined value falls
below alpha. A log-likelihood G statistic is reported for diagnostics but
takes no part in the verdict.

Conventions, chosen conservative and documented here: tails include the
observed count and the smaller tail is doubled (capped at 1); discrete
p-values are not continuity-corrected in verdicts; the mid-p variant
exists for uniformity studies only. p-values are floored at 1e-300 so
Fisher's logarithm stays finite; channels with Born probability exactly 0
or 1 score 1.0 on agreement and the floor surrogate on any disagreement.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pool import Channel
from .special import chi2_sf

P_FLOOR = 1e-300


class InvalidCounts(ValueError):
    """Raised when counts are negative or successes exceed trials."""


class EmptyInput(ValueError):
    """Raised when an operation needs at least one value."""


class EmptyLog(ValueError):
    """Raised when a log contains no events."""


_LOGFACT: list[float] = [0.0]


def _logfact_table(n: int) -> np.ndarray:
    # Table of log k! for k = 0..n, grown on demand. Each entry comes
    # straight from lgamma, so there is no cumulative rounding.
    if n >= len(_LOGFACT):
        _LOGFACT.extend(math.lgamma(k + 1.0) for k in range(len(_LOGFACT), n + 1))
    return np.asarray(_LOGFACT[: n + 1])


def _log_tail(logpmf: np.ndarray) -> float:
    m = float(logpmf.max())
    return m + math.log(float(np.exp(logpmf - m).sum()))


def binomial_p_value(n_plus: int, n_total: int, p: float, mid_p: bool = False) -> float:
    """Exact two-sided binomial p-value of n_plus successes in n_total."""
    if n_plus < 0 or n_total < 0 or n_plus > n_total:
        raise InvalidCounts(f"bad counts: {n_plus} of {n_total}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p out of range: {p!r}")
    if n_total == 0:
        return 1.0
    if p == 0.0:
        return 1.0 if n_plus == 0 else P_FLOOR
    if p == 1.0:
        return 1.0 if n_plus == n_total else P_FLOOR

    lf = _logfact_table(n_total)
    k = np.arange(n_total + 1)
    logpmf = (
        lf[n_total]
        - lf
        - lf[::-1]
        + k * math.log(p)
        + (n_total - k) * math.log1p(-p)
    )
    lower = math.exp(_log_tail(logpmf[: n_plus + 1]))
    upper = math.exp(_log_tail(logpmf[n_plus:]))
    if mid_p:
        half_point = 0.5 * math.exp(logpmf[n_plus])
        lower -= half_point
        upper -= half_point
    p_value = 2.0 * min(lower, upper)
    return min(1.0, max(P_FLOOR, p_value))


def fisher_combine(p_values) -> tuple[float, float]:
    """Fisher's method: statistic -2 sum ln p and its chi-squared tail."""
    ps = list(p_values)
    if not ps:
        raise EmptyInput("fisher_combine needs at least one p-value")
    for p in ps:
        if not 0.0 < p <= 1.0:
            raise ValueError(f"p-values must lie in (0, 1], got {p!r}")
    # fsum rounds the exact sum once, making the statistic independent of
    # input order.
    statistic = -2.0 * math.fsum(math.log(p) for p in ps)
    return statistic, chi2_sf(statistic, 2 * len(ps))


@dataclass(frozen=True)
class ChannelStats:
    channel: Channel
    n_plus: int
    n_minus: int
    born_p_plus: float
    p_value: float


@dataclass(frozen=True)
class AuditReport:
    per_channel: tuple[ChannelStats, ...]
    n_events: int
    alpha: float
    fisher_statistic: float
    fisher_p: float
    bonferroni_p: float
    g_statistic: float
    verdict: str

    @property
    def n_channels(self) -> int:
        return len(self.per_channel)


def _g_statistic(channels) -> float:
    total = 0.0
    for st in channels:
        n = st.n_plus + st.n_minus
        for observed, prob in ((st.n_plus, st.born_p_plus), (st.n_minus, 1.0 - st.born_p_plus)):
            if observed == 0:
                continue
            expected = n * prob
            if expected == 0.0:
                return math.inf
            total += observed * math.log(observed / expected)
    return 2.0 * total


def audit_log(records, alpha: float = 0.05, pool_systems: bool = False) -> AuditReport:
    """Group events by channel, test each, combine, and pass verdict.

    pool_systems=True merges statistics across system ids, keeping only
    (ready_label, observable_label) identity; merged rows report system_id
    -1. Raises ValueError if one channel key shows inconsistent Born
    probabilities, since that indicates a corrupted log.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    groups: dict[tuple[int, str, str], list[int]] = {}
    probs: dict[tuple[int, str, str], float] = {}
    n_events = 0
    for ev in records:
        n_events += 1
        ch = ev.channel
        key = (-1 if pool_systems else ch.system_id, ch.ready_label, ch.observable_label)
        cell = groups.get(key)
        if cell is None:
            groups[key] = cell = [0, 0]
            probs[key] = ev.born_p_plus
        elif abs(probs[key] - ev.born_p_plus) > 1e-12:
            raise ValueError(
                f"channel {key} carries two Born probabilities "
                f"({probs[key]!r} vs {ev.born_p_plus!r}); log is corrupt"
            )
        cell[1] += 1
        if ev.outcome.value == "P":
            cell[0] += 1
    if n_events == 0:
        raise EmptyLog("no events to audit")

    stats = []
    for key in sorted(groups):
        n_plus, n_total = groups[key]
        p = probs[key]
        stats.append(
            ChannelStats(
                channel=Channel(key[0], key[1], key[2]),
                n_plus=n_plus,
                n_minus=n_total - n_plus,
                born_p_plus=p,
                p_value=binomial_p_value(n_plus, n_total, p),
            )
        )

    p_values = [st.p_value for st in stats]
    fisher_statistic, fisher_p = fisher_combine(p_values)
    bonferroni_p = min(1.0, len(p_values) * min(p_values))
    verdict = "Violation" if min(fisher_p, bonferroni_p) < alpha else "Consistent"
    return AuditReport(
        per_channel=tuple(stats),
        n_events=n_events,
        alpha=alpha,
        fisher_statistic=fisher_statistic,
        fisher_p=fisher_p,
        bonferroni_p=bonferroni_p,
        g_statistic=_g_statistic(stats),
        verdict=verdict,
    )
