"""File formats: the event log CSV, report JSON/CSV, and small tables.

Numeric CSV fields use fixed formats (9 fractional digits; scientific
with a 9-digit mantissa for p-values, which can be far below 1e-9), so
identical data always serializes to identical bytes. JSON files are
written with sorted keys and indent 2; floats round-trip exactly through
repr, which is what the report round-trip guarantee relies on.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .agents import DecisionEvent, MacroChoice, macro_from_outcome
from .audit import AuditReport, ChannelStats
from .bloch import Outcome
from .pool import Channel
from .sim import PowerCell

EVENTS_HEADER = "step,replicate,system_id,ready_label,observable_label,born_p_plus,outcome,macro,overridden"
AUDIT_CSV_HEADER = "system_id,ready_label,observable_label,n_plus,n_minus,born_p_plus,p_value"
POWER_CSV_HEADER = "n_systems,beta,trials,power,stderr"
TRAJECTORY_HEADER = "step,position"


def fmt_prob(x: float) -> str:
    return f"{x:.9f}"


def fmt_pvalue(x: float) -> str:
    return f"{x:.9e}"


@dataclass(frozen=True)
class LogRecord:
    """One parsed event-log row; quacks like DecisionEvent for audits."""

    step: int
    replicate: int
    channel: Channel
    born_p_plus: float
    outcome: Outcome
    macro: MacroChoice
    overridden: bool


def event_row(replicate: int, ev: DecisionEvent) -> str:
    ch = ev.channel
    return ",".join(
        (
            str(ev.step),
            str(replicate),
            str(ch.system_id),
            ch.ready_label,
            ch.observable_label,
            fmt_prob(ev.born_p_plus),
            ev.outcome.value,
            ev.macro.value,
            "1" if ev.overridden else "0",
        )
    )


def write_events_csv(path, events_by_replicate) -> None:
    """events_by_replicate: iterable of (replicate, events), written in
    (replicate, step) order regardless of how the runs were executed."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(EVENTS_HEADER + "\n")
        for replicate, events in sorted(events_by_replicate, key=lambda t: t[0]):
            for ev in events:
                fh.write(event_row(replicate, ev) + "\n")


def read_events_csv(path) -> list[LogRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != EVENTS_HEADER:
            raise ValueError(f"unexpected event log header: {header!r}")
        records = []
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 9:
                raise ValueError(f"line {lineno}: expected 9 fields, got {len(parts)}")
            step, replicate, system_id = parts[0], parts[1], parts[2]
            outcome_s, macro_s, overridden_s = parts[6], parts[7], parts[8]
            try:
                outcome = Outcome(outcome_s)
            except ValueError:
                raise ValueError(f"line {lineno}: bad outcome {outcome_s!r}") from None
            if macro_s not in ("R", "L"):
                raise ValueError(f"line {lineno}: bad macro {macro_s!r}")
            macro = MacroChoice(macro_s)
            if macro is not macro_from_outcome(outcome):
                raise ValueError(f"line {lineno}: macro column contradicts outcome")
            if overridden_s not in ("0", "1"):
                raise ValueError(f"line {lineno}: bad overridden flag {overridden_s!r}")
            try:
                born = float(parts[5])
            except ValueError:
                raise ValueError(f"line {lineno}: bad born_p_plus {parts[5]!r}") from None
            if not 0.0 <= born <= 1.0:
                raise ValueError(f"line {lineno}: born_p_plus out of range: {born}")
            records.append(
                LogRecord(
                    step=int(step),
                    replicate=int(replicate),
                    channel=Channel(int(system_id), parts[3], parts[4]),
                    born_p_plus=born,
                    outcome=outcome,
                    macro=macro,
                    overridden=overridden_s == "1",
                )
            )
    return records


@dataclass(frozen=True)
class ReplicateSummary:
    replicate: int
    n_events: int
    macro_r_frequency: float
    override_rate: float


@dataclass(frozen=True)
class RunSummary:
    seed: int
    replicates: int
    steps: int
    n_systems: int
    policy_kind: str
    bias_beta: float
    tolerance_delta: float
    intent: str
    baseline_drift: float
    n_events: int
    macro_r_frequency: float
    override_rate: float
    per_replicate: tuple[ReplicateSummary, ...]

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "replicates": self.replicates,
            "steps": self.steps,
            "n_systems": self.n_systems,
            "policy_kind": self.policy_kind,
            "bias_beta": self.bias_beta,
            "tolerance_delta": self.tolerance_delta,
            "intent": self.intent,
            "baseline_drift": self.baseline_drift,
            "n_events": self.n_events,
            "macro_r_frequency": self.macro_r_frequency,
            "override_rate": self.override_rate,
            "per_replicate": [
                {
                    "replicate": r.replicate,
                    "n_events": r.n_events,
                    "macro_r_frequency": r.macro_r_frequency,
                    "override_rate": r.override_rate,
                }
                for r in self.per_replicate
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunSummary":
        return cls(
            seed=d["seed"],
            replicates=d["replicates"],
            steps=d["steps"],
            n_systems=d["n_systems"],
            policy_kind=d["policy_kind"],
            bias_beta=d["bias_beta"],
            tolerance_delta=d["tolerance_delta"],
            intent=d["intent"],
            baseline_drift=d["baseline_drift"],
            n_events=d["n_events"],
            macro_r_frequency=d["macro_r_frequency"],
            override_rate=d["override_rate"],
            per_replicate=tuple(
                ReplicateSummary(
                    replicate=r["replicate"],
                    n_events=r["n_events"],
                    macro_r_frequency=r["macro_r_frequency"],
                    override_rate=r["override_rate"],
                )
                for r in d["per_replicate"]
            ),
        )


def summarize_run(config, events_by_replicate, seed: int) -> RunSummary:
    """Aggregate per-replicate and overall frequencies for summary.json."""
    from .agents import baseline_macro_drift

    per = []
    total_events = 0
    total_r = 0
    total_over = 0
    for replicate, events in sorted(events_by_replicate, key=lambda t: t[0]):
        n = len(events)
        n_r = sum(1 for ev in events if ev.macro is MacroChoice.R)
        n_over = sum(1 for ev in events if ev.overridden)
        per.append(
            ReplicateSummary(
                replicate=replicate,
                n_events=n,
                macro_r_frequency=n_r / n if n else 0.0,
                override_rate=n_over / n if n else 0.0,
            )
        )
        total_events += n
        total_r += n_r
        total_over += n_over
    return RunSummary(
        seed=seed,
        replicates=len(per),
        steps=config.steps,
        n_systems=config.n_systems,
        policy_kind=config.kind.value,
        bias_beta=config.bias_beta,
        tolerance_delta=config.tolerance_delta,
        intent=config.intent.value,
        baseline_drift=baseline_macro_drift(config.pool_config()),
        n_events=total_events,
        macro_r_frequency=total_r / total_events if total_events else 0.0,
        override_rate=total_over / total_events if total_events else 0.0,
        per_replicate=tuple(per),
    )


def write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def audit_report_to_dict(report: AuditReport) -> dict:
    return {
        "alpha": report.alpha,
        "n_events": report.n_events,
        "n_channels": report.n_channels,
        "fisher_statistic": report.fisher_statistic,
        "fisher_p": report.fisher_p,
        "bonferroni_p": report.bonferroni_p,
        "g_statistic": report.g_statistic,
        "verdict": report.verdict,
        "per_channel": [
            {
                "system_id": st.channel.system_id,
                "ready_label": st.channel.ready_label,
                "observable_label": st.channel.observable_label,
                "n_plus": st.n_plus,
                "n_minus": st.n_minus,
                "born_p_plus": st.born_p_plus,
                "p_value": st.p_value,
            }
            for st in report.per_channel
        ],
    }


def audit_report_from_dict(d: dict) -> AuditReport:
    stats = tuple(
        ChannelStats(
            channel=Channel(row["system_id"], row["ready_label"], row["observable_label"]),
            n_plus=row["n_plus"],
            n_minus=row["n_minus"],
            born_p_plus=row["born_p_plus"],
            p_value=row["p_value"],
        )
        for row in d["per_channel"]
    )
    return AuditReport(
        per_channel=stats,
        n_events=d["n_events"],
        alpha=d["alpha"],
        fisher_statistic=d["fisher_statistic"],
        fisher_p=d["fisher_p"],
        bonferroni_p=d["bonferroni_p"],
        g_statistic=d["g_statistic"],
        verdict=d["verdict"],
    )


def write_audit_csv(path, report: AuditReport) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(AUDIT_CSV_HEADER + "\n")
        for st in report.per_channel:
            fh.write(
                ",".join(
                    (
                        str(st.channel.system_id),
                        st.channel.ready_label,
                        st.channel.observable_label,
                        str(st.n_plus),
                        str(st.n_minus),
                        fmt_prob(st.born_p_plus),
                        fmt_pvalue(st.p_value),
                    )
                )
                + "\n"
            )


def write_power_csv(path, cells) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(POWER_CSV_HEADER + "\n")
        for cell in cells:
            fh.write(
                ",".join(
                    (
                        str(cell.n_systems),
                        fmt_prob(cell.bias_beta),
                        str(cell.trials),
                        fmt_prob(cell.power),
                        fmt_prob(cell.stderr),
                    )
                )
                + "\n"
            )


def read_power_csv(path) -> list[PowerCell]:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != POWER_CSV_HEADER:
            raise ValueError(f"unexpected power table header: {header!r}")
        cells = []
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 5:
                raise ValueError(f"line {lineno}: expected 5 fields, got {len(parts)}")
            try:
                n = int(parts[0])
                beta = float(parts[1])
                trials = int(parts[2])
                power = float(parts[3])
                stderr = float(parts[4])
            except ValueError:
                raise ValueError(f"line {lineno}: malformed power row") from None
            cells.append(PowerCell(n, beta, trials, 0, 0, power, stderr))
    return cells


def write_trajectory_csv(path, positions) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TRAJECTORY_HEADER + "\n")
        for step, position in enumerate(positions):
            fh.write(f"{step},{position}\n")
