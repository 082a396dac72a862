"""INI-style run configuration.

Five sections are recognized: [pool], [policy], [scenario], [audit], and
[run]. Every key has a documented default, so the empty file is a valid
configuration (the toy setup: three systems, quarter-turn ready frame,
full churn, Born policy). '#' starts a comment anywhere on a line.
Unknown sections, unknown keys, duplicates, and malformed lines raise
ParseError with the offending line number; out-of-range values raise
ValidationError naming the canonical field.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .agents import AgentPolicy, MacroChoice, PolicyKind
from .bloch import DegenerateFrame, make_ready_frame
from .pool import PoolConfig, Scheduler
from .rng import MAX_SEED
from .sim import PowerGrid, SimParams


class ParseError(ValueError):
    def __init__(self, line: int, message: str) -> None:
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


class ValidationError(ValueError):
    def __init__(self, field: str, message: str) -> None:
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


@dataclass(frozen=True)
class RunConfig:
    # pool
    n_systems: int = 3
    yaw: float = math.pi / 4
    pitch: float = math.pi / 4
    churn_rate: float = 1.0
    symmetrize: bool = False
    scheduler: Scheduler = Scheduler.UNIFORM
    observables: tuple[str, ...] = ("x", "y", "z")
    # policy
    kind: PolicyKind = PolicyKind.BORN
    bias_beta: float = 0.0
    tolerance_delta: float = 0.025
    intent: MacroChoice = MacroChoice.R
    # scenario
    steps: int = 1000
    c0: float = 1.0
    gradient: float = 0.1
    # audit
    alpha: float = 0.05
    pool_systems: bool = False
    # run
    seed: int = 42
    replicates: int = 1
    workers: int = 1

    def pool_config(self) -> PoolConfig:
        return PoolConfig(
            n_systems=self.n_systems,
            ready_frame=make_ready_frame(self.yaw, self.pitch),
            churn_rate=self.churn_rate,
            symmetrize=self.symmetrize,
            scheduler=self.scheduler,
            observable_labels=self.observables,
        )

    def policy(self) -> AgentPolicy:
        return AgentPolicy(
            kind=self.kind,
            bias_beta=self.bias_beta,
            tolerance_delta=self.tolerance_delta,
        )

    def sim_params(self) -> SimParams:
        return SimParams(
            pool=self.pool_config(),
            policy=self.policy(),
            intent=self.intent,
            steps=self.steps,
        )


def _strip(line: str) -> str:
    cut = line.find("#")
    if cut >= 0:
        line = line[:cut]
    return line.strip()


def _parse_sections(text: str, known: dict[str, set[str]]) -> dict[tuple[str, str], tuple[str, int]]:
    out: dict[tuple[str, str], tuple[str, int]] = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ParseError(lineno, f"malformed section header {line!r}")
            section = line[1:-1].strip()
            if section not in known:
                raise ParseError(lineno, f"unknown section [{section}]")
            continue
        if "=" not in line:
            raise ParseError(lineno, f"expected key = value, got {line!r}")
        if section is None:
            raise ParseError(lineno, "key before any section header")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in known[section]:
            raise ParseError(lineno, f"unknown key {key!r} in section [{section}]")
        if (section, key) in out:
            raise ParseError(lineno, f"duplicate key {key!r} in section [{section}]")
        if not value:
            raise ParseError(lineno, f"empty value for key {key!r}")
        out[(section, key)] = (value, lineno)
    return out


def _to_int(field: str, raw: str) -> int:
    try:
        return int(raw, 10)
    except ValueError:
        raise ValidationError(field, f"expected an integer, got {raw!r}") from None


def _to_float(field: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ValidationError(field, f"expected a number, got {raw!r}") from None
    if math.isnan(value) or math.isinf(value):
        raise ValidationError(field, f"expected a finite number, got {raw!r}")
    return value


def _to_bool(field: str, raw: str) -> bool:
    low = raw.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    raise ValidationError(field, f"expected true or false, got {raw!r}")


def _in_range(field: str, value, low, high, low_open: bool = False, high_open: bool = False):
    ok_low = value > low if low_open else value >= low
    ok_high = value < high if high_open else value <= high
    if not (ok_low and ok_high):
        lo = "(" if low_open else "["
        hi = ")" if high_open else "]"
        raise ValidationError(field, f"must lie in {lo}{low}, {high}{hi}, got {value!r}")
    return value


_SCHEMA: dict[str, set[str]] = {
    "pool": {"n_systems", "yaw", "pitch", "churn_rate", "symmetrize", "scheduler", "observables"},
    "policy": {"kind", "beta", "delta", "intent"},
    "scenario": {"steps", "c0", "g"},
    "audit": {"alpha", "pool_systems"},
    "run": {"seed", "replicates", "workers"},
}


def parse_config(text: str) -> RunConfig:
    values = _parse_sections(text, _SCHEMA)
    fields: dict = {}

    def take(section: str, key: str):
        entry = values.get((section, key))
        return entry[0] if entry is not None else None

    raw = take("pool", "n_systems")
    if raw is not None:
        n = _to_int("n_systems", raw)
        if n < 1:
            raise ValidationError("n_systems", f"must be at least 1, got {n}")
        fields["n_systems"] = n
    for section, key, field in (("pool", "yaw", "yaw"), ("pool", "pitch", "pitch")):
        raw = take(section, key)
        if raw is not None:
            fields[field] = _to_float(field, raw)
    raw = take("pool", "churn_rate")
    if raw is not None:
        fields["churn_rate"] = _in_range("churn_rate", _to_float("churn_rate", raw), 0.0, 1.0)
    raw = take("pool", "symmetrize")
    if raw is not None:
        fields["symmetrize"] = _to_bool("symmetrize", raw)
    raw = take("pool", "scheduler")
    if raw is not None:
        try:
            fields["scheduler"] = Scheduler(raw)
        except ValueError:
            raise ValidationError(
                "scheduler", f"expected uniform or round_robin, got {raw!r}"
            ) from None
    raw = take("pool", "observables")
    if raw is not None:
        labels = tuple(part.strip() for part in raw.split(","))
        for lab in labels:
            if lab not in ("x", "y", "z"):
                raise ValidationError("observables", f"unknown observable {lab!r}")
        if len(set(labels)) != len(labels):
            raise ValidationError("observables", "duplicate observable")
        fields["observables"] = labels

    raw = take("policy", "kind")
    if raw is not None:
        try:
            fields["kind"] = PolicyKind(raw)
        except ValueError:
            raise ValidationError(
                "kind", f"expected born, volitional, or budgeted, got {raw!r}"
            ) from None
    raw = take("policy", "beta")
    if raw is not None:
        fields["bias_beta"] = _in_range("bias_beta", _to_float("bias_beta", raw), 0.0, 1.0)
    raw = take("policy", "delta")
    if raw is not None:
        fields["tolerance_delta"] = _in_range(
            "tolerance_delta",
            _to_float("tolerance_delta", raw),
            0.0,
            0.5,
            low_open=True,
            high_open=True,
        )
    raw = take("policy", "intent")
    if raw is not None:
        if raw not in ("R", "L"):
            raise ValidationError("intent", f"expected R or L, got {raw!r}")
        fields["intent"] = MacroChoice(raw)

    raw = take("scenario", "steps")
    if raw is not None:
        steps = _to_int("steps", raw)
        if steps < 1:
            raise ValidationError("steps", f"must be at least 1, got {steps}")
        fields["steps"] = steps
    raw = take("scenario", "c0")
    if raw is not None:
        c0 = _to_float("c0", raw)
        if c0 < 0.0:
            raise ValidationError("c0", f"must be non-negative, got {c0}")
        fields["c0"] = c0
    raw = take("scenario", "g")
    if raw is not None:
        fields["gradient"] = _to_float("gradient", raw)

    raw = take("audit", "alpha")
    if raw is not None:
        fields["alpha"] = _in_range(
            "alpha", _to_float("alpha", raw), 0.0, 1.0, low_open=True, high_open=True
        )
    raw = take("audit", "pool_systems")
    if raw is not None:
        fields["pool_systems"] = _to_bool("pool_systems", raw)

    raw = take("run", "seed")
    if raw is not None:
        fields["seed"] = _in_range("seed", _to_int("seed", raw), 0, MAX_SEED)
    for key in ("replicates", "workers"):
        raw = take("run", key)
        if raw is not None:
            v = _to_int(key, raw)
            if v < 1:
                raise ValidationError(key, f"must be at least 1, got {v}")
            fields[key] = v

    config = RunConfig(**fields)
    # Cross-field check: the ready frame must exist for these angles.
    try:
        config.pool_config()
    except DegenerateFrame as exc:
        raise ValidationError("yaw/pitch", str(exc)) from None
    return config


_GRID_SCHEMA = {"grid": {"n_systems", "beta", "trials"}}


def parse_grid(text: str) -> PowerGrid:
    """Power grid file: a single [grid] section with three list keys."""
    values = _parse_sections(text, _GRID_SCHEMA)

    def int_list(field: str, raw: str, minimum: int) -> tuple[int, ...]:
        items = tuple(_to_int(field, part.strip()) for part in raw.split(","))
        for v in items:
            if v < minimum:
                raise ValidationError(field, f"values must be at least {minimum}, got {v}")
        return items

    entry = values.get(("grid", "n_systems"))
    if entry is None:
        raise ValidationError("n_systems", "grid requires an n_systems list")
    n_systems = int_list("n_systems", entry[0], 1)
    entry = values.get(("grid", "beta"))
    if entry is None:
        raise ValidationError("beta", "grid requires a beta list")
    betas = tuple(
        _in_range("beta", _to_float("beta", part.strip()), 0.0, 1.0)
        for part in entry[0].split(",")
    )
    entry = values.get(("grid", "trials"))
    if entry is None:
        raise ValidationError("trials", "grid requires a trials list")
    trials = int_list("trials", entry[0], 1)
    return PowerGrid(n_systems=n_systems, bias_beta=betas, trials=trials)
