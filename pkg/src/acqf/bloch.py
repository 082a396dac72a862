"""Spin-1/2 measurement kinematics on the Bloch sphere.

A pure spin-1/2 state is represented by the unit 3-vector it points along.
Measuring along an axis v on a state u yields "plus" with probability
(1 + u.v) / 2; the state then collapses onto v (plus) or -v (minus).
Working with the vectors directly keeps the whole simulation in real
arithmetic; the complex 2x2 formulation is only used as an oracle in tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

# A direction whose squared norm is farther than this from 1 after
# normalization indicates degenerate input.
_ZERO_TOL = 1e-9
_ORTHO_TOL = 1e-9

# How close (in |cosine|) a ready axis may come to a measurement axis
# before the pair of frames stops being usable.
DEGENERACY_TOL = 1e-6


class DegenerateFrame(ValueError):
    """Raised when a ready axis (anti)aligns with a measurement axis."""


class Outcome(Enum):
    PLUS = "P"
    MINUS = "M"

    def sign(self) -> int:
        return 1 if self is Outcome.PLUS else -1


@dataclass(frozen=True)
class Direction3:
    """A point on the unit sphere. Inputs are normalized on construction."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        n = math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
        if n < _ZERO_TOL:
            raise ValueError(f"direction too close to zero (norm {n:g})")
        object.__setattr__(self, "x", self.x / n)
        object.__setattr__(self, "y", self.y / n)
        object.__setattr__(self, "z", self.z / n)

    def dot(self, other: "Direction3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def __neg__(self) -> "Direction3":
        return Direction3(-self.x, -self.y, -self.z)


@dataclass(frozen=True)
class Observable:
    """A labelled measurement axis."""

    axis: Direction3
    label: str


@dataclass(frozen=True)
class Frame:
    """Right-handed orthonormal triple of labelled axes."""

    a: Direction3
    b: Direction3
    c: Direction3
    labels: tuple[str, str, str]

    def __post_init__(self) -> None:
        pairs = ((self.a, self.b), (self.a, self.c), (self.b, self.c))
        for u, v in pairs:
            if abs(u.dot(v)) > _ORTHO_TOL:
                raise ValueError(f"frame axes not orthogonal: |dot| = {abs(u.dot(v)):g}")
        cross = (
            self.a.y * self.b.z - self.a.z * self.b.y,
            self.a.z * self.b.x - self.a.x * self.b.z,
            self.a.x * self.b.y - self.a.y * self.b.x,
        )
        handed = cross[0] * self.c.x + cross[1] * self.c.y + cross[2] * self.c.z
        if handed <= 0.0:
            raise ValueError("frame is not right-handed")

    @property
    def axes(self) -> tuple[Direction3, Direction3, Direction3]:
        return (self.a, self.b, self.c)

    def observables(self) -> tuple[Observable, Observable, Observable]:
        return tuple(Observable(ax, lab) for ax, lab in zip(self.axes, self.labels))


def born_probability(ready: Direction3, axis: Direction3) -> tuple[float, float]:
    """(p_plus, p_minus) for measuring `ready` along `axis`.

    Clamped into [0, 1] so that roundoff on (anti)parallel vectors can
    never produce a probability epsilon outside the unit interval.
    """
    p_plus = 0.5 * (1.0 + ready.dot(axis))
    if p_plus < 0.0:
        p_plus = 0.0
    elif p_plus > 1.0:
        p_plus = 1.0
    return p_plus, 1.0 - p_plus


def sample_outcome(p_plus: float, draw: float) -> Outcome:
    """Map a uniform [0,1) draw to an outcome: plus iff draw < p_plus."""
    if not 0.0 <= p_plus <= 1.0:
        raise ValueError(f"p_plus out of range: {p_plus!r}")
    return Outcome.PLUS if draw < p_plus else Outcome.MINUS


def collapse(axis: Direction3, outcome: Outcome) -> Direction3:
    """Post-measurement state: the axis itself or its antipode."""
    return axis if outcome is Outcome.PLUS else -axis


def measurement_frame() -> Frame:
    """The fixed laboratory frame: the standard x, y, z axes."""
    return Frame(
        Direction3(1.0, 0.0, 0.0),
        Direction3(0.0, 1.0, 0.0),
        Direction3(0.0, 0.0, 1.0),
        ("x", "y", "z"),
    )


def make_ready_frame(yaw: float, pitch: float) -> Frame:
    """Ready frame from a yaw about z followed by a pitch about x.

    Both rotations are taken about the fixed laboratory axes. Raises
    DegenerateFrame if any resulting axis lies within DEGENERACY_TOL (in
    |cosine|) of a laboratory axis, since such a channel would have a
    deterministic outcome and no usable statistics.
    """
    cy, sy = math.cos(yaw), math.sin(yaw)
    cp, sp = math.cos(pitch), math.sin(pitch)

    def rotated(v: tuple[float, float, float]) -> Direction3:
        x, y, z = v
        x, y = cy * x - sy * y, sy * x + cy * y
        y, z = cp * y - sp * z, sp * y + cp * z
        return Direction3(x, y, z)

    axes = tuple(rotated(e) for e in ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)))
    for axis in axes:
        for comp in axis.as_tuple():
            if abs(comp) > 1.0 - DEGENERACY_TOL:
                raise DegenerateFrame(
                    f"ready axis {axis.as_tuple()} aligns with a laboratory axis "
                    f"(yaw={yaw:g}, pitch={pitch:g})"
                )
    return Frame(axes[0], axes[1], axes[2], ("alpha", "beta", "gamma"))
