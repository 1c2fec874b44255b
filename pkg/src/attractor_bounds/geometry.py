"""Box and ball domains: volume, moment of inertia, and the ball inertia bound."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence


def _gamma_half_integer(x2: int) -> float:
    """Gamma(x2 / 2) for a positive integer ``x2``, by the half-integer recurrence."""
    if x2 < 1:
        raise ValueError("argument must be positive")
    if x2 % 2 == 0:
        value = 1.0  # Gamma(1)
        k = 2
    else:
        value = math.sqrt(math.pi)  # Gamma(1/2)
        k = 1
    while k < x2:
        value *= k / 2.0
        k += 2
    return value


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n, pi^(n/2) / Gamma(n/2 + 1)."""
    if int(n) != n or n < 1:
        raise ValueError(f"dimension must be a positive integer, got {n!r}")
    n = int(n)
    return math.pi ** (n / 2.0) / _gamma_half_integer(n + 2)


@dataclass(frozen=True)
class Domain:
    """A box ``prod_i (0, L_i)`` or a ball of radius ``R`` in R^n."""

    kind: str
    n: int
    sides: tuple[float, ...] | None = None
    radius: float | None = None

    def __post_init__(self):
        if self.kind not in ("box", "ball"):
            raise ValueError(f"unsupported domain kind {self.kind!r}; only 'box' and 'ball'")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("dimension n must be a positive integer")
        if self.kind == "box":
            if self.sides is None or len(self.sides) != self.n:
                raise ValueError("box domain needs exactly n side lengths")
            if any(not (s > 0 and math.isfinite(s)) for s in self.sides):
                raise ValueError("box sides must be positive and finite")
            object.__setattr__(self, "sides", tuple(float(s) for s in self.sides))
        else:
            if self.radius is None or not (self.radius > 0 and math.isfinite(self.radius)):
                raise ValueError("ball radius must be positive and finite")
            object.__setattr__(self, "radius", float(self.radius))

    @classmethod
    def box(cls, sides: Sequence[float]) -> "Domain":
        sides = tuple(sides)
        return cls("box", len(sides), sides=sides)

    @classmethod
    def ball(cls, n: int, radius: float) -> "Domain":
        return cls("ball", n, radius=radius)

    @property
    def is_box(self) -> bool:
        return self.kind == "box"

    def scaled(self, s: float) -> "Domain":
        if self.is_box:
            return Domain.box([s * L for L in self.sides])
        return Domain.ball(self.n, s * self.radius)

    def to_dict(self) -> dict[str, Any]:
        if self.is_box:
            return {"kind": "box", "sides": list(self.sides)}
        return {"kind": "ball", "n": self.n, "radius": self.radius}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Domain":
        kind = data.get("kind")
        if kind == "box":
            return cls.box(data["sides"])
        if kind == "ball":
            # n defaults to 2 only when omitted from a hand-written config
            return cls.ball(int(data.get("n", 2)), data["radius"])
        raise ValueError(f"unsupported domain kind {kind!r}")


def volume(d: Domain) -> float:
    if d.is_box:
        return math.prod(d.sides)
    return unit_ball_volume(d.n) * d.radius ** d.n


def moment_of_inertia(d: Domain) -> float:
    """Minimum over centers a of the integral of |x - a|^2 over the domain.

    The minimizing center is the centroid, which gives ``V * sum(L_i^2) / 12``
    for a box and ``n w_n R^(n+2) / (n+2)`` for a ball.
    """
    if d.is_box:
        return volume(d) * sum(L * L for L in d.sides) / 12.0
    n = d.n
    return n * unit_ball_volume(n) * d.radius ** (n + 2) / (n + 2)


def inertia_ball_lower_bound(n: int, V: float) -> float:
    """Inertia of the ball with volume ``V``; a lower bound for every domain of that volume."""
    if not V > 0:
        raise ValueError("volume must be positive")
    omega = unit_ball_volume(n)
    R = (V / omega) ** (1.0 / n)
    return n * omega * R ** (n + 2) / (n + 2)
