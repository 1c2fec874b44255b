"""Regime classification and the attractor dimension bound for the Dirichlet CGL equation.

The equation is ``u_t = (lam + i alpha) Δu - (kappa + i beta)|u|^2 u + gamma u``.
Along any trajectory the trace of the linearization on an m-dimensional
subspace is majorized by ``f(m) = -A m^((n+2)/n) + B``; the root
``d* = (B/A)^(n/(n+2))`` of ``f`` bounds the Hausdorff and fractal dimension
of the global attractor.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Mapping

from .geometry import Domain, moment_of_inertia, volume
from .spectrum import MethodConstants, enumerate_eigenvalues

TRIVIAL = "trivial"
NONTRIVIAL = "nontrivial"


class TrivialRegimeError(ValueError):
    """Raised when gamma is at or below the Melas threshold: the attractor is {0}."""


@dataclass(frozen=True)
class CGLParams:
    lam: float
    alpha: float
    kappa: float
    beta: float
    gamma: float
    # kappa = 0 is only for exact linear-solution checks of the integrator
    test_mode: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        for name in ("lam", "alpha", "kappa", "beta", "gamma"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if self.test_mode:
            if self.kappa < 0:
                raise ValueError("kappa must be nonnegative")
        elif not self.kappa > 0:
            raise ValueError("kappa must be positive")

    def to_dict(self) -> dict[str, float]:
        return {"lambda": self.lam, "alpha": self.alpha, "kappa": self.kappa,
                "beta": self.beta, "gamma": self.gamma}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CGLParams":
        return cls(lam=float(data["lambda"]), alpha=float(data.get("alpha", 0.0)),
                   kappa=float(data["kappa"]), beta=float(data.get("beta", 0.0)),
                   gamma=float(data["gamma"]))


@dataclass
class DimensionReport:
    Lambda1: float
    regime: str
    delta: float
    A: float
    B: float
    d_star: float
    d_star_baseline: float

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def classify_regime(p: CGLParams, Lambda1: float) -> str:
    """``trivial`` iff gamma <= lam * Lambda1 (the boundary counts as trivial)."""
    if not Lambda1 > 0:
        raise ValueError("Lambda1 must be positive")
    return TRIVIAL if p.gamma <= p.lam * Lambda1 else NONTRIVIAL


def melas_gamma_threshold(p: CGLParams, d: Domain, consts: MethodConstants) -> float:
    """``lam * M_n * V / (2 I)``. Any gamma at or below it is in the trivial regime."""
    return p.lam * consts.M_n * volume(d) / (2.0 * moment_of_inertia(d))


def constant_c1(n: int, consts: MethodConstants) -> float:
    return consts.C_star ** (n / (n + 2.0))


def constant_c2(n: int, consts: MethodConstants) -> float:
    return 2.0 * (2.0 / (n + 2)) ** ((n + 2) / 2.0) * (n * consts.C_star) ** (n / 2.0)


def constant_A(n: int, V: float, lam: float, consts: MethodConstants) -> float:
    return 0.25 * lam * n * consts.C_n / ((2.0 * V) ** (2.0 / n) * (n + 2))


def _gain_term(n, V, lam, excess, consts):
    # maximum over m of (excess * m - A m^((n+2)/n)), the Young step
    return (2.0 ** (n + 2) * V / ((n + 2) * (lam * consts.C_n) ** (n / 2.0))
            * excess ** ((n + 2) / 2.0))


def _nonlinear_term(n, p, delta, consts):
    return constant_c2(n, consts) * abs(p.beta) ** ((n + 2) / 2.0) * p.lam ** (-n / 2.0) * delta


def constant_B(n: int, V: float, I: float, p: CGLParams, delta: float,
               consts: MethodConstants) -> float:
    if not delta >= 0:
        raise ValueError("delta must be nonnegative")
    threshold = p.lam * consts.M_n * V / (2.0 * I)
    if p.gamma <= threshold:
        raise TrivialRegimeError(
            f"gamma={p.gamma} <= {threshold}: trivial regime, the attractor is {{0}}")
    return _gain_term(n, V, p.lam, p.gamma - threshold, consts) + _nonlinear_term(n, p, delta, consts)


def majorant_B(n: int, V: float, I: float, p: CGLParams, delta: float,
               consts: MethodConstants) -> float:
    """Like :func:`constant_B` but total: a nonpositive gain bracket contributes zero."""
    threshold = p.lam * consts.M_n * V / (2.0 * I)
    gain = _gain_term(n, V, p.lam, p.gamma - threshold, consts) if p.gamma > threshold else 0.0
    return gain + _nonlinear_term(n, p, delta, consts)


def dimension_bound(A: float, B: float, n: int) -> float:
    """Root of ``-A x^((n+2)/n) + B``."""
    if not (A > 0 and B > 0):
        raise ValueError("A and B must be positive")
    return (B / A) ** (n / (n + 2.0))


def trace_majorant(m, A: float, B: float, n: int):
    return -A * m ** ((n + 2.0) / n) + B


def baseline_dimension_bound(n: int, V: float, I: float, p: CGLParams, delta: float,
                             consts: MethodConstants) -> float:
    """The same bound with the Melas correction removed from B."""
    if not delta >= 0:
        raise ValueError("delta must be nonnegative")
    if not p.gamma > 0:
        raise ValueError("gamma must be positive")
    B0 = _gain_term(n, V, p.lam, p.gamma, consts) + _nonlinear_term(n, p, delta, consts)
    return dimension_bound(constant_A(n, V, p.lam, consts), B0, n)


def build_report(d: Domain, p: CGLParams, delta: float, consts: MethodConstants,
                 Lambda1: float | None = None) -> DimensionReport:
    """Assemble the full report. Non-box domains need ``Lambda1`` supplied."""
    if consts.n != d.n:
        raise ValueError("constants were built for a different dimension")
    if Lambda1 is None:
        if not d.is_box:
            raise ValueError("Lambda1 must be supplied for non-box domains")
        Lambda1 = float(enumerate_eigenvalues(d, 1).values[0])
    n, V, I = d.n, volume(d), moment_of_inertia(d)
    regime = classify_regime(p, Lambda1)
    A = constant_A(n, V, p.lam, consts)
    try:
        B = constant_B(n, V, I, p, delta, consts)
    except TrivialRegimeError:
        B = 0.0
    if regime == TRIVIAL:
        d_star = d_base = 0.0
    else:
        d_star = dimension_bound(A, B, n)
        d_base = baseline_dimension_bound(n, V, I, p, delta, consts)
    return DimensionReport(Lambda1=Lambda1, regime=regime, delta=float(delta), A=A, B=B,
                           d_star=d_star, d_star_baseline=d_base)
