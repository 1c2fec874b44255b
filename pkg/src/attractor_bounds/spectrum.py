"""Exact Dirichlet spectra of boxes and lower bounds on eigenvalue sums.

The eigenvalues of the Dirichlet Laplacian on ``prod_i (0, L_i)`` are
``pi^2 * sum_i (k_i / L_i)^2`` over positive integer multi-indices ``k``.
They are enumerated in increasing order with a heap over the mode lattice;
because every value is increasing in each ``k_i``, popping the heap yields a
true prefix of the spectrum.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Domain, moment_of_inertia, unit_ball_volume, volume

#: Relative slack granted to the certified side of every inequality check.
REL_SLACK = 1e-12

#: Melas numerator used throughout the test-suite. A fixture, not a claim
#: about the constant in Melas's theorem.
TEST_FIXTURE_C = 1.0 / 24.0


def melas_c_upper(n: int) -> float:
    """Upper end of the admissible window for the Melas numerator, (2 pi)^2 w_n^(-4/n)."""
    return (2.0 * math.pi) ** 2 * unit_ball_volume(n) ** (-4.0 / n)


@dataclass(frozen=True)
class MethodConstants:
    """Constants entering the eigenvalue-sum and dimension bounds in dimension ``n``.

    Build instances with :meth:`for_dimension`; the remaining fields are derived.
    """

    n: int
    omega_n: float
    C_n: float
    c: float
    M_n: float
    C_star: float

    def __post_init__(self):
        upper = melas_c_upper(self.n)
        if not (0.0 < self.c < upper):
            raise ValueError(
                f"Melas numerator c={self.c!r} outside the admissible window "
                f"0 < c < (2π)² ω_n^(−4/n) = {upper:.12g} for n={self.n}"
            )
        if not self.C_star > 0:
            raise ValueError(f"Lieb-Thirring constant C_star must be positive, got {self.C_star!r}")

    @classmethod
    def for_dimension(cls, n: int, c: float, C_star: float = 1.0) -> "MethodConstants":
        omega = unit_ball_volume(n)
        C_n = (2.0 * math.pi) ** 2 * omega ** (-2.0 / n)
        return cls(n=n, omega_n=omega, C_n=C_n, c=float(c), M_n=c / (n + 2), C_star=float(C_star))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "omega_n": self.omega_n,
            "C_n": self.C_n,
            "c": self.c,
            "M_n": self.M_n,
            "C_star": self.C_star,
        }


@dataclass(frozen=True)
class Spectrum:
    domain: Domain
    values: np.ndarray
    modes: list[tuple[int, ...]] = field(repr=False)

    def __post_init__(self):
        if len(self.values) < 1:
            raise ValueError("a spectrum holds at least one eigenvalue")
        if len(self.values) != len(self.modes):
            raise ValueError("values and modes must align")

    @property
    def m(self) -> int:
        return len(self.values)

    def partial_sums(self) -> np.ndarray:
        return np.cumsum(self.values)


def box_eigenvalue(d: Domain, mode) -> float:
    return math.pi ** 2 * sum((k / L) ** 2 for k, L in zip(mode, d.sides))


def enumerate_eigenvalues(d: Domain, m: int) -> Spectrum:
    """The ``m`` smallest Dirichlet eigenvalues of the box ``d``, with multiplicity.

    Equal eigenvalues are ordered lexicographically by mode.
    """
    if not d.is_box:
        raise ValueError("closed-form Dirichlet spectra are only available for boxes")
    if int(m) != m or m < 1:
        raise ValueError("m must be a positive integer")
    inv_sq = [1.0 / (L * L) for L in d.sides]

    def key(mode):
        return sum(k * k * w for k, w in zip(mode, inv_sq))

    start = (1,) * d.n
    heap = [(key(start), start)]
    seen = {start}
    values, modes = [], []
    while len(values) < m:
        q, mode = heapq.heappop(heap)
        values.append(math.pi ** 2 * q)
        modes.append(mode)
        for i in range(d.n):
            nxt = mode[:i] + (mode[i] + 1,) + mode[i + 1:]
            if nxt not in seen:
                seen.add(nxt)
                heapq.heappush(heap, (key(nxt), nxt))
    return Spectrum(d, np.array(values), modes)


def doubled_spectrum(s: Spectrum) -> Spectrum:
    """Spectrum of -Δ acting on pairs (u1, u2): every eigenvalue twice in a row."""
    return Spectrum(s.domain, np.repeat(s.values, 2), [k for k in s.modes for _ in (0, 1)])


def _as_m(m):
    if np.any(np.asarray(m) < 1):
        raise ValueError("m must be >= 1")
    return float(m) if np.isscalar(m) else np.asarray(m, dtype=float)


def _check_window(consts: MethodConstants):
    upper = melas_c_upper(consts.n)
    if not (0.0 < consts.c < upper):
        raise ValueError(f"c outside the window (0, (2π)² ω_n^(−4/n) = {upper:.12g})")


def li_yau_lower_bound(n: int, V: float, m, consts: MethodConstants):
    """``n C_n / (n+2) * V^(-2/n) * m^((n+2)/n)``; ``m`` may be an array."""
    m = _as_m(m)
    return n * consts.C_n / (n + 2) * V ** (-2.0 / n) * m ** ((n + 2.0) / n)


def melas_lower_bound(n: int, V: float, I: float, m, consts: MethodConstants):
    _check_window(consts)
    lead = li_yau_lower_bound(n, V, m, consts)
    return lead + consts.M_n * (V / I) * _as_m(m)


def doubled_sum_lower_bound(n: int, V: float, I: float, m, consts: MethodConstants):
    """Lower bound on the sum of the first ``m`` eigenvalues of the doubled spectrum."""
    _check_window(consts)
    lead = 2.0 ** (-2.0 / n) * li_yau_lower_bound(n, V, m, consts)
    return lead + consts.M_n * (V / I) * _as_m(m)


def _geq(lhs, rhs):
    return lhs >= rhs * (1.0 - REL_SLACK)


@dataclass
class VerificationReport:
    domain: Domain
    consts: MethodConstants
    m: np.ndarray
    sum_enumerated: np.ndarray
    li_yau: np.ndarray
    melas: np.ndarray
    doubled_sum: np.ndarray
    doubled_sum_bound: np.ndarray
    passed: np.ndarray

    @property
    def ok(self) -> bool:
        return bool(self.passed.all())

    def rows(self):
        """Rows of the CSV verification table."""
        for i in range(len(self.m)):
            yield {
                "m": int(self.m[i]),
                "sum_enumerated": repr(float(self.sum_enumerated[i])),
                "li_yau": repr(float(self.li_yau[i])),
                "melas": repr(float(self.melas[i])),
                "doubled_sum_bound": repr(float(self.doubled_sum_bound[i])),
                "pass": "true" if self.passed[i] else "false",
            }


CSV_COLUMNS = ["m", "sum_enumerated", "li_yau", "melas", "doubled_sum_bound", "pass"]


def verify_bounds(d: Domain, m_max: int, consts: MethodConstants) -> VerificationReport:
    """Check Σ Λ_j ≥ Melas ≥ Li-Yau (strict middle) and the doubled-sum bound for m ≤ m_max."""
    if int(m_max) != m_max or m_max < 1:
        raise ValueError("m_max must be a positive integer")
    if consts.n != d.n:
        raise ValueError("constants were built for a different dimension")
    spec = enumerate_eigenvalues(d, m_max)
    V, I = volume(d), moment_of_inertia(d)
    m = np.arange(1, m_max + 1)
    sums = spec.partial_sums()
    ly = li_yau_lower_bound(d.n, V, m, consts)
    mel = melas_lower_bound(d.n, V, I, m, consts)
    dsum = np.cumsum(doubled_spectrum(spec).values)[:m_max]
    dbound = doubled_sum_lower_bound(d.n, V, I, m, consts)
    passed = _geq(sums, mel) & (mel > ly) & _geq(dsum, dbound)
    return VerificationReport(d, consts, m, sums, ly, mel, dsum, dbound, passed)
