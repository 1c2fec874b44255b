"""Sine-pseudospectral solver for the Dirichlet CGL equation with tangent-space diagnostics.

The field is expanded in the L2-orthonormal Dirichlet eigenbasis

    u(x) = sum_k a_k prod_i sqrt(2/L_i) sin(k_i pi x_i / L_i),

so the coefficient vector's Euclidean norm is the L2 norm and the boundary
condition holds identically. The cubic term is evaluated on a padded DST-I
collocation grid (3/2 rule) with quadrature weight ``prod_i L_i/(M_i+1)``.

Time stepping is the second-order exponential integrator ETD2RK with the
linear factors ``exp(h (gamma - (lam + i alpha) Λ_k))`` computed exactly.
Tangent vectors follow the exact linearization of that discrete step, so
they are the derivative of the discrete flow map. Tangent frames live in the
real space L2(Ω; R^2) and are orthonormalized with respect to ``Re <U, V>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

import numpy as np
import scipy.fft
from scipy.integrate import trapezoid

from .bounds import CGLParams
from .geometry import Domain


class SimulationBlowUp(RuntimeError):
    def __init__(self, t_stable: float, message: str | None = None):
        self.t_stable = t_stable
        super().__init__(message or f"numerical blow-up; last stable t = {t_stable:.6g}")


@dataclass(frozen=True)
class SimConfig:
    domain: Domain
    modes_per_axis: tuple[int, ...]
    dt: float
    t_end: float
    burn_in: float = 0.0
    initial_condition: Mapping[str, Any] = field(
        default_factory=lambda: {"kind": "single_mode", "k": 1, "amplitude": 1.0})
    tangent_count: int = 0
    reorth_interval: int = 10
    overflow_guard: float = 1e8
    dealias: float = 1.5
    tangent_seed: int = 0

    def __post_init__(self):
        d = self.domain
        if not d.is_box or d.n not in (1, 2):
            raise ValueError("the simulator supports boxes in dimension 1 or 2")
        modes = self.modes_per_axis
        if isinstance(modes, int):
            modes = (modes,) * d.n
        modes = tuple(int(k) for k in modes)
        if len(modes) != d.n:
            raise ValueError("modes_per_axis needs one entry per dimension")
        if min(modes) < 4:
            raise ValueError("modes_per_axis must be >= 4")
        object.__setattr__(self, "modes_per_axis", modes)
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if not 0 <= self.burn_in < self.t_end:
            raise ValueError("burn_in must lie in [0, t_end)")
        if self.tangent_count < 0 or self.tangent_count > 2 * math.prod(modes):
            raise ValueError("tangent_count must lie in [0, 2 * total mode count]")
        if self.reorth_interval < 1:
            raise ValueError("reorth_interval must be >= 1")
        if self.dealias < 1:
            raise ValueError("dealias factor must be >= 1")
        kind = self.initial_condition.get("kind")
        if kind not in ("single_mode", "random_smooth"):
            raise ValueError(f"unknown initial condition {kind!r}")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_end / self.dt)))

    def to_dict(self) -> dict[str, Any]:
        return {
            "domain": self.domain.to_dict(),
            "modes_per_axis": list(self.modes_per_axis),
            "dt": self.dt,
            "t_end": self.t_end,
            "burn_in": self.burn_in,
            "initial_condition": dict(self.initial_condition),
            "tangent_count": self.tangent_count,
            "reorth_interval": self.reorth_interval,
            "overflow_guard": self.overflow_guard,
            "dealias": self.dealias,
            "tangent_seed": self.tangent_seed,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], domain: Domain | None = None) -> "SimConfig":
        data = dict(data)
        if "domain" in data:
            domain = Domain.from_dict(data.pop("domain"))
        if domain is None:
            raise ValueError("simulation config needs a domain")
        known = {f for f in cls.__dataclass_fields__ if f != "domain"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown simulation keys: {sorted(unknown)}")
        return cls(domain=domain, **data)


@dataclass
class State:
    t: float
    coeffs: np.ndarray
    frames: np.ndarray  # shape (m, *modes)
    step_index: int = 0
    log_volume: np.ndarray | None = None  # accumulated log stretching per frame

    @property
    def m(self) -> int:
        return self.frames.shape[0]


class SineGrid:
    """Sine coefficient space and its padded collocation grid on a box."""

    def __init__(self, domain: Domain, modes: tuple[int, ...], dealias: float = 1.5):
        self.domain = domain
        self.n = domain.n
        self.modes = tuple(modes)
        self.points = tuple(max(N, math.ceil(dealias * (N + 1)) - 1) for N in self.modes)
        self.axes = tuple(range(-self.n, 0))
        self.weight = math.prod(L / (M + 1) for L, M in zip(domain.sides, self.points))
        self._scale = 1.0 / math.sqrt(self.weight)
        ks = [np.arange(1, N + 1) for N in self.modes]
        mesh = np.meshgrid(*ks, indexing="ij")
        self.eigenvalues = math.pi ** 2 * sum((k / L) ** 2 for k, L in zip(mesh, domain.sides))
        self.mode_indices = np.stack(mesh, axis=-1)

    def to_grid(self, a: np.ndarray) -> np.ndarray:
        pad = [(0, 0)] * (a.ndim - self.n) + [(0, M - N) for M, N in zip(self.points, self.modes)]
        g = scipy.fft.dstn(np.pad(a, pad), type=1, norm="ortho", axes=self.axes)
        return g * self._scale

    def from_grid(self, g: np.ndarray) -> np.ndarray:
        a = scipy.fft.dstn(g, type=1, norm="ortho", axes=self.axes)
        idx = (Ellipsis,) + tuple(slice(0, N) for N in self.modes)
        return a[idx] / self._scale

    def coordinates(self) -> list[np.ndarray]:
        return [np.arange(1, M + 1) * L / (M + 1) for L, M in zip(self.domain.sides, self.points)]

    def integrate(self, g: np.ndarray) -> np.ndarray:
        """Quadrature over the last ``n`` axes."""
        return self.weight * g.sum(axis=self.axes)


def _phi_functions(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """phi1(z) = (e^z - 1)/z and phi2(z) = (e^z - 1 - z)/z^2, stable near 0."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 0.1
    zs = np.where(small, z, 0.0)
    phi1_s = np.zeros_like(z)
    phi2_s = np.zeros_like(z)
    term = np.ones_like(z)
    fact = 1.0
    for k in range(16):
        # term = zs^k; phi1 += z^k/(k+1)!, phi2 += z^k/(k+2)!
        phi1_s += term / (fact * (k + 1))
        phi2_s += term / (fact * (k + 1) * (k + 2))
        fact *= k + 1
        term = term * zs
    zl = np.where(small, 1.0, z)
    ez = np.exp(zl)
    phi1 = np.where(small, phi1_s, (ez - 1.0) / zl)
    phi2 = np.where(small, phi2_s, (ez - 1.0 - zl) / zl ** 2)
    return phi1, phi2


def real_inner(x: np.ndarray, y: np.ndarray, n: int) -> np.ndarray:
    """``Re <x, y>`` summed over the trailing ``n`` mode axes."""
    return np.real(np.conj(x) * y).sum(axis=tuple(range(-n, 0)))


def gram_schmidt(frames: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Modified Gram-Schmidt in the real inner product; returns (orthonormal frames, norms)."""
    m = frames.shape[0]
    flat = frames.reshape(m, -1)
    vecs = np.concatenate([flat.real, flat.imag], axis=1)
    norms = np.empty(m)
    for j in range(m):
        v = vecs[j]
        for i in range(j):
            v -= (vecs[i] @ v) * vecs[i]
        nrm = math.sqrt(v @ v)
        if nrm == 0.0:
            raise ValueError("tangent frames are linearly dependent")
        vecs[j] = v / nrm
        norms[j] = nrm
    half = flat.shape[1]
    out = (vecs[:, :half] + 1j * vecs[:, half:]).reshape(frames.shape)
    return out, norms


@dataclass
class Trajectory:
    """Diagnostics sampled at orthonormalization instants."""

    n: int
    burn_in: float
    t_end: float
    times: np.ndarray
    l2_norm_sq: np.ndarray
    lp_norm_pow: np.ndarray
    traces: np.ndarray  # (samples, m): trace over the first j+1 frames
    h1_sums: np.ndarray  # (samples, m): sum of H1_0 seminorms of the first j+1 frames
    trace_bounds: np.ndarray  # (samples, m): right side of the trace inequality per prefix
    lt_ratios: np.ndarray  # (samples,): max over prefixes of ∫ρ^((n+2)/n) / h1 sum
    step_times: np.ndarray
    step_l2: np.ndarray
    final_state: State | None = None

    @property
    def m(self) -> int:
        return self.traces.shape[1]

    def window(self) -> np.ndarray:
        idx = np.nonzero(self.times >= self.burn_in - 1e-12)[0]
        if idx.size == 0:
            raise ValueError("no diagnostic samples after burn-in")
        return idx

    def csv_rows(self):
        idx0 = self.window()[0]
        for i, t in enumerate(self.times):
            trace_m = float(self.traces[i, -1]) if self.m else 0.0
            if i >= idx0:
                sl = slice(idx0, i + 1)
                qm = _time_average(self.times[sl], self.traces[sl, -1]) if self.m else 0.0
                dl = _time_average(self.times[sl], self.lp_norm_pow[sl])
            else:
                qm = dl = float("nan")
            yield {
                "t": repr(float(t)),
                "l2_norm_sq": repr(float(self.l2_norm_sq[i])),
                "lp_norm_pow": repr(float(self.lp_norm_pow[i])),
                "trace_m": repr(trace_m),
                "running_qm": repr(float(qm)),
                "running_delta": repr(float(dl)),
            }


DIAGNOSTIC_COLUMNS = ["t", "l2_norm_sq", "lp_norm_pow", "trace_m", "running_qm", "running_delta"]


def _time_average(t: np.ndarray, y: np.ndarray) -> float:
    if len(t) == 1:
        return float(y[0])
    return float(trapezoid(y, t) / (t[-1] - t[0]))


class CGLSimulator:
    def __init__(self, cfg: SimConfig, params: CGLParams):
        self.cfg = cfg
        self.params = params
        self.grid = SineGrid(cfg.domain, cfg.modes_per_axis, cfg.dealias)
        p = params
        self.linear = p.gamma - (p.lam + 1j * p.alpha) * self.grid.eigenvalues
        self._set_dt(cfg.dt)
        self._nl = -(p.kappa + 1j * p.beta)

    def _set_dt(self, h: float):
        z = h * self.linear
        self.h = h
        self.E = np.exp(z)
        phi1, phi2 = _phi_functions(z)
        self.hphi1 = h * phi1
        self.hphi2 = h * phi2

    # -- field evaluation ---------------------------------------------------

    def nonlinear(self, a: np.ndarray, ug: np.ndarray | None = None) -> np.ndarray:
        if ug is None:
            ug = self.grid.to_grid(a)
        return self.grid.from_grid(self._nl * (np.abs(ug) ** 2) * ug)

    def jacobian_nonlinear(self, ug: np.ndarray, U: np.ndarray) -> np.ndarray:
        """Derivative of the cubic term at grid field ``ug`` applied to coefficient arrays ``U``."""
        Ug = self.grid.to_grid(U)
        w = np.abs(ug) ** 2 * Ug + 2.0 * ug * np.real(np.conj(ug) * Ug)
        return self.grid.from_grid(self._nl * w)

    def jacobian(self, a: np.ndarray, U: np.ndarray) -> np.ndarray:
        """Full linearization F'(u)U including the linear part."""
        return self.linear * U + self.jacobian_nonlinear(self.grid.to_grid(a), U)

    # -- initial data -------------------------------------------------------

    def initial_coeffs(self) -> np.ndarray:
        ic = self.cfg.initial_condition
        shape = self.grid.modes
        a = np.zeros(shape, dtype=complex)
        if ic["kind"] == "single_mode":
            k = ic.get("k", 1)
            k = (k,) * self.grid.n if np.isscalar(k) else tuple(k)
            if len(k) != self.grid.n or any(not 1 <= ki <= N for ki, N in zip(k, shape)):
                raise ValueError(f"mode {k} outside the retained range {shape}")
            a[tuple(ki - 1 for ki in k)] = complex(ic.get("amplitude", 1.0))
        else:
            rng = np.random.default_rng(int(ic.get("seed", 0)))
            decay = float(ic.get("decay_rate", 1.0))
            amp = float(ic.get("amplitude", 1.0))
            kk = np.sqrt((self.grid.mode_indices.astype(float) ** 2).sum(axis=-1))
            noise = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            a = amp * noise * np.exp(-decay * kk)
        return a

    def random_frames(self, m: int, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        shape = (m,) + self.grid.modes
        frames = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        return gram_schmidt(frames)[0] if m else frames

    def sine_mode_frames(self, m: int) -> np.ndarray:
        """The first ``m`` real sine modes in increasing eigenvalue order."""
        order = np.argsort(self.grid.eigenvalues, axis=None, kind="stable")[:m]
        frames = np.zeros((m,) + self.grid.modes, dtype=complex)
        for j, flat in enumerate(order):
            frames[(j,) + np.unravel_index(flat, self.grid.modes)] = 1.0
        return frames

    def initial_state(self) -> State:
        m = self.cfg.tangent_count
        frames = self.random_frames(m, self.cfg.tangent_seed)
        return State(t=0.0, coeffs=self.initial_coeffs(), frames=frames,
                     log_volume=np.zeros(m))

    # -- stepping -----------------------------------------------------------

    def _guard(self, arr: np.ndarray, t_stable: float):
        if not np.all(np.isfinite(arr)) or np.max(np.abs(arr), initial=0.0) > self.cfg.overflow_guard:
            raise SimulationBlowUp(t_stable)

    def _advance(self, s: State, with_frames: bool) -> State:
        ug = self.grid.to_grid(s.coeffs)
        N0 = self.grid.from_grid(self._nl * np.abs(ug) ** 2 * ug)
        stage = self.E * s.coeffs + self.hphi1 * N0
        sg = self.grid.to_grid(stage)
        N1 = self.grid.from_grid(self._nl * np.abs(sg) ** 2 * sg)
        new = stage + self.hphi2 * (N1 - N0)
        self._guard(new, s.t)
        frames = s.frames
        if with_frames and s.m:
            J0 = self.jacobian_nonlinear(ug, frames)
            tstage = self.E * frames + self.hphi1 * J0
            J1 = self.jacobian_nonlinear(sg, tstage)
            frames = tstage + self.hphi2 * (J1 - J0)
            self._guard(frames, s.t)
        return State(t=s.t + self.h, coeffs=new, frames=frames, step_index=s.step_index + 1,
                     log_volume=s.log_volume)

    def step(self, s: State) -> State:
        """Advance the field by one time step; tangent frames are carried unchanged."""
        return self._advance(s, with_frames=False)

    def tangent_step(self, s: State) -> State:
        """Advance field and tangent frames; orthonormalize every ``reorth_interval`` steps."""
        out = self._advance(s, with_frames=True)
        if out.m and out.step_index % self.cfg.reorth_interval == 0:
            out = self.orthonormalize(out)
        return out

    def orthonormalize(self, s: State) -> State:
        if not s.m:
            return s
        frames, norms = gram_schmidt(s.frames)
        logv = (s.log_volume if s.log_volume is not None else np.zeros(s.m)) + np.log(norms)
        return replace(s, frames=frames, log_volume=logv)

    # -- diagnostics --------------------------------------------------------

    def l2_norm_sq(self, a: np.ndarray) -> float:
        return float(np.sum(np.abs(a) ** 2))

    def lp_norm_pow(self, a: np.ndarray) -> float:
        """Discrete ``||u||_{L^{n+2}}^{n+2}`` on the collocation grid."""
        return float(self.grid.integrate(np.abs(self.grid.to_grid(a)) ** (self.grid.n + 2)))

    def trace_terms(self, s: State) -> np.ndarray:
        """``Re (F'(u) φ_j, φ_j)`` for each frame; frames must be orthonormal."""
        if not s.m:
            return np.zeros(0)
        return real_inner(s.frames, self.jacobian(s.coeffs, s.frames), self.grid.n)

    def trace_estimate(self, s: State) -> float:
        return float(self.trace_terms(s).sum())

    def h1_terms(self, s: State) -> np.ndarray:
        if not s.m:
            return np.zeros(0)
        return (self.grid.eigenvalues * np.abs(s.frames) ** 2).sum(axis=self.grid.axes)

    def h1_sums(self, s: State) -> float:
        return float(self.h1_terms(s).sum())

    def density(self, s: State) -> np.ndarray:
        """Cumulative ρ on the grid: row j is sum of |φ_i|^2 for i <= j."""
        return np.cumsum(np.abs(self.grid.to_grid(s.frames)) ** 2, axis=0)

    def trace_rhs(self, s: State) -> float:
        """``-lam Σ||φ_j||²_H1 + 2|beta| ∫|u|²ρ + gamma m``."""
        p = self.params
        if not s.m:
            return 0.0
        rho = self.density(s)[-1]
        u2 = np.abs(self.grid.to_grid(s.coeffs)) ** 2
        return (-p.lam * self.h1_sums(s) + 2.0 * abs(p.beta) * float(self.grid.integrate(u2 * rho))
                + p.gamma * s.m)

    def frame_diagnostics(self, s: State) -> dict[str, np.ndarray]:
        """Prefix-cumulative traces, H1 sums, trace-inequality right sides and LT ratios."""
        if not s.m:
            empty = np.zeros(0)
            return {"traces": empty, "h1_sums": empty, "trace_bounds": empty, "lt_ratios": empty}
        p, n = self.params, self.grid.n
        traces = np.cumsum(self.trace_terms(s))
        h1 = np.cumsum(self.h1_terms(s))
        rho = self.density(s)
        u2 = np.abs(self.grid.to_grid(s.coeffs)) ** 2
        j = np.arange(1, s.m + 1)
        bounds = -p.lam * h1 + 2.0 * abs(p.beta) * self.grid.integrate(u2 * rho) + p.gamma * j
        lt = self.grid.integrate(rho ** ((n + 2.0) / n)) / h1
        return {"traces": traces, "h1_sums": h1, "trace_bounds": bounds, "lt_ratios": lt}

    def lieb_thirring_ratios(self, s: State) -> np.ndarray:
        """∫ρ^((n+2)/n) / Σ||φ||²_H1 for every prefix of the frame family."""
        return self.frame_diagnostics(s)["lt_ratios"]

    # -- driver -------------------------------------------------------------

    def run(self, state: State | None = None, frozen: bool = False) -> Trajectory:
        """Integrate to ``t_end`` recording diagnostics at each orthonormalization.

        With ``frozen=True`` the field and frames are held fixed and only the
        diagnostics are evaluated on the time grid.
        """
        cfg = self.cfg
        s = state if state is not None else self.initial_state()
        s = self.orthonormalize(s)
        n_steps = cfg.n_steps
        rows: list[tuple] = []
        step_t = np.empty(n_steps + 1)
        step_l2 = np.empty(n_steps + 1)
        step_t[0], step_l2[0] = s.t, self.l2_norm_sq(s.coeffs)

        def record(st: State):
            fd = self.frame_diagnostics(st)
            lt = fd["lt_ratios"]
            rows.append((st.t, self.l2_norm_sq(st.coeffs), self.lp_norm_pow(st.coeffs),
                         fd["traces"], fd["h1_sums"], fd["trace_bounds"],
                         float(lt.max()) if lt.size else 0.0))

        record(s)
        for i in range(1, n_steps + 1):
            if frozen:
                s = replace(s, t=s.t + self.h, step_index=s.step_index + 1)
            else:
                s = self._advance(s, with_frames=True)
            step_t[i], step_l2[i] = s.t, self.l2_norm_sq(s.coeffs)
            if i % cfg.reorth_interval == 0 or i == n_steps:
                s = self.orthonormalize(s)
                record(s)
        m = s.m
        return Trajectory(
            n=self.grid.n,
            burn_in=cfg.burn_in,
            t_end=float(s.t),
            times=np.array([r[0] for r in rows]),
            l2_norm_sq=np.array([r[1] for r in rows]),
            lp_norm_pow=np.array([r[2] for r in rows]),
            traces=np.array([r[3] for r in rows]).reshape(len(rows), m),
            h1_sums=np.array([r[4] for r in rows]).reshape(len(rows), m),
            trace_bounds=np.array([r[5] for r in rows]).reshape(len(rows), m),
            lt_ratios=np.array([r[6] for r in rows]),
            step_times=step_t,
            step_l2=step_l2,
            final_state=s,
        )


def empirical_qm(traj: Trajectory, m: int) -> float:
    """Post-burn-in time average of the trace over the first ``m`` frames."""
    if m == 0:
        return 0.0
    if not 1 <= m <= traj.m:
        raise ValueError(f"m={m} exceeds the {traj.m} propagated frames")
    idx = traj.window()
    return _time_average(traj.times[idx], traj.traces[idx, m - 1])


def delta_estimate(traj: Trajectory) -> float:
    """Post-burn-in time average of ``||u||_{L^{n+2}}^{n+2}``."""
    idx = traj.window()
    return _time_average(traj.times[idx], traj.lp_norm_pow[idx])


def delta_trend(traj: Trajectory, levels: int = 3) -> list[dict[str, float]]:
    """δ over horizons halving back from ``t_end``, shortest first."""
    idx = traj.window()
    t0 = traj.times[idx[0]]
    out = []
    for k in reversed(range(levels)):
        horizon = (traj.t_end - t0) / 2 ** k
        sel = idx[traj.times[idx] <= t0 + horizon + 1e-12]
        out.append({"horizon": float(horizon),
                    "delta": _time_average(traj.times[sel], traj.lp_norm_pow[sel])})
    return out


def lieb_thirring_witness(traj: Trajectory) -> float:
    return float(traj.lt_ratios.max()) if traj.m else 0.0


def log_volume_rates(traj: Trajectory) -> np.ndarray:
    """Finite-time Lyapunov exponent estimates from accumulated Gram-Schmidt stretching."""
    s = traj.final_state
    if s is None or not s.m or s.t == 0:
        return np.zeros(0)
    return s.log_volume / s.t
