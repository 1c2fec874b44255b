"""``attractor-bounds <spectrum|bounds|simulate|report> --config FILE [overrides]``

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical blow-up during simulation.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Any

from . import _io
from .bounds import (
    TRIVIAL,
    build_report,
    constant_A,
    majorant_B,
    trace_majorant,
)
from .config import COMMANDS, ConfigError, RunConfig, apply_overrides, apply_sweep_point, load_document, parse
from .geometry import moment_of_inertia, volume
from .simulator import (
    DIAGNOSTIC_COLUMNS,
    CGLSimulator,
    SimulationBlowUp,
    Trajectory,
    delta_estimate,
    delta_trend,
    empirical_qm,
    lieb_thirring_witness,
    log_volume_rates,
)
from .spectrum import CSV_COLUMNS, enumerate_eigenvalues, verify_bounds

log = logging.getLogger("attractor_bounds")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BLOWUP = 0, 1, 2, 3

SWEEP_COLUMNS = ["point", "Lambda1", "regime", "delta", "A", "B", "d_star", "d_star_baseline"]


def _thread_cap() -> int:
    raw = os.environ.get("ATTRACTOR_BOUNDS_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            log.warning("ignoring non-integer ATTRACTOR_BOUNDS_THREADS=%r", raw)
    return os.cpu_count() or 1


def cmd_spectrum(cfg: RunConfig) -> int:
    if not cfg.domain.is_box:
        raise ConfigError("spectrum verification needs a box domain")
    rep = verify_bounds(cfg.domain, cfg.m_max, cfg.consts)
    _io.write_csv(cfg.output_dir / "verification.csv", CSV_COLUMNS, rep.rows())
    if not rep.ok:
        bad = [int(m) for m, ok in zip(rep.m, rep.passed) if not ok]
        log.error("eigenvalue-sum inequalities fail for m in %s", bad[:10])
        return EXIT_FAIL
    return EXIT_OK


def _resolve_delta(cfg: RunConfig) -> float:
    if cfg.delta is None:
        log.warning("no delta supplied; using delta = 0 (the beta-term of B then vanishes)")
        return 0.0
    return cfg.delta


def cmd_bounds(cfg: RunConfig) -> int:
    delta = _resolve_delta(cfg)
    report = build_report(cfg.domain, cfg.params, delta, cfg.consts, Lambda1=cfg.Lambda1)
    out = {"config": cfg.resolved(), "report": report.to_dict()}
    if cfg.sweep:
        rows = _run_sweep(cfg)
        _io.write_csv(cfg.output_dir / "sweep.csv", ["point", *_sweep_keys(cfg)] + SWEEP_COLUMNS[1:],
                      rows)
    _io.write_json(cfg.output_dir / "bounds.json", out)
    return EXIT_OK


def _sweep_keys(cfg: RunConfig) -> list[str]:
    keys: list[str] = []
    for point in cfg.sweep or []:
        keys.extend(k for k in point if k not in keys)
    return keys


def _run_sweep(cfg: RunConfig) -> list[dict[str, Any]]:
    keys = _sweep_keys(cfg)
    base = dict(cfg.raw)
    base.pop("sweep", None)

    def run_point(i_point):
        i, point = i_point
        sub = parse(apply_sweep_point(base, point), "bounds")
        delta = sub.delta if sub.delta is not None else 0.0
        rep = build_report(sub.domain, sub.params, delta, sub.consts, Lambda1=sub.Lambda1)
        _io.write_json(cfg.output_dir / "sweep" / f"point_{i:04d}.json",
                       {"config": sub.resolved(), "report": rep.to_dict()})
        row = {"point": i, **{k: point.get(k, "") for k in keys}}
        row.update({k: v if isinstance(v, str) else repr(float(v))
                    for k, v in rep.to_dict().items()})
        return row

    with ThreadPoolExecutor(max_workers=min(_thread_cap(), len(cfg.sweep))) as pool:
        return list(pool.map(run_point, enumerate(cfg.sweep)))


def _simulate(cfg: RunConfig) -> tuple[Trajectory, dict[str, Any]]:
    sim = CGLSimulator(cfg.sim, cfg.params)
    traj = sim.run()
    p = cfg.params
    Lambda1 = float(enumerate_eigenvalues(cfg.domain, 1).values[0])
    T = traj.t_end
    l2_0 = float(traj.step_l2[0])
    envelope = l2_0 * math.exp(2.0 * (p.gamma - p.lam * Lambda1) * T)
    ms = cfg.report_m or list(range(1, traj.m + 1))
    summary = {
        "t_end": T,
        "delta": delta_estimate(traj),
        "delta_trend": delta_trend(traj),
        "empirical_qm": {str(m): empirical_qm(traj, m) for m in ms},
        "lieb_thirring_witness": lieb_thirring_witness(traj),
        "lyapunov_estimates": [float(x) for x in log_volume_rates(traj)],
        "initial_l2_norm_sq": l2_0,
        "final_l2_norm_sq": float(traj.step_l2[-1]),
        "l2_envelope": envelope,
        "below_envelope": bool(traj.step_l2[-1] <= envelope * (1.0 + 1e-6)),
    }
    return traj, summary


def cmd_simulate(cfg: RunConfig) -> int:
    traj, summary = _simulate(cfg)
    _io.write_csv(cfg.output_dir / "diagnostics.csv", DIAGNOSTIC_COLUMNS, traj.csv_rows())
    _io.write_json(cfg.output_dir / "summary.json", {"config": cfg.resolved(), **summary})
    return EXIT_OK


def advisory_check(cfg: RunConfig, summary: dict[str, Any]) -> dict[str, Any]:
    """Compare each empirical q_m with the majorant -A m^((n+2)/n) + B built from the measured δ."""
    d, p, consts = cfg.domain, cfg.params, cfg.consts
    n, V, I = d.n, volume(d), moment_of_inertia(d)
    A = constant_A(n, V, p.lam, consts)
    B_emp = majorant_B(n, V, I, p, summary["delta"], consts)
    rows = []
    for key, qm in summary["empirical_qm"].items():
        m = int(key)
        f = trace_majorant(m, A, B_emp, n)
        rows.append({"m": m, "empirical_qm": qm, "majorant": f, "holds": bool(qm <= f)})
    m_cross = math.floor((B_emp / A) ** (n / (n + 2.0))) + 1 if B_emp > 0 else 1
    lt_ok = summary["lieb_thirring_witness"] <= consts.C_star
    return {
        "A": A,
        "B_emp": B_emp,
        "rows": rows,
        "first_m_with_negative_majorant": m_cross,
        "lieb_thirring_constant_ok": bool(lt_ok),
        "pass": bool(lt_ok and all(r["holds"] for r in rows)),
    }


def cmd_report(cfg: RunConfig) -> int:
    traj, summary = _simulate(cfg)
    report = build_report(cfg.domain, cfg.params, summary["delta"], cfg.consts, Lambda1=cfg.Lambda1)
    advisory = advisory_check(cfg, summary)
    if not advisory["lieb_thirring_constant_ok"]:
        log.warning("configured C_star=%g is below the empirical Lieb-Thirring witness %g",
                    cfg.consts.C_star, summary["lieb_thirring_witness"])
    doc = {
        "config": cfg.resolved(),
        "report": report.to_dict(),
        "simulation": summary,
        "advisory": advisory,
        "notes": {
            "d_star": report.d_star,
            "first_m_with_negative_majorant": advisory["first_m_with_negative_majorant"],
            "attractor_is_zero": report.regime == TRIVIAL,
        },
    }
    _io.write_json(cfg.output_dir / "report.json", doc)
    return EXIT_OK


HANDLERS = {"spectrum": cmd_spectrum, "bounds": cmd_bounds,
            "simulate": cmd_simulate, "report": cmd_report}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="attractor-bounds",
                                 description="Dimension bounds for the Dirichlet CGL attractor.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--gamma", type=float, help="linear growth rate")
    ap.add_argument("--c", type=float, help="Melas numerator")
    ap.add_argument("--m-max", type=int, dest="m_max", help="largest m in the spectrum table")
    ap.add_argument("--dt", type=float, help="simulator time step")
    ap.add_argument("--t-end", type=float, dest="t_end", help="simulated horizon")
    ap.add_argument("--seed", type=int, help="initial-condition seed")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        doc = apply_overrides(load_document(args.config), gamma=args.gamma, c=args.c,
                              m_max=args.m_max, dt=args.dt, t_end=args.t_end, seed=args.seed,
                              out=args.out)
        cfg = parse(doc, args.command)
        return HANDLERS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationBlowUp as exc:
        print(f"simulation blew up: {exc} (last stable t = {exc.t_stable:.6g})", file=sys.stderr)
        return EXIT_BLOWUP


if __name__ == "__main__":
    sys.exit(main())
