"""Batch front end: config parsing, orchestration and CSV/JSON artifacts.

One self-describing JSON config defines an experiment (ring geometry with an
N grid, force, integration and analysis settings); subcommands wrap the
library operations:

    coeffs    write one coefficient table per N
    simulate  integrate the equations of motion, write trajectory + summary
    compare   series-vs-integration velocity error report
    radius    radius estimates across the N grid
    verify    aggregate hard checks into a single PASS/FAIL exit code
    sweep     growth exponents, radius trend, bounds and majorant report

Outputs are deterministic (fixed ordering, fixed float formatting) and files
are written atomically (temp + rename).  Exit codes: 0 ok, 2 config error,
3 overflow, 4 collision, 5 verification failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import analysis as ana
from . import ode, series
from .errors import CollisionError, ConfigError, StiffnessError
from .force import ForceSpec, c_f_bound
from .ring import RingConfig

__all__ = [
    "ExperimentConfig",
    "load_config",
    "cmd_coeffs",
    "cmd_simulate",
    "cmd_compare",
    "cmd_radius",
    "cmd_verify",
    "cmd_sweep",
    "main",
    "entrypoint",
]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_OVERFLOW = 3
EXIT_COLLISION = 4
EXIT_VERIFY = 5

_FORMATS = ("csv", "json", "both")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description (one ring config per grid N)."""

    Ns: tuple[int, ...]
    L: float
    j_max: int
    scale: float | None  # None = automatic rescale per N
    force: ForceSpec
    t_end: float
    rel_tol: float
    abs_tol: float
    sample_count: int
    tail_fraction: float
    out_dir: Path
    formats: tuple[str, ...]

    def ring(self, N: int) -> RingConfig:
        return RingConfig(N=N, L=self.L, force=self.force, j_max=self.j_max, scale=self.scale)

    def rings(self) -> list[RingConfig]:
        return [self.ring(N) for N in self.Ns]


def _need(obj: dict, field: str, path: str):
    if field not in obj:
        raise ConfigError(f"{path}.{field}: missing required field")
    return obj[field]


def _as_number(value, path: str, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    v = float(value)
    if positive and not (v > 0.0 and math.isfinite(v)):
        raise ConfigError(f"{path}: must be positive and finite, got {value!r}")
    return v


def _as_int(value, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{path}: must be >= {minimum}, got {value}")
    return value


def parse_config(obj: dict) -> ExperimentConfig:
    if not isinstance(obj, dict):
        raise ConfigError("config: top level must be a JSON object")

    ring = _need(obj, "ring", "config")
    if not isinstance(ring, dict):
        raise ConfigError("ring: expected an object")
    n_raw = _need(ring, "N", "ring")
    if isinstance(n_raw, list):
        Ns = tuple(_as_int(v, f"ring.N[{i}]", minimum=2) for i, v in enumerate(n_raw))
        if not Ns:
            raise ConfigError("ring.N: grid must not be empty")
        if any(b <= a for a, b in zip(Ns, Ns[1:])):
            raise ConfigError(f"ring.N: grid must be strictly increasing, got {list(Ns)}")
    else:
        Ns = (_as_int(n_raw, "ring.N", minimum=2),)
    L = _as_number(_need(ring, "L", "ring"), "ring.L", positive=True)
    j_max = _as_int(_need(ring, "J_max", "ring"), "ring.J_max", minimum=1)
    scale_raw = ring.get("scale", "auto")
    if scale_raw == "auto":
        scale = None
    else:
        scale = _as_number(scale_raw, "ring.scale", positive=True)

    force_obj = _need(obj, "force", "config")
    if not isinstance(force_obj, dict):
        raise ConfigError("force: expected an object")
    force_json = dict(force_obj)
    force_json.setdefault("L", L)
    _as_number(force_json["L"], "force.L", positive=True)
    if force_json["L"] != L:
        raise ConfigError(f"force.L: {force_json['L']} does not match ring.L = {L}")
    harmonics = force_json.get("harmonics", [])
    if not isinstance(harmonics, list):
        raise ConfigError("force.harmonics: expected a list")
    for i, h in enumerate(harmonics):
        if not isinstance(h, dict):
            raise ConfigError(f"force.harmonics[{i}]: expected an object")
        _as_int(_need(h, "k", f"force.harmonics[{i}]"), f"force.harmonics[{i}].k", minimum=1)
        for key in ("a", "b"):
            if key in h:
                _as_number(h[key], f"force.harmonics[{i}].{key}")
    if "a0" in force_json:
        _as_number(force_json["a0"], "force.a0")
    try:
        force = ForceSpec.from_json(force_json)
    except ConfigError as exc:
        raise ConfigError(f"force: {exc}") from exc

    ode_obj = obj.get("ode", {})
    if not isinstance(ode_obj, dict):
        raise ConfigError("ode: expected an object")
    t_end = _as_number(ode_obj.get("t_end", 0.05), "ode.t_end", positive=True)
    rel_tol = _as_number(ode_obj.get("rel_tol", 1e-10), "ode.rel_tol", positive=True)
    abs_tol = _as_number(ode_obj.get("abs_tol", 1e-12), "ode.abs_tol", positive=True)
    for name, tol in (("ode.rel_tol", rel_tol), ("ode.abs_tol", abs_tol)):
        if tol > 1e-2:
            raise ConfigError(f"{name}: must be <= 1e-2, got {tol}")
    sample_count = _as_int(ode_obj.get("sample_count", 10), "ode.sample_count", minimum=1)

    ana_obj = obj.get("analysis", {})
    if not isinstance(ana_obj, dict):
        raise ConfigError("analysis: expected an object")
    tail_fraction = _as_number(ana_obj.get("tail_fraction", 0.5), "analysis.tail_fraction")
    if not (0.0 < tail_fraction <= 1.0):
        raise ConfigError(f"analysis.tail_fraction: must lie in (0, 1], got {tail_fraction}")
    if "n_grid" in ana_obj and ana_obj["n_grid"] is not None:
        grid = ana_obj["n_grid"]
        if not isinstance(grid, list):
            raise ConfigError("analysis.n_grid: expected a list")
        Ns = tuple(_as_int(v, f"analysis.n_grid[{i}]", minimum=2) for i, v in enumerate(grid))
        if any(b <= a for a, b in zip(Ns, Ns[1:])):
            raise ConfigError("analysis.n_grid: grid must be strictly increasing")

    out_obj = obj.get("output", {})
    if not isinstance(out_obj, dict):
        raise ConfigError("output: expected an object")
    out_dir = out_obj.get("directory", "out")
    if not isinstance(out_dir, str):
        raise ConfigError(f"output.directory: expected a string, got {out_dir!r}")
    formats_raw = out_obj.get("formats", ["csv", "json"])
    if isinstance(formats_raw, str):
        formats_raw = [formats_raw]
    if not isinstance(formats_raw, list) or not formats_raw:
        raise ConfigError("output.formats: expected a non-empty list")
    for f in formats_raw:
        if f not in ("csv", "json"):
            raise ConfigError(f"output.formats: unknown format {f!r}")
    formats = tuple(dict.fromkeys(formats_raw))

    return ExperimentConfig(
        Ns=Ns,
        L=L,
        j_max=j_max,
        scale=scale,
        force=force,
        t_end=t_end,
        rel_tol=rel_tol,
        abs_tol=abs_tol,
        sample_count=sample_count,
        tail_fraction=tail_fraction,
        out_dir=Path(out_dir),
        formats=formats,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path}: {exc}") from exc
    return parse_config(obj)


# ---------------------------------------------------------------------------
# deterministic output helpers

def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _json_text(payload) -> str:
    # repr-based floats round-trip losslessly and are deterministic
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _write_json(path: Path, payload) -> None:
    _atomic_write(path, _json_text(payload))


# ---------------------------------------------------------------------------
# commands

def _tables(cfg: ExperimentConfig, threads: int = 1) -> list[series.CoefficientTable]:
    rings = cfg.rings()
    if threads > 1 and len(rings) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(series.compute_coefficients, rings))
    return [series.compute_coefficients(rc) for rc in rings]


def cmd_coeffs(cfg: ExperimentConfig, threads: int = 1) -> list[Path]:
    """Write one coefficient table per grid N; returns the written paths."""
    written = []
    for table in _tables(cfg, threads):
        base = cfg.out_dir / f"coeffs_N{table.N}"
        if "csv" in cfg.formats:
            path = base.with_suffix(".csv")
            _atomic_write(path, series.table_csv(table))
            written.append(path)
        if "json" in cfg.formats:
            path = base.with_suffix(".json")
            _write_json(path, series.table_json(table, cfg.force))
            written.append(path)
    return written


def cmd_simulate(cfg: ExperimentConfig, threads: int = 1) -> Path:
    """Integrate each grid member; write trajectory CSVs and a summary JSON."""
    summary = []
    for rc in cfg.rings():
        t_eval = np.linspace(0.0, cfg.t_end, cfg.sample_count + 1)
        sol = ode.integrate(rc, cfg.t_end, cfg.rel_tol, cfg.abs_tol, t_eval=t_eval)
        if "csv" in cfg.formats:
            lines = ["t,i,x,v"]
            for st in sol.states:
                for i in range(rc.N):
                    lines.append(f"{st.t:.17g},{i},{st.x[i]:.17g},{st.v[i]:.17g}")
            _atomic_write(cfg.out_dir / f"trajectory_N{rc.N}.csv", "\n".join(lines) + "\n")
        drift = None
        if cfg.force.a0 == 0.0:
            e0 = ode.energy(rc, sol.states[0])
            drift = max(abs(ode.energy(rc, st) - e0) for st in sol.states) / abs(e0)
        summary.append(
            {
                "N": rc.N,
                "t_end": cfg.t_end,
                "n_steps": sol.n_steps,
                "n_rhs_evals": sol.n_rhs_evals,
                "min_step": sol.min_step,
                "max_step": sol.max_step,
                "local_error_bound": sol.local_error_bound,
                "max_energy_drift": drift,
            }
        )
    path = cfg.out_dir / "simulate.json"
    _write_json(path, {"runs": summary})
    return path


def _compare_one(cfg: ExperimentConfig, rc: RingConfig) -> dict:
    table = series.compute_coefficients(rc)
    r_hat = math.inf
    if rc.j_max >= 8:
        est = ana.estimate_radius(table, tail_fraction=cfg.tail_fraction)
        r_hat = est.r_hat
    horizon = cfg.t_end if not math.isfinite(r_hat) else min(cfg.t_end, 0.5 * r_hat)
    times = np.linspace(horizon / cfg.sample_count, horizon, cfg.sample_count)
    sol = ode.integrate(rc, horizon, cfg.rel_tol, cfg.abs_tol, t_eval=times)
    max_rel = 0.0
    for st in sol.states:
        v_series = series.evaluate_velocity(table, st.t)
        denom = max(float(np.max(np.abs(st.v))), series.TINY)
        max_rel = max(max_rel, float(np.max(np.abs(v_series - st.v))) / denom)
    tau = horizon / table.scale
    tail = float(
        np.max(
            np.abs(table.data[:, table.j_max - 1]) * abs(tau) ** (table.j_max - 1)
            + np.abs(table.data[:, table.j_max]) * abs(tau) ** table.j_max
        )
    )
    return {
        "N": rc.N,
        "horizon": horizon,
        "R_hat": None if not math.isfinite(r_hat) else r_hat,
        "max_rel_velocity_error": max_rel,
        "truncation_tail_estimate": tail,
    }


def cmd_compare(cfg: ExperimentConfig, threads: int = 1) -> Path:
    """Series-vs-integration report: max relative velocity error per N."""
    per_n = [_compare_one(cfg, rc) for rc in cfg.rings()]
    payload = {
        "per_N": per_n,
        "max_rel_velocity_error": max(r["max_rel_velocity_error"] for r in per_n),
    }
    path = cfg.out_dir / "compare.json"
    _write_json(path, payload)
    return path


def _radius_csv(estimates) -> str:
    lines = ["N,J_max,method,R_hat,window_lo,window_hi,fit_residual,degenerate"]
    for e in estimates:
        lines.append(
            f"{e.N},{e.j_max},{e.method},{e.r_hat:.17g},{e.window[0]},{e.window[1]},"
            f"{e.fit_residual:.17g},{int(e.degenerate)}"
        )
    return "\n".join(lines) + "\n"


def cmd_radius(cfg: ExperimentConfig, threads: int = 1) -> Path:
    """Radius estimates for every grid N plus the cross-N trend."""
    tables = _tables(cfg, threads)
    estimates = [ana.estimate_radius(t, tail_fraction=cfg.tail_fraction) for t in tables]
    trend = ana.radius_trend(estimates)
    payload = {
        "radius": [e.to_json() for e in estimates],
        "trend": trend.to_json(),
    }
    path = cfg.out_dir / "radius.json"
    _write_json(path, payload)
    if "csv" in cfg.formats:
        _atomic_write(cfg.out_dir / "radius.csv", _radius_csv(estimates))
    return path


def cmd_sweep(cfg: ExperimentConfig, threads: int = 1) -> Path:
    """Exponent fits, radius trend, bound checks and majorant report."""
    tables = _tables(cfg, threads)
    exponents = []
    if len(tables) >= 4:
        for j in (1, 3, 5, 7, 9):
            if j > cfg.j_max:
                continue
            try:
                exponents.append(ana.exponent_fit(tables, j).to_json())
            except ConfigError:
                continue  # identically-zero column (e.g. constant force)
    estimates = []
    if cfg.j_max >= 8:
        estimates = [ana.estimate_radius(t, tail_fraction=cfg.tail_fraction) for t in tables]
    bounds = ana.bound_check(tables, _c_f(cfg))
    maj = ana.majorant(2.0, 40)
    payload = {
        "radius": [e.to_json() for e in estimates],
        "trend": ana.radius_trend(estimates).to_json() if estimates else None,
        "exponents": exponents,
        "bounds": bounds.to_json(),
        "majorant": maj.to_json(),
    }
    path = cfg.out_dir / "sweep.json"
    _write_json(path, payload)
    if "csv" in cfg.formats:
        lines = ["j,slope,half_width,cap_half,cap_five_sixths"]
        for e in exponents:
            lines.append(
                f"{e['j']},{e['slope']:.17g},{e['half_width']:.17g},"
                f"{e['cap_half']:.17g},{e['cap_five_sixths']:.17g}"
            )
        _atomic_write(cfg.out_dir / "exponents.csv", "\n".join(lines) + "\n")
        if estimates:
            _atomic_write(cfg.out_dir / "radius.csv", _radius_csv(estimates))
    return path


def _c_f(cfg: ExperimentConfig) -> float:
    return c_f_bound(cfg.force)


def cmd_verify(cfg: ExperimentConfig, threads: int = 1, out=sys.stdout) -> bool:
    """Aggregate the hard checks; print one PASS/FAIL line per check."""
    ok = True

    def check(name: str, passed: bool, detail: str = "") -> None:
        nonlocal ok
        ok = ok and passed
        suffix = f"  ({detail})" if detail else ""
        print(f"{'PASS' if passed else 'FAIL'}  {name}{suffix}", file=out)

    tables = _tables(cfg, threads)
    report = ana.bound_check(tables, _c_f(cfg))
    check("order-3 magnitude bound", report.hard_c3_ok)
    check("order-4 magnitude bound", report.hard_c4_ok)

    # Enumeration cross-check on small rings with the configured force.
    max_err = 0.0
    j_cap = min(9, cfg.j_max)
    for N in (3, 4, 8):
        rc = RingConfig(N=N, L=cfg.L, force=cfg.force, j_max=j_cap, scale=cfg.scale)
        fast = series.compute_coefficients(rc)
        slow = series.oracle_coefficients(rc, j_cap)
        for j in range(1, j_cap + 1):
            col_scale = max(float(np.max(np.abs(slow.data[:, j]))), series.TINY)
            err = float(np.max(np.abs(fast.data[:, j] - slow.data[:, j]))) / col_scale
            max_err = max(max_err, err)
    check("composition-sum cross-check", max_err <= 1e-10, f"max rel err {max_err:.2e}")

    lemma = ana.majorant_lemma_check(2.0, 30)
    check("majorant self-domination", lemma.all_hold)

    _write_json(
        cfg.out_dir / "verify.json",
        {
            "bounds": report.to_json(),
            "oracle_max_rel_err": max_err,
            "majorant_lemma": lemma.to_json(),
            "passed": ok
            and report.hard_c3_ok
            and report.hard_c4_ok
            and lemma.all_hold,
        },
    )
    return ok


# ---------------------------------------------------------------------------
# argument parsing and dispatch

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="experiment config JSON")
    common.add_argument("--out", default=None, help="override output directory")
    common.add_argument("--format", default=None, choices=_FORMATS, help="override output formats")
    common.add_argument("--threads", type=int, default=1, help="parallel sweep members")

    parser = argparse.ArgumentParser(
        prog="coulomb-chain",
        description="Velocity Taylor expansion and diagnostics for the repulsive ring chain",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        sub.add_parser(name, parents=[common], help=fn.__doc__)
    return parser


_COMMANDS = {
    "coeffs": cmd_coeffs,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "radius": cmd_radius,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    updates = {}
    if args.out is not None:
        updates["out_dir"] = Path(args.out)
    if args.format is not None:
        updates["formats"] = ("csv", "json") if args.format == "both" else (args.format,)
    if not updates:
        return cfg
    return replace(cfg, **updates)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        if args.command == "verify":
            return EXIT_OK if cmd_verify(cfg, threads=args.threads) else EXIT_VERIFY
        _COMMANDS[args.command](cfg, threads=args.threads)
        return EXIT_OK
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OverflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except CollisionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COLLISION
    except StiffnessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
