"""Batch front-end: parse a run configuration, execute pipelines, emit artifacts.

Three subcommands:

    solve       evolve a preset in one frame, writing a norm/support series
                CSV and state snapshots at the output times
    tw          dump the interface orbit (and, below the separatrix speed,
                the hump and plateau-barrier tables) for one wave speed
    acceptance  run the acceptance criteria and write verdicts.json

Configuration comes from an optional flat key=value file plus flag overrides
(flags win); the GRADFLOW_OUT environment variable overrides the output
directory.  Identical configurations produce bitwise-identical outputs; every
file carries a header naming its columns and the configuration hash.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .acceptance import AcceptanceSuite
from .analysis import SeriesRecorder
from .domain import FrameTag, InitialData, ModelParams, make_grid, sample_initial
from .errors import ConfigError, GradflowError
from .solver import evolve
from .waves import TWParams, build_hump, build_plateau_subsolution, integrate_interface_orbit

_FORM_TO_FRAME = {
    "original": FrameTag.ORIGINAL,
    "v": FrameTag.RESCALED_V,
    "w": FrameTag.RESCALED_W,
}
_PRESETS = ("bump", "explicit_wave", "cap", "sandpile")


@dataclass
class RunConfig:
    command: str = "solve"
    p: float = 3.0
    N: int = 1
    form: str = "v"
    grid: str = "line"
    r_max: float = 8.0
    grid_cells: int = 800
    preset: str = "bump"
    r0: float = 1.0
    amplitude: float = 1.0
    K: float = 0.0
    t_end: float = 5.0
    output_times: tuple = ()
    out: str = "gradflow-out"
    c: float = 1.0
    alpha: float = 0.0
    z_extent: float = 20.0
    diagnostics: bool = True

    def resolved_lines(self) -> list[str]:
        rows = []
        for f in fields(self):
            if f.name == "out":   # the destination does not affect the compute
                continue
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(f"{x:.17g}" for x in v)
            rows.append(f"{f.name}={v}")
        return sorted(rows)

    def hash(self) -> str:
        blob = "\n".join(self.resolved_lines()).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


_PARSERS = {
    "p": float, "N": int, "form": str, "grid": str, "r_max": float,
    "grid_cells": int, "preset": str, "r0": float, "amplitude": float,
    "K": float, "t_end": float, "out": str, "c": float, "alpha": float,
    "z_extent": float,
    "output_times": lambda s: tuple(float(x) for x in str(s).split(",") if x.strip()),
    "diagnostics": lambda s: str(s).lower() in ("1", "true", "yes", "on"),
}


def _read_config_file(path: str) -> dict:
    entries = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        entries[key] = value
    return entries


def parse_config(file: str | None = None, overrides: dict | None = None,
                 command: str = "solve") -> RunConfig:
    """Build a validated RunConfig from a key=value file plus overrides.

    Unknown keys and out-of-range values raise ConfigError naming the key;
    flags (overrides) win over file entries.
    """
    cfg = RunConfig(command=command)
    merged: dict = {}
    if file is not None:
        merged.update(_read_config_file(file))
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value

    q_declared = merged.pop("q", None)
    for key, value in merged.items():
        if key not in _PARSERS:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            setattr(cfg, key, _PARSERS[key](value))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"config key {key!r}: {exc}") from exc

    if not cfg.p > 2.0:
        raise ConfigError("config key 'p': p must exceed 2")
    if q_declared is not None and abs(float(q_declared) - (cfg.p - 1.0)) > 1e-12:
        raise ConfigError("config key 'q': only the critical case q = p - 1 is supported")
    if cfg.N < 1:
        raise ConfigError("config key 'N': dimension must be >= 1")
    if cfg.form not in _FORM_TO_FRAME:
        raise ConfigError(f"config key 'form': unknown form {cfg.form!r}")
    if cfg.grid not in ("line", "radial"):
        raise ConfigError(f"config key 'grid': unknown grid kind {cfg.grid!r}")
    if cfg.preset not in _PRESETS:
        raise ConfigError(f"config key 'preset': unknown preset {cfg.preset!r}")
    if not cfg.r_max > 0:
        raise ConfigError("config key 'r_max': must be positive")
    if cfg.grid_cells < 8:
        raise ConfigError("config key 'grid_cells': need at least 8 cells")
    if cfg.t_end < 0:
        raise ConfigError("config key 't_end': must be >= 0")
    if not cfg.c > 0:
        raise ConfigError("config key 'c': wave speed must be positive")
    if cfg.alpha < 0:
        raise ConfigError("config key 'alpha': damping must be >= 0")
    if any(t <= 0 for t in cfg.output_times):
        raise ConfigError("config key 'output_times': times must be positive")

    env_out = os.environ.get("GRADFLOW_OUT")
    if env_out:
        cfg.out = env_out
    return cfg


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


class _Writer:
    def __init__(self, cfg: RunConfig):
        self.dir = Path(cfg.out)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.hash = cfg.hash()

    def csv(self, name: str, columns: list[str], rows) -> Path:
        path = self.dir / name
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# config={self.hash}\n")
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) if isinstance(v, (int, float, np.floating))
                                  else str(v) for v in row) + "\n")
        return path

    def json(self, name: str, payload) -> Path:
        path = self.dir / name
        payload = {"config": self.hash, **payload}
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
        return path


def run_solve(cfg: RunConfig) -> int:
    params = ModelParams(p=cfg.p, N=cfg.N)
    grid = make_grid(cfg.grid, cfg.r_max, cfg.grid_cells)
    preset = {
        "bump": lambda: InitialData.bump(cfg.r0, cfg.amplitude),
        "explicit_wave": lambda: InitialData.explicit_wave(cfg.K),
        "cap": lambda: InitialData.cap(),
        "sandpile": lambda: InitialData.sandpile(),
    }[cfg.preset]()
    state = sample_initial(preset, grid, params, frame_tag=_FORM_TO_FRAME[cfg.form])

    writer = _Writer(cfg)
    recorder = SeriesRecorder()
    snapshots = []

    def observe(s):
        recorder(s)
        snapshots.append(s)

    observe(state)
    final, stats = evolve(state, cfg.form, cfg.t_end, observer=observe,
                          output_times=cfg.output_times or None)

    rows = [(t, n["L1"], n["Linf"], n["Lip"], n["support_radius"])
            for t, n in recorder.rows]
    writer.csv("series.csv", ["time", "L1", "Linf", "Lip", "support_radius"], rows)
    for k, snap in enumerate(snapshots):
        writer.csv(f"snapshot_{k:03d}.csv", ["x", "value"],
                   zip(snap.grid.nodes, snap.values))
    writer.json("run.json", {
        "command": "solve",
        "steps": stats.steps,
        "clipped_mass": stats.clipped_mass,
        "mass_initial": stats.mass_initial,
        "mass_final": stats.mass_final,
        "final_clock": final.frame.clock,
    })
    return 0


def run_tw(cfg: RunConfig) -> int:
    tw = TWParams(c=cfg.c, p=cfg.p, alpha=cfg.alpha, K=cfg.K)
    orbit = integrate_interface_orbit(tw, cfg.z_extent)
    writer = _Writer(cfg)

    rows = [(z, u, v, 0) for z, u, v in zip(orbit.z, orbit.U, orbit.V)]
    rows += [(z, u, v, 1) for z, u, v in orbit.v_zero_events]
    rows += [(z, u, v, 2) for z, u, v in orbit.u_zero_events]
    rows.sort(key=lambda r: -r[0])
    writer.csv("orbit.csv", ["z", "U", "V", "event_flag"], rows)

    info = {
        "command": "tw",
        "reached_extent": orbit.reached_extent,
        "escaped": orbit.escaped,
        "seed_delta": orbit.seed_delta,
        "seed_coefficient": orbit.seed_coefficient,
    }
    if tw.c * (1.0 + tw.alpha) < 1.0 - 1e-12:
        hump = build_hump(tw)
        writer.csv("hump.csv", ["z", "f"], zip(hump.z_samples, hump.f_samples))
        info["hump"] = {"z_left": hump.z_left, "z_peak": hump.z_peak,
                        "K": hump.K, "M": hump.M}
        if 0.5 < tw.c < 1.0 and tw.alpha == 0.0 and tw.K > 0.0:
            plateau = build_plateau_subsolution(cfg.c, cfg.K, cfg.p, cfg.N)
            info["plateau"] = {"alpha_c": plateau.alpha_c, "M": plateau.M,
                               "tau_min": plateau.tau_min}
    writer.json("tw.json", info)
    return 0


def run_acceptance(cfg: RunConfig) -> int:
    writer = _Writer(cfg)
    suite = AcceptanceSuite(log=lambda msg: print(msg, flush=True))
    verdicts = suite.run_all()
    writer.json("verdicts.json", {"command": "acceptance",
                                  "verdicts": [v.to_json_dict() for v in verdicts]})
    failed = [v for v in verdicts if not v.passed]
    print(f"{len(verdicts) - len(failed)}/{len(verdicts)} checks passed")
    return 0 if not failed else 1


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key=value configuration file")
    sub.add_argument("--p", type=float, dest="p")
    sub.add_argument("--N", type=int, dest="N")
    sub.add_argument("--form", choices=sorted(_FORM_TO_FRAME))
    sub.add_argument("--c", type=float, dest="c")
    sub.add_argument("--alpha", type=float, dest="alpha")
    sub.add_argument("--K", type=float, dest="K")
    sub.add_argument("--grid", choices=("line", "radial"))
    sub.add_argument("--grid-cells", type=int, dest="grid_cells")
    sub.add_argument("--r-max", type=float, dest="r_max")
    sub.add_argument("--t-end", type=float, dest="t_end")
    sub.add_argument("--z-extent", type=float, dest="z_extent")
    sub.add_argument("--preset", choices=_PRESETS)
    sub.add_argument("--r0", type=float, dest="r0")
    sub.add_argument("--amplitude", type=float, dest="amplitude")
    sub.add_argument("--output-times", dest="output_times")
    sub.add_argument("--out")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gradflow",
        description="Numerical laboratory for the critical gradient-absorption"
                    " p-Laplacian flow",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for name in ("solve", "tw", "acceptance"):
        _add_common_flags(subs.add_parser(name))
    args = parser.parse_args(argv)

    overrides = {k: v for k, v in vars(args).items()
                 if k not in ("command", "config") and v is not None}
    try:
        cfg = parse_config(args.config, overrides, command=args.command)
        return {"solve": run_solve, "tw": run_tw,
                "acceptance": run_acceptance}[args.command](cfg)
    except (ConfigError, GradflowError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
