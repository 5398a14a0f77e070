"""Command-line front end: spectra, budgets, self-checks and parameter sweeps.

Exit codes: 0 ok, 1 a self-check failed, 2 usage error, 3 numerical
failure, 4 some sweep steps failed.
"""
from __future__ import annotations

import argparse
import contextvars
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .bogolubov import Scenario, TruncationPolicy
from .errors import CasimirError, DomainError
from .matching import Media
from .spectra import (
    SpectrumTable,
    default_x_grid,
    infinite_table,
    photon_budget_from_table,
    photon_budget_infinite,
    schwinger_static_energy,
    spectrum_finite,
)
from .validation import CHECKS, run_checks

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_NUMERIC, EXIT_PARTIAL = 0, 1, 2, 3, 4
TOOL = f"sonocasimir {__version__}"


@dataclass(frozen=True)
class Preset:
    name: str
    media: Media
    radius_um: float
    cutoff_nm: float

    @property
    def scenario(self) -> Scenario:
        return Scenario.from_units(self.radius_um, self.cutoff_nm)


_WATER = Media(1.0, 1.3)
PRESETS = {
    p.name: p
    for p in (
        Preset("schwinger", _WATER, 40.0, 360.0),
        Preset("updated", _WATER, 45.0, 300.0),
        Preset("min-radius", _WATER, 0.5, 200.0),
        Preset("ambient", _WATER, 5.0, 200.0),
        # cutoffs chosen so that R K equals the rounder values 15 and 135
        Preset("min-radius-literal", _WATER, 0.5, 2.0 * math.pi * 500.0 / 15.0),
        Preset("ambient-literal", _WATER, 5.0, 2.0 * math.pi * 5000.0 / 135.0),
    )
}


class UsageError(Exception):
    pass


def fmt(v: float) -> str:
    """Twelve significant digits, locale independent, no negative zero."""
    s = format(float(v), ".12g")
    return "0" if s == "-0" else s


def r12(v: float) -> float:
    return float(fmt(v))


@dataclass(frozen=True)
class Run:
    """Fully resolved inputs of one spectrum computation."""

    preset: str
    media: Media
    radius_um: float
    cutoff_nm: float
    mode: str
    a_factor: str
    x_max: float | None
    dx: float
    tail_eps: float
    threads: int

    @property
    def scenario(self) -> Scenario:
        return Scenario.from_units(self.radius_um, self.cutoff_nm)

    def with_value(self, param: str, value: float) -> "Run":
        fields = asdict(self)
        fields["media"] = self.media
        if param == "radius-um":
            fields["radius_um"] = r12(value)
        elif param == "cutoff-nm":
            fields["cutoff_nm"] = r12(value)
        else:
            fields["media"] = Media(self.media.n_gas, r12(value))
        return Run(**fields)

    def grid(self) -> np.ndarray:
        return default_x_grid(self.scenario, self.x_max, self.dx)

    def meta(self) -> dict:
        sc = self.scenario
        return {
            "tool": TOOL,
            "preset": self.preset,
            "mode": self.mode,
            "a_factor": self.a_factor,
            "n_gas": self.media.n_gas,
            "n_liquid": self.media.n_liquid,
            "radius_um": self.radius_um,
            "cutoff_nm": self.cutoff_nm,
            "x_max_rk": r12(sc.x_max),
        }


def _positive(name):
    def parse(text):
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {text!r}")
        if not (math.isfinite(v) and v > 0):
            raise argparse.ArgumentTypeError(f"{name} must be positive and finite, got {text!r}")
        return v
    return parse


def _common(p: argparse.ArgumentParser):
    g = p.add_argument_group("scenario")
    g.add_argument("--preset", choices=sorted(PRESETS), help="built-in scenario; explicit flags override its values")
    g.add_argument("--n-gas", type=_positive("--n-gas"))
    g.add_argument("--n-liquid", type=_positive("--n-liquid"))
    g.add_argument("--radius-um", type=_positive("--radius-um"))
    g.add_argument("--cutoff-nm", type=_positive("--cutoff-nm"), help="cutoff wavelength; K = 2 pi / lambda")
    c = p.add_argument_group("computation")
    c.add_argument("--mode", choices=("exact", "factorized", "infinite"), default="factorized")
    c.add_argument("--a-factor", choices=("unit", "exact"), default="unit")
    c.add_argument("--x-max", type=_positive("--x-max"), help="largest x on the grid (default 2 R K + 10)")
    c.add_argument("--dx", type=_positive("--dx"), default=0.05)
    c.add_argument("--tail-eps", type=_positive("--tail-eps"), default=1e-8)
    c.add_argument("--threads", type=int, default=0, help="worker threads, 0 = one per CPU")
    o = p.add_argument_group("output")
    o.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sonocasimir",
        description="Photons from a suddenly collapsing dielectric bubble.",
    )
    parser.add_argument("--version", action="version", version=TOOL)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="tabulate dN/dx")
    _common(sp)
    sp.add_argument("--out", help="output file (default stdout)")

    bp = sub.add_parser("budget", help="photon number, energy and static comparator as JSON")
    _common(bp)
    bp.add_argument("--table", help="integrate a saved CSV/JSON spectrum instead of computing one")
    bp.add_argument("--out", help="output file (default stdout)")

    vp = sub.add_parser("validate", help="run the self-check suite")
    vp.add_argument("--checks", help=f"comma-separated subset of: {', '.join(CHECKS)}")
    vp.add_argument("--perturb", type=float, default=0.0,
                    help="fault injection for testing: scale every J by 1 + PERTURB")
    vp.add_argument("--out", help="output file (default stdout)")

    wp = sub.add_parser("sweep", help="one spectrum and budget per parameter value")
    _common(wp)
    wp.add_argument("--param", required=True, choices=("radius-um", "cutoff-nm", "n-liquid"))
    wp.add_argument("--from", dest="start", type=_positive("--from"), required=True)
    wp.add_argument("--to", dest="stop", type=_positive("--to"))
    wp.add_argument("--steps", type=int, required=True)
    wp.add_argument("--out-dir", required=True)
    return parser


def resolve(args) -> Run:
    preset = PRESETS.get(args.preset) if args.preset else None
    picks = {
        "n_gas": args.n_gas if args.n_gas is not None else (preset.media.n_gas if preset else None),
        "n_liquid": args.n_liquid if args.n_liquid is not None else (preset.media.n_liquid if preset else None),
        "radius_um": args.radius_um if args.radius_um is not None else (preset.radius_um if preset else None),
        "cutoff_nm": args.cutoff_nm if args.cutoff_nm is not None else (preset.cutoff_nm if preset else None),
    }
    missing = [k for k, v in picks.items() if v is None]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise UsageError(f"missing {flags} (or give --preset)")
    if args.threads < 0:
        raise UsageError("--threads must be >= 0")
    if not args.tail_eps <= 1e-3:
        raise UsageError("--tail-eps must lie in (0, 1e-3]")
    # inputs are rounded as they will be printed, so saved tables reproduce every number
    picks = {k: r12(v) for k, v in picks.items()}
    return Run(
        preset=args.preset or "custom",
        media=Media(picks["n_gas"], picks["n_liquid"]),
        radius_um=picks["radius_um"],
        cutoff_nm=picks["cutoff_nm"],
        mode=args.mode,
        a_factor=args.a_factor,
        x_max=args.x_max,
        dx=args.dx,
        tail_eps=args.tail_eps,
        threads=args.threads,
    )


def compute_table(run: Run) -> SpectrumTable:
    x = run.grid()
    if run.mode == "infinite":
        table = infinite_table(run.media, run.scenario, x)
    else:
        policy = TruncationPolicy(tail_epsilon=run.tail_eps)
        table = spectrum_finite(run.media, run.scenario, x, kernel=run.mode, policy=policy,
                                a_factor=run.a_factor, threads=run.threads)
    # round to the printed precision so budgets agree with any saved copy
    rounded = np.array([r12(v) for v in table.dndx])
    xs = np.array([r12(v) for v in table.x])
    return SpectrumTable(table.mode, xs, rounded, table.media, table.scenario, table.a_factor)


def render_table(table: SpectrumTable, meta: dict, fmt_name: str) -> str:
    if fmt_name == "json":
        doc = {
            "meta": meta,
            "points": [[float(x), float(d)] for x, d in zip(table.x, table.dndx)],
        }
        return json.dumps(doc, indent=1) + "\n"
    lines = [f"# {k}: {v if isinstance(v, str) else fmt(v)}" for k, v in meta.items()]
    lines.append("x,dndx")
    lines.extend(f"{fmt(x)},{fmt(d)}" for x, d in zip(table.x, table.dndx))
    return "\n".join(lines) + "\n"


NUMERIC_META = ("n_gas", "n_liquid", "radius_um", "cutoff_nm", "x_max_rk")


def read_table(path: str) -> tuple[SpectrumTable, dict]:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        meta = doc["meta"]
        pts = np.array(doc["points"], dtype=float).reshape(-1, 2)
    else:
        meta, rows = {}, []
        for line in text.splitlines():
            if line.startswith("#"):
                key, _, val = line[1:].partition(":")
                meta[key.strip()] = val.strip()
            elif line and line != "x,dndx":
                rows.append([float(v) for v in line.split(",")])
        pts = np.array(rows, dtype=float).reshape(-1, 2)
    for key in NUMERIC_META:
        if key in meta:
            meta[key] = float(meta[key])
    media = Media(meta["n_gas"], meta["n_liquid"])
    scenario = Scenario.from_units(meta["radius_um"], meta["cutoff_nm"])
    return SpectrumTable(meta["mode"], pts[:, 0], pts[:, 1], media, scenario, meta.get("a_factor", "unit")), meta


def budget_doc(media: Media, scenario: Scenario, meta: dict, table: SpectrumTable | None) -> dict:
    budget = photon_budget_infinite(media, scenario) if table is None else photon_budget_from_table(table)
    static = schwinger_static_energy(media, scenario)
    return {
        "meta": meta,
        "budget": {k: r12(v) for k, v in asdict(budget).items()},
        "static": {k: r12(v) for k, v in asdict(static).items()},
    }


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run_spectrum(args) -> int:
    run = resolve(args)
    table = compute_table(run)
    _emit(render_table(table, run.meta(), args.format), args.out)
    return EXIT_OK


def run_budget(args) -> int:
    if args.table:
        table, meta = read_table(args.table)
        doc = budget_doc(table.media, table.scenario, meta, table)
    else:
        run = resolve(args)
        table = None if run.mode == "infinite" else compute_table(run)
        doc = budget_doc(run.media, run.scenario, run.meta(), table)
    _emit(json.dumps(doc, indent=1) + "\n", args.out)
    return EXIT_OK


def run_validate(args) -> int:
    names = [n.strip() for n in args.checks.split(",") if n.strip()] if args.checks else None
    if names:
        unknown = [n for n in names if n not in CHECKS]
        if unknown:
            raise UsageError(f"unknown check(s): {', '.join(unknown)}")
    results = run_checks(names, perturb=args.perturb)
    failed = [r.name for r in results if not r.passed]
    doc = {"passed": not failed, "checks": [r.as_dict() for r in results]}
    _emit(json.dumps(doc, indent=1) + "\n", args.out)
    if failed:
        print("failed checks: " + ", ".join(failed), file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def _sweep_values(args):
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    if args.steps == 1:
        return [args.start]
    if args.stop is None or not args.start < args.stop:
        raise UsageError("a sweep needs --from < --to")
    return np.linspace(args.start, args.stop, args.steps).tolist()


def run_sweep(args) -> int:
    base = resolve(args)
    values = _sweep_values(args)
    os.makedirs(args.out_dir, exist_ok=True)
    ext = args.format

    def step(i, value):
        run = base.with_value(args.param, value)
        name = f"step_{i:03d}.{ext}"
        table = compute_table(run)
        text = render_table(table, run.meta(), ext)
        with open(os.path.join(args.out_dir, name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        doc = budget_doc(run.media, run.scenario, run.meta(), None if run.mode == "infinite" else table)
        entry = {"step": i, "value": r12(value), "file": name, **doc["budget"], "static_e_hck": doc["static"]["e_hck"]}
        return entry

    def guarded(i, value):
        try:
            return step(i, value)
        except CasimirError as exc:
            return {"step": i, "value": r12(value), "error": f"{type(exc).__name__}: {exc}"}

    workers = base.threads if base.threads > 0 else (os.cpu_count() or 1)
    ctxs = [contextvars.copy_context() for _ in values]
    with ThreadPoolExecutor(max_workers=max(1, min(workers, len(values)))) as pool:
        entries = list(pool.map(lambda c, i, v: c.run(guarded, i, v), ctxs, range(len(values)), values))
    index = {"param": args.param, "meta": base.meta(), "steps": entries}
    with open(os.path.join(args.out_dir, "index.json"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(index, indent=1) + "\n")
    failed = [e for e in entries if "error" in e]
    if failed:
        for e in failed:
            print(f"step {e['step']} ({args.param} = {fmt(e['value'])}) failed: {e['error']}", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


COMMANDS = {"spectrum": run_spectrum, "budget": run_budget, "validate": run_validate, "sweep": run_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            code = COMMANDS[args.command](args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        return code
    except (UsageError, DomainError) as exc:
        print(f"sonocasimir {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CasimirError as exc:
        print(f"sonocasimir {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, ValueError, KeyError) as exc:
        # unreadable or malformed input files
        print(f"sonocasimir {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
