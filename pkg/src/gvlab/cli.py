"""Command line entry point.

    gvlab gv --scenario tilted --grid 64,64,64
    gvlab critical --scenario integrable --checks criticality
    gvlab sweep --scenario tilted --axis grid --values 32,48,64,96
    gvlab list-scenarios

Exit status: 0 all checks pass, 1 usage or config error, 2 a check failed,
3 anything else.
"""
from __future__ import annotations

import argparse
import sys
import traceback
from pathlib import Path

from .report import (SWEEP_AXES, VERBS, ConfigError, RunConfig, all_passed, render_csv,
                     render_json, run, sweep)

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_INTERNAL = 0, 1, 2, 3

# config-file keys and how to read them
_KEYS = {
    "verb": str, "scenario": str, "grid": "ints", "checks": "strs", "tol_scale": float,
    "dt": float, "timestamp": "bool", "seed": int, "kinds": "strs", "axis": str,
    "values": "floats", "param": str, "out": str,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _split(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _convert(key: str, raw: str):
    kind = _KEYS[key]
    try:
        if kind == "ints":
            return tuple(int(t) for t in _split(raw))
        if kind == "floats":
            return tuple(float(t) for t in _split(raw))
        if kind == "strs":
            return tuple(_split(raw))
        if kind == "bool":
            low = raw.strip().lower()
            if low not in ("true", "false", "yes", "no", "1", "0"):
                raise ValueError(raw)
            return low in ("true", "yes", "1")
        return kind(raw.strip())
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def read_config(path: Path) -> dict:
    """key = value lines, '#' starts a comment.  Scenario parameters go in as param.NAME = number."""
    out, params = {}, {}
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key.startswith("param."):
            try:
                params[key[6:]] = float(val)
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: scenario parameters are numbers") from None
        elif key in _KEYS:
            out[key] = _convert(key, val)
        else:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    out["params"] = params
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gvlab", description="Godbillon-Vey type invariant of plane-field/transverse-field pairs.")
    p.add_argument("verb", nargs="?", choices=VERBS)
    p.add_argument("--config", type=Path, help="key = value file; flags override it")
    p.add_argument("--scenario")
    p.add_argument("--grid", help="N1,N2,N3 (or one N for a cube)")
    p.add_argument("--checks", help="comma list of check names or acceptance numbers, or 'all'")
    p.add_argument("--tol-scale", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--kinds", help="variation kinds, comma list of scale, shift, tilt")
    p.add_argument("--axis", choices=SWEEP_AXES, help="sweep axis")
    p.add_argument("--values", help="sweep values, comma list (at least three)")
    p.add_argument("--param", help="scenario parameter moved by an amplitude sweep")
    p.add_argument("--set", action="append", default=[], metavar="NAME=VALUE",
                   help="scenario parameter, repeatable")
    p.add_argument("--out", type=Path, help="write the report here instead of stdout")
    p.add_argument("--no-timestamp", action="store_true")
    return p


def make_config(args: argparse.Namespace) -> tuple[RunConfig, Path | None]:
    base = read_config(args.config) if args.config else {"params": {}}
    flags = {
        "verb": args.verb, "scenario": args.scenario,
        "grid": _convert("grid", args.grid) if args.grid else None,
        "checks": _convert("checks", args.checks) if args.checks else None,
        "tol_scale": args.tol_scale, "dt": args.dt, "seed": args.seed,
        "kinds": _convert("kinds", args.kinds) if args.kinds else None,
        "axis": args.axis, "param": args.param,
        "values": _convert("values", args.values) if args.values else None,
    }
    base.update({k: v for k, v in flags.items() if v is not None})
    for item in args.set:
        name, _, val = item.partition("=")
        try:
            base["params"][name.strip()] = float(val)
        except ValueError:
            raise ConfigError(f"--set expects NAME=NUMBER, got {item!r}") from None
    if args.no_timestamp:
        base["timestamp"] = False
    if "verb" not in base:
        raise ConfigError("no verb given")
    grid = base.pop("grid", (64, 64, 64))
    if len(grid) == 1:
        grid = grid * 3
    checks = base.pop("checks", ())
    if "all" in checks:
        from .checks import REGISTRY
        checks = tuple(REGISTRY)
    out = base.pop("out", None)
    cfg = RunConfig(
        verb=base.pop("verb"), grid=tuple(grid), checks=tuple(checks),
        sweep_axis=base.pop("axis", "grid"), sweep_values=base.pop("values", ()),
        sweep_param=base.pop("param", ""), params=base.pop("params"), **base)
    return cfg, (args.out or (Path(out) if out else None))


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, out = make_config(args)
        if cfg.verb == "sweep":
            _emit(render_csv(sweep(cfg)), out)
            return EXIT_OK
        rep = run(cfg)
        _emit(render_json(rep), out)
        return EXIT_OK if all_passed(rep) else EXIT_FAIL
    except ConfigError as exc:
        print(f"gvlab: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
