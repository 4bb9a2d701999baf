"""Command-line front end.

    ewkit families list
    ewkit witness build --family sphere9 --coeffs 0.6,0.8,0,0,0,0,0,0,0
    ewkit detect --family caseA16 --state upb --nonlinear
    ewkit verify --suite fr --samples 100000
    ewkit oracle --witness @w.json
    ewkit ppt --state ppt_f1:r=-0.5,0,0.25,0,0.25,0,0
    ewkit sweep --family caseB --state w_mix --param p --from 0 --to 1 --steps 14
    ewkit reproduce --case all

JSON goes to stdout and, with --out DIR, to DIR/<command>.json next to a
DIR/<command>.meta.json holding the wall-clock timestamp. Exit status is 0
when every check in scope passes, 1 on a failed check, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__

DEFAULT_SEED = 42
SUITE_DEFAULT_SAMPLES = {"fr": 100_000, "validity": 200, "duality": 100, "ppt": 1000, "orbit": 0}


@dataclass
class RunConfig:
    seed: int = DEFAULT_SEED
    starts: int = 256
    samples: int | None = None
    tolerances: dict = field(
        default_factory=lambda: {
            "fr_slack": 1e-9,
            "oracle_valid": 1e-6,
            "duality_gap": 1e-12,
            "ppt": 1e-9,
            "detect": 1e-9,
        }
    )
    output_dir: str | None = None
    output_format: str = "json"

    def __post_init__(self):
        if any(v <= 0 for v in self.tolerances.values()):
            raise ValueError("tolerances must be positive")


# --- serialization --------------------------------------------------------


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return json.dumps(str(obj))
        return format(obj, ".17g")
    if isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, bool)) or v is None for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _encode(_plain(obj), indent, 0)


def emit(name: str, payload: dict, cfg: RunConfig) -> None:
    payload = {"run_config": asdict(cfg), **payload}
    text = dumps(payload)
    print(text)
    if cfg.output_dir:
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.json").write_text(text + "\n")
        meta = {"created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()), "version": __version__}
        (out / f"{name}.meta.json").write_text(dumps(meta) + "\n")


# --- argument helpers -----------------------------------------------------


def parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def parse_a0(text: str):
    if text == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--a0 takes 'auto' or a number, got {text!r}") from exc


def load_state(text: str):
    """``@path`` for a state file, else ``name[:key=value[;key=value]]``.

    List-valued parameters use commas, e.g. ``ppt_f1:r=-0.5,0,0.25,0,0.25,0,0``.
    """
    from .states import load_state_file, named_state

    if text.startswith("@"):
        return text, load_state_file(text[1:])
    name, _, rest = text.partition(":")
    params = {}
    for item in filter(None, rest.split(";")):
        key, _, val = item.partition("=")
        values = parse_floats(val)
        params[key] = values if key == "r" else values[0]
    st = named_state(name, **params)
    if not st.positive:
        raise ValueError(f"state {text!r} is not positive semidefinite")
    return text, st.rho


def resolve_seed(arg: int | None) -> int:
    if arg is not None:
        return arg
    env = os.environ.get("EWKIT_SEED")
    return int(env) if env else DEFAULT_SEED


# --- commands -------------------------------------------------------------


def cmd_families(args, cfg) -> int:
    from .regions import ALIASES, CATALOG, family

    emit("families", {"families": [family(f).to_dict() for f in CATALOG], "aliases": ALIASES}, cfg)
    return 0


def cmd_witness(args, cfg) -> int:
    from .witness import build_linear

    w = build_linear(args.family, args.coeffs, args.a0, args.branch)
    emit("witness", {"witness": w.to_dict()}, cfg)
    return 0


def cmd_detect(args, cfg) -> int:
    from .witness import build_linear, detect_envelope, detect_linear, envelope_is_tight, load_witness_file

    name, rho = load_state(args.state)
    if args.nonlinear:
        rep = detect_envelope(args.family, rho, args.a0 if args.a0 is not None else 1.0)
        emit("detect", {"state": name, "envelope": rep.to_dict()}, cfg)
        return 0
    if args.witness:
        w = load_witness_file(args.witness.lstrip("@"))
    elif args.coeffs:
        w = build_linear(args.family, args.coeffs, args.a0 if args.a0 is not None else "auto", args.branch)
    else:
        w = envelope_is_tight(args.family, rho, args.a0 if args.a0 is not None else 1.0).witness
    emit("detect", {"state": name, "report": detect_linear(w, rho, name).to_dict()}, cfg)
    return 0


def cmd_oracle(args, cfg) -> int:
    from .oracle import separable_min_numeric
    from .witness import load_witness_file

    w = load_witness_file(args.witness.lstrip("@"))
    res = separable_min_numeric(w, starts=cfg.starts, seed=cfg.seed)
    emit("oracle", {"witness": w.to_dict(), "result": res.to_dict()}, cfg)
    return 0


def cmd_ppt(args, cfg) -> int:
    from .states import is_ppt

    name, rho = load_state(args.state)
    emit("ppt", {"state": name, "report": is_ppt(rho).to_dict()}, cfg)
    return 0


def sweep_rows(family_id: str, state: str, param: str, start: float, stop: float, steps: int) -> list[dict]:
    from .states import named_state
    from .witness import detect_envelope

    rows = []
    for x in np.linspace(start, stop, steps):
        rho = named_state(state, **{param: float(x)}).rho
        rep = detect_envelope(family_id, rho)
        rows.append({param: float(x), "envelope": rep.normalized, "detected": rep.detected})
    return rows


def cmd_sweep(args, cfg) -> int:
    if args.steps < 2:
        raise ValueError("--steps must be at least 2")
    rows = sweep_rows(args.family, args.state, args.param, args.start, args.stop, args.steps)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([args.param, "envelope", "detected"])
    for r in rows:
        writer.writerow([format(r[args.param], ".17g"), format(r["envelope"], ".17g"), int(r["detected"])])
    text = buf.getvalue()
    sys.stdout.write(text)
    if cfg.output_dir:
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "sweep.csv").write_text(text)
        (out / "sweep.meta.json").write_text(dumps({"run_config": asdict(cfg)}) + "\n")
    return 0


def cmd_verify(args, cfg) -> int:
    from . import suites

    n = cfg.samples if cfg.samples is not None else SUITE_DEFAULT_SAMPLES[args.suite]
    report = suites.run_suite(args.suite, n, cfg.seed, cfg.starts)
    emit(f"verify_{args.suite}", report, cfg)
    return 0 if report["passed"] else 1


def cmd_reproduce(args, cfg) -> int:
    from . import suites

    rows = suites.reproduce(args.case, seed=cfg.seed)
    failures = [r for r in rows if not r["pass"]]
    emit("reproduce", {"case": args.case, "rows": rows, "passed": not failures, "failures": failures}, cfg)
    return 0 if not failures else 1


# --- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (CLI > env:EWKIT_SEED > 42)")
    common.add_argument("--starts", type=int, default=256, help="oracle starts")
    common.add_argument("--out", default=None, help="directory for JSON/CSV artifacts")

    p = argparse.ArgumentParser(prog="ewkit", description="Three-qubit entanglement witness toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    fam = sub.add_parser("families", parents=[common], help="catalog of feasible-region families")
    fam.add_argument("action", choices=["list"])
    fam.set_defaults(func=cmd_families)

    wit = sub.add_parser("witness", parents=[common], help="build a linear witness")
    wit.add_argument("action", choices=["build"])
    wit.add_argument("--family", required=True)
    wit.add_argument("--coeffs", type=parse_floats, required=True)
    wit.add_argument("--a0", type=parse_a0, default="auto")
    wit.add_argument("--branch", type=int, choices=[1, -1], default=None)
    wit.set_defaults(func=cmd_witness)

    det = sub.add_parser("detect", parents=[common], help="detection value of a state")
    det.add_argument("--family", required=True)
    det.add_argument("--state", required=True, help="NAME[:k=v;...] or @file")
    det.add_argument("--nonlinear", action="store_true", help="evaluate the envelope")
    det.add_argument("--a0", type=float, default=None)
    det.add_argument("--coeffs", type=parse_floats, default=None)
    det.add_argument("--branch", type=int, choices=[1, -1], default=None)
    det.add_argument("--witness", default=None, help="@file with a witness")
    det.set_defaults(func=cmd_detect)

    ver = sub.add_parser("verify", parents=[common], help="run a verification suite")
    ver.add_argument("--suite", required=True, choices=sorted(SUITE_DEFAULT_SAMPLES))
    ver.add_argument("--samples", type=int, default=None)
    ver.set_defaults(func=cmd_verify)

    orc = sub.add_parser("oracle", parents=[common], help="numeric separable minimum of a witness")
    orc.add_argument("--witness", required=True, help="@file")
    orc.set_defaults(func=cmd_oracle)

    ppt = sub.add_parser("ppt", parents=[common], help="partial-transpose check")
    ppt.add_argument("--state", required=True)
    ppt.set_defaults(func=cmd_ppt)

    sw = sub.add_parser("sweep", parents=[common], help="envelope over a state parameter (CSV)")
    sw.add_argument("--family", required=True)
    sw.add_argument("--state", required=True)
    sw.add_argument("--param", required=True)
    sw.add_argument("--from", dest="start", type=float, required=True)
    sw.add_argument("--to", dest="stop", type=float, required=True)
    sw.add_argument("--steps", type=int, required=True, help="number of grid points")
    sw.set_defaults(func=cmd_sweep)

    rep = sub.add_parser("reproduce", parents=[common], help="recompute reference detection numbers")
    rep.add_argument("--case", required=True, choices=["upb", "wmix", "ghzw", "all"])
    rep.set_defaults(func=cmd_reproduce)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig(
        seed=resolve_seed(args.seed),
        starts=args.starts,
        samples=getattr(args, "samples", None),
        output_dir=args.out,
        output_format="csv" if args.command == "sweep" else "json",
    )
    try:
        return args.func(args, cfg)
    except (ValueError, OSError, KeyError) as exc:
        print(f"ewkit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
