"""
Command-line front end.

    holosem {petfish|learn|capacity|bench|demo-sentence} [--config FILE] [--seed N]
            [--out PATH] [--dims a,b,c] [--trials N] [--h R] [--noise R]
            [--presentations N] [--format json|csv|both]

Settings resolve as defaults < config file < flags, and the fully resolved
configuration is echoed into the report envelope, so feeding the echoed
``config`` block back through ``--config`` reproduces the payload exactly.

Exit codes: 0 success, 2 invalid configuration, 3 I/O failure, 4 failed
internal numeric check.
"""

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import time
from datetime import datetime, timezone

from . import __version__
from .binding import Backend
from .errors import ConfigError, HolosemError
from .experiments import (
    BENCH_HEADER,
    CAPACITY_HEADER,
    DEMO_HEADER,
    SENTENCE_ROLES,
    NumericCheckError,
    run_bench,
    run_capacity,
    run_demo_sentence,
)
from .learning import LearnerState, dumps_checkpoint, dumps_world, make_world, train
from .petfish import ANIMALS, PetfishConfig, run_petfish

FORMAT_VERSION = "1"
EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4

DEFAULT_PHRASES = [
    ["adjective", "red", "car"],
    ["adjective", "red", "apple"],
    ["adjective", "big", "car"],
    ["adjective", "big", "apple"],
]

DEFAULTS = {
    "petfish": {
        "seed": 0, "dims": [128, 512, 2048, 4096], "trials": 50,
        "backends": ["tensor", "hrr"], "normalize_outputs": True,
        "out": "petfish_report.json", "format": "json",
    },
    "learn": {
        "seed": 0, "dims": [512], "backend": "tensor", "h": 0.1, "noise": 0.05,
        "presentations": 200, "eval_every": 20, "phrases": DEFAULT_PHRASES, "weights": None,
        "order": "functor_first", "normalize_nouns": True, "checkpoints": False,
        "out": "learn_report.json", "format": "json",
    },
    "capacity": {
        "seed": 0, "dims": [128, 512, 2048], "ms": [1, 2, 4, 8, 16], "trials": 100,
        "vocab_size": 32, "out": "capacity_report.json", "format": "both",
    },
    "bench": {
        "seed": 0, "dims": [64, 256, 1024, 2048, 4096], "repeats": 5, "tolerance": 1e-9,
        "out": "bench_report.json", "format": "both",
    },
    "demo-sentence": {
        "seed": 0, "dims": [1024], "trials": 100, "roles": list(SENTENCE_ROLES), "filler_dim": 64,
        "out": "demo_sentence_report.json", "format": "json",
    },
}

# flag name -> config key, for flags shared by all commands
FLAG_KEYS = {"seed": "seed", "out": "out", "dims": "dims", "trials": "trials", "h": "h",
             "noise": "noise", "presentations": "presentations", "format": "format"}

# keys tolerated in a config file but never part of the resolved config
ENVELOPE_KEYS = {"format_version", "command"}


# =============================================================================
# Configuration
# =============================================================================

def _is_int(x):
    return isinstance(x, int) and not isinstance(x, bool)


def _is_num(x):
    return (isinstance(x, (int, float))) and not isinstance(x, bool)


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def validate(command, cfg):
    """Range-check a resolved config; raises :class:`ConfigError`."""
    _require(_is_int(cfg["seed"]) and 0 <= cfg["seed"] < 2**64, "seed must be a 64-bit unsigned integer")
    _require(isinstance(cfg["out"], str) and cfg["out"], "out must be a non-empty path")
    _require(cfg["format"] in ("json", "csv", "both"), "format must be json, csv or both")
    dims = cfg["dims"]
    _require(isinstance(dims, list) and dims and all(_is_int(d) for d in dims), "dims must be a non-empty integer list")
    _require(all(d >= 2 for d in dims), "every dim must be >= 2")
    if "trials" in cfg:
        _require(_is_int(cfg["trials"]) and cfg["trials"] >= 1, "trials must be an integer >= 1")

    if command == "petfish":
        _require(cfg["backends"] and set(cfg["backends"]) <= {"tensor", "hrr"}, "backends must be a subset of tensor, hrr")
        _require(isinstance(cfg["normalize_outputs"], bool), "normalize_outputs must be boolean")
    elif command == "learn":
        _require(len(dims) == 1, "learn takes exactly one dim")
        _require(cfg["backend"] in ("tensor", "hrr"), "backend must be tensor or hrr")
        _require(_is_num(cfg["h"]) and 0.0 <= cfg["h"] <= 1.0, "h must lie in [0, 1]")
        _require(_is_num(cfg["noise"]) and cfg["noise"] >= 0.0, "noise must be >= 0")
        _require(_is_int(cfg["presentations"]) and cfg["presentations"] >= 0, "presentations must be an integer >= 0")
        _require(_is_int(cfg["eval_every"]) and cfg["eval_every"] >= 1, "eval_every must be an integer >= 1")
        _require(cfg["order"] in ("functor_first", "noun_first"), "order must be functor_first or noun_first")
        _require(isinstance(cfg["normalize_nouns"], bool), "normalize_nouns must be boolean")
        _require(isinstance(cfg["checkpoints"], bool), "checkpoints must be boolean")
        phrases = cfg["phrases"]
        _require(isinstance(phrases, list) and phrases, "phrases must be a non-empty list")
        for p in phrases:
            _require(isinstance(p, list) and len(p) == 3 and p[0] in ("adjective", "iverb")
                     and all(isinstance(x, str) and x for x in p), f"bad phrase {p!r}: use [adjective|iverb, word, noun]")
        w = cfg["weights"]
        if w is not None:
            _require(isinstance(w, list) and len(w) == len(phrases) and all(_is_num(x) and x >= 0 for x in w),
                     "weights must be one non-negative number per phrase")
            _require(abs(sum(w) - 1.0) <= 1e-9, "weights must sum to 1")
    elif command == "capacity":
        _require(isinstance(cfg["ms"], list) and cfg["ms"] and all(_is_int(m) and m >= 1 for m in cfg["ms"]),
                 "ms must be a non-empty list of integers >= 1")
        _require(_is_int(cfg["vocab_size"]) and cfg["vocab_size"] >= 1, "vocab_size must be an integer >= 1")
    elif command == "bench":
        _require(_is_int(cfg["repeats"]) and cfg["repeats"] >= 1, "repeats must be an integer >= 1")
        _require(_is_num(cfg["tolerance"]) and cfg["tolerance"] >= 0, "tolerance must be >= 0")
    elif command == "demo-sentence":
        roles = cfg["roles"]
        _require(isinstance(roles, list) and roles, "roles must be a non-empty list")
        for r in roles:
            _require(r in SENTENCE_ROLES, f"unknown role {r!r}; choose from {', '.join(SENTENCE_ROLES)}")
        _require(len(set(roles)) == len(roles), "roles must be distinct")
        _require(_is_int(cfg["filler_dim"]) and cfg["filler_dim"] >= 2, "filler_dim must be an integer >= 2")


def _parse_dims(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"--dims expects comma-separated integers, got {text!r}") from None


def resolve_config(command, args):
    cfg = json.loads(json.dumps(DEFAULTS[command]))
    if args.config:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("config file must hold a JSON object")
        if "config" in doc and "payload" in doc:
            doc = doc["config"]  # a whole report envelope
        if "format_version" in doc and str(doc["format_version"]) != FORMAT_VERSION:
            raise ConfigError(f"unsupported config format_version {doc['format_version']!r}")
        if "command" in doc and doc["command"] != command:
            raise ConfigError(f"config is for {doc['command']!r}, not {command!r}")
        unknown = set(doc) - set(cfg) - ENVELOPE_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {', '.join(sorted(unknown))}")
        cfg.update({k: v for k, v in doc.items() if k not in ENVELOPE_KEYS})
    for flag, key in FLAG_KEYS.items():
        value = getattr(args, flag)
        if value is None:
            continue
        if key not in cfg:
            raise ConfigError(f"--{flag} does not apply to {command}")
        cfg[key] = _parse_dims(value) if flag == "dims" else value
    validate(command, cfg)
    return cfg


# =============================================================================
# Output
# =============================================================================

def atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def csv_path(out):
    root, ext = os.path.splitext(out)
    return (root if ext.lower() == ".json" else out) + ".csv"


def write_outputs(cfg, envelope, rows):
    fmt = cfg["format"]
    if fmt in ("json", "both"):
        atomic_write(cfg["out"], json.dumps(envelope, indent=2, allow_nan=False) + "\n")
    if fmt in ("csv", "both"):
        atomic_write(csv_path(cfg["out"]), csv_text(rows))


def _table(header, rows):
    widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) if rows else len(str(h)) for i, h in enumerate(header)]
    lines = ["  ".join(str(h).ljust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(str(c).ljust(w) for c, w in zip(r, widths)) for r in rows]
    return "\n".join(lines)


def _fmt(x):
    return f"{x:.4f}" if isinstance(x, float) else x


# =============================================================================
# Commands
# =============================================================================

def cmd_petfish(cfg, stdout):
    config = PetfishConfig(
        backends=tuple(cfg["backends"]), hrr_dims=tuple(cfg["dims"]), trials=cfg["trials"],
        seed=cfg["seed"], normalize_outputs=cfg["normalize_outputs"], output_path=cfg["out"],
    )
    report = run_petfish(config)
    payload = {"results": report.results, "aggregates": report.aggregates}

    rows = []
    for w in report.aggregates["winner_frequency"]:
        best = max(ANIMALS, key=lambda a: (w["frequency"][a], -ANIMALS.index(a)))
        rows.append((w["backend"], w["dim"], f"pet {w['animal'].lower()}", best, _fmt(w["frequency"][best])))
    print(_table(("backend", "dim", "phrase", "winner", "frequency"), rows), file=stdout)
    for o in report.aggregates["observations"]:
        print(f"note: pet {o['animal'].lower()} was intended to retrieve {o['intended_winner']}; "
              f"exact arithmetic retrieves {o['exact_winner']}", file=stdout)
    return payload, report.csv_rows()


def cmd_learn(cfg, stdout):
    backend = Backend.tensor() if cfg["backend"] == "tensor" else Backend.hrr(cfg["dims"][0])
    dim = cfg["dims"][0]
    world = make_world([tuple(p) for p in cfg["phrases"]], dim, backend, cfg["seed"], cfg["noise"], cfg["weights"])
    state = LearnerState.empty(backend, dim, h=cfg["h"], order=cfg["order"], normalize_nouns=cfg["normalize_nouns"])
    stream_seed = cfg["seed"] ^ 0x9E3779B97F4A7C15
    curve = train(world, state, cfg["presentations"], cfg["eval_every"], seed=stream_seed)
    payload = curve.to_json()
    if cfg["checkpoints"]:
        root = os.path.splitext(cfg["out"])[0]
        atomic_write(root + ".world.json", dumps_world(world, cfg["seed"]))
        atomic_write(root + ".learner.json", dumps_checkpoint(state, stream_seed))
    rows = [(r["epoch"], _fmt(r["accuracy"]), _fmt(r["mean_update_norm"])) for r in curve.records]
    print(_table(("presentations", "accuracy", "mean_update_norm"), rows), file=stdout)
    return payload, curve.csv_rows()


def cmd_capacity(cfg, stdout):
    table = run_capacity(cfg["dims"], cfg["ms"], cfg["trials"], cfg["seed"], cfg["vocab_size"])
    rows = [tuple(r[k] for k in CAPACITY_HEADER) for r in table]
    print(_table(CAPACITY_HEADER, [tuple(_fmt(x) for x in r) for r in rows]), file=stdout)
    return {"table": table}, [CAPACITY_HEADER] + [tuple(repr(x) if isinstance(x, float) else x for x in r) for r in rows]


def cmd_bench(cfg, stdout):
    table = run_bench(cfg["dims"], cfg["repeats"], cfg["seed"], cfg["tolerance"])
    rows = [tuple(r[k] for k in BENCH_HEADER) for r in table]
    print(_table(BENCH_HEADER, [tuple(f"{x:.3g}" if isinstance(x, float) else x for x in r) for r in rows]), file=stdout)
    return {"table": table}, [BENCH_HEADER] + [tuple(repr(x) if isinstance(x, float) else x for x in r) for r in rows]


def cmd_demo_sentence(cfg, stdout):
    table = run_demo_sentence(cfg["roles"], cfg["dims"], cfg["trials"], cfg["seed"], cfg["filler_dim"])
    rows = [tuple(r[k] for k in DEMO_HEADER) for r in table]
    print(_table(DEMO_HEADER, [tuple(_fmt(x) for x in r) for r in rows]), file=stdout)
    return {"table": table}, [DEMO_HEADER] + [tuple(repr(x) if isinstance(x, float) else x for x in r) for r in rows]


COMMANDS = {
    "petfish": cmd_petfish,
    "learn": cmd_learn,
    "capacity": cmd_capacity,
    "bench": cmd_bench,
    "demo-sentence": cmd_demo_sentence,
}

# payload sections that are wall-clock measurements, excluded from reproducibility checks
TIMING_FIELDS = {"bench": ("naive_seconds", "fft_seconds")}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="holosem", description="Tensor and holographic compositional semantics experiments.")
    p.add_argument("--version", action="version", version=f"holosem {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="JSON config file")
        s.add_argument("--seed", type=int)
        s.add_argument("--out")
        s.add_argument("--dims", help="comma-separated dimensions")
        s.add_argument("--trials", type=int)
        s.add_argument("--h", type=float)
        s.add_argument("--noise", type=float)
        s.add_argument("--presentations", type=int)
        s.add_argument("--format", choices=("json", "csv", "both"))
    return p


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args.command, args)
    except ConfigError as exc:
        print(f"holosem {args.command}: invalid configuration: {exc}", file=stderr)
        return EXIT_CONFIG

    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    try:
        payload, rows = COMMANDS[args.command](cfg, stdout)
    except NumericCheckError as exc:
        print(f"holosem {args.command}: numeric check failed: {exc}", file=stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"holosem {args.command}: I/O error: {exc}", file=stderr)
        return EXIT_IO
    except (ConfigError, HolosemError, ValueError) as exc:
        print(f"holosem {args.command}: invalid configuration: {exc}", file=stderr)
        return EXIT_CONFIG

    envelope = {
        "format_version": FORMAT_VERSION,
        "tool": "holosem",
        "tool_version": __version__,
        "command": args.command,
        "config": cfg,
        "timing": {"started_utc": started, "wall_seconds": time.perf_counter() - t0},
        "payload": payload,
    }
    try:
        write_outputs(cfg, envelope, list(rows))
    except OSError as exc:
        print(f"holosem {args.command}: cannot write report: {exc}", file=stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
