"""Command-line entry point: ``dbspan <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from dbspan import __version__
from dbspan.certify import (
    Certificate,
    CertificateFormatError,
    EngineOptions,
    PoolEntry,
    default_pool,
    inconclusive_hint,
    refute_length,
    span_exact,
    verify_certificate,
)
from dbspan.checkpoint import CheckpointError
from dbspan.core23 import RepresentationError
from dbspan.intersect import DEFAULT_MEMORY_BUDGET
from dbspan.modular import (
    FactorizationError,
    ResourceError,
    TABLE1_EXPONENTS,
    modulus_from_exponents,
)
from dbspan.search import BoundsOverflowError, SearchBounds, SpanSearchError, census, find_representation, span_upper

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2

ENV_PREFIX = "DBSPAN_"
MIN_MEMORY_BUDGET = 64 << 20
SWEEP_MAX_RESIDUES = 2 * 10**6

log = logging.getLogger("dbspan")


class ConfigError(ValueError):
    pass


_SIZE_UNITS = {"": 1, "k": 1 << 10, "kib": 1 << 10, "m": 1 << 20, "mib": 1 << 20, "g": 1 << 30, "gib": 1 << 30}


def parse_size(text: str) -> int:
    """``"512MiB"`` -> 536870912.  Plain integers are bytes."""
    m = re.fullmatch(r"\s*(\d+)\s*([a-zA-Z]*)\s*", str(text))
    if not m or m.group(2).lower() not in _SIZE_UNITS:
        raise ConfigError(f"not a size: {text!r}")
    return int(m.group(1)) * _SIZE_UNITS[m.group(2).lower()]


def parse_int(text: str) -> int:
    try:
        return int(str(text).strip().replace("_", ""))
    except ValueError:
        raise ConfigError(f"not an integer: {text!r}") from None


@dataclass(frozen=True)
class RunConfig:
    memory_budget_bytes: int = DEFAULT_MEMORY_BUDGET
    bounds: SearchBounds = field(default_factory=SearchBounds)
    pool_path: Optional[Path] = None
    checkpoint_dir: Optional[Path] = None
    output_format: str = "text"
    parallelism: int = 1

    def __post_init__(self) -> None:
        if self.memory_budget_bytes < MIN_MEMORY_BUDGET:
            raise ConfigError(f"memory budget must be at least 64 MiB, got {self.memory_budget_bytes}")
        if self.parallelism < 1:
            raise ConfigError(f"parallelism must be at least 1, got {self.parallelism}")
        if self.output_format not in ("text", "json"):
            raise ConfigError(f"unknown output format {self.output_format!r}")

    @property
    def engine(self) -> EngineOptions:
        return EngineOptions(self.memory_budget_bytes, self.parallelism)

    def pool(self) -> list[PoolEntry]:
        if self.pool_path is None:
            return default_pool()
        return load_pool(self.pool_path)

    def with_settings(self, settings: dict[str, str]) -> "RunConfig":
        """Apply flat ``key=value`` settings; unknown keys are rejected."""
        cfg = self
        for key, val in settings.items():
            key = key.strip().lower().replace("-", "_")
            if key == "memory_budget_bytes":
                cfg = replace(cfg, memory_budget_bytes=parse_size(val))
            elif key == "parallelism":
                cfg = replace(cfg, parallelism=parse_int(val))
            elif key == "format":
                cfg = replace(cfg, output_format=val.strip())
            elif key == "pool":
                cfg = replace(cfg, pool_path=Path(val.strip()))
            elif key == "checkpoint_dir":
                cfg = replace(cfg, checkpoint_dir=Path(val.strip()))
            elif key == "max_abs_summand":
                cfg = replace(cfg, bounds=replace(cfg.bounds, max_abs_summand=parse_int(val)))
            elif key == "max_abs_partial":
                cfg = replace(cfg, bounds=replace(cfg.bounds, max_abs_partial=parse_int(val)))
            else:
                raise ConfigError(f"unknown configuration key {key!r}")
        return cfg


def read_config_file(path: Path) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def env_settings(environ=os.environ) -> dict[str, str]:
    return {k[len(ENV_PREFIX):].lower(): v for k, v in environ.items()
            if k.startswith(ENV_PREFIX) and len(k) > len(ENV_PREFIX)}


def load_pool(path: Path) -> list[PoolEntry]:
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = data.get("pool")
    if not isinstance(data, list) or not data:
        raise ConfigError(f"{path}: expected a nonempty JSON list of pool entries")
    return [PoolEntry.from_json(e) for e in data]


def resolve_config(args: argparse.Namespace, environ=os.environ) -> RunConfig:
    """Defaults, then the config file, then environment overrides, then flags."""
    cfg = RunConfig()
    if args.config:
        cfg = cfg.with_settings(read_config_file(args.config))
    cfg = cfg.with_settings(env_settings(environ))
    flags = {}
    for key in ("memory_budget_bytes", "parallelism", "format", "pool", "checkpoint_dir",
                "max_abs_summand", "max_abs_partial"):
        val = getattr(args, key, None)
        if val is not None:
            flags[key] = str(val)
    return cfg.with_settings(flags)


# ----------------------------------------------------------------- output


def emit(cfg: RunConfig, payload: dict, text: str) -> None:
    if cfg.output_format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _fmt_ln(v: float) -> str:
    return f"{v:.2f}"


# --------------------------------------------------------------- commands


def cmd_span(args, cfg: RunConfig) -> int:
    n = parse_int(args.n)
    if n == 0:
        _, witness = span_upper(0, cfg.bounds)
        emit(cfg, {"n": "0", "span": 2, "status": "convention", "witness": witness.to_json()},
             f"span = 2 (by convention)\nwitness: {witness}")
        return EXIT_OK
    res = span_exact(n, cfg.pool(), cfg.bounds, cfg.engine)
    status = "proved" if res.proved else "upper bound only"
    emit(cfg, res.to_json(), f"span = {res.span} ({status})\nwitness: {res.witness}")
    return EXIT_OK if res.proved else EXIT_INCONCLUSIVE


def cmd_represent(args, cfg: RunConfig) -> int:
    n = parse_int(args.n)
    if args.length is None:
        r, rep = span_upper(n, cfg.bounds)
    else:
        rep = find_representation(n, args.length, cfg.bounds)
    if rep is None:
        emit(cfg, {"n": str(n), "length": args.length, "representation": None},
             f"no representation of {n} with at most {args.length} summands within the search bounds")
        return EXIT_INCONCLUSIVE
    emit(cfg, {"n": str(n), "length": rep.length, "representation": rep.to_json()}, str(rep))
    return EXIT_OK


def cmd_census(args, cfg: RunConfig) -> int:
    lo, hi = parse_int(args.lo), parse_int(args.hi)
    ckpt = args.checkpoint
    if ckpt is None and cfg.checkpoint_dir is not None:
        ckpt = cfg.checkpoint_dir / f"census-{lo}-{hi}-r{args.length}.ckpt"
    if ckpt is not None:
        Path(ckpt).parent.mkdir(parents=True, exist_ok=True)
    rep = census(lo, hi, args.length, cfg.bounds, checkpoint=ckpt, resume=args.resume,
                 interval=args.interval)
    misses = rep.misses
    shown = ", ".join(map(str, misses[:20])) + (" ..." if len(misses) > 20 else "")
    text = (f"census {lo}..{hi} at length {args.length}: {hi - lo + 1 - len(misses)} covered, "
            f"{len(misses)} misses" + (f": {shown}" if misses else ""))
    emit(cfg, rep.to_json(), text)
    return EXIT_OK if rep.complete else EXIT_INCONCLUSIVE


def _profile_rows(profiles, r: int) -> str:
    lines = [f"{'a':>5} {'b':>5} {'m':>26} {'ln d_r':>8} {'ln w_r':>8}  (r = {r})"]
    for p in profiles:
        w = "n/a" if p.clamped(r) else _fmt_ln(p.lnw[r])
        lines.append(f"{p.a:>5} {p.b:>5} {p.m:>26} {_fmt_ln(p.lnd[r]):>8} {w:>8}")
    return "\n".join(lines)


def cmd_moduli(args, cfg: RunConfig) -> int:
    r = args.length
    if args.from_ab:
        pairs = [tuple(args.from_ab)]
    else:
        amax, bmax = args.sweep
        pairs = [(a, b) for a in range(1, amax + 1) for b in range(1, bmax + 1)]
    profiles, skipped = [], 0
    for a, b in pairs:
        if a < 1 or b < 1:
            raise ConfigError("exponents must be at least 1")
        try:
            cap = None if args.from_ab else SWEEP_MAX_RESIDUES
            p = (modulus_from_exponents(a, b, rs=(r,)) if cap is None
                 else modulus_from_exponents(a, b, rs=(r,), max_residues=cap))
        except ResourceError:
            skipped += 1
            continue
        if not p.check():
            raise AssertionError(f"inconsistent profile for ({a}, {b})")
        profiles.append(p)
    profiles.sort(key=lambda p: (p.lnw[r], p.m, p.a, p.b))
    payload = {"length": r, "skipped": skipped, "profiles": [
        {**p.to_json(), "u": str(p.u), "v": str(p.v)} for p in profiles]}
    text = _profile_rows(profiles, r)
    if skipped:
        text += f"\n({skipped} pairs skipped: residue sets above {SWEEP_MAX_RESIDUES})"
    emit(cfg, payload, text)
    return EXIT_OK


def cmd_table1(args, cfg: RunConfig) -> int:
    rs = (2, 3, 4, 5)
    profiles = [modulus_from_exponents(a, b, rs=rs) for a, b in TABLE1_EXPONENTS]
    head = f"{'a':>5} {'b':>5} {'m':>24} " + " ".join(f"{'ln d' + str(r):>7}" for r in rs)
    sub = f"{'':>5} {'':>5} {'':>24} " + " ".join(f"{'ln w' + str(r):>7}" for r in rs)
    lines = [head, sub]
    rows = []
    for p in profiles:
        lines.append(f"{p.a:>5} {p.b:>5} {p.m:>24} " + " ".join(f"{_fmt_ln(p.lnd[r]):>7}" for r in rs))
        ws = ["n/a" if p.clamped(r) else _fmt_ln(p.lnw[r]) for r in rs]
        lines.append(f"{'':>5} {'':>5} {'':>24} " + " ".join(f"{w:>7}" for w in ws))
        rows.append({"a": p.a, "b": p.b, "m": str(p.m),
                     "ln_d": {str(r): round(p.lnd[r], 2) for r in rs},
                     "ln_w": {str(r): None if p.clamped(r) else round(p.lnw[r], 2) for r in rs}})
    emit(cfg, {"rows": rows}, "\n".join(lines))
    return EXIT_OK


def cmd_certify(args, cfg: RunConfig) -> int:
    n = parse_int(args.n)
    if n < 1:
        raise ConfigError("certify needs a positive integer")
    pool = cfg.pool()
    cert = refute_length(n, args.length, pool, cfg.engine)
    if cert is None:
        hint = inconclusive_hint(n, args.length, pool, cfg.engine)
        goals = ", ".join(f"{k} at length {r}" for k, r in hint[:5]) or "none recorded"
        emit(cfg, {"n": str(n), "length": args.length, "status": "inconclusive",
                   "undischarged": [[str(k), r] for k, r in hint]},
             f"inconclusive: no pool modulus discharges {goals}\n"
             "hint: try more moduli, e.g. `dbspan moduli --sweep 48 48`, and pass them with --pool")
        return EXIT_INCONCLUSIVE
    doc = cert.to_json()
    if args.output:
        Path(args.output).write_text(json.dumps(doc, indent=1) + "\n")
    if cfg.output_format == "json" and not args.output:
        print(json.dumps(doc, indent=1))
    else:
        where = f" written to {args.output}" if args.output else ""
        print(f"certificate: {n} has no representation of length {args.length}{where}")
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    try:
        doc = json.loads(Path(args.cert).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.cert}: not JSON ({exc})") from None
    res = verify_certificate(doc, cfg.engine)
    claim = doc.get("claim", {}) if isinstance(doc, dict) else {}
    emit(cfg, {"verified": res.ok, "claim": claim, "problems": res.problems},
         "verified" if res.ok else "INVALID\n" + "\n".join(res.problems))
    return EXIT_OK if res.ok else EXIT_ERROR


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=None)
    common.add_argument("--config", type=Path, default=None, help="flat key=value config file")
    common.add_argument("--memory-budget", dest="memory_budget_bytes", default=None,
                        help="bytes, or with a KiB/MiB/GiB suffix")
    common.add_argument("--parallelism", type=int, default=None)
    common.add_argument("--pool", type=Path, default=None, help="JSON list of pool moduli")
    common.add_argument("--checkpoint-dir", type=Path, default=None)
    common.add_argument("--max-summand", dest="max_abs_summand", default=None)
    common.add_argument("--max-partial", dest="max_abs_partial", default=None)
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="dbspan", description="Spans of double-base representations.")
    p.add_argument("--version", action="version", version=f"dbspan {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("span", parents=[common], help="exact span with proof status")
    s.add_argument("n")
    s.set_defaults(func=cmd_span)

    s = sub.add_parser("represent", parents=[common], help="find a representation")
    s.add_argument("n")
    s.add_argument("--length", type=int, default=None, help="at most this many summands")
    s.set_defaults(func=cmd_represent)

    s = sub.add_parser("census", parents=[common], help="cover a range at a given length")
    s.add_argument("lo")
    s.add_argument("hi")
    s.add_argument("--length", type=int, required=True)
    s.add_argument("--checkpoint", type=Path, default=None)
    s.add_argument("--resume", action="store_true")
    s.add_argument("--interval", type=int, default=1 << 20)
    s.set_defaults(func=cmd_census)

    s = sub.add_parser("moduli", parents=[common], help="modulus profiles from exponent pairs")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--from", dest="from_ab", nargs=2, type=int, metavar=("A", "B"))
    g.add_argument("--sweep", nargs=2, type=int, metavar=("AMAX", "BMAX"))
    s.add_argument("--length", type=int, default=4, help="length r used for sorting and display")
    s.set_defaults(func=cmd_moduli)

    s = sub.add_parser("table1", parents=[common], help="densities and work factors of the standard moduli")
    s.set_defaults(func=cmd_table1)

    s = sub.add_parser("certify", parents=[common], help="prove there is no representation of a length")
    s.add_argument("n")
    s.add_argument("--length", type=int, required=True)
    s.add_argument("--output", "-o", type=Path, default=None)
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("verify", parents=[common], help="recheck a certificate")
    s.add_argument("cert", type=Path)
    s.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except (ConfigError, RepresentationError, CertificateFormatError, CheckpointError,
            BoundsOverflowError, SpanSearchError, ResourceError, FactorizationError,
            ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
