"""Command line front end.

Every command writes one deterministic document (JSON or CSV) to stdout or
``--out``.  Exit codes: 0 pass, 1 verification failure, 2 precision
exhaustion, 3 bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .bands import BandSolver, build_tables, verify_tables
from .cache import ENV_VAR, LevelCache
from .coding import (
    SymbolicPoint,
    check_gaps,
    enumerate_gaps,
    ids,
    ids_of_zero,
    verify_ids,
    verify_pi,
    word_band,
)
from .codes import check_code
from .covering import build_coverings, covering_rows, verify_evolution
from .dimension import build_sns, dimension_lower_estimate, fibonacci, sns_count, verify_sns
from .dynamics import box_diameters, classify_orbit, infinity_profile, verify_contraction
from .errors import InvalidInput, PrecisionExhausted, SpectrumError
from .numeric import Enclosure, to_hex
from .report import Report
from .traces import DEFAULT_MAX_LEVEL, ModelParams, verify_traces

SCHEMA_VERSION = 1
VERIFY_LAMBDAS = ("0.2", "0.5", "1", "2", "4")
EXIT_PASS, EXIT_FAIL, EXIT_PRECISION, EXIT_INPUT = 0, 1, 2, 3
# the IDS counting oracle and SNS bands are capped to keep verify at desk scale
IDS_CAP = 10
SNS_BAND_CAP = 10
PI_WORDS = 12

log = logging.getLogger("pdspectrum")


class UsageError(InvalidInput):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    lam: Optional[str]
    level: int
    bits: Optional[int]
    max_level: int
    cache: Optional[str]
    fmt: str
    out: Optional[str]
    jobs: int
    extra: dict

    def params(self, lam: Optional[str] = None) -> ModelParams:
        text = lam if lam is not None else (self.lam or "2")
        try:
            q = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"lambda is not an exact decimal: {text!r}") from exc
        return ModelParams(q, self.bits, self.max_level)

    def level_cache(self) -> Optional[LevelCache]:
        root = self.cache if self.cache is not None else os.environ.get(ENV_VAR)
        if not root or root == "none":
            return None
        return LevelCache(root)

    def to_json(self) -> dict:
        out = {
            "lambda": self.lam,
            "level": self.level,
            "bits": self.bits,
            "max_level": self.max_level,
        }
        out.update({k: v for k, v in sorted(self.extra.items())})
        return out


# -- formatting ----------------------------------------------------------------------


def rational_text(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def real_pair(x) -> dict:
    return {"decimal": f"{float(x):.17g}", "hex": to_hex(x)}


def enclosure_json(e: Enclosure) -> dict:
    return {"lo": real_pair(e.lo), "hi": real_pair(e.hi)}


def band_row(b) -> dict:
    return {
        "code": b.code,
        "a_lo": f"{float(b.a.lo):.17g}",
        "b_hi": f"{float(b.b.hi):.17g}",
        "z": f"{float(b.z.mid):.17g}",
        "a_lo_hex": to_hex(b.a.lo),
        "a_hi_hex": to_hex(b.a.hi),
        "z_lo_hex": to_hex(b.z.lo),
        "z_hi_hex": to_hex(b.z.hi),
        "b_lo_hex": to_hex(b.b.lo),
        "b_hi_hex": to_hex(b.b.hi),
        "bits": b.bits,
    }


def report_rows(rep: Report) -> list[dict]:
    return [
        {"check": name, "tested": c.tested, "violations": c.failed}
        for name, c in sorted(rep.checks.items())
    ]


def _jsonable(value):
    if isinstance(value, Fraction):
        return rational_text(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)


def render(cfg: RunConfig, result: dict, rows: Sequence[dict], status: str) -> str:
    if cfg.fmt == "csv":
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            for r in rows:
                writer.writerow(r)
        return buf.getvalue()
    if cfg.fmt == "text":
        return result.get("text", json.dumps(_jsonable(result), sort_keys=True)) + "\n"
    doc = {
        "schema": SCHEMA_VERSION,
        "command": cfg.command,
        "config": cfg.to_json(),
        "status": status,
        "result": _jsonable({k: v for k, v in result.items() if k != "text"}),
    }
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


# -- commands ------------------------------------------------------------------------


def _tables(cfg: RunConfig, params: ModelParams, n: int):
    return build_tables(n, params, jobs=cfg.jobs, cache=cfg.level_cache())


def cmd_bands(cfg: RunConfig):
    params = cfg.params()
    table = _tables(cfg, params, cfg.level)[-1]
    rows = [band_row(b) for b in table.bands]
    result = {
        "lambda": params.lam_text,
        "level": table.level,
        "bands": [
            {"code": b.code, "a": enclosure_json(b.a), "z": enclosure_json(b.z), "b": enclosure_json(b.b),
             "bits": b.bits}
            for b in table.bands
        ],
    }
    return result, rows, None


def cmd_covering(cfg: RunConfig):
    params = cfg.params()
    tables = _tables(cfg, params, cfg.level + 1)
    covs = build_coverings(cfg.level, tables)
    rep = verify_evolution(covs, tables)
    rows = covering_rows(covs[-1])
    result = {"level": cfg.level, "entries": rows, "report": rep.to_json()}
    flat = [dict(band_row(e.band), type=e.type, word=" ".join(e.word)) for e in covs[-1].entries]
    return result, flat, rep


def cmd_gaps(cfg: RunConfig):
    params = cfg.params()
    tables = _tables(cfg, params, cfg.level + 1)
    covs = build_coverings(cfg.level, tables)
    scan = enumerate_gaps(cfg.level, covs)
    rep = check_gaps(scan, tables)
    result = {
        "depth": cfg.level,
        "gaps": [g.to_json() for g in scan.gaps],
        "deferred": [[" ".join(u), " ".join(v)] for u, v in scan.deferred],
        "report": rep.to_json(),
    }
    return result, [g.row() for g in scan.gaps], rep


def cmd_ids(cfg: RunConfig):
    zero = cfg.extra.get("zero")
    word = cfg.extra.get("word")
    if zero is None and word is None:
        raise InvalidInput("ids needs --zero CODE or --word WORD")
    if zero is not None:
        value = ids_of_zero(check_code(zero))
        result = {"zero": zero, "ids": rational_text(value)}
    else:
        omega = SymbolicPoint.parse(word)
        value = ids(omega)
        result = {"word": str(omega), "ids": rational_text(value)}
    rep = None
    if cfg.extra.get("check") and zero is not None:
        params = cfg.params()
        tables = _tables(cfg, params, len(zero))
        rep = verify_ids(tables, len(zero))
        result["report"] = rep.to_json()
    result["text"] = result["ids"]
    return result, [{k: v for k, v in result.items() if k in ("zero", "word", "ids")}], rep


def cmd_orbit(cfg: RunConfig):
    params = cfg.params()
    horizon = cfg.extra.get("horizon") or cfg.level
    params.check_level(horizon)
    energy = cfg.extra.get("energy")
    word = cfg.extra.get("word")
    if (energy is None) == (word is None):
        raise InvalidInput("orbit needs exactly one of --energy or --word")
    if word is not None:
        omega = SymbolicPoint.parse(word)
        band = word_band(omega.prefix(cfg.level), BandSolver(params))
        source = {"word": str(omega), "depth": cfg.level, "band": enclosure_json(band.hull)}
        # the zero of the deepest band stands in for pi(omega)
        E = band.z
    else:
        try:
            E = Fraction(energy)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"energy is not an exact decimal: {energy!r}") from exc
        source = {"energy": energy}
    rec = classify_orbit(E, horizon, params)
    result = {"source": source, "orbit": rec.to_json(), "profile": infinity_profile(rec.traces)}
    return result, rec.rows(), None


def cmd_dimension(cfg: RunConfig):
    params = cfg.params()
    band_levels = min(cfg.level, cfg.extra.get("band_levels") or SNS_BAND_CAP)
    levels = build_sns(cfg.level, params, band_levels=band_levels)
    rep = verify_sns(levels, params)
    count_level = cfg.extra.get("count_level") or 20
    counts = [{"n": n, "count": sns_count(n), "fibonacci": fibonacci(n)} for n in range(count_level + 1)]
    for c in counts:
        rep.check("count equals F_n", c["count"] == c["fibonacci"], c["n"])
    est = dimension_lower_estimate(levels)
    rows = [lv.row() for lv in levels]
    result = {"levels": rows, "counts": counts, "estimate": est, "report": rep.to_json()}
    return result, rows, rep


def cmd_dynamics(cfg: RunConfig):
    steps = cfg.extra.get("steps") or 8
    rep = verify_contraction(n_steps=steps)
    diams = box_diameters(steps)
    rows = [{"n": n, "box_diameter": f"{d:.17g}"} for n, d in enumerate(diams)]
    result = {"box_diameters": diams, "report": rep.to_json()}
    return result, rows, rep


def verify_all(params: ModelParams, level: int, jobs: int = 1, cache=None) -> Report:
    """Every invariant suite for one coupling up to ``level``."""
    rep = Report(f"verify lambda {params.lam_text} to level {level}")
    rep.merge(verify_traces(params, level), "traces/")
    tables = build_tables(level, params, jobs=jobs, cache=cache)
    rep.merge(verify_tables(tables), "bands/")
    if level >= 1:
        covs = build_coverings(level - 1, tables)
        rep.merge(verify_evolution(covs, tables), "covering/")
        gaps = Report()
        for d in range(level):
            check_gaps(enumerate_gaps(d, covs), tables, gaps)
        rep.merge(gaps)
    rep.merge(verify_ids(tables, min(level, IDS_CAP)), "ids/")
    levels = build_sns(min(level, SNS_BAND_CAP), params)
    rep.merge(verify_sns(levels, params), "sns/")
    return rep


def cmd_verify(cfg: RunConfig):
    lams = [cfg.lam] if cfg.lam else list(VERIFY_LAMBDAS)
    total = Report("verify")
    per_lambda = {}
    for lam in lams:
        params = cfg.params(lam)
        params.check_level(cfg.level)
        rep = verify_all(params, cfg.level, cfg.jobs, cfg.level_cache())
        per_lambda[params.lam_text] = rep.to_json()
        total.merge(rep, f"lambda={params.lam_text}/")
    shared = Report()
    shared.merge(verify_pi(PI_WORDS), "symbolic/")
    shared.merge(verify_contraction(), "dynamics/")
    total.merge(shared)
    result = {"lambdas": per_lambda, "shared": shared.to_json(), "ok": total.ok}
    return result, report_rows(total), total


COMMANDS = {
    "bands": cmd_bands,
    "covering": cmd_covering,
    "gaps": cmd_gaps,
    "ids": cmd_ids,
    "orbit": cmd_orbit,
    "dimension": cmd_dimension,
    "dynamics": cmd_dynamics,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--lambda", dest="lam", help="coupling as an exact decimal (default 2; verify: all five)")
    common.add_argument("--level", type=int, default=None, help="level or depth")
    common.add_argument("--bits", type=int, default=None, help="fixed working precision (default: by level)")
    common.add_argument("--max-level", type=int, default=DEFAULT_MAX_LEVEL, help="hard level cap")
    common.add_argument("--cache", default=None,
                        help=f"level cache directory, 'none' to disable (default: ${ENV_VAR} if set)")
    common.add_argument("--format", dest="fmt", choices=("json", "csv", "text"), default="json")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for level building")

    parser = _Parser(prog="pdspectrum", description="Certified band structure of the period doubling model.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("bands", parents=[common], help="bands of one level")
    sub.add_parser("covering", parents=[common], help="typed optimal covering")
    sub.add_parser("gaps", parents=[common], help="certified gaps and labels at a depth")
    p = sub.add_parser("ids", parents=[common], help="IDS of a zero or a symbolic point")
    p.add_argument("--zero", help="binary code of the zero")
    p.add_argument("--word", help="eventually periodic word, e.g. '0_e 1_o 2_e (3_or 0_e)'")
    p.add_argument("--check", action="store_true", help="cross-check with the counting oracle")
    p = sub.add_parser("orbit", parents=[common], help="trace orbit of an energy")
    p.add_argument("--energy", help="energy as an exact decimal")
    p.add_argument("--word", help="symbolic point; its energy is taken at depth --level")
    p.add_argument("--horizon", type=int, help="last trace index (default --level)")
    p = sub.add_parser("dimension", parents=[common], help="separated sub-covering and dimension bound")
    p.add_argument("--band-levels", type=int, help=f"levels with computed bands (default {SNS_BAND_CAP})")
    p.add_argument("--count-level", type=int, help="last level of the count table (default 20)")
    p = sub.add_parser("dynamics", parents=[common], help="contraction checks for the inverse trace map")
    p.add_argument("--steps", type=int, help="iterations of the vertex boxes (default 8)")
    sub.add_parser("verify", parents=[common], help="all invariant suites")
    return parser


DEFAULT_LEVELS = {"bands": 4, "covering": 4, "gaps": 4, "ids": 0, "orbit": 24,
                  "dimension": 10, "dynamics": 0, "verify": 10}
COMMON_KEYS = {"command", "lam", "level", "bits", "max_level", "cache", "fmt", "out", "jobs"}


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    level = ns.level if ns.level is not None else DEFAULT_LEVELS[ns.command]
    if level < 0:
        raise InvalidInput("level must be non-negative")
    if level > ns.max_level:
        raise InvalidInput(f"level {level} exceeds the cap {ns.max_level}")
    if ns.jobs < 1:
        raise InvalidInput("jobs must be positive")
    extra = {k: v for k, v in vars(ns).items() if k not in COMMON_KEYS and v is not None}
    return RunConfig(ns.command, ns.lam, level, ns.bits, ns.max_level, ns.cache, ns.fmt, ns.out, ns.jobs, extra)


def _emit(cfg: Optional[RunConfig], text: str) -> None:
    if cfg is not None and cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    cfg = None
    try:
        cfg = parse_config(argv)
        result, rows, rep = COMMANDS[cfg.command](cfg)
        status = "pass" if rep is None or rep.ok else "fail"
        _emit(cfg, render(cfg, result, rows, status))
        return EXIT_PASS if status == "pass" else EXIT_FAIL
    except PrecisionExhausted as exc:
        return _fail(cfg, exc, EXIT_PRECISION, "precision-exhausted")
    except InvalidInput as exc:
        return _fail(cfg, exc, EXIT_INPUT, "bad-input")
    except SpectrumError as exc:
        return _fail(cfg, exc, EXIT_FAIL, "error")


def _fail(cfg: Optional[RunConfig], exc: Exception, code: int, status: str) -> int:
    """Report on stderr; with ``--out`` a JSON stub flagged partial replaces the artifact."""
    print(f"error: {exc}", file=sys.stderr)
    if cfg is not None and cfg.out and cfg.fmt == "json":
        doc = {"schema": SCHEMA_VERSION, "command": cfg.command, "config": cfg.to_json(),
               "status": status, "partial": True, "error": str(exc)}
        Path(cfg.out).write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
