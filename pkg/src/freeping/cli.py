"""Command-line entry point: ``freeping <command> ...``.

Exit codes: 0 independent / success, 1 failed verification, 2 relation
found, 3 inconclusive, 4 budget or iteration cap exhausted (partial output
is still written), 64 usage or parse error, 65 degenerate or constant map.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import SCHEMA
from .certifier import (CertifyBudget, IndependenceCertificate, RelationCertificate,
                        certify_independence, scan_pairs_in_ball, verify_certificate)
from .errors import (BudgetExceeded, ConstantMap, DegenerateMap, IterationCapExceeded,
                     MapParseError)
from .growth import compute_delta, enumerate_ball, entropy_estimates, GrowthReport
from .heights import (PreperiodicityVerdict, canonical_height, is_preperiodic, replay_verdict)
from .ifs import (IFSSystem, attractor, cover_sum, gap_delta, hausdorff_bounds,
                  relation_search, scalar_str, sharpness_family)
from .parse import parse_map, parse_point
from .projective import FingerprintConfig, ProjPoint, RationalMap

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_RELATION = 2
EXIT_INCONCLUSIVE = 3
EXIT_BUDGET = 4
EXIT_USAGE = 64
EXIT_DEGENERATE = 65


@dataclass(frozen=True)
class RunConfig:
    """Every tunable knob; each field can be overridden by ``FREEPING_<NAME>``."""

    tol: float = 1e-9
    max_iterations: int = 200
    orbit_cap: int = 10**6
    max_period: int = 3
    preimage_depth: int = 3
    max_word_length: int = 8
    degree_limit: int = 1 << 12
    height_limit: int = 10**6
    digit_budget: int = 10**6
    max_words: int = 1 << 20
    seed: int = 0
    prime: int = (1 << 61) - 1
    workers: int = 1
    output: str | None = None

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if f.name in ("seed", "output"):
                continue
            if v is not None and v <= 0:
                raise ValueError(f"{f.name} must be positive")

    @property
    def fingerprint(self) -> FingerprintConfig:
        return FingerprintConfig(prime=self.prime, seed=self.seed)

    @property
    def budget(self) -> CertifyBudget:
        return CertifyBudget(max_period=self.max_period, preimage_depth=self.preimage_depth,
                             max_word_length=self.max_word_length,
                             degree_limit=self.degree_limit, height_limit=self.height_limit,
                             relation_degree_limit=self.degree_limit)

    def to_json(self) -> dict:
        # workers and output paths never change results, so they stay out
        out = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)
               if f.name not in ("workers", "output")}
        out["tol"] = repr(self.tol)
        out["prime"] = str(self.prime)
        return out


def _env_value(name: str, typ):
    raw = os.environ.get(f"FREEPING_{name.upper()}")
    if raw is None:
        return None
    try:
        # ints accept scientific notation such as 1e6
        return int(Fraction(raw)) if typ is int else typ(raw)
    except ValueError:
        raise MapParseError(f"FREEPING_{name.upper()}={raw!r} is not a valid {typ.__name__}")


def build_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then environment variables, then command-line flags."""
    values = {}
    for f in dataclasses.fields(RunConfig):
        typ = {"float": float, "int": int}.get(str(f.type).split(" ")[0], str)
        env = _env_value(f.name, typ)
        if env is not None:
            values[f.name] = env
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    return RunConfig(**values)


# ---------------------------------------------------------------------------
# output


def _emit(text: str, config: RunConfig) -> None:
    if config.output:
        with open(config.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj: dict, config: RunConfig) -> None:
    body = {"schema": SCHEMA, "config": config.to_json()}
    body.update({k: v for k, v in obj.items() if k != "schema"})
    _emit(json.dumps(body, indent=2) + "\n", config)


def _load_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _load_generators(args) -> list[RationalMap]:
    specs: list = list(args.gen or [])
    if args.gens:
        try:
            data = _load_json(args.gens)
        except json.JSONDecodeError as exc:
            raise MapParseError(f"{args.gens}: invalid JSON ({exc})") from None
        if isinstance(data, dict):
            data = data.get("generators")
        if not isinstance(data, list):
            raise MapParseError("generator file must hold a JSON list of maps")
        specs.extend(data)
    if not specs:
        raise MapParseError("no generators given (use --gens FILE or --gen MAP)")
    return [parse_map(s if isinstance(s, str) else json.dumps(s)) for s in specs]


# ---------------------------------------------------------------------------
# commands


def cmd_certify(args, config: RunConfig) -> int:
    f1, f2 = parse_map(args.map1), parse_map(args.map2)
    result = certify_independence(f1, f2, config.budget)
    _emit_json(result.to_json(), config)
    if isinstance(result, IndependenceCertificate):
        return EXIT_OK
    if isinstance(result, RelationCertificate):
        return EXIT_RELATION
    return EXIT_INCONCLUSIVE


def verify_document(obj: dict) -> bool:
    """Replay any certificate this tool emits."""
    if not isinstance(obj, dict):
        return False
    if obj.get("kind") == "preperiodicity":
        try:
            f = RationalMap.from_json(obj["map"])
            p = ProjPoint.from_json(obj["point"])
            verdict = PreperiodicityVerdict.from_json(obj["result"])
        except (KeyError, ValueError, TypeError):
            return False
        return replay_verdict(f, p, verdict)
    return verify_certificate(obj)


def cmd_verify(args, config: RunConfig) -> int:
    try:
        obj = _load_json(args.certificate)
    except (OSError, json.JSONDecodeError) as exc:
        raise MapParseError(f"cannot read certificate: {exc}") from None
    ok = verify_document(obj)
    kind = obj.get("kind") if isinstance(obj, dict) else None
    _emit_json({"kind": "verification", "certificate_kind": kind, "valid": ok}, config)
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_height(args, config: RunConfig) -> int:
    f, p = parse_map(args.map), parse_point(args.point)
    out = {"kind": "canonical_height", "map": f.to_json(), "point": p.to_json()}
    try:
        est = canonical_height(f, p, config.tol, max_iterations=config.max_iterations)
    except IterationCapExceeded as exc:
        out.update({"status": "partial", "enclosure": exc.partial.to_json() if exc.partial else None,
                    "message": str(exc)})
        _emit_json(out, config)
        return EXIT_BUDGET
    out.update({"status": "ok", "enclosure": est.to_json()})
    _emit_json(out, config)
    return EXIT_OK


def cmd_preper(args, config: RunConfig) -> int:
    f, p = parse_map(args.map), parse_point(args.point)
    out = {"kind": "preperiodicity", "map": f.to_json(), "point": p.to_json()}
    try:
        verdict = is_preperiodic(f, p, orbit_cap=config.orbit_cap)
    except IterationCapExceeded as exc:
        out.update({"status": "partial", "message": str(exc)})
        _emit_json(out, config)
        return EXIT_BUDGET
    out["result"] = verdict.to_json()
    _emit_json(out, config)
    return EXIT_OK


def cmd_growth(args, config: RunConfig) -> int:
    gens = _load_generators(args)
    fp = None if args.exact else config.fingerprint
    code = EXIT_OK
    try:
        ball = enumerate_ball(gens, args.n, config=fp, workers=config.workers,
                              digit_budget=config.digit_budget)
    except BudgetExceeded as exc:
        ball, code = exc.partial, EXIT_BUDGET
    report = GrowthReport(ball.sizes, entropy_estimates(ball), relations=list(ball.relations))
    if args.delta and ball.sizes:
        res = compute_delta(gens, min(args.delta, len(ball.sizes)), config.budget, ball=ball)
        report.delta, report.independent_pair = res.delta, res.independent_pair
    if args.format == "csv":
        _emit(report.to_csv(), config)
    else:
        out = report.to_json()
        out["kind"] = "growth"
        out["status"] = "ok" if code == EXIT_OK else "partial"
        _emit_json(out, config)
    return code


def cmd_delta(args, config: RunConfig) -> int:
    gens = _load_generators(args)
    try:
        ball = enumerate_ball(gens, args.n_max, config=config.fingerprint,
                              workers=config.workers, digit_budget=config.digit_budget)
    except BudgetExceeded as exc:
        partial = exc.partial
        res = compute_delta(gens, len(partial.sizes), config.budget, ball=partial) \
            if partial.sizes else None
        out = res.to_json() if res else {}
        out.update({"kind": "delta", "status": "partial", "message": str(exc)})
        _emit_json(out, config)
        return EXIT_BUDGET
    res = compute_delta(gens, args.n_max, config.budget, ball=ball)
    out = res.to_json()
    out.update({"kind": "delta", "status": "ok" if res.delta else f"delta > {args.n_max}"})
    _emit_json(out, config)
    return EXIT_OK if res.delta else EXIT_INCONCLUSIVE


def cmd_scan(args, config: RunConfig) -> int:
    gens = _load_generators(args)
    report = scan_pairs_in_ball(gens, config.budget, workers=config.workers)
    out = report.to_json()
    out["kind"] = "scan"
    _emit_json(out, config)
    return EXIT_OK if report.independent else EXIT_INCONCLUSIVE


def _parse_scalar(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise MapParseError(f"cannot parse scalar {text!r}") from None


def _system(args) -> IFSSystem:
    try:
        return IFSSystem.from_params(*(_parse_scalar(v) for v in (args.c1, args.t1,
                                                                   args.c2, args.t2)))
    except ValueError as exc:
        if isinstance(exc, MapParseError):
            raise
        raise MapParseError(str(exc)) from None


def cmd_ifs(args, config: RunConfig) -> int:
    if args.ifs_command == "sharpness":
        res = sharpness_family(args.n)
        out = res.to_json()
        out["kind"] = "sharpness"
        _emit_json(out, config)
        return EXIT_OK
    system = _system(args)
    if args.ifs_command == "attract":
        try:
            approx = attractor(system, args.n, max_words=config.max_words)
        except BudgetExceeded as exc:
            _emit_json({"kind": "attractor", "status": "partial", "message": str(exc)}, config)
            return EXIT_BUDGET
        if args.format == "csv":
            _emit(approx.to_csv(), config)
            return EXIT_OK
        bounds = hausdorff_bounds(system, args.n, max_words=config.max_words)
        gap = gap_delta(system, max(args.n, 1), max_words=config.max_words)
        _emit_json({
            "kind": "attractor", "system": system.to_json(), "level": args.n,
            "hull": [scalar_str(x) for x in approx.hull],
            "cover_sum": scalar_str(cover_sum(system, args.n, max_words=config.max_words)),
            "gap": None if gap is None else scalar_str(gap),
            "hausdorff_bounds": [scalar_str(bounds.lower), scalar_str(bounds.upper)],
            "cylinders": [{"word": "".join(map(str, w)), "lo": scalar_str(lo),
                           "hi": scalar_str(hi)} for w, lo, hi in approx.cylinders],
        }, config)
        return EXIT_OK
    try:
        rels = relation_search(system, args.L, max_words=config.max_words)
    except BudgetExceeded as exc:
        _emit_json({"kind": "affine_relations", "status": "partial", "message": str(exc)},
                   config)
        return EXIT_BUDGET
    _emit_json({"kind": "affine_relations", "system": system.to_json(), "max_length": args.L,
                "relations": [r.to_json() for r in rels]}, config)
    return EXIT_RELATION if rels else EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration (flags override FREEPING_* environment variables)")
    g.add_argument("--tol", type=float)
    g.add_argument("--max-iterations", type=_positive_int)
    g.add_argument("--orbit-cap", type=_positive_int)
    g.add_argument("--max-period", type=_positive_int)
    g.add_argument("--preimage-depth", type=_positive_int)
    g.add_argument("--max-word-length", type=_positive_int)
    g.add_argument("--degree-limit", type=_positive_int)
    g.add_argument("--height-limit", type=_positive_int)
    g.add_argument("--digit-budget", type=_positive_int)
    g.add_argument("--max-words", type=_positive_int)
    g.add_argument("--seed", type=int)
    g.add_argument("--prime", type=_positive_int)
    g.add_argument("--workers", type=_positive_int)
    g.add_argument("-o", "--output", help="write the result here instead of stdout")


def _add_gens(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gens", help="JSON file with a list of maps ('-' for stdin)")
    p.add_argument("--gen", action="append", help="a generator map; repeatable")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="freeping",
                     description="Certify free semigroups of rational maps, measure growth, "
                                 "and explore affine contraction systems.")
    parser.add_argument("--verify", metavar="CERTIFICATE",
                        help="replay a certificate JSON file and exit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("certify", help="certify that two maps generate a free semigroup")
    p.add_argument("map1")
    p.add_argument("map2")
    _add_config_flags(p)

    p = sub.add_parser("verify", help="replay a certificate")
    p.add_argument("certificate", help="certificate JSON file ('-' for stdin)")
    _add_config_flags(p)

    p = sub.add_parser("height", help="enclose a canonical height")
    p.add_argument("map")
    p.add_argument("point")
    _add_config_flags(p)

    p = sub.add_parser("preper", help="decide whether a point is preperiodic")
    p.add_argument("map")
    p.add_argument("point")
    _add_config_flags(p)

    p = sub.add_parser("growth", help="ball sizes and entropy estimates")
    _add_gens(p)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--delta", type=_positive_int, help="also search for delta up to this radius")
    p.add_argument("--exact", action="store_true", help="deduplicate without fingerprints")
    _add_config_flags(p)

    p = sub.add_parser("delta", help="diameter of independence")
    _add_gens(p)
    p.add_argument("--n-max", type=_positive_int, default=2)
    _add_config_flags(p)

    p = sub.add_parser("scan", help="scan (sigma f, tau g) pairs for an independent pair")
    _add_gens(p)
    _add_config_flags(p)

    p = sub.add_parser("ifs", help="affine contraction systems on the line")
    isub = p.add_subparsers(dest="ifs_command", required=True, parser_class=_Parser)
    for name, helptext in (("attract", "attractor cylinders, cover sum, gap, H^1 bounds"),
                           ("relations", "exact word relations")):
        q = isub.add_parser(name, help=helptext)
        for flag in ("--c1", "--t1", "--c2", "--t2"):
            q.add_argument(flag, required=True, help="rational, e.g. 1/3")
        if name == "attract":
            q.add_argument("--n", type=int, default=3)
            q.add_argument("--format", choices=("csv", "json"), default="json")
        else:
            q.add_argument("--L", type=_positive_int, default=10)
        _add_config_flags(q)
    q = isub.add_parser("sharpness", help="the relation system c x, c x + 1")
    q.add_argument("--n", type=int, default=2)
    _add_config_flags(q)
    return parser


_COMMANDS = {"certify": cmd_certify, "verify": cmd_verify, "height": cmd_height,
             "preper": cmd_preper, "growth": cmd_growth, "delta": cmd_delta,
             "scan": cmd_scan, "ifs": cmd_ifs}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help exits 0, usage errors exit 64
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        config = build_config(args)
    except (ValueError, MapParseError) as exc:
        print(f"freeping: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.verify:
        args.certificate = args.verify
        command = cmd_verify
    elif args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    else:
        command = _COMMANDS[args.command]
    try:
        return command(args, config)
    except (ConstantMap, DegenerateMap) as exc:
        print(f"freeping: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except MapParseError as exc:
        print(f"freeping: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"freeping: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
