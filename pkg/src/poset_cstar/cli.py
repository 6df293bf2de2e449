"""Command-line front end; every subcommand writes one JSON report.

Exit status: 0 when every check passes, 1 when a check fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import platform
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .checks import Check
from .circle import CircleExample, RationalArc
from .embedding import (
    ChainPartition,
    L_field,
    canonical_field,
    check_psi_compat,
    check_tauL,
    isometry_check,
    lemma_lim_check,
    norm_preservation_probe,
    random_formal_sum,
    random_monomial_field,
    theta,
    theta_at_stage,
)
from .errors import PosetCStarError
from .poset import (
    brute_force_directed_family,
    is_upward_directed,
    max_exhaustive,
    maximal_directed_subsets,
    poset_from_json,
)
from .semigroup import PrimeSequence, level_embed
from .topology import (
    base_set,
    check_base_monotone,
    generate_topology,
    is_T1,
    isolated_points,
    neighborhood_chain,
)
from .toeplitz import OperatorPoly, evaluate, operator_norm, parse_poly, symbol_sup_norm

SCHEMA = 1
COMMANDS = ("decompose", "topology", "norms", "verify-embedding")


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    output: str | None = None
    example: str | None = None
    resolution: int = 64
    depth: int = 5
    point: str = "0"
    primes: str = "2,3,5,7,11"
    trunc: int = 512
    grid: int = 16384
    poly: str = "I + T"
    tolerance: float = 1e-3
    samples: int = 10
    fields: int = 20
    max_power: int = 20
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        for name in ("resolution", "depth", "trunc", "grid", "samples", "fields", "max_power"):
            if getattr(self, name) < 1:
                raise ConfigError(f"--{name.replace('_', '-')} must be a positive integer")
        if self.tolerance <= 0:
            raise ConfigError("--tolerance must be positive")
        if self.example not in (None, "circle"):
            raise ConfigError(f"unknown example {self.example!r}")
        try:
            PrimeSequence.from_config(self.primes)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from None
        try:
            Fraction(self.point)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"--point must be a rational, got {self.point!r}") from None


def _load_poset(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return poset_from_json(obj)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _fmt(x):
    return str(x)


def _check_json(check):
    return check.to_json() if isinstance(check, Check) else check


def cmd_decompose(cfg: RunConfig) -> dict:
    if not cfg.input:
        raise ConfigError("decompose needs an input poset file")
    poset = _load_poset(cfg.input)
    family = maximal_directed_subsets(poset)
    checks = {}
    covered = set().union(*family.members)
    checks["cover"] = Check(covered == set(poset.elements), sorted(set(poset.elements) - covered) or None)
    bad = next((i for i, m in enumerate(family.members)
                if not is_upward_directed(poset, m)
                or any(is_upward_directed(poset, m | {x}) for x in poset.elements if x not in m)), None)
    checks["maximal_directed"] = Check(bad is None, bad)
    if len(poset) <= max_exhaustive():
        oracle = brute_force_directed_family(poset)
        checks["oracle_equivalence"] = Check(oracle.members == family.members)
    else:
        checks["oracle_equivalence"] = {"passed": True, "skipped": f"more than {max_exhaustive()} elements"}
    return {
        "poset": poset.to_json(),
        "family": family.to_json(),
        "checks": {k: _check_json(v) for k, v in checks.items()},
    }


def cmd_topology(cfg: RunConfig) -> dict:
    if cfg.example == "circle":
        ex = CircleExample(cfg.resolution)
        top = generate_topology(ex)
        bases = [{"anchor": str(a), "indices": [str(z) for z in sorted(ex.base_indices(a))]}
                 for a in ex.anchors]
        routes = next((str(a) for a in ex.anchors if ex.base_indices(a) != ex.complement_indices(a)), None)
        iso = sorted(isolated_points(top))
        chains = []
        try:
            ch = neighborhood_chain(ex, Fraction(cfg.point), cfg.depth)
            chains.append(ch.to_json() | {"valid": ch.verify(ex.le).passed})
        except PosetCStarError as exc:
            chains.append({"point": cfg.point, "error": str(exc)})
        checks = {
            "complement_route": Check(routes is None, routes),
            "no_isolated_points": Check(not iso, [str(z) for z in iso] or None),
            "chain": Check(all(c.get("valid", False) for c in chains)),
        }
        index_count = len(ex.indices)
    else:
        if not cfg.input:
            raise ConfigError("topology needs an input poset file or --example circle")
        poset = _load_poset(cfg.input)
        family = maximal_directed_subsets(poset)
        top = generate_topology(family)
        bases = [{"anchor": a, "indices": sorted(base_set(family, a).indices)} for a in poset.elements]
        iso = sorted(isolated_points(top))
        chains = []
        for i in family.indices:
            if i in iso:
                continue
            try:
                ch = neighborhood_chain(family, i, cfg.depth)
                chains.append(ch.to_json() | {"valid": ch.verify(family.le).passed})
            except PosetCStarError as exc:
                chains.append({"point": str(i), "error": str(exc)})
        checks = {
            "base_monotone": check_base_monotone(family),
            "T1": Check(is_T1(top)),
        }
        index_count = len(family)
    return {
        "index_count": index_count,
        "base_sets": bases,
        "is_T1": is_T1(top),
        "isolated_points": [_fmt(z) for z in iso],
        "chains": chains,
        "checks": {k: _check_json(v) for k, v in checks.items()},
    }


def cmd_norms(cfg: RunConfig) -> dict:
    try:
        p = parse_poly(cfg.poly)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if p.degree >= cfg.trunc:
        raise ConfigError(f"degree {p.degree} does not fit in --trunc {cfg.trunc}")
    if cfg.grid < 4 * (p.degree + 1):
        raise ConfigError(f"--grid must be at least {4 * (p.degree + 1)}")
    matrix_norm = operator_norm(evaluate(p, cfg.trunc), tol=1e-9)
    symbol_norm = symbol_sup_norm(p, cfg.grid)
    diff = abs(matrix_norm - symbol_norm)
    return {
        "poly": str(p),
        "N": cfg.trunc,
        "matrix_norm": matrix_norm,
        "symbol_norm": symbol_norm,
        "diff": diff,
        "checks": {"agreement": {"passed": diff <= cfg.tolerance, "tolerance": cfg.tolerance}},
    }


def _lemma_lim_inputs(ex, chain, rng, count):
    z = chain.point
    r_min = ex.chain_radii(chain.depth)[-1]
    tested = list(chain.anchors)
    for _ in range(count):
        r1, r2 = (r_min + Fraction(int(rng.integers(0, 64)), 256) for _ in range(2))
        r1, r2 = min(r1, Fraction(63, 128)), min(r2, Fraction(63, 128))
        tested.append(RationalArc.from_endpoints(z + r1, z - r2))
    points = ex.points_for(chain)
    samples = []
    for k in range(count):
        a = tested[int(rng.integers(0, len(tested)))]
        samples.append((a, random_monomial_field(ex.base_indices(a, points), rng)))
    return tested, samples


def cmd_verify_embedding(cfg: RunConfig) -> dict:
    if cfg.example != "circle":
        raise ConfigError("verify-embedding needs --example circle")
    primes = PrimeSequence.from_config(cfg.primes)
    ex = CircleExample(cfg.resolution)
    report = {}
    try:
        chain = neighborhood_chain(ex, Fraction(cfg.point), cfg.depth)
    except PosetCStarError as exc:
        return {"chain": {"passed": False, "detail": str(exc)}}
    part = ChainPartition.from_chain(chain)
    chain_ok = chain.verify(ex.le)
    part_ok = part.validate()
    report["chain"] = chain.to_json() | {"passed": bool(chain_ok and part_ok),
                                         "cells": [len(w) for w in part.cells]}
    if cfg.depth < 3:
        report["chain"]["passed"] = False
        report["chain"]["detail"] = "depth must be at least 3 for stage-to-stage checks"
        return report
    stages = range(1, cfg.depth - 1)
    monomials = [OperatorPoly.shift(m) for m in range(cfg.max_power + 1)]

    fails = [n for n in stages if not check_tauL(primes, part, n)]
    report["tauL"] = {"passed": not fails, "stages": list(stages), "witnesses": fails}

    fails = [n for n in stages if not check_psi_compat(primes, part, n, monomials)]
    report["psi_compat"] = {"passed": not fails, "stages": list(stages), "witnesses": fails}

    iso = {"passed": True, "fields": []}
    for n in range(1, cfg.depth):
        try:
            res = isometry_check(L_field(primes, part, n), cfg.trunc)
            widths = sorted(set(res["widths"].values()))
            iso["fields"].append({"stage": n, "passed": res["passed"], "widths": widths})
            iso["passed"] &= res["passed"]
        except PosetCStarError as exc:
            iso["fields"].append({"stage": n, "passed": False, "detail": str(exc)})
            iso["passed"] = False
    report["isometry"] = iso

    bad = []
    for n in stages:
        for m in range(cfg.max_power + 1):
            g = level_embed(primes, n, m)
            here = canonical_field(part, theta_at_stage(primes, part, g, n), n + 1)
            there = theta_at_stage(primes, part, g, n + 1)
            minimal = canonical_field(part, theta(primes, part, g), n + 1)
            if not (here == there == minimal):
                bad.append(str(g.value))
    report["theta_welldef"] = {"passed": not bad, "witnesses": bad}

    rng = np.random.default_rng(cfg.seed)
    sums = [random_formal_sum(primes, rng, cfg.depth - 1) for _ in range(cfg.samples)]
    report["norm_probe"] = norm_preservation_probe(primes, part, sums, cfg.grid, cfg.trunc)

    tested, samples = _lemma_lim_inputs(ex, chain, rng, cfg.fields)
    try:
        lim = lemma_lim_check(ex, chain, samples, tested)
        report["lemma_lim"] = lim.to_json() | {"anchors": len(tested), "samples": len(samples)}
    except PosetCStarError as exc:
        report["lemma_lim"] = {"passed": False, "detail": str(exc), "witness": exc.witness}
    return report


HANDLERS = {
    "decompose": cmd_decompose,
    "topology": cmd_topology,
    "norms": cmd_norms,
    "verify-embedding": cmd_verify_embedding,
}


def _passed(node) -> bool:
    if isinstance(node, dict):
        if node.get("passed") is False:
            return False
        return all(_passed(v) for v in node.values())
    if isinstance(node, list):
        return all(_passed(v) for v in node)
    return True


def run(cfg: RunConfig):
    """Run one command; returns (exit code, report dict)."""
    cfg.validate()
    body = HANDLERS[cfg.command](cfg)
    ok = _passed(body)
    config = {k: v for k, v in asdict(cfg).items() if k not in ("output", "extra")}
    report = {
        "schema": SCHEMA,
        "command": cfg.command,
        "versions": {"poset_cstar": __version__, "numpy": np.__version__,
                     "python": platform.python_version()},
        "config": config,
        "passed": ok,
    }
    report.update(body)
    return (0 if ok else 1), report


def dumps(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="poset-cstar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-o", "--output", help="write the report here instead of stdout")
        return p

    d = common(sub.add_parser("decompose", help="maximal upward directed subsets of a poset"))
    d.add_argument("input", help="poset JSON file")

    t = common(sub.add_parser("topology", help="base sets, T1, isolated points, chains"))
    t.add_argument("input", nargs="?", help="poset JSON file")
    t.add_argument("--example", choices=["circle"])
    t.add_argument("--resolution", type=int, default=64)
    t.add_argument("--depth", type=int, default=3)
    t.add_argument("--point", default="0")

    n = common(sub.add_parser("norms", help="section norm vs symbol norm of a polynomial"))
    n.add_argument("--poly", default="I + T", help='e.g. "I + 2T + T^3"')
    n.add_argument("--trunc", "-N", type=int, default=512)
    n.add_argument("--grid", type=int, default=16384)
    n.add_argument("--tolerance", type=float, default=1e-3)

    v = common(sub.add_parser("verify-embedding", help="check the embedding construction end to end"))
    v.add_argument("--example", choices=["circle"], default="circle")
    v.add_argument("--resolution", type=int, default=64)
    v.add_argument("--depth", type=int, default=5)
    v.add_argument("--point", default="0")
    v.add_argument("--primes", default="2,3,5,7,11",
                   help='comma list, "increasing" or "every-prime-infinitely-often"')
    v.add_argument("--trunc", type=int, default=512)
    v.add_argument("--grid", type=int, default=16384)
    v.add_argument("--samples", type=int, default=10, help="random sums in the norm probe")
    v.add_argument("--fields", type=int, default=20, help="random fields in the limit check")
    v.add_argument("--max-power", type=int, default=20)
    v.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    kwargs = {k: v for k, v in vars(args).items() if v is not None}
    if args.command == "topology" and "depth" not in kwargs:
        kwargs["depth"] = 3
    try:
        code, report = run(RunConfig(**kwargs))
    except ConfigError as exc:
        print(f"poset-cstar: error: {exc}", file=sys.stderr)
        return 2
    text = dumps(report)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
