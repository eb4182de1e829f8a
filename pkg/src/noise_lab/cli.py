"""Command-line front end.

Single estimates and diagnostics are written as JSON, grids as CSV.  Every
report embeds the configuration that produced it; the wall-clock timestamp
lives in a separate header so that report bodies are reproducible.

Exit codes: 0 success, 1 usage error, 2 degenerate result.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional

import numpy as np

from . import __version__
from .core import NoiseParams
from .estimators import Pin, conditional_from_pairs, correlation_from_pairs, paired_outcomes, \
    sweep_eps, _mean_estimate, estimate_covariance
from .families import (RecMajSpec, TribesSpec, iterate_h, make_recmaj, make_tribes,
                       recmaj_conditioned_prob, tribes_bias_solve, tribes_witness_gap)
from .fourier import (BooleanFunction, MAX_EXACT_ARITY, TruthTableFunction, and_function,
                      dictator, influences, majority, noise_covariance_exact, pivotal_report,
                      spectral_pivotal_identity, transform)
from .witness import WitnessSet, canonical, enumerate_witnesses, sns_gap

EXIT_OK, EXIT_USAGE, EXIT_DEGENERATE = 0, 1, 2
SUBCOMMANDS = ("spectrum", "influence", "cov", "sns", "sweep", "family", "graph-prop",
               "poisson-check", "balanced", "giant-robustness")
CONFIG_PREFIX = "# config: "
HEADER_PREFIX = "# generated: "


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    subcommand: str
    options: dict = field(default_factory=dict)

    def to_dict(self):
        return {"subcommand": self.subcommand, "options": dict(sorted(self.options.items()))}

    @classmethod
    def from_dict(cls, d) -> "ExperimentConfig":
        if d.get("subcommand") not in SUBCOMMANDS:
            raise UsageError(f"unknown subcommand {d.get('subcommand')!r}")
        return cls(d["subcommand"], dict(d.get("options", {})))

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "ExperimentConfig":
        opts = {k: v for k, v in vars(ns).items() if k not in ("subcommand", "output")}
        return cls(ns.subcommand, opts)


# -- report formats ------------------------------------------------------------

def _header() -> dict:
    return {"generated": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "version": __version__}


def _clean(x):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


def json_body(config: ExperimentConfig, result: dict) -> dict:
    return {"config": config.to_dict(), "result": _clean(result)}


def render_json(config: ExperimentConfig, result: dict) -> str:
    doc = {"header": _header(), **json_body(config, result)}
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def render_csv(config: ExperimentConfig, table: str) -> str:
    head = HEADER_PREFIX + json.dumps(_header(), sort_keys=True) + "\n"
    cfg = CONFIG_PREFIX + json.dumps(_clean(config.to_dict()), sort_keys=True) + "\n"
    return head + cfg + table


def report_body(text: str) -> str:
    """The report minus its timestamp header."""
    if text.startswith(HEADER_PREFIX):
        return text.split("\n", 1)[1]
    doc = json.loads(text)
    doc.pop("header", None)
    return json.dumps(doc, indent=2, sort_keys=True)


def parse_report(text: str) -> tuple[ExperimentConfig, object]:
    """Inverse of the renderers: ``(config, result)``; CSV results are row dicts."""
    if text.startswith(HEADER_PREFIX):
        lines = text.split("\n")
        if not lines[1].startswith(CONFIG_PREFIX):
            raise ValueError("CSV report lacks a config line")
        cfg = ExperimentConfig.from_dict(json.loads(lines[1][len(CONFIG_PREFIX):]))
        rows = list(csv.DictReader(io.StringIO("\n".join(lines[2:]))))
        return cfg, rows
    doc = json.loads(text)
    return ExperimentConfig.from_dict(doc["config"]), doc["result"]


# -- builders ------------------------------------------------------------------

def build_function(ns) -> BooleanFunction:
    fam = ns.family
    if fam == "tribes":
        _need(ns, "blocks", "block_size")
        return make_tribes(TribesSpec(ns.blocks, ns.block_size, ns.reversed))
    if fam == "recmaj":
        _need(ns, "depth")
        return make_recmaj(RecMajSpec(ns.fanout, ns.depth))
    if fam == "majority":
        _need(ns, "n")
        return majority(ns.n)
    if fam == "and":
        _need(ns, "n")
        return and_function(ns.n)
    if fam == "dictator":
        _need(ns, "n")
        return dictator(ns.n, ns.index)
    if fam == "table":
        _need(ns, "table")
        bits = [int(c) for c in ns.table.strip()]
        if any(b not in (0, 1) for b in bits):
            raise UsageError("--table must be a 0/1 string")
        return TruthTableFunction(np.array(bits, dtype=bool))
    raise UsageError(f"unknown family {fam!r}")


def _need(ns, *names):
    missing = [n for n in names if getattr(ns, n, None) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _read_pattern(path: str):
    from .graphs.patterns import PatternGraph
    with open(path) as fh:
        return PatternGraph.from_text(fh.read(), name=path)


def build_pattern(ns):
    from .graphs import patterns
    if getattr(ns, "pattern", None):
        return _read_pattern(ns.pattern)
    if getattr(ns, "clique", None):
        return patterns.clique(ns.clique)
    if getattr(ns, "two_triangles", None):
        return patterns.two_triangles_path(ns.two_triangles)
    if getattr(ns, "disjoint_edges", None):
        return patterns.disjoint_edges(ns.disjoint_edges)
    raise UsageError("give one of --pattern, --clique, --two-triangles, --disjoint-edges")


def build_property(ns):
    from .graphs import properties
    _need(ns, "n")
    if ns.property == "cycle":
        return properties.property_cycle_in_range(ns.n, ns.a, ns.b)
    if ns.property == "min-degree":
        return properties.property_min_degree(ns.n, ns.k or 1)
    if ns.property == "clique":
        _need(ns, "k")
        return properties.property_clique(ns.n, ns.k)
    if ns.property == "contains":
        _need(ns, "pattern")
        return properties.property_contains(_read_pattern(ns.pattern), ns.n)
    raise UsageError(f"unknown property {ns.property!r}")


def property_p(ns, prop) -> float:
    """Edge probability: explicit ``--p`` or the property's non-degenerate scale."""
    from .graphs.moments import solve_p_for_expected
    if ns.p is not None:
        return ns.p
    n = ns.n
    if ns.property == "cycle":
        # critical window p = (1 + xi n^{-1/3}) / n
        return (1 + ns.xi * n ** (-1 / 3)) / n
    if ns.property == "min-degree":
        k = prop.k
        return (math.log(n) + (k - 1) * math.log(math.log(n)) + ns.c) / n
    return solve_p_for_expected(prop.h, n, 1.0)


def auto_eps_grid(ns, points: int) -> list[float]:
    """Log grid over two decades around the theory scale of the property."""
    prop = getattr(ns, "property", None)
    if prop == "cycle":
        center = ns.n ** (-1 / 3)
    elif prop == "min-degree":
        center = 1 / math.log(ns.n)
    else:
        center = 0.1
    grid = center * 10 ** np.linspace(-1, 1, points)
    return sorted({float(min(e, 1.0)) for e in grid})


def parse_grid(ns) -> list[float]:
    if ns.eps_grid == "auto":
        return auto_eps_grid(ns, ns.points)
    try:
        grid = [float(x) for x in ns.eps_grid.split(",") if x.strip()]
    except ValueError:
        raise UsageError("--eps-grid must be 'auto' or a comma-separated list") from None
    if not grid:
        raise UsageError("empty --eps-grid")
    return grid


# -- subcommands -----------------------------------------------------------------

def cmd_spectrum(ns):
    f = build_function(ns)
    if f.arity > MAX_EXACT_ARITY:
        raise UsageError(f"exact spectrum needs arity <= {MAX_EXACT_ARITY}")
    return "csv", transform(f, ns.p).to_csv(parseval_row=True), False


def cmd_influence(ns):
    f = build_function(ns)
    report = pivotal_report(f, ns.p)
    table = transform(f, ns.p)
    lhs, rhs = spectral_pivotal_identity(table, report)
    res = {"influences": influences(f, ns.p, verify=f.monotone), "total_influence":
           float(report.influences.sum()), "prob_one": report.prob_one,
           "expected_pivotal_size": report.expected_size,
           "expected_pivotal_size_given_one": report.expected_size_given_one,
           "expected_pivotal_size_given_zero": report.expected_size_given_zero,
           "lemma_status": report.lemma_status, "lemma_residual": report.lemma_residual,
           "expected_spectral_size": lhs, "p_q_expected_pivotal_size": rhs}
    return "json", res, report.lemma_status == "skipped: degenerate"


def cmd_cov(ns):
    f = build_function(ns)
    r = estimate_covariance(f, ns.p, ns.eps, ns.samples, ns.seed, ns.workers)
    res = r.to_dict()
    if f.arity <= MAX_EXACT_ARITY:
        res["exact"] = noise_covariance_exact(transform(f, ns.p), ns.eps)
    return "json", res, r.degenerate


def _witnesses(f, kind: str, mode: str = "auto") -> WitnessSet:
    if mode == "enumerate" or (mode == "auto" and f.arity <= 20 and f.monotone):
        return enumerate_witnesses(f, kind)
    if kind == "one" and hasattr(f, "canonical_witness"):
        return canonical("one", f.canonical_witness())
    if kind == "one" and hasattr(f, "block_witness"):
        return canonical("one", f.block_witness(0))
    raise UsageError("no witness available for this function at this arity")


def cmd_sns(ns):
    f = build_function(ns)
    ws = _witnesses(f, ns.kind, ns.witness)
    r = sns_gap(f, ws, NoiseParams(ns.p, ns.eps), ns.samples, ns.seed, ns.workers)
    return "json", r.to_dict(include_witnesses=len(ws) <= 64), r.degenerate


def cmd_sweep(ns):
    grid = parse_grid(ns)
    if ns.property:
        f = build_property(ns)
        p = property_p(ns, f)
    elif ns.family:
        if ns.p is None:
            ns.p = 0.5
        f = build_function(ns)
        p = ns.p
    else:
        raise UsageError("sweep needs --family or --property")
    r = sweep_eps(f, p, grid, ns.samples, ns.seed, ns.workers)
    degenerate = r.prob_one.value in (0.0, 1.0)
    return "csv", r.to_csv(), degenerate


def cmd_family(ns):
    fam = ns.family
    if fam == "tribes":
        _need(ns, "blocks", "block_size")
        spec = TribesSpec(ns.blocks, ns.block_size, ns.reversed)
        res = {"arity": spec.arity, "prob_one": spec.prob_one(ns.p),
               "balanced_bias": tribes_bias_solve(spec, 0.5)}
        if not ns.reversed:
            res["witness_gap"] = tribes_witness_gap(spec, ns.p, ns.eps)
        return "json", res, False
    if fam == "recmaj":
        _need(ns, "depth")
        res = {"fanout": ns.fanout, "depth": ns.depth, "eps": ns.eps,
               "conditioned_prob": recmaj_conditioned_prob(ns.fanout, ns.depth, ns.eps)}
        return "json", res, False
    if fam == "h-map":
        return "json", {"x0": ns.x0, "steps": ns.steps, "value": iterate_h(ns.x0, ns.steps)}, False
    raise UsageError("family subcommand supports tribes, recmaj and h-map")


def cmd_graph_prop(ns):
    prop = build_property(ns)
    p = property_p(ns, prop)
    pins = [Pin()]
    w = prop.canonical_witness()
    if w is not None:
        pins.append(Pin(ones=w) if prop.witness_kind == "one" else Pin(zeros=w))
    out = paired_outcomes(prop, p, [ns.eps], ns.samples, ns.seed, pins=pins, workers=ns.workers)
    x, y = out.base, out.noised[:, 0, 0]
    cond = conditional_from_pairs(x, y, ns.seed)
    res = {"p": p, "eps": ns.eps, "property": prop.name, "conditional": cond.to_dict(),
           "correlation": correlation_from_pairs(x, y, ns.seed).to_dict(),
           "flip": _mean_estimate(x != y, ns.seed).to_dict(),
           "inconclusive": out.inconclusive,
           "inconclusive_fraction": out.inconclusive / (ns.samples * (len(pins) + 1))}
    if w is not None:
        target = 1 if prop.witness_kind == "one" else 0
        xb = out.base == target
        yw = out.noised[:, 1, 0] == target
        res["witness"] = {"kind": prop.witness_kind, "size": len(w),
                          "gap": _mean_estimate(yw.astype(float) - xb, ns.seed).to_dict()}
    return "json", res, cond.degenerate


def cmd_poisson(ns):
    from .graphs.moments import expected_copies, solve_p_for_expected
    from .graphs.poisson import poisson_diagnostics
    from .graphs.properties import ContainsPattern
    h = build_pattern(ns)
    _need(ns, "n")
    p = ns.p if ns.p is not None else solve_p_for_expected(h, ns.n, ns.target_mean)
    prop = ContainsPattern(h, ns.n)
    d = poisson_diagnostics(prop, p, ns.samples, ns.seed, ns.lam, ns.workers)
    res = {"p": p, "pattern": h.to_text(), "expected_copies": expected_copies(h, ns.n, p),
           **d.to_dict()}
    return "json", res, d.degenerate


def cmd_balanced(ns):
    from .graphs.patterns import strictly_balanced
    h = build_pattern(ns)
    return "json", {"pattern": h.to_text(), **strictly_balanced(h).to_dict()}, False


def cmd_giant(ns):
    from .graphs.giant import giant_robustness_experiment
    r = giant_robustness_experiment(ns.n, ns.lam, ns.eps, ns.k_triangles, ns.samples, ns.seed,
                                    ns.path_samples, ns.workers)
    return "json", r.to_dict(), r.degenerate


COMMANDS = {"spectrum": cmd_spectrum, "influence": cmd_influence, "cov": cmd_cov,
            "sns": cmd_sns, "sweep": cmd_sweep, "family": cmd_family,
            "graph-prop": cmd_graph_prop, "poisson-check": cmd_poisson,
            "balanced": cmd_balanced, "giant-robustness": cmd_giant}


# -- parser ------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(sp, samples: Optional[int] = 10_000):
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=samples)
    sp.add_argument("--workers", type=int, default=None,
                    help="worker processes (default: $NOISE_LAB_WORKERS or 1)")
    sp.add_argument("--budget-cap", type=int, default=64,
                    help="max growth factor for adaptive sample doubling")
    sp.add_argument("--output", "-o", default=None, help="output file (default: stdout)")


def _function_args(sp, required=True):
    sp.add_argument("--family", required=required,
                    choices=["tribes", "recmaj", "majority", "and", "dictator", "table"])
    sp.add_argument("--blocks", type=int)
    sp.add_argument("--block-size", type=int)
    sp.add_argument("--reversed", action="store_true")
    sp.add_argument("--fanout", type=int, default=3)
    sp.add_argument("--depth", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--index", type=int, default=0)
    sp.add_argument("--table", help="truth table as a 0/1 string, entry x at position x")
    sp.add_argument("--p", type=float, default=0.5)


def _property_args(sp, required=True):
    sp.add_argument("--property", required=required,
                    choices=["cycle", "min-degree", "clique", "contains"])
    sp.add_argument("--a", type=float, default=1.0, help="cycle window lower factor")
    sp.add_argument("--b", type=float, default=2.0, help="cycle window upper factor")
    sp.add_argument("--k", type=int)
    sp.add_argument("--pattern", help="edge-list file: 'k l' then l lines 'u v'")
    sp.add_argument("--xi", type=float, default=0.0,
                    help="cycle property: p = (1 + xi n^{-1/3})/n (critical window)")
    sp.add_argument("--c", type=float, default=0.0,
                    help="min-degree: p = (log n + (k-1) log log n + c)/n")


def _pattern_args(sp):
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--pattern")
    g.add_argument("--clique", type=int)
    g.add_argument("--two-triangles", type=int, metavar="R")
    g.add_argument("--disjoint-edges", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="noise-lab", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    sp = sub.add_parser("spectrum", help="exact p-biased Fourier spectrum (CSV)")
    _function_args(sp)
    _common(sp)

    sp = sub.add_parser("influence", help="influences and pivotal-set identities (JSON)")
    _function_args(sp)
    _common(sp)

    sp = sub.add_parser("cov", help="Monte Carlo Cov(f(omega), f(omega^eps)) (JSON)")
    _function_args(sp)
    sp.add_argument("--eps", type=float, required=True)
    _common(sp)

    sp = sub.add_parser("sns", help="witness-conditioned noise gaps (JSON)")
    _function_args(sp)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--kind", choices=["one", "zero"], default="one")
    sp.add_argument("--witness", choices=["auto", "canonical", "enumerate"], default="auto",
                    help="enumerate all witnesses (arity <= 20) or use the family's canonical one")
    _common(sp)

    sp = sub.add_parser(
        "sweep", help="correlation / flip sweep over an eps grid (CSV)",
        description="Common-random-number eps sweep.  '--eps-grid auto' spans two decades "
                    "around n^(-1/3) for the cycle-window property (critical random graph), "
                    "1/log n for minimum degree, and 0.1 otherwise.")
    fam = sp.add_mutually_exclusive_group(required=True)
    fam.add_argument("--family", choices=["tribes", "recmaj", "majority", "and", "dictator",
                                          "table"])
    fam.add_argument("--property", choices=["cycle", "min-degree", "clique", "contains"])
    for a, kw in [("--blocks", {"type": int}), ("--block-size", {"type": int}),
                  ("--fanout", {"type": int, "default": 3}), ("--depth", {"type": int}),
                  ("--n", {"type": int}), ("--index", {"type": int, "default": 0}),
                  ("--table", {}), ("--p", {"type": float, "default": None}),
                  ("--a", {"type": float, "default": 1.0}), ("--b", {"type": float, "default": 2.0}),
                  ("--k", {"type": int}), ("--pattern", {}),
                  ("--xi", {"type": float, "default": 0.0}),
                  ("--c", {"type": float, "default": 0.0})]:
        sp.add_argument(a, **kw)
    sp.add_argument("--reversed", action="store_true")
    sp.add_argument("--eps-grid", default="auto")
    sp.add_argument("--points", type=int, default=9)
    _common(sp, samples=2000)

    sp = sub.add_parser("family", help="closed-form family quantities (JSON)")
    sp.add_argument("--family", required=True, choices=["tribes", "recmaj", "h-map"])
    sp.add_argument("--blocks", type=int)
    sp.add_argument("--block-size", type=int)
    sp.add_argument("--reversed", action="store_true")
    sp.add_argument("--fanout", type=int, default=3)
    sp.add_argument("--depth", type=int)
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--eps", type=float, default=0.1)
    sp.add_argument("--x0", type=float, default=0.5)
    sp.add_argument("--steps", type=int, default=1)
    _common(sp)

    sp = sub.add_parser("graph-prop", help="G(n,p) property: P(f=1), noise gap, witness gap (JSON)")
    _property_args(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--eps", type=float, required=True)
    _common(sp, samples=1000)

    sp = sub.add_parser("poisson-check", help="Chen-Stein diagnostics for copy counts (JSON)")
    _pattern_args(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--target-mean", type=float, default=1.0,
                    help="solve p so the expected copy count equals this")
    sp.add_argument("--lam", type=float, default=None,
                    help="Poisson mean for the TV distance (default: sample mean)")
    _common(sp)

    sp = sub.add_parser("balanced", help="(strict) balancedness of a pattern graph (JSON)")
    _pattern_args(sp)
    sp.add_argument("--output", "-o", default=None)

    sp = sub.add_parser("giant-robustness",
                        help="triangles in the giant component under noise (JSON)")
    sp.add_argument("--n", type=int, default=100_000)
    sp.add_argument("--lambda", dest="lam", type=float, default=10.0)
    sp.add_argument("--eps", type=float, default=0.02)
    sp.add_argument("--k-triangles", type=int, default=1)
    sp.add_argument("--path-samples", type=int, default=None)
    _common(sp, samples=500)
    return ap


def run(argv=None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    try:
        ns = build_parser().parse_args(argv)
        kind, payload, degenerate = COMMANDS[ns.subcommand](ns)
        config = ExperimentConfig.from_namespace(ns)
        text = render_json(config, payload) if kind == "json" else render_csv(config, payload)
    except UsageError as e:
        print(f"noise-lab: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, IndexError, OverflowError) as e:
        print(f"noise-lab: invalid input: {e}", file=sys.stderr)
        return EXIT_USAGE
    if ns.output:
        try:
            with open(ns.output, "w") as fh:
                fh.write(text)
        except OSError as e:
            print(f"noise-lab: cannot write {ns.output}: {e}", file=sys.stderr)
            return EXIT_USAGE
    else:
        stdout.write(text)
    return EXIT_DEGENERATE if degenerate else EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
