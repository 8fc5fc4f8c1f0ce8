"""Command-line front end.

Reports go to stdout (newline-delimited JSON by default), progress and
diagnostics to stderr.  Exit status: 0 ok, 1 domain error or failed check,
2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import constructions, search, topology
from .core import IntegerSet, find_ap_witness
from .errors import ApfreeError
from .greedy import GreedyCache, generate_up_to
from .measure import LOG_BASE, gerver_reference, measure_report, mu
from .seqio import format_sequence, read_sequence, write_sequence

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
FORMATS = ("json", "csv", "text")

log = logging.getLogger("apfree")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    p: Optional[int] = None
    count: Optional[int] = None
    limit: Optional[int] = None
    n: Optional[int] = None
    m: Optional[int] = None
    steps: Optional[int] = None
    file: Optional[Path] = None
    amplifier: Optional[Path] = None
    a1: Optional[Path] = None
    out: Optional[Path] = None
    method: str = "bnb"
    budget: Optional[int] = None
    epsilon: Optional[Fraction] = None
    window: Optional[int] = None
    horizon: Optional[int] = None
    seed: int = 0
    instances: int = 0
    format: str = "json"
    cache_dir: Optional[Path] = None
    jobs: int = 1
    with_mu: bool = False
    compare: bool = False
    amplifier_source: str = "greedy"

    def validate(self) -> "RunConfig":
        if self.format not in FORMATS:
            raise UsageError(f"--format must be one of {FORMATS}")
        if self.p is not None and self.p < 3:
            raise UsageError("--p must be >= 3")
        if self.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        return self


def _emit(out, obj: dict) -> None:
    out.write(json.dumps(obj, sort_keys=False) + "\n")


def _require(value, flag: str):
    if value is None:
        raise UsageError(f"{flag} is required")
    return value


def _p_from(cfg: RunConfig, stored: Optional[int]) -> int:
    p = cfg.p if cfg.p is not None else stored
    if p is None:
        raise UsageError("--p is required (file carries no p= line)")
    return p


def _mu_table(s: IntegerSet) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "term", "mu_partial"])
    total = 0.0
    comp = 0.0
    for i, x in enumerate(s.elements, start=1):
        y = 1.0 / x - comp
        t = total + y
        comp = (t - total) - y
        total = t
        w.writerow([i, x, repr(total)])
    return buf.getvalue()


def cmd_gen(cfg: RunConfig, out) -> int:
    p = _require(cfg.p, "--p")
    if (cfg.count is None) == (cfg.limit is None):
        raise UsageError("give exactly one of --count or --limit")
    if cfg.count is not None:
        log.info("generating %d terms of S_%d", cfg.count, p)
        s = GreedyCache(cfg.cache_dir).generate(p, cfg.count)
    else:
        s = generate_up_to(p, cfg.limit)
    if cfg.out is not None:
        write_sequence(cfg.out, s, p=p)
    r = mu(s) if cfg.with_mu else None
    if cfg.format == "text":
        comments = []
        if r is not None:
            comments = [f"mu_exact={r.exact_str()}", f"mu_approx={r.approx!r}"]
        out.write(format_sequence(s, p, comments))
    elif cfg.format == "csv":
        out.write(_mu_table(s))
    else:
        obj = {"p": p, "count": len(s), "terms": list(s.elements)}
        if r is not None:
            obj.update({"mu_exact": r.exact_str(), "mu_approx": r.approx,
                        "reference_p_log_p": gerver_reference(p), "log_base": LOG_BASE})
        _emit(out, obj)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out) -> int:
    s, stored = read_sequence(_require(cfg.file, "--file"))
    p = _p_from(cfg, stored)
    w = find_ap_witness(s, p)
    obj = {"p": p, "count": len(s), "ap_free": w is None,
           "witness": None if w is None else w.as_dict()}
    if cfg.format == "text":
        out.write("AP-free\n" if w is None else f"progression {w.terms} (start={w.start}, diff={w.diff})\n")
    else:
        _emit(out, obj)
    return EXIT_OK if w is None else EXIT_DOMAIN


def cmd_mu(cfg: RunConfig, out) -> int:
    s, stored = read_sequence(_require(cfg.file, "--file"))
    p = cfg.p if cfg.p is not None else stored
    if cfg.format == "csv":
        out.write(_mu_table(s))
        return EXIT_OK
    rep = measure_report(s, p)
    if cfg.format == "text":
        out.write(f"mu_exact={rep['mu_exact']}\nmu_approx={rep['mu_approx']!r}\n")
    else:
        _emit(out, rep)
    return EXIT_OK


def _search_amplifier(p: int, n: int, budget: int) -> Optional[IntegerSet]:
    # optimal subsets of [1, k] for growing k; off by default (slower than greedy)
    for k in range(1, budget + 1):
        res = search.max_mu_subset(k, p)
        if res.best_mu.exact >= 2 * n:
            return res.best_set
    return None


def cmd_amplify(cfg: RunConfig, out) -> int:
    a, stored = read_sequence(_require(cfg.file, "--file"))
    p = _p_from(cfg, stored)
    if cfg.amplifier is not None:
        e, _ = read_sequence(cfg.amplifier)
    elif cfg.amplifier_source == "search":
        budget = cfg.budget if cfg.budget is not None else 40
        e = _search_amplifier(p, a.max, budget)
        if e is None:
            _emit(out, {"error": "AmplifierInfeasible", "required_mu": 2 * a.max, "budget": budget})
            return EXIT_DOMAIN
    else:
        budget = cfg.budget if cfg.budget is not None else 10**6
        found = constructions.find_amplifier(p, a.max, budget)
        if not found.feasible:
            _emit(out, {"error": "AmplifierInfeasible", "required_mu": found.target,
                        "reason": found.reason, "harmonic_ceiling": found.ceiling.as_dict()})
            return EXIT_DOMAIN
        e = found.amplifier
    rep = constructions.amplify(a, e, p)
    if cfg.out is not None:
        write_sequence(cfg.out, rep.result, p=p)
    _emit(out, {"p": p, **rep.as_dict()})
    return EXIT_OK


def cmd_partition(cfg: RunConfig, out) -> int:
    if cfg.instances:
        summary = constructions.lemma_suite(cfg.instances, cfg.seed)
        _emit(out, summary.as_dict())
        return EXIT_OK if summary.passed else EXIT_DOMAIN
    r, stored = read_sequence(_require(cfg.file, "--file"))
    m = _require(cfg.m, "--m")
    part = constructions.partition_R(r, m)
    j, rj = constructions.pigeonhole_part(r, m)
    obj = {**part.as_dict(), "mu_R": mu(r, exact_cap=None).exact_str(), "pigeonhole_j": j}
    if cfg.a1 is not None:
        a1, _ = read_sequence(cfg.a1)
        p = _p_from(cfg, stored)
        joined = constructions.join_lemma(a1, r, m, p)
        obj["joined"] = list(joined.elements)
        if cfg.out is not None:
            write_sequence(cfg.out, joined, p=p)
    _emit(out, obj)
    return EXIT_OK


def cmd_search(cfg: RunConfig, out) -> int:
    n = _require(cfg.n, "--n")
    p = _require(cfg.p, "--p")
    log.info("searching N=%d p=%d method=%s", n, p, cfg.method)
    if cfg.compare:
        obj = search.greedy_vs_optimal(n, p, cfg.method).as_dict()
    else:
        obj = search.max_mu_subset(n, p, cfg.method, jobs=cfg.jobs).as_dict()
    if cfg.format == "csv":
        res = obj["optimal"] if cfg.compare else obj
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "p", "method", "best_mu", "best_mu_approx", "nodes_explored", "best_set"])
        w.writerow([res["N"], res["p"], res["method"], res["best_mu"], res["best_mu_approx"],
                    res["nodes_explored"], " ".join(map(str, res["best_set"]))])
        out.write(buf.getvalue())
    else:
        _emit(out, obj)
    return EXIT_OK


def _manifest_member(entry, base: Path):
    if isinstance(entry, str):
        entry = {"file": entry}
    s, _ = read_sequence(base / entry["file"])
    if entry.get("horizon") is not None:
        return topology.HorizonSet(s, int(entry["horizon"]), entry["file"])
    return s


def cmd_converge(cfg: RunConfig, out) -> int:
    """Manifest: JSON {"limit": file, "members": [file | {"file", "horizon"}, ...], "p"?: int}."""
    path = _require(cfg.file, "--file")
    try:
        manifest = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: manifest is not valid JSON ({exc})") from None
    base = Path(path).parent
    try:
        limit = _manifest_member(manifest["limit"], base)
        members = [_manifest_member(m, base) for m in manifest["members"]]
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{path}: malformed manifest entry ({exc})") from None
    seq = topology.SetSequence(members)
    window = _require(cfg.window, "--window")
    obj = {"members": len(seq), "window": window,
           "convergence_index": topology.convergence_index(seq, limit, window)}
    obj["converged"] = obj["convergence_index"] is not None
    p = cfg.p if cfg.p is not None else manifest.get("p")
    status = EXIT_OK
    if p is not None and obj["converged"]:
        verdict = topology.closedness_check(seq, limit, p, window)
        obj["closedness"] = verdict.as_dict()
        if not verdict.passed:
            status = EXIT_DOMAIN
    if cfg.epsilon is not None:
        horizon = cfg.horizon or max(
            [topology.horizon_of(limit) or IntegerSet(limit).max]
            + [topology.horizon_of(m) or IntegerSet(m).max for m in members]
        )
        rep = topology.continuity_check(seq, limit, cfg.epsilon, horizon)
        obj["continuity"] = rep.as_dict()
        if not (rep.within_epsilon and rep.two_tail_bound_holds):
            status = EXIT_DOMAIN
    _emit(out, obj)
    return status


def cmd_bootstrap(cfg: RunConfig, out) -> int:
    p = _require(cfg.p, "--p")
    steps = cfg.steps if cfg.steps is not None else (cfg.count if cfg.count is not None else 1)
    budget = cfg.budget if cfg.budget is not None else 10**7
    res = constructions.bootstrap(p, steps, budget)
    obj = res.as_dict()
    if res.halt is not None and res.halt.reason == "harmonic-ceiling":
        log.info("step %d needs mu >= %d but H_%d <= %.6g", res.exhausted_at,
                 res.halt.target, budget, res.halt.ceiling.upper)
    if cfg.format == "text":
        for entry in obj["chain"]:
            out.write(f"A_{entry['step']} = {entry['set']}  mu = {entry['mu']}\n")
        if res.halt is not None:
            c = res.halt.ceiling
            out.write(f"halted at step {res.exhausted_at}: need mu(E) >= {res.halt.target}, "
                      f"H_{budget} <= {c.upper:.6f} ({c.method})\n")
    else:
        _emit(out, obj)
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "verify": cmd_verify,
    "mu": cmd_mu,
    "amplify": cmd_amplify,
    "partition": cmd_partition,
    "search": cmd_search,
    "converge": cmd_converge,
    "bootstrap": cmd_bootstrap,
}


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _budget(text: str) -> int:
    # accepts 10000000, 1e7, 10**7
    try:
        if "**" in text:
            b, e = text.split("**")
            return int(b) ** int(e)
        value = float(text) if any(c in text for c in ".eE") else int(text)
        if isinstance(value, float) and not (math.isfinite(value) and value.is_integer()):
            raise ValueError
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int)
    common.add_argument("--file", type=Path)
    common.add_argument("--out", type=Path)
    common.add_argument("--format", choices=FORMATS, default="json")
    common.add_argument("--cache-dir", type=Path,
                        help="greedy prefix cache (default $APFREE_CACHE or ./.apfree-cache)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=_positive, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="apfree", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    g = sub.add_parser("gen", parents=[common], help="greedy sequence S_p")
    g.add_argument("--count", type=_positive)
    g.add_argument("--limit", type=_positive)
    g.add_argument("--with-mu", action="store_true")

    sub.add_parser("verify", parents=[common], help="check a sequence file for p-term progressions")
    sub.add_parser("mu", parents=[common], help="reciprocal sum of a sequence file")

    a = sub.add_parser("amplify", parents=[common], help="join A with a scaled amplifier")
    a.add_argument("--amplifier", type=Path, help="sequence file for E (default: greedy prefix)")
    a.add_argument("--amplifier-source", choices=("greedy", "search"), default="greedy")
    a.add_argument("--budget", type=_budget)

    pt = sub.add_parser("partition", parents=[common], help="four-way interval partition of R")
    pt.add_argument("--m", type=_positive)
    pt.add_argument("--a1", type=Path, help="set below M to join with the heaviest part")
    pt.add_argument("--instances", type=int, default=0,
                    help="run this many seeded random instances instead of --file")

    s = sub.add_parser("search", parents=[common], help="exact mu-maximizing AP-free subset of [1, N]")
    s.add_argument("--n", type=_positive)
    s.add_argument("--method", choices=("exhaustive", "bnb", "branch_and_bound"), default="bnb")
    s.add_argument("--compare", action="store_true", help="also report the greedy set")

    c = sub.add_parser("converge", parents=[common], help="finite-horizon convergence checks")
    c.add_argument("--window", type=_positive)
    c.add_argument("--epsilon", type=_fraction)
    c.add_argument("--horizon", type=_positive)

    b = sub.add_parser("bootstrap", parents=[common], help="iterate amplification from {1}")
    b.add_argument("--steps", type=int)
    b.add_argument("--count", type=int, help="alias for --steps")
    b.add_argument("--budget", type=_budget)
    return parser


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    fields = RunConfig.__dataclass_fields__
    cfg = RunConfig(**{k: v for k, v in vars(ns).items() if k in fields and v is not None})
    if cfg.cache_dir is None and os.environ.get("APFREE_CACHE"):
        cfg.cache_dir = Path(os.environ["APFREE_CACHE"])
    logging.basicConfig(level=logging.INFO if getattr(ns, "verbose", False) else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    return cfg.validate()


def run(cfg: RunConfig, out=None) -> int:
    out = out if out is not None else sys.stdout
    try:
        return COMMANDS[cfg.subcommand](cfg, out)
    except UsageError as exc:
        print(f"apfree: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ApfreeError, ValueError) as exc:
        print(f"apfree: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"apfree: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"apfree: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
