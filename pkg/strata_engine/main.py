#!/usr/bin/env python3
"""Command-line front end: Betti numbers of Sigma_lambda and X_{lambda,mu}, certificates and checks."""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

from .engine.combinatorics.forests import (
    boundary,
    enumerate_all_forests,
    family_admissible,
    forest_from_json,
    forest_to_json,
    format_forest,
    lambda_mu_admissible,
)
from .engine.combinatorics.partitions import NumberPartition, coarsenings, number_partitions, refines_number
from .engine.errors import ConsistencyError, InvalidInputError
from .engine.homology.chain_complex import betti_report, x_family_mu, x_lambda_mu
from .engine.homology.morse import collapse_pipeline, family_from_name, generic_cone_matching
from .engine.homology.ppos import (
    COUNTEREXAMPLE_LAMBDA,
    COUNTEREXAMPLE_MU,
    compare_beta0,
    component_acyclicity,
    counterexample,
    p_poset_report,
    sweep_disconnected,
)
from .engine.homology.sigma import betti_sigma, generic_sweep, vanishing_sweep, verify_arnold
from .engine.logging_config import get_logger, logging_manager
from .engine.oracle.quotient_oracle import compare_with_forest_model, find_unreachable_pairs
from .engine.render.forest_renderer import ForestRenderer
from .engine.render.report_renderer import ReportRenderer
from .engine.schemas import SweepReport
from .engine.settings import RunConfig, load_settings
from .engine.storage.result_cache import ResultCache
from .version import __version__

logger = get_logger("cli")

Report = Union[Dict[str, Any], List[Dict[str, Any]]]
Handler = Callable[[argparse.Namespace, RunConfig], Tuple[str, Report, bool]]

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CONSISTENCY = 3


# ============================================================
# ARGUMENT HELPERS
# ============================================================

def _partition(text: str) -> NumberPartition:
    try:
        return NumberPartition.parse(text)
    except InvalidInputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _lambda(args: argparse.Namespace, required: bool = True) -> Optional[NumberPartition]:
    lam = getattr(args, "lam", None)
    if lam is None:
        if required:
            raise InvalidInputError("--lambda is required")
        return None
    n = getattr(args, "n", None)
    if n is not None and lam.n != n:
        raise InvalidInputError(f"({lam}) is not a partition of {n}")
    return lam


def _check_pair(lam: NumberPartition, mu: NumberPartition):
    if lam.n != mu.n:
        raise InvalidInputError(f"({lam}) and ({mu}) are partitions of different n")
    if not refines_number(lam, mu):
        raise InvalidInputError(f"({lam}) does not refine ({mu})")


def _family(args: argparse.Namespace, mu: NumberPartition):
    path = Path(args.family) if args.family not in ("arnold", "stanley", "hanlon") else None
    r = args.r if args.r is not None else (3 if args.family == "hanlon" else 2)
    return family_from_name(args.family, _lambda(args, required=False), mu, r=r, path=path)


def _request(args: argparse.Namespace, config: RunConfig, *names: str) -> Dict[str, Any]:
    request = {name: (str(getattr(args, name)) if getattr(args, name) is not None else None) for name in names}
    request["guards"] = config.guards.model_dump()
    request["strict"] = config.strict
    return request


# ============================================================
# COMMANDS
# ============================================================

def cmd_betti_x(args, config) -> Tuple[str, Report, bool]:
    mu = args.mu
    if args.family:
        name, family = _family(args, mu)
        c = x_family_mu(family, mu, max_forests=config.guards.max_forests)
        report = betti_report(c, mu, family=name, threads=config.threads)
    else:
        lam = _lambda(args)
        _check_pair(lam, mu)
        c = x_lambda_mu(lam, mu, max_forests=config.guards.max_forests)
        report = betti_report(c, mu, lam=lam, threads=config.threads)
    return "betti", report.to_dict(), True


def cmd_betti_sigma(args, config) -> Tuple[str, Report, bool]:
    lam = _lambda(args)
    report = betti_sigma(lam, n=args.n, source=args.source, max_bell=config.guards.max_bell,
                         max_forests=config.guards.max_forests, strict=config.strict,
                         threads=config.threads)
    return "sigma", report.to_dict(), True


def cmd_verify_arnold(args, config) -> Tuple[str, Report, bool]:
    report = verify_arnold(args.n_max, max_bell=config.guards.max_bell,
                           max_forests=config.guards.max_forests, strict=config.strict,
                           threads=config.threads)
    return "arnold", report.to_dict(), report.passed


def _pairs(args: argparse.Namespace) -> List[Tuple[NumberPartition, NumberPartition]]:
    """(lambda, mu) pairs named by --lambda/--mu, or every lambda |- mu |- n with --n alone."""
    lam = _lambda(args, required=False)
    mu = getattr(args, "mu", None)
    if lam is None:
        if mu is not None:
            raise InvalidInputError("--mu needs --lambda")
        if args.n is None:
            raise InvalidInputError("give --n, or --lambda")
        if args.n < 1:
            raise InvalidInputError(f"n must be positive, got {args.n}")
        lams = list(number_partitions(args.n))
    else:
        lams = [lam]
    if mu is not None:
        _check_pair(lam, mu)
        return [(lam, mu)]
    return [(each, m) for each in lams for m in sorted(coarsenings(each), reverse=True)]


def cmd_oracle_check(args, config) -> Tuple[str, Report, bool]:
    reports = [
        compare_with_forest_model(lam, mu, max_bell=config.guards.max_bell,
                                  max_forests=config.guards.max_forests).to_dict()
        for lam, mu in _pairs(args)
    ]
    return "oracle", reports, all(r["betti_equal"] for r in reports)


def cmd_collapse(args, config) -> Tuple[str, Report, bool]:
    mu = args.mu
    if args.generic:
        lam = _lambda(args)
        report = generic_cone_matching(lam, mu, max_forests=config.guards.max_forests)
        return "cone", report.to_dict(), True
    if args.k is None:
        raise InvalidInputError("collapse needs --k (or --generic)")
    name, family = _family(args, mu)
    report = collapse_pipeline(family, mu, args.k, name=name, with_order=args.order,
                               max_forests=config.guards.max_forests)
    return "collapse", report.to_dict(), True


def cmd_forests(args, config) -> Tuple[str, Report, bool]:
    mu = args.mu
    if args.family:
        name, family = _family(args, mu)
        admissible = family_admissible(family)
        header = {"family": name}
    else:
        lam = _lambda(args)
        _check_pair(lam, mu)
        if lam == mu:
            raise InvalidInputError("X_{lambda,lambda} is empty; there are no forests")
        admissible = lambda_mu_admissible(lam, mu)
        header = {"lambda": str(lam)}

    by_rank = enumerate_all_forests(admissible, mu, max_rank=args.rank,
                                    max_forests=config.guards.max_forests)
    ranks = [args.rank] if args.rank is not None else sorted(by_rank)
    listed = [f for r in ranks for f in by_rank.get(r, [])]

    if args.dot:
        dot = ForestRenderer().render_forests(listed, title=f"mu = ({mu})")
        Path(args.dot).write_text(dot.source, encoding="utf-8")
        logger.info(f"forests: wrote {len(listed)} forests to {args.dot}")

    report = dict(header)
    report.update({
        "mu": str(mu),
        "counts": {str(r): len(by_rank.get(r, [])) for r in ranks},
        "forests": [{"rank": f.rank, "text": format_forest(f), "tree": forest_to_json(f)} for f in listed],
    })
    return "forests", report, True


def cmd_boundary(args, config) -> Tuple[str, Report, bool]:
    try:
        data = json.loads(Path(args.forest_json).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise InvalidInputError(f"cannot read forest JSON {args.forest_json}: {exc}") from exc
    forest = forest_from_json(data)
    terms = boundary(forest) if forest.rank >= 1 else []
    report = {
        "forest": format_forest(forest),
        "rank": forest.rank,
        "terms": [{"coeff": coeff, "forest": format_forest(face)} for coeff, face in terms],
    }
    return "boundary", report, True


def cmd_p_poset(args, config) -> Tuple[str, Report, bool]:
    lam = _lambda(args)
    _check_pair(lam, args.mu)
    report = p_poset_report(lam, args.mu, list_elements=args.list_elements, list_components=args.components)
    if args.compare:
        compare_beta0(lam, args.mu, max_forests=config.guards.max_forests)
    return "poset", report.to_dict(), True


def cmd_counterexample(args, config) -> Tuple[str, Report, bool]:
    lam = args.lam or COUNTEREXAMPLE_LAMBDA
    mu = args.mu or COUNTEREXAMPLE_MU
    _check_pair(lam, mu)
    report = counterexample(lam, mu, max_forests=config.guards.max_forests)
    return "counterexample", report.to_dict(), True


def cmd_sweep_counterexamples(args, config) -> Tuple[str, Report, bool]:
    report = sweep_disconnected(args.n, max_forests=config.guards.max_forests)
    return "sweep", report.to_dict(), True


def cmd_acyclicity(args, config) -> Tuple[str, Report, bool]:
    items = []
    for lam, mu in _pairs(args):
        if lam == mu:
            continue
        for index, comp in enumerate(component_acyclicity(lam, mu, max_forests=config.guards.max_forests)):
            items.append({"lambda": str(lam), "mu": str(mu), "component": index, "vertices": comp["vertices"],
                          "betti": comp["betti"], "acyclic": comp["acyclic"]})
    report = SweepReport(command="acyclicity", n=args.n or args.lam.n, count=len(items), items=items)
    return "sweep", report.to_dict(), True


def cmd_unreachable(args, config) -> Tuple[str, Report, bool]:
    pairs = find_unreachable_pairs(args.n, max_bell=config.guards.max_bell)
    items = [{"lambda": str(lam), "mu": str(mu)} for lam, mu in pairs]
    report = SweepReport(command="unreachable", n=args.n, count=len(items), items=items)
    return "sweep", report.to_dict(), True


def cmd_vanishing(args, config) -> Tuple[str, Report, bool]:
    report = vanishing_sweep(args.n, max_bell=config.guards.max_bell,
                             max_forests=config.guards.max_forests, strict=config.strict,
                             threads=config.threads)
    return "sweep", report.to_dict(), report.count == 0


def cmd_generic(args, config) -> Tuple[str, Report, bool]:
    report = generic_sweep(args.n_max, max_forests=config.guards.max_forests,
                           max_bell=config.guards.max_bell, strict=config.strict,
                           threads=config.threads)
    return "sweep", report.to_dict(), report.count == 0


# name -> (handler, cache request fields or None for uncached)
COMMANDS: Dict[str, Tuple[Handler, Optional[Tuple[str, ...]]]] = {
    "betti-x": (cmd_betti_x, ("lam", "mu", "family", "r")),
    "betti-sigma": (cmd_betti_sigma, ("lam", "source")),
    "verify-arnold": (cmd_verify_arnold, ("n_max",)),
    "oracle-check": (cmd_oracle_check, ("n", "lam", "mu")),
    "collapse": (cmd_collapse, ("lam", "mu", "family", "r", "k", "generic", "order")),
    "forests": (cmd_forests, None),
    "boundary": (cmd_boundary, None),
    "p-poset": (cmd_p_poset, None),
    "counterexample": (cmd_counterexample, ("lam", "mu")),
    "sweep-counterexamples": (cmd_sweep_counterexamples, ("n",)),
    "acyclicity": (cmd_acyclicity, ("n", "lam", "mu")),
    "unreachable": (cmd_unreachable, ("n",)),
    "vanishing": (cmd_vanishing, ("n",)),
    "generic": (cmd_generic, ("n_max",)),
}


# ============================================================
# PARSER
# ============================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Emit the JSON report instead of a table.")
    common.add_argument("--threads", type=int, default=None, help="Worker threads for independent computations.")
    common.add_argument("--guard-bell", type=int, default=None, help="Largest Bell number the oracle may enumerate.")
    common.add_argument("--guard-forests", type=int, default=None, help="Largest forest count per complex.")
    common.add_argument("--no-cache", action="store_true", help="Neither read nor write the result cache.")
    common.add_argument("--cache-dir", default=None, help="Result cache directory.")
    common.add_argument("--strict", action="store_true", default=None,
                        help="Fail instead of assuming reachability above the oracle guard.")
    common.add_argument("--log-level", default=None, choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="Console log level for every component.")
    common.add_argument("--settings", default=None, help="Alternative settings YAML.")

    parser = argparse.ArgumentParser(prog="strata", description="Rational Betti numbers of Sigma_lambda and X_{lambda,mu}.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=help_text)

    def lam_mu(p: argparse.ArgumentParser, lam_required: bool = False, mu_required: bool = True):
        p.add_argument("--lambda", dest="lam", type=_partition, required=lam_required, help="e.g. 2,1,1,1")
        p.add_argument("--mu", type=_partition, required=mu_required, help="e.g. 5")
        p.add_argument("--n", type=int, default=None, help="Check that lambda is a partition of n.")

    def family(p: argparse.ArgumentParser, default: Optional[str] = None):
        p.add_argument("--family", default=default,
                       help="arnold, stanley, hanlon or a YAML family file.")
        p.add_argument("--r", type=int, default=None,
                       help="Minimum length for the hanlon family (default 3; stanley uses 2).")

    p = add("betti-x", "Reduced Betti numbers of X_{lambda,mu} or X_{Lambda,mu}.")
    lam_mu(p)
    family(p)

    p = add("betti-sigma", "Reduced Betti numbers of Sigma_lambda.")
    p.add_argument("--lambda", dest="lam", type=_partition, required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--source", choices=["forests", "oracle"], default="forests")

    p = add("verify-arnold", "Check the (k^m,1^(n-km)) pattern for every n <= N.")
    p.add_argument("--n-max", type=int, required=True)

    p = add("oracle-check", "Compare the forest model with the brute-force quotient.")
    lam_mu(p, mu_required=False)

    p = add("collapse", "Collapsibility certificate for X_{Lambda,mu}.")
    lam_mu(p)
    family(p, default="arnold")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--order", action="store_true", help="Include the elementary collapse order.")
    p.add_argument("--generic", action="store_true", help="Cone certificate for generic lambda.")

    p = add("forests", "List marked forests.")
    lam_mu(p)
    family(p)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--dot", default=None, help="Write a GraphViz picture to FILE.")

    p = add("boundary", "Boundary of a forest given as JSON.")
    p.add_argument("--forest-json", required=True)

    p = add("p-poset", "Bracketed partition poset P_{lambda,mu}.")
    lam_mu(p, lam_required=True)
    p.add_argument("--list-elements", "--elements", dest="list_elements", action="store_true",
                   help="List the elements.")
    p.add_argument("--components", action="store_true", help="List the connected components.")
    p.add_argument("--compare", action="store_true", help="Cross-check beta_0 against X_{lambda,mu}.")

    p = add("counterexample", "Disconnected P_{lambda,mu} and X_{lambda,mu} (default n = 23).")
    lam_mu(p, mu_required=False)

    p = add("sweep-counterexamples", "All lambda |- mu |- n with disconnected P_{lambda,mu}.")
    p.add_argument("--n", type=int, required=True)

    p = add("acyclicity", "Reduced Betti numbers of every connected component of X_{lambda,mu}.")
    lam_mu(p, mu_required=False)

    p = add("unreachable", "All lambda |- mu |- n where mu is not a join type.")
    p.add_argument("--n", type=int, required=True)

    p = add("vanishing", "Vanishing check of Sigma_lambda for every lambda |- n.")
    p.add_argument("--n", type=int, required=True)

    p = add("generic", "Cone certificates and Sigma check for generic lambda, n <= N.")
    p.add_argument("--n-max", type=int, required=True)

    return parser


# ============================================================
# ENTRY POINT
# ============================================================

def _config(args: argparse.Namespace) -> RunConfig:
    overrides = {
        "command": args.command,
        "threads": args.threads,
        "max_bell": args.guard_bell,
        "max_forests": args.guard_forests,
        "cache_dir": args.cache_dir,
        "no_cache": args.no_cache,
        "strict": args.strict,
        "output": "json" if args.json else None,
    }
    return load_settings(Path(args.settings) if args.settings else None, overrides)


def run(argv: Optional[List[str]] = None) -> int:
    """Parse ``argv``, dispatch, print the report; returns the exit code."""
    args = build_parser().parse_args(argv)
    if args.log_level:
        logging_manager.setup_all_loggers(console_level=args.log_level)

    try:
        config = _config(args)
        handler, cache_fields = COMMANDS[args.command]

        def compute() -> Dict[str, Any]:
            kind, report, ok = handler(args, config)
            return {"kind": kind, "ok": ok, "report": report}

        if cache_fields is not None:
            cache = ResultCache(Path(config.cache.dir), enabled=config.cache.enabled)
            entry = cache.get_or_compute(args.command, _request(args, config, *cache_fields), compute)
        else:
            entry = compute()
        ok = bool(entry["ok"])

        if config.output == "json":
            print(json.dumps(entry["report"], sort_keys=True, indent=2))
        else:
            print(ReportRenderer().render(entry["kind"], entry["report"]), end="")
    except InvalidInputError as exc:
        logger.debug(f"{args.command}: invalid input: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ConsistencyError as exc:
        logger.error(f"{args.command}: consistency failure: {exc}")
        print(f"consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY

    if not ok:
        print(f"{args.command}: check failed", file=sys.stderr)
        return EXIT_CONSISTENCY
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
