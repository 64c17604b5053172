"""Command-line reports: ``verify``, ``errors`` and ``resources``.

Every command prints one JSON document. Exit status is 0 when all checks
pass, 1 when a contract fails and 2 on usage errors. The default seed can be
overridden with the ``TOFFOLI_FT_SEED`` environment variable.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict
from importlib import resources as importlib_resources

from . import __version__
from .constructions import BUILDERS, VERIFIERS, build_named, verify_construction
from .error_analysis import enumerate_all, monte_carlo, x_error_survey
from .resources import aggregate_failure, compare, load_config, without_distillation
from .simulator import DEFAULT_SEED

SEED_ENV = "TOFFOLI_FT_SEED"
CONSTRUCTIONS = tuple(VERIFIERS)
DEFAULT_P_VALUES = (1e-4, 1e-3, 1e-2)
AGGREGATE_TOFFOLIS = 10**6


def report_schema() -> dict:
    text = importlib_resources.files("toffoli_ft").joinpath("schemas/report.schema.json")
    return json.loads(text.read_text())


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV, DEFAULT_SEED))


def make_report(command: str, seed: int, parameters: dict, results: dict,
                checks: dict[str, bool]) -> dict:
    return {
        "tool_version": __version__,
        "seed": seed,
        "command": command,
        "parameters": parameters,
        "results": results,
        "summary": {"passed": all(checks.values()), "checks": checks},
    }


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _valid_construction(name: str) -> str:
    if name == "all" or name in CONSTRUCTIONS:
        return name
    if name.startswith("multi_control:") and name.split(":", 1)[1].isdigit():
        return name
    raise argparse.ArgumentTypeError(
        f"unknown construction {name!r}; choose from all, {', '.join(CONSTRUCTIONS)}, multi_control:N"
    )


def _dumpable(name: str) -> str:
    if name in BUILDERS or (name.startswith("multi_control:") and name.split(":", 1)[1].isdigit()):
        return name
    raise argparse.ArgumentTypeError(f"no circuit named {name!r}")


def cmd_verify(args) -> dict:
    names = list(CONSTRUCTIONS) + ["multi_control:2"] if args.name == "all" else [args.name]
    sections = {}
    for name in names:
        r = verify_construction(name)
        sections[name] = {
            "passed": bool(r.passed),
            "verified": bool(r.verified),
            "t_count": r.t_count,
            "expected_t_count": r.expected_t_count,
            "qubits": r.circuit.qubit_count,
            "detail": r.detail,
        }
    return make_report("verify", args.seed, {"name": args.name}, sections,
                       {n: s["passed"] for n, s in sections.items()})


def cmd_errors(args) -> dict:
    report = enumerate_all(args.seed)
    by_weight = report.counts_by_weight()
    results = {
        "n_sites": report.n_sites,
        "counts_by_weight": {str(w): c for w, c in by_weight.items()},
        "accept_counts": list(report.accept_poly.counts),
        "faulty_counts": list(report.faulty_poly.counts),
        "accept_power_coefficients": report.accept_poly.power_coefficients(),
        "faulty_power_coefficients": report.faulty_poly.power_coefficients(),
        "patterns": [
            {"mask": m, "sites": [i for i in range(report.n_sites) if m >> i & 1],
             "class": c.value}
            for m, c in sorted(report.classes.items())
        ],
        "evaluations": [
            {"p": p, "acceptance": report.acceptance(p), "rejection": report.rejection(p),
             "posterior": report.posterior(p)}
            for p in args.p
        ],
        "x_error_survey": [
            {"site": c.pattern.sites[0], "class": c.cls.value,
             "reject_probability": round(c.reject_probability, 12)}
            for c in x_error_survey(args.seed)
        ],
    }
    if args.trials:
        results["monte_carlo"] = []
        for p in args.p:
            mc = monte_carlo(p, args.trials, args.seed, report=report)
            results["monte_carlo"].append({
                "p": p, "trials": mc.trials, "accepted": mc.accepted, "faulty": mc.faulty,
                "acceptance_rate": mc.acceptance_rate,
                "acceptance_interval": list(mc.acceptance_interval()),
                "posterior_rate": mc.posterior_rate,
                "posterior_interval": list(mc.posterior_interval()),
            })
    checks = {
        "weight1_all_detected": by_weight[1]["detected"] == report.n_sites,
        "weight2_faulty_count_28": by_weight[2]["accepted_faulty"] == 28,
        "noiseless_accepted_correct": by_weight[0]["accepted_correct"] == 1,
    }
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["mask", "weight", "sites", "class"])
            for row in results["patterns"]:
                w.writerow([row["mask"], len(row["sites"]),
                            " ".join(map(str, row["sites"])), row["class"]])
    params = {"p": list(args.p), "trials": args.trials}
    return make_report("errors", args.seed, params, results, checks)


def _exact(x):
    return repr(float(x))


def _scheme_payload(res) -> dict:
    d = asdict(res)
    d["trace"] = [{k: (v if k == "protocol" else _exact(v)) for k, v in t.items()}
                  for t in d["trace"]]
    d["aggregate_failure_1e6"] = aggregate_failure(res.toffoli_error, AGGREGATE_TOFFOLIS)
    return d


def cmd_resources(args) -> dict:
    cfg = load_config(args.config)
    p_raw = cfg.p_raw if args.p_raw is None else args.p_raw
    target = cfg.target if args.target is None else args.target
    schemes = cfg.schemes()
    if args.no_distillation:
        rep = without_distillation(schemes, p_raw)
        checks = {}
    else:
        rep = compare(schemes, p_raw, target, cfg.menu, max_rounds=cfg.max_rounds,
                      ordered=cfg.ordered, volume_per_raw_state=cfg.volume_per_raw_state)
        checks = {f"{n}_meets_target": r.toffoli_error <= target for n, r in rep.results.items()}
    results = {
        "config_source": cfg.source,
        "protocols": [asdict(p) for p in cfg.menu],
        "schemes": {n: _scheme_payload(r) for n, r in rep.results.items()},
        "savings": rep.savings_table(),
    }
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["scheme", "t_gates", "pipeline", "p_t", "raw_states_total", "toffoli_error"])
            for n, r in rep.results.items():
                w.writerow([n, r.t_gates, "+".join(r.pipeline) or "none", _exact(r.p_t),
                            _exact(r.raw_states_total), _exact(r.toffoli_error)])
    params = {"config": args.config, "p_raw": p_raw,
              "target": None if args.no_distillation else target,
              "no_distillation": args.no_distillation}
    return make_report("resources", args.seed, params, results, checks)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toffoli-ft", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--seed", type=int, default=None,
                        help=f"RNG seed (default ${SEED_ENV} or {DEFAULT_SEED})")
    parser.add_argument("--output", "-o", help="write the JSON report here instead of stdout")
    parser.add_argument("--dump-circuit", metavar="NAME", type=_dumpable,
                        help="print a circuit in the text dump format and exit")
    sub = parser.add_subparsers(dest="command")

    v = sub.add_parser("verify", help="check construction contracts")
    v.add_argument("name", type=_valid_construction)
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("errors", help="fault enumeration and posterior error")
    e.add_argument("--p", type=float, nargs="+", default=list(DEFAULT_P_VALUES))
    e.add_argument("--trials", type=int, default=0, help="Monte Carlo trials per p (0 = off)")
    e.add_argument("--csv", help="also write the pattern table as CSV")
    e.set_defaults(func=cmd_errors)

    r = sub.add_parser("resources", help="distillation cost comparison")
    r.add_argument("--config", help="JSON protocol/scheme configuration")
    r.add_argument("--p-raw", type=float)
    r.add_argument("--target", type=float)
    r.add_argument("--no-distillation", action="store_true")
    r.add_argument("--csv", help="also write the cost table as CSV")
    r.set_defaults(func=cmd_resources)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is None:
        args.seed = _default_seed()
    if args.dump_circuit:
        sys.stdout.write(build_named(args.dump_circuit).dumps())
        return 0
    if args.command is None:
        parser.error("a subcommand is required")
    report = args.func(args)
    text = dumps_report(report)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report["summary"]["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
