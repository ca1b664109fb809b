"""Command-line entry point: ``matchforge run|check|verify|gen``.

Exit codes: 0 ok, 1 contract violation, 2 instance error, 3 guard
exceeded, 4 witness found, 5 incompatible axioms.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
from typing import Optional

from matchforge import axioms as ax
from matchforge.choice import CHOICE_CHECKS, RULES, ChoiceTable, build_profile, build_rule
from matchforge.engine import (check_individual_rationality, check_strategy_proofness, da_rule,
                               immediate_acceptance, is_stable, run_da)
from matchforge.errors import ContractViolation, DomainError, GuardError, InstanceError, SpecError
from matchforge.generators import GenConfig, generate, shape_fixture
from matchforge.guards import MAX_PROFILES
from matchforge.io import read_instance, save_instance
from matchforge.model import check_matching, members, to_mask
from matchforge.reports import Report
from matchforge.verify import two_contract_regression, verify_characterization, verify_lemma_chain

EXIT_OK, EXIT_CONTRACT, EXIT_INSTANCE, EXIT_GUARD, EXIT_WITNESS, EXIT_INCOMPATIBLE = range(6)

RULE_AXIOMS = ("strategy-proofness", "individual-rationality", "stability")
CHECK_TITLES = {
    "path-independence": "path independence",
    "size-monotonicity": "size monotonicity",
    "substitutability": "substitutability",
    "irc": "irrelevance of rejected contracts",
}


def _title(name: str) -> str:
    return CHECK_TITLES.get(name) or ax.TITLES.get(name) or name


def _shape(text: str) -> tuple[int, int]:
    try:
        a, i = text.lower().split("x")
        return int(a), int(i)
    except ValueError:
        raise argparse.ArgumentTypeError(f"shape must look like 2x2, got {text!r}") from None


def _ids(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    return [int(t) for t in text.replace(",", " ").split()]


def _problem(args):
    if getattr(args, "instance", None):
        return read_instance(args.instance)
    if getattr(args, "shape", None):
        agents, insts = args.shape
        return shape_fixture(agents, insts, args.seed, getattr(args, "rule", "responsive") or "responsive")
    raise InstanceError("instance", "give --instance or --shape")


def _institution(problem, name):
    if name is not None:
        problem.institution_mask(name)
        return [name]
    return list(problem.institutions)


# -- subcommands ------------------------------------------------------------------

def cmd_run(args) -> tuple[int, dict, list]:
    problem = _problem(args)
    trace = run_da(problem, build_profile(problem, args.rule))
    out = {"matching": members(trace.matching), "steps": len(trace.steps)}
    if args.trace:
        out["trace"] = trace.to_json()["steps"]
    lines = [f"matching: {[str(problem.contracts[x]) for x in members(trace.matching)]}  ids={members(trace.matching)}",
             f"steps: {len(trace.steps)}"]
    if args.trace:
        for step in out["trace"]:
            lines.append(f"step {step['step']}: proposals={step['proposals']}")
            for i, rec in step["perInstitution"].items():
                lines.append(f"  {i}: considered={rec['considered']} accepted={rec['accepted']} rejected={rec['rejected']}")
    return EXIT_OK, out, lines


def cmd_check(args) -> tuple[int, dict, list]:
    reports = []
    if args.target == "choice":
        if args.table:
            with open(args.table) as fh:
                rules = [ChoiceTable.from_json(json.load(fh))]
            names = [None]
        else:
            problem = _problem(args)
            names = _institution(problem, args.institution)
            rules = [build_rule(problem, i, args.rule) for i in names]
        for name, rule in zip(names, rules):
            if args.axiom in CHOICE_CHECKS:
                report = CHOICE_CHECKS[args.axiom](rule, guard=args.max_ground)
            else:
                if name is None:
                    raise SpecError(f"axiom {args.axiom!r} needs institution data; use --instance")
                phi = ax.builtin_axiom(args.axiom, ax.InstitutionData.of(problem, name))
                report = ax.satisfies_punctual(rule.to_rule(name) if isinstance(rule, ChoiceTable) else rule, phi)
            if name is not None:
                report.details["institution"] = name
            reports.append(report)
    elif args.target == "rule":
        problem = _problem(args)
        if args.rule == "immediate-acceptance":
            rule = immediate_acceptance()
            choices = None
        else:
            choices = build_profile(problem, args.rule)
            rule = da_rule(choices)
        if args.axiom == "strategy-proofness":
            reports.append(check_strategy_proofness(rule, problem, limit=args.max_profiles))
        elif args.axiom == "individual-rationality":
            reports.append(check_individual_rationality(rule, problem, limit=args.max_profiles))
        else:
            X = rule(problem)
            if choices is None:
                raise SpecError("stability needs a choice-rule profile; pick a --rule other than immediate-acceptance")
            reports.append(is_stable(problem, X, choices))
    else:
        problem = _problem(args)
        X = to_mask(_ids(args.matching))
        check_matching(problem, X)
        if args.axiom == "stability":
            reports.append(is_stable(problem, X, build_profile(problem, args.rule)))
        else:
            if args.axiom not in ax.MATCHING_AXIOMS:
                raise SpecError(f"unknown matching axiom {args.axiom!r}")
            for i in ([None] if args.axiom == "individual-rationality" else _institution(problem, args.institution)):
                checker = ax.direct_axiom(args.axiom, i)
                hit = checker.check(problem, X)
                reports.append(Report(args.axiom, hit is None, hit))
    ok = all(reports)
    return (EXIT_OK if ok else EXIT_WITNESS), {"reports": [r.to_dict() for r in reports]}, \
        [r.line(_title(r.check if r.check in ax.TITLES else args.axiom)) for r in reports]


def cmd_verify(args) -> tuple[int, dict, list]:
    if args.what in ("two-contract", "appendix-h"):
        report = two_contract_regression()
        lines = [report.line("two-contract regression")]
        lines += [f"  {'PASS' if v else 'FAIL'}  {k}" for k, v in report.details["checks"].items()]
        return (EXIT_OK if report else EXIT_WITNESS), {"reports": [report.to_dict()]}, lines
    problem = _problem(args)
    if args.what == "characterization":
        reports = []
        for i in _institution(problem, args.institution):
            data = ax.InstitutionData.of(problem, i)
            axioms = ax.builtin_axioms(args.axioms.split(","), data)
            report = verify_characterization(axioms, build_rule(problem, i, args.target), args.max_ground)
            report.details["institution"] = i
            reports.append(report)
        if all(reports):
            code = EXIT_OK
        elif any(r.status == "incompatible" for r in reports):
            code = EXIT_INCOMPATIBLE
        else:
            code = EXIT_WITNESS
        return code, {"reports": [r.to_dict() for r in reports]}, \
            [r.line(f"characterization at {r.details['institution']} by {'; '.join(map(_title, r.details['axioms']))}")
             for r in reports]
    report = verify_lemma_chain(problem, args.rule, limit=args.max_profiles)
    return (EXIT_OK if report else EXIT_WITNESS), {"reports": [report.to_dict()]}, [report.line("lemma chain")]


def cmd_gen(args) -> tuple[int, dict, list]:
    config = GenConfig(agents=args.agents, institutions=args.institutions, types=args.types,
                       contracts_per_pair=args.contracts_per_pair, max_capacity=args.max_capacity)
    data = save_instance(generate(config, args.seed))
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(data)
    return EXIT_OK, {"instance": json.loads(data)}, [data.decode().rstrip("\n")]


# -- plumbing -------------------------------------------------------------------------

SHARED_DEFAULTS = {"format": "text", "seed": 0, "max_ground": None, "max_profiles": MAX_PROFILES}


def _positive(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    # shared options work before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for generated instances")
    common.add_argument("--max-ground", type=_positive, default=argparse.SUPPRESS,
                        help="largest institution ground set for exhaustive checks (default: $MATCHFORGE_MAX_GROUND or 12)")
    common.add_argument("--max-profiles", type=_positive, default=argparse.SUPPRESS)
    parser = argparse.ArgumentParser(prog="matchforge", parents=[common],
                                     description="Deferred acceptance and choice-axiom verification.")
    sub = parser.add_subparsers(dest="command", required=True)
    _add = sub.add_parser
    sub.add_parser = lambda *a, **k: _add(*a, parents=[common], **k)

    def source(p, rules=RULES, default="responsive"):
        p.add_argument("--instance")
        p.add_argument("--shape", type=_shape, help="generate an AxI market, e.g. 2x2")
        p.add_argument("--rule", choices=rules, default=default)

    p = sub.add_parser("run", help="run deferred acceptance")
    source(p)
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check", help="check choice rules, matching rules or single matchings")
    p.add_argument("target", choices=("choice", "rule", "matching"))
    p.add_argument("--axiom", required=True)
    source(p, RULES + ("immediate-acceptance",))
    p.add_argument("--table", help="tabulated choice rule (JSON)")
    p.add_argument("--institution")
    p.add_argument("--matching", default="", help="contract ids, comma separated")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("verify", help="run an exhaustive verifier")
    # "appendix-h" is kept as an alias of "two-contract" for older scripts
    p.add_argument("what", choices=("characterization", "lemma-chain", "two-contract", "appendix-h"),
                   metavar="{characterization,lemma-chain,two-contract}")
    source(p)
    p.add_argument("--axioms", default="responsive", help="axiom or axiom-set names, comma separated")
    p.add_argument("--target", choices=RULES, default="responsive")
    p.add_argument("--institution")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--agents", type=int, default=3)
    p.add_argument("--institutions", type=int, default=2)
    p.add_argument("--types", type=int, default=2)
    p.add_argument("--contracts-per-pair", type=int, default=1)
    p.add_argument("--max-capacity", type=int, default=None)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_gen)
    return parser


def _validate_names(args):
    if args.command == "check":
        known = {
            "choice": set(CHOICE_CHECKS) | set(ax.TITLES) - {"individual-rationality", "stability", "strategy-proofness"},
            "rule": set(RULE_AXIOMS),
            "matching": set(ax.MATCHING_AXIOMS) | {"stability"},
        }[args.target]
        if args.axiom not in known:
            raise SpecError(f"unknown axiom {args.axiom!r} for check {args.target}; choose from {', '.join(sorted(known))}")
    if args.command == "verify" and args.what == "characterization":
        for name in args.axioms.split(","):
            if name not in ax.AXIOM_SETS and name not in ax.TITLES:
                raise SpecError(f"unknown axiom or axiom set {name!r}")


@contextlib.contextmanager
def _guard_override(max_ground):
    """Apply --max-ground for one invocation, then restore the environment."""
    if max_ground is None:
        yield
        return
    old = os.environ.get("MATCHFORGE_MAX_GROUND")
    os.environ["MATCHFORGE_MAX_GROUND"] = str(max_ground)
    try:
        yield
    finally:
        if old is None:
            del os.environ["MATCHFORGE_MAX_GROUND"]
        else:
            os.environ["MATCHFORGE_MAX_GROUND"] = old


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for key, value in SHARED_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    payload = {"command": args.command}
    try:
        _validate_names(args)
        with _guard_override(args.max_ground):
            code, body, lines = args.func(args)
        payload.update(body)
    except ContractViolation as err:
        code, lines = EXIT_CONTRACT, [f"contract violation: {err}"]
        payload["error"] = {"kind": "contract-violation", "message": str(err), "step": err.step}
    except (InstanceError, SpecError, DomainError) as err:
        code, lines = EXIT_INSTANCE, [f"instance error: {err}"]
        payload["error"] = {"kind": "instance", "message": str(err), "field": getattr(err, "field", None)}
    except GuardError as err:
        code, lines = EXIT_GUARD, [f"guard exceeded: {err}"]
        payload["error"] = {"kind": "guard", "message": str(err)}
    except (OSError, ValueError) as err:
        code, lines = EXIT_INSTANCE, [f"instance error: {err}"]
        payload["error"] = {"kind": "instance", "message": str(err), "field": None}
    payload["exitCode"] = code
    if args.format == "json":
        if args.command == "gen" and code == EXIT_OK:
            # the instance itself is the json output
            if not args.output:
                print(lines[0])
        else:
            print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        if not (args.command == "gen" and args.output):
            print("\n".join(lines))
    return code


if __name__ == "__main__":
    sys.exit(main())
