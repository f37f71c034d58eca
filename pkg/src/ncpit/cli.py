"""Command-line interface.

Every subcommand prints one report (JSON by default, ``--format tsv`` for
flat key/value lines) and exits 0 whatever the verdict. Exit status 2 is a
usage error, 3 an input validation error, 4 a resource guard.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .algebra import AlgebraError, Field, NoNontrivialSolution
from .circuit import (ArithCircuit, DegreeOverflow, ParseError, ValidationError, expand_bruteforce,
                      formal_degree, load_circuit)
from .corpus import corpus
from .isolation import (BudgetExhausted, EnumerationTooLarge, Unique, defeating_family_search,
                        estimate_isolation_probability, estimate_ks_isolation_probability,
                        find_weight_collection, load_family, random_form_family, random_vector_set,
                        sample_weights, unique_min, vv_experiment)
from .ncpoly import ArityMismatch, TermLimitExceeded
from .pit import (ResourceLimit, construct_fooling_polynomial, extract_coefficient, ks_commutative_pit,
                  nc_pit, pit_statistics)
from .seeding import trial_rng

EXIT_OK, EXIT_VERDICT, EXIT_USAGE, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3, 4

COMMANDS = ("expand", "pit-nc", "pit-comm", "coeff", "iso-estimate", "iso-cover", "iso-defeat",
            "ks-iso", "vv", "fool", "stats", "bench")


class InputError(Exception):
    pass


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _circuit(path, inputs: dict) -> ArithCircuit:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"--circuit: no such file {path}")
    inputs[str(path)] = _digest(p)
    try:
        c = load_circuit(p)
    except (ParseError, ValidationError, AlgebraError) as e:
        raise InputError(f"--circuit {path}: {e}") from None
    if not isinstance(c, ArithCircuit):
        raise InputError(f"--circuit: {path} is a boolean circuit, expected ncircuit")
    return c


def _family(path, n, inputs: dict):
    p = Path(path)
    if not p.is_file():
        raise InputError(f"--family: no such file {path}")
    inputs[str(path)] = _digest(p)
    try:
        return load_family(p, n)
    except (ValueError, OSError) as e:
        raise InputError(f"--family {path}: {e}") from None


def _monomial(text: str, n: int) -> tuple:
    text = text.strip()
    if text in ("", "-"):
        return ()
    try:
        word = tuple(int(t) for t in text.split())
    except ValueError:
        raise InputError(f"--monomial: expected space-separated variable indices, got {text!r}") from None
    bad = [i for i in word if not 1 <= i <= n]
    if bad:
        raise InputError(f"--monomial: variable index {bad[0]} outside [1, {n}]")
    return word


def _enumeration_guard(n: int) -> None:
    if n < 1:
        raise InputError(f"--n: must be at least 1, got {n}")
    if n > 4:
        raise EnumerationTooLarge(f"--n {n}: exhaustive search is limited to n <= 4")


def _set_str(s) -> str:
    return " ".join(map(str, sorted(s))) or "-"


# -- subcommands: each returns (results, counters) ----------------------------------------

def cmd_expand(args, inputs):
    c = _circuit(args.circuit, inputs)
    f = expand_bruteforce(c, args.max_terms)
    return {"num_terms": len(f), "is_zero": f.is_zero(), "listing": f.to_listing()}, {"gates": len(c.gates)}


def _pit(fn, args, inputs):
    c = _circuit(args.circuit, inputs)
    v = fn(c, args.degree, args.trials, args.seed, args.jobs)
    d = v.degree_bound
    counters = {"gates": len(c.gates), "formal_degree": formal_degree(c)}
    if fn is nc_pit:
        counters["automaton_states"] = 2 * c.num_vars * d ** 3 + 2
    return v.to_dict(), counters


def cmd_pit_nc(args, inputs):
    return _pit(nc_pit, args, inputs)


def cmd_pit_comm(args, inputs):
    return _pit(ks_commutative_pit, args, inputs)


def cmd_coeff(args, inputs):
    c = _circuit(args.circuit, inputs)
    m = _monomial(args.monomial, c.num_vars)
    return {"monomial": list(m), "coefficient": str(extract_coefficient(c, m).value)}, {"gates": len(c.gates)}


def cmd_iso_estimate(args, inputs):
    fam = _family(args.family, args.n, inputs)
    rng_max = args.range or 2 * fam.n
    est = estimate_isolation_probability(fam, rng_max, args.samples, args.seed, args.jobs)
    res = {"n": fam.n, "range": rng_max, **est.to_dict()}
    return res, {"family_size": len(fam)}


def cmd_iso_cover(args, inputs):
    fams = [_family(p, args.n, inputs) for p in args.family]
    if len({f.n for f in fams}) > 1:
        raise InputError("--family: all families must share the universe size (use --n)")
    rng_max = args.range or 2 * fams[0].n
    coll = find_weight_collection(fams, rng_max, args.budget, args.seed)
    covered = []
    for fam in fams:
        hit = next(k for k, w in enumerate(coll) if isinstance(unique_min(fam, w), Unique))
        covered.append(hit)
    res = {"range": rng_max, "collection": [w.to_dict() for w in coll],
           "collection_size": len(coll), "covering_index": covered}
    return res, {"families": len(fams)}


def cmd_iso_defeat(args, inputs):
    n = args.n
    if n is None:
        raise InputError("--n is required for iso-defeat")
    _enumeration_guard(n)
    rng_max = args.range or 2 * n
    coll = [sample_weights(n, rng_max, trial_rng(args.seed, k, "defeat")) for k in range(args.samples)]
    fam = defeating_family_search(coll, n)
    res = {"n": n, "range": rng_max, "collection": [w.to_dict() for w in coll]}
    if fam is None:
        res["status"] = "NotFound"
        res["family"] = None
    else:
        res["status"] = "Found"
        res["family"] = [_set_str(s) for s in fam.members]
        res["tie_weights"] = [unique_min(fam, w).weight for w in coll]
    return res, {"collection_size": len(coll)}


def cmd_ks_iso(args, inputs):
    n = args.n or 4
    forms = random_form_family(n, args.K, args.forms, trial_rng(args.seed, 0, "forms"))
    est = estimate_ks_isolation_probability(forms, args.samples, args.seed, args.jobs)
    return {"n": n, "K": args.K, "forms": [list(f) for f in forms.forms], **est.to_dict()}, {}


def cmd_vv(args, inputs):
    t = args.n or 5
    if args.family:
        fam = _family(args.family, t, inputs)
        S = [sum(1 << (i - 1) for i in s) for s in fam.members]
    else:
        S = random_vector_set(t, args.size, trial_rng(args.seed, 0, "vvset"))
    est = vv_experiment(S, t, args.trials, args.seed, args.jobs)
    vecs = ["".join(str((v >> i) & 1) for i in range(t)) for v in sorted(S)]
    return {"t": t, "set": vecs, **est.to_dict()}, {"set_size": len(S)}


def cmd_fool(args, inputs):
    n = args.n
    if n is None:
        raise InputError("--n is required for fool")
    _enumeration_guard(n)
    try:
        fld = Field.parse(args.field)
    except AlgebraError as e:
        raise InputError(f"--field: {e}") from None
    coll = [sample_weights((n, n), 2 * n * n, trial_rng(args.seed, k, "fool")) for k in range(args.samples)]
    try:
        r = construct_fooling_polynomial(n, coll, fld)
    except NoNontrivialSolution as e:
        return {"status": "NoNontrivialSolution", "detail": str(e),
                "weight_functions_used": [w.to_dict() for w in coll]}, {"unknowns": n ** n}
    return {"status": "Found", **r.to_dict()}, {"unknowns": n ** n}


def cmd_stats(args, inputs):
    c = _circuit(args.circuit, inputs)
    est = pit_statistics(c, args.trials, args.seed, args.degree, args.jobs)
    return est.to_dict(), {"gates": len(c.gates)}


def cmd_bench(args, inputs):
    cs = corpus(args.samples, args.seed, n_max=args.n or 3, d_max=args.degree or 4)
    rows = []
    total = 0.0
    for k, c in enumerate(cs):
        t0 = time.perf_counter()
        v = nc_pit(c, None, args.trials, args.seed)
        dt = time.perf_counter() - t0
        total += dt
        rows.append({"index": k, "gates": len(c.gates), "n": c.num_vars, "degree": formal_degree(c),
                     "field": str(c.field), "verdict": v.verdict, "trials_run": v.trials_run})
    # timings are kept out of results so that results stay seed-deterministic
    return {"circuits": rows}, {"nc_pit_seconds": round(total, 6)}


HANDLERS = {
    "expand": cmd_expand, "pit-nc": cmd_pit_nc, "pit-comm": cmd_pit_comm, "coeff": cmd_coeff,
    "iso-estimate": cmd_iso_estimate, "iso-cover": cmd_iso_cover, "iso-defeat": cmd_iso_defeat,
    "ks-iso": cmd_ks_iso, "vv": cmd_vv, "fool": cmd_fool, "stats": cmd_stats, "bench": cmd_bench,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ncpit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"ncpit {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(sp, trials=None, samples=None):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--format", choices=("json", "tsv"), default="json")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes; results do not depend on it")
        sp.add_argument("--n", type=int)
        sp.add_argument("--range", type=int, help="weight range (default 2n)")
        sp.add_argument("--degree", type=int, help="degree bound (default: formal degree)")
        if trials is not None:
            sp.add_argument("--trials", type=int, default=trials)
        if samples is not None:
            sp.add_argument("--samples", type=int, default=samples)
        return sp

    sp = common(sub.add_parser("expand", help="expand a circuit into its polynomial listing"))
    sp.add_argument("--circuit", required=True)
    sp.add_argument("--max-terms", type=int, default=10**6)
    for name, text in (("pit-nc", "noncommutative identity test"), ("pit-comm", "commutative identity test")):
        sp = common(sub.add_parser(name, help=text), trials=20)
        sp.add_argument("--circuit", required=True)
        sp.add_argument("--fail-on-nonzero", action="store_true", help="exit 1 on a NonZero verdict")
    sp = common(sub.add_parser("coeff", help="coefficient of one monomial"))
    sp.add_argument("--circuit", required=True)
    sp.add_argument("--monomial", required=True, help='variable indices, e.g. "1 2"; "-" for the empty word')
    sp = common(sub.add_parser("iso-estimate", help="estimate the unique-minimum probability"), samples=1000)
    sp.add_argument("--family", required=True)
    sp = common(sub.add_parser("iso-cover", help="greedy weight collection isolating every family"))
    sp.add_argument("--family", required=True, action="append")
    sp.add_argument("--budget", type=int, default=1000)
    common(sub.add_parser("iso-defeat", help="family tied under a sampled collection (n <= 4)"), samples=4)
    sp = common(sub.add_parser("ks-iso", help="linear-form isolation estimate"), samples=1000)
    sp.add_argument("--K", type=int, default=3)
    sp.add_argument("--forms", type=int, default=20)
    sp = common(sub.add_parser("vv", help="Valiant-Vazirani experiment"), trials=1000)
    sp.add_argument("--family", help="vectors as subsets of [t], one per line")
    sp.add_argument("--size", type=int, default=8, help="size of a random S when --family is absent")
    sp = common(sub.add_parser("fool", help="fooling polynomial for sampled weight functions"), samples=1)
    sp.add_argument("--field", default="q")
    sp = common(sub.add_parser("stats", help="single-trial detection rate of pit-nc"), trials=1000)
    sp.add_argument("--circuit", required=True)
    common(sub.add_parser("bench", help="time pit-nc on a seeded corpus"), trials=20, samples=20)
    return p


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix.rstrip("."), obj


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, default=_json_default)
    if report["command"] == "expand" and "results" in report:
        return "\n".join(report["results"]["listing"])
    return "\n".join(f"{k}\t{'' if v is None else v}" for k, v in _flatten(report))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    inputs: dict = {}
    started = time.perf_counter()
    for flag in ("trials", "samples", "jobs"):
        if getattr(args, flag, 1) is not None and getattr(args, flag, 1) < 1:
            parser.error(f"--{flag} must be at least 1")
    try:
        results, counters = HANDLERS[args.command](args, inputs)
    except (InputError, ParseError, ValidationError, AlgebraError, ArityMismatch, FileNotFoundError) as e:
        print(f"ncpit {args.command}: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (ResourceLimit, TermLimitExceeded, DegreeOverflow, EnumerationTooLarge, BudgetExhausted) as e:
        print(f"ncpit {args.command}: resource limit: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as e:
        print(f"ncpit {args.command}: {e}", file=sys.stderr)
        return EXIT_INPUT
    report = {
        "command": args.command,
        "inputs": inputs,
        "seed": args.seed,
        "results": results,
        "wall_time": round(time.perf_counter() - started, 6),
        "counters": counters,
    }
    print(render(report, args.format))
    if getattr(args, "fail_on_nonzero", False) and results.get("verdict") == "NonZero":
        return EXIT_VERDICT
    return EXIT_OK


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
