"""Command-line front end.

Exit codes: 0 success (certified solve, certificate passed, ordering ok),
1 certificate not passed, 2 invalid input, 3 solver failure,
4 bounds out of order.

Matrices travel as {"rows", "cols", "data"} with ``data`` a row-major list
of [re, im] pairs. Floats use Python's shortest round-trip repr, so a value
read back is bit-identical to the one written.
"""

import argparse
import json
import math
import sys

import numpy as np

from .certify import check_global_optimality, check_qg_optimality
from .ensembles import (
    Povm,
    example_closed_forms,
    example_ensemble,
    example_global_povm,
    example_local_povm,
    validate_ensemble,
)
from .errors import NumericalFailure, ValidationError
from .solver import SolverConfig, bounds_report, solve_pg, solve_ppt, solve_qg

EXIT_OK = 0
EXIT_NOT_PASSED = 1
EXIT_INVALID = 2
EXIT_SOLVER = 3
EXIT_INCONSISTENT = 4

SOLVERS = {"pg": solve_pg, "qg": solve_qg, "ppt": solve_ppt}


class InputError(ValidationError):
    """Malformed JSON or a document that does not match the interchange format."""


# -- JSON <-> objects ---------------------------------------------------------


def matrix_to_json(m):
    m = np.asarray(getattr(m, "matrix", m))
    rows, cols = m.shape
    data = [[float(z.real), float(z.imag)] for z in m.ravel()]
    return {"rows": int(rows), "cols": int(cols), "data": data}


def matrix_from_json(obj):
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad matrix object: {exc}") from None
    if rows < 0 or cols < 0 or not isinstance(data, list) or len(data) != rows * cols:
        raise InputError(f"matrix data has {len(data) if isinstance(data, list) else '?'} entries, expected {rows}x{cols}")
    out = np.empty(rows * cols, dtype=np.complex128)
    for k, pair in enumerate(data):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise InputError(f"matrix entry {k} is not an [re, im] pair")
        re, im = pair
        if isinstance(re, bool) or isinstance(im, bool) or not isinstance(re, (int, float)) or not isinstance(im, (int, float)):
            raise InputError(f"matrix entry {k} is not numeric")
        if not (math.isfinite(re) and math.isfinite(im)):
            raise InputError(f"matrix entry {k} is not finite")
        out[k] = complex(re, im)
    return out.reshape(rows, cols)


def ensemble_to_json(e):
    return {
        "d1": e.d1,
        "d2": e.d2,
        "separable": bool(e.separable_asserted),
        "states": [{"prior": p, "rho": matrix_to_json(s)} for p, s in e.items],
    }


def ensemble_from_json(obj):
    try:
        d1, d2 = obj["d1"], obj["d2"]
        states = obj["states"]
        separable = obj.get("separable", False)
    except (KeyError, TypeError, AttributeError) as exc:
        raise InputError(f"bad ensemble object: {exc}") from None
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in (d1, d2)):
        raise InputError("d1 and d2 must be integers")
    if not isinstance(separable, bool):
        raise InputError("separable must be a boolean")
    if not isinstance(states, list):
        raise InputError("states must be a list")
    priors, rhos = [], []
    for k, st in enumerate(states):
        if not isinstance(st, dict) or "prior" not in st or "rho" not in st:
            raise InputError(f"state {k} needs 'prior' and 'rho'")
        p = st["prior"]
        if isinstance(p, bool) or not isinstance(p, (int, float)):
            raise InputError(f"state {k} prior is not a number")
        priors.append(float(p))
        rhos.append(matrix_from_json(st["rho"]))
    return validate_ensemble(priors, rhos, d1, d2, separable)


def povm_to_json(m):
    return [matrix_to_json(el) for el in m.elements]


def povm_from_json(obj, d1, d2):
    # accept a bare list or anything carrying a "povm" list (e.g. a result file)
    if isinstance(obj, dict) and "povm" in obj:
        obj = obj["povm"]
    if not isinstance(obj, list):
        raise InputError("POVM must be a list of matrices")
    return Povm(d1, d2, tuple(matrix_from_json(x) for x in obj))


def result_to_json(res, problem):
    return {
        "problem": problem,
        "value": res.value,
        "certified_gap": res.certified_gap,
        "povm": povm_to_json(res.povm),
        "dual_K": matrix_to_json(res.dual_K),
    }


def result_from_json(obj):
    """Parse a ResultJson document into plain values (arrays for matrices)."""
    try:
        problem = obj["problem"]
        value = obj["value"]
        gap = obj["certified_gap"]
        povm = obj["povm"]
        dual = obj["dual_K"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad result object: {exc}") from None
    if problem not in SOLVERS:
        raise InputError(f"unknown problem {problem!r}")
    if not isinstance(povm, list):
        raise InputError("povm must be a list")
    return {
        "problem": problem,
        "value": float(value),
        "certified_gap": float(gap),
        "povm": [matrix_from_json(x) for x in povm],
        "dual_K": matrix_from_json(dual),
    }


def _reject_constant(name):
    raise InputError(f"non-finite number {name} in JSON")


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh, parse_constant=_reject_constant)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: not valid JSON ({exc})") from None


def dump_json(obj, path):
    text = json.dumps(obj, allow_nan=False)
    if path in (None, "-"):
        sys.stdout.write(text + "\n")
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


# -- commands -----------------------------------------------------------------


def _config(tol):
    if not (math.isfinite(tol) and tol > 0):
        raise InputError("--tol must be a positive number")
    return SolverConfig(target_gap=tol)


def cmd_solve(args):
    cfg = _config(args.tol)
    e = ensemble_from_json(load_json(args.input))
    res = SOLVERS[args.problem](e, cfg)
    dump_json(result_to_json(res, args.problem), args.output)
    return EXIT_OK


def cmd_certify(args):
    if not (math.isfinite(args.tol) and args.tol >= 0):
        raise InputError("--tol must be a non-negative number")
    e = ensemble_from_json(load_json(args.ensemble))
    m = povm_from_json(load_json(args.povm), e.d1, e.d2)
    check = check_global_optimality if args.problem == "pg" else check_qg_optimality
    report = check(e, m, args.tol)
    dump_json(report.to_dict(), None)
    return EXIT_OK if report.passed else EXIT_NOT_PASSED


def _sigma(spec, d):
    if spec == "mixed":
        return None
    return matrix_from_json(load_json(spec))


def cmd_example(args):
    d = args.d
    if d < 2:
        raise InputError("--d must be at least 2")
    needs_lambda = args.emit in ("ensemble", "closed-forms")
    if needs_lambda and args.lam is None:
        raise InputError(f"--lambda is required for --emit {args.emit}")
    if args.emit == "ensemble":
        out = ensemble_to_json(example_ensemble(d, args.lam, _sigma(args.sigma, d)))
    elif args.emit == "global-povm":
        out = povm_to_json(example_global_povm(d))
    elif args.emit == "local-povm":
        out = povm_to_json(example_local_povm(d))
    else:
        if not (0.0 < args.lam <= 1.0):
            raise InputError("--lambda must lie in (0, 1]")
        cf = example_closed_forms(d, args.lam)
        out = {"p_G": cf.p_G, "q_G": cf.q_G, "gap": cf.gap, "d": d, "lambda": args.lam}
    dump_json(out, args.output)
    return EXIT_OK


def cmd_bounds(args):
    cfg = _config(args.tol)
    e = ensemble_from_json(load_json(args.input))
    rep = bounds_report(e, cfg)
    dump_json(
        {
            "p_G": rep.p_G,
            "q_G": rep.q_G,
            "p_PPT": rep.p_PPT,
            "ordering_ok": rep.ordering_ok,
            "nlwe_flag": rep.nlwe_flag,
        },
        None,
    )
    return EXIT_OK if rep.ordering_ok else EXIT_INCONSISTENT


def build_parser():
    ap = argparse.ArgumentParser(prog="ptbound", description="Bipartite state discrimination bounds.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute p_G, q_G or p_PPT with a duality-gap certificate")
    p.add_argument("--problem", choices=sorted(SOLVERS), required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", default="-")
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("certify", help="check optimality conditions for a given POVM")
    p.add_argument("--problem", choices=["pg", "qg"], required=True)
    p.add_argument("--ensemble", required=True)
    p.add_argument("--povm", required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("example", help="emit the Bell-mixture example family")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--sigma", default="mixed", help="'mixed' or a path to a MatrixJson state")
    p.add_argument(
        "--emit", choices=["ensemble", "global-povm", "local-povm", "closed-forms"], required=True
    )
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("bounds", help="run all three solvers and compare")
    p.add_argument("--input", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_bounds)
    return ap


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help and 2 for usage errors
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"ptbound: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailure as exc:
        print(f"ptbound: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"ptbound: cannot write output: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except Exception as exc:  # anything else is a bug; still map it to a documented code
        print(f"ptbound: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
