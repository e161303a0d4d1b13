"""Command-line entry point.

Every subcommand writes one JSON document (stdout or --output) and a short
human-readable summary on stderr.  Exit codes: 0 pass, 1 verification
failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import Sequence

from . import EXAMPLES, __version__, load_example
from .arrangement import ArrangementFamily, circuits, is_good_prime, off_discriminant, validate_family
from .bethe import bethe_vector, self_pairings, solve_bae, verify_eigen, verify_orthogonality
from .errors import NotGoodPrime, OnDiscriminant, ParhypError, ParseError, VerificationFailed
from .ffield import check_prime
from .flagspace import FlagSpace, basis_label
from .fpcount import (
    check_cover_hypotheses, enumerate_hypersurface, hypersurface_integral, intermediate_sums,
)
from .gaussmanin import SolutionVector, choose_exponents, solution_vector, verify_solution

USAGE_ERROR = 2
FAILED = 1


@dataclasses.dataclass
class RunConfig:
    subcommand: str
    input_path: str | None = None
    p: int | None = None
    q: tuple[int, ...] | None = None
    l: tuple[int, ...] | None = None
    x: tuple[int, ...] | None = None
    kappa_override: int | None = None
    mode: str = "symbolic"
    seed: int = 0
    samples: int = 50
    output: str | None = None
    solution_path: str | None = None
    primes: tuple[int, ...] | None = None


class _Exit(Exception):
    def __init__(self, code: int, doc: dict | None = None):
        super().__init__(code)
        self.code = code
        self.doc = doc


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma separated list of integers, got {text!r}")


def _vec_labels(vec: dict) -> dict:
    return {basis_label(e): int(v) for e, v in sorted(vec.items())}


# -- setup shared by the computing subcommands ---------------------------


def load_family(path: str, kappa_override: int | None = None) -> ArrangementFamily:
    """Read a family file; a bare bundled example name also works."""
    if Path(path).is_file():
        fam = ArrangementFamily.load(path)
    elif Path(path).stem in EXAMPLES:
        fam = load_example(Path(path).stem)
    else:
        raise ParseError(f"{path}: no such file")
    if kappa_override is not None:
        fam = dataclasses.replace(fam, kappa=kappa_override)
    validate_family(fam)
    return fam


def require_good_prime(fam: ArrangementFamily, p: int) -> None:
    check = is_good_prime(fam, p)
    if not check:
        raise NotGoodPrime(f"p={p} is not a good prime: {check.reason}", check.to_dict())


def _check_length(name: str, vec, size: int) -> None:
    if vec is not None and len(vec) != size:
        raise ParseError(f"--{name} has {len(vec)} entries, expected {size}")


def _prepare(cfg: RunConfig, need_x: bool = False) -> tuple[ArrangementFamily, FlagSpace]:
    if cfg.input_path is None:
        raise ParseError(f"{cfg.subcommand} needs an arrangement file")
    if cfg.p is None:
        raise ParseError(f"{cfg.subcommand} needs -p")
    check_prime(cfg.p)
    fam = load_family(cfg.input_path, cfg.kappa_override)
    _check_length("q", cfg.q, fam.k)
    _check_length("l", cfg.l, fam.k)
    _check_length("x", cfg.x, fam.n)
    if need_x and cfg.x is None:
        raise ParseError(f"{cfg.subcommand} needs --x")
    require_good_prime(fam, cfg.p)
    return fam, FlagSpace(fam, cfg.p)


# -- subcommands ---------------------------------------------------------


def cmd_circuits(cfg: RunConfig) -> dict:
    if cfg.input_path is None:
        raise ParseError("circuits needs an arrangement file")
    fam = load_family(cfg.input_path, cfg.kappa_override)
    doc = {"family": fam.to_dict(),
           "circuits": [{"indices": [i + 1 for i in c.indices], "lambda": list(c.lambdas)}
                        for c in circuits(fam)]}
    if cfg.p is not None:
        check_prime(cfg.p)
        doc["good_prime"] = is_good_prime(fam, cfg.p).to_dict()
    _say(f"{len(doc['circuits'])} circuits")
    return doc


def cmd_good_prime(cfg: RunConfig) -> dict:
    if cfg.input_path is None or cfg.p is None:
        raise ParseError("good-prime needs an arrangement file and -p")
    check_prime(cfg.p)
    fam = load_family(cfg.input_path, cfg.kappa_override)
    check = is_good_prime(fam, cfg.p)
    doc = check.to_dict()
    if not check:
        _say(f"p={cfg.p} is not good: {check.reason}")
        raise _Exit(USAGE_ERROR, doc)
    _say(f"p={cfg.p} is good")
    return doc


def cmd_hamiltonian(cfg: RunConfig) -> dict:
    fam, space = _prepare(cfg, need_x=True)
    x = tuple(v % cfg.p for v in cfg.x)
    mats = {f"K{i + 1}": space.hamiltonian(i, x) for i in range(fam.n)}
    sym = all(space.is_symmetric(m) for m in mats.values())
    _say(f"{fam.n} Hamiltonians of size {space.dim}, symmetric: {sym}")
    return {"p": cfg.p, "x": list(x), "basis": [basis_label(e) for e in space.basis],
            "hamiltonians": mats, "symmetric": sym}


def cmd_solve(cfg: RunConfig) -> dict:
    fam, space = _prepare(cfg)
    sol = solution_vector(fam, cfg.p, q=cfg.q, l=cfg.l, space=space)
    report = verify_solution(fam, sol, cfg.p, mode=cfg.mode, space=space,
                             samples=cfg.samples, seed=cfg.seed)
    doc = sol.to_dict()
    doc["verified"] = report.ok
    _say(f"{len(sol.coords)} nonzero coordinates, verified: {report.ok}")
    if not report.ok:
        doc["report"] = report.to_dict()
        raise _Exit(FAILED, doc)
    return doc


def cmd_verify(cfg: RunConfig) -> dict:
    fam, space = _prepare(cfg)
    if cfg.solution_path is None:
        raise ParseError("verify needs --solution (a document written by solve, or - for stdin)")
    try:
        if cfg.solution_path == "-":
            data = json.load(sys.stdin)
        else:
            with open(cfg.solution_path) as fh:
                data = json.load(fh)
        sol = SolutionVector.from_dict(data, fam, cfg.p)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"cannot read solution document: {exc}") from None
    report = verify_solution(fam, sol, cfg.p, mode=cfg.mode, space=space,
                             samples=cfg.samples, seed=cfg.seed)
    bad = report.first_failure()
    _say("verified" if bad is None else f"FAILED {bad.name}: {bad.detail}")
    doc = {"verified": report.ok, "report": report.to_dict()}
    if not report.ok:
        raise _Exit(FAILED, doc)
    return doc


def cmd_count(cfg: RunConfig) -> dict:
    fam, space = _prepare(cfg, need_x=True)
    p, kappa = cfg.p, fam.kappa
    check_cover_hypotheses(fam, kappa, p)
    x = tuple(v % p for v in cfg.x)
    sol = solution_vector(fam, p, space=space)
    h = enumerate_hypersurface(fam, x, kappa, p)
    sign = (-1) ** fam.k
    integrals = {basis_label(e): hypersurface_integral(h, e) for e in space.basis}
    values = {basis_label(e): (sol.coords[e](x) if e in sol.coords else 0) for e in space.basis}
    inter = intermediate_sums(fam, x, kappa, p, space)
    match = all(integrals[lab] == sign * values[lab] % p for lab in integrals)
    match = match and not any(inter.values())
    doc = {"p": p, "x": list(x), "kappa": kappa, "A": list(choose_exponents(fam, p)),
           "points": len(h), "integrals": integrals, "solution_values": values,
           "sign": sign, "off_discriminant": off_discriminant(space.circuits, x, p),
           "intermediate_sums": {str(ell): _vec_labels(s) for ell, s in inter.items()},
           "match": match}
    _say(f"{len(h)} points, integrals match {'-' if sign < 0 else ''}solution values: {match}")
    if not match:
        raise _Exit(FAILED, doc)
    return doc


def cmd_bethe(cfg: RunConfig) -> dict:
    fam, space = _prepare(cfg, need_x=True)
    p = cfg.p
    x = tuple(v % p for v in cfg.x)
    sols = solve_bae(fam, x, p, space)
    entries = []
    eigen_ok = True
    for s in sols:
        rep = verify_eigen(fam, s, p, space)
        eigen_ok = eigen_ok and rep.ok
        entries.append({"t0": list(s.t0), "eigenvalues": list(s.eigenvalues),
                        "vector": _vec_labels(bethe_vector(fam, s, p, space)), "eigen": rep.ok})
    orth = verify_orthogonality(fam, sols, p, space)
    doc = {"p": p, "x": list(x), "solutions": entries,
           "orthogonality": "pass" if orth.ok else "fail",
           "self_pairings": self_pairings(fam, sols, p, space)}
    _say(f"{len(sols)} Bethe solutions, eigen: {eigen_ok}, orthogonality: {orth.ok}")
    if not (eigen_ok and orth.ok):
        raise _Exit(FAILED, doc)
    return doc


def cmd_selftest(cfg: RunConfig) -> dict:
    from .acceptance import run_all

    for p in cfg.primes or ():
        check_prime(p)
    results = run_all(primes=list(cfg.primes) if cfg.primes else None, echo=_say)
    doc = {"criteria": [{"number": r.number, "title": r.title, "ok": r.ok, "checks": r.checks,
                         "notes": r.notes, "failures": r.failures[:5]} for r in results],
           "ok": all(r.ok for r in results)}
    if not doc["ok"]:
        raise _Exit(FAILED, doc)
    return doc


COMMANDS = {
    "circuits": cmd_circuits,
    "good-prime": cmd_good_prime,
    "hamiltonian": cmd_hamiltonian,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "count": cmd_count,
    "bethe": cmd_bethe,
    "selftest": cmd_selftest,
}


# -- plumbing --------------------------------------------------------------


def _say(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def dump(doc: dict) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parhyp",
        description="Polynomial solutions mod p of Gauss-Manin systems of parallel hyperplane families.",
        epilog="Vectors are comma lists; use --x=-1,2 for values starting with a minus sign.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(name, help_text, x=False, ql=False, mode=False):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("input", nargs="?", help="arrangement JSON file or bundled example name")
        sp.add_argument("-i", "--input", dest="input_opt", help="same as the positional input")
        sp.add_argument("-p", type=int, help="prime")
        sp.add_argument("--kappa", type=int, help="override the family's kappa")
        sp.add_argument("-o", "--output", help="write the JSON document here instead of stdout")
        if x:
            sp.add_argument("--x", type=_int_list, help="point in z-space, e.g. 0,1,3")
        if ql:
            sp.add_argument("--q", type=_int_list, help="Taylor point in t-space (default 0)")
            sp.add_argument("--l", type=_int_list, help="degree multipliers (default all 1)")
        if mode:
            sp.add_argument("--mode", choices=("symbolic", "sampled"), default="symbolic")
            sp.add_argument("--seed", type=int, default=0, help="seed for sampled mode")
            sp.add_argument("--samples", type=int, default=50, help="points per equation in sampled mode")
        return sp

    common("circuits", "list circuits and their primitive dependencies")
    common("good-prime", "check whether p is a good prime; exit 2 with a certificate if not")
    common("hamiltonian", "dump the matrices K_i(x)", x=True)
    common("solve", "compute and verify the polynomial solution", ql=True, mode=True)
    v = common("verify", "verify a solution document written by solve", mode=True)
    v.add_argument("--solution", dest="solution_path", help="solution document, - for stdin")
    common("count", "hypersurface point count and integrals at x", x=True)
    common("bethe", "solve the Bethe ansatz equations at x", x=True)
    st = sub.add_parser("selftest", help="run the acceptance criteria on the bundled families")
    st.add_argument("-p", dest="primes", type=int, action="append",
                    help="restrict to this prime (repeatable)")
    st.add_argument("-o", "--output")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    get = lambda name, default=None: getattr(ns, name, default)  # noqa: E731
    return RunConfig(
        subcommand=ns.subcommand,
        input_path=get("input") or get("input_opt"),
        p=get("p"), q=get("q"), l=get("l"), x=get("x"),
        kappa_override=get("kappa"), mode=get("mode", "symbolic"),
        seed=get("seed", 0), samples=get("samples", 50), output=get("output"),
        solution_path=get("solution_path"),
        primes=tuple(ns.primes) if get("primes") else None,
    )


def run(cfg: RunConfig) -> tuple[int, dict | None]:
    """Dispatch one subcommand; returns (exit code, JSON document or None)."""
    try:
        return 0, COMMANDS[cfg.subcommand](cfg)
    except _Exit as stop:
        return stop.code, stop.doc
    except NotGoodPrime as exc:
        _say(f"error: {exc}")
        return USAGE_ERROR, {"error": str(exc), "certificate": exc.certificate}
    except VerificationFailed as exc:
        _say(f"verification failed: {exc}")
        return FAILED, {"error": str(exc), "verified": False}
    except (ParhypError, OnDiscriminant, ValueError) as exc:
        _say(f"error: {exc}")
        return USAGE_ERROR, None


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = config_from_args(ns)
    code, doc = run(cfg)
    if doc is not None:
        text = dump(doc)
        if cfg.output:
            Path(cfg.output).write_text(text)
        else:
            sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
