"""Executable acceptance criteria, shared by ``parhyp selftest`` and the
test suite.  Every check is an exact equality in F_p.

Each ``criterion_N`` returns a :class:`CriterionResult`.  Passing
``primes`` restricts a run to those primes; families for which a prime is
inadmissible are skipped with a note instead of failing.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Sequence

from . import load_example
from .arrangement import ArrangementFamily, is_good_prime, off_discriminant
from .bethe import solve_bae, verify_eigen, verify_orthogonality
from .flagspace import FlagSpace, basis_label
from .fpcount import (
    check_cover_hypotheses, check_thm_2int, enumerate_hypersurface,
    hypersurface_integral, intermediate_sums, lemma_zero_sum, power_sum,
)
from .gaussmanin import (
    module_closure_check, observed_rank, sample_points, solution_vector, verify_solution,
)
from .errors import HypothesisViolated
from .ffield import Poly
from .parallel import pmap


@dataclass
class CriterionResult:
    number: int
    title: str
    ok: bool = True
    notes: list[str] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)
    checks: int = 0
    seconds: float = 0.0

    def check(self, ok: bool, what: str) -> bool:
        self.checks += 1
        if not ok:
            self.ok = False
            self.failures.append(what)
        return ok

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        extra = f"; first failure: {self.failures[0]}" if self.failures else ""
        notes = f"; notes: {'; '.join(self.notes)}" if self.notes else ""
        return (f"[{status}] criterion {self.number}: {self.title} "
                f"({self.checks} checks, {self.seconds:.2f}s){extra}{notes}")


def _admissible(fam: ArrangementFamily, p: int, kappa2_counting: bool = False) -> str | None:
    """Reason the prime cannot be used for this family, or None."""
    if kappa2_counting and p <= 3:
        return f"p={p} skipped: p must exceed 3 for the kappa=2 point count"
    if fam.kappa % p == 0:
        return f"p={p} skipped: kappa not invertible"
    if not is_good_prime(fam, p):
        return f"p={p} skipped: not a good prime"
    return None


def _primes(default: Sequence[int], override: Sequence[int] | None) -> list[int]:
    return list(default if override is None else override)


def _timed(fn: Callable[..., CriterionResult]):
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - start
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# -- 1 ---------------------------------------------------------------------


@_timed
def criterion_1(primes=None) -> CriterionResult:
    """Solutions pass the symbolic singular + Gauss-Manin verification."""
    res = CriterionResult(1, "polynomial solutions satisfy the Gauss-Manin system symbolically")
    plan = [("example-k1n3", (5, 7, 11, 13)), ("example-k2n4", (5, 7, 11)),
            ("example-k2n5", (5, 7))]
    nonzero = 0
    for name, default in plan:
        fam = load_example(name)
        for p in _primes(default, primes):
            reason = _admissible(fam, p)
            if reason:
                res.notes.append(f"{name} {reason}")
                continue
            space = FlagSpace(fam, p)
            variants = [((0,) * fam.k, (1,) * fam.k), ((1,) * fam.k, (1,) * fam.k),
                        ((0,) * fam.k, (2,) + (1,) * (fam.k - 1))]
            sols = []
            for q, l in variants:
                sol = solution_vector(fam, p, q=q, l=l, space=space)
                sols.append(sol)
                nonzero += bool(sol.coords)
                rep = verify_solution(fam, sol, p, space=space)
                bad = rep.first_failure()
                res.check(rep.ok, f"{name} p={p} q={q} l={l}: {bad and bad.name} {bad and bad.detail}")
            res.notes.append(f"{name} p={p}: observed rank of the {len(sols)} variants "
                             f"{observed_rank(sols, space)}")
    res.notes.append(f"{nonzero} of the verified solutions are nonzero")
    return res


# -- 2 ---------------------------------------------------------------------


def _cover_integrals(args):
    fam, x, kappa, p, basis = args
    h = enumerate_hypersurface(fam, x, kappa, p)
    return [hypersurface_integral(h, e) for e in basis]


@_timed
def criterion_2(primes=None) -> CriterionResult:
    """Elliptic point count equals minus the solution, for all distinct x."""
    res = CriterionResult(2, "point count on y^2 = prod(t + x_i) matches -[I]^(p-1)(x)")
    for name in ("example-k1n3", "example-k1n4"):
        fam = load_example(name)
        for p in _primes((5, 7, 11), primes):
            reason = _admissible(fam, p, kappa2_counting=True)
            if reason:
                res.notes.append(f"{name} {reason}")
                continue
            space = FlagSpace(fam, p)
            sol = solution_vector(fam, p, space=space)
            xs = [x for x in product(range(p), repeat=fam.n) if len(set(x)) == fam.n]
            sol_vals = {e: (sol.coords[e].evaluate_many(xs) if e in sol.coords else [0] * len(xs))
                        for e in space.basis}
            lhs = pmap(_cover_integrals, [(fam, x, 2, p, space.basis) for x in xs])
            mismatches = []
            for idx, (row, x) in enumerate(zip(lhs, xs)):
                for e, val in zip(space.basis, row):
                    expected = -int(sol_vals[e][idx]) % p
                    if val != expected:
                        mismatches.append((x, basis_label(e)))
            res.check(not mismatches,
                      f"{name} p={p}: {len(mismatches)} mismatches, first {mismatches[:1]}")
            res.checks += len(xs) * len(space.basis) - 1
    return res


# -- 3 ---------------------------------------------------------------------


def _thm_2int_row(args):
    fam, p, x, sols, space = args
    return check_thm_2int(fam, sols[0].A, None, x, p, space=space, solution=sols)


@_timed
def criterion_3(primes=None, random_points: int = 100, seed: int = 11) -> CriterionResult:
    """Solution at x equals (-1)^k times the F_p^k sum of the F vector."""
    res = CriterionResult(3, "solution equals (-1)^k * integral over F_p^k")
    rng = random.Random(seed)
    for name in ("example-k1n3", "example-k2n4", "example-k2n5"):
        fam = load_example(name)
        for p in _primes((5, 11), primes):
            reason = _admissible(fam, p)
            if reason:
                res.notes.append(f"{name} {reason}")
                continue
            space = FlagSpace(fam, p)
            if p <= 5:
                xs = list(product(range(p), repeat=fam.n))
            else:
                xs = [tuple(rng.randrange(p) for _ in range(fam.n)) for _ in range(random_points)]
            sols = [solution_vector(fam, p, q=q, space=space) for q in ((0,) * fam.k, (1,) * fam.k)]
            asserted = 0
            for x, rep in zip(xs, pmap(_thm_2int_row, [(fam, p, x, sols, space) for x in xs])):
                if len(rep.checks) > 2:
                    asserted += 1
                    res.check(rep.ok, f"{name} p={p}: {rep.first_failure()}")
            if not asserted:
                res.notes.append(f"{name} p={p}: hypotheses fail, equality not asserted")
    return res


# -- 4 ---------------------------------------------------------------------


def _kappa_cover_row(args):
    fam, x, kappa, p, basis = args
    h = enumerate_hypersurface(fam, x, kappa, p)
    integrals = [hypersurface_integral(h, e) for e in basis]
    inter = intermediate_sums(fam, x, kappa, p)
    return integrals, inter


@_timed
def criterion_4(primes=None) -> CriterionResult:
    """kappa = 3 cover identity and vanishing of the intermediate sums."""
    res = CriterionResult(4, "kappa=3 cover integrals match (-1)^k [I](x); intermediate sums vanish")
    fam = load_example("example-kappa3")
    for p in _primes((7, 13), primes):
        reason = _admissible(fam, p)
        if reason is None:
            try:
                check_cover_hypotheses(fam, 3, p)
            except HypothesisViolated as exc:
                reason = f"p={p} skipped: {exc}"
        if reason:
            res.notes.append(reason)
            continue
        space = FlagSpace(fam, p)
        sol = solution_vector(fam, p, space=space)
        xs = [x for x in product(range(p), repeat=fam.n) if off_discriminant(space.circuits, x, p)]
        sol_vals = {e: (sol.coords[e].evaluate_many(xs) if e in sol.coords else [0] * len(xs))
                    for e in space.basis}
        sign = (-1) ** fam.k
        rows = pmap(_kappa_cover_row, [(fam, x, 3, p, space.basis) for x in xs])
        bad_eq, bad_inter = [], []
        for idx, (x, (integrals, inter)) in enumerate(zip(xs, rows)):
            for e, val in zip(space.basis, integrals):
                if val != sign * int(sol_vals[e][idx]) % p:
                    bad_eq.append(x)
            if any(inter.values()):
                bad_inter.append(x)
        res.check(not bad_eq, f"p={p}: cover identity fails at {bad_eq[:3]}")
        res.check(not bad_inter, f"p={p}: intermediate sums nonzero at {bad_inter[:3]}")
        res.checks += len(xs) - 1
    return res


# -- 5 ---------------------------------------------------------------------


@_timed
def criterion_5(primes=None, points: int = 20, seed: int = 5) -> CriterionResult:
    """Bethe vectors are singular common eigenvectors, pairwise orthogonal."""
    res = CriterionResult(5, "Bethe vectors: eigenvectors, singular, pairwise orthogonal")
    fam = load_example("example-k1n3")
    rng = random.Random(seed)
    found = 0
    for p in _primes((5, 7, 11, 13), primes):
        reason = _admissible(fam, p)
        if reason:
            res.notes.append(reason)
            continue
        space = FlagSpace(fam, p)
        xs = [x for x in product(range(p), repeat=fam.n) if off_discriminant(space.circuits, x, p)]
        if len(xs) > points:
            xs = rng.sample(xs, points)
        count = 0
        for x in xs:
            sols = solve_bae(fam, x, p, space)
            count += len(sols)
            for s in sols:
                rep = verify_eigen(fam, s, p, space)
                res.check(rep.ok, f"p={p} x={list(x)} t0={list(s.t0)}: {rep.first_failure()}")
            rep = verify_orthogonality(fam, sols, p, space)
            res.check(rep.ok, f"p={p} x={list(x)}: {rep.first_failure()}")
        res.notes.append(f"p={p}: {count} BAE solutions over {len(xs)} points")
        found += count
    return res


# -- 6 ---------------------------------------------------------------------


@_timed
def criterion_6(primes=None, points: int = 20, seed: int = 6) -> CriterionResult:
    """Power sums, the zero-sum lemma, L_C and K_i symmetry."""
    res = CriterionResult(6, "power sums, zero-sum lemma, L_C and K_i symmetry")
    for p in _primes((5, 7, 11, 13), primes):
        for i in range(1, 3 * (p - 1)):
            expected = p - 1 if i % (p - 1) == 0 else 0
            res.check(power_sum(i, p) == expected, f"sum t^{i} over F_{p}")
    for p in _primes((5, 7), primes):
        for k in (1, 2, 3):
            res.check(lemma_zero_sum(k, p) == 0, f"zero-sum lemma k={k} p={p}")
    rng = random.Random(seed)
    for name in ("example-k1n3", "example-k2n4", "example-k2n5"):
        fam = load_example(name)
        for p in _primes((7, 11), primes):
            reason = _admissible(fam, p)
            if reason:
                res.notes.append(f"{name} {reason}")
                continue
            space = FlagSpace(fam, p)
            for circ in space.circuits:
                res.check(space.is_symmetric(space.lc_matrix(circ)),
                          f"{name} p={p}: L_C not symmetric for {circ.label()}")
            xs = sample_points(space, points, rng.randrange(2**32))
            if len(xs) < points:
                res.notes.append(f"{name} p={p}: only {len(xs)} off-discriminant points found")
            for x in xs:
                for i in range(fam.n):
                    res.check(space.is_symmetric(space.hamiltonian(i, x)),
                              f"{name} p={p}: K_{i + 1}({list(x)}) not symmetric")
    return res


# -- 7 ---------------------------------------------------------------------


@_timed
def criterion_7(primes=None) -> CriterionResult:
    """z_i^p * I re-verifies; z_i * I does not (on some family)."""
    res = CriterionResult(7, "solutions form a module over F_p[z^p]; z_i * I is rejected")
    caught = 0
    for name, default in (("example-k1n3", (5, 7)), ("example-k2n5", (5,))):
        fam = load_example(name)
        for p in _primes(default, primes):
            reason = _admissible(fam, p)
            if reason:
                res.notes.append(f"{name} {reason}")
                continue
            space = FlagSpace(fam, p)
            sol = solution_vector(fam, p, space=space)
            rep = module_closure_check(fam, sol, p, space=space)
            res.check(rep.ok, f"{name} p={p}: {rep.first_failure()}")
            if sol.coords:
                teeth = module_closure_check(fam, sol, p, multiplier_exp=1, space=space)
                caught += sum(not c.ok for c in teeth.checks)
    res.check(caught > 0, "multiplying by z_i was never rejected")
    return res


# -- 8 ---------------------------------------------------------------------


class FlippedSpace(FlagSpace):
    """FlagSpace with the sign of one L_C term flipped (mutation testing)."""

    def __init__(self, fam, p, target):
        super().__init__(fam, p)
        self.target = target

    def lc_terms(self, circ, e):
        terms = super().lc_terms(circ, e)
        ci, te, tl = self.target
        if circ == self.circuits[ci] and e == te:
            c, tup = terms[tl]
            terms[tl] = (-c, tup)
        return terms


def lc_mutation_targets(space: FlagSpace):
    for ci, circ in enumerate(space.circuits):
        for e in space.basis:
            for tl in range(len(space.lc_terms(circ, e))):
                yield ci, e, tl


def _mutant_detected(fam, p, target, sol, bethe_points) -> bool:
    mutant = FlippedSpace(fam, p, target)
    if not all(mutant.is_symmetric(mutant.lc_matrix(c)) for c in mutant.circuits):
        return True
    if sol.coords and not verify_solution(fam, sol, p, space=mutant).ok:
        return True
    for x in bethe_points:
        for s in solve_bae(fam, x, p, mutant):
            if not verify_eigen(fam, s, p, mutant).ok:
                return True
    return False


@_timed
def criterion_8(primes=None) -> CriterionResult:
    """Every single-term sign flip in L_C and every single-coefficient
    perturbation of a solution is caught."""
    res = CriterionResult(8, "mutations of L_C terms and solution coefficients are detected")
    for name, default in (("example-k1n3", (7,)), ("example-k2n4", (7,)), ("example-k2n5", (5,))):
        fam = load_example(name)
        for p in _primes(default, primes):
            reason = _admissible(fam, p)
            if reason:
                res.notes.append(f"{name} {reason}")
                continue
            space = FlagSpace(fam, p)
            sol = solution_vector(fam, p, space=space)
            pts = [x for x in product(range(p), repeat=fam.n)
                   if off_discriminant(space.circuits, x, p)][::7][:25]
            if not sol.coords and not pts:
                # only the symmetry check is live, and it cannot see diagonal flips
                res.notes.append(f"{name} p={p} skipped: solution vanishes and no "
                                 f"off-discriminant points exist")
                continue
            for target in lc_mutation_targets(space):
                ci, e, tl = target
                res.check(_mutant_detected(fam, p, target, sol, pts),
                          f"{name} p={p}: flip of term {tl} in L_{space.circuits[ci].label()} "
                          f"F({basis_label(e)}) undetected")
    fam = load_example("example-k1n3")
    for p in _primes((5,), primes):
        if _admissible(fam, p):
            continue
        space = FlagSpace(fam, p)
        sol = solution_vector(fam, p, space=space)
        for e, poly in sol.coords.items():
            exps = list(poly.terms) + [(0,) * fam.n]
            for exp in exps:
                bumped = dict(sol.coords)
                bumped[e] = poly + Poly(poly.ring, {exp: 1})
                rep = verify_solution(fam, bumped, p, space=space)
                res.check(not rep.ok, f"k1n3 p={p}: +1 at {basis_label(e)} exp={exp} undetected")
    return res


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4,
            criterion_5, criterion_6, criterion_7, criterion_8]


def run_all(primes=None, echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    results = []
    for crit in CRITERIA:
        r = crit(primes=primes)
        if echo:
            echo(r.line())
        results.append(r)
    return results
