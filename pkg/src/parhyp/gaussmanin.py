"""Polynomial solutions mod p of the Gauss-Manin system and their verification.

A solution coordinate is the Taylor coefficient of
``X_e = d_e * prod_j f_j^(A_j - [j in e])`` at ``t = q`` in degree
``(l_1 p - 1, ..., l_k p - 1)``.  X_e is assembled from its linear factors,
never by division.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .arrangement import ArrangementFamily, off_discriminant
from .errors import ExponentUnderflow, KappaNotInvertible, VerificationFailed
from .ffield import Poly, Ring, fp_inv, z_ring, zt_ring
from .flagspace import FlagSpace, basis_label, determinant, parse_basis_label
from .linalg import rank_mod


def choose_exponents(fam: ArrangementFamily, p: int) -> tuple[int, ...]:
    """Least A_j in [1, p] with [A_j] = [a_j] / [kappa]."""
    if fam.kappa % p == 0:
        raise KappaNotInvertible(f"kappa={fam.kappa} is divisible by p={p}")
    kinv = fp_inv(fam.kappa, p)
    return tuple((a * kinv) % p or p for a in fam.a)


def check_exponents(fam: ArrangementFamily, A: Sequence[int], p: int) -> None:
    if fam.kappa % p == 0:
        raise KappaNotInvertible(f"kappa={fam.kappa} is divisible by p={p}")
    if len(A) != fam.n:
        raise ValueError(f"{len(A)} exponents for {fam.n} hyperplanes")
    for j, (Aj, a) in enumerate(zip(A, fam.a)):
        if Aj < 0:
            raise ExponentUnderflow(f"A_{j + 1}={Aj} is negative")
        if (Aj * fam.kappa - a) % p:
            raise ValueError(f"A_{j + 1}={Aj} does not represent a_{j + 1}/kappa mod {p}")


def linear_forms(fam: ArrangementFamily, ring: Ring, q: Sequence[int] | None = None) -> list[Poly]:
    """f_j(z, t + q) in the (z, t) ring."""
    q = q or (0,) * fam.k
    forms = []
    for j, row in enumerate(fam.b):
        const = sum(b * qi for b, qi in zip(row, q))
        coeffs = {f"t{i + 1}": b for i, b in enumerate(row) if b}
        forms.append(ring.linear(const, coeffs) + ring.var(f"z{j + 1}"))
    return forms


def master_polynomial(fam: ArrangementFamily, A: Sequence[int], p: int) -> Poly:
    ring = zt_ring(p, fam.n, fam.k)
    result = ring.one()
    for f, Aj in zip(linear_forms(fam, ring), A):
        result = result * f.pow(Aj)
    return result


def factored_product(forms: Sequence[Poly], exps: Sequence[int], cap=None) -> Poly:
    ring = forms[0].ring
    result = ring.one()
    for f, e in sorted(zip(forms, exps), key=lambda fe: fe[1]):
        if e:
            result = result.mul(f.pow(e, cap), cap)
    return result


@dataclass
class SolutionVector:
    A: tuple[int, ...]
    q: tuple[int, ...]
    l: tuple[int, ...]
    coords: dict  # basis tuple -> Poly in z
    ring: Ring

    def to_dict(self) -> dict:
        return {
            "A": list(self.A), "q": list(self.q), "l": list(self.l),
            "solution": {basis_label(e): poly.to_json() for e, poly in self.coords.items()},
        }

    @classmethod
    def from_dict(cls, data: dict, fam: ArrangementFamily, p: int) -> SolutionVector:
        ring = z_ring(p, fam.n)
        coords = {}
        for label, terms in data["solution"].items():
            poly = Poly.from_json(ring, terms)
            if poly:
                coords[parse_basis_label(label)] = poly
        return cls(tuple(data["A"]), tuple(data["q"]), tuple(data["l"]), coords, ring)

    def evaluate(self, x: Sequence[int]) -> dict:
        p = self.ring.p
        return {e: poly(x) for e, poly in self.coords.items() if poly(x) % p}


def taylor_coefficient(fam: ArrangementFamily, A: Sequence[int], e: Sequence[int],
                       q: Sequence[int], degrees: Sequence[int], p: int) -> Poly:
    """Coefficient of prod (t_i - q_i)^degrees[i] in X_e, a polynomial in z."""
    zr = z_ring(p, fam.n)
    exps = list(A)
    for j in e:
        if exps[j] < 1:
            raise ExponentUnderflow(f"A_{j + 1}=0 cannot absorb the 1/f_{j + 1} factor")
        exps[j] -= 1
    d = determinant(fam, e) % p
    if d == 0:
        return zr.zero()
    # every factor has t-degree 1, so the total t-degree is the exponent sum
    if sum(exps) < sum(degrees):
        return zr.zero()
    ring = zt_ring(p, fam.n, fam.k)
    forms = linear_forms(fam, ring, q)
    cap = [None] * fam.n + list(degrees)
    # t_i-degree still obtainable from the factors not yet multiplied in;
    # partial products that cannot reach the target degree are dropped
    reach = [sum(ej for ej, row in zip(exps, fam.b) if row[i]) for i in range(fam.k)]
    x = ring.one()
    for j in sorted(range(fam.n), key=lambda j: exps[j]):
        if not exps[j]:
            continue
        reach = [r - exps[j] * bool(fam.b[j][i]) for i, r in enumerate(reach)]
        floor = [None] * fam.n + [deg - r for deg, r in zip(degrees, reach)]
        x = x.mul(forms[j].pow(exps[j], cap), cap, floor)
        if not x:
            return zr.zero()
    return x.scale(d).coeff({f"t{i + 1}": deg for i, deg in enumerate(degrees)})


def solution_vector(fam: ArrangementFamily, p: int, A: Sequence[int] | None = None,
                    q: Sequence[int] | None = None, l: Sequence[int] | None = None,
                    space: FlagSpace | None = None) -> SolutionVector:
    A = tuple(choose_exponents(fam, p) if A is None else A)
    check_exponents(fam, A, p)
    q = tuple(x % p for x in (q or (0,) * fam.k))
    l = tuple(l or (1,) * fam.k)
    if len(q) != fam.k or len(l) != fam.k or any(li < 1 for li in l):
        raise ValueError("q must have length k and l must be k positive integers")
    space = space or FlagSpace(fam, p)
    degrees = [li * p - 1 for li in l]
    coords = {}
    for e in space.basis:
        poly = taylor_coefficient(fam, A, e, q, degrees, p)
        if poly:
            coords[e] = poly
    return SolutionVector(A, q, l, coords, z_ring(p, fam.n))


def observed_rank(solutions: Sequence[SolutionVector], space: FlagSpace,
                  points: int = 20, seed: int = 0) -> int:
    """Largest F_p-rank of the solutions' values over sampled off-discriminant
    points.  A lower bound for their rank over F_p(z); reported, never
    asserted."""
    best = 0
    for x in sample_points(space, points, seed):
        rows = [[sol.coords[e](x) if e in sol.coords else 0 for e in space.basis]
                for sol in solutions]
        best = max(best, rank_mod(rows, space.p))
    return best


# -- verification -------------------------------------------------------


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name, ok, detail=""):
        self.checks.append(Check(name, bool(ok), detail))

    def first_failure(self) -> Check | None:
        return next((c for c in self.checks if not c.ok), None)

    def require(self) -> Report:
        bad = self.first_failure()
        if bad is not None:
            raise VerificationFailed(f"{bad.name}: {bad.detail}", bad)
        return self

    def to_dict(self) -> dict:
        return {"ok": self.ok,
                "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in self.checks]}


def _first_residual(vec: dict) -> str:
    e, poly = next(iter(sorted(vec.items())))
    exp, c = poly.sorted_terms()[0]
    return f"coordinate {basis_label(e)}, monomial exp={list(exp)} coeff={c}"


def circuit_forms(space: FlagSpace, ring: Ring) -> list[Poly]:
    return [ring.linear(0, {f"z{i + 1}": lam for i, lam in zip(c.indices, c.lambdas)})
            for c in space.circuits]


def gm_residuals(space: FlagSpace, coords: dict, ring: Ring) -> dict[int, dict]:
    """Cleared-denominator residuals R_i, keyed by hyperplane index; only
    nonzero coordinates are kept."""
    fam, p = space.fam, space.p
    forms = circuit_forms(space, ring)
    ncirc = len(forms)
    # products of all circuit forms but one, via prefix/suffix products
    prefix = [ring.one()]
    for f in forms:
        prefix.append(prefix[-1] * f)
    suffix = [ring.one()]
    for f in reversed(forms):
        suffix.append(suffix[-1] * f)
    suffix.reverse()
    full = prefix[-1]
    others = [prefix[c] * suffix[c + 1] for c in range(ncirc)]
    lc_images = [space.apply_matrix(space.lc_matrix(c), coords) for c in space.circuits]
    kappa = fam.kappa % p
    out = {}
    for i in range(fam.n):
        name = f"z{i + 1}"
        res = {}
        for e, poly in coords.items():
            d = poly.partial(name)
            if d:
                res[e] = d * full * kappa
        for circ, other, img in zip(space.circuits, others, lc_images):
            lam = circ.coefficient(i)
            if lam == 0:
                continue
            for e, poly in img.items():
                res[e] = res.get(e, ring.zero()) - poly * other * lam
        res = {e: v for e, v in res.items() if v}
        if res:
            out[i] = res
    return out


def _eval_vec(coords: dict, x, p):
    return {e: poly(x) for e, poly in coords.items()}


def sample_points(space: FlagSpace, count: int, seed: int) -> list[tuple[int, ...]]:
    rng = random.Random(seed)
    p, n = space.p, space.fam.n
    pts = []
    attempts = 0
    while len(pts) < count and attempts < 100 * count:
        attempts += 1
        x = tuple(rng.randrange(p) for _ in range(n))
        if off_discriminant(space.circuits, x, p):
            pts.append(x)
    return pts


def verify_solution(fam: ArrangementFamily, coords: dict, p: int, mode: str = "symbolic",
                    space: FlagSpace | None = None, samples: int = 50, seed: int = 0) -> Report:
    """Check the singular-vector equations and the Gauss-Manin equations."""
    space = space or FlagSpace(fam, p)
    if isinstance(coords, SolutionVector):
        coords = coords.coords
    ring = z_ring(p, fam.n)
    report = Report()
    sing = space.singular_residuals(coords)
    report.add("singular", not sing,
               "" if not sing else f"equation for fixed indices {basis_label(next(iter(sing)))} fails")
    if mode == "symbolic":
        res = gm_residuals(space, coords, ring)
        for i in range(fam.n):
            report.add(f"gauss-manin z{i + 1}", i not in res,
                       _first_residual(res[i]) if i in res else "")
    elif mode == "sampled":
        derivs = [{e: poly.partial(f"z{i + 1}") for e, poly in coords.items()} for i in range(fam.n)]
        kappa = fam.kappa % p
        for i in range(fam.n):
            bad = ""
            for x in sample_points(space, samples, seed):
                lhs = {e: kappa * v % p for e, v in _eval_vec(derivs[i], x, p).items() if v}
                rhs = space.apply_matrix(space.hamiltonian(i, x), _eval_vec(coords, x, p))
                if lhs != rhs:
                    bad = f"mismatch at x={list(x)}"
                    break
            report.add(f"gauss-manin z{i + 1} (sampled)", not bad, bad)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return report


def module_closure_check(fam: ArrangementFamily, coords: dict, p: int, multiplier_exp: int | None = None,
                         space: FlagSpace | None = None) -> Report:
    """Re-verify z_i^m * I for each i (m = p by default)."""
    space = space or FlagSpace(fam, p)
    if isinstance(coords, SolutionVector):
        coords = coords.coords
    m = p if multiplier_exp is None else multiplier_exp
    ring = z_ring(p, fam.n)
    report = Report()
    for i in range(fam.n):
        mult = ring.var(f"z{i + 1}").pow(m)
        scaled = {e: poly * mult for e, poly in coords.items()}
        sub = verify_solution(fam, scaled, p, space=space)
        bad = sub.first_failure()
        report.add(f"z{i + 1}^{m} * I", sub.ok, "" if bad is None else f"{bad.name}: {bad.detail}")
    return report
