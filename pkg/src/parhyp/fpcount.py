"""Discrete integrals over F_p^k and over the cover hypersurfaces
``y^kappa = prod_j f_j(x, t)``, and the identities tying them to the
polynomial solutions."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .arrangement import ArrangementFamily
from .errors import ExponentUnderflow, HypothesisViolated
from .ffield import Poly, fp_inv, t_ring
from .flagspace import FlagSpace, basis_label, determinant
from .gaussmanin import Report, choose_exponents, solution_vector


def field_points(p: int, k: int):
    return product(range(p), repeat=k)


def integral_fpk(vec: dict, p: int) -> dict:
    """Sum of each t-polynomial coordinate over all of F_p^k."""
    out = {}
    grids = {}
    for e, poly in vec.items():
        k = poly.ring.nvars
        if k not in grids:
            grids[k] = np.array(list(field_points(p, k)), dtype=np.int64).reshape(-1, k)
        total = int(poly.evaluate_many(grids[k]).sum()) % p
        if total:
            out[e] = total
    return out


def power_sum(i: int, p: int) -> int:
    """sum_{t in F_p} t^i by brute force (0^0 taken as 1)."""
    return sum(pow(t, i, p) for t in range(p)) % p


def fiber_forms(fam: ArrangementFamily, x: Sequence[int], p: int) -> list[Poly]:
    """[f]_j(x, t) as polynomials in t."""
    ring = t_ring(p, fam.k)
    return [ring.linear(x[j], {f"t{i + 1}": b for i, b in enumerate(row) if b})
            for j, row in enumerate(fam.b)]


def build_F_vector(fam: ArrangementFamily, A: Sequence[int], x: Sequence[int], p: int,
                   space: FlagSpace | None = None) -> dict:
    space = space or FlagSpace(fam, p)
    forms = fiber_forms(fam, x, p)
    powers = {}

    def fpow(j, e):
        if (j, e) not in powers:
            powers[j, e] = forms[j].pow(e)
        return powers[j, e]

    out = {}
    for e in space.basis:
        exps = _F_exponents(fam, A, e)
        poly = forms[0].ring.const(determinant(fam, e))
        for j, ej in enumerate(exps):
            if ej:
                poly = poly * fpow(j, ej)
        if poly:
            out[e] = poly
    return out


def _max_t_degree(vec: dict, k: int) -> int:
    return max((poly.degree(f"t{i + 1}") for poly in vec.values() for i in range(k)), default=-1)


def _F_exponents(fam, A, e):
    exps = list(A)
    for j in e:
        exps[j] -= 1
    if min(exps) < 0:
        raise ExponentUnderflow(f"A has a zero entry at an index of {basis_label(e)}")
    return exps


def integral_side(fam: ArrangementFamily, A: Sequence[int], x: Sequence[int], p: int,
                  space: FlagSpace | None = None) -> tuple[bool, dict]:
    """(deg_t F < 2p - 2, (-1)^k times the F_p^k sum of F).  Neither depends
    on the Taylor point q.

    F is never expanded: each coordinate is a product of linear forms in t,
    so its t_i-degree is the sum of the exponents of the forms involving
    t_i, and the sum is taken over numeric values on the grid."""
    space = space or FlagSpace(fam, p)
    k = fam.k
    grid = np.array(list(field_points(p, k)), dtype=np.int64).reshape(-1, k)
    b = np.array(fam.b, dtype=np.int64).reshape(fam.n, k) % p
    vals = (np.array(x, dtype=np.int64)[None, :] + grid @ b.T) % p
    sign = (-1) ** k
    maxdeg = -1
    rhs = {}
    for e in space.basis:
        exps = _F_exponents(fam, A, e)
        d = determinant(fam, e) % p
        if d == 0:
            continue
        maxdeg = max(maxdeg, *(sum(ej for ej, row in zip(exps, b) if row[i]) for i in range(k)))
        col = np.full(len(grid), d, dtype=np.int64)
        for j, ej in enumerate(exps):
            if ej:
                col = col * _powmod(vals[:, j], ej, p) % p
        v = sign * int(col.sum()) % p
        if v:
            rhs[e] = v
    return maxdeg < 2 * p - 2, rhs


def _powmod(arr, e: int, p: int):
    out = np.ones_like(arr)
    base = arr % p
    while e:
        if e & 1:
            out = out * base % p
        base = base * base % p
        e >>= 1
    return out


def check_thm_2int(fam: ArrangementFamily, A: Sequence[int] | None, q: Sequence[int] | None,
                   x: Sequence[int], p: int, space: FlagSpace | None = None,
                   solution=None) -> Report:
    """Compare the Taylor-coefficient solution at x with (-1)^k times the
    sum of the F vector over F_p^k.  Hypothesis status and the equality are
    reported separately; the equality is only asserted when a hypothesis
    holds.  ``solution`` may be a list of solutions (e.g. several q), each
    compared against the same integral."""
    space = space or FlagSpace(fam, p)
    A = tuple(choose_exponents(fam, p) if A is None else A)
    k = fam.k
    hyp_deg, rhs = integral_side(fam, A, x, p, space)
    hyp_sum = sum(A) - k < (k + 1) * (p - 1)
    if solution is None:
        solution = solution_vector(fam, p, A=A, q=q, space=space)
    sols = solution if isinstance(solution, (list, tuple)) else [solution]
    report = Report()
    report.add("hypothesis deg_t F < 2p-2", hyp_deg)
    report.add("hypothesis sum A - k < (k+1)(p-1)", hyp_sum)
    if hyp_deg or hyp_sum:
        for sol in sols:
            lhs = sol.evaluate(x)
            report.add(f"solution (q={list(sol.q)}) equals (-1)^k integral", lhs == rhs,
                       "" if lhs == rhs else f"x={list(x)}: {lhs} vs {rhs}")
    return report


@dataclass
class Hypersurface:
    fam: ArrangementFamily
    x: tuple[int, ...]
    kappa: int
    p: int
    points: list[tuple[tuple[int, ...], int]] = field(default_factory=list)

    def __len__(self):
        return len(self.points)


def kth_roots_table(kappa: int, p: int) -> dict[int, list[int]]:
    table: dict[int, list[int]] = {}
    for y in range(p):
        table.setdefault(pow(y, kappa, p), []).append(y)
    return table


def _fiber_values(fam, x, t, p):
    return [(x[j] + sum(b * ti for b, ti in zip(row, t))) % p for j, row in enumerate(fam.b)]


def enumerate_hypersurface(fam: ArrangementFamily, x: Sequence[int], kappa: int, p: int) -> Hypersurface:
    roots = kth_roots_table(kappa, p)
    h = Hypersurface(fam, tuple(x), kappa, p)
    for t in field_points(p, fam.k):
        prod_val = 1
        for v in _fiber_values(fam, x, t, p):
            prod_val = prod_val * v % p
        for y in roots.get(prod_val, ()):
            h.points.append((t, y))
    return h


def hypersurface_integral(h: Hypersurface, e: Sequence[int]) -> int:
    """Primed sum of d_e / prod_l f_{j_l} over the points of h; points where
    a denominator vanishes are skipped, points with y = 0 are not."""
    p = h.p
    d = determinant(h.fam, e) % p
    total = 0
    for t, _y in h.points:
        vals = _fiber_values(h.fam, h.x, t, p)
        den = 1
        for j in e:
            den = den * vals[j] % p
        if den:
            total += d * fp_inv(den, p)
    return total % p


def lemma_zero_sum(k: int, p: int) -> int:
    """sum over s in (F_p^*)^k of 1 / (s_1 ... s_k)."""
    total = 0
    for s in product(range(1, p), repeat=k):
        den = 1
        for v in s:
            den = den * v % p
        total += fp_inv(den, p)
    return total % p


def kappa_inequalities(n: int, k: int, kappa: int, p: int) -> tuple[bool, bool]:
    """The two inequalities of the kappa-cover theorem, evaluated exactly."""
    first = Fraction(n * (kappa - 1) * (p - 1), kappa) - k < (k + 1) * (p - 1)
    second = Fraction(n * (kappa - 2) * (p - 2), kappa) - k < k * (p - 1)
    return first, second


def check_cover_hypotheses(fam: ArrangementFamily, kappa: int, p: int) -> None:
    if any(a != -(kappa - 1) for a in fam.a):
        raise HypothesisViolated(f"all weights must equal {-(kappa - 1)}")
    if fam.kappa != kappa:
        raise HypothesisViolated(f"family kappa {fam.kappa} differs from cover degree {kappa}")
    if kappa < 2 or (p - 1) % kappa:
        raise HypothesisViolated(f"kappa={kappa} must divide p-1={p - 1}")
    if kappa == p - 1:
        raise HypothesisViolated("kappa must differ from p-1")
    first, second = kappa_inequalities(fam.n, fam.k, kappa, p)
    if not first:
        raise HypothesisViolated("n(kappa-1)(p-1)/kappa - k < (k+1)(p-1) fails")
    if not second:
        raise HypothesisViolated("n(kappa-2)(p-2)/kappa - k < k(p-1) fails")


def intermediate_sums(fam: ArrangementFamily, x: Sequence[int], kappa: int, p: int,
                      space: FlagSpace | None = None) -> dict[int, dict]:
    """For each ell = 1..kappa-2, the F_p^k sums of
    d_e / prod f_{j_l} * (prod_j f_j)^(ell (p-1)/kappa); nonzero entries only."""
    space = space or FlagSpace(fam, p)
    out = {}
    for ell in range(1, kappa - 1):
        A = (ell * (p - 1) // kappa,) * fam.n
        sums = integral_fpk(build_F_vector(fam, A, x, p, space), p)
        out[ell] = sums
    return out


def check_kappa_cover(fam: ArrangementFamily, x: Sequence[int], kappa: int, p: int,
                      space: FlagSpace | None = None, solution=None) -> Report:
    check_cover_hypotheses(fam, kappa, p)
    space = space or FlagSpace(fam, p)
    if solution is None:
        solution = solution_vector(fam, p, space=space)
    h = enumerate_hypersurface(fam, x, kappa, p)
    sign = (-1) ** fam.k
    report = Report()
    for e in space.basis:
        lhs = hypersurface_integral(h, e)
        rhs = sign * solution.coords[e](x) % p if e in solution.coords else 0
        report.add(f"cover integral {basis_label(e)}", lhs == rhs,
                   "" if lhs == rhs else f"x={list(x)}: {lhs} vs {rhs}")
    for ell, sums in intermediate_sums(fam, x, kappa, p, space).items():
        report.add(f"intermediate sum ell={ell} vanishes", not sums,
                   "" if not sums else f"x={list(x)}: {sums}")
    return report
