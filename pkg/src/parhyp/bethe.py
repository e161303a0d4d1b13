"""Bethe ansatz over F_p: exhaustive solving, Bethe vectors and the
eigenvector / orthogonality checks."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Sequence

from .arrangement import ArrangementFamily, off_discriminant
from .errors import OnDiscriminant
from .ffield import fp_inv
from .flagspace import FlagSpace, basis_label, determinant
from .gaussmanin import Report


@dataclass(frozen=True)
class BetheSolution:
    x: tuple[int, ...]
    t0: tuple[int, ...]
    eigenvalues: tuple[int, ...]


def _fiber(fam, x, t, p):
    return [(x[j] + sum(b * ti for b, ti in zip(row, t))) % p for j, row in enumerate(fam.b)]


def solve_bae(fam: ArrangementFamily, x: Sequence[int], p: int,
              space: FlagSpace | None = None) -> list[BetheSolution]:
    """All t in F_p^k off the hyperplanes with sum_j b_j^i a_j / f_j(x, t) = 0."""
    space = space or FlagSpace(fam, p)
    if not off_discriminant(space.circuits, x, p):
        raise OnDiscriminant(f"x={list(x)} lies on the discriminant")
    weights = [a % p for a in fam.a]
    sols = []
    for t in product(range(p), repeat=fam.k):
        vals = _fiber(fam, x, t, p)
        if not all(vals):
            continue
        ratios = [w * fp_inv(v, p) % p for w, v in zip(weights, vals)]
        if all(sum(row[i] * r for row, r in zip(fam.b, ratios)) % p == 0 for i in range(fam.k)):
            sols.append(BetheSolution(tuple(x), t, tuple(ratios)))
    return sols


def bethe_vector(fam: ArrangementFamily, sol: BetheSolution, p: int,
                 space: FlagSpace | None = None) -> dict:
    space = space or FlagSpace(fam, p)
    vals = _fiber(fam, sol.x, sol.t0, p)
    out = {}
    for e in space.basis:
        den = 1
        for j in e:
            den = den * vals[j] % p
        c = determinant(fam, e) * fp_inv(den, p) % p
        if c:
            out[e] = c
    return out


def verify_eigen(fam: ArrangementFamily, sol: BetheSolution, p: int,
                 space: FlagSpace | None = None) -> Report:
    space = space or FlagSpace(fam, p)
    vec = bethe_vector(fam, sol, p, space)
    report = Report()
    sing = space.singular_residuals(vec)
    report.add("bethe vector singular", not sing)
    for i in range(fam.n):
        lhs = space.apply_matrix(space.hamiltonian(i, sol.x), vec)
        lam = sol.eigenvalues[i]
        rhs = {e: c * lam % p for e, c in vec.items() if c * lam % p}
        diff = {basis_label(e): (lhs.get(e, 0) - rhs.get(e, 0)) % p
                for e in set(lhs) | set(rhs) if (lhs.get(e, 0) - rhs.get(e, 0)) % p}
        report.add(f"eigen K_{i + 1}", not diff, "" if not diff else f"residual {diff}")
    return report


def verify_orthogonality(fam: ArrangementFamily, sols: Sequence[BetheSolution], p: int,
                         space: FlagSpace | None = None) -> Report:
    space = space or FlagSpace(fam, p)
    vecs = [bethe_vector(fam, s, p, space) for s in sols]
    report = Report()
    for (s0, v0), (s1, v1) in combinations(zip(sols, vecs), 2):
        val = space.contravariant(v0, v1)
        report.add(f"S(F(t={list(s0.t0)}), F(t={list(s1.t0)})) = 0", val == 0,
                   "" if val == 0 else f"pairing {val}")
    return report


def self_pairings(fam: ArrangementFamily, sols: Sequence[BetheSolution], p: int,
                  space: FlagSpace | None = None) -> list[int]:
    """S(F, F) for each solution; reported only."""
    space = space or FlagSpace(fam, p)
    return [space.contravariant(v, v) for v in (bethe_vector(fam, s, p, space) for s in sols)]
