"""Families of parallelly transported hyperplanes with integer data.

Hyperplane j is ``f_j = z_j + sum_i b[j][i] t_i``.  Indices are 0-based in
code and 1-based in every serialized document.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Sequence

from .errors import (
    NotPrime, ParseError, RankDeficient, ZeroKappa, ZeroLinearForm, ZeroWeight,
)
from .ffield import is_prime
from .linalg import integer_kernel_vector, rank_int, rank_mod


@dataclass(frozen=True)
class ArrangementFamily:
    b: tuple[tuple[int, ...], ...]
    a: tuple[int, ...]
    kappa: int

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(tuple(int(x) for x in row) for row in self.b))
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        object.__setattr__(self, "kappa", int(self.kappa))

    @property
    def n(self) -> int:
        return len(self.b)

    @property
    def k(self) -> int:
        return len(self.b[0]) if self.b else 0

    @classmethod
    def from_dict(cls, data: dict) -> ArrangementFamily:
        if not isinstance(data, dict):
            raise ParseError("arrangement document must be a JSON object")
        missing = [key for key in ("b", "a", "kappa") if key not in data]
        if missing:
            raise ParseError(f"missing keys: {', '.join(missing)}")
        try:
            fam = cls(b=data["b"], a=data["a"], kappa=data["kappa"])
        except (TypeError, ValueError) as exc:
            raise ParseError(f"malformed arrangement data: {exc}") from None
        if not fam.b or len({len(row) for row in fam.b}) != 1:
            raise ParseError("b must be a non-empty list of rows of equal length")
        if "n" in data and data["n"] != fam.n:
            raise ParseError(f"n={data['n']} but b has {fam.n} rows")
        if "k" in data and data["k"] != fam.k:
            raise ParseError(f"k={data['k']} does not match the row length {fam.k} of b")
        if len(fam.a) != fam.n:
            raise ParseError(f"{len(fam.a)} weights for {fam.n} hyperplanes")
        return fam

    @classmethod
    def load(cls, path: str | Path) -> ArrangementFamily:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {"k": self.k, "n": self.n, "b": [list(r) for r in self.b],
                "a": list(self.a), "kappa": self.kappa}


@dataclass(frozen=True)
class Circuit:
    """Minimal dependent set of rows with its primitive integer relation."""

    indices: tuple[int, ...]
    lambdas: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.indices)

    def coefficient(self, i: int) -> int:
        """lambda_C^i, zero outside the circuit."""
        try:
            return self.lambdas[self.indices.index(i)]
        except ValueError:
            return 0

    def form_at(self, x: Sequence[int], p: int) -> int:
        """[f]_C(x) = sum_i lambda_C^i x_i mod p."""
        return sum(lam * x[i] for i, lam in zip(self.indices, self.lambdas)) % p

    def label(self) -> str:
        return "{" + ",".join(str(i + 1) for i in self.indices) + "}"


def validate_family(fam: ArrangementFamily) -> None:
    if fam.n == 0 or fam.k == 0:
        raise RankDeficient("empty family")
    if any(len(row) != fam.k for row in fam.b):
        raise ValueError("rows of b have unequal length")
    if len(fam.a) != fam.n:
        raise ValueError(f"{len(fam.a)} weights for {fam.n} hyperplanes")
    for j, row in enumerate(fam.b):
        if not any(row):
            raise ZeroLinearForm(f"row {j + 1} of b is zero")
    r = rank_int(fam.b)
    if r != fam.k:
        raise RankDeficient(f"rank of b is {r}, expected k={fam.k}")
    for j, a in enumerate(fam.a):
        if a == 0:
            raise ZeroWeight(f"weight a_{j + 1} is zero")
    if fam.kappa == 0:
        raise ZeroKappa("kappa is zero")


def _rows(fam, subset):
    return [fam.b[j] for j in subset]


def is_independent(fam: ArrangementFamily, subset: Sequence[int]) -> bool:
    return rank_int(_rows(fam, subset)) == len(subset)


def circuits(fam: ArrangementFamily) -> list[Circuit]:
    """All circuits ordered by size, then lexicographically."""
    found: list[Circuit] = []
    found_sets: list[frozenset] = []
    for r in range(2, fam.k + 2):
        for subset in combinations(range(fam.n), r):
            s = frozenset(subset)
            if any(c <= s for c in found_sets):
                continue
            rows = _rows(fam, subset)
            if rank_int(rows) == r - 1:
                found.append(Circuit(subset, tuple(integer_kernel_vector(rows))))
                found_sets.append(s)
    return found


def circuits_mod(fam: ArrangementFamily, p: int) -> list[tuple[int, ...]]:
    """Circuit index sets of the matroid of b reduced mod p."""
    found: list[frozenset] = []
    out = []
    for r in range(1, fam.k + 2):
        for subset in combinations(range(fam.n), r):
            s = frozenset(subset)
            if any(c <= s for c in found):
                continue
            if rank_mod(_rows(fam, subset), p) == r - 1:
                found.append(s)
                out.append(subset)
    return out


@dataclass(frozen=True)
class PrimeCheck:
    good: bool
    p: int
    reason: str = ""
    subset: tuple[int, ...] | None = None

    def __bool__(self):
        return self.good

    def to_dict(self) -> dict:
        d = {"p": self.p, "good": self.good}
        if not self.good:
            d["reason"] = self.reason
            d["certificate"] = [j + 1 for j in self.subset]
        return d


def is_good_prime(fam: ArrangementFamily, p: int) -> PrimeCheck:
    if not is_prime(p):
        raise NotPrime(f"{p} is not a prime")
    for j, row in enumerate(fam.b):
        if all(x % p == 0 for x in row):
            return PrimeCheck(False, p, f"row {j + 1} vanishes mod {p}", (j,))
    for r in range(2, fam.k + 1):
        for subset in combinations(range(fam.n), r):
            rows = _rows(fam, subset)
            over_q = rank_int(rows) == r
            over_p = rank_mod(rows, p) == r
            if over_q != over_p:
                return PrimeCheck(
                    False, p,
                    f"subset independent over Q but dependent mod {p}", subset)
    return PrimeCheck(True, p)


def off_discriminant(circs: Sequence[Circuit], x: Sequence[int], p: int) -> bool:
    return all(c.form_at(x, p) != 0 for c in circs)
