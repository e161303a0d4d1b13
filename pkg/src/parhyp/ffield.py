"""Prime field arithmetic and sparse multivariate polynomials over F_p.

Field elements are plain Python ints kept in ``range(p)``; the modulus travels
with the :class:`Ring` a polynomial belongs to.  A :class:`Poly` is a map from
exponent tuples to nonzero residues, so the zero polynomial has no terms.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import NotPrime, VariableMismatch, ZeroInverse

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, int) or not is_prime(p):
        raise NotPrime(f"{p!r} is not a prime")
    return p


def fp_inv(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroInverse(f"0 has no inverse modulo {p}")
    return pow(a, -1, p)


@dataclass(frozen=True)
class Ring:
    """Polynomial ring F_p[names...]; variable order is the exponent order."""

    p: int
    names: tuple[str, ...]

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise VariableMismatch(f"{name!r} is not a variable of {self}") from None

    def zero(self) -> Poly:
        return Poly(self, {})

    def one(self) -> Poly:
        return self.const(1)

    def const(self, c: int) -> Poly:
        return Poly(self, {(0,) * self.nvars: c})

    def var(self, name: str) -> Poly:
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return Poly(self, {tuple(e): 1})

    def linear(self, const: int, coeffs: Mapping[str, int]) -> Poly:
        """const + sum coeffs[name] * name."""
        terms = {(0,) * self.nvars: const}
        for name, c in coeffs.items():
            e = [0] * self.nvars
            e[self.index(name)] = 1
            terms[tuple(e)] = terms.get(tuple(e), 0) + c
        return Poly(self, terms)

    def subring(self, names: Iterable[str]) -> Ring:
        names = tuple(names)
        for name in names:
            self.index(name)
        return Ring(self.p, names)

    def __str__(self):
        return f"F_{self.p}[{', '.join(self.names)}]"


def zt_ring(p: int, n: int, k: int) -> Ring:
    """The shared context: z_1..z_n then t_1..t_k."""
    return Ring(p, tuple(f"z{i + 1}" for i in range(n)) + tuple(f"t{i + 1}" for i in range(k)))


def z_ring(p: int, n: int) -> Ring:
    return Ring(p, tuple(f"z{i + 1}" for i in range(n)))


def t_ring(p: int, k: int) -> Ring:
    return Ring(p, tuple(f"t{i + 1}" for i in range(k)))


def _grlex_key(exp):
    return (sum(exp), exp)


class Poly:
    """Immutable sparse polynomial over F_p in canonical form."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: Mapping[tuple, int] = ()):
        p = ring.p
        clean = {}
        for exp, c in dict(terms).items():
            exp = tuple(exp)
            if len(exp) != ring.nvars:
                raise VariableMismatch(f"exponent {exp} has wrong length for {ring}")
            c %= p
            if c:
                clean[exp] = c
        self.ring = ring
        self.terms = clean

    @classmethod
    def _raw(cls, ring, terms):
        # terms already reduced and free of zeros
        obj = cls.__new__(cls)
        obj.ring = ring
        obj.terms = terms
        return obj

    # -- basic protocol ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __len__(self):
        return len(self.terms)

    def sorted_terms(self):
        """Terms in descending graded-lex order."""
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def __repr__(self):
        if not self.terms:
            return "0"
        out = []
        for exp, c in self.sorted_terms():
            mono = "*".join(
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(self.ring.names, exp) if e
            )
            if not mono:
                out.append(str(c))
            elif c == 1:
                out.append(mono)
            else:
                out.append(f"{c}*{mono}")
        return " + ".join(out)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree(self, name: str) -> int:
        i = self.ring.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def constant(self) -> int:
        return self.terms.get((0,) * self.ring.nvars, 0)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise VariableMismatch(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, np.integer)):
            return self.ring.const(int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.ring.p
        out = dict(self.terms)
        for exp, c in other.terms.items():
            v = (out.get(exp, 0) + c) % p
            if v:
                out[exp] = v
            else:
                out.pop(exp, None)
        return Poly._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return Poly._raw(self.ring, {e: p - c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: int) -> Poly:
        c %= self.ring.p
        if c == 0:
            return self.ring.zero()
        p = self.ring.p
        return Poly._raw(self.ring, {e: v * c % p for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return self.scale(int(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.mul(other)

    __rmul__ = __mul__

    def mul(self, other: Poly, cap: Sequence[int | None] | None = None,
            floor: Sequence[int | None] | None = None) -> Poly:
        """Product, optionally dropping every term whose exponent in some
        variable exceeds ``cap`` or falls below ``floor`` there (``None``
        entries are unbounded)."""
        other = self._coerce(other)
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        acc: dict[tuple, int] = {}
        if cap is None and floor is None:
            for e2, c2 in b.items():
                for e1, c1 in a.items():
                    e = tuple(x + y for x, y in zip(e1, e2))
                    acc[e] = acc.get(e, 0) + c1 * c2
        else:
            upper = [(i, m) for i, m in enumerate(cap or ()) if m is not None]
            lower = [(i, m) for i, m in enumerate(floor or ()) if m is not None and m > 0]
            for e2, c2 in b.items():
                for e1, c1 in a.items():
                    if any(e1[i] + e2[i] > m for i, m in upper):
                        continue
                    if any(e1[i] + e2[i] < m for i, m in lower):
                        continue
                    e = tuple(x + y for x, y in zip(e1, e2))
                    acc[e] = acc.get(e, 0) + c1 * c2
        return Poly(self.ring, acc)

    def __pow__(self, e: int) -> Poly:
        return self.pow(e)

    def pow(self, e: int, cap=None) -> Poly:
        if e < 0:
            raise ValueError("negative exponent")
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result.mul(base, cap)
            e >>= 1
            if e:
                base = base.mul(base, cap)
        return result

    # -- calculus and substitution ----------------------------------------

    def partial(self, name: str) -> Poly:
        i = self.ring.index(name)
        out = {}
        for exp, c in self.terms.items():
            if exp[i]:
                e = list(exp)
                e[i] -= 1
                out[tuple(e)] = c * exp[i]
        return Poly(self.ring, out)

    def shift(self, q: Mapping[str, int]) -> Poly:
        """Substitute name <- name + q[name] for each given variable."""
        p = self.ring.p
        current = self.terms
        for name, qv in q.items():
            i = self.ring.index(name)
            qv %= p
            if qv == 0:
                continue
            out: dict[tuple, int] = {}
            for exp, c in current.items():
                d = exp[i]
                qpow = 1
                # (x + q)^d = sum_m C(d, m) q^(d-m) x^m, walking m downward
                for m in range(d, -1, -1):
                    e = exp[:i] + (m,) + exp[i + 1:]
                    out[e] = (out.get(e, 0) + c * comb(d, m) * qpow) % p
                    qpow = qpow * qv % p
            current = {e: c for e, c in out.items() if c}
        return Poly._raw(self.ring, dict(current))

    def coeff(self, exps: Mapping[str, int]) -> Poly:
        """Coefficient of prod name^exps[name], as a polynomial in the
        remaining variables."""
        idx = {self.ring.index(name): e for name, e in exps.items()}
        keep = [i for i in range(self.ring.nvars) if i not in idx]
        ring = Ring(self.ring.p, tuple(self.ring.names[i] for i in keep))
        out = {}
        for exp, c in self.terms.items():
            if all(exp[i] == e for i, e in idx.items()):
                out[tuple(exp[i] for i in keep)] = c
        return Poly._raw(ring, out)

    def specialize(self, values: Mapping[str, int]) -> Poly:
        """Substitute field values for some variables."""
        p = self.ring.p
        idx = {self.ring.index(name): v % p for name, v in values.items()}
        keep = [i for i in range(self.ring.nvars) if i not in idx]
        ring = Ring(p, tuple(self.ring.names[i] for i in keep))
        out: dict[tuple, int] = {}
        for exp, c in self.terms.items():
            for i, v in idx.items():
                c = c * pow(v, exp[i], p) % p
            if c:
                e = tuple(exp[i] for i in keep)
                out[e] = (out.get(e, 0) + c) % p
        return Poly(ring, out)

    def embed(self, ring: Ring) -> Poly:
        """Reinterpret in a ring whose variables include all of ours."""
        pos = [ring.index(name) for name in self.ring.names]
        out = {}
        for exp, c in self.terms.items():
            e = [0] * ring.nvars
            for j, x in zip(pos, exp):
                e[j] = x
            out[tuple(e)] = c
        return Poly(ring, out)

    def __call__(self, point: Sequence[int]) -> int:
        p = self.ring.p
        if len(point) != self.ring.nvars:
            raise VariableMismatch(f"point of length {len(point)} for {self.ring}")
        total = 0
        for exp, c in self.terms.items():
            for x, e in zip(point, exp):
                if e:
                    c = c * pow(x, e, p) % p
            total += c
        return total % p

    def evaluate_many(self, points) -> np.ndarray:
        """Vectorized evaluation at the rows of an integer array."""
        p = self.ring.p
        pts = np.asarray(points, dtype=np.int64) % p
        if pts.ndim != 2 or pts.shape[1] != self.ring.nvars:
            raise VariableMismatch(f"points of shape {pts.shape} for {self.ring}")
        if not self.terms:
            return np.zeros(len(pts), dtype=np.int64)
        exps = np.array(list(self.terms.keys()), dtype=np.int64).reshape(len(self.terms), -1)
        coeffs = np.array(list(self.terms.values()), dtype=np.int64)
        maxdeg = int(exps.max()) if exps.size else 0
        table = np.ones((p, maxdeg + 1), dtype=np.int64)
        for e in range(1, maxdeg + 1):
            table[:, e] = table[:, e - 1] * np.arange(p) % p
        out = np.empty(len(pts), dtype=np.int64)
        chunk = max(1, 2_000_000 // len(coeffs))
        for start in range(0, len(pts), chunk):
            block = pts[start:start + chunk]
            acc = np.broadcast_to(coeffs, (len(block), len(coeffs))).copy()
            for v in range(self.ring.nvars):
                acc = acc * table[block[:, v][:, None], exps[:, v][None, :]] % p
            out[start:start + chunk] = acc.sum(axis=1) % p
        return out

    # -- serialization ----------------------------------------------------

    def to_json(self) -> list[dict]:
        return [{"exp": list(e), "coeff": c} for e, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, ring: Ring, data: Iterable[Mapping]) -> Poly:
        terms: dict[tuple, int] = {}
        for item in data:
            e = tuple(int(x) for x in item["exp"])
            terms[e] = terms.get(e, 0) + int(item["coeff"])
        return cls(ring, terms)
