"""The flag space V over F_p in its standard basis.

Basis elements are sorted tuples of 0-based hyperplane indices.  A flag
vector is a plain dict from basis tuple to an int residue or a Poly; absent
keys are zero coordinates.

All permutation signs go through :func:`sort_with_sign`.
"""
from __future__ import annotations

from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .arrangement import ArrangementFamily, Circuit, circuits, is_independent
from .errors import OnDiscriminant
from .ffield import fp_inv
from .linalg import det_int, nullspace_mod

FlagVector = dict


def sort_with_sign(tup: Sequence[int]) -> tuple[tuple[int, ...] | None, int]:
    """Return (sorted tuple, parity sign); (None, 0) on a repeated index."""
    if len(set(tup)) != len(tup):
        return None, 0
    inversions = sum(1 for i in range(len(tup)) for j in range(i + 1, len(tup)) if tup[i] > tup[j])
    return tuple(sorted(tup)), (-1) ** inversions


def basis_label(e: Sequence[int]) -> str:
    return ",".join(str(j + 1) for j in e)


def parse_basis_label(s: str) -> tuple[int, ...]:
    return tuple(sorted(int(x) - 1 for x in s.split(",")))


def standard_basis(fam: ArrangementFamily) -> list[tuple[int, ...]]:
    return [e for e in combinations(range(fam.n), fam.k) if is_independent(fam, e)]


def determinant(fam: ArrangementFamily, e: Sequence[int]) -> int:
    """d_{j_1..j_k}: determinant of the rows j_1..j_k of b, in that order."""
    return det_int([fam.b[j] for j in e])


class FlagSpace:
    """V_{F_p} for a family and a (good) prime, with its operators."""

    def __init__(self, fam: ArrangementFamily, p: int, circs: list[Circuit] | None = None):
        self.fam = fam
        self.p = p
        self.circuits = circuits(fam) if circs is None else list(circs)
        self.basis = standard_basis(fam)
        self.position = {e: i for i, e in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def weight(self, j: int) -> int:
        return self.fam.a[j] % self.p

    # -- signs and coordinates --------------------------------------------

    def coordinate(self, v: FlagVector, tup: Sequence[int]):
        """I_{tup} under skew symmetry; zero for repeated or dependent tuples."""
        e, sign = sort_with_sign(tup)
        if e is None or e not in self.position:
            return 0
        c = v.get(e, 0)
        return c if sign == 1 else -c

    def signed_terms(self, terms: Iterable[tuple[int, Sequence[int]]]) -> FlagVector:
        """Sum of coeff * F(tup) over (coeff, tuple) pairs, in the standard basis."""
        p = self.p
        out: dict = {}
        for c, tup in terms:
            e, sign = sort_with_sign(tup)
            if e is None:
                continue
            if e not in self.position:
                raise ValueError(f"dependent tuple {basis_label(tup)} produced")
            out[e] = (out.get(e, 0) + sign * c) % p
        return {e: c for e, c in out.items() if c}

    # -- contravariant form and singular vectors --------------------------

    def diagonal(self, e: Sequence[int]) -> int:
        d = 1
        for j in e:
            d = d * self.fam.a[j] % self.p
        return d

    def contravariant(self, u: FlagVector, v: FlagVector):
        total = 0
        for e, ue in u.items():
            ve = v.get(e)
            if ve is not None:
                total = total + ue * ve * self.diagonal(e)
        return total % self.p if isinstance(total, int) else total

    def singular_residuals(self, v: FlagVector) -> dict:
        """Nonzero left-hand sides of the singular-vector equations, keyed
        by the fixed (k-1)-tuple."""
        out = {}
        for rest in combinations(range(self.fam.n), self.fam.k - 1):
            s = 0
            for j in range(self.fam.n):
                c = self.coordinate(v, (j,) + rest)
                if c:
                    s = s + c * self.fam.a[j]
            if isinstance(s, int):
                s %= self.p
            if s:
                out[rest] = s
        return out

    def is_singular(self, v: FlagVector) -> bool:
        return not self.singular_residuals(v)

    def singular_subspace(self) -> list[list[int]]:
        """Basis (as coordinate lists) of Sing V over F_p."""
        rows = []
        for rest in combinations(range(self.fam.n), self.fam.k - 1):
            row = [0] * self.dim
            for j in range(self.fam.n):
                e, sign = sort_with_sign((j,) + rest)
                if e is not None and e in self.position:
                    row[self.position[e]] = (row[self.position[e]] + sign * self.fam.a[j]) % self.p
            if any(row):
                rows.append(row)
        return nullspace_mod(rows, self.dim, self.p)

    # -- circuit operators -------------------------------------------------

    def lc_terms(self, circ: Circuit, e: tuple[int, ...]) -> list[tuple[int, tuple[int, ...]]]:
        """L_C F(e) as unnormalized (coeff, tuple) terms."""
        cs = circ.indices
        r = len(cs)
        inter = [i for i in cs if i in e]
        if len(inter) < r - 1:
            return []
        m = next(pos for pos, i in enumerate(cs, start=1) if i not in e)
        s = tuple(j for j in e if j not in cs)
        head = cs[:m - 1] + cs[m:]
        # F(e) = eps * F(head + s)
        _, eps = sort_with_sign(head + s)
        terms = []
        for l, il in enumerate(cs, start=1):
            coeff = eps * (-1) ** (m + l) * self.fam.a[il]
            terms.append((coeff, cs[:l - 1] + cs[l:] + s))
        return terms

    def apply_LC(self, circ: Circuit, e: tuple[int, ...]) -> FlagVector:
        return self.signed_terms(self.lc_terms(circ, e))

    def lc_matrix(self, circ: Circuit) -> list[list[int]]:
        """Matrix of [L]_C; column of e holds the coordinates of L_C F(e)."""
        return self._lc_matrices[self.circuits.index(circ)]

    @cached_property
    def _lc_matrices(self):
        mats = []
        for circ in self.circuits:
            m = [[0] * self.dim for _ in range(self.dim)]
            for col, e in enumerate(self.basis):
                for f, c in self.apply_LC(circ, e).items():
                    m[self.position[f]][col] = c
            mats.append(m)
        return mats

    def apply_matrix(self, m: list[list[int]], v: FlagVector) -> FlagVector:
        """m @ v for int or Poly coordinates."""
        out = {}
        for row, f in enumerate(self.basis):
            acc = 0
            for col, e in enumerate(self.basis):
                c = m[row][col]
                if c and e in v:
                    acc = acc + v[e] * c
            if isinstance(acc, int):
                acc %= self.p
            if acc:
                out[f] = acc
        return out

    def hamiltonian(self, i: int, x: Sequence[int]) -> list[list[int]]:
        """[K]_i(x) = sum_C [lambda_C^i] / [f]_C(x) * [L]_C."""
        p = self.p
        k = [[0] * self.dim for _ in range(self.dim)]
        for circ, m in zip(self.circuits, self._lc_matrices):
            lam = circ.coefficient(i)
            if lam == 0:
                continue
            fc = circ.form_at(x, p)
            if fc == 0:
                raise OnDiscriminant(f"[f]_C(x) = 0 for circuit {circ.label()}")
            w = lam * fp_inv(fc, p) % p
            for r in range(self.dim):
                row, mrow = k[r], m[r]
                for c in range(self.dim):
                    if mrow[c]:
                        row[c] = (row[c] + w * mrow[c]) % p
        return k

    def is_symmetric(self, m: list[list[int]]) -> bool:
        """S(m x, y) == S(x, m y) on all basis pairs."""
        p = self.p
        diag = [self.diagonal(e) for e in self.basis]
        return all(
            diag[r] * m[r][c] % p == diag[c] * m[c][r] % p
            for r in range(self.dim) for c in range(self.dim)
        )


def matmul_mod(a, b, p):
    n, inner, m = len(a), len(b), len(b[0]) if b else 0
    return [[sum(a[i][t] * b[t][j] for t in range(inner)) % p for j in range(m)] for i in range(n)]


def commutator_on_singular(space: FlagSpace, i: int, j: int, x: Sequence[int]) -> dict:
    """Exploratory: does [K_i(x), K_j(x)] vanish on Sing V, and do K_i, K_j
    preserve Sing V?  Reported, never asserted."""
    p = space.p
    ki, kj = space.hamiltonian(i, x), space.hamiltonian(j, x)
    sing = space.singular_subspace()
    comm = [[(u - v) % p for u, v in zip(r1, r2)]
            for r1, r2 in zip(matmul_mod(ki, kj, p), matmul_mod(kj, ki, p))]

    def as_vec(coords):
        return {e: c for e, c in zip(space.basis, coords) if c % p}

    preserves = all(
        space.is_singular(space.apply_matrix(k, as_vec(v))) for k in (ki, kj) for v in sing
    )
    commutes = all(not space.apply_matrix(comm, as_vec(v)) for v in sing)
    return {"i": i + 1, "j": j + 1, "sing_dim": len(sing),
            "preserves_sing": preserves, "commutes_on_sing": commutes}
