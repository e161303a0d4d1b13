import itertools
import json
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given, strategies as st

from parhyp import EXAMPLES, load_example
from parhyp.arrangement import (
    ArrangementFamily, circuits, circuits_mod, is_good_prime, off_discriminant, validate_family,
)
from parhyp.errors import (
    NotPrime, ParseError, RankDeficient, ZeroKappa, ZeroLinearForm, ZeroWeight,
)
from parhyp.linalg import rank_int


def fam_of(b, a=None, kappa=2):
    return ArrangementFamily(b, a or [-1] * len(b), kappa)


def test_bundled_examples_validate():
    for name in EXAMPLES:
        validate_family(load_example(name))


def test_validate_errors():
    with pytest.raises(ZeroLinearForm):
        validate_family(fam_of([[1], [0], [1]]))
    with pytest.raises(RankDeficient):
        validate_family(fam_of([[1, 0], [1, 0], [2, 0]]))
    with pytest.raises(ZeroWeight):
        validate_family(fam_of([[1], [1]], [1, 0]))
    with pytest.raises(ZeroKappa):
        validate_family(fam_of([[1], [1]], kappa=0))


def test_parse_round_trip(tmp_path):
    fam = load_example("example-k2n4")
    path = tmp_path / "f.json"
    path.write_text(json.dumps(fam.to_dict()))
    assert ArrangementFamily.load(path) == fam
    path.write_text("{not json")
    with pytest.raises(ParseError):
        ArrangementFamily.load(path)
    with pytest.raises(ParseError):
        ArrangementFamily.from_dict({"b": [[1]], "a": [1, 2], "kappa": 2})


def test_circuits_k1():
    cs = circuits(load_example("example-k1n3"))
    assert [c.indices for c in cs] == [(0, 1), (0, 2), (1, 2)]
    assert all(c.lambdas == (1, -1) for c in cs)
    # the circuit form at x is x_i - x_j
    assert cs[0].form_at((4, 1, 0), 7) == 3
    assert cs[0].label() == "{1,2}"


def test_circuits_independent_rows():
    assert circuits(fam_of([[1, 0], [0, 1]])) == []


def test_circuits_k2n4():
    cs = circuits(load_example("example-k2n4"))
    assert len(cs) == 4 and all(c.size == 3 for c in cs)
    assert cs[0].indices == (0, 1, 2)
    assert cs[0].lambdas == (1, 1, -1)
    assert cs[0].coefficient(2) == -1 and cs[0].coefficient(3) == 0


def test_circuits_mixed_sizes():
    # parallel rows give a size-2 circuit, which blocks supersets
    fam = fam_of([[1, 0], [2, 0], [0, 1], [1, 1]])
    cs = circuits(fam)
    assert cs[0].indices == (0, 1) and cs[0].lambdas == (2, -1)
    assert all(not set(cs[0].indices) <= set(c.indices) for c in cs[1:])


@st.composite
def families(draw, k=None):
    k = k or draw(st.integers(1, 3))
    n = draw(st.integers(k, k + 3))
    rows = draw(st.lists(st.lists(st.integers(-3, 3), min_size=k, max_size=k),
                         min_size=n, max_size=n))
    assume(all(any(r) for r in rows) and rank_int(rows) == k)
    return fam_of(rows)


@given(families())
def test_circuit_invariants(fam):
    cs = circuits(fam)
    for c in cs:
        rows = [fam.b[i] for i in c.indices]
        assert all(sum(l * r[t] for l, r in zip(c.lambdas, rows)) == 0 for t in range(fam.k))
        assert all(c.lambdas)
        assert sympy.igcd(*c.lambdas) == 1 and c.lambdas[0] > 0
        # minimal: every proper subset is independent
        assert rank_int(rows) == len(rows) - 1
    sets = [set(c.indices) for c in cs]
    assert not any(s < t for s in sets for t in sets)


@given(families())
def test_circuits_are_exactly_minimal_dependent_sets(fam):
    found = {c.indices for c in circuits(fam)}
    expected = set()
    for r in range(1, fam.k + 2):
        for sub in itertools.combinations(range(fam.n), r):
            if rank_int([fam.b[i] for i in sub]) < r and not any(set(e) < set(sub) for e in expected):
                expected.add(sub)
    assert found == expected


@given(families(), st.sampled_from([2, 3, 5, 7, 11]))
def test_good_prime_preserves_circuits(fam, p):
    check = is_good_prime(fam, p)
    if check:
        assert circuits_mod(fam, p) == [c.indices for c in circuits(fam)]
    else:
        sub = check.subset
        rows = [fam.b[i] for i in sub]
        from parhyp.linalg import rank_mod
        assert rank_mod(rows, p) < rank_int(rows) or not any(x % p for x in rows[0])


def test_good_prime_examples():
    check = is_good_prime(fam_of([[1], [1], [2]]), 2)
    assert not check and check.subset == (2,)
    assert check.to_dict()["certificate"] == [3]
    assert is_good_prime(load_example("example-k1n3"), 5)
    k2 = load_example("example-k2n4")
    check = is_good_prime(k2, 2)
    assert not check
    assert check.to_dict() == {"p": 2, "good": False, "certificate": [3, 4],
                               "reason": check.reason}
    assert is_good_prime(k2, 5)
    assert is_good_prime(k2, 5).to_dict() == {"p": 5, "good": True}


def test_good_prime_rejects_composite():
    with pytest.raises(NotPrime):
        is_good_prime(load_example("example-k1n3"), 9)


def test_off_discriminant_examples():
    cs = circuits(load_example("example-k1n3"))
    assert off_discriminant(cs, (0, 1, 2), 5)
    assert not off_discriminant(cs, (1, 1, 0), 5)
    good = sum(off_discriminant(cs, x, 7) for x in itertools.product(range(7), repeat=3))
    assert Fraction(good, 7 ** 3) == Fraction(7 * 6 * 5, 343)


def test_off_discriminant_permutation_invariant():
    fam = load_example("example-k2n5")
    rng = random.Random(3)
    perm = [2, 0, 4, 1, 3]
    pfam = fam_of([fam.b[j] for j in perm])
    cs, pcs = circuits(fam), circuits(pfam)
    for _ in range(200):
        x = [rng.randrange(7) for _ in range(5)]
        assert off_discriminant(cs, x, 7) == off_discriminant(pcs, [x[j] for j in perm], 7)
