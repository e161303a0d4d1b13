import json

import pytest
import sympy
from hypothesis import assume, given, settings, strategies as st

from parhyp import load_example
from parhyp.arrangement import ArrangementFamily, is_good_prime
from parhyp.errors import ExponentUnderflow, KappaNotInvertible, VerificationFailed
from parhyp.ffield import Poly, z_ring, zt_ring
from parhyp.flagspace import FlagSpace, determinant
from parhyp.gaussmanin import (
    SolutionVector, check_exponents, choose_exponents, master_polynomial, module_closure_check,
    observed_rank, solution_vector, taylor_coefficient, verify_solution,
)
from parhyp.linalg import rank_int

K3N5 = ArrangementFamily([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [1, -1, 0]], [1] * 5, 2)
K2MIXED = ArrangementFamily([[1, 0], [0, 1], [1, 1], [1, 2]], [1, -1, 3, 1], 2)
K2N4POS = ArrangementFamily([[1, 0], [0, 1], [1, 1], [1, -1]], [1] * 4, 2)
K1MIXED = ArrangementFamily([[1], [2], [1], [3]], [1, -1, 2, 1], 3)


def taylor_oracle(fam, A, e, q, degrees, p):
    """Dense sympy expansion over GF(p) of d_e prod f_j^(A_j - [j in e]) at t = q."""
    zs = sympy.symbols(f"z1:{fam.n + 1}")
    ts = sympy.symbols(f"t1:{fam.k + 1}")
    gens = (*ts, *zs)
    prod = sympy.Poly(determinant(fam, e), *gens, modulus=p)
    for j, row in enumerate(fam.b):
        form = zs[j] + sum(b * (t + qi) for b, t, qi in zip(row, ts, q))
        prod = prod * sympy.Poly(form, *gens, modulus=p) ** (A[j] - (j in e))
    out = {}
    for mono, c in prod.terms():
        if tuple(mono[:fam.k]) == tuple(degrees) and int(c) % p:
            out[tuple(mono[fam.k:])] = int(c) % p
    return Poly(z_ring(p, fam.n), out)


def test_choose_exponents_examples():
    fam = load_example("example-k1n3")
    assert choose_exponents(fam, 7) == (3, 3, 3)
    assert choose_exponents(ArrangementFamily([[1], [1]], [2, 2], 2), 7) == (1, 1)
    assert choose_exponents(load_example("example-kappa3"), 7) == (4, 4, 4)
    with pytest.raises(KappaNotInvertible):
        choose_exponents(ArrangementFamily([[1], [1]], [1, 1], 5), 5)


def test_check_exponents():
    fam = load_example("example-k1n3")
    check_exponents(fam, (3, 3, 10), 7)
    with pytest.raises(ValueError):
        check_exponents(fam, (3, 3, 4), 7)
    with pytest.raises(ValueError):
        check_exponents(fam, (3, 3), 7)


def test_exponent_zero_underflows():
    fam = ArrangementFamily([[1], [1]], [0 + 7, -1], 2)
    with pytest.raises(ExponentUnderflow):
        taylor_coefficient(fam, (0, 3), (0,), (0,), (6,), 7)


def test_master_polynomial_examples():
    fam = ArrangementFamily([[1], [1]], [1, 1], 1)
    r = zt_ring(5, 2, 1)
    z1, z2, t = r.var("z1"), r.var("z2"), r.var("t1")
    assert master_polynomial(fam, (1, 1), 5) == t * t + (z1 + z2) * t + z1 * z2
    assert master_polynomial(fam, (0, 0), 5) == 1
    k1n3 = load_example("example-k1n3")
    phi = master_polynomial(k1n3, (3, 3, 3), 7)
    assert phi.total_degree() == 9
    assert phi((1, 2, 3, 5)) == (6 * 7 * 8) ** 3 % 7


def test_k1n3_p5_frozen():
    sol = solution_vector(load_example("example-k1n3"), 5)
    r = z_ring(5, 3)
    z1, z2, z3 = (r.var(f"z{i}") for i in (1, 2, 3))
    assert sol.A == (2, 2, 2) and sol.q == (0,) and sol.l == (1,)
    assert sol.coords == {(0,): z1 + 2 * z2 + 2 * z3,
                          (1,): 2 * z1 + z2 + 2 * z3,
                          (2,): 2 * z1 + 2 * z2 + z3}


def test_k2n4_solution_vanishes():
    # every factor split gives t-degree 2p - 4 < 2(p - 1)
    for p in (5, 7, 11):
        assert solution_vector(load_example("example-k2n4"), p).coords == {}


def test_degree_shortfall_is_zero():
    fam = load_example("example-k1n3")
    assert solution_vector(fam, 5, l=(3,)).coords == {}


@pytest.mark.parametrize("fam,p,q,l", [
    (load_example("example-k2n5"), 5, (0, 0), (1, 1)),
    (load_example("example-k2n5"), 5, (2, 3), (1, 1)),
    (load_example("example-k2n4"), 5, (1, 1), (1, 1)),
    (K2MIXED, 5, (1, 4), (1, 1)),
    (K1MIXED, 5, (2,), (2,)),
    (K3N5, 5, (0, 1, 2), (1, 1, 1)),
])
def test_solution_matches_dense_oracle(fam, p, q, l):
    sol = solution_vector(fam, p, q=q, l=l)
    degrees = [li * p - 1 for li in l]
    for e in FlagSpace(fam, p).basis:
        expected = taylor_oracle(fam, sol.A, e, q, degrees, p)
        assert sol.coords.get(e, z_ring(p, fam.n).zero()) == expected, e


def test_verify_examples(k1n3):
    assert verify_solution(k1n3, {}, 5).ok
    sol = solution_vector(k1n3, 5)
    rep = verify_solution(k1n3, sol, 5)
    assert rep.ok
    assert [c.name for c in rep.checks] == ["singular", "gauss-manin z1", "gauss-manin z2",
                                            "gauss-manin z3"]
    bumped = dict(sol.coords)
    bumped[(0,)] = bumped[(0,)] + 1
    bad = verify_solution(k1n3, bumped, 5)
    assert not bad.ok
    with pytest.raises(VerificationFailed) as info:
        bad.require()
    assert "singular" in str(info.value)


def test_gauss_manin_residual_detected_when_singular_holds(k1n3):
    # a singular but non-solution vector: constants (1, -1, 0)
    r = z_ring(5, 3)
    rep = verify_solution(k1n3, {(0,): r.const(1), (1,): r.const(4)}, 5)
    assert rep.checks[0].ok and not rep.ok
    assert "coordinate" in rep.first_failure().detail


@pytest.mark.parametrize("name,p", [("example-k1n3", 7), ("example-k2n5", 5)])
def test_sampled_mode(name, p):
    fam = load_example(name)
    sol = solution_vector(fam, p)
    assert verify_solution(fam, sol, p, mode="sampled", seed=1).ok
    e = next(iter(sol.coords))
    scaled = dict(sol.coords)
    scaled[e] = scaled[e] * z_ring(p, fam.n).var("z1")
    assert not verify_solution(fam, scaled, p, mode="sampled", seed=1).ok
    with pytest.raises(ValueError):
        verify_solution(fam, sol, p, mode="numeric")


@pytest.mark.parametrize("fam,p", [
    (load_example("example-k1n3"), 13), (load_example("example-k1n4"), 7),
    (load_example("example-kappa3"), 7), (load_example("example-k2n5"), 7),
    (K3N5, 5), (K2MIXED, 7), (K2N4POS, 5), (K1MIXED, 7),
])
def test_main_theorem_families(fam, p):
    space = FlagSpace(fam, p)
    for q in [(0,) * fam.k, tuple(range(1, fam.k + 1))]:
        for l in [(1,) * fam.k, (2,) + (1,) * (fam.k - 1)]:
            sol = solution_vector(fam, p, q=q, l=l, space=space)
            assert verify_solution(fam, sol, p, space=space).ok, (q, l)


def test_exponent_shift_by_p(k1n3):
    p = 5
    A = tuple(a + p for a in choose_exponents(k1n3, p))
    sol = solution_vector(k1n3, p, A=A)
    assert sol.coords
    assert verify_solution(k1n3, sol, p).ok


@st.composite
def random_family(draw):
    k = draw(st.integers(1, 2))
    n = draw(st.integers(k + 1, k + 2))
    rows = draw(st.lists(st.lists(st.integers(-2, 2), min_size=k, max_size=k), min_size=n, max_size=n))
    assume(all(any(r) for r in rows) and rank_int(rows) == k)
    a = draw(st.lists(st.integers(-3, 3).filter(bool), min_size=n, max_size=n))
    kappa = draw(st.sampled_from([1, 2, 3]))
    return ArrangementFamily(rows, a, kappa)


@settings(max_examples=40)
@given(random_family(), st.sampled_from([5, 7]), st.data())
def test_main_theorem_property(fam, p, data):
    assume(is_good_prime(fam, p) and fam.kappa % p)
    assume(all(a % p for a in fam.a))
    q = tuple(data.draw(st.lists(st.integers(0, p - 1), min_size=fam.k, max_size=fam.k)))
    l = tuple(data.draw(st.lists(st.integers(1, 2), min_size=fam.k, max_size=fam.k)))
    sol = solution_vector(fam, p, q=q, l=l)
    assert verify_solution(fam, sol, p).ok


def test_module_closure(k1n3):
    p = 5
    sol = solution_vector(k1n3, p)
    assert module_closure_check(k1n3, sol, p).ok
    assert module_closure_check(k1n3, sol, p, multiplier_exp=0).ok
    rep = module_closure_check(k1n3, sol, p, multiplier_exp=1)
    assert not rep.ok


def test_solution_document_round_trip(k2n5):
    sol = solution_vector(k2n5, 7, q=(1, 2))
    doc = json.loads(json.dumps(sol.to_dict()))
    assert set(doc) == {"A", "q", "l", "solution"}
    assert "1,2" in doc["solution"]
    back = SolutionVector.from_dict(doc, k2n5, 7)
    assert back.coords == sol.coords and back.q == (1, 2)
    assert json.dumps(back.to_dict(), sort_keys=True) == json.dumps(sol.to_dict(), sort_keys=True)


def test_evaluate(k1n3):
    sol = solution_vector(k1n3, 5)
    assert sol.evaluate((1, 0, 0)) == {(0,): 1, (1,): 2, (2,): 2}


def test_observed_rank(k1n3):
    space = FlagSpace(k1n3, 7)
    sols = [solution_vector(k1n3, 7, q=(q,), space=space) for q in (0, 1, 2)]
    assert 1 <= observed_rank(sols, space) <= 3
    assert observed_rank([solution_vector(load_example("example-k2n4"), 7)],
                         FlagSpace(load_example("example-k2n4"), 7)) == 0
