from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import linear_ext_blossom, symmetric_blossom
from polarform import (
    BlossomQuery,
    DegreeError,
    DomainError,
    HomPoint,
    OrderError,
    PiElement,
    ResourceError,
    UnsupportedOperationError,
    check_axioms,
    evaluate,
    ext_blossom_neg,
    ext_blossom_pos,
    ext_blossom_scaled,
    hom_blossom,
    make_preset,
    tau_spread,
)
from polarform.blossom import (
    ext_neg_functional,
    ext_pos_functional,
    ext_scaled_functional,
    hom_functional,
    pi_function_evaluand,
)
from polarform.pi_space import constant

UNITAL = ("polynomial", "unital_sine", "unital_tanh", "unital_muntz")
EXACT = make_preset("polynomial", exact=True)
F = Fraction

frac = st.fractions(min_value=-4, max_value=4, max_denominator=5)
slice_pt = st.builds(lambda w: HomPoint(F(1), w), frac)


def pts(*pairs):
    return [HomPoint(F(x), F(w)) for x, w in pairs]


# -- homogeneous blossom ----------------------------------------------------


def test_constant_blossom_on_affine_slice():
    one = constant(EXACT, 1)
    assert hom_blossom(one, pts((1, 2), (1, -3), (1, 5))) == 1
    assert hom_blossom(one, []) == 1


def test_constant_blossom_is_linear_off_slice():
    one = constant(EXACT, 1)
    assert hom_blossom(one, pts((2, 2), (3, -3))) == 6


def test_gamma2_blossom_is_w():
    g2 = PiElement.from_coeffs(EXACT, [0, 1])
    assert hom_blossom(g2, pts((F(3, 2), F(-7, 3)))) == F(-7, 3)
    s = make_preset("unital_tanh")
    assert hom_blossom(PiElement.from_coeffs(s, [0, 1]), [HomPoint(0.4, 1.7)]) == pytest.approx(1.7)


def test_square_blossom_example():
    x2 = PiElement.from_coeffs(EXACT, [0, 0, 1])
    assert hom_blossom(x2, pts((1, 2), (1, 3))) == 6
    assert symmetric_blossom([0, 0, 1], [(1, 2), (1, 3)]) == 6


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.integers(-4, 4), min_size=1, max_size=5),
    st.lists(st.tuples(frac, frac), min_size=4, max_size=4),
    frac,
)
def test_matches_symmetric_expansion(coeffs, raw, tau):
    m = len(coeffs) - 1 + int(len(coeffs) < 5)
    points = raw[:m]
    G = PiElement.from_coeffs(EXACT, coeffs)
    got = hom_blossom(G, [HomPoint(x, w) for x, w in points], tau)
    assert got == symmetric_blossom(coeffs, points)


def test_degree_error():
    with pytest.raises(DegreeError):
        hom_blossom(PiElement.from_coeffs(EXACT, [0, 0, 1]), pts((1, 1)))


@pytest.mark.parametrize("kind", UNITAL)
def test_tau_independence(kind):
    exact = kind == "polynomial"
    s = make_preset(kind, exact=exact)
    rng = np.random.default_rng(3)
    a, b = (float(v) for v in s.domain)
    for _ in range(10):
        m = int(rng.integers(1, 6))
        G = PiElement.from_coeffs(s, list(rng.integers(-3, 4, int(rng.integers(1, m + 2)))))
        points = [HomPoint(*(s.scalar(float(v)) for v in rng.uniform(-2, 2, 2))) for _ in range(m)]
        taus = [s.scalar(float(t)) for t in np.linspace(a, b, 10)]
        spread = tau_spread(G, points, taus)
        assert spread == 0 if exact else spread <= 1e-9


@pytest.mark.parametrize("kind", UNITAL)
def test_diagonal_exactness(kind):
    s = make_preset(kind)
    rng = np.random.default_rng(4)
    a, b = s.domain
    for _ in range(100):
        m = int(rng.integers(0, 5))
        G = PiElement.from_coeffs(s, list(rng.uniform(-2, 2, int(rng.integers(1, m + 2)))))
        t = float(rng.uniform(a, b))
        val = hom_blossom(G, [s.curve_point(t)] * m)
        assert abs(val - evaluate(G, t)) <= 1e-10 * max(1.0, abs(val))


# -- positive order ---------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.lists(slice_pt, min_size=1, max_size=5), st.lists(slice_pt, max_size=3))
def test_constant_extended_blossom_is_one(xs, us):
    if len(xs) <= len(us):
        xs, us = us + xs, []
    q = BlossomQuery(xs, us)
    assert ext_blossom_pos(constant(EXACT, 1), q) == 1
    assert ext_blossom_pos(constant(EXACT, 1), q, homogeneous=False) == 1


def test_x_permutation_is_exact():
    G = PiElement.from_coeffs(EXACT, [1, -2, 3])
    xs = pts((1, 2), (2, -1), (F(1, 2), 3), (1, 1))
    us = pts((1, 5))
    base = ext_blossom_pos(G, BlossomQuery(xs, us))
    assert ext_blossom_pos(G, BlossomQuery(xs[::-1], us)) - base == 0


def test_order_and_resource_errors():
    G = PiElement.from_coeffs(EXACT, [0, 0, 1])
    with pytest.raises(OrderError):
        ext_blossom_pos(G, BlossomQuery(pts((1, 1), (1, 2)), pts((1, 3))))
    with pytest.raises(OrderError):
        ext_blossom_pos(G, BlossomQuery(pts((1, 1)), pts((1, 3), (1, 4))))
    big = BlossomQuery(pts(*[(1, i) for i in range(12)]), pts((1, 20), (1, 21)))
    with pytest.raises(ResourceError):
        ext_blossom_pos(G, big, term_cap=100)


def test_cancellation_with_common_point():
    G = PiElement.from_coeffs(EXACT, [2, 1, -1])
    xs, us = pts((1, 2), (2, -1), (1, 3)), []
    y = HomPoint(F(1), F(7, 2))
    base = ext_blossom_pos(G, BlossomQuery(xs, us))
    assert ext_blossom_pos(G, BlossomQuery(xs + [y], us + [y])) == base


def test_literal_form_is_only_affine_off_slice():
    G = PiElement.from_coeffs(EXACT, [1, 2])
    xs, us = pts((1, 2), (1, 3)), pts((1, 5))
    lin = ext_blossom_pos(G, BlossomQuery([xs[0].scale(2), xs[1]], us))
    lit = ext_blossom_pos(G, BlossomQuery([xs[0].scale(2), xs[1]], us), homogeneous=False)
    assert lin == 2 * ext_blossom_pos(G, BlossomQuery(xs, us))
    assert lit != lin


# -- scaled -----------------------------------------------------------------


def test_scaled_with_d_equal_k_is_positive_form():
    G = PiElement.from_coeffs(EXACT, [1, 2, 0, 3])
    q = BlossomQuery(pts((1, F(1, 2)), (1, 2), (F(3, 2), 1), (1, 3), (1, 5)), pts((1, F(7, 3))))
    assert ext_blossom_scaled(G, q, 4) == ext_blossom_pos(G, q)
    assert ext_blossom_scaled(G, q, 3) == ext_blossom_pos(G, q)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(-3, 3),
    st.integers(-3, 3),
    st.lists(slice_pt, min_size=1, max_size=4),
    st.lists(slice_pt, max_size=4),
)
def test_scaled_linear_matches_expansion(c0, c1, xs, us):
    k = len(xs) - len(us)
    if k == 0:
        return
    G = PiElement.from_coeffs(EXACT, [c0, c1])
    q = BlossomQuery(xs, us)
    expect = linear_ext_blossom(c0, c1, [(p.x, p.w) for p in xs], [(p.x, p.w) for p in us])
    assert ext_blossom_scaled(G, q, 1) == expect


def test_scaled_rejects_vanishing_binomial():
    G = PiElement.from_coeffs(EXACT, [1, 1])
    q = BlossomQuery(pts((1, 1), (1, 2)), pts((1, 3), (1, 4)))
    with pytest.raises(UnsupportedOperationError):
        ext_blossom_scaled(G, q, 1)
    q = BlossomQuery(pts((1, 1), (1, 2)), pts((1, 3)))
    with pytest.raises(UnsupportedOperationError):
        ext_blossom_scaled(G, q, 2)


@pytest.mark.parametrize("kind", UNITAL)
def test_scaled_agrees_with_negative_order(kind):
    s = make_preset(kind, exact=kind == "polynomial")
    rng = np.random.default_rng(5)
    a, b = (float(v) for v in s.domain)
    for _ in range(10):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(0, n))
        G = PiElement.from_coeffs(s, [s.scalar(float(v)) for v in rng.integers(-3, 4, 3)])
        xs = [HomPoint(s.scalar(float(u)), s.scalar(float(v))) for u, v in rng.uniform(0.5, 1.5, (m, 2))]
        nodes = [s.scalar(float(t)) for t in np.linspace(a, b, n + 2)[1:-1]]
        q = BlossomQuery.from_nodes(s, xs, nodes)
        neg = ext_blossom_neg(G, q)
        sc = ext_blossom_scaled(G, q, 2)
        assert abs(neg - sc) <= 1e-8 * max(1.0, abs(neg))


# -- negative order ---------------------------------------------------------


def test_negative_hand_oracle():
    H = PiElement.from_coeffs(EXACT, [0, 1])
    e1, e2 = F(1, 3), F(-5, 2)
    assert ext_blossom_neg(H, BlossomQuery.from_nodes(EXACT, [], [e1, e2])) == (e1 + e2) / 2


def test_negative_single_node():
    s = make_preset("unital_sine")
    H = PiElement.from_coeffs(s, [0.3, -1.0, 0.2])
    q = BlossomQuery.from_nodes(s, [], [0.4])
    assert ext_blossom_neg(H, q) == pytest.approx(evaluate(H, 0.4))
    f = pi_function_evaluand(H)
    assert ext_blossom_neg(f, q, path="numeric") == pytest.approx(evaluate(H, 0.4))


@pytest.mark.parametrize("kind", UNITAL)
@pytest.mark.parametrize("path", ("exact", "numeric"))
def test_negative_confluent_diagonal(kind, path):
    s = make_preset(kind)
    rng = np.random.default_rng(6)
    a, b = s.domain
    tol = 1e-8 if path == "exact" else 1e-6
    for _ in range(5):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(0, n))
        H = PiElement.from_coeffs(s, list(rng.uniform(-2, 2, 3)))
        t = float(rng.uniform(a + 0.1 * (b - a), b - 0.1 * (b - a)))
        c = s.curve_point(t)
        q = BlossomQuery([c] * m, [c] * n, [t] * n)
        val = ext_blossom_neg(H, q, path=path)
        assert abs(val - evaluate(H, t)) <= tol * max(1.0, abs(val))


@pytest.mark.parametrize("kind", UNITAL)
def test_anchor_independence(kind):
    s = make_preset(kind, exact=kind == "polynomial")
    H = PiElement.from_coeffs(s, [1, -2, 1])
    a, b = (float(v) for v in s.domain)
    nodes = [s.scalar(float(t)) for t in np.linspace(a, b, 6)[1:-1]]
    q = BlossomQuery.from_nodes(s, [HomPoint(s.scalar(1), s.scalar(0.5))], nodes)
    v1 = ext_blossom_neg(H, q, anchor=nodes[0])
    v2 = ext_blossom_neg(H, q, anchor=nodes[-1])
    assert abs(v1 - v2) <= 1e-10 * max(1.0, abs(v1))


def test_negative_order_errors():
    H = PiElement.from_coeffs(EXACT, [1])
    with pytest.raises(ValueError):
        ext_blossom_neg(H, BlossomQuery([], pts((1, 1), (1, 2))))
    with pytest.raises(OrderError):
        ext_blossom_neg(H, BlossomQuery.from_nodes(EXACT, pts((1, 1), (1, 2)), [1]))
    with pytest.raises(ValueError):
        BlossomQuery(pts((1, 1)), pts((1, 2)), (F(5),)).validate(EXACT)
    t = make_preset("trig")
    Ht = PiElement.from_coeffs(t, [1.0, 0.5])
    with pytest.raises(UnsupportedOperationError):
        ext_blossom_neg(Ht, BlossomQuery.from_nodes(t, [], [0.2, 0.5, 0.9]), path="exact")


def test_negative_order_non_unital_numeric():
    t = make_preset("trig")
    H = PiElement.from_coeffs(t, [1.0, 0.5])
    q = BlossomQuery.from_nodes(t, [], [0.4])
    assert ext_blossom_neg(H, q) == pytest.approx(evaluate(H, 0.4))


# -- axiom checker ----------------------------------------------------------


def _all_pass(reports):
    bad = [(r.identity, r.lhs, r.rhs_resolved) for r in reports if not r.passed]
    assert not bad, bad


def test_axioms_hom_polynomial_exact():
    G = PiElement.from_coeffs(EXACT, [1, -1, 2, F(1, 2)])
    reps = check_axioms(hom_functional(G, 4), EXACT, seed=0)
    assert {r.identity.split(":")[1] for r in reps} >= {"x_symmetry", "multilinearity", "diagonal"}
    _all_pass(reps)
    assert all(r.tol == 0 for r in reps)


@pytest.mark.parametrize("kind", UNITAL)
def test_axioms_extended_functionals(kind):
    s = make_preset(kind, exact=kind == "polynomial")
    G = PiElement.from_coeffs(s, [1, 2, -1])
    for seed in range(3):
        _all_pass(check_axioms(ext_pos_functional(G, 5, 2), s, seed))
        _all_pass(check_axioms(ext_scaled_functional(G, 4, 1, 2), s, seed))
        _all_pass(check_axioms(ext_neg_functional(G, 1, 4), s, seed))


@pytest.mark.parametrize("kind", ("trig", "hyperbolic"))
def test_axioms_non_unital_are_reported(kind):
    s = make_preset(kind)
    G = PiElement.from_coeffs(s, [0.5, -1.0, 0.3])
    reps = check_axioms(hom_functional(G, 3), s, seed=1)
    assert reps and all(isinstance(r.passed, bool) for r in reps)


def test_homogenized_form_rejects_u_on_zero_line():
    G = PiElement.from_coeffs(EXACT, [1, 1])
    with pytest.raises(DomainError):
        ext_blossom_pos(G, BlossomQuery(pts((1, 1), (1, 2)), pts((0, 3))))
    assert ext_blossom_pos(G, BlossomQuery(pts((1, 1), (1, 2)), pts((0, 3))), homogeneous=False) is not None
