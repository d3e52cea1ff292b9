import math
from fractions import Fraction

import numpy as np
import pytest

from polarform import (
    PRESETS,
    DomainError,
    GammaSystem,
    HomPoint,
    PresetValidationError,
    SingularSystemError,
    d_fn,
    d_matrix,
    delta_pair,
    make_preset,
    wronskian,
)

UNITAL = ("polynomial", "unital_sine", "unital_tanh", "unital_muntz")


@pytest.mark.parametrize("kind", PRESETS)
def test_every_preset_builds(kind):
    s = make_preset(kind)
    a, b = s.domain
    for t in np.linspace(a, b, 50):
        assert abs(wronskian(s, t)) > 1e-14
    assert s.is_unital == (kind in UNITAL)


def test_polynomial_wronskian_is_one():
    s = make_preset("polynomial")
    assert all(wronskian(s, t) == 1 for t in (-3.0, 0.0, 7.5))


def test_trig_wronskian_is_one():
    s = make_preset("trig", domain=[0, 1.5])
    assert all(abs(wronskian(s, t) - 1) < 1e-15 for t in np.linspace(0, 1.5, 11))


def test_hyperbolic_wronskian_is_one():
    s = make_preset("hyperbolic")
    assert all(abs(wronskian(s, t) - 1) < 1e-13 for t in np.linspace(-2, 2, 11))


def test_unital_muntz_wronskian():
    s = make_preset("unital_muntz", {"q": 2}, domain=[0.5, 2])
    for t in (0.5, 1.0, 1.7):
        assert wronskian(s, t) == pytest.approx(2 * t, rel=1e-14)
    assert wronskian(make_preset("unital_muntz", {"q": 3}), 2) == pytest.approx(12)


def test_d_examples():
    assert d_fn(make_preset("polynomial"), 2, 5) == 3
    assert d_fn(make_preset("trig", domain=[0, 1.6]), 0, math.pi / 2) == pytest.approx(1)
    for kind in PRESETS:
        s = make_preset(kind)
        t = float(np.mean(s.domain))
        assert d_fn(s, t, t) == 0


def test_d_antisymmetry_exact():
    s = make_preset("polynomial", exact=True)
    rng = np.random.default_rng(0)
    for _ in range(1000):
        x1, x2 = (Fraction(int(v), 7) for v in rng.integers(-70, 71, 2))
        assert d_fn(s, x1, x2) + d_fn(s, x2, x1) == 0


@pytest.mark.parametrize("kind", PRESETS)
def test_d_antisymmetry_float(kind):
    s = make_preset(kind)
    rng = np.random.default_rng(1)
    a, b = s.domain
    for x1, x2 in rng.uniform(a, b, (1000, 2)):
        v = d_fn(s, x1, x2)
        assert abs(v + d_fn(s, x2, x1)) <= 1e-15 * max(1.0, abs(v))


def test_d_matrix_matches_d_fn():
    s = make_preset("unital_sine")
    nodes = [-1.0, 0.2, 0.9]
    m = d_matrix(s, nodes)
    for i, x in enumerate(nodes):
        for k, y in enumerate(nodes):
            assert m[i, k] == pytest.approx(d_fn(s, x, y), abs=1e-15)


def test_delta_pair_examples():
    assert delta_pair(make_preset("polynomial"), 3.0) == HomPoint(0.0, 1.0)
    p = delta_pair(make_preset("trig"), 0.0)
    assert (p.x, p.w) == pytest.approx((0.0, 1.0))
    s = make_preset("unital_sine")
    for a in np.linspace(-1.1, 1.1, 10):
        p = delta_pair(s, a)
        # (0, cos a / cos a)
        assert p.x == pytest.approx(0.0, abs=1e-15)
        assert p.w == pytest.approx(math.cos(a) / math.cos(a), abs=1e-15)


@pytest.mark.parametrize("kind", UNITAL)
def test_unital_delta_is_constant(kind):
    s = make_preset(kind)
    c1, c2 = s.unit_coeffs
    rng = np.random.default_rng(2)
    for a in rng.uniform(*s.domain, 10):
        p = delta_pair(s, a)
        assert abs(p.x + c2) <= 1e-12 and abs(p.w - c1) <= 1e-12


@pytest.mark.parametrize("kind", UNITAL)
def test_unit_coefficients_reproduce_one(kind):
    s = make_preset(kind)
    c1, c2 = s.unit_coeffs
    ts = np.linspace(*s.domain, 1000)
    assert np.max(np.abs(c1 * s.gamma1(ts) + c2 * s.gamma2(ts) - 1)) <= 1e-12


@pytest.mark.parametrize(
    "kind, params, domain",
    [
        ("trig", None, [0, 3.2]),
        ("muntz", {"p": 2, "q": 2}, None),
        ("muntz", {"p": 3, "q": 1}, None),
        ("muntz", {"p": 0.5, "q": 1.5}, [0, 1]),
        ("unital_sine", None, [-2, 2]),
        ("nonsense", None, None),
    ],
)
def test_invalid_presets_rejected(kind, params, domain):
    with pytest.raises(PresetValidationError):
        make_preset(kind, params, domain=domain)


def test_exact_mode_only_for_polynomial():
    with pytest.raises(PresetValidationError):
        make_preset("unital_sine", exact=True)


def test_domain_errors():
    s = make_preset("polynomial")
    with pytest.raises(DomainError):
        d_fn(s, 0, 11)
    with pytest.raises(DomainError):
        wronskian(s, -10.5)


def test_singular_wronskian_detected():
    s = make_preset("polynomial")
    bad = GammaSystem(
        name="degenerate",
        params={},
        domain=(0.0, 1.0),
        gamma1=lambda t: 1.0 + 0 * t,
        gamma2=lambda t: 2.0 + 0 * t,
        gamma1_prime=lambda t: 0.0 * t,
        gamma2_prime=lambda t: 0.0 * t,
        unit_coeffs=None,
        d_rule=None,
        derivative_rule=None,
        exact=False,
    )
    with pytest.raises(SingularSystemError):
        wronskian(bad, 0.5)
    assert s != bad


@pytest.mark.parametrize("kind", PRESETS)
def test_json_round_trip(kind):
    s = make_preset(kind)
    back = GammaSystem.from_json(s.to_json())
    assert back == s
    assert back.to_json() == s.to_json()


def test_json_round_trip_exact():
    s = make_preset("polynomial", domain=["-1/3", 2], exact=True)
    back = GammaSystem.from_json(s.to_json())
    assert back.domain == (Fraction(-1, 3), Fraction(2))
    assert back.exact
