"""Generator pairs (gamma1, gamma2), the kernel d, Wronskian and presets.

A :class:`GammaSystem` fixes the two functions spanning the spaces
``pi_n = span{gamma1^(n-k) gamma2^k}``. The kernel

    d(x1, x2) = gamma1(x1) gamma2(x2) - gamma1(x2) gamma2(x1)

plays the role of ``x2 - x1`` and the generalized derivative is
``D f = f' / W`` with ``W = gamma1 gamma2' - gamma1' gamma2``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Optional

import numpy as np

from .errors import DomainError, PresetValidationError, SingularSystemError

PRESETS = (
    "polynomial",
    "trig",
    "hyperbolic",
    "muntz",
    "unital_sine",
    "unital_tanh",
    "unital_muntz",
)

DEFAULT_DOMAINS = {
    "polynomial": (-10.0, 10.0),
    "trig": (0.0, 1.5),
    "hyperbolic": (-2.0, 2.0),
    "muntz": (0.5, 2.0),
    "unital_sine": (-1.2, 1.2),
    "unital_tanh": (-2.0, 2.0),
    "unital_muntz": (0.5, 2.0),
}

DEFAULT_PARAMS = {
    "muntz": {"p": 1, "q": 2},
    "unital_muntz": {"q": 2},
}

SINGULAR_TOL = 1e-14
_DOMAIN_SLACK = 1e-12
_GRID = 1000


def as_scalar(value, exact: bool):
    """Coerce ``value`` to the scalar type of a mode.

    Exact mode uses :class:`fractions.Fraction`; floats and strings are read
    through their decimal spelling so that ``0.1`` becomes ``1/10``.
    """
    if exact:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (int, np.integer)):
            return Fraction(int(value))
        if isinstance(value, (float, np.floating)):
            return Fraction(repr(float(value)))
        return Fraction(str(value).strip())
    if isinstance(value, str):
        return float(Fraction(value.strip()))
    return float(value)


def format_scalar(value):
    """JSON form of a scalar: rationals as strings, floats as numbers."""
    if value is None:
        return None
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    v = float(value)
    if math.isnan(v) or math.isinf(v):
        return None
    return v


@dataclass(frozen=True)
class HomPoint:
    """Homogeneous blossom argument ``(x, w)``.

    The curve point of a parameter ``t`` is ``(gamma1(t), gamma2(t))``.
    """

    x: Any
    w: Any

    def scale(self, a) -> "HomPoint":
        return HomPoint(a * self.x, a * self.w)

    def __add__(self, other: "HomPoint") -> "HomPoint":
        return HomPoint(self.x + other.x, self.w + other.w)

    def to_json(self):
        return [format_scalar(self.x), format_scalar(self.w)]


@dataclass(frozen=True, eq=False)
class GammaSystem:
    name: str
    params: dict
    domain: tuple
    gamma1: Callable
    gamma2: Callable
    gamma1_prime: Callable
    gamma2_prime: Callable
    unit_coeffs: Optional[tuple] = None
    d_rule: Optional[Callable] = None
    derivative_rule: Optional[str] = None
    exact: bool = False

    # -- identity -------------------------------------------------------
    def key(self):
        return (self.name, tuple(sorted(self.params.items())), tuple(self.domain), self.exact)

    def __eq__(self, other):
        return isinstance(other, GammaSystem) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    # -- scalars --------------------------------------------------------
    @property
    def is_unital(self) -> bool:
        return self.unit_coeffs is not None

    @property
    def mode(self) -> str:
        return "exact" if self.exact else "float"

    def scalar(self, value):
        return as_scalar(value, self.exact)

    def zero(self):
        return Fraction(0) if self.exact else 0.0

    def one(self):
        return Fraction(1) if self.exact else 1.0

    def check_domain(self, t):
        a, b = self.domain
        slack = 0 if self.exact else _DOMAIN_SLACK * max(1.0, abs(float(a)), abs(float(b)))
        tv = t if self.exact else float(t)
        if not (a - slack <= tv <= b + slack):
            raise DomainError(f"{t} outside domain [{a}, {b}] of system {self.name!r}")
        return tv

    # -- evaluation -----------------------------------------------------
    def g1(self, t):
        return self.gamma1(t)

    def g2(self, t):
        return self.gamma2(t)

    def curve_point(self, t) -> HomPoint:
        t = self.check_domain(self.scalar(t))
        return HomPoint(self.gamma1(t), self.gamma2(t))

    def unit_functional(self, p: HomPoint):
        """``c1 x + c2 w``; equals 1 at every curve point of a unital system."""
        if self.unit_coeffs is None:
            raise SingularSystemError(f"system {self.name!r} has no unit coefficients")
        c1, c2 = self.unit_coeffs
        return c1 * p.x + c2 * p.w

    def to_json(self) -> dict:
        a, b = self.domain
        return {
            "preset": self.name,
            "params": dict(self.params),
            "domain": [format_scalar(a), format_scalar(b)],
            "mode": self.mode,
        }

    @classmethod
    def from_json(cls, data) -> "GammaSystem":
        if isinstance(data, str):
            data = json.loads(data)
        exact = data.get("mode", "float") == "exact"
        return make_preset(data["preset"], data.get("params") or {}, domain=data.get("domain"), exact=exact)


# ---------------------------------------------------------------------------
# kernel, Wronskian, delta pair


def d_fn(sys: GammaSystem, x1, x2):
    """``gamma1(x1) gamma2(x2) - gamma1(x2) gamma2(x1)``."""
    x1 = sys.check_domain(sys.scalar(x1))
    x2 = sys.check_domain(sys.scalar(x2))
    if sys.d_rule is not None:
        return sys.d_rule(x1, x2)
    return sys.gamma1(x1) * sys.gamma2(x2) - sys.gamma1(x2) * sys.gamma2(x1)


def d_matrix(sys: GammaSystem, nodes):
    """Matrix ``M[i, k] = d(x_i, x_k)`` for an array of in-domain nodes."""
    arr = np.asarray(nodes, dtype=object if sys.exact else np.float64)
    g1 = sys.gamma1(arr)
    g2 = sys.gamma2(arr)
    if not sys.exact:
        g1 = np.broadcast_to(np.asarray(g1, dtype=np.float64), arr.shape)
        g2 = np.broadcast_to(np.asarray(g2, dtype=np.float64), arr.shape)
    return np.outer(g1, g2) - np.outer(g2, g1)


def _raw_wronskian(sys: GammaSystem, x):
    return sys.gamma1(x) * sys.gamma2_prime(x) - sys.gamma1_prime(x) * sys.gamma2(x)


def wronskian(sys: GammaSystem, x):
    x = sys.check_domain(sys.scalar(x))
    w = _raw_wronskian(sys, x)
    if abs(w) < SINGULAR_TOL:
        raise SingularSystemError(f"Wronskian of {sys.name!r} vanishes at {x!r}")
    return w


def delta_pair(sys: GammaSystem, a) -> HomPoint:
    """``(D gamma1(a), D gamma2(a)) = (gamma1'(a), gamma2'(a)) / W(a)``."""
    a = sys.check_domain(sys.scalar(a))
    w = wronskian(sys, a)
    return HomPoint(sys.gamma1_prime(a) / w, sys.gamma2_prime(a) / w)


# ---------------------------------------------------------------------------
# presets


def _is_integer(v) -> bool:
    return float(v) == int(float(v))


def _const(value):
    return lambda t: t - t + value


def make_preset(kind: str, params: Optional[dict] = None, domain=None, exact: bool = False) -> GammaSystem:
    """Build one of the named generator pairs and validate it on a grid."""
    if kind not in PRESETS:
        raise PresetValidationError(f"unknown preset {kind!r}; expected one of {', '.join(PRESETS)}")
    params = {**DEFAULT_PARAMS.get(kind, {}), **(params or {})}
    if exact and kind != "polynomial":
        raise PresetValidationError("exact mode is only available for the polynomial preset")
    if domain is None:
        domain = DEFAULT_DOMAINS[kind]
    if len(domain) != 2:
        raise PresetValidationError("domain must be a pair [a, b]")
    a, b = (as_scalar(v, exact) for v in domain)
    if not a < b:
        raise PresetValidationError(f"empty domain [{a}, {b}]")
    fa, fb = float(a), float(b)

    unit = None
    d_rule = None
    rule = None
    if kind == "polynomial":
        one = Fraction(1) if exact else 1.0
        zero = Fraction(0) if exact else 0.0
        g1, g2 = _const(one), (lambda t: t)
        g1p, g2p = _const(zero), _const(one)
        unit = (one, zero)
        d_rule = lambda x1, x2: x2 - x1
        rule = "unital"
    elif kind == "trig":
        if fb - fa >= math.pi:
            raise PresetValidationError("trig domain must be shorter than pi so that d never vanishes")
        g1, g2 = np.cos, np.sin
        g1p, g2p = (lambda t: -np.sin(t)), np.cos
        d_rule = lambda x1, x2: np.sin(x2 - x1)
        rule = "trig"
    elif kind == "hyperbolic":
        g1, g2 = np.cosh, np.sinh
        g1p, g2p = np.sinh, np.cosh
        d_rule = lambda x1, x2: np.sinh(x2 - x1)
        rule = "hyperbolic"
    elif kind == "muntz":
        p, q = float(params["p"]), float(params["q"])
        if not q > p:
            raise PresetValidationError(f"muntz needs p < q, got p={p}, q={q}")
        if fa <= 0.0 and not (_is_integer(p) and _is_integer(q)):
            raise PresetValidationError("muntz with non-integer exponents needs a domain inside (0, inf)")
        g1 = lambda t: np.power(t, p)
        g2 = lambda t: np.power(t, q)
        g1p = lambda t: p * np.power(t, p - 1.0) if p != 0 else t - t
        g2p = lambda t: q * np.power(t, q - 1.0)
    elif kind in ("unital_sine", "unital_tanh", "unital_muntz"):
        g1, g1p = _const(1.0), _const(0.0)
        unit = (1.0, 0.0)
        rule = "unital"
        if kind == "unital_sine":
            if fa <= -math.pi / 2 or fb >= math.pi / 2:
                raise PresetValidationError("unital_sine domain must lie inside (-pi/2, pi/2)")
            g2, g2p = np.sin, np.cos
        elif kind == "unital_tanh":
            g2 = np.tanh
            g2p = lambda t: 1.0 / np.cosh(t) ** 2
        else:
            q = float(params["q"])
            if q <= 0:
                raise PresetValidationError(f"unital_muntz needs q > 0, got {q}")
            if fa <= 0.0 and not _is_integer(q):
                raise PresetValidationError("unital_muntz with non-integer q needs a domain inside (0, inf)")
            g2 = lambda t: np.power(t, q)
            g2p = lambda t: q * np.power(t, q - 1.0)
        d_rule = lambda x1, x2, _g=g2: _g(x2) - _g(x1)

    sys = GammaSystem(
        name=kind,
        params=dict(params),
        domain=(a, b),
        gamma1=g1,
        gamma2=g2,
        gamma1_prime=g1p,
        gamma2_prime=g2p,
        unit_coeffs=unit,
        d_rule=d_rule,
        derivative_rule=rule,
        exact=exact,
    )
    _validate(sys)
    return sys


def _validate(sys: GammaSystem):
    fa, fb = float(sys.domain[0]), float(sys.domain[1])
    grid = np.linspace(fa, fb, _GRID)
    g1 = np.broadcast_to(np.asarray(sys.gamma1(grid), dtype=float), grid.shape)
    g2 = np.broadcast_to(np.asarray(sys.gamma2(grid), dtype=float), grid.shape)
    g1p = np.broadcast_to(np.asarray(sys.gamma1_prime(grid), dtype=float), grid.shape)
    g2p = np.broadcast_to(np.asarray(sys.gamma2_prime(grid), dtype=float), grid.shape)
    if not (np.all(np.isfinite(g1)) and np.all(np.isfinite(g2))):
        raise PresetValidationError(f"{sys.name}: generators are not finite on the domain")
    w = g1 * g2p - g1p * g2
    if np.min(np.abs(w)) < SINGULAR_TOL:
        raise PresetValidationError(f"{sys.name}: Wronskian vanishes on the domain")
    if sys.unit_coeffs is not None:
        c1, c2 = (float(c) for c in sys.unit_coeffs)
        if np.max(np.abs(c1 * g1 + c2 * g2 - 1.0)) > 1e-12:
            raise PresetValidationError(f"{sys.name}: unit coefficients do not reproduce 1")
    # d must not vanish for distinct pairs; a coarser grid keeps this O(10^4)
    coarse = np.linspace(fa, fb, 128)
    c1v = np.broadcast_to(np.asarray(sys.gamma1(coarse), dtype=float), coarse.shape)
    c2v = np.broadcast_to(np.asarray(sys.gamma2(coarse), dtype=float), coarse.shape)
    dm = np.outer(c1v, c2v) - np.outer(c2v, c1v)
    off = dm[~np.eye(coarse.size, dtype=bool)]
    if np.min(np.abs(off)) < SINGULAR_TOL:
        raise PresetValidationError(f"{sys.name}: d(x1, x2) vanishes for distinct points of the domain")
