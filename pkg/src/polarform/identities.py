"""Divided-difference / blossom identities with oracle-resolved signs and constants.

Every identity kind computes its left-hand side, the right-hand side in
its stated form, and a list of candidate corrected right-hand sides. The candidate
that is used (``rhs_resolved``) is chosen once per kind on a seeded batch of
polynomial instances in rational arithmetic, where an independent classical
computation supplies the ground truth, and is then applied unchanged to
every other system.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .blossom import (
    BlossomQuery,
    _HomBlossom,
    ext_blossom_neg,
    ext_blossom_pos,
    hom_blossom,
    random_node,
    random_scalar,
)
from .combinatorics import multiset_count, multisets
from .divided_difference import check_cancellation, divdiff
from .errors import DegreeError, OrderError, UnsupportedOperationError
from .gamma_system import GammaSystem, HomPoint, d_fn, delta_pair, format_scalar, make_preset
from .pi_space import PiElement, evaluate, gen_derivative, kernel_element, multiply, power
from .reports import IdentityReport, _close

KINDS = (
    "delta_block",
    "diff_duality",
    "diff_duality_ext",
    "main",
    "cancellation_dd",
    "example2",
    "example3",
)
SUITE_SYSTEMS = (("polynomial", True), ("unital_sine", False), ("unital_tanh", False))
RESOLVE_SEED = 20240101
RESOLVE_COUNT = 100
DEFAULT_TOL = 1e-9


@dataclass
class Evaluation:
    lhs: object
    rhs_paper: object
    candidates: dict  # label -> (value, sign, constant)
    oracle: object = None  # independent lhs, polynomial preset only
    extras: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# classical oracles for the polynomial preset (gamma1 = 1, gamma2 = x)


def classical_value(coeffs, x):
    return sum(c * x**k for k, c in enumerate(coeffs))


def classical_divdiff(coeffs, nodes):
    """Textbook Newton table on distinct nodes."""
    col = [classical_value(coeffs, x) for x in nodes]
    for k in range(1, len(nodes)):
        col = [(col[i + 1] - col[i]) / (nodes[i + k] - nodes[i]) for i in range(len(col) - 1)]
    return col[0]


def classical_blossom(coeffs, pts):
    """Blossom of ``sum c_k x^k`` at homogeneous points ``(x_i, w_i)``.

    The ``x^k`` term blossoms to ``e_k / C(m, k)`` where ``e_k`` sums, over
    every choice of ``k`` slots, the product of ``w`` on the chosen slots and
    ``x`` on the rest.
    """
    m = len(pts)
    total = 0
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        if k > m:
            raise DegreeError("degree exceeds the number of points")
        e = 0
        for chosen in itertools.combinations(range(m), k):
            term = 1
            for i, p in enumerate(pts):
                term = term * (p.w if i in chosen else p.x)
            e += term
        total += c * e / math.comb(m, k)
    return total


def classical_ext_blossom(coeffs, xs, us):
    """Signed sum of classical blossoms with ``alpha + beta = len(xs) - len(us)``."""
    k = len(xs) - len(us)
    total = 0
    for alpha in range(0, min(k, len(xs)) + 1):
        beta = k - alpha
        for I in itertools.combinations(range(len(xs)), alpha):
            for J in itertools.combinations_with_replacement(range(len(us)), beta):
                val = classical_blossom(coeffs, [xs[i] for i in I] + [us[j] for j in J])
                total += -val if beta % 2 else val
    return total


# ---------------------------------------------------------------------------
# helpers


def _sign_candidates(rhs, rules: dict) -> dict:
    return {label: (s * rhs, s, 1) for label, s in rules.items()}


def _inputs(**kw) -> dict:
    def conv(v):
        if isinstance(v, PiElement):
            return v.to_json()
        if isinstance(v, HomPoint):
            return v.to_json()
        if isinstance(v, (list, tuple)):
            return [conv(x) for x in v]
        if isinstance(v, (int, str)) and not isinstance(v, bool):
            return v
        return format_scalar(v)

    return {k: conv(v) for k, v in kw.items()}


def _require_unital(sys: GammaSystem, kind: str):
    if not sys.is_unital:
        raise UnsupportedOperationError(f"{kind} needs a unital system")


def _as_float(sys, v):
    return v if sys.exact else float(v)


# ---------------------------------------------------------------------------
# identity kinds


def _eval_delta_block(sys, H: PiElement, nodes, a, m: int) -> Evaluation:
    n = len(nodes)
    if n != m + 1:
        raise OrderError(f"the delta-block identity needs n = m + 1 nodes (m={m}, n={n})")
    dk = gen_derivative(kernel_element(sys, a), 1)
    lhs = divdiff(sys, multiply(power(dk, m), H), list(nodes))
    delta = delta_pair(sys, a)
    rhs = ext_blossom_neg(H, BlossomQuery.from_nodes(sys, [delta] * m, nodes))
    rules = {"+1": 1, "-1": -1, "(-1)^m": (-1) ** m}
    oracle = classical_divdiff(list(H.coeffs), list(nodes)) if sys.name == "polynomial" else None
    return Evaluation(lhs, rhs, _sign_candidates(rhs, rules), oracle, {"delta": delta.to_json()})


def _eval_diff_duality(sys, G: PiElement, m: int, j: int, x, a) -> Evaluation:
    if G.degree > m:
        raise DegreeError(f"degree {G.degree} exceeds m={m}")
    if not 0 <= j <= m:
        raise OrderError(f"j={j} outside 0..{m}")
    delta = delta_pair(sys, a)
    pts = [delta] * j + [sys.curve_point(x)] * (m - j)
    lhs = math.comb(m, j) * hom_blossom(G, pts)
    djg = evaluate(gen_derivative(G, j), x) / math.factorial(j)
    factor = d_fn(sys, x, a) ** j
    rules = {"+1": 1, "(-1)^j": (-1) ** j}
    oracle = None
    if sys.name == "polynomial":
        oracle = math.comb(m, j) * classical_blossom(list(G.coeffs), pts)
    return Evaluation(lhs, factor * djg, _sign_candidates(djg, rules), oracle, {"paper_factor": factor})


def _eval_diff_duality_ext(sys, G: PiElement, m: int, n: int, j: int, x, a) -> Evaluation:
    k = m - n
    if k < G.degree:
        raise OrderError(f"order {k} is below the degree {G.degree}")
    if not 0 <= j <= k:
        raise OrderError(f"j={j} outside 0..{k}")
    delta = delta_pair(sys, a)
    c = sys.curve_point(x)
    lhs = math.comb(k, j) * ext_blossom_pos(G, BlossomQuery([delta] * j + [c] * (m - j), [c] * n))
    djg = evaluate(gen_derivative(G, j), x) / math.factorial(j)
    factor = d_fn(sys, x, a) ** j
    rules = {"+1": 1, "(-1)^j": (-1) ** j}
    oracle = None
    if sys.name == "polynomial":
        oracle = math.comb(k, j) * classical_blossom(list(G.coeffs), [delta] * j + [c] * (k - j))
    return Evaluation(lhs, factor * djg, _sign_candidates(djg, rules), oracle, {"paper_factor": factor})


def _eval_main(sys, G: PiElement, nodes, a) -> Evaluation:
    _require_unital(sys, "main")
    n, d = len(nodes), G.degree
    if n > d + 1:
        raise DegreeError(f"{n} nodes exceed degree {d} + 1")
    size = d - n + 1
    lhs = divdiff(sys, G, list(nodes))
    weighted = multiply(power(kernel_element(sys, a), n - 1), G)
    lhs_paper = divdiff(sys, weighted, list(nodes))
    us = [sys.curve_point(e) for e in nodes]
    hb = _HomBlossom(gen_derivative(G, n - 1), size)
    total = sys.zero()
    count = 0
    for J in multisets(n, size):
        total += hb([us[i] for i in J])
        count += 1
    const = Fraction(math.factorial(size), math.factorial(d))
    const = _as_float(sys, const)
    rhs = const * total
    rules = {"+1": 1, "(-1)^(n-1)": (-1) ** (n - 1)}
    cands = {label: (s * rhs, s, const) for label, s in rules.items()}
    probe = [d_fn(sys, a, e) ** (n - 1) * rhs for e in nodes]
    oracle = classical_divdiff(list(G.coeffs), list(nodes)) if sys.name == "polynomial" else None
    extras = {
        "lhs_paper": lhs_paper,
        "lhs_noweight": lhs,
        "stray_factor_probe": probe,
        "term_count": count,
        "term_count_expected": multiset_count(n, size),
    }
    return Evaluation(lhs, rhs, cands, oracle, extras)


def _kernel_linear(sys, a):
    g1a, g2a = sys.gamma1(sys.scalar(a)), sys.gamma2(sys.scalar(a))
    return lambda p: p.x * g2a - p.w * g1a


def _eval_example2(sys, a, xs, us) -> Evaluation:
    m, n = len(xs), len(us)
    k = m - n
    if k < 1:
        raise OrderError("example2 needs order k >= 1")
    G = kernel_element(sys, a)
    lhs = ext_blossom_pos(G, BlossomQuery(xs, us))
    L = _kernel_linear(sys, a)
    sx = sum((L(p) for p in xs), sys.zero())
    sizes = {"n": n, "k": k, "m": m}
    cands = {}
    for s in (1, -1):
        for den in ("n", "k", "m"):
            for ur in ("k", "n"):
                label = f"sign={s:+d},den={den},urange={ur}"
                dv, r = sizes[den], sizes[ur]
                if dv == 0 or r > n:
                    cands[label] = (None, s, dv)
                    continue
                su = sum((L(p) for p in us[:r]), sys.zero())
                cands[label] = (s * (sx - su) / dv, s, dv)
    rhs_paper = cands["sign=+1,den=n,urange=k"][0]
    oracle = classical_ext_blossom(list(G.coeffs), xs, us) if sys.name == "polynomial" else None
    return Evaluation(lhs, rhs_paper, cands, oracle)


def _eval_example3(sys, a, xs, us) -> Evaluation:
    m, n = len(xs), len(us)
    k = m - n
    if k < 2:
        raise OrderError("example3 needs order k >= 2")
    G = power(kernel_element(sys, a), 2)
    lhs = ext_blossom_pos(G, BlossomQuery(xs, us))
    L = _kernel_linear(sys, a)
    lx = [L(p) for p in xs]
    lu = [L(p) for p in us]
    s_xx = sum((lx[i] * lx[j] for i, j in itertools.combinations(range(m), 2)), sys.zero())
    s_ux = sum((u * v for u in lu for v in lx), sys.zero())
    s_uu = sum((lu[i] * lu[j] for i, j in itertools.combinations_with_replacement(range(n), 2)), sys.zero())
    body = s_xx - s_ux + s_uu
    sizes = {"C(n,2)": math.comb(n, 2), "C(k,2)": math.comb(k, 2), "C(m,2)": math.comb(m, 2)}
    cands = {}
    for s in (1, -1):
        for den, dv in sizes.items():
            label = f"sign={s:+d},den={den}"
            cands[label] = ((s * body / dv) if dv else None, s, dv)
    rhs_paper = cands["sign=+1,den=C(n,2)"][0]
    oracle = classical_ext_blossom(list(G.coeffs), xs, us) if sys.name == "polynomial" else None
    return Evaluation(lhs, rhs_paper, cands, oracle)


def _eval_cancellation(sys, f: PiElement, nodes, extra) -> Evaluation:
    rep = check_cancellation(sys, f, nodes, extra)
    oracle = None
    if sys.name == "polynomial":
        oracle = classical_divdiff(list(f.coeffs), list(nodes))
    return Evaluation(rep.lhs, rep.rhs_paper, {"+1": (rep.rhs_paper, 1, 1)}, oracle)


EVALUATORS: dict = {
    "delta_block": _eval_delta_block,
    "diff_duality": _eval_diff_duality,
    "diff_duality_ext": _eval_diff_duality_ext,
    "main": _eval_main,
    "cancellation_dd": _eval_cancellation,
    "example2": _eval_example2,
    "example3": _eval_example3,
}


# ---------------------------------------------------------------------------
# random instances


def _random_element(rng, sys, degree):
    if sys.exact:
        coeffs = [Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 4))) for _ in range(degree + 1)]
    else:
        coeffs = [float(rng.uniform(-2, 2)) for _ in range(degree + 1)]
    return PiElement.from_coeffs(sys, coeffs)


def _random_nodes(rng, sys, count):
    a, b = (float(v) for v in sys.domain)
    gap = (b - a) / 40
    out = []
    while len(out) < count:
        t = random_node(rng, sys)
        if all(abs(float(t) - float(s)) >= gap for s in out):
            out.append(t)
    return out


def _slice_point(rng, sys) -> HomPoint:
    """Point with ``c1 x + c2 w = 1``: a curve point shifted along ``(-c2, c1)``."""
    c = sys.curve_point(random_node(rng, sys))
    c1, c2 = sys.unit_coeffs
    s = random_scalar(rng, sys, -2, 2)
    return HomPoint(c.x - s * c2, c.w + s * c1)


def sample_params(kind: str, sys: GammaSystem, rng: np.random.Generator) -> dict:
    if kind == "delta_block":
        m = int(rng.integers(0, 4))
        return {
            "H": _random_element(rng, sys, int(rng.integers(0, 5))),
            "nodes": _random_nodes(rng, sys, m + 1),
            "a": random_node(rng, sys),
            "m": m,
        }
    if kind == "diff_duality":
        m = int(rng.integers(1, 6))
        return {
            "G": _random_element(rng, sys, int(rng.integers(0, m + 1))),
            "m": m,
            "j": int(rng.integers(0, m + 1)),
            "x": random_node(rng, sys),
            "a": random_node(rng, sys),
        }
    if kind == "diff_duality_ext":
        n = int(rng.integers(0, 3))
        k = int(rng.integers(1, 4))
        return {
            "G": _random_element(rng, sys, int(rng.integers(0, k + 1))),
            "m": n + k,
            "n": n,
            "j": int(rng.integers(0, k + 1)),
            "x": random_node(rng, sys),
            "a": random_node(rng, sys),
        }
    if kind == "main":
        d = int(rng.integers(1, 6))
        n = int(rng.integers(1, d + 2))
        return {
            "G": _random_element(rng, sys, d),
            "nodes": _random_nodes(rng, sys, n),
            "a": random_node(rng, sys),
        }
    if kind == "cancellation_dd":
        n = int(rng.integers(1, 5))
        nodes = _random_nodes(rng, sys, n + 1)
        return {
            "f": _random_element(rng, sys, int(rng.integers(0, n))),
            "nodes": nodes[:n],
            "extra": nodes[n],
        }
    if kind in ("example2", "example3"):
        n = int(rng.integers(0, 3))
        k = int(rng.integers(1 if kind == "example2" else 2, 4))
        return {
            "a": random_node(rng, sys),
            "xs": [_slice_point(rng, sys) for _ in range(n + k)],
            "us": [_slice_point(rng, sys) for _ in range(n)],
        }
    raise ValueError(f"unknown identity kind {kind!r}")


# ---------------------------------------------------------------------------
# resolution


@dataclass(frozen=True)
class Resolution:
    kind: str
    label: Optional[str]
    candidates: tuple
    surviving: tuple
    paper_literal_agrees: int
    instances: int


def _matches(value, ref, tol) -> bool:
    return value is not None and _close(ref, value, tol)


@lru_cache(maxsize=None)
def resolve(kind: str, count: int = RESOLVE_COUNT, seed: int = RESOLVE_SEED) -> Resolution:
    """Pick the candidate right-hand side that matches the classical oracle everywhere.

    Runs ``count`` seeded polynomial instances in rational arithmetic and
    keeps the candidates that reproduce the independent classical value of
    the left-hand side on every one of them; the first survivor in
    candidate order wins. ``label`` is ``None`` when nothing survives.
    """
    sys = make_preset("polynomial", exact=True)
    rng = np.random.default_rng(seed)
    surviving = None
    order: list = []
    literal = 0
    for _ in range(count):
        params = sample_params(kind, sys, rng)
        ev = EVALUATORS[kind](sys, **params)
        if not order:
            order = list(ev.candidates)
        ok = {lab for lab, (v, _, _) in ev.candidates.items() if _matches(v, ev.oracle, 0)}
        surviving = ok if surviving is None else surviving & ok
        lhs_paper = ev.extras.get("lhs_paper", ev.oracle)
        literal += int(_matches(ev.rhs_paper, lhs_paper, 0))
    surviving = [lab for lab in order if lab in (surviving or set())]
    return Resolution(
        kind=kind,
        label=surviving[0] if surviving else None,
        candidates=tuple(order),
        surviving=tuple(surviving),
        paper_literal_agrees=literal,
        instances=count,
    )


def identity_report(
    kind: str, sys: GammaSystem, params: dict, tol: float = DEFAULT_TOL, seed: Optional[int] = None
) -> IdentityReport:
    """Evaluate one identity instance; a mismatch is recorded, never raised."""
    if kind not in EVALUATORS:
        raise ValueError(f"unknown identity kind {kind!r}")
    ev = EVALUATORS[kind](sys, **params)
    res = resolve(kind)
    tol = 0 if sys.exact else tol
    if res.label is None:
        rhs_res, sign, const = None, 1, None
    else:
        rhs_res, sign, const = ev.candidates[res.label]
    matching = [lab for lab, (v, _, _) in ev.candidates.items() if _matches(v, ev.lhs, tol)]
    extras = dict(ev.extras)
    extras["matching_candidates"] = matching
    if ev.oracle is not None:
        extras["oracle_lhs"] = ev.oracle
    return IdentityReport(
        identity=kind,
        system=sys.name,
        mode=sys.mode,
        inputs=_inputs(**params),
        lhs=ev.lhs,
        rhs_paper=ev.rhs_paper,
        rhs_resolved=rhs_res,
        constant=const,
        sign=sign,
        sign_rule=res.label or "unresolved",
        tol=tol,
        seed=seed,
        extras=extras,
    )


def run_batch(kind: str, sys: GammaSystem, count: int, seed: int, tol: float = DEFAULT_TOL) -> list:
    rng = np.random.default_rng([seed, KINDS.index(kind)])
    return [identity_report(kind, sys, sample_params(kind, sys, rng), tol, seed) for _ in range(count)]


def suite_systems() -> list:
    return [make_preset(name, exact=exact) for name, exact in SUITE_SYSTEMS]


def run_suite(seed: int, count: int = RESOLVE_COUNT, tol: float = DEFAULT_TOL, kinds=KINDS, systems=None) -> dict:
    """All identity kinds on every suite system; returns reports plus the ledger."""
    systems = suite_systems() if systems is None else systems
    reports = {kind: [] for kind in kinds}
    for kind in kinds:
        for sys in systems:
            reports[kind].extend(run_batch(kind, sys, count, seed, tol))
    return {"reports": reports, "ledger": build_ledger(reports)}


def build_ledger(reports: dict) -> dict:
    """Per-kind record of the resolved form and how often the stated form holds."""
    ledger = {}
    for kind, reps in reports.items():
        res = resolve(kind)
        per_system: dict = {}
        common = None
        for r in reps:
            s = per_system.setdefault(
                r.system, {"instances": 0, "resolved_pass": 0, "paper_literal_pass": 0}
            )
            s["instances"] += 1
            s["resolved_pass"] += int(r.passed)
            s["paper_literal_pass"] += int(r.paper_literal_holds)
            m = set(r.extras.get("matching_candidates", []))
            common = m if common is None else common & m
        ledger[kind] = {
            "resolved_rule": res.label,
            "candidates": list(res.candidates),
            "oracle_survivors": list(res.surviving),
            "oracle_instances": res.instances,
            "oracle_paper_literal_agreement": res.paper_literal_agrees,
            "sign_stable": res.label is not None and res.label in (common or set()),
            "systems": per_system,
        }
    return ledger
