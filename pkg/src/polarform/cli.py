"""Command-line front end.

Every subcommand prints one JSON document (or CSV for ``identity`` and
``suite`` with ``--output csv``). Exit codes: 0 success, 2 input error,
3 numeric failure, 4 an identity whose resolved form does not hold.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from . import identities
from .blossom import BlossomQuery, ext_blossom_neg, ext_blossom_pos, ext_blossom_scaled, hom_blossom
from .divided_difference import divdiff, divdiff_table, newton_interpolate
from .errors import IllConditionedError, NumericError, PolarformError, SingularSystemError
from .gamma_system import (
    DEFAULT_DOMAINS,
    DEFAULT_PARAMS,
    PRESETS,
    GammaSystem,
    HomPoint,
    format_scalar,
    make_preset,
)
from .pi_space import PiElement, evaluate, taylor_derivatives, taylor_expand
from .reports import reports_to_csv

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_IDENTITY = 0, 2, 3, 4


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


# ---------------------------------------------------------------------------
# argument parsing


def _split(value, sep=","):
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        return list(value)
    return [s for s in (p.strip() for p in str(value).split(sep)) if s]


def _points(sys: GammaSystem, value) -> Optional[list]:
    """``"x,w;x,w"`` or a JSON list of pairs."""
    if value is None:
        return None
    pairs = value if isinstance(value, list) else [_split(p) for p in _split(value, ";")]
    out = []
    for pair in pairs:
        if len(pair) != 2:
            raise InputError(f"homogeneous point needs two coordinates, got {pair!r}")
        out.append(HomPoint(sys.scalar(pair[0]), sys.scalar(pair[1])))
    return out


def _scalars(sys: GammaSystem, value) -> Optional[list]:
    items = _split(value)
    return None if items is None else [sys.scalar(v) for v in items]


def _system(args) -> GammaSystem:
    kind = args.system or "polynomial"
    params = args.params
    if isinstance(params, str):
        params = json.loads(params)
    domain = _split(args.domain)
    mode = args.mode or "auto"
    if mode == "auto":
        exact = kind == "polynomial"
    elif mode == "exact":
        if kind != "polynomial":
            raise InputError("exact mode is only available for the polynomial preset")
        exact = True
    else:
        exact = False
    return make_preset(kind, params, domain=domain, exact=exact)


def _element(sys: GammaSystem, args, required=True) -> Optional[PiElement]:
    coeffs = _split(args.coeffs)
    if coeffs is None:
        if required:
            raise InputError("--coeffs is required")
        return None
    if args.degree is not None and int(args.degree) != len(coeffs) - 1:
        raise InputError(f"--degree {args.degree} does not match {len(coeffs)} coefficients")
    return PiElement.from_coeffs(sys, coeffs)


def _need(value, flag):
    if value is None:
        raise InputError(f"{flag} is required")
    return value


def _seed(args) -> int:
    if args.seed is not None:
        return int(args.seed)
    env = os.environ.get("POLARFORM_SEED")
    return int(env) if env else 0


def _add_common(p):
    p.add_argument("--input", help="JSON file whose keys supply defaults for the flags")
    p.add_argument("--system", help=f"preset: {', '.join(PRESETS)}")
    p.add_argument("--params", help='preset parameters as JSON, e.g. \'{"q": 3}\'')
    p.add_argument("--domain", help="lo,hi")
    p.add_argument("--mode", choices=("auto", "exact", "float"), help="scalar arithmetic (default auto)")
    p.add_argument("--tol", type=float, help="relative tolerance for identity checks")
    p.add_argument("--seed", type=int, help="random seed (falls back to POLARFORM_SEED)")
    p.add_argument("--output", choices=("json", "csv"), help="report format")
    p.add_argument("--term-cap", type=int, help="maximum number of blossom terms")
    p.add_argument("--coeffs", help="coefficients c_0..c_n of sum c_k g1^(n-k) g2^k")
    p.add_argument("--degree", type=int)
    p.add_argument("--nodes", help="comma separated nodes")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polarform", description="Divided differences and blossoms over pi_n(g1, g2).")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("presets", help="list the available systems")
    _add_common(p)

    p = sub.add_parser("divdiff", help="divided difference of an element")
    _add_common(p)
    p.add_argument("--table", action="store_true", help="also emit the table, one list per column")

    p = sub.add_parser("interp", help="Newton interpolation")
    _add_common(p)
    p.add_argument("--values", help="sample values at the nodes")
    p.add_argument("--at", help="points at which to evaluate the interpolant")

    p = sub.add_parser("taylor", help="generalized Taylor expansion")
    _add_common(p)
    p.add_argument("--x0", help="expansion point")
    p.add_argument("--order", type=int, help="expansion order")
    p.add_argument("--at", help="points at which to evaluate the expansion")

    p = sub.add_parser("blossom", help="homogeneous blossom")
    _add_common(p)
    p.add_argument("--xblock", help="points as 'x,w;x,w'")
    p.add_argument("--tau", help="anchor of the derivative expansion")

    p = sub.add_parser("extblossom", help="extended blossom of any order")
    _add_common(p)
    p.add_argument("--xblock", help="points as 'x,w;x,w'")
    p.add_argument("--ublock", help="points as 'u,v;u,v'")
    p.add_argument("--unodes", help="nodes whose curve points form the u block")
    p.add_argument("--tau")
    p.add_argument("--d", type=int, help="use the scaled d-argument form")
    p.add_argument("--anchor", help="antiderivative anchor (negative order)")
    p.add_argument("--path", choices=("auto", "exact", "numeric"), help="negative order evaluation path")

    p = sub.add_parser("identity", help="check one identity instance")
    _add_common(p)
    p.add_argument("--kind", choices=identities.KINDS)
    p.add_argument("--a", help="kernel parameter a")
    p.add_argument("--m", type=int, help="number of x parameters")
    p.add_argument("--n", type=int, help="number of u parameters")
    p.add_argument("--order", type=int, help="derivative order j")
    p.add_argument("--x", help="evaluation point")
    p.add_argument("--extra", help="node inserted by the cancellation check")
    p.add_argument("--xblock", help="points as 'x,w;x,w'")
    p.add_argument("--ublock", help="points as 'u,v;u,v'")

    p = sub.add_parser("suite", help="seeded batch of every identity kind")
    _add_common(p)
    p.add_argument("--count", type=int, help="instances per kind and system (default 100)")
    p.add_argument("--ledger", help="path of the discrepancy ledger (default ledger.json)")
    return parser


def _apply_input_file(args):
    if not args.input:
        return
    try:
        with open(args.input) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read --input: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("--input must hold a JSON object")
    if "f" in data:
        f = data.pop("f")
        data.setdefault("coeffs", f["coeffs"] if isinstance(f, dict) else f)
        if isinstance(f, dict) and "degree" in f:
            data.setdefault("degree", f["degree"])
    if "samples" in data:
        samples = data.pop("samples")
        data.setdefault("nodes", [x for x, _ in samples])
        data.setdefault("values", [y for _, y in samples])
    for key, value in data.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise InputError(f"unknown input key {key!r}")
        if getattr(args, attr) is None:
            setattr(args, attr, value)


# ---------------------------------------------------------------------------
# commands


def _cmd_presets(args):
    out = []
    for kind in PRESETS:
        s = make_preset(kind)
        out.append(
            {
                "preset": kind,
                "params": DEFAULT_PARAMS.get(kind, {}),
                "domain": list(DEFAULT_DOMAINS[kind]),
                "unital": s.is_unital,
                "exact_mode": kind == "polynomial",
            }
        )
    return {"presets": out}, EXIT_OK


def _cmd_divdiff(args):
    sys_ = _system(args)
    f = _element(sys_, args)
    nodes = _need(_scalars(sys_, args.nodes), "--nodes")
    out = {"value": format_scalar(divdiff(sys_, f, nodes))}
    if args.table:
        table = divdiff_table(sys_, f, nodes)
        out["table_nodes"] = [format_scalar(x) for x in table.nodes]
        out["table"] = [[format_scalar(v) for v in col] for col in table.columns()]
    return out, EXIT_OK


def _cmd_interp(args):
    sys_ = _system(args)
    nodes = _need(_scalars(sys_, args.nodes), "--nodes")
    values = _need(_scalars(sys_, args.values), "--values")
    if len(values) != len(nodes):
        raise InputError("--values and --nodes differ in length")
    coeffs, ev = newton_interpolate(sys_, list(zip(nodes, values)))
    out = {"newton_coeffs": [format_scalar(c) for c in coeffs]}
    at = _scalars(sys_, args.at)
    if at:
        out["values"] = [format_scalar(ev(t)) for t in at]
    return out, EXIT_OK


def _cmd_taylor(args):
    sys_ = _system(args)
    f = _element(sys_, args)
    x0 = sys_.scalar(_need(args.x0, "--x0"))
    order = f.degree if args.order is None else args.order
    derivs = taylor_derivatives(f, x0, order)
    out = {"derivatives": [format_scalar(v) for v in derivs]}
    at = _scalars(sys_, args.at)
    if at:
        out["expansion"] = [format_scalar(taylor_expand(sys_, derivs, x0, t)) for t in at]
        out["exact"] = [format_scalar(evaluate(f, t)) for t in at]
    return out, EXIT_OK


def _cmd_blossom(args):
    sys_ = _system(args)
    G = _element(sys_, args)
    pts = _need(_points(sys_, args.xblock), "--xblock")
    tau = None if args.tau is None else sys_.scalar(args.tau)
    return {"value": format_scalar(hom_blossom(G, pts, tau))}, EXIT_OK


def _cmd_extblossom(args):
    sys_ = _system(args)
    G = _element(sys_, args)
    xs = _points(sys_, args.xblock) or []
    unodes = _scalars(sys_, args.unodes)
    if unodes is not None:
        q = BlossomQuery.from_nodes(sys_, xs, unodes)
        if args.ublock is not None:
            given = _points(sys_, args.ublock)
            q = BlossomQuery(xs, given, tuple(unodes))
            q.validate(sys_)
    else:
        q = BlossomQuery(xs, _points(sys_, args.ublock) or [])
    tau = None if args.tau is None else sys_.scalar(args.tau)
    cap = args.term_cap or 10**6
    out = {"order": q.order}
    if args.d is not None:
        out["form"] = "scaled"
        value = ext_blossom_scaled(G, q, args.d, tau, term_cap=cap)
    elif q.order >= 0:
        out["form"] = "positive"
        value = ext_blossom_pos(G, q, tau, term_cap=cap)
    else:
        out["form"] = "negative"
        value = ext_blossom_neg(G, q, args.anchor, args.path or "auto")
    out["value"] = format_scalar(value)
    return out, EXIT_OK


def _identity_params(kind, sys_, args) -> dict:
    a = sys_.scalar(_need(args.a, "--a")) if args.a is not None or kind != "cancellation_dd" else None
    if kind in ("main", "delta_block"):
        nodes = _need(_scalars(sys_, args.nodes), "--nodes")
        params = {"G" if kind == "main" else "H": _element(sys_, args), "nodes": nodes, "a": a}
        if kind == "delta_block":
            params["m"] = len(nodes) - 1 if args.m is None else args.m
        return params
    if kind in ("diff_duality", "diff_duality_ext"):
        G = _element(sys_, args)
        m = G.degree if args.m is None else args.m
        params = {"G": G, "m": m, "j": _need(args.order, "--order"), "x": sys_.scalar(_need(args.x, "--x")), "a": a}
        if kind == "diff_duality_ext":
            params["n"] = _need(args.n, "--n")
        return params
    if kind == "cancellation_dd":
        return {
            "f": _element(sys_, args),
            "nodes": _need(_scalars(sys_, args.nodes), "--nodes"),
            "extra": sys_.scalar(_need(args.extra, "--extra")),
        }
    return {
        "a": a,
        "xs": _need(_points(sys_, args.xblock), "--xblock"),
        "us": _points(sys_, args.ublock) or [],
    }


def _cmd_identity(args):
    sys_ = _system(args)
    kind = _need(args.kind, "--kind")
    rep = identities.identity_report(
        kind, sys_, _identity_params(kind, sys_, args), args.tol or identities.DEFAULT_TOL, args.seed
    )
    if args.output == "csv":
        return reports_to_csv([rep]), EXIT_OK if rep.passed else EXIT_IDENTITY
    return rep.to_json(), EXIT_OK if rep.passed else EXIT_IDENTITY


def _cmd_suite(args):
    seed = _seed(args)
    count = identities.RESOLVE_COUNT if args.count is None else args.count
    if count < 1:
        raise InputError("--count must be positive")
    result = identities.run_suite(seed, count, args.tol or identities.DEFAULT_TOL)
    reports = result["reports"]
    ledger = {"seed": seed, "count": count, "identities": result["ledger"]}
    ledger_path = args.ledger or "ledger.json"
    with open(ledger_path, "w") as fh:
        json.dump(ledger, fh, indent=2)
        fh.write("\n")
    total = sum(len(r) for r in reports.values())
    failed = sum(not r.passed for reps in reports.values() for r in reps)
    code = EXIT_OK if failed == 0 else EXIT_IDENTITY
    if args.output == "csv":
        return reports_to_csv([r for reps in reports.values() for r in reps]), code
    out = {
        "seed": seed,
        "count": count,
        "reports": {kind: [r.to_json() for r in reps] for kind, reps in reports.items()},
        "summary": {
            "instances": total,
            "passed": total - failed,
            "failed": failed,
            "resolved_rules": {k: v["resolved_rule"] for k, v in result["ledger"].items()},
            "ledger": ledger_path,
        },
    }
    return out, code


COMMANDS = {
    "presets": _cmd_presets,
    "divdiff": _cmd_divdiff,
    "interp": _cmd_interp,
    "taylor": _cmd_taylor,
    "blossom": _cmd_blossom,
    "extblossom": _cmd_extblossom,
    "identity": _cmd_identity,
    "suite": _cmd_suite,
}


def run(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return EXIT_INPUT
        _apply_input_file(args)
        if args.tol is not None and float(args.tol) <= 0:
            raise InputError("--tol must be positive")
        out, code = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericError, IllConditionedError, SingularSystemError, ArithmeticError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (PolarformError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if isinstance(out, str):
        stdout.write(out)
    else:
        stdout.write(json.dumps(out, indent=2) + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
