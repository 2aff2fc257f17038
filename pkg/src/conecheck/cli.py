"""Command-line front end.

Verbs: check, symbol, hankel, ff, witness-verify, conv-build, moments,
recover, mv-check, oracle.  A "Violates" verdict still exits 0 (the tool
succeeded at deciding; scripts read the payload).  Exit 2 flags malformed
input, exit 3 an internal invariant failure (a certificate that does not
re-verify, which should never happen).  `--json` switches every verb to
machine-readable output.  Randomized verbs default their seed from the
CONECHECK_SEED environment variable (else 0) and echo it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import decide as decide_mod
from . import moments as moments_mod
from . import multivar as multivar_mod
from . import oracle as oracle_mod
from .decide import Witness
from .hankel import build_param_hankel
from .moments import (
    AtomicMeasureFamily,
    MomentSequence,
    NotFinitelyAtomicError,
    parse_measure_text,
)
from .polycore import (
    MultiPoly,
    ParseError,
    UniPoly,
    ff_inner,
    parse_poly_auto,
)
from .weylops import MultiWeylOp, WeylOp, parse_operator_text

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3


class InputError(Exception):
    """User-facing input problem; maps to exit status 2."""


def parse_input(text: str):
    """Classify and parse free-form input text.

    ``q[...]`` lines give an operator, ``atom ... weight ...`` lines a
    measure family, a whitespace-separated list of rationals a moment
    sequence, anything else a polynomial expression.
    """
    stripped = text.strip()
    if not stripped:
        raise ParseError("empty input", 0)
    first = next(line for line in stripped.splitlines() if line.strip())
    if first.lstrip().startswith("q["):
        return parse_operator_text(text)
    if first.lstrip().startswith("atom "):
        return parse_measure_text(text)
    tokens = stripped.split()
    if all(_is_rational(tok) for tok in tokens):
        return MomentSequence.of([Fraction(tok) for tok in tokens])
    return parse_poly_auto(stripped)


def _is_rational(tok: str) -> bool:
    try:
        Fraction(tok)
        return True
    except (ValueError, ZeroDivisionError):
        return False


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _load_operator(path: str) -> WeylOp | MultiWeylOp:
    parsed = parse_operator_text(_read_file(path))
    return parsed


def _require_uni(op) -> WeylOp:
    if not isinstance(op, WeylOp):
        raise InputError("this command needs a univariate operator (integer indices)")
    return op


def _require_multi(op) -> MultiWeylOp:
    if isinstance(op, WeylOp):
        return MultiWeylOp.from_weyl(op)
    return op


def _parse_tuple(text: str, what: str) -> tuple[Fraction, ...]:
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    parts = [p.strip() for p in body.split(",") if p.strip()]
    if not parts:
        raise InputError(f"empty {what}")
    try:
        return tuple(Fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad {what}: {exc}") from None


def _parse_index_tuple(text: str, what: str) -> tuple[int, ...]:
    vals = _parse_tuple(text, what)
    out = []
    for v in vals:
        if v.denominator != 1 or v < 0:
            raise InputError(f"{what} entries must be nonnegative integers")
        out.append(int(v))
    return tuple(out)


def _default_seed() -> int:
    raw = os.environ.get("CONECHECK_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"CONECHECK_SEED must be an integer, got {raw!r}") from None


def _emit(payload: dict, text_lines: list[str], as_json: bool) -> None:
    if as_json:
        print(json.dumps(payload, indent=2))
    else:
        for line in text_lines:
            print(line)


# ---------------------------------------------------------------------------
# Verb implementations
# ---------------------------------------------------------------------------


def _cmd_check(args) -> int:
    op = _require_uni(_load_operator(args.operator))
    if args.degree == "unbounded":
        d = None
    else:
        try:
            d = int(args.degree)
        except ValueError:
            raise InputError("--degree must be an integer or 'unbounded'") from None
        if d < 0:
            raise InputError("--degree must be nonnegative")
    cone = args.cone.upper()
    verdict = decide_mod.decide(op, cone, d)
    cert = verdict.certificate
    if isinstance(cert, Witness):
        check_cone = decide_mod.POS if cone == decide_mod.ELL else cone
        checks = [(op, cert, check_cone)]
    elif isinstance(cert, tuple) and cert and isinstance(cert[0], Witness):
        # elliptic violation: one positivity witness per sign branch
        checks = [(op, cert[0], decide_mod.POS), (-op, cert[1], decide_mod.POS)]
    else:
        checks = []
    witnesses = [w for _, w, _ in checks]
    for target, w, check_cone in checks:
        if not oracle_mod.verify_witness(target, w, check_cone):
            print("internal error: witness failed re-verification", file=sys.stderr)
            return EXIT_INTERNAL
    lines = [
        f"cone: {verdict.cone}",
        f"degree bound: {'unbounded' if verdict.degree_bound is None else verdict.degree_bound}",
        f"result: {verdict.result}",
        f"truncation: {verdict.truncation_flag}",
        "predicates: "
        + ", ".join(f"{k}={v}" for k, v in verdict.predicates.to_dict().items()),
    ]
    for note in verdict.notes:
        lines.append(f"note: {note}")
    if verdict.preserves:
        if isinstance(cert, tuple) and cert and not isinstance(cert[0], Witness):
            lines.append("certificate: every principal minor is nonnegative on R")
            for rep in cert:
                lines.append(f"  minor {list(rep.subset)}: {rep.minor}")
    else:
        for w in witnesses:
            lines.append("witness:")
            lines.append(f"  input = {w.input_polynomial()}  (squares {[str(g) for g in w.squares]}, epsilon {w.epsilon})")
            if w.x0 is not None:
                lines.append(f"  image at {w.x0} = {w.value}")
            if w.zero_interval is not None:
                lines.append(f"  image has a real zero in ({w.zero_interval[0]}, {w.zero_interval[1]})")
            if w.sign_change is not None:
                (a, va), (b, vb) = w.sign_change
                lines.append(f"  image changes sign: {va} at {a}, {vb} at {b}")
    _emit(verdict.to_dict(), lines, args.json)
    return EXIT_OK


def _cmd_symbol(args) -> int:
    op = _load_operator(args.operator)
    if isinstance(op, WeylOp):
        if args.m is None:
            raise InputError("--m is required")
        sym = op.truncated_symbol(args.m)
        text = sym.format(["x", "y"])
    else:
        if args.alpha is None:
            raise InputError("--alpha is required for multivariate operators")
        alpha = _parse_index_tuple(args.alpha, "alpha")
        sym = op.truncated_symbol(alpha)
        n = op.arity
        names = [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(n)]
        text = sym.format(names)
    _emit({"symbol": text}, [text], args.json)
    return EXIT_OK


def _cmd_hankel(args) -> int:
    op = _require_uni(_load_operator(args.operator))
    H = build_param_hankel(op, args.m)
    if args.at is not None:
        y0 = _parse_fraction(args.at, "--at")
        rows = [[str(v) for v in row] for row in H.evaluate(y0)]
    else:
        rows = [[str(p) for p in row] for row in H.rows()]
    lines = ["[" + ", ".join(row) + "]" for row in rows]
    _emit({"size": H.size, "rows": rows}, lines, args.json)
    return EXIT_OK


def _parse_fraction(text: str, what: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad {what}: {exc}") from None


def _cmd_ff(args) -> int:
    f = parse_poly_auto(args.f)
    g = parse_poly_auto(args.g)
    if isinstance(f, UniPoly) and isinstance(g, MultiPoly):
        f = MultiPoly.from_uni(f) if g.arity == 1 else _lift_constant(f, g.arity)
    if isinstance(g, UniPoly) and isinstance(f, MultiPoly):
        g = MultiPoly.from_uni(g) if f.arity == 1 else _lift_constant(g, f.arity)
    if isinstance(f, UniPoly) and isinstance(g, UniPoly) and f.var != g.var:
        if f.is_constant():
            f = f.rename(g.var)
        elif g.is_constant():
            g = g.rename(f.var)
        else:
            raise InputError("polynomials use different variables")
    value = ff_inner(f, g)
    _emit({"value": str(value)}, [str(value)], args.json)
    return EXIT_OK


def _lift_constant(p: UniPoly, arity: int) -> MultiPoly:
    if not p.is_constant():
        raise InputError("polynomials have mismatched arity")
    return MultiPoly.constant(p.coeff(0), arity)


def _cmd_witness_verify(args) -> int:
    op = _require_uni(_load_operator(args.operator))
    try:
        data = json.loads(_read_file(args.witness))
        w = Witness.from_dict(data["witness"] if "witness" in data else data)
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"bad witness file: {exc}") from None
    ok = oracle_mod.verify_witness(op, w, args.cone.upper())
    _emit({"valid": ok}, [f"valid: {ok}"], args.json)
    return EXIT_OK


def _cmd_conv_build(args) -> int:
    family = parse_measure_text(_read_file(args.measure))
    if family.arity == 1:
        op = moments_mod.conv_operator_from_measure(family, args.order)
        text = op.to_text()
    else:
        cap = tuple([args.order] * family.arity)
        op = moments_mod.mv_conv_operator_from_measure(family, cap)
        text = op.to_text()
    _emit({"operator": text}, [text], args.json)
    return EXIT_OK


def _cmd_moments(args) -> int:
    if args.action != "check":
        raise InputError(f"unknown moments action {args.action!r}")
    try:
        seq = MomentSequence.of([Fraction(v) for v in args.values])
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad moment value: {exc}") from None
    try:
        res = moments_mod.hamburger_check(seq)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if res.ok:
        payload = {"moment_sequence": True}
        lines = ["moment sequence: yes (Hankel matrix is positive semidefinite)"]
    else:
        payload = {
            "moment_sequence": False,
            "failing_subset": list(res.failing_subset),
            "failing_minor": str(res.failing_minor),
        }
        lines = [
            "not a moment sequence: principal minor "
            f"{list(res.failing_subset)} = {res.failing_minor} < 0"
        ]
    _emit(payload, lines, args.json)
    return EXIT_OK


def _cmd_recover(args) -> int:
    try:
        seq = MomentSequence.of([Fraction(v) for v in args.values])
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad moment value: {exc}") from None
    try:
        rec = moments_mod.recover_atoms(seq)
    except NotFinitelyAtomicError as exc:
        _emit({"atomic": False, "reason": str(exc)}, [f"not finitely atomic at this truncation: {exc}"], args.json)
        return EXIT_OK
    except ValueError as exc:
        raise InputError(str(exc)) from None
    payload = {
        "atomic": True,
        "atom_polynomial": str(rec.atom_polynomial),
        "atom_intervals": [[str(lo), str(hi)] for lo, hi in rec.atom_intervals.intervals],
        "atoms": None if rec.atoms is None else [str(t) for t in rec.atoms],
        "weights": None if rec.weights is None else [str(w) for w in rec.weights],
        "weight_intervals": None
        if rec.weight_intervals is None
        else [[str(lo), str(hi)] for lo, hi in rec.weight_intervals],
    }
    lines = [f"atom polynomial: {rec.atom_polynomial}"]
    if rec.atoms is not None:
        for t, w in zip(rec.atoms, rec.weights):
            lines.append(f"atom {t} weight {w}")
    else:
        for (lo, hi), (wl, wh) in zip(rec.atom_intervals.intervals, rec.weight_intervals):
            lines.append(f"atom in ({lo}, {hi}) weight in [{wl}, {wh}]")
    _emit(payload, lines, args.json)
    return EXIT_OK


def _cmd_mv_check(args) -> int:
    op = _require_multi(_load_operator(args.operator))
    alpha = _parse_index_tuple(args.alpha, "alpha")
    if len(alpha) != op.arity:
        raise InputError(f"--alpha arity {len(alpha)} does not match operator arity {op.arity}")
    if args.at is not None:
        y0 = _parse_tuple(args.at, "--at point")
        if len(y0) != op.arity:
            raise InputError("--at arity mismatch")
        res = multivar_mod.psd_kernel_at(op, alpha, y0)
        payload = {
            "mode": "pointwise",
            "psd": res.ok,
            "direction": None if res.direction is None else [str(c) for c in res.direction],
            "value": None if res.value is None else str(res.value),
        }
        lines = [f"kernel PSD at point: {res.ok}"]
        if not res.ok:
            lines.append(f"direction {[str(c) for c in res.direction]} gives value {res.value}")
        lines.append("note: pointwise kernel positivity is a necessary condition only (n >= 2)")
        _emit(payload, lines, args.json)
        return EXIT_OK
    if op.is_constant_coeff():
        verdict = multivar_mod.constant_coeff_decide(op, alpha)
        payload = {
            "mode": "constant-coefficient",
            "result": verdict.result,
            "witness": None if verdict.witness is None else verdict.witness.to_dict(),
        }
        lines = [f"constant-coefficient decision on squares: {verdict.result}"]
        if verdict.witness is not None:
            if not multivar_mod.verify_mv_witness(op, verdict.witness):
                print("internal error: witness failed re-verification", file=sys.stderr)
                return EXIT_INTERNAL
            w = verdict.witness
            lines.append(f"witness input = {w.input_polynomial()}")
            lines.append(f"image at ({', '.join(map(str, w.point))}) = {w.value}")
        _emit(payload, lines, args.json)
        return EXIT_OK
    seed = args.seed if args.seed is not None else _default_seed()
    budget = multivar_mod.FalsifyBudget(
        points=args.budget_points,
        grid_radius=args.grid_radius,
        grid_denominator=args.grid_denominator,
        seed=seed,
    )
    outcome = multivar_mod.falsify_mv(op, alpha, budget)
    payload = {
        "mode": "falsification",
        "seed": outcome.seed,
        "points_checked": outcome.points_checked,
        "found": outcome.found,
        "y0": None if outcome.y0 is None else [str(v) for v in outcome.y0],
        "witness": None if outcome.witness is None else outcome.witness.to_dict(),
    }
    lines = [f"seed: {outcome.seed}", f"points checked: {outcome.points_checked}"]
    if outcome.found:
        if not multivar_mod.verify_mv_witness(op, outcome.witness):
            print("internal error: witness failed re-verification", file=sys.stderr)
            return EXIT_INTERNAL
        w = outcome.witness
        lines.append(f"violation at ({', '.join(map(str, w.point))})")
        lines.append(f"witness input = {w.input_polynomial()}")
        lines.append(f"image value = {w.value}")
    else:
        lines.append("no violation found within budget (kernel PSD at every point tried)")
    _emit(payload, lines, args.json)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    op = _require_uni(_load_operator(args.operator))
    seed = args.seed if args.seed is not None else _default_seed()
    spec = oracle_mod.SampleSpec(
        degree=args.degree, squares=args.squares, height=args.height,
        trials=args.trials, seed=seed,
    )
    w = oracle_mod.falsify_preservation(op, args.degree, args.cone.upper(), spec)
    payload = {
        "seed": seed,
        "trials": spec.trials,
        "violation": None if w is None else w.to_dict(),
    }
    lines = [f"seed: {seed}", f"trials: {spec.trials}"]
    if w is None:
        lines.append("no violation found (evidence only, not a proof)")
    else:
        if not oracle_mod.verify_witness(op, w, args.cone.upper()):
            print("internal error: witness failed re-verification", file=sys.stderr)
            return EXIT_INTERNAL
        lines.append(f"violation: input = {w.input_polynomial()}")
        if w.x0 is not None:
            lines.append(f"image at {w.x0} = {w.value}")
        if w.zero_interval is not None:
            lines.append(f"image has a real zero in ({w.zero_interval[0]}, {w.zero_interval[1]})")
        if w.sign_change is not None:
            (a, va), (b, vb) = w.sign_change
            lines.append(f"image changes sign: {va} at {a}, {vb} at {b}")
    _emit(payload, lines, args.json)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument wiring
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conecheck",
        description="Exact preservation checks for positivity cones of real polynomials.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_json(p):
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("check", help="decide SOS/POS/ELL preservation at a degree bound")
    p.add_argument("--cone", required=True, choices=["sos", "pos", "ell"])
    p.add_argument("--degree", required=True, help="even degree bound, or 'unbounded' (sos only)")
    p.add_argument("operator", help="operator file (q[i] = poly lines)")
    add_json(p)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("symbol", help="print the truncated symbol")
    p.add_argument("--m", type=int, help="truncation order (univariate)")
    p.add_argument("--alpha", help="truncation multi-index (multivariate)")
    p.add_argument("operator")
    add_json(p)
    p.set_defaults(func=_cmd_symbol)

    p = sub.add_parser("hankel", help="print the parametric Hankel matrix")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--at", help="evaluate the parameter at this rational")
    p.add_argument("operator")
    add_json(p)
    p.set_defaults(func=_cmd_hankel)

    p = sub.add_parser("ff", help="Fischer-Fock inner product of two polynomials")
    p.add_argument("f")
    p.add_argument("g")
    add_json(p)
    p.set_defaults(func=_cmd_ff)

    p = sub.add_parser("witness-verify", help="re-verify a witness JSON file")
    p.add_argument("--witness", required=True)
    p.add_argument("--cone", required=True, choices=["sos", "pos", "ell"])
    p.add_argument("operator")
    add_json(p)
    p.set_defaults(func=_cmd_witness_verify)

    p = sub.add_parser("conv-build", help="materialize the convolution operator of a measure")
    p.add_argument("measure", help="measure file (atom ... weight ... lines)")
    p.add_argument("--order", type=int, required=True)
    add_json(p)
    p.set_defaults(func=_cmd_conv_build)

    p = sub.add_parser("moments", help="moment-sequence utilities")
    p.add_argument("action", help="'check'")
    p.add_argument("values", nargs="+")
    add_json(p)
    p.set_defaults(func=_cmd_moments)

    p = sub.add_parser("recover", help="recover atoms and weights from moments")
    p.add_argument("values", nargs="+")
    add_json(p)
    p.set_defaults(func=_cmd_recover)

    p = sub.add_parser("mv-check", help="multivariate kernel checks")
    p.add_argument("--alpha", required=True)
    p.add_argument("--at", help="pointwise check at this rational tuple")
    p.add_argument("--budget-points", type=int, default=200)
    p.add_argument("--grid-radius", type=int, default=2)
    p.add_argument("--grid-denominator", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("operator")
    add_json(p)
    p.set_defaults(func=_cmd_mv_check)

    p = sub.add_parser("oracle", help="random falsification with exact image checks")
    p.add_argument("--cone", required=True, choices=["sos", "pos", "ell"])
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--squares", type=int, default=2)
    p.add_argument("--height", type=int, default=5)
    p.add_argument("--seed", type=int)
    p.add_argument("operator")
    add_json(p)
    p.set_defaults(func=_cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, which matches the input-error contract
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (InputError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
