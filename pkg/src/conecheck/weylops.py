"""Finite-support differential operators with polynomial coefficients.

A univariate operator is stored as the coefficient list of
``sum_i q_i(x) D^i`` (D = d/dx); the representation is unique, so two
operators are equal iff their coefficient lists are.  The module provides
application to polynomials, evaluation of the coefficients at a point (the
constant-coefficient specialization), truncated symbols, conjugation by
shifts, conversion to and from monomial-basis action matrices, and the
multivariate analogs built on partial derivatives indexed by multi-indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .polycore import (
    NEG_INF,
    MultiPoly,
    ParseError,
    Rat,
    UniPoly,
    _rat,
    ff_inner,
    parse_multipoly,
    parse_unipoly,
)


class WeylOp:
    """Operator sum_i q_i(x) D^i with finitely many nonzero q_i."""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable[UniPoly | Rat] = (), var: str = "x"):
        cs = [c if isinstance(c, UniPoly) else UniPoly.constant(_rat(c), var) for c in coeffs]
        cs = [c.rename(var) if c.is_constant() else c for c in cs]
        for c in cs:
            if c.var != var:
                raise ValueError(f"coefficient variable {c.var!r} does not match {var!r}")
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs: tuple[UniPoly, ...] = tuple(cs)
        self.var = var

    @classmethod
    def identity(cls, var: str = "x") -> "WeylOp":
        return cls((UniPoly.constant(1, var),), var)

    @classmethod
    def derivative_op(cls, order: int = 1, var: str = "x") -> "WeylOp":
        """The pure k-th derivative operator D^k."""
        return cls((UniPoly((), var),) * order + (UniPoly.constant(1, var),), var)

    @classmethod
    def multiplication(cls, q: UniPoly) -> "WeylOp":
        return cls((q,), q.var)

    def is_zero(self) -> bool:
        return not self.coeffs

    def order(self) -> int | float:
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def coeff(self, i: int) -> UniPoly:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else UniPoly((), self.var)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeylOp):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __neg__(self) -> "WeylOp":
        return WeylOp(tuple(-c for c in self.coeffs), self.var)

    def scale(self, c: Rat) -> "WeylOp":
        return WeylOp(tuple(q * _rat(c) for q in self.coeffs), self.var)

    def __add__(self, other: "WeylOp") -> "WeylOp":
        if not isinstance(other, WeylOp):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return WeylOp(out, self.var)

    def apply(self, f: UniPoly) -> UniPoly:
        """Image sum_i q_i(x) f^(i)(x); the sum is finite."""
        out = UniPoly((), self.var)
        der = f
        for i, q in enumerate(self.coeffs):
            if i > 0:
                der = der.derivative()
            if der.is_zero():
                break
            if not q.is_zero():
                out = out + q * der
        return out

    def specialize(self, y0: Rat) -> "ConstCoeffOp":
        """Evaluate every coefficient at y0, yielding constant coefficients."""
        y0 = _rat(y0)
        return ConstCoeffOp(tuple(q.evaluate(y0) for q in self.coeffs))

    def truncated_symbol(self, m: int) -> MultiPoly:
        """Bivariate truncation sum_{i<=m} q_i(y) x^i, variables (x, y).

        For m at least the order this is the full algebraic symbol.
        """
        if m < 0:
            raise ValueError("truncation order must be nonnegative")
        terms: dict[tuple[int, int], Fraction] = {}
        for i, q in enumerate(self.coeffs[: m + 1]):
            for j, c in enumerate(q.coeffs):
                if c:
                    terms[(i, j)] = c
        return MultiPoly(terms, 2)

    def symbol_at(self, m: int, y0: Rat) -> UniPoly:
        """Truncated symbol with the parameter evaluated: sum_{i<=m} q_i(y0) x^i."""
        if m < 0:
            raise ValueError("truncation order must be nonnegative")
        y0 = _rat(y0)
        return UniPoly([q.evaluate(y0) for q in self.coeffs[: m + 1]], self.var)

    def conjugate_by_shift(self, a: Rat) -> "WeylOp":
        """Conjugation by the shift x -> x + a: coefficients become q_i(x - a)."""
        a = _rat(a)
        return WeylOp(tuple(q.taylor_shift(-a) for q in self.coeffs), self.var)

    def to_text(self) -> str:
        """Operator text format, one ``q[i] = ...`` line per nonzero coefficient."""
        lines = [f"q[{i}] = {q}" for i, q in enumerate(self.coeffs) if not q.is_zero()]
        return "\n".join(lines) if lines else "q[0] = 0"

    def __repr__(self) -> str:
        return f"WeylOp[{'; '.join(f'q_{i}={q}' for i, q in enumerate(self.coeffs))}]"


@dataclass(frozen=True)
class ConstCoeffOp:
    """Constant-coefficient operator sum_i c_i D^i."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        cs = tuple(_rat(c) for c in self.coeffs)
        while cs and cs[-1] == 0:
            cs = cs[:-1]
        object.__setattr__(self, "coeffs", cs)

    def order(self) -> int | float:
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def apply(self, f: UniPoly) -> UniPoly:
        out = UniPoly((), f.var)
        der = f
        for i, c in enumerate(self.coeffs):
            if i > 0:
                der = der.derivative()
            if der.is_zero():
                break
            if c:
                out = out + der * c
        return out

    def as_weyl(self, var: str = "x") -> WeylOp:
        return WeylOp(tuple(UniPoly.constant(c, var) for c in self.coeffs), var)


def ff_pairing(T: WeylOp, f: UniPoly, y0: Rat, a: Rat) -> Fraction:
    """Fischer-Fock side of the evaluation identity.

    Returns <p_{y0,d}, f(x + a)> with d = max(deg f, order T), which equals
    the specialized operator applied to f and evaluated at a.
    """
    d = max(int(f.degree()) if not f.is_zero() else 0, len(T.coeffs) - 1, 0)
    symbol = T.symbol_at(d, y0)
    return ff_inner(symbol, f.taylor_shift(a).rename(T.var))


def operator_from_matrix(columns: Sequence[UniPoly], var: str = "x") -> WeylOp:
    """Recover the unique operator of order <= d from its action on 1, x, .., x^d.

    The system is triangular: the image of x^j determines q_j once
    q_0 .. q_{j-1} are known.
    """
    cols = [c if isinstance(c, UniPoly) else UniPoly.constant(_rat(c), var) for c in columns]
    if not cols:
        raise ValueError("at least the image of 1 is required")
    coeffs: list[UniPoly] = []
    for j, img in enumerate(cols):
        acc = img.rename(var) if img.is_constant() else img
        for i in range(j):
            # subtract q_i * D^i(x^j) = q_i * (j)_i x^(j-i)
            fall = math.perm(j, i)
            acc = acc - coeffs[i] * UniPoly.monomial(fall, j - i, var)
        coeffs.append(acc * Fraction(1, math.factorial(j)))
    return WeylOp(coeffs, var)


def matrix_from_operator(T: WeylOp, d: int) -> list[UniPoly]:
    """Columns j = 0..d of the action: the image of x^j under T."""
    if d < 0:
        raise ValueError("degree bound must be nonnegative")
    return [T.apply(UniPoly.monomial(1, j, T.var)) for j in range(d + 1)]


# ---------------------------------------------------------------------------
# Multivariate operators
# ---------------------------------------------------------------------------


def index_le(a: Sequence[int], b: Sequence[int]) -> bool:
    """Product partial order on multi-indices."""
    return all(x <= y for x, y in zip(a, b))


def indices_below(alpha: Sequence[int]) -> list[tuple[int, ...]]:
    """All beta <= alpha in the product order, lexicographically sorted."""
    out: list[tuple[int, ...]] = [()]
    for bound in alpha:
        out = [e + (k,) for e in out for k in range(bound + 1)]
    return sorted(out)


class MultiWeylOp:
    """Operator sum_alpha q_alpha(x) d^alpha with finite support."""

    __slots__ = ("terms", "arity")

    def __init__(self, terms: Mapping[tuple[int, ...], MultiPoly | Rat] | None = None, arity: int = 1):
        if arity < 1:
            raise ValueError("arity must be at least 1")
        clean: dict[tuple[int, ...], MultiPoly] = {}
        for alpha, q in (terms or {}).items():
            alpha = tuple(alpha)
            if len(alpha) != arity or any(k < 0 for k in alpha):
                raise ValueError(f"bad derivative index {alpha} for arity {arity}")
            if not isinstance(q, MultiPoly):
                q = MultiPoly.constant(_rat(q), arity)
            if q.arity != arity:
                raise ValueError("coefficient arity mismatch")
            if not q.is_zero():
                clean[alpha] = q
        self.terms = clean
        self.arity = arity

    @classmethod
    def identity(cls, arity: int) -> "MultiWeylOp":
        return cls({(0,) * arity: MultiPoly.constant(1, arity)}, arity)

    @classmethod
    def from_weyl(cls, T: WeylOp) -> "MultiWeylOp":
        return cls({(i,): MultiPoly.from_uni(q) for i, q in enumerate(T.coeffs)}, 1)

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, alpha: Sequence[int]) -> MultiPoly:
        return self.terms.get(tuple(alpha), MultiPoly({}, self.arity))

    def is_constant_coeff(self) -> bool:
        return all(q.is_constant() for q in self.terms.values())

    def support(self) -> list[tuple[int, ...]]:
        return sorted(self.terms)

    def max_order(self) -> tuple[int, ...]:
        """Componentwise maximum of the derivative multi-indices."""
        out = [0] * self.arity
        for alpha in self.terms:
            for i, k in enumerate(alpha):
                if k > out[i]:
                    out[i] = k
        return tuple(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiWeylOp):
            return NotImplemented
        return self.arity == other.arity and self.terms == other.terms

    def __neg__(self) -> "MultiWeylOp":
        return MultiWeylOp({a: -q for a, q in self.terms.items()}, self.arity)

    def apply(self, f: MultiPoly) -> MultiPoly:
        if f.arity != self.arity:
            raise ValueError(f"arity mismatch: {f.arity} vs {self.arity}")
        out = MultiPoly({}, self.arity)
        for alpha, q in self.terms.items():
            der = f
            for i, k in enumerate(alpha):
                if k:
                    der = der.derivative(i, k)
                if der.is_zero():
                    break
            if not der.is_zero():
                out = out + q * der
        return out

    def specialize(self, y0: Sequence[Rat]) -> "MultiWeylOp":
        """Evaluate every coefficient at y0 (kept as constant coefficients)."""
        pt = [_rat(v) for v in y0]
        if len(pt) != self.arity:
            raise ValueError("specialization point arity mismatch")
        return MultiWeylOp(
            {a: MultiPoly.constant(q.evaluate(pt), self.arity) for a, q in self.terms.items()},
            self.arity,
        )

    def truncated_symbol(self, alpha: Sequence[int]) -> MultiPoly:
        """Symbol sum_{beta <= alpha} q_beta(y) x^beta in 2n variables (x first)."""
        alpha = tuple(alpha)
        if len(alpha) != self.arity:
            raise ValueError("truncation index arity mismatch")
        n = self.arity
        terms: dict[tuple[int, ...], Fraction] = {}
        for beta, q in self.terms.items():
            if not index_le(beta, alpha):
                continue
            for e, c in q.terms.items():
                key = beta + e
                terms[key] = terms.get(key, Fraction(0)) + c
        return MultiPoly(terms, 2 * n)

    def symbol_at(self, alpha: Sequence[int], y0: Sequence[Rat]) -> MultiPoly:
        """Truncated symbol with the parameter evaluated at y0 (arity n)."""
        alpha = tuple(alpha)
        pt = [_rat(v) for v in y0]
        if len(alpha) != self.arity or len(pt) != self.arity:
            raise ValueError("arity mismatch")
        terms = {}
        for beta, q in self.terms.items():
            if index_le(beta, alpha):
                v = q.evaluate(pt)
                if v:
                    terms[beta] = v
        return MultiPoly(terms, self.arity)

    def to_text(self) -> str:
        lines = []
        for alpha in self.support():
            idx = "(" + ", ".join(str(k) for k in alpha) + ")"
            lines.append(f"q[{idx}] = {self.terms[alpha]}")
        if not lines:
            idx = "(" + ", ".join("0" for _ in range(self.arity)) + ")"
            return f"q[{idx}] = 0"
        return "\n".join(lines)

    def __repr__(self) -> str:
        return f"MultiWeylOp(arity={self.arity}, support={self.support()})"


def mv_ff_pairing(
    T: MultiWeylOp, f: MultiPoly, y0: Sequence[Rat], a: Sequence[Rat]
) -> Fraction:
    """Multivariate evaluation identity, Fischer-Fock side."""
    alpha = tuple(
        max(df, dt) for df, dt in zip(f.multidegree(), T.max_order())
    )
    symbol = T.symbol_at(alpha, y0)
    return ff_inner(symbol, f.taylor_shift(a))


# ---------------------------------------------------------------------------
# Operator text format
# ---------------------------------------------------------------------------


def _parse_index(token: str, lineno: int) -> int | tuple[int, ...]:
    token = token.strip()
    if token.startswith("("):
        if not token.endswith(")"):
            raise ParseError(f"line {lineno}: unterminated index tuple", 0)
        parts = [p.strip() for p in token[1:-1].split(",") if p.strip()]
        if not parts:
            raise ParseError(f"line {lineno}: empty index tuple", 0)
        try:
            idx = tuple(int(p) for p in parts)
        except ValueError:
            raise ParseError(f"line {lineno}: index entries must be integers", 0) from None
        if any(k < 0 for k in idx):
            raise ParseError(f"line {lineno}: negative derivative index", 0)
        return idx
    if not token.isdigit():
        raise ParseError(f"line {lineno}: malformed index {token!r}", 0)
    return int(token)


def parse_operator_text(text: str) -> WeylOp | MultiWeylOp:
    """Parse the ``q[i] = poly`` / ``q[(a1,...,an)] = poly`` operator format.

    Blank lines and ``#`` comments are ignored.  Integer indices give a
    univariate operator (coefficients in x); tuple indices give a
    multivariate one (coefficients in x1..xn, arity = tuple length).
    """
    uni: dict[int, UniPoly] = {}
    multi: dict[tuple[int, ...], str] = {}
    arity: int | None = None
    saw_uni = saw_multi = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not line.startswith("q["):
            raise ParseError(f"line {lineno}: expected 'q[...] = ...'", 0)
        close = line.find("]")
        if close < 0 or "=" not in line[close:]:
            raise ParseError(f"line {lineno}: expected 'q[...] = ...'", 0)
        idx = _parse_index(line[2:close], lineno)
        rhs = line[close + 1 :].split("=", 1)[1].strip()
        if isinstance(idx, int):
            saw_uni = True
            if idx in uni:
                raise ParseError(f"line {lineno}: duplicate index {idx}", 0)
            try:
                uni[idx] = parse_unipoly(rhs, "x")
            except ParseError as exc:
                raise ParseError(f"line {lineno}: {exc}", exc.pos) from None
        else:
            saw_multi = True
            if arity is None:
                arity = len(idx)
            elif len(idx) != arity:
                raise ParseError(f"line {lineno}: index arity changed", 0)
            if idx in multi:
                raise ParseError(f"line {lineno}: duplicate index {idx}", 0)
            multi[idx] = rhs
        if saw_uni and saw_multi:
            raise ParseError(f"line {lineno}: mixed integer and tuple indices", 0)
    if saw_multi:
        assert arity is not None
        terms = {}
        for idx, rhs in multi.items():
            try:
                terms[idx] = parse_multipoly(rhs, arity)
            except ParseError as exc:
                raise ParseError(f"operator coefficient {idx}: {exc}", exc.pos) from None
        return MultiWeylOp(terms, arity)
    if not saw_uni:
        raise ParseError("no operator coefficients found", 0)
    order = max(uni)
    coeffs = [uni.get(i, UniPoly((), "x")) for i in range(order + 1)]
    return WeylOp(coeffs, "x")
