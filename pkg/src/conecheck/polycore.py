"""Exact polynomial arithmetic over the rationals with real-root analysis.

Univariate polynomials are dense coefficient tuples, multivariate ones are
sparse exponent-vector maps; every coefficient is a `fractions.Fraction` and
nothing here (or in any caller) ever rounds.  On top of the ring operations
the module provides square-free (Yun) decomposition, Sturm counts, real-root
isolation with rational interval endpoints, exact decisions for "nonnegative
on all of R" and "positive on all of R" (with rational witnesses on failure),
and the Fischer-Fock inner product <f, g> = sum_a a! f_a g_a.

It also hosts the polynomial text grammar shared by the command line tools:
rational literals ``p`` or ``p/q``, variables ``x``, ``y``, ``x1..xN``,
operators ``+ - * ^`` and parentheses.  Implicit multiplication is a syntax
error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Rat = Union[int, Fraction]

NEG_INF = float("-inf")


def _rat(x: Rat) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


class UniPoly:
    """Dense univariate polynomial; ``coeffs[i]`` is the coefficient of x^i.

    The zero polynomial stores no coefficients and has degree -inf.  Constant
    polynomials compare equal regardless of the variable name; non-constant
    arithmetic between different variables is rejected.
    """

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable[Rat] = (), var: str = "x"):
        cs = [_rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        self.var = var

    @classmethod
    def constant(cls, c: Rat, var: str = "x") -> "UniPoly":
        return cls((c,), var)

    @classmethod
    def monomial(cls, c: Rat, k: int, var: str = "x") -> "UniPoly":
        if k < 0:
            raise ValueError("exponent must be nonnegative")
        return cls((0,) * k + (c,), var)

    @classmethod
    def variable(cls, var: str = "x") -> "UniPoly":
        return cls((0, 1), var)

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int | float:
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def leading(self) -> Fraction:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def _join_var(self, other: "UniPoly") -> str:
        if self.is_constant():
            return other.var
        if other.is_constant():
            return self.var
        if self.var != other.var:
            raise ValueError(f"variable mismatch: {self.var!r} vs {other.var!r}")
        return self.var

    @staticmethod
    def _coerce(value, var: str) -> "UniPoly":
        if isinstance(value, UniPoly):
            return value
        return UniPoly.constant(_rat(value), var)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = UniPoly.constant(other, self.var)
        if not isinstance(other, UniPoly):
            return NotImplemented
        if self.coeffs != other.coeffs:
            return False
        return self.is_constant() or self.var == other.var

    def __hash__(self) -> int:
        return hash((self.coeffs, self.var if not self.is_constant() else None))

    def __neg__(self) -> "UniPoly":
        return UniPoly(tuple(-c for c in self.coeffs), self.var)

    def __add__(self, other) -> "UniPoly":
        other = self._coerce(other, self.var)
        var = self._join_var(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return UniPoly(out, var)

    __radd__ = __add__

    def __sub__(self, other) -> "UniPoly":
        return self + (-self._coerce(other, self.var))

    def __rsub__(self, other) -> "UniPoly":
        return self._coerce(other, self.var) - self

    def __mul__(self, other) -> "UniPoly":
        if isinstance(other, (int, Fraction)):
            c = _rat(other)
            if c == 0:
                return UniPoly((), self.var)
            return UniPoly(tuple(c * a for a in self.coeffs), self.var)
        if not isinstance(other, UniPoly):
            return NotImplemented
        var = self._join_var(other)
        if self.is_zero() or other.is_zero():
            return UniPoly((), var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly(out, var)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "UniPoly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out = UniPoly.constant(1, self.var)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def __divmod__(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        other = self._coerce(other, self.var)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        var = self._join_var(other)
        rem = list(self.coeffs)
        db = len(other.coeffs) - 1
        lb = other.coeffs[-1]
        quo = [Fraction(0)] * max(len(rem) - db, 0)
        while len(rem) - 1 >= db and rem:
            k = len(rem) - 1 - db
            f = rem[-1] / lb
            quo[k] = f
            rem.pop()
            for i in range(db):
                rem[k + i] -= f * other.coeffs[i]
            while rem and rem[-1] == 0:
                rem.pop()
        return UniPoly(quo, var), UniPoly(rem, var)

    def __mod__(self, other: "UniPoly") -> "UniPoly":
        return divmod(self, other)[1]

    def __floordiv__(self, other: "UniPoly") -> "UniPoly":
        return divmod(self, other)[0]

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        lc = self.leading()
        return self if lc == 1 else self * (1 / lc)

    def evaluate(self, x: Rat) -> Fraction:
        """Exact Horner evaluation."""
        x = _rat(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self, order: int = 1) -> "UniPoly":
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        cs = self.coeffs
        for _ in range(order):
            cs = tuple(cs[i] * i for i in range(1, len(cs)))
            if not cs:
                break
        return UniPoly(cs, self.var)

    def taylor_shift(self, a: Rat) -> "UniPoly":
        """Return p(x + a), computed exactly."""
        a = _rat(a)
        if a == 0 or self.is_constant():
            return self
        out = UniPoly((), self.var)
        xa = UniPoly((a, 1), self.var)
        for c in reversed(self.coeffs):
            out = out * xa + c
        return out

    def rename(self, var: str) -> "UniPoly":
        return UniPoly(self.coeffs, var)

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mag = abs(c)
            if k == 0:
                body = str(mag)
            elif mag == 1:
                body = self.var if k == 1 else f"{self.var}^{k}"
            else:
                body = f"{mag}*{self.var}" if k == 1 else f"{mag}*{self.var}^{k}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"UniPoly({self})"


class MultiPoly:
    """Sparse multivariate polynomial: exponent tuple -> nonzero Fraction."""

    __slots__ = ("terms", "arity")

    def __init__(self, terms: Mapping[tuple[int, ...], Rat] | None = None, arity: int = 1):
        if arity < 1:
            raise ValueError("arity must be at least 1")
        clean: dict[tuple[int, ...], Fraction] = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != arity:
                raise ValueError(f"exponent {e} does not match arity {arity}")
            if any(k < 0 for k in e):
                raise ValueError(f"negative exponent in {e}")
            c = _rat(c)
            if c != 0:
                clean[e] = c
        self.terms: dict[tuple[int, ...], Fraction] = clean
        self.arity = arity

    @classmethod
    def constant(cls, c: Rat, arity: int) -> "MultiPoly":
        return cls({(0,) * arity: c}, arity)

    @classmethod
    def monomial(cls, c: Rat, expo: Sequence[int], arity: int) -> "MultiPoly":
        return cls({tuple(expo): c}, arity)

    @classmethod
    def variable(cls, index: int, arity: int) -> "MultiPoly":
        e = [0] * arity
        e[index] = 1
        return cls({tuple(e): 1}, arity)

    @classmethod
    def from_uni(cls, p: UniPoly) -> "MultiPoly":
        return cls({(i,): c for i, c in enumerate(p.coeffs)}, 1)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((0,) * self.arity, Fraction(0))

    def coeff(self, expo: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(expo), Fraction(0))

    def total_degree(self) -> int | float:
        return max((sum(e) for e in self.terms), default=NEG_INF)

    def degree_in(self, i: int) -> int | float:
        return max((e[i] for e in self.terms), default=NEG_INF)

    def multidegree(self) -> tuple[int, ...]:
        """Componentwise maximum exponent (all zeros for the zero polynomial)."""
        out = [0] * self.arity
        for e in self.terms:
            for i, k in enumerate(e):
                if k > out[i]:
                    out[i] = k
        return tuple(out)

    def _check_arity(self, other: "MultiPoly") -> None:
        if self.arity != other.arity:
            raise ValueError(f"arity mismatch: {self.arity} vs {other.arity}")

    @staticmethod
    def _coerce(value, arity: int) -> "MultiPoly":
        if isinstance(value, MultiPoly):
            return value
        return MultiPoly.constant(_rat(value), arity)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(other, self.arity)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.arity == other.arity and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.arity, frozenset(self.terms.items())))

    def __neg__(self) -> "MultiPoly":
        return MultiPoly({e: -c for e, c in self.terms.items()}, self.arity)

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other, self.arity)
        self._check_arity(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return MultiPoly(out, self.arity)

    __radd__ = __add__

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._coerce(other, self.arity))

    def __rsub__(self, other) -> "MultiPoly":
        return self._coerce(other, self.arity) - self

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Fraction)):
            c = _rat(other)
            return MultiPoly({e: c * v for e, v in self.terms.items()} if c else {}, self.arity)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        self._check_arity(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return MultiPoly(out, self.arity)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MultiPoly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out = MultiPoly.constant(1, self.arity)
        for _ in range(k):
            out = out * self
        return out

    def evaluate(self, point: Sequence[Rat]) -> Fraction:
        pt = [_rat(x) for x in point]
        if len(pt) != self.arity:
            raise ValueError(f"point arity {len(pt)} does not match {self.arity}")
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(pt, e):
                if k:
                    v *= x**k
            total += v
        return total

    def derivative(self, index: int, order: int = 1) -> "MultiPoly":
        if not 0 <= index < self.arity:
            raise ValueError("variable index out of range")
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        cur = self.terms
        for _ in range(order):
            nxt: dict[tuple[int, ...], Fraction] = {}
            for e, c in cur.items():
                k = e[index]
                if k:
                    e2 = e[:index] + (k - 1,) + e[index + 1 :]
                    nxt[e2] = nxt.get(e2, Fraction(0)) + c * k
            cur = nxt
            if not cur:
                break
        return MultiPoly(cur, self.arity)

    def taylor_shift(self, shifts: Sequence[Rat]) -> "MultiPoly":
        """Return p(x + a) for a shift vector a, one variable at a time."""
        aa = [_rat(a) for a in shifts]
        if len(aa) != self.arity:
            raise ValueError("shift arity mismatch")
        out = self
        for i, ai in enumerate(aa):
            if ai:
                out = out._shift_one(i, ai)
        return out

    def _shift_one(self, index: int, a: Fraction) -> "MultiPoly":
        out: dict[tuple[int, ...], Fraction] = {}
        for e, c in self.terms.items():
            k = e[index]
            for j in range(k + 1):
                e2 = e[:index] + (j,) + e[index + 1 :]
                v = c * math.comb(k, j) * a ** (k - j)
                out[e2] = out.get(e2, Fraction(0)) + v
        return MultiPoly(out, self.arity)

    def partial_eval(self, values: Mapping[int, Rat]) -> "MultiPoly":
        """Substitute rationals for some variables; the rest keep their order."""
        vals = {i: _rat(v) for i, v in values.items()}
        keep = [i for i in range(self.arity) if i not in vals]
        if not keep:
            raise ValueError("at least one variable must remain")
        out: dict[tuple[int, ...], Fraction] = {}
        for e, c in self.terms.items():
            v = c
            for i, x in vals.items():
                if e[i]:
                    v *= x ** e[i]
            e2 = tuple(e[i] for i in keep)
            out[e2] = out.get(e2, Fraction(0)) + v
        return MultiPoly(out, len(keep))

    def to_uni(self, var: str = "x") -> UniPoly:
        if self.arity != 1:
            raise ValueError("only arity-1 polynomials convert to UniPoly")
        d = max((e[0] for e in self.terms), default=-1)
        cs = [Fraction(0)] * (d + 1)
        for e, c in self.terms.items():
            cs[e[0]] = c
        return UniPoly(cs, var)

    def format(self, names: Sequence[str] | None = None) -> str:
        """Grammar-compatible text with the given variable names."""
        if names is None:
            names = [f"x{i + 1}" for i in range(self.arity)]
        if len(names) != self.arity:
            raise ValueError("one name per variable required")
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mag = abs(c)
            factors = []
            for name, k in zip(names, e):
                if k == 1:
                    factors.append(name)
                elif k > 1:
                    factors.append(f"{name}^{k}")
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"MultiPoly({self}, arity={self.arity})"


# ---------------------------------------------------------------------------
# gcd, square-free decomposition
# ---------------------------------------------------------------------------


def exact_div(a: UniPoly, b: UniPoly) -> UniPoly:
    """Quotient a / b, raising if the division is not exact."""
    q, r = divmod(a, b)
    if not r.is_zero():
        raise ArithmeticError("division is not exact")
    return q


def _int_prim(p: UniPoly) -> list[int]:
    """Integer, primitive, same-sign copy of the coefficient list."""
    if not p.coeffs:
        return []
    den = 1
    for c in p.coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in p.coeffs]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    return ints


def _iprim(cs: list[int]) -> list[int]:
    g = 0
    for v in cs:
        g = math.gcd(g, v)
    if g > 1:
        return [v // g for v in cs]
    return cs


def _prem_signed(a: list[int], b: list[int]) -> list[int]:
    """Remainder of a by b, up to a positive constant factor (integer lists)."""
    db = len(b) - 1
    lb = b[-1]
    r = list(a)
    steps = 0
    while r and len(r) - 1 >= db:
        lead = r[-1]
        new = [lb * c for c in r[:-1]]
        off = len(r) - 1 - db
        for i in range(db):
            new[off + i] -= lead * b[i]
        while new and new[-1] == 0:
            new.pop()
        r = new
        steps += 1
    if steps and lb < 0 and steps % 2 == 1:
        r = [-c for c in r]
    return _iprim(r)


def _igcd_poly(a: list[int], b: list[int]) -> list[int]:
    while b:
        a, b = b, _prem_signed(a, b)
    return _iprim(a)


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd over Q[x], via a primitive integer remainder sequence."""
    var = a.var if not a.is_constant() else b.var
    ia, ib = _int_prim(a), _int_prim(b)
    if len(ia) < len(ib):
        ia, ib = ib, ia
    g = _igcd_poly(ia, ib) if ib else ia
    if not g:
        return UniPoly((), var)
    return UniPoly([Fraction(c) for c in g], var).monic()


def squarefree_part(p: UniPoly) -> UniPoly:
    """Monic product of the distinct irreducible factors of p."""
    if p.is_zero():
        raise ValueError("zero polynomial")
    if p.degree() == 0:
        return UniPoly.constant(1, p.var)
    g = poly_gcd(p, p.derivative())
    return exact_div(p.monic(), g).monic()


def squarefree_decompose(p: UniPoly) -> tuple[Fraction, list[tuple[UniPoly, int]]]:
    """Yun decomposition p = c * prod f_i^{m_i} with monic, coprime, square-free f_i."""
    if p.is_zero():
        raise ValueError("zero polynomial has no square-free decomposition")
    lead = p.leading()
    if p.degree() == 0:
        return lead, []
    pm = p.monic()
    dp = pm.derivative()
    g = poly_gcd(pm, dp)
    if g.degree() == 0:
        return lead, [(pm, 1)]
    c = exact_div(pm, g)
    d = exact_div(dp, g) - c.derivative()
    factors: list[tuple[UniPoly, int]] = []
    i = 1
    while c.degree() > 0:
        f = poly_gcd(c, d) if not d.is_zero() else c.monic()
        if f.degree() > 0:
            factors.append((f.monic(), i))
        c = exact_div(c, f)
        d = exact_div(d, f) - c.derivative()
        i += 1
    return lead, factors


# ---------------------------------------------------------------------------
# Sturm counts and root isolation
# ---------------------------------------------------------------------------


class _SturmChain:
    """Sturm chain of a square-free polynomial, reusable for many counts."""

    def __init__(self, p: UniPoly):
        chain = [_int_prim(p)]
        if len(chain[0]) > 1:
            der = [chain[0][i] * i for i in range(1, len(chain[0]))]
            chain.append(_iprim(der))
            while len(chain[-1]) > 1:
                rem = _prem_signed(chain[-2], chain[-1])
                if not rem:
                    break
                chain.append([-c for c in rem])
        self.chain = chain

    @staticmethod
    def _eval(cs: list[int], x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(cs):
            acc = acc * x + c
        return acc

    def _variations_at(self, x: Fraction) -> int:
        signs = []
        for cs in self.chain:
            v = self._eval(cs, x)
            if v:
                signs.append(v > 0)
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    def _variations_inf(self, positive: bool) -> int:
        signs = []
        for cs in self.chain:
            lc = cs[-1] if cs else 0
            if lc:
                s = lc > 0
                if not positive and (len(cs) - 1) % 2 == 1:
                    s = not s
                signs.append(s)
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    def count(self, lo: Fraction | None, hi: Fraction | None) -> int:
        """Distinct real roots in (lo, hi]; None endpoints mean -inf / +inf."""
        va = self._variations_at(lo) if lo is not None else self._variations_inf(False)
        vb = self._variations_at(hi) if hi is not None else self._variations_inf(True)
        return va - vb


def sturm_count(p: UniPoly, lo: Rat | None = None, hi: Rat | None = None) -> int:
    """Number of distinct real roots of a square-free p in (lo, hi].

    Callers must pass the square-free part; a non-square-free input is
    rejected so multiplicity information is never silently lost.
    """
    if p.is_zero():
        raise ValueError("zero polynomial")
    if p.degree() == 0:
        return 0
    if poly_gcd(p, p.derivative()).degree() > 0:
        raise ValueError("polynomial is not square-free; decompose first")
    lo_f = _rat(lo) if lo is not None else None
    hi_f = _rat(hi) if hi is not None else None
    if lo_f is not None and hi_f is not None and lo_f > hi_f:
        raise ValueError("empty interval")
    return _SturmChain(p).count(lo_f, hi_f)


def root_bound(p: UniPoly) -> Fraction:
    """Cauchy bound: every real root r satisfies |r| < bound."""
    if p.is_zero() or p.degree() == 0:
        return Fraction(1)
    lc = abs(p.leading())
    m = max(abs(c) for c in p.coeffs[:-1])
    return 1 + m / lc


@dataclass(frozen=True)
class RootIsolation:
    """Disjoint open rational intervals, one real root each, with multiplicities."""

    intervals: tuple[tuple[Fraction, Fraction], ...]
    multiplicities: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.intervals)


def _isolate_squarefree(q: UniPoly) -> list[tuple[Fraction, Fraction]]:
    if q.degree() <= 0:
        return []
    chain = _SturmChain(q)
    bound = root_bound(q)
    out: list[tuple[Fraction, Fraction]] = []
    stack = [(-bound, bound, chain.count(-bound, bound))]
    while stack:
        lo, hi, cnt = stack.pop()
        if cnt == 0:
            continue
        if cnt == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        if q.evaluate(mid) == 0:
            # rational root exactly at the midpoint: carve a private interval
            w = (hi - lo) / 4
            while (
                q.evaluate(mid - w) == 0
                or q.evaluate(mid + w) == 0
                or chain.count(mid - w, mid + w) != 1
            ):
                w /= 2
            out.append((mid - w, mid + w))
            stack.append((lo, mid - w, chain.count(lo, mid - w)))
            stack.append((mid + w, hi, chain.count(mid + w, hi)))
        else:
            left = chain.count(lo, mid)
            stack.append((lo, mid, left))
            stack.append((mid, hi, cnt - left))
    out.sort()
    return out


def isolate_real_roots(p: UniPoly) -> RootIsolation:
    """Isolate every real root of p; interval endpoints are never roots."""
    if p.is_zero():
        raise ValueError("zero polynomial")
    _, factors = squarefree_decompose(p)
    sf = UniPoly.constant(1, p.var)
    for f, _m in factors:
        sf = sf * f
    intervals = _isolate_squarefree(sf)
    if not intervals:
        return RootIsolation((), ())
    chains = [(m, _SturmChain(f)) for f, m in factors]
    mults = []
    for lo, hi in intervals:
        for m, ch in chains:
            if ch.count(lo, hi) == 1:
                mults.append(m)
                break
        else:  # pragma: no cover - factors partition the roots
            raise RuntimeError("root not attributed to a square-free factor")
    return RootIsolation(tuple(intervals), tuple(mults))


def refine_interval(
    p: UniPoly, lo: Fraction, hi: Fraction, chain: _SturmChain | None = None
) -> tuple[Fraction, Fraction]:
    """Halve (roughly) an isolating interval of square-free p."""
    ch = chain or _SturmChain(p)
    mid = (lo + hi) / 2
    if p.evaluate(mid) == 0:
        w = min(mid - lo, hi - mid) / 2
        return (mid - w, mid + w)
    if ch.count(lo, mid) == 1:
        return (lo, mid)
    return (mid, hi)


# ---------------------------------------------------------------------------
# Global sign decisions on the real line
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SignResult:
    """Outcome of a global sign decision.

    On failure ``x0`` is a rational point where the claimed sign fails
    (strictly negative value for the nonnegativity check, value <= 0 for the
    positivity check).  When positivity fails only through an irrational zero
    of a nonnegative polynomial no rational ``x0`` exists; ``zero_interval``
    then isolates such a zero instead.
    """

    ok: bool
    x0: Fraction | None = None
    zero_interval: tuple[Fraction, Fraction] | None = None


def _negative_point(p: UniPoly) -> Fraction:
    """A rational x0 with p(x0) < 0, for p known to take negative values.

    The endpoints of the isolating intervals of p's roots, plus the leftmost
    one, hit every maximal open region where p has constant sign, so scanning
    them is guaranteed to find a strictly negative value.
    """
    sf = squarefree_part(p)
    intervals = _isolate_squarefree(sf)
    if not intervals:
        candidates = [Fraction(0)]
    else:
        candidates = [intervals[0][0]] + [hi for _, hi in intervals]
    for x in candidates:
        if p.evaluate(x) < 0:
            return x
    raise RuntimeError("internal error: negative value exists but was not sampled")


def nonneg_on_R(p: UniPoly) -> SignResult:
    """Decide p(x) >= 0 for every real x, exactly.

    True iff p is identically zero, or p has even degree, positive leading
    coefficient, and every real root of even multiplicity (equivalently, the
    product of its odd-multiplicity square-free factors has no real root).
    On failure the witness point is exact and strictly negative.
    """
    if p.is_zero():
        return SignResult(True)
    deg = p.degree()
    if deg == 0:
        c = p.leading()
        return SignResult(True) if c >= 0 else SignResult(False, x0=Fraction(0))
    if deg % 2 == 1 or p.leading() < 0:
        return SignResult(False, x0=_negative_point(p))
    _, factors = squarefree_decompose(p)
    odd = UniPoly.constant(1, p.var)
    for f, m in factors:
        if m % 2 == 1:
            odd = odd * f
    if odd.degree() <= 0 or _SturmChain(odd).count(None, None) == 0:
        return SignResult(True)
    return SignResult(False, x0=_negative_point(p))


def positive_on_R(p: UniPoly) -> SignResult:
    """Decide p(x) > 0 for every real x, exactly.

    On failure: ``x0`` is a rational point with p(x0) <= 0 whenever one
    exists (in particular whenever p is somewhere negative or has a rational
    zero); otherwise p is nonnegative with only irrational zeros and
    ``zero_interval`` isolates one of them.
    """
    if p.is_zero():
        return SignResult(False, x0=Fraction(0))
    deg = p.degree()
    if deg == 0:
        c = p.leading()
        return SignResult(True) if c > 0 else SignResult(False, x0=Fraction(0))
    if deg % 2 == 1 or p.leading() < 0:
        return SignResult(False, x0=_negative_point(p))
    sf = squarefree_part(p)
    if _SturmChain(sf).count(None, None) == 0:
        return SignResult(True)
    nn = nonneg_on_R(p)
    if not nn.ok:
        return SignResult(False, x0=nn.x0)
    roots = rational_roots(sf)
    if roots:
        return SignResult(False, x0=roots[0])
    return SignResult(False, zero_interval=_isolate_squarefree(sf)[0])


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            if i != n // i:
                out.append(n // i)
        i += 1
    return sorted(out)


def rational_roots(p: UniPoly) -> list[Fraction]:
    """All rational roots of p (each listed once), via the rational root test."""
    if p.is_zero():
        raise ValueError("zero polynomial")
    cs = _int_prim(p)
    roots = []
    shift = 0
    while cs and cs[0] == 0:
        cs = cs[1:]
        shift += 1
    if shift:
        roots.append(Fraction(0))
    if len(cs) <= 1:
        return sorted(roots)
    for num in _divisors(cs[0]):
        for den in _divisors(cs[-1]):
            if math.gcd(num, den) != 1:
                continue
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if p.evaluate(cand) == 0 and cand not in roots:
                    roots.append(cand)
    return sorted(roots)


# ---------------------------------------------------------------------------
# Fischer-Fock inner product
# ---------------------------------------------------------------------------


def ff_inner(f, g) -> Fraction:
    """Fischer-Fock inner product: sum over monomials of a! * f_a * g_a."""
    if isinstance(f, UniPoly) and isinstance(g, UniPoly):
        f._join_var(g)
        total = Fraction(0)
        for i in range(min(len(f.coeffs), len(g.coeffs))):
            if f.coeffs[i] and g.coeffs[i]:
                total += math.factorial(i) * f.coeffs[i] * g.coeffs[i]
        return total
    if isinstance(f, MultiPoly) and isinstance(g, MultiPoly):
        if f.arity != g.arity:
            raise ValueError(f"arity mismatch: {f.arity} vs {g.arity}")
        total = Fraction(0)
        small, big = (f, g) if len(f.terms) <= len(g.terms) else (g, f)
        for e, c in small.terms.items():
            other = big.terms.get(e)
            if other:
                w = 1
                for k in e:
                    w *= math.factorial(k)
                total += w * c * other
        return total
    raise TypeError("ff_inner expects two UniPoly or two MultiPoly of equal arity")


# ---------------------------------------------------------------------------
# Polynomial text grammar
# ---------------------------------------------------------------------------


class ParseError(ValueError):
    """Syntax error with a character position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


_TOKEN_OPS = set("+-*^()")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _TOKEN_OPS:
            tokens.append(("op", ch, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "/":
                k = j + 1
                while k < n and text[k].isdigit():
                    k += 1
                if k == j + 1:
                    raise ParseError("expected digits after '/'", j + 1)
                tokens.append(("num", text[i:k], i))
                i = k
            else:
                tokens.append(("num", text[i:j], i))
                i = j
            continue
        if ch.isalpha():
            j = i
            while j < n and (text[j].isalnum()):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    return tokens


class _PolyParser:
    """Recursive-descent parser over an arbitrary set of named variables."""

    def __init__(self, text: str, env: Mapping[str, MultiPoly], arity: int):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.env = env
        self.arity = arity
        self.text_len = len(text)

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _take(self):
        tok = self._peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.text_len)
        self.pos += 1
        return tok

    def parse(self) -> MultiPoly:
        value = self._expr()
        tok = self._peek()
        if tok is not None:
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return value

    def _expr(self) -> MultiPoly:
        value = self._term()
        while True:
            tok = self._peek()
            if tok and tok[0] == "op" and tok[1] in "+-":
                self._take()
                rhs = self._term()
                value = value + rhs if tok[1] == "+" else value - rhs
            else:
                return value

    def _term(self) -> MultiPoly:
        value = self._unary()
        while True:
            tok = self._peek()
            if tok and tok[0] == "op" and tok[1] == "*":
                self._take()
                value = value * self._unary()
            elif tok and tok[0] in ("num", "name") or (tok and tok[1] == "("):
                raise ParseError(
                    "implicit multiplication is not allowed; insert '*'", tok[2]
                )
            else:
                return value

    def _unary(self) -> MultiPoly:
        tok = self._peek()
        if tok and tok[0] == "op" and tok[1] in "+-":
            self._take()
            value = self._unary()
            return value if tok[1] == "+" else -value
        return self._power()

    def _power(self) -> MultiPoly:
        base = self._primary()
        tok = self._peek()
        if tok and tok[0] == "op" and tok[1] == "^":
            self._take()
            exp_tok = self._take()
            if exp_tok[0] != "num" or "/" in exp_tok[1]:
                raise ParseError("exponent must be a nonnegative integer", exp_tok[2])
            return base ** int(exp_tok[1])
        return base

    def _primary(self) -> MultiPoly:
        tok = self._take()
        kind, value, pos = tok
        if kind == "num":
            if "/" in value:
                num, den = value.split("/")
                return MultiPoly.constant(Fraction(int(num), int(den)), self.arity)
            return MultiPoly.constant(int(value), self.arity)
        if kind == "name":
            poly = self.env.get(value)
            if poly is None:
                raise ParseError(f"unknown variable {value!r}", pos)
            return poly
        if kind == "op" and value == "(":
            inner = self._expr()
            close = self._take()
            if close[0] != "op" or close[1] != ")":
                raise ParseError("expected ')'", close[2])
            return inner
        raise ParseError(f"unexpected {value!r}", pos)


def _collect_names(text: str) -> list[str]:
    return sorted({tok[1] for tok in _tokenize(text) if tok[0] == "name"})


def parse_unipoly(text: str, var: str = "x") -> UniPoly:
    """Parse a univariate polynomial in the named variable."""
    names = _collect_names(text)
    bad = [n for n in names if n != var]
    if bad:
        raise ParseError(f"unexpected variable {bad[0]!r}; expected {var!r}", 0)
    env = {var: MultiPoly.variable(0, 1)}
    return _PolyParser(text, env, 1).parse().to_uni(var)


def _numbered_env(names: Iterable[str], arity: int | None) -> tuple[dict, int]:
    indices = {}
    for n in names:
        if len(n) < 2 or n[0] != "x" or not n[1:].isdigit() or int(n[1:]) < 1:
            raise ParseError(f"variable {n!r} is not of the form x1..xN", 0)
        indices[n] = int(n[1:]) - 1
    width = arity if arity is not None else (max(indices.values(), default=0) + 1)
    for n, i in indices.items():
        if i >= width:
            raise ParseError(f"variable {n!r} exceeds arity {width}", 0)
    env = {n: MultiPoly.variable(i, width) for n, i in indices.items()}
    return env, width


def parse_multipoly(text: str, arity: int | None = None) -> MultiPoly:
    """Parse a polynomial in variables x1..xN (N = arity when given)."""
    env, width = _numbered_env(_collect_names(text), arity)
    return _PolyParser(text, env, width).parse()


def parse_poly_auto(text: str) -> UniPoly | MultiPoly:
    """Parse with variable auto-detection.

    Plain ``x`` (or ``y``) gives a UniPoly; ``x1..xN`` gives a MultiPoly; the
    pair ``x, y`` gives an arity-2 MultiPoly with x first.  Pure constants
    parse as UniPoly in ``x``.
    """
    names = _collect_names(text)
    if not names or names == ["x"]:
        return parse_unipoly(text, "x")
    if names == ["y"]:
        return parse_unipoly(text, "y")
    if set(names) <= {"x", "y"}:
        env = {"x": MultiPoly.variable(0, 2), "y": MultiPoly.variable(1, 2)}
        return _PolyParser(text, env, 2).parse()
    return parse_multipoly(text)
