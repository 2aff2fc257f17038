"""Moment sequences, atomic measure families, and convolution operators.

A measure family is finitely many pairwise-distinct rational atoms with
weights that are polynomials in one parameter y (constants included).  Such
families exactly represent the convolution operators arising here: the
operator with coefficients q_i(y) = (1/i!) sum_k w_k(y) t_k^i acts on f as
sum_k w_k f(x + t_k).  The Hamburger check tests a finite moment sequence
for positive semidefiniteness of its Hankel matrix through all principal
minors, and `recover_atoms` inverts `moments_of_atomic` for sequences of
finite Hankel rank (atoms returned as a monic polynomial with isolating
intervals, weights exact when the atoms are rational and as rational
interval enclosures otherwise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .polycore import (
    MultiPoly,
    ParseError,
    Rat,
    RootIsolation,
    UniPoly,
    _rat,
    _SturmChain,
    isolate_real_roots,
    nonneg_on_R,
    parse_unipoly,
    rational_roots,
    refine_interval,
    squarefree_part,
)
from .weylops import MultiWeylOp, WeylOp, indices_below


@dataclass(frozen=True)
class MomentSequence:
    """Prospective moments a_0 .. a_L; validity is decided by hamburger_check."""

    values: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def of(cls, values: Sequence[Rat]) -> "MomentSequence":
        return cls(tuple(_rat(v) for v in values))


class AtomicMeasureFamily:
    """Finitely many distinct atoms in Q^n with weights polynomial in y."""

    __slots__ = ("atoms", "weights", "arity")

    def __init__(
        self,
        atoms: Sequence[Rat | Sequence[Rat]],
        weights: Sequence[UniPoly | Rat],
        arity: int | None = None,
    ):
        if len(atoms) != len(weights):
            raise ValueError("one weight per atom required")
        norm_atoms = []
        for a in atoms:
            if isinstance(a, (int, Fraction)):
                norm_atoms.append((_rat(a),))
            else:
                norm_atoms.append(tuple(_rat(v) for v in a))
        if norm_atoms:
            n = len(norm_atoms[0])
            if any(len(a) != n for a in norm_atoms):
                raise ValueError("atoms must share one arity")
        else:
            n = arity if arity is not None else 1
        if arity is not None and norm_atoms and arity != n:
            raise ValueError(f"declared arity {arity} does not match atoms of arity {n}")
        if len(set(norm_atoms)) != len(norm_atoms):
            raise ValueError("atoms must be pairwise distinct")
        ws = tuple(
            w.rename("y") if isinstance(w, UniPoly) else UniPoly.constant(_rat(w), "y")
            for w in weights
        )
        for w in ws:
            if not w.is_constant() and w.var != "y":
                raise ValueError("weights must be polynomials in y")
        self.atoms: tuple[tuple[Fraction, ...], ...] = tuple(norm_atoms)
        self.weights: tuple[UniPoly, ...] = ws
        self.arity = n

    def __len__(self) -> int:
        return len(self.atoms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AtomicMeasureFamily):
            return NotImplemented
        return (
            self.arity == other.arity
            and sorted(zip(self.atoms, self.weights)) == sorted(zip(other.atoms, other.weights))
        )

    def scalar_atoms(self) -> tuple[Fraction, ...]:
        if self.arity != 1:
            raise ValueError("scalar atoms require arity 1")
        return tuple(a[0] for a in self.atoms)

    def has_constant_weights(self) -> bool:
        return all(w.is_constant() for w in self.weights)

    def constant_weights(self) -> tuple[Fraction, ...]:
        if not self.has_constant_weights():
            raise ValueError("weights depend on the parameter")
        return tuple(w.coeff(0) for w in self.weights)

    def to_text(self) -> str:
        lines = []
        for atom, w in zip(self.atoms, self.weights):
            at = str(atom[0]) if self.arity == 1 else "(" + ", ".join(map(str, atom)) + ")"
            lines.append(f"atom {at} weight {w}")
        return "\n".join(lines)

    def __repr__(self) -> str:
        return f"AtomicMeasureFamily({self.to_text()!r})"


# ---------------------------------------------------------------------------
# Hamburger check
# ---------------------------------------------------------------------------


def _frac_det(rows: list[list[Fraction]]) -> Fraction:
    n = len(rows)
    M = [row[:] for row in rows]
    det = Fraction(1)
    for k in range(n):
        pivot = None
        for r in range(k, n):
            if M[r][k] != 0:
                pivot = r
                break
        if pivot is None:
            return Fraction(0)
        if pivot != k:
            M[k], M[pivot] = M[pivot], M[k]
            det = -det
        det *= M[k][k]
        inv = 1 / M[k][k]
        for r in range(k + 1, n):
            if M[r][k] == 0:
                continue
            f = M[r][k] * inv
            for c in range(k, n):
                M[r][c] -= f * M[k][c]
    return det


@dataclass(frozen=True)
class HamburgerResult:
    ok: bool
    failing_subset: tuple[int, ...] | None = None
    failing_minor: Fraction | None = None


def hamburger_check(a: MomentSequence | Sequence[Rat]) -> HamburgerResult:
    """Is (a_0..a_{2m}) the start of a moment sequence of a nonnegative measure?

    Equivalent to positive semidefiniteness of the Hankel matrix
    (a_{i+j})_{i,j=0..m}, tested exactly through all principal minors; the
    lexicographically first negative one is reported.  The sequence must have
    odd length so the top index 2m pairs symmetrically.
    """
    values = a.values if isinstance(a, MomentSequence) else tuple(_rat(v) for v in a)
    if not values:
        raise ValueError("empty moment sequence")
    if len(values) % 2 == 0:
        raise ValueError("moment sequence must end at an even index a_{2m}")
    m = (len(values) - 1) // 2
    for size in range(1, m + 2):
        for subset in combinations(range(m + 1), size):
            minor = _frac_det([[values[i + j] for j in subset] for i in subset])
            if minor < 0:
                return HamburgerResult(False, subset, minor)
    return HamburgerResult(True)


# ---------------------------------------------------------------------------
# Moments of atomic families, convolution operators
# ---------------------------------------------------------------------------


def moments_of_atomic(
    m: AtomicMeasureFamily, y0: Rat | None, up_to: int
) -> MomentSequence | list[UniPoly]:
    """Moments a_i = sum_k w_k t_k^i for i = 0..up_to.

    With a rational y0 the weights are evaluated there and a MomentSequence
    is returned; with y0 = None the moments stay polynomials in y.
    """
    if m.arity != 1:
        raise ValueError("moments_of_atomic expects a one-dimensional family")
    if up_to < 0:
        raise ValueError("moment cap must be nonnegative")
    atoms = m.scalar_atoms()
    if y0 is None:
        out = []
        for i in range(up_to + 1):
            acc = UniPoly((), "y")
            for t, w in zip(atoms, m.weights):
                acc = acc + w * (t**i)
            out.append(acc)
        return out
    y0 = _rat(y0)
    ws = [w.evaluate(y0) for w in m.weights]
    return MomentSequence.of(
        [sum((w * t**i for t, w in zip(atoms, ws)), Fraction(0)) for i in range(up_to + 1)]
    )


def conv_operator_from_measure(m: AtomicMeasureFamily, max_order: int) -> WeylOp:
    """Materialize the convolution operator of the family up to D^max_order.

    q_i(x) = (1/i!) sum_k w_k(x) t_k^i; the full operator is an infinite
    power series in D, and the truncation is exact on polynomials of degree
    at most max_order.
    """
    if m.arity != 1:
        raise ValueError("univariate convolution requires a one-dimensional family")
    if max_order < 0:
        raise ValueError("truncation order must be nonnegative")
    atoms = m.scalar_atoms()
    coeffs = []
    for i in range(max_order + 1):
        acc = UniPoly((), "x")
        for t, w in zip(atoms, m.weights):
            acc = acc + w.rename("x") * (t**i)
        coeffs.append(acc * Fraction(1, math.factorial(i)))
    return WeylOp(coeffs, "x")


def mv_conv_operator_from_measure(
    m: AtomicMeasureFamily, max_order: Sequence[int]
) -> MultiWeylOp:
    """Multivariate analog: q_alpha = (1/alpha!) sum_k w_k t_k^alpha, alpha <= cap."""
    if not m.has_constant_weights():
        raise ValueError("multivariate materialization requires constant weights")
    cap = tuple(int(k) for k in max_order)
    if len(cap) != m.arity or any(k < 0 for k in cap):
        raise ValueError("truncation multi-order must match the family arity")
    ws = m.constant_weights()
    terms = {}
    for alpha in indices_below(cap):
        fact = 1
        for k in alpha:
            fact *= math.factorial(k)
        acc = Fraction(0)
        for atom, w in zip(m.atoms, ws):
            prod = w
            for t, k in zip(atom, alpha):
                prod *= t**k
            acc += prod
        if acc:
            terms[alpha] = MultiPoly.constant(acc / fact, m.arity)
    return MultiWeylOp(terms, m.arity)


def apply_convolution(m: AtomicMeasureFamily, f: UniPoly | MultiPoly):
    """Exact convolution sum_k w_k f(x + t_k) for constant-weight families."""
    if not m.has_constant_weights():
        raise ValueError("apply_convolution requires constant weights")
    ws = m.constant_weights()
    if isinstance(f, UniPoly):
        if m.arity != 1:
            raise ValueError("arity mismatch")
        out = UniPoly((), f.var)
        for atom, w in zip(m.atoms, ws):
            out = out + f.taylor_shift(atom[0]) * w
        return out
    if isinstance(f, MultiPoly):
        if m.arity != f.arity:
            raise ValueError("arity mismatch")
        out = MultiPoly({}, f.arity)
        for atom, w in zip(m.atoms, ws):
            out = out + f.taylor_shift(atom) * w
        return out
    raise TypeError("expected UniPoly or MultiPoly")


@dataclass(frozen=True)
class FamilyCheck:
    ok: bool
    failing_index: int | None = None
    y0: Fraction | None = None


def measure_family_sos_check(m: AtomicMeasureFamily) -> FamilyCheck:
    """Is every weight nonnegative on all of R?

    For distinct atoms this is necessary as well as sufficient for the
    family's convolution operators to preserve nonnegativity: the Hankel
    matrix splits as sum_k w_k(y) v(t_k) v(t_k)^T over independent
    Vandermonde vectors once the size exceeds the atom count.
    """
    for k, w in enumerate(m.weights):
        res = nonneg_on_R(w)
        if not res.ok:
            return FamilyCheck(False, k, res.x0)
    return FamilyCheck(True)


# ---------------------------------------------------------------------------
# Atom recovery from a truncated moment sequence
# ---------------------------------------------------------------------------


class NotFinitelyAtomicError(ValueError):
    """The truncation is inconsistent with any finitely atomic measure."""


@dataclass(frozen=True)
class RecoveredMeasure:
    """Atoms as roots of a monic polynomial, isolated; weights exact or enclosed."""

    atom_polynomial: UniPoly
    atom_intervals: RootIsolation
    atoms: tuple[Fraction, ...] | None = None  # set when all atoms are rational
    weights: tuple[Fraction, ...] | None = None
    weight_intervals: tuple[tuple[Fraction, Fraction], ...] | None = None

    @property
    def rank(self) -> int:
        return int(self.atom_polynomial.degree())


def _rank(rows: list[list[Fraction]]) -> int:
    M = [row[:] for row in rows]
    n_rows = len(M)
    n_cols = len(M[0]) if M else 0
    rank = 0
    row = 0
    for col in range(n_cols):
        pivot = next((r for r in range(row, n_rows) if M[r][col] != 0), None)
        if pivot is None:
            continue
        M[row], M[pivot] = M[pivot], M[row]
        inv = 1 / M[row][col]
        for r in range(row + 1, n_rows):
            if M[r][col] != 0:
                f = M[r][col] * inv
                for c in range(col, n_cols):
                    M[r][c] -= f * M[row][c]
        row += 1
        rank += 1
        if row == n_rows:
            break
    return rank


def _solve_square(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    n = len(rows)
    M = [row[:] + [rhs[i]] for i, row in enumerate(rows)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if M[r][col] != 0), None)
        if pivot is None:
            return None
        M[col], M[pivot] = M[pivot], M[col]
        inv = 1 / M[col][col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] * inv
                for c in range(col, n + 1):
                    M[r][c] -= f * M[col][c]
    return [M[i][n] / M[i][i] for i in range(n)]


class _Interval:
    """Closed rational interval arithmetic for the enclosure solves."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: Fraction, hi: Fraction):
        self.lo, self.hi = (lo, hi) if lo <= hi else (hi, lo)

    @classmethod
    def point(cls, v: Fraction) -> "_Interval":
        return cls(v, v)

    def __add__(self, o: "_Interval") -> "_Interval":
        return _Interval(self.lo + o.lo, self.hi + o.hi)

    def __sub__(self, o: "_Interval") -> "_Interval":
        return _Interval(self.lo - o.hi, self.hi - o.lo)

    def __mul__(self, o: "_Interval") -> "_Interval":
        vals = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return _Interval(min(vals), max(vals))

    def __truediv__(self, o: "_Interval") -> "_Interval":
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("divisor interval contains zero")
        vals = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return _Interval(min(vals), max(vals))

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi


def _interval_vandermonde_solve(
    atom_ivs: list[tuple[Fraction, Fraction]], rhs: list[Fraction], poly: UniPoly
) -> tuple[tuple[Fraction, Fraction], ...]:
    """Enclose the Vandermonde solution, refining atom intervals as needed."""
    chain = _SturmChain(poly)
    ivs = list(atom_ivs)
    for _ in range(200):
        r = len(ivs)
        cols = [_Interval(lo, hi) for lo, hi in ivs]
        A: list[list[_Interval]] = []
        power = [_Interval.point(Fraction(1)) for _ in range(r)]
        for i in range(r):
            A.append(list(power))
            power = [p * c for p, c in zip(power, cols)]
        b = [_Interval.point(v) for v in rhs]
        try:
            x = _interval_gauss(A, b)
        except ZeroDivisionError:
            ivs = [refine_interval(poly, lo, hi, chain) for lo, hi in ivs]
            continue
        return tuple((v.lo, v.hi) for v in x)
    raise NotFinitelyAtomicError("weight enclosure did not converge")


def _interval_gauss(A: list[list[_Interval]], b: list[_Interval]) -> list[_Interval]:
    n = len(A)
    M = [row[:] + [b[i]] for i, row in enumerate(A)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if not M[r][col].contains_zero()), None)
        if pivot is None:
            raise ZeroDivisionError("no pivot bounded away from zero")
        M[col], M[pivot] = M[pivot], M[col]
        for r in range(n):
            if r != col:
                f = M[r][col] / M[col][col]
                for c in range(col, n + 1):
                    M[r][c] = M[r][c] - f * M[col][c]
    return [M[i][n] / M[i][i] for i in range(n)]


def recover_atoms(a: MomentSequence | Sequence[Rat]) -> RecoveredMeasure:
    """Invert `moments_of_atomic` on a PSD sequence of finite Hankel rank.

    The monic generator of the Hankel kernel has the atoms as its roots; the
    full sequence must satisfy the induced linear recurrence and the
    generator must have as many distinct real roots as its degree, otherwise
    the truncation is not finitely atomic.  Requires strictly more than 2r
    moments for rank r.
    """
    values = a.values if isinstance(a, MomentSequence) else tuple(_rat(v) for v in a)
    check = hamburger_check(values)
    if not check.ok:
        raise ValueError("not a moment sequence (Hankel matrix is not PSD)")
    m = (len(values) - 1) // 2
    H = [[values[i + j] for j in range(m + 1)] for i in range(m + 1)]
    r = _rank(H)
    if 2 * r >= len(values):
        raise NotFinitelyAtomicError(
            f"Hankel rank {r} needs at least {2 * r + 1} moments to pin the atoms"
        )
    if r == 0:
        return RecoveredMeasure(
            UniPoly.constant(1, "x"), RootIsolation((), ()), atoms=(), weights=()
        )
    lead = [[values[i + j] for j in range(r)] for i in range(r)]
    rhs = [-values[r + i] for i in range(r)]
    sol = _solve_square(lead, rhs)
    if sol is None:
        raise NotFinitelyAtomicError("leading Hankel block is singular at the detected rank")
    poly = UniPoly(sol + [Fraction(1)], "x")
    # the whole sequence must satisfy the induced recurrence
    for i in range(len(values) - r):
        acc = values[i + r]
        for j, c in enumerate(sol):
            acc += c * values[i + j]
        if acc != 0:
            raise NotFinitelyAtomicError("moments violate the rank-r recurrence")
    sf = squarefree_part(poly)
    if sf.degree() != poly.degree() or _SturmChain(sf).count(None, None) != r:
        raise NotFinitelyAtomicError("atom polynomial lacks distinct real roots")
    isolation = isolate_real_roots(poly)
    roots = rational_roots(poly)
    if len(roots) == r:
        vand = [[t**i for t in roots] for i in range(r)]
        ws = _solve_square(vand, list(values[:r]))
        assert ws is not None
        return RecoveredMeasure(poly, isolation, atoms=tuple(roots), weights=tuple(ws))
    enclosures = _interval_vandermonde_solve(
        list(isolation.intervals), list(values[:r]), poly
    )
    return RecoveredMeasure(poly, isolation, weight_intervals=enclosures)


# ---------------------------------------------------------------------------
# Measure text format
# ---------------------------------------------------------------------------


def parse_measure_text(text: str) -> AtomicMeasureFamily:
    """Parse ``atom <rational or tuple> weight <rational or poly in y>`` lines."""
    atoms: list[tuple[Fraction, ...]] = []
    weights: list[UniPoly] = []
    arity: int | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not line.startswith("atom "):
            raise ParseError(f"line {lineno}: expected 'atom ... weight ...'", 0)
        body = line[5:]
        cut = body.find(" weight ")
        if cut < 0:
            raise ParseError(f"line {lineno}: missing 'weight'", 0)
        atom_txt = body[:cut].strip()
        weight_txt = body[cut + len(" weight ") :].strip()
        if atom_txt.startswith("("):
            if not atom_txt.endswith(")"):
                raise ParseError(f"line {lineno}: unterminated atom tuple", 0)
            parts = [p.strip() for p in atom_txt[1:-1].split(",") if p.strip()]
            if not parts:
                raise ParseError(f"line {lineno}: empty atom tuple", 0)
            atom = tuple(_parse_rat(p, lineno) for p in parts)
        else:
            atom = (_parse_rat(atom_txt, lineno),)
        if arity is None:
            arity = len(atom)
        elif len(atom) != arity:
            raise ParseError(f"line {lineno}: atom arity changed", 0)
        try:
            weights.append(parse_unipoly(weight_txt, "y"))
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}", exc.pos) from None
        atoms.append(atom)
    if not atoms:
        return AtomicMeasureFamily((), (), arity=1)
    return AtomicMeasureFamily(atoms, weights)


def _parse_rat(text: str, lineno: int) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"line {lineno}: bad rational {text!r}", 0) from None
