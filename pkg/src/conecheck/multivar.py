"""Multivariate kernel criteria, falsification search, and diagonal operators.

For a multivariate operator and a multi-index cap alpha, the Gram matrix
over the lexicographically ordered index set {beta <= alpha} has entries
(beta_i + beta_j)! q_{beta_i + beta_j}(y).  Pointwise positive
semidefiniteness of this kernel is necessary for the operator to map squares
into nonnegative polynomials, and at n = 1 the matrix is exactly the
parametric Hankel matrix.

A sweep over all real parameter points is not decided in several variables
(that would need multivariate quantifier elimination); the module instead
offers exact pointwise checks, a budgeted falsification search over rational
grid and seeded random points whose findings are exact verified witnesses,
and an exact decision in the constant-coefficient case where the kernel does
not depend on the parameter at all.

Diagonal operators (x^b -> lambda_b x^b) convert to and from their generator
coefficients through the triangular falling-factorial relation
lambda_b = sum_{a <= b} (b)_a gen_a, and arise from atomic measures as
f(x) -> sum_k w_k f(s_k * x) with coordinatewise scaling.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .hankel import _quad_form, symmetric_psd_certificate
from .moments import AtomicMeasureFamily
from .polycore import MultiPoly, Rat, _rat
from .weylops import MultiWeylOp, index_le, indices_below


@dataclass(frozen=True)
class KernelGram:
    """Symbolic Gram matrix over {beta <= alpha}, entries polynomials in y."""

    indices: tuple[tuple[int, ...], ...]
    entries: tuple[tuple[MultiPoly, ...], ...]
    arity: int

    @property
    def size(self) -> int:
        return len(self.indices)

    def evaluate(self, y0: Sequence[Rat]) -> list[list[Fraction]]:
        pt = [_rat(v) for v in y0]
        return [[e.evaluate(pt) for e in row] for row in self.entries]


def _multi_factorial(alpha: Sequence[int]) -> int:
    out = 1
    for k in alpha:
        f = 1
        for i in range(2, k + 1):
            f *= i
        out *= f
    return out


def gram_kernel(T: MultiWeylOp, alpha: Sequence[int]) -> KernelGram:
    """Gram matrix of the kernel values (beta_i + beta_j)! q_{beta_i+beta_j}(y)."""
    alpha = tuple(alpha)
    if len(alpha) != T.arity:
        raise ValueError(f"index arity {len(alpha)} does not match operator arity {T.arity}")
    idx = tuple(indices_below(alpha))
    rows = []
    for bi in idx:
        row = []
        for bj in idx:
            s = tuple(a + b for a, b in zip(bi, bj))
            row.append(T.coeff(s) * _multi_factorial(s))
        rows.append(tuple(row))
    return KernelGram(idx, tuple(rows), T.arity)


@dataclass(frozen=True)
class KernelPsd:
    """Pointwise kernel PSD outcome; on failure a direction over {beta <= alpha}."""

    ok: bool
    direction: tuple[Fraction, ...] | None = None
    value: Fraction | None = None


def psd_kernel_at(T: MultiWeylOp, alpha: Sequence[int], y0: Sequence[Rat]) -> KernelPsd:
    """Exact PSD test of the Gram kernel at a rational parameter point."""
    gram = gram_kernel(T, alpha)
    cert = symmetric_psd_certificate(gram.evaluate(y0))
    if cert is None:
        return KernelPsd(True)
    c, value = cert
    return KernelPsd(False, c, value)


@dataclass(frozen=True)
class MVWitness:
    """Square input h = g^2 whose image is negative at a rational point."""

    squares: tuple[MultiPoly, ...]
    degree_cap: tuple[int, ...]  # componentwise degree bound 2*alpha of the input
    point: tuple[Fraction, ...]
    value: Fraction
    shift: tuple[Fraction, ...]

    def input_polynomial(self) -> MultiPoly:
        arity = self.squares[0].arity
        out = MultiPoly({}, arity)
        for g in self.squares:
            out = out + g * g
        return out

    def to_dict(self) -> dict:
        return {
            "squares": [str(g) for g in self.squares],
            "degree_cap": list(self.degree_cap),
            "point": [str(v) for v in self.point],
            "value": str(self.value),
            "shift": [str(v) for v in self.shift],
        }


def verify_mv_witness(T: MultiWeylOp, w: MVWitness) -> bool:
    """Recompute the input, its degree cap, and the image value, all exactly."""
    h = w.input_polynomial()
    if h.arity != T.arity or len(w.degree_cap) != T.arity:
        return False
    if any(d > cap for d, cap in zip(h.multidegree(), w.degree_cap)):
        return False
    value = T.apply(h).evaluate(w.point)
    return value == w.value and value < 0


def _witness_from_direction(
    T: MultiWeylOp,
    alpha: tuple[int, ...],
    y0: tuple[Fraction, ...],
    direction: Sequence[Fraction],
    expected: Fraction,
) -> MVWitness:
    idx = indices_below(alpha)
    g = MultiPoly(
        {beta: c for beta, c in zip(idx, direction) if c}, T.arity
    )
    g_shifted = g.taylor_shift(tuple(-v for v in y0))
    h = g_shifted * g_shifted
    value = T.apply(h).evaluate(y0)
    if value != expected or not value < 0:  # pragma: no cover - form/image identity
        raise RuntimeError("internal error: multivariate witness failed re-verification")
    return MVWitness(
        squares=(g_shifted,),
        degree_cap=tuple(2 * a for a in alpha),
        point=y0,
        value=value,
        shift=y0,
    )


@dataclass(frozen=True)
class FalsifyBudget:
    """Search budget: grid {-R..R}/q in every coordinate, then random points."""

    points: int = 200
    grid_radius: int = 2
    grid_denominator: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.points <= 0 or self.grid_radius < 0 or self.grid_denominator <= 0:
            raise ValueError("budget must be positive")


@dataclass(frozen=True)
class FalsifyOutcome:
    found: bool
    witness: MVWitness | None
    y0: tuple[Fraction, ...] | None
    points_checked: int
    seed: int


def _grid_points(n: int, radius: int, den: int):
    values = sorted(range(-radius, radius + 1), key=lambda v: (abs(v), v))
    fracs = [Fraction(v, den) for v in values]

    def rec(prefix):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for v in fracs:
            yield from rec(prefix + [v])

    yield from rec([])


def falsify_mv(
    T: MultiWeylOp, alpha: Sequence[int], budget: FalsifyBudget = FalsifyBudget()
) -> FalsifyOutcome:
    """Search for a parameter point with a non-PSD kernel and build the witness.

    Scans the rational grid nearest the origin first (deterministic order),
    then seeded random rational points.  Any hit yields a verified square
    counterexample; exhausting the budget decides nothing.
    """
    alpha = tuple(alpha)
    gram = gram_kernel(T, alpha)
    rng = random.Random(budget.seed)
    checked = 0

    def try_point(pt: tuple[Fraction, ...]) -> MVWitness | None:
        cert = symmetric_psd_certificate(gram.evaluate(pt))
        if cert is None:
            return None
        direction, value = cert
        return _witness_from_direction(T, alpha, pt, direction, value)

    for pt in _grid_points(T.arity, budget.grid_radius, budget.grid_denominator):
        if checked >= budget.points:
            return FalsifyOutcome(False, None, None, checked, budget.seed)
        checked += 1
        w = try_point(pt)
        if w is not None:
            return FalsifyOutcome(True, w, pt, checked, budget.seed)
    span = 8 * max(budget.grid_radius, 1) * budget.grid_denominator
    while checked < budget.points:
        pt = tuple(
            Fraction(rng.randint(-span, span), budget.grid_denominator)
            for _ in range(T.arity)
        )
        checked += 1
        w = try_point(pt)
        if w is not None:
            return FalsifyOutcome(True, w, pt, checked, budget.seed)
    return FalsifyOutcome(False, None, None, checked, budget.seed)


@dataclass(frozen=True)
class MVVerdict:
    """Exact decision for constant-coefficient operators on squares."""

    alpha: tuple[int, ...]
    preserves: bool
    witness: MVWitness | None = None

    @property
    def result(self) -> str:
        return "Preserves" if self.preserves else "Violates"


def constant_coeff_decide(T: MultiWeylOp, alpha: Sequence[int]) -> MVVerdict:
    """Decide exactly whether a constant-coefficient T maps the squares with
    componentwise degree <= 2*alpha into nonnegative polynomials.

    The kernel does not depend on the parameter, so one PSD test of the
    constant Gram matrix settles the sweep; a failure converts into a
    verified square witness at the origin.
    """
    if not T.is_constant_coeff():
        raise ValueError("operator has non-constant coefficients")
    alpha = tuple(alpha)
    origin = tuple(Fraction(0) for _ in range(T.arity))
    res = psd_kernel_at(T, alpha, origin)
    if res.ok:
        return MVVerdict(alpha, True)
    w = _witness_from_direction(T, alpha, origin, res.direction, res.value)
    return MVVerdict(alpha, False, w)


# ---------------------------------------------------------------------------
# Diagonal operators
# ---------------------------------------------------------------------------


def _falling(m: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= m - i
    return out


def _falling_multi(beta: Sequence[int], alpha: Sequence[int]) -> int:
    out = 1
    for b, a in zip(beta, alpha):
        out *= _falling(b, a)
    return out


@dataclass(frozen=True)
class DiagonalOp:
    """Monomial-basis diagonal operator x^beta -> lambda_beta x^beta."""

    arity: int
    bound: tuple[int, ...]
    lambdas: Mapping[tuple[int, ...], Fraction]

    def __post_init__(self):
        bound = tuple(self.bound)
        lam = {}
        for beta in indices_below(bound):
            if beta not in self.lambdas:
                raise ValueError(f"missing eigenvalue for index {beta}")
            lam[beta] = _rat(self.lambdas[beta])
        object.__setattr__(self, "bound", bound)
        object.__setattr__(self, "lambdas", lam)

    def apply(self, f: MultiPoly) -> MultiPoly:
        if f.arity != self.arity:
            raise ValueError("arity mismatch")
        out = {}
        for e, c in f.terms.items():
            if not index_le(e, self.bound):
                raise ValueError(f"monomial {e} exceeds the eigenvalue table bound {self.bound}")
            out[e] = c * self.lambdas[e]
        return MultiPoly(out, self.arity)


def diagonal_from_measure(nu: AtomicMeasureFamily, bound: Sequence[int]) -> DiagonalOp:
    """Eigenvalues lambda_beta = sum_k w_k s_k^beta of f -> sum_k w_k f(s_k * x)."""
    if not nu.has_constant_weights():
        raise ValueError("diagonal operators require constant weights")
    bound = tuple(int(k) for k in bound)
    if len(bound) != nu.arity:
        raise ValueError("bound arity must match the measure arity")
    ws = nu.constant_weights()
    lam = {}
    for beta in indices_below(bound):
        acc = Fraction(0)
        for atom, w in zip(nu.atoms, ws):
            prod = w
            for s, k in zip(atom, beta):
                prod *= s**k
            acc += prod
        lam[beta] = acc
    return DiagonalOp(nu.arity, bound, lam)


def scale_coordinates(f: MultiPoly, s: Sequence[Rat]) -> MultiPoly:
    """f(s_1 x_1, ..., s_n x_n), exactly."""
    sv = [_rat(v) for v in s]
    if len(sv) != f.arity:
        raise ValueError("scaling arity mismatch")
    out = {}
    for e, c in f.terms.items():
        for v, k in zip(sv, e):
            if k:
                c = c * v**k
        if c:
            out[e] = c
    return MultiPoly(out, f.arity)


def apply_measure_scaling(nu: AtomicMeasureFamily, f: MultiPoly) -> MultiPoly:
    """The measure realization sum_k w_k f(s_k * x) of a diagonal operator."""
    if not nu.has_constant_weights():
        raise ValueError("requires constant weights")
    if nu.arity != f.arity:
        raise ValueError("arity mismatch")
    out = MultiPoly({}, f.arity)
    for atom, w in zip(nu.atoms, nu.constant_weights()):
        out = out + scale_coordinates(f, atom) * w
    return out


def diagonal_to_weyl(op: DiagonalOp) -> dict[tuple[int, ...], Fraction]:
    """Generator coefficients of sum_a gen_a x^a d^a from the eigenvalues.

    Solved triangularly in increasing lexicographic order (which refines the
    product order): gen_b = (lambda_b - sum_{a < b} (b)_a gen_a) / b!.
    """
    gen: dict[tuple[int, ...], Fraction] = {}
    for beta in indices_below(op.bound):
        acc = op.lambdas[beta]
        for a, g in gen.items():
            if index_le(a, beta) and a != beta:
                acc -= _falling_multi(beta, a) * g
        gen[beta] = acc / _falling_multi(beta, beta)
    return gen


def weyl_to_diagonal(
    gen: Mapping[tuple[int, ...], Fraction], bound: Sequence[int], arity: int
) -> DiagonalOp:
    """Forward relation lambda_b = sum_{a <= b} (b)_a gen_a."""
    bound = tuple(int(k) for k in bound)
    lam = {}
    for beta in indices_below(bound):
        acc = Fraction(0)
        for a, g in gen.items():
            if index_le(a, beta):
                acc += _falling_multi(beta, a) * _rat(g)
        lam[beta] = acc
    return DiagonalOp(arity, bound, lam)


def diagonal_as_operator(gen: Mapping[tuple[int, ...], Fraction], arity: int) -> MultiWeylOp:
    """Materialize sum_a gen_a x^a d^a as a differential operator."""
    terms = {}
    for a, g in gen.items():
        g = _rat(g)
        if g:
            terms[tuple(a)] = MultiPoly.monomial(g, a, arity)
    return MultiWeylOp(terms, arity)
