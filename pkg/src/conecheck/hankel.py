"""Parametric Hankel matrices and exact positivity sweeps.

For an operator with coefficients q_i the matrix of size m+1 has entries
(i+j)! * q_{i+j}(y), polynomials in the single parameter y.  Deciding
"positive semidefinite for every real y" reduces to nonnegativity on R of
every principal minor (a symmetric matrix is PSD iff all principal minors
are >= 0, applied pointwise in y), and "positive definite for every y" to
strict positivity of the leading principal minors (Sylvester).  Minors are
computed fraction-free (Bareiss) to control coefficient growth.

The module also hosts the exact rational-matrix PSD test by congruence
elimination, shared with the multivariate kernels: on failure it returns a
rational direction c with c^T M c < 0, re-verified before being returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .polycore import (
    Rat,
    SignResult,
    UniPoly,
    _rat,
    exact_div,
    nonneg_on_R,
    positive_on_R,
)
from .weylops import WeylOp


class ParamHankel:
    """Symmetric (m+1) x (m+1) matrix whose entry (i, j) depends on i+j only."""

    __slots__ = ("diagonals", "_minors")

    def __init__(self, diagonals: Sequence[UniPoly]):
        if len(diagonals) % 2 == 0:
            raise ValueError("need entries for antidiagonals 0..2m")
        self.diagonals: tuple[UniPoly, ...] = tuple(diagonals)
        self._minors: dict[tuple[int, ...], UniPoly] | None = None

    @property
    def size(self) -> int:
        return (len(self.diagonals) + 1) // 2

    def entry(self, i: int, j: int) -> UniPoly:
        return self.diagonals[i + j]

    def rows(self) -> list[list[UniPoly]]:
        n = self.size
        return [[self.diagonals[i + j] for j in range(n)] for i in range(n)]

    def evaluate(self, y0: Rat) -> list[list[Fraction]]:
        y0 = _rat(y0)
        vals = [d.evaluate(y0) for d in self.diagonals]
        n = self.size
        return [[vals[i + j] for j in range(n)] for i in range(n)]

    def is_constant(self) -> bool:
        return all(d.is_constant() for d in self.diagonals)

    def principal_minors(self) -> dict[tuple[int, ...], UniPoly]:
        """Every nonempty principal minor, keyed by index subset (lex order)."""
        if self._minors is None:
            self._minors = {
                s: principal_minor(self, s) for s in _subsets_lex(self.size)
            }
        return self._minors


def build_param_hankel(T: WeylOp, m: int) -> ParamHankel:
    """Matrix with entries (i+j)! q_{i+j}(y), i, j = 0..m; q above order is 0."""
    if m < 0:
        raise ValueError("size parameter must be nonnegative")
    diags = [T.coeff(s).rename("y") * math.factorial(s) for s in range(2 * m + 1)]
    return ParamHankel(diags)


def _subsets_lex(n: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []

    def rec(prefix: tuple[int, ...], start: int) -> None:
        for i in range(start, n):
            s = prefix + (i,)
            out.append(s)
            rec(s, i + 1)

    rec((), 0)
    return out


def poly_det(rows: list[list[UniPoly]]) -> UniPoly:
    """Exact determinant of a square polynomial matrix, Bareiss elimination.

    Every intermediate quotient is again a minor of the input, so the
    fraction-free divisions are exact by construction.
    """
    n = len(rows)
    var = "y"
    for row in rows:
        for p in row:
            if not p.is_constant():
                var = p.var
                break
    one = UniPoly.constant(1, var)
    if n == 0:
        return one
    M = [list(r) for r in rows]
    sign = 1
    prev = one
    for k in range(n - 1):
        if M[k][k].is_zero():
            for r in range(k + 1, n):
                if not M[r][k].is_zero():
                    M[k], M[r] = M[r], M[k]
                    sign = -sign
                    break
            else:
                return UniPoly((), var)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = M[i][j] * M[k][k] - M[i][k] * M[k][j]
                M[i][j] = exact_div(num, prev)
            M[i][k] = UniPoly((), var)
        prev = M[k][k]
    det = M[n - 1][n - 1]
    return det if sign == 1 else -det


def principal_minor(H: ParamHankel, subset: Sequence[int]) -> UniPoly:
    """Determinant of the principal submatrix indexed by a nonempty subset."""
    idx = tuple(subset)
    if not idx:
        raise ValueError("subset must be nonempty")
    if any(not 0 <= i < H.size for i in idx) or len(set(idx)) != len(idx):
        raise ValueError(f"bad index subset {idx} for size {H.size}")
    rows = [[H.entry(i, j) for j in idx] for i in idx]
    return poly_det(rows)


@dataclass(frozen=True)
class MinorReport:
    """One principal minor together with its sign status on the real line."""

    subset: tuple[int, ...]
    minor: UniPoly
    nonnegative: bool
    y0: Fraction | None = None  # point with minor(y0) < 0 when not nonnegative

    def to_dict(self) -> dict:
        return {
            "subset": list(self.subset),
            "minor": str(self.minor),
            "nonnegative": self.nonnegative,
            "y0": None if self.y0 is None else str(self.y0),
        }


@dataclass(frozen=True)
class PsdSweep:
    ok: bool
    reports: tuple[MinorReport, ...]
    failure: MinorReport | None = None


def psd_for_all_y(H: ParamHankel) -> PsdSweep:
    """Is H(y) positive semidefinite for every real y?

    Checks all 2^(m+1) - 1 principal minors for nonnegativity on R (leading
    minors alone do not characterize semidefiniteness).  Subsets are scanned
    in lexicographic order and the first failing one is reported with an
    exact rational y0 where the minor is negative.
    """
    reports = []
    for subset, minor in H.principal_minors().items():
        res = nonneg_on_R(minor)
        report = MinorReport(subset, minor, res.ok, None if res.ok else res.x0)
        reports.append(report)
        if not res.ok:
            return PsdSweep(False, tuple(reports), report)
    return PsdSweep(True, tuple(reports))


@dataclass(frozen=True)
class PdSweep:
    ok: bool
    failing_size: int | None = None
    sign: SignResult | None = None


def pd_for_all_y(H: ParamHankel) -> PdSweep:
    """Is H(y) positive definite for every real y? (Sylvester, pointwise.)"""
    minors = H.principal_minors()
    for size in range(1, H.size + 1):
        res = positive_on_R(minors[tuple(range(size))])
        if not res.ok:
            return PdSweep(False, size, res)
    return PdSweep(True)


# ---------------------------------------------------------------------------
# Exact PSD test of a rational symmetric matrix, with certificate
# ---------------------------------------------------------------------------


def symmetric_psd_certificate(
    matrix: Sequence[Sequence[Rat]],
) -> tuple[tuple[Fraction, ...], Fraction] | None:
    """None when the symmetric rational matrix is PSD, else (c, c^T M c < 0).

    Congruence elimination: a negative diagonal entry yields a direction
    immediately; a positive one is used to clear its row and column; when
    only an all-zero diagonal remains, any nonzero off-diagonal entry h_ij
    makes one of e_i +/- e_j negative.  Directions are mapped back through
    the accumulated basis changes and the final value is re-verified against
    the original matrix.
    """
    n = len(matrix)
    M = [[_rat(x) for x in row] for row in matrix]
    for i in range(n):
        if len(M[i]) != n:
            raise ValueError("matrix is not square")
        for j in range(i):
            if M[i][j] != M[j][i]:
                raise ValueError("matrix is not symmetric")
    # columns of C express the current basis in original coordinates
    C = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    active = list(range(n))

    def direction(w: dict[int, Fraction]) -> tuple[tuple[Fraction, ...], Fraction]:
        c = [Fraction(0)] * n
        for col, coef in w.items():
            for r in range(n):
                c[r] += coef * C[r][col]
        value = _quad_form(matrix, c)
        if not value < 0:  # pragma: no cover - guards the elimination logic
            raise RuntimeError("internal error: certificate failed re-verification")
        return tuple(c), value

    while active:
        neg = next((i for i in active if M[i][i] < 0), None)
        if neg is not None:
            return direction({neg: Fraction(1)})
        pivot = next((i for i in active if M[i][i] > 0), None)
        if pivot is None:
            off = None
            for i in active:
                for j in active:
                    if j > i and M[i][j] != 0:
                        off = (i, j)
                        break
                if off:
                    break
            if off is None:
                return None
            i, j = off
            sign = Fraction(-1) if M[i][j] > 0 else Fraction(1)
            return direction({i: Fraction(1), j: sign})
        p = pivot
        others = [j for j in active if j != p and M[p][j] != 0]
        factors = {j: M[p][j] / M[p][p] for j in others}
        for j, f in factors.items():
            for r in range(n):
                C[r][j] -= f * C[r][p]
        for j, f in factors.items():
            for k in range(n):
                M[j][k] -= f * M[p][k]
        for j, f in factors.items():
            for k in range(n):
                M[k][j] -= f * M[k][p]
        active.remove(p)
    return None


def _quad_form(matrix: Sequence[Sequence[Rat]], c: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for i, ci in enumerate(c):
        if ci == 0:
            continue
        for j, cj in enumerate(c):
            if cj:
                total += ci * cj * _rat(matrix[i][j])
    return total


@dataclass(frozen=True)
class PsdPoint:
    """PSD test of H(y0): on failure a rational direction with c^T H c < 0."""

    ok: bool
    direction: tuple[Fraction, ...] | None = None
    value: Fraction | None = None


def psd_at_point(H: ParamHankel, y0: Rat) -> PsdPoint:
    """Exact PSD test of the rational matrix H(y0)."""
    cert = symmetric_psd_certificate(H.evaluate(y0))
    if cert is None:
        return PsdPoint(True)
    c, value = cert
    return PsdPoint(False, c, value)
