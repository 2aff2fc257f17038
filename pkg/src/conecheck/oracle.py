"""Brute-force falsification and certificate checking.

Samples explicit sums of squares (plus a positive constant for the strict
cone), pushes them through an operator, and decides membership of the image
exactly with the univariate sign procedures, so a reported violation is a
proof and comes with a re-verifiable witness; a clean run is only evidence.
Identical seeds give identical sample streams.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .decide import ELL, POS, SOS, Witness
from .polycore import (
    UniPoly,
    _isolate_squarefree,
    _SturmChain,
    nonneg_on_R,
    positive_on_R,
    rational_roots,
    squarefree_part,
)
from .weylops import WeylOp


@dataclass(frozen=True)
class SampleSpec:
    """Shape of the random inputs: degree bound, square count, coefficient height."""

    degree: int
    squares: int = 2
    height: int = 5
    trials: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.degree < 0 or self.squares < 1 or self.height < 1 or self.trials < 1:
            raise ValueError("sample bounds must be positive")


def random_sos(spec: SampleSpec, rng: random.Random | None = None) -> tuple[UniPoly, tuple[UniPoly, ...]]:
    """A sum of `squares` random integer-coefficient squares of degree <= degree."""
    rng = rng or random.Random(spec.seed)
    half = spec.degree // 2
    gs = []
    for _ in range(spec.squares):
        coeffs = [rng.randint(-spec.height, spec.height) for _ in range(half + 1)]
        gs.append(UniPoly(coeffs, "x"))
    f = UniPoly((), "x")
    for g in gs:
        f = f + g * g
    return f, tuple(gs)


def _ell_violation_fields(img: UniPoly) -> dict:
    """Certificate data for `img` having a real zero (so img is not elliptic)."""
    if img.is_zero():
        return {"x0": Fraction(0), "value": Fraction(0)}
    sf = squarefree_part(img)
    roots = rational_roots(sf)
    if roots:
        return {"x0": roots[0], "value": Fraction(0)}
    nn_plus = nonneg_on_R(img)
    nn_minus = nonneg_on_R(-img)
    if nn_plus.ok or nn_minus.ok:
        # one-signed with an irrational zero
        return {"zero_interval": _isolate_squarefree(sf)[0]}
    a, b = nn_plus.x0, nn_minus.x0
    assert a is not None and b is not None
    return {"sign_change": ((a, img.evaluate(a)), (b, img.evaluate(b)))}


def falsify_preservation(
    T: WeylOp, d: int, cone: str, spec: SampleSpec
) -> Witness | None:
    """Draw random cone members and return the first exactly-refuted image.

    SOS inputs are sums of squares; POS and ELL inputs add a random positive
    rational constant.  Image membership is decided exactly, so a returned
    Witness is a proof of non-preservation; None only exhausts the budget.
    """
    if cone not in (SOS, POS, ELL):
        raise ValueError(f"unknown cone {cone!r}")
    rng = random.Random(spec.seed)
    base = SampleSpec(min(spec.degree, d), spec.squares, spec.height, spec.trials, spec.seed)
    for _ in range(spec.trials):
        f, gs = random_sos(base, rng)
        eps = Fraction(0)
        if cone in (POS, ELL):
            eps = Fraction(rng.randint(1, spec.height), rng.randint(1, spec.height))
            f = f + eps
        img = T.apply(f)
        if cone == SOS:
            res = nonneg_on_R(img)
            if res.ok:
                continue
            return Witness(
                squares=gs, epsilon=eps, degree_bound=d, shift=Fraction(0),
                x0=res.x0, value=img.evaluate(res.x0),
            )
        if cone == POS:
            res = positive_on_R(img)
            if res.ok:
                continue
            return Witness(
                squares=gs, epsilon=eps, degree_bound=d, shift=Fraction(0),
                x0=res.x0,
                value=None if res.x0 is None else img.evaluate(res.x0),
                zero_interval=res.zero_interval,
            )
        # ELL: the image must have no real zero
        if positive_on_R(img).ok or positive_on_R(-img).ok:
            continue
        return Witness(
            squares=gs, epsilon=eps, degree_bound=d, shift=Fraction(0),
            **_ell_violation_fields(img),
        )
    return None


def _has_real_zero_in(p: UniPoly, lo: Fraction, hi: Fraction) -> bool:
    if p.is_zero():
        return True
    if p.evaluate(lo) == 0 or p.evaluate(hi) == 0:
        return True
    sf = squarefree_part(p)
    if sf.degree() <= 0:
        return False
    return _SturmChain(sf).count(lo, hi) >= 1


def verify_witness(T: WeylOp, w: Witness, cone: str) -> bool:
    """Re-verify a counterexample from scratch, all in exact arithmetic.

    Checks that the input rebuilt from its declared squares (plus epsilon)
    respects the degree bound and lies in the claimed cone, and that the
    certificate fields really refute membership of the image: a strictly
    negative value for SOS, a value <= 0 or a real zero for POS, a real zero
    or an exact sign change for ELL.
    """
    if cone not in (SOS, POS, ELL):
        raise ValueError(f"unknown cone {cone!r}")
    if w.epsilon < 0:
        return False
    f = w.input_polynomial()
    if f.degree() > w.degree_bound:
        return False
    if cone in (POS, ELL):
        if not (w.epsilon > 0 or positive_on_R(f).ok):
            return False
    img = T.apply(f)
    if cone == SOS:
        if w.x0 is None or w.value is None:
            return False
        return img.evaluate(w.x0) == w.value and w.value < 0
    if cone == POS:
        if w.x0 is not None:
            return w.value is not None and img.evaluate(w.x0) == w.value and w.value <= 0
        if w.zero_interval is not None:
            return _has_real_zero_in(img, *w.zero_interval)
        return False
    # ELL
    if w.x0 is not None and w.value is not None:
        return img.evaluate(w.x0) == w.value and w.value == 0
    if w.zero_interval is not None:
        return _has_real_zero_in(img, *w.zero_interval)
    if w.sign_change is not None:
        (a, va), (b, vb) = w.sign_change
        if img.evaluate(a) != va or img.evaluate(b) != vb:
            return False
        return (va < 0 < vb) or (vb < 0 < va)
    return False
