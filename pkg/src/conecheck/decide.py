"""Top-level preservation verdicts with exact, re-verifiable certificates.

For a degree bound d = 2k the decisive object is the (k+1) x (k+1)
parametric Hankel matrix: degree-d nonnegative inputs are sums of squares of
polynomials of degree at most k, so the quadratic form on their coefficient
vectors carries exactly the entries (i+j)! q_{i+j}(y) with i+j <= d.  (A
(d+1)-sized matrix would constrain coefficients those inputs cannot reach
and wrongly rejects, e.g., the second-derivative operator at d = 2.)

Positivity preservation is decided as "semidefinite sweep passes and the
image of 1 is strictly positive on R".  Strict Hankel positivity (a
pointwise positive definite family, equivalently all leading minors strictly
positive on R) is sufficient but not necessary: the identity operator and
finite-atom convolutions preserve positivity while their matrices are
singular.  The strict predicates are therefore computed and reported but
never overrule the decision.

On a violation the verdict carries a Witness: an input polynomial given by
its explicit square roots (plus an optional positive constant), a rational
point, and the exact value of the image there.  Witnesses re-verify from
scratch; see `oracle.verify_witness`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .hankel import (
    MinorReport,
    ParamHankel,
    build_param_hankel,
    pd_for_all_y,
    psd_at_point,
    psd_for_all_y,
)
from .polycore import Rat, SignResult, UniPoly, _rat, nonneg_on_R, positive_on_R
from .weylops import WeylOp

SOS = "SOS"
POS = "POS"
ELL = "ELL"
CONES = (SOS, POS, ELL)


@dataclass(frozen=True)
class Witness:
    """Counterexample input with the exact failure of its image.

    The input polynomial is f = sum of squares of `squares` plus `epsilon`
    (zero for SOS witnesses, positive when an SOS witness is lifted to a
    strict-positivity one).  `shift` records the Hankel parameter point used
    by the construction; for witnesses found by search it is 0.

    The image failure is certified by whichever field applies: a point `x0`
    with image value `value`, an isolating `zero_interval` around a real zero
    of the image, or a `sign_change` pair ((a, image(a)), (b, image(b))) with
    strictly opposite signs.
    """

    squares: tuple[UniPoly, ...]
    epsilon: Fraction
    degree_bound: int
    shift: Fraction
    x0: Fraction | None = None
    value: Fraction | None = None
    zero_interval: tuple[Fraction, Fraction] | None = None
    sign_change: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]] | None = None

    def input_polynomial(self) -> UniPoly:
        var = self.squares[0].var if self.squares else "x"
        f = UniPoly.constant(self.epsilon, var)
        for g in self.squares:
            f = f + g * g
        return f

    def to_dict(self) -> dict:
        return {
            "squares": [str(g) for g in self.squares],
            "epsilon": str(self.epsilon),
            "degree_bound": self.degree_bound,
            "shift": str(self.shift),
            "x0": None if self.x0 is None else str(self.x0),
            "value": None if self.value is None else str(self.value),
            "zero_interval": None
            if self.zero_interval is None
            else [str(self.zero_interval[0]), str(self.zero_interval[1])],
            "sign_change": None
            if self.sign_change is None
            else [[str(v) for v in pair] for pair in self.sign_change],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Witness":
        from .polycore import parse_unipoly

        def frac(s):
            return None if s is None else Fraction(s)

        zi = data.get("zero_interval")
        sc = data.get("sign_change")
        return cls(
            squares=tuple(parse_unipoly(s, "x") for s in data["squares"]),
            epsilon=Fraction(data["epsilon"]),
            degree_bound=int(data["degree_bound"]),
            shift=Fraction(data["shift"]),
            x0=frac(data.get("x0")),
            value=frac(data.get("value")),
            zero_interval=None if zi is None else (Fraction(zi[0]), Fraction(zi[1])),
            sign_change=None
            if sc is None
            else tuple(tuple(Fraction(v) for v in pair) for pair in sc),
        )


@dataclass(frozen=True)
class PredicateReport:
    """The exact one-parameter Hankel predicates, reported alongside verdicts."""

    psd_all_y: bool
    pd_all_y: bool
    det_positive_all_m: bool
    q0_positive: bool
    q0_nonneg: bool

    def to_dict(self) -> dict:
        return {
            "psd_all_y": self.psd_all_y,
            "pd_all_y": self.pd_all_y,
            "det_positive_all_m": self.det_positive_all_m,
            "q0_positive": self.q0_positive,
            "q0_nonneg": self.q0_nonneg,
        }


@dataclass(frozen=True)
class Verdict:
    cone: str
    degree_bound: int | None  # None means the unbounded-degree question
    preserves: bool
    certificate: object  # MinorReport tuple, Witness, or a pair of Witnesses
    predicates: PredicateReport
    truncation_flag: bool
    notes: tuple[str, ...] = ()

    @property
    def result(self) -> str:
        return "Preserves" if self.preserves else "Violates"

    def to_dict(self) -> dict:
        if isinstance(self.certificate, Witness):
            cert = {"type": "witness", "witness": self.certificate.to_dict()}
        elif isinstance(self.certificate, tuple) and self.certificate and isinstance(
            self.certificate[0], Witness
        ):
            cert = {
                "type": "witness_pair",
                "witnesses": [w.to_dict() for w in self.certificate],
            }
        elif isinstance(self.certificate, tuple):
            cert = {
                "type": "minors",
                "reports": [r.to_dict() for r in self.certificate],
            }
        else:
            cert = {"type": "none"}
        return {
            "cone": self.cone,
            "degree_bound": "unbounded" if self.degree_bound is None else self.degree_bound,
            "result": self.result,
            "certificate": cert,
            "predicate_report": self.predicates.to_dict(),
            "truncation_flag": self.truncation_flag,
            "notes": list(self.notes),
        }


def _reduce_degree(d: int) -> tuple[int, list[str]]:
    if d < 0:
        raise ValueError("degree bound must be nonnegative")
    if d % 2 == 1:
        return d - 1, [f"odd degree bound {d} reduced to {d - 1} (no odd-degree cone members)"]
    return d, []


def _predicates(T: WeylOp, H: ParamHankel, sweep_ok: bool) -> PredicateReport:
    pd = pd_for_all_y(H)
    minors = H.principal_minors()
    det_pos = all(
        positive_on_R(minors[tuple(range(size))]).ok for size in range(1, H.size + 1)
    )
    q0 = T.coeff(0)
    return PredicateReport(
        psd_all_y=sweep_ok,
        pd_all_y=pd.ok,
        det_positive_all_m=det_pos,
        q0_positive=positive_on_R(q0).ok,
        q0_nonneg=nonneg_on_R(q0).ok,
    )


def paper_strict_criteria(T: WeylOp, d: int) -> tuple[bool, bool]:
    """(pointwise positive definite for all y, all leading dets positive on R).

    Both are computed for the (k+1)-sized family, k = d//2; by Sylvester's
    criterion applied pointwise the two predicates agree, and the pair is
    reported for cross-checking.  Neither is used to decide positivity
    preservation (see the module docstring).
    """
    d, _ = _reduce_degree(d)
    H = build_param_hankel(T, d // 2)
    pd = pd_for_all_y(H)
    minors = H.principal_minors()
    det_pos = all(
        positive_on_R(minors[tuple(range(size))]).ok for size in range(1, H.size + 1)
    )
    return pd.ok, det_pos


def extract_witness(
    T: WeylOp, d: int, y0: Rat, direction: tuple[Fraction, ...]
) -> Witness:
    """Build the explicit counterexample from a failed pointwise PSD test.

    With g(x) = sum_i c_i x^i and h = g(x - y0)^2, the image of h at y0
    equals the quadratic form sum (i+j)! q_{i+j}(y0) c_i c_j, which the
    direction certifies to be negative.  The precondition is re-checked and
    so is the final value, both exactly.
    """
    y0 = _rat(y0)
    k = d // 2
    if len(direction) != k + 1:
        raise ValueError(f"direction must have length {k + 1}")
    H = build_param_hankel(T, k)
    from .hankel import _quad_form

    qform = _quad_form(H.evaluate(y0), tuple(_rat(c) for c in direction))
    if not qform < 0:
        raise ValueError("direction does not certify a negative quadratic form")
    g = UniPoly([_rat(c) for c in direction], T.var)
    g_shifted = g.taylor_shift(-y0)
    h = g_shifted * g_shifted
    value = T.apply(h).evaluate(y0)
    if value != qform:  # pragma: no cover - identity between form and image
        raise RuntimeError("internal error: witness value mismatch")
    return Witness(
        squares=(g_shifted,),
        epsilon=Fraction(0),
        degree_bound=d,
        shift=y0,
        x0=y0,
        value=value,
    )


def decide_sos_bounded(T: WeylOp, d: int) -> Verdict:
    """Does T map every nonnegative polynomial of degree <= d to a nonnegative one?"""
    d, notes = _reduce_degree(d)
    k = d // 2
    H = build_param_hankel(T, k)
    trunc = T.order() > d
    if trunc:
        notes.append(f"operator order {T.order()} exceeds degree bound {d}; higher terms annihilate the inputs")
    sweep = psd_for_all_y(H)
    preds = _predicates(T, H, sweep.ok)
    if sweep.ok:
        return Verdict(SOS, d, True, sweep.reports, preds, trunc, tuple(notes))
    fail = sweep.failure
    assert fail is not None and fail.y0 is not None
    point = psd_at_point(H, fail.y0)
    if point.ok:  # pragma: no cover - a negative minor forces a failing point
        raise RuntimeError("internal error: minor negative but matrix PSD at point")
    witness = extract_witness(T, d, fail.y0, point.direction)
    return Verdict(SOS, d, False, witness, preds, trunc, tuple(notes))


def _pos_epsilon(value: Fraction, q0_at_x0: Fraction) -> Fraction:
    return abs(value) / (2 * (1 + abs(q0_at_x0)))


def decide_pos_bounded(T: WeylOp, d: int) -> Verdict:
    """Does T map every strictly positive polynomial of degree <= d into POS?

    Membership route: positive inputs are nonnegative ones plus a positive
    constant, so preservation holds iff the semidefinite sweep passes and
    T(1) = q_0 is strictly positive on R.  A failing sweep lifts the SOS
    witness by a small positive epsilon; a failing q_0 is witnessed by the
    input 1 directly.
    """
    sos = decide_sos_bounded(T, d)
    d_eff = sos.degree_bound
    assert d_eff is not None
    q0 = T.coeff(0)
    q0_pos = positive_on_R(q0)
    notes = list(sos.notes)
    if sos.preserves and q0_pos.ok:
        return Verdict(POS, d_eff, True, sos.certificate, sos.predicates, sos.truncation_flag, tuple(notes))
    if not sos.preserves:
        base = sos.certificate
        assert isinstance(base, Witness) and base.x0 is not None and base.value is not None
        q0_at = q0.evaluate(base.x0)
        eps = _pos_epsilon(base.value, q0_at)
        while True:
            value = base.value + eps * q0_at
            if value < 0:
                break
            eps /= 2
        witness = replace(base, epsilon=eps, value=value)
        return Verdict(POS, d_eff, False, witness, sos.predicates, sos.truncation_flag, tuple(notes))
    # semidefinite sweep passed but the image of 1 is not strictly positive
    one = UniPoly.constant(1, T.var)
    x0 = q0_pos.x0
    witness = Witness(
        squares=(one,),
        epsilon=Fraction(0),
        degree_bound=d_eff,
        shift=Fraction(0),
        x0=x0,
        value=None if x0 is None else q0.evaluate(x0),
        zero_interval=q0_pos.zero_interval,
    )
    notes.append("image of 1 is not strictly positive on R")
    return Verdict(POS, d_eff, False, witness, sos.predicates, sos.truncation_flag, tuple(notes))


def decide_ell_bounded(T: WeylOp, d: int) -> Verdict:
    """Does T map elliptic (nowhere vanishing) inputs of degree <= d into ELL?

    Preservation holds iff T or -T preserves strict positivity; on a
    violation both branch witnesses are attached.
    """
    pos_plus = decide_pos_bounded(T, d)
    if pos_plus.preserves:
        notes = pos_plus.notes + ("elliptic preservation through +T (positivity branch)",)
        return Verdict(
            ELL, pos_plus.degree_bound, True, pos_plus.certificate, pos_plus.predicates,
            pos_plus.truncation_flag, notes,
        )
    pos_minus = decide_pos_bounded(-T, d)
    if pos_minus.preserves:
        notes = pos_minus.notes + ("elliptic preservation through -T (positivity branch)",)
        return Verdict(
            ELL, pos_minus.degree_bound, True, pos_minus.certificate, pos_plus.predicates,
            pos_plus.truncation_flag, notes,
        )
    cert = (pos_plus.certificate, pos_minus.certificate)
    notes = pos_plus.notes + ("neither +T nor -T preserves positivity; both branch witnesses attached",)
    return Verdict(
        ELL, pos_plus.degree_bound, False, cert, pos_plus.predicates,
        pos_plus.truncation_flag, notes,
    )


def decide_sos_unbounded(T: WeylOp) -> Verdict:
    """Does T preserve nonnegativity on all of R[x], any degree?

    Only order-zero operators (multiplications) can: multiplication by q_0
    preserves nonnegativity iff q_0 >= 0 on R.  Any operator of finite
    positive order N fails already at the smallest even degree bound above
    N, and the bounded decision there produces the explicit witness.
    """
    if T.is_zero():
        preds = PredicateReport(True, False, False, False, True)
        return Verdict(SOS, None, True, (), preds, False, ("zero operator",))
    order = T.order()
    assert isinstance(order, int)
    if order == 0:
        q0 = T.coeff(0)
        nn = nonneg_on_R(q0)
        H = build_param_hankel(T, 0)
        preds = _predicates(T, H, nn.ok)
        if nn.ok:
            reports = (MinorReport((0,), H.entry(0, 0), True),)
            return Verdict(SOS, None, True, reports, preds, False, ("multiplication operator",))
        one = UniPoly.constant(1, T.var)
        witness = Witness(
            squares=(one,), epsilon=Fraction(0), degree_bound=0, shift=Fraction(0),
            x0=nn.x0, value=q0.evaluate(nn.x0),
        )
        return Verdict(SOS, None, False, witness, preds, False, ("multiplication operator",))
    ell = order + 1 if order % 2 == 1 else order + 2
    bounded = decide_sos_bounded(T, ell)
    if bounded.preserves:  # pragma: no cover - impossible for positive order
        raise RuntimeError("internal error: positive-order operator passed the bounded check")
    notes = bounded.notes + (
        f"finite order {order} >= 1: violation realized at the smallest even degree bound {ell}",
    )
    return Verdict(SOS, None, False, bounded.certificate, bounded.predicates, False, notes)


def decide(T: WeylOp, cone: str, d: int | None) -> Verdict:
    """Dispatch on cone name and bounded/unbounded degree."""
    if cone not in CONES:
        raise ValueError(f"unknown cone {cone!r}")
    if d is None:
        if cone != SOS:
            raise ValueError("unbounded-degree decisions are available for the SOS cone only")
        return decide_sos_unbounded(T)
    if cone == SOS:
        return decide_sos_bounded(T, d)
    if cone == POS:
        return decide_pos_bounded(T, d)
    return decide_ell_bounded(T, d)
