"""Support-point combinatorics, the chi root family, the quadratic factor
families, and executable verifiers for the polynomial identities tying
them together.

The central objects:

  * the index set (m): the m same-parity integers, step 2, symmetric
    about 0, which label the atoms of the discrete transition kernel;
  * chi_k(y, q): the closed-form roots carrying those atoms, defined for
    any integer k through half-integer powers of q and the radical
    sqrt(y^2 + 4/(q-1));
  * v_n / t_n: the quadratic factors whose products reproduce the
    Al-Salam-Chihara polynomials at rho = q^{-(m-1)/2}.

Verifiers evaluate both sides of an identity on point grids that exceed
the polynomial degree bound — in exact arithmetic that certifies the
identity, without any symbolic algebra.  Complex arithmetic appears only
inside verifiers; the probabilistic pipeline stays real.
"""

from __future__ import annotations

import cmath
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .exactnum import (
    NotAPerfectSquare,
    QuadraticNumber,
    quad_sqrt,
    scalar_sqrt,
)
from .qcore import (
    eval_B,
    eval_B_seq,
    eval_H,
    eval_H_seq,
    eval_h,
    eval_h_seq,
    eval_p,
    eval_p_expansion,
    q_binomial,
)

__all__ = [
    "IndexSetError",
    "NotRepresentable",
    "VerificationFailed",
    "VerificationReport",
    "index_set",
    "index_sumset",
    "chi",
    "chi_radical",
    "v_factor",
    "t_factor",
    "eval_sum_form",
    "eval_product_form",
    "rational_grid",
    "verify_factorization",
    "verify_addition_formula",
    "verify_h_H_relation",
    "verify_B_H_relation",
    "verify_chi_properties",
    "hermite_limit_identity",
]


class IndexSetError(ValueError):
    """Invalid transition order for an index set."""


class NotRepresentable(ArithmeticError):
    """An exact chi evaluation needs a square root outside the run's field."""


@dataclass
class VerificationReport:
    """Outcome of one identity check over a family of sample points."""

    identity: str
    parameters: dict
    points_checked: int
    max_residual: float
    witness: dict | None = None
    passed: bool = True

    def to_json_dict(self) -> dict:
        doc = {
            "identity": self.identity,
            "parameters": self.parameters,
            "points_checked": self.points_checked,
            "max_residual": self.max_residual,
            "passed": self.passed,
        }
        if self.witness is not None:
            doc["witness"] = self.witness
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


class VerificationFailed(Exception):
    """An identity check found a counterexample; carries the report."""

    def __init__(self, report: VerificationReport):
        self.report = report
        super().__init__(f"{report.identity}: {report.witness}")


def _fail(report: VerificationReport, witness: dict) -> VerificationFailed:
    report.witness = witness
    report.passed = False
    return VerificationFailed(report)


def _rel_err(a, b) -> float:
    a, b = complex(a), complex(b)
    return abs(a - b) / max(1.0, abs(a), abs(b))


def _normalize_q(q):
    return Fraction(q) if isinstance(q, int) else q


def _resolve_sqrt_q(q, sqrt_q):
    if sqrt_q is not None:
        return sqrt_q
    return scalar_sqrt(q)


# ---------------------------------------------------------------------------
# index sets
# ---------------------------------------------------------------------------


def index_set(m: int) -> list[int]:
    """The m integers {-(m-1), -(m-3), ..., m-1}: same parity as m-1,
    step 2, symmetric about 0.  (1) = {0}, (2) = {-1, 1}, (3) = {-2, 0, 2}.
    """
    if m < 1:
        raise IndexSetError(f"index set needs m >= 1, got {m}")
    return list(range(-(m - 1), m, 2))


def index_sumset(m: int, n: int) -> list[int]:
    """The literal sumset {i + j : i in (m), j in (n)}.

    It always collapses to (m+n-1); that equality is re-derived here and
    checked, not assumed.
    """
    sums = sorted({i + j for i in index_set(m) for j in index_set(n)})
    expected = index_set(m + n - 1)
    if sums != expected:
        raise AssertionError(
            f"sumset regression: ({m}) + ({n}) = {sums}, expected {expected}"
        )
    return sums


# ---------------------------------------------------------------------------
# chi and the quadratic factors
# ---------------------------------------------------------------------------


def _lift_state(y, q):
    """Return (y, radical) with radical = sqrt(y^2 + 4/(q-1)) in y's backend.

    Exact rationals are lifted into Q(sqrt(D)) with D = y^2 + 4/(q-1); a
    QuadraticNumber state keeps its own field and the radical is extracted
    there (NotRepresentable when it does not exist).
    """
    if isinstance(y, QuadraticNumber):
        try:
            return y, quad_sqrt(y * y + Fraction(4) / (q - 1))
        except NotAPerfectSquare as exc:
            raise NotRepresentable(
                f"sqrt({y}^2 + 4/(q-1)) leaves Q(sqrt({y.D}))"
            ) from exc
    if isinstance(y, (int, Fraction)):
        y = Fraction(y)
        D = y * y + Fraction(4) / (q - 1)
        lifted = QuadraticNumber(y, 0, D)
        return lifted, quad_sqrt(QuadraticNumber(D, 0, D))
    return y, math.sqrt(y * y + 4.0 / (q - 1.0))


def chi(k: int, y, q, sqrt_q=None):
    """The support point with integer index k at conditioning state y:

        chi_k(y, q) = y (q^{k/2} + q^{-k/2}) / 2
                      + sqrt(y^2 + 4/(q-1)) (q^{k/2} - q^{-k/2}) / 2

    valid for every k in Z (k = 0 gives y back); chi_{+n} and chi_{-n}
    are the two roots of v_n(x, -y, q).  Requires q > 1.
    """
    q = _normalize_q(q)
    if not q > 1:
        raise ValueError(f"chi needs q > 1, got {q}")
    sq = _resolve_sqrt_q(q, sqrt_q)
    y, radical = _lift_state(y, q)
    qk = sq**k
    qk_inv = 1 / qk
    return (y * (qk + qk_inv) + radical * (qk - qk_inv)) / 2


def chi_radical(y, q):
    """sqrt(y^2 + 4/(q-1)) in y's backend (the radical chi is built from)."""
    q = _normalize_q(q)
    if not q > 1:
        raise ValueError(f"chi_radical needs q > 1, got {q}")
    return _lift_state(y, q)[1]


def v_factor(n: int, x, y, q, sqrt_q=None):
    """Quadratic factor v_n(x,y,q) = x^2 + y^2 + xy (q^{n/2} + q^{-n/2})
    - (q^n + q^{-n} - 2)/(q - 1) for n >= 1; v_0 = x + y."""
    if n < 0:
        raise ValueError("v_factor needs n >= 0")
    if n == 0:
        return x + y
    q = _normalize_q(q)
    if q == 1:
        raise ValueError("v_factor needs q != 1 for n >= 1")
    sq = _resolve_sqrt_q(q, sqrt_q)
    qn_half = sq**n
    qn = qn_half * qn_half
    return x * x + y * y + x * y * (qn_half + 1 / qn_half) - (qn + 1 / qn - 2) / (q - 1)


def t_factor(n: int, x, y, q, sqrt_q=None):
    """Companion factor t_n(x,y,q) = x^2 + y^2 + xy (q^{n/2} + q^{-n/2})
    + (q^n + q^{-n} - 2)/4 for n >= 1; t_0 = x + y."""
    if n < 0:
        raise ValueError("t_factor needs n >= 0")
    if n == 0:
        return x + y
    q = _normalize_q(q)
    sq = _resolve_sqrt_q(q, sqrt_q)
    qn_half = sq**n
    qn = qn_half * qn_half
    return x * x + y * y + x * y * (qn_half + 1 / qn_half) + (qn + 1 / qn - 2) / 4


def eval_sum_form(m: int, x, y, q, sqrt_q=None):
    """The degree-m connection sum

        sum_k qbinom(m,k) q^{-(m-1)(m-k)/2} B_{m-k}(y|q) H_k(x|q),

    i.e. the expansion route to p_m(x | y, q^{-(m-1)/2}, q)."""
    if m < 0:
        raise ValueError("eval_sum_form needs m >= 0")
    q = _normalize_q(q)
    sq = _resolve_sqrt_q(q, sqrt_q)
    return eval_p_expansion(m, x, y, sq ** (-(m - 1)) if m >= 1 else 1, q)


def eval_product_form(m: int, x, y, q, sqrt_q=None):
    """The factorized route to p_m(x | y, q^{-(m-1)/2}, q):

        prod_{j=1..i} v_{2j-1}(x,-y,q)   for m = 2i,
        prod_{j=0..i} v_{2j}(x,-y,q)     for m = 2i+1.
    """
    if m < 1:
        raise ValueError("eval_product_form needs m >= 1")
    q = _normalize_q(q)
    if q == 1:
        raise ValueError("eval_product_form needs q != 1")
    sq = _resolve_sqrt_q(q, sqrt_q)
    neg_y = -y
    if m % 2 == 0:
        degrees = range(1, m, 2)
    else:
        degrees = range(0, m, 2)
    out = 1
    for n in degrees:
        out = out * v_factor(n, x, neg_y, q, sq)
    return out


# ---------------------------------------------------------------------------
# verifiers
# ---------------------------------------------------------------------------


def rational_grid(side: int, lo=Fraction(-2), hi=Fraction(2)) -> list[Fraction]:
    """side evenly spaced rationals covering [lo, hi]."""
    if side < 1:
        raise ValueError("grid side must be >= 1")
    lo, hi = Fraction(lo), Fraction(hi)
    if side == 1:
        return [lo]
    step = (hi - lo) / (side - 1)
    return [lo + step * i for i in range(side)]


def verify_factorization(
    m: int,
    q,
    sample_points=None,
    sqrt_q=None,
    rel_tol: float = 1e-8,
) -> VerificationReport:
    """Check the three evaluation routes to p_m(x | y, q^{-(m-1)/2}, q)
    (recurrence, connection sum, v-factor product) against each other on a
    grid of (x, y) pairs large enough to pin a bivariate degree-m identity.

    Exact inputs demand identical equality; floats allow rel_tol.
    """
    q = _normalize_q(q)
    exact = isinstance(q, Fraction)
    sq = _resolve_sqrt_q(q, sqrt_q)
    if sample_points is None:
        side = m + 2  # (m+2)^2 > (m+1)^2 points
        axis = rational_grid(side) if exact else [float(v) for v in rational_grid(side)]
        sample_points = [(x, y) for x in axis for y in axis]
    if len(sample_points) <= (m + 1) ** 2:
        raise ValueError(f"need more than {(m + 1) ** 2} sample points for degree {m}")
    rho = sq ** (-(m - 1))
    report = VerificationReport(
        identity="factorization",
        parameters={"m": m, "q": str(q), "mode": "exact" if exact else "float"},
        points_checked=0,
        max_residual=0.0,
    )
    for x, y in sample_points:
        recur = eval_p(m, x, y, rho, q)
        summed = eval_sum_form(m, x, y, q, sq)
        product = eval_product_form(m, x, y, q, sq)
        report.points_checked += 1
        if exact:
            if not (recur == summed and recur == product):
                raise _fail(
                    report,
                    {
                        "x": str(x),
                        "y": str(y),
                        "recurrence": str(recur),
                        "sum_form": str(summed),
                        "product_form": str(product),
                    },
                )
        else:
            residual = max(_rel_err(recur, summed), _rel_err(recur, product))
            report.max_residual = max(report.max_residual, residual)
            if residual > rel_tol:
                raise _fail(
                    report,
                    {
                        "x": x,
                        "y": y,
                        "recurrence": recur,
                        "sum_form": summed,
                        "product_form": product,
                        "residual": residual,
                    },
                )
    return report


def verify_addition_formula(
    n: int,
    theta: float,
    phi: float,
    q: float,
    rel_tol: float = 1e-8,
    imag_tol: float = 1e-10,
    dps: int = 50,
) -> VerificationReport:
    """Three-way check of the product representation of the binomial-type
    sum over continuous q-Hermite polynomials at x = cos(theta),
    y = cos(phi):

      (a)  sum_k qbinom(n,k) q^{-k(n-k)/2} h_k(x|q) h_{n-k}(y|1/q)
      (b)  e^{-i n phi} (-q^{(1-n)/2} e^{i(theta+phi)},
                         -q^{(1-n)/2} e^{i(-theta+phi)}; q)_n
      (c)  2^n * (t-factor product over odd or even degrees below n)

    The alternating sum (a) cancels catastrophically in doubles for q far
    from 1, so all three quantities are evaluated with mpmath at `dps`
    digits and compared at rel_tol; the imaginary part of (b) must vanish
    to imag_tol.
    """
    if n < 1:
        raise ValueError("verify_addition_formula needs n >= 1")
    q = float(q)
    if q <= 0 or q == 1:
        raise ValueError("needs q in (0,1) or (1,inf)")
    report = VerificationReport(
        identity="addition-formula",
        parameters={"n": n, "theta": theta, "phi": phi, "q": q},
        points_checked=0,
        max_residual=0.0,
    )
    with mpmath.mp.workdps(dps):
        mq = mpmath.mpf(q)
        x, y = mpmath.cos(mpmath.mpf(theta)), mpmath.cos(mpmath.mpf(phi))
        h_x = eval_h_seq(n, x, mq)
        h_y = eval_h_seq(n, y, 1 / mq)
        summed = mpmath.mpf(0)
        for k in range(n + 1):
            weight = mq ** (mpmath.mpf(-k * (n - k)) / 2)
            summed += q_binomial(n, k, mq) * weight * h_x[k] * h_y[n - k]

        shift = mq ** (mpmath.mpf(1 - n) / 2)
        pochhammer = mpmath.e ** (-1j * n * mpmath.mpf(phi))
        for base in (
            -shift * mpmath.e ** (1j * (mpmath.mpf(theta) + mpmath.mpf(phi))),
            -shift * mpmath.e ** (1j * (-mpmath.mpf(theta) + mpmath.mpf(phi))),
        ):
            power = mpmath.mpf(1)
            for _ in range(n):
                pochhammer *= 1 - base * power
                power *= mq

        sqrt_mq = mpmath.sqrt(mq)
        degrees = range(1, n, 2) if n % 2 == 0 else range(0, n, 2)
        product = mpmath.mpf(2) ** n
        for d in degrees:
            product *= t_factor(d, x, y, mq, sqrt_mq)

        scale = max(1.0, abs(summed), abs(product))
        residual = float(
            max(
                abs(summed - pochhammer.real),
                abs(summed - product),
                abs(pochhammer.real - product),
            )
            / scale
        )
        imag = float(abs(pochhammer.imag))
        report.points_checked = 3
        report.max_residual = max(residual, imag)
        if residual > rel_tol or imag > imag_tol:
            raise _fail(
                report,
                {
                    "sum": float(summed),
                    "pochhammer_product": complex(pochhammer),
                    "t_product": float(product),
                    "residual": residual,
                    "imag": imag,
                },
            )
    return report


def verify_h_H_relation(m: int, x: float, q: float, rel_tol: float = 1e-8) -> VerificationReport:
    """Check the change of normalization between the two q-Hermite families,

        h_m(x|q) = (1-q)^{m/2} H_m(2x / sqrt(1-q) | q),

    plus the companion display H_m(x|q) = (-i)^m h_m(i x sqrt(q-1)/2 | q)
    / (q-1)^{m/2}.  For q > 1 both routes run through complex floats with
    a shared branch of the square root.
    """
    if m < 0:
        raise ValueError("degree must be >= 0")
    q = float(q)
    if q <= 0 or q == 1:
        raise ValueError("needs q in (0,1) or (1,inf)")
    x = float(x)
    report = VerificationReport(
        identity="h-H-relation",
        parameters={"m": m, "x": x, "q": q},
        points_checked=0,
        max_residual=0.0,
    )
    w = cmath.sqrt(1 - q + 0j)
    lhs = eval_h(m, x, q)
    rhs = w**m * eval_H(m, 2 * x / w if m else 0j, q) if m else 1 + 0j
    residual = _rel_err(lhs, rhs)

    u = cmath.sqrt(q - 1 + 0j)
    lhs2 = eval_H(m, x, q)
    rhs2 = (-1j) ** m * eval_h(m, 1j * x * u / 2, q) / u**m if m else 1 + 0j
    residual2 = _rel_err(lhs2, rhs2)

    report.points_checked = 2
    report.max_residual = max(residual, residual2)
    if report.max_residual > rel_tol:
        raise _fail(
            report,
            {"h_side": lhs, "scaled_H": complex(rhs), "H_side": lhs2, "scaled_h": complex(rhs2)},
        )
    return report


def verify_B_H_relation(n: int, y: float, q: float, rel_tol: float = 1e-8) -> VerificationReport:
    """Check the two complex-substitution routes from B_n back to the
    Hermite families (q > 0 branch):

        B_n(y|q) = i^n q^{n(n-2)/2} H_n(i sqrt(q) y | 1/q)
        B_n(y|q) = i^n q^{n(n-1)/2} h_n(i y sqrt(q-1)/2 | 1/q) / (q-1)^{n/2}
    """
    if n < 0:
        raise ValueError("degree must be >= 0")
    q = float(q)
    if q <= 0 or q == 1:
        raise ValueError("needs q in (0,1) or (1,inf)")
    y = float(y)
    report = VerificationReport(
        identity="B-H-relation",
        parameters={"n": n, "y": y, "q": q},
        points_checked=0,
        max_residual=0.0,
    )
    lhs = eval_B(n, y, q)
    rhs_H = 1j**n * math.sqrt(q) ** (n * (n - 2)) * eval_H(n, 1j * math.sqrt(q) * y, 1 / q)
    u = cmath.sqrt(q - 1 + 0j)
    rhs_h = 1j**n * float(q) ** (n * (n - 1) // 2) * eval_h(n, 1j * y * u / 2, 1 / q) / u**n if n else 1 + 0j
    residual = max(_rel_err(lhs, rhs_H), _rel_err(lhs, rhs_h))
    report.points_checked = 2
    report.max_residual = residual
    if residual > rel_tol:
        raise _fail(report, {"B": lhs, "via_H": complex(rhs_H), "via_h": complex(rhs_h)})
    return report


def verify_chi_properties(
    m: int,
    n: int,
    y,
    q,
    sqrt_q=None,
    rel_tol: float = 1e-9,
) -> VerificationReport:
    """Check the two structural properties of the root family:

      (i)  chi_m(y,q)^2 + 4/(q-1) is the square of
           y (q^{m/2} - q^{-m/2})/2 + sqrt(y^2 + 4/(q-1)) (q^{m/2} + q^{-m/2})/2,
           which exact mode re-extracts with quad_sqrt;
      (ii) chi_m(chi_n(y,q), q) = chi_{m+n}(y,q).

    Index 0 is allowed (chi_0 is the identity map).  Exact inputs demand
    identical equality.
    """
    q = _normalize_q(q)
    if not q > 1:
        raise ValueError(f"needs q > 1, got {q}")
    sq = _resolve_sqrt_q(q, sqrt_q)
    exact = not isinstance(q, float)
    report = VerificationReport(
        identity="chi-properties",
        parameters={"m": m, "n": n, "y": str(y), "q": str(q), "mode": "exact" if exact else "float"},
        points_checked=0,
        max_residual=0.0,
    )

    lifted, radical = _lift_state(y, q)
    qm = sq**m
    square_root_form = (lifted * (qm - 1 / qm) + radical * (qm + 1 / qm)) / 2
    chi_m = chi(m, y, q, sq)
    lhs = chi_m * chi_m + (Fraction(4) if exact else 4.0) / (q - 1)
    report.points_checked += 1
    if exact:
        ok = square_root_form * square_root_form == lhs and quad_sqrt(lhs) == square_root_form
    else:
        residual = _rel_err(lhs, square_root_form * square_root_form)
        report.max_residual = max(report.max_residual, residual)
        ok = residual <= rel_tol
    if not ok:
        raise _fail(
            report,
            {"property": "radical-square", "lhs": str(lhs), "root": str(square_root_form)},
        )

    composed = chi(m, chi(n, y, q, sq), q, sq)
    direct = chi(m + n, y, q, sq)
    report.points_checked += 1
    if exact:
        ok = composed == direct
    else:
        residual = _rel_err(composed, direct)
        report.max_residual = max(report.max_residual, residual)
        ok = residual <= rel_tol
    if not ok:
        raise _fail(
            report,
            {"property": "composition", "chi_m(chi_n)": str(composed), "chi_{m+n}": str(direct)},
        )
    return report


def hermite_limit_identity(m: int, x, y) -> VerificationReport:
    """The q = 1 collapse of the connection sum: with classical binomial
    weights,

        sum_k C(m,k) B_{m-k}(y|1) H_k(x|1) = (x - y)^m

    exactly over the rationals.  (The factor family at q = 1 gives
    v(x,-y,1) = (x-y)^2, so the product side forces the minus sign.)
    """
    if m < 1:
        raise ValueError("needs m >= 1")
    x, y = Fraction(x), Fraction(y)
    one = Fraction(1)
    B_seq = eval_B_seq(m, y, one)
    H_seq = eval_H_seq(m, x, one)
    total = Fraction(0)
    for k in range(m + 1):
        total += math.comb(m, k) * B_seq[m - k] * H_seq[k]
    expected = (x - y) ** m
    report = VerificationReport(
        identity="hermite-limit",
        parameters={"m": m, "x": str(x), "y": str(y)},
        points_checked=1,
        max_residual=0.0,
    )
    if total != expected:
        raise _fail(report, {"sum": str(total), "(x-y)^m": str(expected)})
    return report


def random_angle_pairs(count: int, seed: int) -> list[tuple[float, float]]:
    """Deterministic (theta, phi) samples in (0, pi)^2 for the addition check."""
    rng = random.Random(seed)
    return [(rng.uniform(0.0, math.pi), rng.uniform(0.0, math.pi)) for _ in range(count)]
