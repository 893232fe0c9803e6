"""q-deformed combinatorial primitives and three-term-recurrence evaluation
of four polynomial families, generic over the scalar backend.

All evaluators are written once against plain arithmetic operators and
work unchanged for float, complex, Fraction, QuadraticNumber and mpmath
scalars.  The families:

    H_n(x|q)        monic q-Hermite:      x H_n = H_{n+1} + [n]_q H_{n-1}
    h_n(x|q)        continuous q-Hermite: 2x h_n = h_{n+1} + (1-q^n) h_{n-1}
    B_n(y|q)        connection family:    B_{n+1} = -q^n y B_n + q^{n-1} [n]_q B_{n-1}
    p_n(x|y,rho,q)  Al-Salam-Chihara:
        p_{n+1} = (x - rho y q^n) p_n - (1 - rho^2 q^{n-1}) [n]_q p_{n-1}

with H_{-1} = h_{-1} = B_{-1} = p_{-1} = 0 and unit initial values.
Everything is a pure function; no global state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exactnum import NotAPerfectSquare, scalar_sqrt

__all__ = [
    "q_bracket",
    "q_factorial",
    "q_binomial",
    "q_pochhammer",
    "eval_H",
    "eval_H_seq",
    "eval_h",
    "eval_h_seq",
    "eval_B",
    "eval_B_seq",
    "eval_p",
    "eval_p_seq",
    "eval_p_expansion",
    "QParams",
]


def _check_finite(v, family: str, degree: int):
    # float mode overflows (n ~ 40 at q ~ 2) must surface as errors, not inf
    if isinstance(v, float) and not math.isfinite(v):
        raise OverflowError(
            f"{family} recurrence overflowed 64-bit floats at degree {degree}; "
            f"use exact (Fraction) inputs"
        )
    if isinstance(v, complex) and not (math.isfinite(v.real) and math.isfinite(v.imag)):
        raise OverflowError(
            f"{family} recurrence overflowed 64-bit floats at degree {degree}; "
            f"use exact (Fraction) inputs"
        )
    return v


def q_bracket(n: int, q):
    """[n]_q = 1 + q + ... + q^{n-1}, with [0]_q = 0.

    The summation form keeps q = 1 first-class (no division by 1-q).
    """
    if n < 0:
        raise ValueError("q_bracket needs n >= 0")
    total = 0
    power = 1
    for _ in range(n):
        total = total + power
        power = power * q
    return total


def q_factorial(n: int, q):
    """[n]_q! = [1]_q [2]_q ... [n]_q, empty product for n = 0."""
    if n < 0:
        raise ValueError("q_factorial needs n >= 0")
    out = 1
    for i in range(1, n + 1):
        out = out * q_bracket(i, q)
    return out


def q_binomial(n: int, k: int, q):
    """Gaussian binomial [n]_q! / ([k]_q! [n-k]_q!); zero when k > n."""
    if k < 0:
        raise ValueError("q_binomial needs k >= 0")
    if k > n:
        return 0
    num = q_factorial(n, q)
    den = q_factorial(k, q) * q_factorial(n - k, q)
    if isinstance(num, int) and isinstance(den, int):
        return Fraction(num, den)  # integer-valued; stay exact
    return num / den


def q_pochhammer(a, q, n: int):
    """(a;q)_n = prod_{i=0}^{n-1} (1 - a q^i); supports complex a."""
    if n < 0:
        raise ValueError("q_pochhammer needs n >= 0")
    out = 1
    power = 1
    for _ in range(n):
        out = out * (1 - a * power)
        power = power * q
    return out


def eval_H_seq(n: int, x, q) -> list:
    """All monic q-Hermite values H_0(x|q) .. H_n(x|q) in one forward pass."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    seq = [1]
    prev, cur = 0, 1
    for i in range(n):
        prev, cur = cur, _check_finite(x * cur - q_bracket(i, q) * prev, "H", i + 1)
        seq.append(cur)
    return seq


def eval_H(n: int, x, q):
    """H_n(x|q) by forward recurrence."""
    prev, cur = 0, 1
    if n < 0:
        raise ValueError("degree must be >= 0")
    for i in range(n):
        prev, cur = cur, _check_finite(x * cur - q_bracket(i, q) * prev, "H", i + 1)
    return cur


def eval_h_seq(n: int, x, q) -> list:
    """All continuous q-Hermite values h_0(x|q) .. h_n(x|q)."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    seq = [1]
    prev, cur = 0, 1
    power = 1  # q^i
    for i in range(n):
        prev, cur = cur, _check_finite(2 * x * cur - (1 - power) * prev, "h", i + 1)
        power = power * q
        seq.append(cur)
    return seq


def eval_h(n: int, x, q):
    """h_n(x|q) by forward recurrence; h_0 = 1, h_1 = 2x."""
    return eval_h_seq(n, x, q)[n]


def eval_B_seq(n: int, y, q) -> list:
    """All connection-family values B_0(y|q) .. B_n(y|q).

    The i = 0 step multiplies [0]_q = 0, so q^{i-1} is never formed with a
    negative exponent (keeps integer q exact).
    """
    if n < 0:
        raise ValueError("degree must be >= 0")
    seq = [1]
    prev, cur = 0, 1
    power_prev, power = None, 1  # q^{i-1}, q^i
    for i in range(n):
        back = power_prev * q_bracket(i, q) if i >= 1 else 0
        prev, cur = cur, _check_finite(-(power * y) * cur + back * prev, "B", i + 1)
        power_prev, power = power, power * q
        seq.append(cur)
    return seq


def eval_B(n: int, y, q):
    """B_n(y|q) by forward recurrence; B_1 = -y."""
    return eval_B_seq(n, y, q)[n]


def eval_p_seq(n: int, x, y, rho, q) -> list:
    """All Al-Salam-Chihara values p_0 .. p_n at (x | y, rho, q)."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    seq = [1]
    prev, cur = 0, 1
    power_prev, power = None, 1  # q^{i-1}, q^i
    for i in range(n):
        back = (1 - rho * rho * power_prev) * q_bracket(i, q) if i >= 1 else 0
        prev, cur = cur, _check_finite((x - rho * y * power) * cur - back * prev, "p", i + 1)
        power_prev, power = power, power * q
        seq.append(cur)
    return seq


def eval_p(n: int, x, y, rho, q):
    """p_n(x|y,rho,q) by forward recurrence; p_1 = x - rho y."""
    return eval_p_seq(n, x, y, rho, q)[n]


def eval_p_expansion(n: int, x, y, rho, q):
    """p_n(x|y,rho,q) through its connection-coefficient expansion

        sum_{k=0}^{n} qbinom(n,k) rho^{n-k} B_{n-k}(y|q) H_k(x|q),

    an evaluation route independent of the three-term recurrence; the two
    must agree identically on exact scalars.
    """
    if n < 0:
        raise ValueError("degree must be >= 0")
    B_seq = eval_B_seq(n, y, q)
    H_seq = eval_H_seq(n, x, q)
    total = 0
    rho_pow = 1
    for j in range(n + 1):  # j = n - k counts the rho/B exponent
        k = n - j
        total = total + q_binomial(n, k, q) * rho_pow * B_seq[j] * H_seq[k]
        rho_pow = rho_pow * rho
    return _check_finite(total, "p-expansion", n)


@dataclass(frozen=True)
class QParams:
    """Bundle (q, m, rho, sqrt_q) for a transition order m.

    rho = q^{-(m-1)/2} is the one-step correlation; all half-integer
    powers of q are taken through the stored sqrt_q, so exact mode
    requires q to be the square of a rational.
    """

    q: object
    m: int
    rho: object
    sqrt_q: object

    @classmethod
    def create(cls, q, m: int, sqrt_q=None) -> "QParams":
        if m < 2:
            raise ValueError("transition order m must be >= 2")
        if isinstance(q, int):
            q = Fraction(q)
        if sqrt_q is None:
            try:
                sqrt_q = scalar_sqrt(q)
            except NotAPerfectSquare as exc:
                raise NotAPerfectSquare(
                    f"exact mode needs q to be a perfect rational square, got {q}"
                ) from exc
        params = cls(q=q, m=m, rho=sqrt_q ** (-(m - 1)), sqrt_q=sqrt_q)
        params.validate()
        return params

    def validate(self) -> None:
        if isinstance(self.q, float):
            if abs(self.sqrt_q * self.sqrt_q - self.q) > 1e-12 * max(1.0, abs(self.q)):
                raise ValueError("sqrt_q^2 != q beyond float tolerance")
            if abs(self.rho * self.rho * self.q ** (self.m - 1) - 1.0) > 1e-9:
                raise ValueError("rho^2 q^{m-1} != 1 beyond float tolerance")
        else:
            if self.sqrt_q * self.sqrt_q != self.q:
                raise ValueError(f"sqrt_q^2 = {self.sqrt_q * self.sqrt_q} differs from q = {self.q}")
            if self.rho * self.rho * self.q ** (self.m - 1) != 1:
                raise ValueError("rho^2 q^{m-1} != 1")
