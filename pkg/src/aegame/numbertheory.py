"""Constructive number theory behind the bias selections.

Everything here is exact big-integer / rational arithmetic; each
construction returns a certificate whose ``verify()`` re-checks the
claimed divisibility and window inequalities by independent division.

* ``signed_remainder``: the unique representative in (-s/2, s/2].
* ``check_remainder_transfer``: the shifted-modulus bound used to analyse
  the structured candidate set (premise violations are reported
  separately from conclusion failures so it can serve as a test oracle).
* ``find_large_remainder_bias``: given N ~ q^alpha, find k in (q, C*q]
  with N mod k > q.  The structured candidate set {b, b-x, ..., b-tx}
  is tried first; an ascending scan is the fallback and the oracle.
* ``construct_odd_divisor`` / ``construct_aligned_divisor``: odd q
  dividing binom(n,2)-1 (respectively binom(n,2)-t with small t) with
  q of prescribed polynomial size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Optional


class BiasSearchError(ValueError):
    """No certificate exists in the searched range; message carries proof."""


def iroot(n: int, k: int) -> int:
    """Floor of the k-th root of a non-negative integer."""
    if n < 0 or k < 1:
        raise ValueError("iroot needs n >= 0, k >= 1")
    if n < 2 or k == 1:
        return n
    x = 1 << (-(-n.bit_length() // k))  # upper seed
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    return x


def floor_scaled_power(scale: Fraction, base: int, exponent: Fraction) -> int:
    """floor(scale * base**exponent), exactly, for base >= 0."""
    p, q = exponent.numerator, exponent.denominator
    a, b = scale.numerator, scale.denominator
    if p < 0:
        raise ValueError("negative exponents not supported")
    x = a**q * base**p
    y = b**q
    return iroot(x * y ** (q - 1), q) // y


def cmp_scaled_power(value: int, scale: Fraction, base: int, exponent: Fraction) -> int:
    """Sign of (value - scale * base**exponent); exact for positive inputs."""
    p, q = exponent.numerator, exponent.denominator
    a, b = scale.numerator, scale.denominator
    lhs = value**q * b**q
    rhs = a**q * base**p
    return (lhs > rhs) - (lhs < rhs)


# ---------------------------------------------------------------------------
# Signed remainders
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SignedRemainder:
    modulus: int
    value: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be >= 1")


def signed_remainder(s: int, m: int) -> SignedRemainder:
    """The unique j with -s/2 < j <= s/2 and m = j (mod s)."""
    if s < 1:
        raise ValueError("modulus must be >= 1")
    j = m % s
    if 2 * j > s:
        j -= s
    return SignedRemainder(s, j)


@dataclass(frozen=True)
class RemainderTransferCheck:
    s: int
    j: int
    y: int
    m: int
    premises_ok: bool
    failed_premise: Optional[str]
    conclusion_ok: bool

    @property
    def holds(self) -> bool:
        """Vacuously true when a premise fails."""
        return (not self.premises_ok) or self.conclusion_ok


def check_remainder_transfer(s: int, j: int, y: int, m: int) -> RemainderTransferCheck:
    """If |r_{s-j}(m)| <= y with j <= s/2, y < s/4, j < ys/(4m),
    then |r_s(m)| <= 2y.  Premise violations are flagged, not conflated
    with a failing conclusion."""
    if min(s, j, y, m) < 1:
        raise ValueError("all arguments must be natural numbers")
    failed = None
    if not 2 * j <= s:
        failed = "j <= s/2"
    elif not 4 * y < s:
        failed = "y < s/4"
    elif not 4 * j * m < y * s:
        failed = "j < ys/(4m)"
    elif not abs(signed_remainder(s - j, m).value) <= y:
        failed = "|r_{s-j}(m)| <= y"
    conclusion = abs(signed_remainder(s, m).value) <= 2 * y
    return RemainderTransferCheck(s, j, y, m, failed is None, failed, conclusion)


# ---------------------------------------------------------------------------
# Large-remainder bias search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RemainderCertificate:
    N: int
    q: int
    k: int
    remainder: int
    C: int
    alpha: Fraction
    path: str  # "structured" or "scan"
    trace: dict = field(default_factory=dict)

    def verify(self) -> bool:
        return (
            self.q < self.k <= self.C * self.q
            and self.N % self.k == self.remainder
            and self.remainder > self.q
        )

    def to_text(self) -> str:
        lines = [
            "aecert remainder",
            f"N {self.N}",
            f"q {self.q}",
            f"k {self.k}",
            f"remainder {self.remainder}",
            f"C {self.C}",
            f"alpha {self.alpha}",
            f"path {self.path}",
        ]
        for key, val in sorted(self.trace.items()):
            lines.append(f"trace {key} {val}")
        lines.append("end")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class BigremPreset:
    alpha: Fraction
    c1: Fraction
    c2: Fraction
    C: int  # smallest integer passing the randomized property suite


BIGREM_PRESETS = {
    "3/2": BigremPreset(Fraction(3, 2), Fraction(1), Fraction(1, 4), 4),
    "2": BigremPreset(Fraction(2), Fraction(1), Fraction(1, 4), 3),
    "3": BigremPreset(Fraction(3), Fraction(1), Fraction(1, 4), 3),
}


def _alpha_split(alpha: Fraction) -> tuple[int, Fraction]:
    """alpha = t + beta with integer t >= 1 and 0 < beta <= 1."""
    t = int(alpha) if alpha != int(alpha) else int(alpha) - 1
    beta = alpha - t
    if t < 1 or not (0 < beta <= 1):
        raise ValueError("alpha must be > 1")
    return t, beta


def structured_candidates(N: int, q: int, alpha: Fraction, C: int) -> dict:
    """The candidate set {b, b-x, ..., b-tx} plus its digit expansion."""
    t, beta = _alpha_split(alpha)
    b = C * q
    if beta == 1:
        x = floor_scaled_power(Fraction(1), C, Fraction(1) + Fraction(1, 2 * t))
    else:
        # floor(C^{1 + beta/2t} * b^{(1-beta)/t}) via one common root
        exp_c = Fraction(1) + beta / (2 * t)
        exp_b = (1 - beta) / t
        d = exp_c.denominator * exp_b.denominator
        inner = C ** (exp_c.numerator * exp_b.denominator) * b ** (
            exp_b.numerator * exp_c.denominator
        )
        x = iroot(inner, d)
    x = max(x, 1)
    cands = [b - i * x for i in range(t + 1)]
    # greatest lexicographic digit expansion of N in the mixed radix
    digits = []
    prods = [1]
    for i in range(1, t + 1):
        p = b
        for j in range(1, i):
            p *= b - j * x
        prods.append(p)
    rem = N
    for i in range(t, -1, -1):
        digits.append(rem // prods[i])
        rem %= prods[i]
    return {"b": b, "x": x, "t": t, "beta": beta, "candidates": cands, "digits": digits[::-1]}


def find_large_remainder_bias(
    N: int,
    q: int,
    alpha: Fraction,
    c1: Fraction,
    c2: Fraction,
    C: int,
) -> RemainderCertificate:
    """Find k in (q, Cq] whose division into N leaves remainder > q.

    The structured candidate set is tried first; if no candidate lands in
    range and verifies, an ascending scan of (q, Cq] decides.  A scan
    failure raises with the best remainder seen as proof of absence.
    """
    alpha = Fraction(alpha)
    c1, c2 = Fraction(c1), Fraction(c2)
    if not (alpha > 1 and 0 < c2 < c1):
        raise ValueError("need alpha > 1 and 0 < c2 < c1")
    if cmp_scaled_power(N, c2, q, alpha) < 0 or cmp_scaled_power(N, c1, q, alpha) > 0:
        raise ValueError("N outside [c2*q^alpha, c1*q^alpha]")

    info = structured_candidates(N, q, alpha, C)
    for k in info["candidates"]:
        if q < k <= C * q and N % k > q:
            return RemainderCertificate(
                N, q, k, N % k, C, alpha, "structured",
                {"b": info["b"], "x": info["x"], "t": info["t"],
                 "digits": tuple(info["digits"])},
            )
    best = -1
    for k in range(q + 1, C * q + 1):
        r = N % k
        if r > q:
            return RemainderCertificate(N, q, k, r, C, alpha, "scan", {})
        best = max(best, r)
    raise BiasSearchError(
        f"no k in ({q}, {C * q}] has N mod k > {q}; max remainder seen {best}"
    )


# ---------------------------------------------------------------------------
# Odd divisors of binom(n,2) - 1 and binom(n,2) - t
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OddDivisorCertificate:
    alpha: Fraction
    C: int
    k: int
    n: int
    q: int
    r1: int
    r2: int

    def verify(self) -> bool:
        N = comb(self.n, 2) - 1
        window_low = cmp_scaled_power(
            self.q, Fraction(1, 4 * self.C**self.r1), self.n, self.alpha
        )
        window_high = cmp_scaled_power(
            self.q, Fraction(2, self.C**self.r1), self.n, self.alpha
        )
        return (
            self.q % 2 == 1
            and N % self.q == 0
            and window_low >= 0
            and window_high <= 0
        )

    def achieved_ratio(self) -> float:
        """q / n^alpha; the window constant is existential, so report it."""
        return self.q / float(self.n) ** float(self.alpha)

    def to_text(self) -> str:
        return (
            "aecert odd-divisor\n"
            f"alpha {self.alpha}\nC {self.C}\nk {self.k}\n"
            f"n {self.n}\nq {self.q}\n"
            f"divides binom({self.n},2)-1 = {comb(self.n, 2) - 1}\n"
            f"quotient {(comb(self.n, 2) - 1) // self.q}\n"
            f"ratio {self.achieved_ratio():.6g}\nend\n"
        )


def construct_odd_divisor(alpha, C: int, k: int) -> OddDivisorCertificate:
    """Odd q | binom(n,2)-1 with q of order n^alpha, for alpha in (0,2].

    One certificate per odd k; distinct k give distinct n, so the family
    is infinite.
    """
    alpha = Fraction(alpha)
    if not (0 < alpha <= 2):
        raise ValueError("alpha must lie in (0, 2]")
    if k < 1 or k % 2 == 0:
        raise ValueError("k must be odd and positive")
    if C < 1:
        raise ValueError("C must be a positive integer")
    frac = alpha if alpha <= 1 else alpha - 1
    r1, r2 = frac.numerator, frac.denominator
    n = 2 * (C * k) ** r2 + 2
    q = k**r1 if alpha <= 1 else (n + 1) * k**r1
    cert = OddDivisorCertificate(alpha, C, k, n, q, r1, r2)
    assert cert.verify(), "constructed divisor failed verification"
    return cert


@dataclass(frozen=True)
class AlignedDivisorCertificate:
    n: int
    alpha: Fraction
    c: Fraction
    x: int
    k: int
    t: int
    q: int

    def verify(self) -> bool:
        N = comb(self.n, 2) - self.t
        two_alpha_minus_two = 2 * self.alpha - 2
        return (
            self.q % 2 == 1
            and N % self.q == 0
            and 1 <= self.t
            and cmp_scaled_power(self.t, self.c * self.c, self.n, two_alpha_minus_two) <= 0
            and cmp_scaled_power(self.q, self.c / 3, self.n, self.alpha) >= 0
            and cmp_scaled_power(self.q, self.c, self.n, self.alpha) <= 0
        )

    def to_text(self) -> str:
        return (
            "aecert aligned-divisor\n"
            f"n {self.n}\nalpha {self.alpha}\nc {self.c}\n"
            f"x {self.x}\nk {self.k}\nt {self.t}\nq {self.q}\n"
            f"divides binom({self.n},2)-t = {comb(self.n, 2) - self.t}\n"
            f"quotient {(comb(self.n, 2) - self.t) // self.q}\nend\n"
        )


def aligned_divisor_min_n(alpha, c=Fraction(1)) -> int:
    """Smallest n we certify for; below it the q-window can fail.

    Derived from needing n^(alpha-1) >= 12/c so the odd-adjusted floor of
    c*n^(alpha-1)/2 stays above c*n^(alpha-1)/3.
    """
    alpha, c = Fraction(alpha), Fraction(c)
    exp = alpha - 1
    en, ed = exp.numerator, exp.denominator

    def ok(n: int) -> bool:
        # n^(alpha-1) >= 12/c  <=>  n^en * c_num^ed >= 12^ed * c_den^ed
        return n**en * c.numerator**ed >= 12**ed * c.denominator**ed

    hi = 2
    while not ok(hi):
        hi *= 2
    lo = 1
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def construct_aligned_divisor(n: int, alpha, c=Fraction(1)) -> AlignedDivisorCertificate:
    """Odd q with q | binom(n,2) - t, t small, q of order c*n^alpha.

    alpha must lie in (1,2).  Raises with the failing inequality when n is
    below the supported window.
    """
    alpha, c = Fraction(alpha), Fraction(c)
    if not (1 < alpha < 2):
        raise ValueError("alpha must lie in (1, 2)")
    x = floor_scaled_power(c / 2, n, alpha - 1)
    if x % 2 == 0:
        x -= 1
    if x < 1:
        raise BiasSearchError(
            f"n={n} too small: floor(c*n^(alpha-1)/2) leaves no odd x >= 1"
        )
    k = ((n - 2) % (2 * x)) + 1
    t = k * (k + 1) // 2
    q = (n + k) * x
    cert = AlignedDivisorCertificate(n, alpha, c, x, k, t, q)
    if q % 2 == 0:
        raise BiasSearchError("internal: q came out even")
    if (comb(n, 2) - t) % q != 0:
        raise BiasSearchError("internal: divisibility failed")
    if cmp_scaled_power(q, c / 3, n, alpha) < 0:
        raise BiasSearchError(
            f"n={n} too small: q={q} fell below (c/3)*n^alpha"
        )
    if cmp_scaled_power(q, c, n, alpha) > 0:
        raise BiasSearchError(f"n={n}: q={q} exceeds c*n^alpha")
    if cmp_scaled_power(t, c * c, n, 2 * alpha - 2) > 0:
        raise BiasSearchError(f"n={n}: t={t} exceeds c^2*n^(2alpha-2)")
    return cert
