"""Angular-momentum algebra on doubled quantum numbers.

Every j and m is stored as the integer 2j (or 2m) so half-integer values
are exact.  3j and 6j symbols are evaluated with the Racah sum formula in
exact rational arithmetic and converted to float only at the end.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, isqrt

from .errors import DomainError

__all__ = [
    "AngMom",
    "BranchingRatio",
    "wigner3j",
    "wigner6j",
    "clebsch_gordan",
    "relative_dipole",
    "branching_ratio",
    "decay_channels",
]


@dataclass(frozen=True, order=True)
class AngMom:
    """Angular momentum quantum number stored as ``twice_j``."""

    twice_j: int

    def __post_init__(self):
        if not isinstance(self.twice_j, int) or isinstance(self.twice_j, bool):
            raise DomainError(f"twice_j must be an int, got {self.twice_j!r}")
        if self.twice_j < 0:
            raise DomainError(f"twice_j must be non-negative, got {self.twice_j}")

    @classmethod
    def of(cls, value) -> "AngMom":
        """Build from an int, a float such as 3.5, a Fraction, or an AngMom."""
        if isinstance(value, AngMom):
            return value
        return cls(_double(value))

    @property
    def j(self) -> float:
        return self.twice_j / 2

    @property
    def multiplicity(self) -> int:
        return self.twice_j + 1

    def projections(self):
        """Doubled projections -2j, -2j+2, ..., 2j."""
        return range(-self.twice_j, self.twice_j + 1, 2)

    def __str__(self):
        if self.twice_j % 2:
            return f"{self.twice_j}/2"
        return str(self.twice_j // 2)


@dataclass(frozen=True)
class BranchingRatio:
    """Probability of spontaneous decay into one ground sublevel."""

    exact: Fraction

    def __post_init__(self):
        if not 0 <= self.exact <= 1:
            raise DomainError(f"branching ratio outside [0, 1]: {self.exact}")

    @property
    def value(self) -> float:
        return float(self.exact)

    def __float__(self):
        return self.value


def _double(x) -> int:
    """Return 2x as an int, refusing values that are not half-integers."""
    if isinstance(x, AngMom):
        return x.twice_j
    d = Fraction(x) * 2
    if d.denominator != 1:
        raise DomainError(f"{x!r} is not an integer or half-integer")
    return int(d)


def _dj(x) -> int:
    d = _double(x)
    if d < 0:
        raise DomainError(f"angular momentum must be non-negative, got {x!r}")
    return d


def _triangle_ok(a: int, b: int, c: int) -> bool:
    # doubled values: |a-b| <= c <= a+b and a+b+c even
    return abs(a - b) <= c <= a + b and (a + b + c) % 2 == 0


@lru_cache(maxsize=None)
def _fact(n: int) -> int:
    return factorial(n)


def _delta_sq(a: int, b: int, c: int) -> Fraction:
    """Square of the triangle coefficient Δ(abc) for doubled arguments."""
    return Fraction(
        _fact((a + b - c) // 2) * _fact((a - b + c) // 2) * _fact((-a + b + c) // 2),
        _fact((a + b + c) // 2 + 1),
    )


def _signed_sqrt(q: Fraction) -> float:
    """sign(q)*sqrt(|q|) with the square root taken as late as possible."""
    if q == 0:
        return 0.0
    sign = -1.0 if q < 0 else 1.0
    q = abs(q)
    num, den = q.numerator, q.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return sign * rn / rd
    return sign * (num / den) ** 0.5


@lru_cache(maxsize=65536)
def _threej_sq_signed(j1, j2, j3, m1, m2, m3) -> Fraction:
    """Signed square of the 3j symbol (exact): sign(3j) * 3j**2."""
    if m1 + m2 + m3 != 0:
        return Fraction(0)
    for j, m in ((j1, m1), (j2, m2), (j3, m3)):
        if abs(m) > j or (j - m) % 2:
            return Fraction(0)
    if not _triangle_ok(j1, j2, j3):
        return Fraction(0)
    # Racah formula; all quantities below are plain integers
    a = (j1 + j2 - j3) // 2
    b = (j1 - m1) // 2
    c = (j2 + m2) // 2
    d = (j3 - j2 + m1) // 2
    e = (j3 - j1 - m2) // 2
    kmin = max(0, -d, -e)
    kmax = min(a, b, c)
    total = Fraction(0)
    for k in range(kmin, kmax + 1):
        den = (
            _fact(k) * _fact(a - k) * _fact(b - k) * _fact(c - k)
            * _fact(d + k) * _fact(e + k)
        )
        total += Fraction((-1) ** k, den)
    pref = (
        _delta_sq(j1, j2, j3)
        * _fact((j1 + m1) // 2) * _fact((j1 - m1) // 2)
        * _fact((j2 + m2) // 2) * _fact((j2 - m2) // 2)
        * _fact((j3 + m3) // 2) * _fact((j3 - m3) // 2)
    )
    phase = -1 if ((j1 - j2 - m3) // 2) % 2 else 1
    sq = pref * total * total
    return sq if phase * total >= 0 else -sq


def _check_m(j: int, m: int):
    if (j - m) % 2:
        raise DomainError(f"projection 2m={m} inconsistent with 2j={j}")


def wigner3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3j symbol (j1 j2 j3; m1 m2 m3).

    Arguments are ordinary (possibly half-integer) values or ``AngMom``.
    Returns 0 for violated selection rules.
    """
    J = [_dj(j1), _dj(j2), _dj(j3)]
    M = [_double(m1), _double(m2), _double(m3)]
    for j, m in zip(J, M):
        _check_m(j, m)
    return _signed_sqrt(_threej_sq_signed(*J, *M))


@lru_cache(maxsize=65536)
def _sixj_sq_signed(a, b, c, d, e, f) -> Fraction:
    for t in ((a, b, c), (a, e, f), (d, b, f), (d, e, c)):
        if not _triangle_ok(*t):
            return Fraction(0)
    t1 = (a + b + c) // 2
    t2 = (a + e + f) // 2
    t3 = (d + b + f) // 2
    t4 = (d + e + c) // 2
    p1 = (a + b + d + e) // 2
    p2 = (a + c + d + f) // 2
    p3 = (b + c + e + f) // 2
    total = Fraction(0)
    for k in range(max(t1, t2, t3, t4), min(p1, p2, p3) + 1):
        den = (
            _fact(k - t1) * _fact(k - t2) * _fact(k - t3) * _fact(k - t4)
            * _fact(p1 - k) * _fact(p2 - k) * _fact(p3 - k)
        )
        total += Fraction((-1) ** k * _fact(k + 1), den)
    pref = _delta_sq(a, b, c) * _delta_sq(a, e, f) * _delta_sq(d, b, f) * _delta_sq(d, e, c)
    sq = pref * total * total
    return sq if total >= 0 else -sq


def wigner6j(j1, j2, j3, j4, j5, j6) -> float:
    """Wigner 6j symbol {j1 j2 j3; j4 j5 j6}."""
    return _signed_sqrt(_sixj_sq_signed(*(_dj(j) for j in (j1, j2, j3, j4, j5, j6))))


def _cg_signed_sq(F2, n2, Fp2, k2, q2) -> Fraction:
    # <F n; 1 q | F' k> = (-1)^(F-1+k) sqrt(2F'+1) (F 1 F'; n q -k)
    if n2 + q2 != k2:
        return Fraction(0)
    s = _threej_sq_signed(F2, 2, Fp2, n2, q2, -k2)
    if s == 0:
        return s
    phase = -1 if ((F2 - 2 + k2) // 2) % 2 else 1
    return phase * (Fp2 + 1) * s


def clebsch_gordan(F, n, q, Fp, k) -> float:
    """Condon-Shortley Clebsch-Gordan coefficient <F n; 1 q | F' k>."""
    F2, n2, Fp2, k2 = _dj(F), _double(n), _dj(Fp), _double(k)
    q2 = _double(q)
    if q2 not in (-2, 0, 2):
        raise DomainError(f"q must be -1, 0 or +1, got {q!r}")
    _check_m(F2, n2)
    _check_m(Fp2, k2)
    return _signed_sqrt(_cg_signed_sq(F2, n2, Fp2, k2, q2))


def _reduced_hf_signed_sq(F2, Fp2, J2, Jp2, I2) -> Fraction:
    """Signed square of <F'||d||F> / <J'||d||J> (Edmonds convention)."""
    s6 = _sixj_sq_signed(Jp2, Fp2, I2, F2, J2, 2)
    if s6 == 0:
        return s6
    phase = -1 if ((Jp2 + I2 + F2 + 2) // 2) % 2 else 1
    return phase * (Fp2 + 1) * (F2 + 1) * s6


def relative_dipole(F, n, Fp, k, *, J=0.5, Jp=1.5, I=3.5) -> float:
    """Signed dipole matrix element <F' k| d_q |F n> in units of <J'||d||J>.

    The spherical component is q = k - n.  Wigner-Eckart theorem with the
    Condon-Shortley phase:

        <F' k|d_q|F n> = (-1)^(F'-k) (F' 1 F; -k q n) <F'||d||F>,
        <F'||d||F> = (-1)^(J'+I+F+1) sqrt((2F'+1)(2F+1)) {J' F' I; F J 1} <J'||d||J>.

    With this convention the probe dipoles from |F=3, m=3> to the
    |F', m=2> levels alternate in sign between F'=2 and F'=3.
    """
    F2, n2, Fp2, k2 = _dj(F), _double(n), _dj(Fp), _double(k)
    J2, Jp2, I2 = _dj(J), _dj(Jp), _dj(I)
    _check_m(F2, n2)
    _check_m(Fp2, k2)
    q2 = k2 - n2
    if q2 not in (-2, 0, 2):
        return 0.0
    red = _reduced_hf_signed_sq(F2, Fp2, J2, Jp2, I2)
    if red == 0:
        return 0.0
    s3 = _threej_sq_signed(Fp2, 2, F2, -k2, q2, n2)
    if s3 == 0:
        return 0.0
    phase = -1 if ((Fp2 - k2) // 2) % 2 else 1
    return _signed_sqrt(phase * s3 * red)


@lru_cache(maxsize=4096)
def _branching_exact(Fp2, k2, F2, n2, J2, Jp2, I2) -> Fraction:
    if abs(k2 - n2) > 2:
        return Fraction(0)
    # (2J'+1)(2F+1) [C^{F' k}_{F n 1 k-n}]^2 {J' F' I; F J 1}^2
    cg = _cg_signed_sq(F2, n2, Fp2, k2, k2 - n2)
    six = _sixj_sq_signed(Jp2, Fp2, I2, F2, J2, 2)
    return (Jp2 + 1) * (F2 + 1) * abs(cg) * abs(six)


def branching_ratio(Fp, k, F, n, *, J=0.5, Jp=1.5, I=3.5) -> BranchingRatio:
    """Probability that |F', k> decays spontaneously into |F, n>."""
    F2, n2, Fp2, k2 = _dj(F), _double(n), _dj(Fp), _double(k)
    J2, Jp2, I2 = _dj(J), _dj(Jp), _dj(I)
    _check_m(F2, n2)
    _check_m(Fp2, k2)
    if abs(n2) > F2 or abs(k2) > Fp2:
        raise DomainError("projection exceeds its angular momentum")
    return BranchingRatio(_branching_exact(Fp2, k2, F2, n2, J2, Jp2, I2))


def decay_channels(Fp, k, *, J=0.5, Jp=1.5, I=3.5):
    """All nonzero decay channels {(F, n): BranchingRatio} of |F', k>.

    Ground levels are F = I - J ... I + J.
    """
    I2, J2 = _dj(I), _dj(J)
    out = {}
    for F2 in range(abs(I2 - J2), I2 + J2 + 1, 2):
        for dn in (-2, 0, 2):
            n2 = _double(k) + dn
            if abs(n2) > F2:
                continue
            p = branching_ratio(Fp, k, Fraction(F2, 2), Fraction(n2, 2), J=J, Jp=Jp, I=I)
            if p.exact:
                out[(Fraction(F2, 2), Fraction(n2, 2))] = p
    return out
