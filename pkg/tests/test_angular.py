import itertools
from fractions import Fraction

import pytest

from eitsim.angular import (AngMom, BranchingRatio, branching_ratio, clebsch_gordan, decay_channels,
                            relative_dipole, wigner3j, wigner6j)
from eitsim.errors import DomainError

sympy_wigner = pytest.importorskip("sympy.physics.wigner")
from sympy import Rational, nsimplify  # noqa: E402


def _r(x):
    return Rational(int(round(2 * x)), 2)


HALF_INTEGERS = [0, 0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4, 5]


@pytest.mark.parametrize("j1,j2", [(1, 1), (1.5, 1), (3, 1), (3.5, 1.5), (2, 2), (4, 1)])
def test_3j_matches_sympy(j1, j2):
    for j3 in [x for x in HALF_INTEGERS if abs(j1 - j2) <= x <= j1 + j2 and (j1 + j2 + x) % 1 == 0]:
        for m1 in (x / 2 for x in AngMom.of(j1).projections()):
            for m2 in (x / 2 for x in AngMom.of(j2).projections()):
                m3 = -m1 - m2
                if abs(m3) > j3:
                    continue
                ref = float(sympy_wigner.wigner_3j(_r(j1), _r(j2), _r(j3), _r(m1), _r(m2), _r(m3)))
                assert wigner3j(j1, j2, j3, m1, m2, m3) == pytest.approx(ref, abs=1e-14)


@pytest.mark.parametrize("args", [
    (0.5, 1.5, 1, 2, 3, 3.5), (0.5, 1.5, 1, 5, 4, 3.5), (1.5, 3, 3.5, 3, 0.5, 1),
    (1.5, 4, 3.5, 4, 0.5, 1), (1, 1, 1, 1, 1, 1), (2, 2, 2, 2, 2, 2), (1.5, 2, 3.5, 3, 0.5, 1),
])
def test_6j_matches_sympy(args):
    ref = float(sympy_wigner.wigner_6j(*map(_r, args)))
    assert wigner6j(*args) == pytest.approx(ref, abs=1e-14)


def test_3j_selection_rules_give_zero():
    assert wigner3j(1, 1, 1, 0, 0, 0) == 0.0
    assert wigner3j(1, 1, 3, 0, 0, 0) == 0.0  # triangle violated
    assert wigner3j(1, 1, 1, 1, 1, 0) == 0.0  # m's do not sum to zero


def test_invalid_projection_raises():
    with pytest.raises(DomainError):
        wigner3j(1, 1, 1, 0.5, -1, 0.5)
    assert wigner3j(1, 1, 1, 2, -1, -1) == 0.0  # |m| > j is a selection rule, not an error
    with pytest.raises(DomainError):
        AngMom.of(0.3)


def test_clebsch_gordan_matches_sympy():
    for F, Fp in itertools.product((3, 4), (2, 3, 4, 5)):
        if abs(F - Fp) > 1:
            continue
        for n in range(-F, F + 1):
            for q in (-1, 0, 1):
                k = n + q
                if abs(k) > Fp:
                    continue
                ref = float(sympy_wigner.clebsch_gordan(F, 1, Fp, n, q, k))
                assert clebsch_gordan(F, n, q, Fp, k) == pytest.approx(ref, abs=1e-14)


def _dipole_sympy(F, n, Fp, k, J=Rational(1, 2), Jp=Rational(3, 2), I=Rational(7, 2)):
    q = k - n
    three = sympy_wigner.wigner_3j(Fp, 1, F, -k, q, n)
    six = sympy_wigner.wigner_6j(Jp, Fp, I, F, J, 1)
    from sympy import sqrt
    red = (-1) ** (Jp + I + F + 1) * sqrt((2 * Fp + 1) * (2 * F + 1)) * six
    return float((-1) ** (Fp - k) * three * red)


def test_relative_dipole_matches_independent_expression():
    for F, Fp in itertools.product((3, 4), (2, 3, 4, 5)):
        for n in range(-F, F + 1):
            for k in (n - 1, n, n + 1):
                if abs(k) > Fp:
                    continue
                assert relative_dipole(F, n, Fp, k) == pytest.approx(_dipole_sympy(F, n, Fp, k), abs=1e-14)


def test_six_level_dipoles():
    # [DERIVED] independent sympy evaluation, frozen
    assert relative_dipole(3, 1, 2, 2) == pytest.approx(0.10910894511799618, abs=1e-12)
    assert relative_dipole(3, 3, 2, 2) == pytest.approx(0.4225771273642583, abs=1e-12)
    assert relative_dipole(3, 3, 3, 2) == pytest.approx(-0.21650635094610965, abs=1e-12)
    assert relative_dipole(3, 3, 4, 4) == pytest.approx(0.32274861218395140, abs=1e-12)
    assert relative_dipole(4, 4, 5, 5) == pytest.approx(0.5, abs=1e-14)


def test_dipole_sum_rule():
    # each excited sublevel: sum over ground and q of |d|^2 = 1/(2J'+1) in these units
    for Fp in (2, 3, 4, 5):
        for k in range(-Fp, Fp + 1):
            tot = sum(relative_dipole(F, n, Fp, k) ** 2 for F in (3, 4) for n in range(-F, F + 1))
            assert tot == pytest.approx(0.25, abs=1e-13)


def test_branching_ratios_exact():
    assert branching_ratio(4, 4, 3, 3).exact == Fraction(25, 60)
    assert branching_ratio(4, 4, 4, 3).exact == Fraction(7, 60)
    assert branching_ratio(4, 4, 4, 4).exact == Fraction(28, 60)


def test_branching_sums_are_one():
    for Fp in (2, 3, 4, 5):
        for k in range(-Fp, Fp + 1):
            ch = decay_channels(Fp, k)
            assert sum(r.exact for r in ch.values()) == 1
            assert all(isinstance(r, BranchingRatio) for r in ch.values())


def test_branching_of_cycling_transition():
    ch = decay_channels(5, 5)
    assert list(ch) == [(4, 4)]
    assert float(ch[(4, 4)]) == 1.0


def test_branching_ratio_is_a_probability():
    with pytest.raises(DomainError):
        BranchingRatio(Fraction(3, 2))
    with pytest.raises(DomainError):
        branching_ratio(2, 3, 3, 3)
