import math
import warnings

import numpy as np
import pytest

from eitsim.atomdata import CS133, cs_six_level_scheme, mhz, to_mhz
from eitsim.errors import DomainError, NumericalError
from eitsim.resonance import (atr_shift_six_level, atr_shift_three_level, eit_shift_six_level, eit_shift_terms,
                              find_eit_minimum, find_pole, peak_scan)
from eitsim.susceptibility import detunings

G = CS133.gamma
SCHEME = cs_six_level_scheme(mhz(12))


def test_three_level_estimate():
    assert atr_shift_three_level(mhz(12), mhz(100)) == pytest.approx(mhz(12) ** 2 / (4 * mhz(100)))
    with pytest.raises(DomainError):
        atr_shift_three_level(mhz(12), 0.0)
    with pytest.warns(RuntimeWarning):
        atr_shift_three_level(mhz(12), mhz(20))


def test_three_level_estimate_sign_follows_doppler_shift():
    for dd in np.linspace(-500, 500, 200):
        if dd == 0:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert np.sign(atr_shift_three_level(mhz(12), mhz(dd))) == np.sign(dd)


def test_six_level_estimate_reduces_to_three_level():
    s = SCHEME.three_level()
    assert atr_shift_six_level(s, mhz(80), warn=False) == pytest.approx(atr_shift_three_level(mhz(12), mhz(80)))


def test_six_level_estimate_crosses_eit_point():
    eit = eit_shift_six_level(SCHEME)
    xs = np.linspace(1, 149, 300)
    diff = [atr_shift_six_level(SCHEME, mhz(x), warn=False) - eit for x in xs]
    assert np.any(np.diff(np.sign(diff)) != 0)


def test_six_level_estimate_rejects_exact_resonance():
    with pytest.raises(DomainError):
        atr_shift_six_level(SCHEME, SCHEME.omega_ep[1])


def test_eit_shift_terms():
    t = eit_shift_terms(SCHEME)
    assert len(t) == 3
    assert t[0] < 0 and t[1] < 0 and t[2] > 0
    assert sum(t) == pytest.approx(eit_shift_six_level(SCHEME))
    # [DERIVED] frozen from the closed form
    assert to_mhz(sum(t)) == pytest.approx(-1.14908658188, abs=1e-9)


@pytest.mark.parametrize("model", ["three", "six"])
@pytest.mark.parametrize("dd", [-100, -50, 50])
def test_pole_is_root_of_real_part(model, dd):
    r = find_pole(SCHEME, mhz(dd), model)
    s = SCHEME.for_model(model).with_detunings(delta_p=r.position).doppler_shifted(mhz(dd))
    assert abs(np.real(detunings(s).sg)) < 1e-3 * G
    assert r.ok and r.method == "numeric" and r.height > 0


def test_pole_near_excited_level_uses_wide_search():
    r = find_pole(SCHEME, mhz(150))
    assert r.method == "numeric-wide"
    assert abs(to_mhz(r.position)) < 30


def test_pole_bad_bracket():
    with pytest.raises(DomainError):
        find_pole(SCHEME, mhz(50), bracket=(1.0, 0.0))
    with pytest.raises(NumericalError):
        find_pole(SCHEME, mhz(50), bracket=(mhz(200), mhz(210)))


def test_peak_scan_records_failures():
    out = peak_scan(SCHEME, [mhz(-50), 0.0, mhz(50)])
    assert [r.ok for r in out] == [True, False, True]
    assert math.isnan(out[1].position)


def test_eit_minimum_three_level_is_at_two_photon_resonance():
    x = find_eit_minimum(SCHEME, "three")
    assert abs(x) < 1e-4 * G


def test_eit_minimum_quantities():
    # the two readouts of the dip differ because of the |e_3>, |e_4> lines
    a = to_mhz(find_eit_minimum(SCHEME, "six", quantity="chi"))
    b = to_mhz(find_eit_minimum(SCHEME, "six", quantity="sigma"))
    assert -1.5 < a < -1.0 and -1.5 < b < -1.0
    with pytest.raises(DomainError):
        find_eit_minimum(SCHEME, quantity="other")
