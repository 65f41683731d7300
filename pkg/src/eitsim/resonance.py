"""Positions of the Autler-Townes absorption resonances and of the EIT dip.

The dressed two-photon denominator D_sg(delta_p) controls both: its real
part vanishes at the absorption resonances, while the EIT dip of the
resting atoms sits at the light-shifted two-photon resonance.  Analytic
estimates treat every off-resonant control coupling as a pure Stark shift;
``find_pole`` solves Re D_sg = 0 numerically instead.

Doppler shifts follow the co-propagating picture: an atom with shift
``delta_d`` sees both fields detuned by ``delta_d`` more.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import ConvergenceError, DomainError, EITError, NumericalError
from .susceptibility import LevelScheme, chi, detunings, six_level_coherences

__all__ = [
    "ResonanceEstimate",
    "atr_shift_three_level",
    "atr_shift_six_level",
    "eit_shift_terms",
    "eit_shift_six_level",
    "find_pole",
    "find_eit_minimum",
    "peak_scan",
]

# "much larger than" is read as at least this factor in the validity warnings
VALIDITY_FACTOR = 3.0


@dataclass(frozen=True)
class ResonanceEstimate:
    """One absorption resonance.

    ``position`` is the probe detuning in rad/s.  ``height`` is Im chi at
    that detuning divided by the resonant peak of the same model with the
    control switched off, so 1 means "as strong as a bare two-level line".
    Failed scan points carry ``error`` and NaN position/height.
    """

    position: float
    height: float
    doppler_shift: float
    model: str
    method: str
    estimate: float = math.nan
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def atr_shift_three_level(omega_c, delta_d, *, gamma=None):
    """Stark-shift estimate |Omega_c|^2 / (4 delta_d) of the near-zero resonance."""
    delta_d = float(delta_d)
    if delta_d == 0:
        raise DomainError("the estimate is singular at zero Doppler shift")
    a2 = abs(omega_c) ** 2
    limit = max(abs(omega_c), gamma or 0.0)
    if abs(delta_d) < VALIDITY_FACTOR * limit:
        warnings.warn("Doppler shift is not large against the control Rabi frequency or gamma",
                      RuntimeWarning, stacklevel=2)
    return a2 / (4 * delta_d)


def atr_shift_six_level(scheme: LevelScheme, delta_d, *, warn=True):
    """Four-term Stark-shift estimate including the extra excited levels."""
    s = scheme
    delta_d = float(delta_d)
    dens = [delta_d - w for w in s.omega_ep]
    den_e = delta_d - s.omega_ee2 - s.omega_sg
    terms = []
    for om, den in zip(s.rabi_c, dens):
        if om == 0:
            continue
        if den == 0:
            raise DomainError("Doppler shift hits an excited level exactly")
        terms.append(abs(om) ** 2 / (4 * den))
    if s.rabi_eg != 0:
        if den_e == 0:
            raise DomainError("Doppler shift hits the |g>-|e> resonance exactly")
        terms.append(-abs(s.rabi_eg) ** 2 / (4 * den_e))
    if not terms:
        raise DomainError("scheme has no control coupling")
    if warn:
        for om, den in zip(s.rabi_c, dens):
            if om != 0 and abs(den) < VALIDITY_FACTOR * max(abs(om), s.gamma):
                warnings.warn("off-resonant control coupling may be saturated; "
                              "the Stark-shift estimate is unreliable", RuntimeWarning, stacklevel=2)
                break
    return math.fsum(terms)


def eit_shift_terms(scheme: LevelScheme):
    """Light shifts of the EIT dip from |e_3>, |e_4> and |e> (zero Doppler shift)."""
    s = scheme
    out = []
    for om, w in zip(s.rabi_c[1:], s.omega_ep[1:]):
        out.append(0.0 if om == 0 else -abs(om) ** 2 / (4 * w))
    E = s.rabi_eg
    out.append(0.0 if E == 0 else abs(E) ** 2 / (4 * (s.omega_ee2 + s.omega_sg)))
    return tuple(out)


def eit_shift_six_level(scheme: LevelScheme):
    s = scheme
    for om, w in zip(s.rabi_c[1:], s.omega_ep[1:]):
        if om != 0 and abs(om) >= w:
            warnings.warn("control Rabi frequency is not small against the hyperfine splitting",
                          RuntimeWarning, stacklevel=2)
    return math.fsum(eit_shift_terms(scheme))


def _re_sg(scheme, delta_d, include_n):
    def f(x):
        d = detunings(scheme.with_detunings(delta_p=x).doppler_shifted(delta_d))
        return float(np.real(d.sg if include_n else d.sg_lambda))
    return f


def _reference_peak(scheme, model, n0):
    bare = replace(scheme, rabi_c=(0.0, 0.0, 0.0), rabi_eg=0.0, delta_p=scheme.omega_ep[0])
    return float(chi(bare, model, n0=n0).imag)


def _sign_changes(f, lo, hi, samples):
    xs = np.linspace(lo, hi, samples)
    ys = np.array([f(x) for x in xs])
    return xs, np.nonzero(np.signbit(ys[:-1]) != np.signbit(ys[1:]))[0]


def find_pole(scheme: LevelScheme, delta_d, model="six", bracket=None, *,
              include_n=True, tol=None, samples=401, maxiter=200, n0=1.1e10):
    """Root of Re D_sg in the probe detuning, nearest to the analytic estimate.

    The default bracket is 4 Omega_c wide and centred on the Stark-shift
    estimate.  The bracket is sampled first; of all sign changes the one
    closest to the estimate is refined with Brent's method.  If the default
    bracket holds no root, a window of +-10 max(Omega_c, gamma) around the
    control detuning is searched and the root with the strongest absorption
    is kept (``method == "numeric-wide"``).
    """
    s = scheme.for_model(model)
    delta_d = float(delta_d)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        if model == "three":
            est = atr_shift_three_level(s.rabi_c[0], delta_d) if delta_d else 0.0
        else:
            est = atr_shift_six_level(s, delta_d, warn=False) if delta_d else eit_shift_six_level(s)
    est += float(np.real(s.delta_c))
    wide = bracket is None
    if bracket is None:
        half = 2 * abs(s.rabi_c[0])
        bracket = (est - half, est + half)
    lo, hi = map(float, bracket)
    if not hi > lo:
        raise DomainError("bracket must be an increasing pair")
    tol = 1e-6 * s.gamma if tol is None else tol
    f = _re_sg(s, delta_d, include_n)
    method = "numeric"
    xs, idx = _sign_changes(f, lo, hi, samples)
    if idx.size == 0 and wide:
        # the Stark estimate fails near an excited-level crossing; search a wide
        # window around the control detuning and keep the strongest resonance
        c0, half = float(np.real(s.delta_c)), 10 * max(abs(s.rabi_c[0]), s.gamma)
        xs, idx = _sign_changes(f, c0 - half, c0 + half, 4 * samples)
        method = "numeric-wide"
    if idx.size == 0:
        raise NumericalError("Re D_sg has no sign change inside the bracket")
    if method == "numeric":
        best = min(idx, key=lambda i: abs(0.5 * (xs[i] + xs[i + 1]) - est))
    else:
        def strength(i):
            t = s.with_detunings(delta_p=0.5 * (xs[i] + xs[i + 1])).doppler_shifted(delta_d)
            return float(chi(t, model, n0=n0).imag)
        best = max(idx, key=strength)
    try:
        root, info = brentq(f, xs[best], xs[best + 1], xtol=tol, maxiter=maxiter, full_output=True)
    except RuntimeError as exc:
        raise ConvergenceError(str(exc)) from exc
    if not info.converged:
        raise ConvergenceError("root refinement did not converge")
    at_root = s.with_detunings(delta_p=root).doppler_shifted(delta_d)
    height = float(chi(at_root, model, n0=n0).imag) / _reference_peak(s, model, n0)
    return ResonanceEstimate(float(root), height, delta_d, model, method, estimate=est)


def find_eit_minimum(scheme: LevelScheme, model="six", *, quantity="chi", window=None,
                     delta_d=0.0, tol=None):
    """Probe detuning of the local absorption minimum near the light-shifted resonance.

    ``quantity`` is ``"chi"`` for Im chi or ``"sigma"`` for Im sigma_{e2 g}.
    The default window is +-Omega_c/4 around the analytic estimate.
    """
    s = scheme.for_model(model)
    est = float(np.real(s.delta_c)) + (eit_shift_six_level(s) if model == "six" else 0.0)
    half = abs(s.rabi_c[0]) / 4 if window is None else window
    tol = 1e-7 * s.gamma if tol is None else tol

    def f(x):
        t = s.with_detunings(delta_p=x).doppler_shifted(delta_d)
        if quantity == "chi":
            return float(chi(t, model).imag)
        if quantity == "sigma":
            return float(np.imag(six_level_coherences(t).eg[0]))
        raise DomainError(f"unknown quantity {quantity!r}")

    xs = np.linspace(est - half, est + half, 201)
    ys = np.array([f(x) for x in xs])
    i = int(np.argmin(ys))
    if i in (0, len(xs) - 1):
        raise NumericalError("absorption minimum lies on the window edge")
    r = minimize_scalar(f, bounds=(xs[i - 1], xs[i + 1]), method="bounded", options={"xatol": tol})
    return float(r.x)


def peak_scan(scheme: LevelScheme, delta_ds, model="six", **kwargs):
    """``find_pole`` for every Doppler shift; failures are recorded, not raised."""
    out = []
    for dd in delta_ds:
        try:
            if dd == 0:
                raise DomainError("Doppler shift must be nonzero")
            out.append(find_pole(scheme, dd, model, **kwargs))
        except EITError as exc:
            out.append(ResonanceEstimate(math.nan, math.nan, float(dd), model, "numeric", error=str(exc)))
    return out
