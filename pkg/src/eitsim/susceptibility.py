"""First-order probe coherences and the complex susceptibility.

The six-level model couples the probe from |g> to three excited levels
|e_F'> (F'=2,3,4), the control from |s> to the same three levels and,
off-resonantly, from |g> to a fourth excited level |e>.  Switching off all
couplings except the |e_2> ones gives the textbook three-level Lambda system.

All frequencies are angular (rad/s).  ``delta_p`` and ``delta_c`` may be
numpy arrays; every quantity below broadcasts elementwise, which is how the
Doppler average evaluates many velocity classes in one call.

Sign conventions
----------------
Rabi frequencies are ``Omega = 2 d E / hbar`` with the interaction written
as ``-(hbar Omega / 2)|upper><lower| + h.c.``.  The complex denominators
carry the relaxation rate with a positive imaginary part, e.g.
``D_eg = delta_p - omega_F + i gamma/2``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from .errors import DomainError

__all__ = [
    "LevelScheme",
    "ComplexDetunings",
    "CouplingCoefficients",
    "Coherences",
    "Susceptibility",
    "zero_order_state",
    "with_zero_order",
    "detunings",
    "coupling_coefficients",
    "three_level_coherence",
    "six_level_coherences",
    "chi",
]

Model = Literal["three", "six"]

N_EXCITED = 3  # F' = 2, 3, 4


@dataclass(frozen=True)
class LevelScheme:
    """Parameters of the six-level (or three-level) model.

    ``omega_ep`` are the energies of |e_F'> above |e_2> and ``omega_ee2`` that
    of |e> above |e_2>; ``omega_sg`` is E_s - E_g.  ``rabi_c`` holds the control
    Rabi frequencies on |s> -> |e_F'>, ``rabi_eg`` the control on |g> -> |e>.
    ``probe_weights`` are the signed relative dipoles of |g> -> |e_F'> and
    ``probe_rabi`` the probe Rabi frequency on the |g> -> |e_2> transition.
    """

    gamma: float
    delta_p: float | np.ndarray = 0.0
    delta_c: float | np.ndarray = 0.0
    omega_ep: tuple = (0.0, 0.0, 0.0)
    omega_ee2: float = 0.0
    omega_sg: float = 0.0
    rabi_c: tuple = (0.0, 0.0, 0.0)
    rabi_eg: complex = 0.0
    probe_weights: tuple = (1.0, 0.0, 0.0)
    probe_rabi: float | None = None
    gamma_sg: float | None = None
    gamma_eg: float | None = None
    gamma_fe: float | None = None
    gamma_se: float | None = None
    tau_d: float = 300e-6
    rho_gg: float | np.ndarray = 1.0
    rho_ss: float | np.ndarray = 0.0
    sigma_ge: complex | np.ndarray = 0.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise DomainError("gamma must be positive")
        for name in ("omega_ep", "rabi_c", "probe_weights"):
            v = tuple(getattr(self, name))
            if len(v) != N_EXCITED:
                raise DomainError(f"{name} needs {N_EXCITED} entries, got {len(v)}")
            object.__setattr__(self, name, v)
        if self.probe_rabi is None:
            object.__setattr__(self, "probe_rabi", 0.01 * self.gamma)
        if self.gamma_sg is None:
            object.__setattr__(self, "gamma_sg", 1.0 / self.tau_d)
        if self.gamma_eg is None:
            object.__setattr__(self, "gamma_eg", self.gamma / 2)
        if self.gamma_fe is None:
            object.__setattr__(self, "gamma_fe", self.gamma)
        if self.gamma_se is None:
            object.__setattr__(self, "gamma_se", self.gamma / 2)
        if self.gamma_sg < 0 or self.gamma_eg < 0 or self.gamma_fe < 0 or self.gamma_se < 0:
            raise DomainError("relaxation rates must be non-negative")
        if self.tau_d <= 0:
            raise DomainError("tau_d must be positive")
        if self.probe_weights[0] == 0:
            raise DomainError("the |g> -> |e_2> probe weight must be nonzero")
        for name in ("rho_gg", "rho_ss"):
            v = np.asarray(getattr(self, name))
            if np.any(v < -1e-15) or np.any(v > 1 + 1e-15):
                raise DomainError(f"{name} must lie in [0, 1]")

    @property
    def probe_rabis(self):
        """Probe Rabi frequencies on |g> -> |e_F'>."""
        w0 = self.probe_weights[0]
        return tuple(self.probe_rabi * w / w0 for w in self.probe_weights)

    def three_level(self) -> "LevelScheme":
        """Restriction to |g>, |s>, |e_2>."""
        return replace(
            self,
            rabi_c=(self.rabi_c[0], 0.0, 0.0),
            rabi_eg=0.0,
            probe_weights=(self.probe_weights[0], 0.0, 0.0),
        )

    def doppler_shifted(self, delta_d) -> "LevelScheme":
        """Both co-propagating fields see the same Doppler shift."""
        return replace(self, delta_p=self.delta_p + delta_d, delta_c=self.delta_c + delta_d)

    def with_detunings(self, delta_p=None, delta_c=None) -> "LevelScheme":
        return replace(
            self,
            delta_p=self.delta_p if delta_p is None else delta_p,
            delta_c=self.delta_c if delta_c is None else delta_c,
        )

    def for_model(self, model: Model) -> "LevelScheme":
        if model == "six":
            return self
        if model == "three":
            return self.three_level()
        raise DomainError(f"model must be 'three' or 'six', got {model!r}")


@dataclass(frozen=True)
class ComplexDetunings:
    """Dressed complex denominators, all in rad/s.

    ``eg``, ``fe`` and ``fe_bare`` are tuples over F' = 2, 3, 4.  ``sg``
    includes ``n`` (the V/N-type correction); ``sg_lambda`` omits it.
    """

    eg: tuple
    fe_bare: tuple
    fe: tuple
    se_bare: object
    se: object
    sg_bare: object
    sg_lambda: object
    n: object

    @property
    def sg(self):
        return self.sg_lambda - self.n


@dataclass(frozen=True)
class CouplingCoefficients:
    """Coefficients of the V- and N-type terms; tuples over F'.

    ``G`` is dimensionless, ``H``, ``T``, ``D`` carry the probe amplitude
    (half Rabi frequency) and are dimensionless as well.  ``N`` is the
    coefficient of the third line of the six-level optical coherence, in
    the same units as the probe Rabi frequency.
    """

    G: tuple
    H: tuple
    T: tuple
    D: tuple
    N: tuple


@dataclass(frozen=True)
class Coherences:
    """First-order coherences sigma_{e_F' g} (F'=2,3,4) and sigma_{sg}."""

    eg: tuple
    sg: object
    two_level: tuple = field(default=(None,) * N_EXCITED, repr=False)
    interference: tuple = field(default=(None,) * N_EXCITED, repr=False)
    n_term: tuple = field(default=(None,) * N_EXCITED, repr=False)

    def as_tuple(self):
        return (*self.eg, self.sg)


@dataclass(frozen=True)
class Susceptibility:
    """Complex susceptibility (Gaussian units) with its three components.

    ``lines`` holds the two-level sum, the Lambda-interference term and the
    V/N-type remainder; they add up to ``value``.  ``normalized`` divides out
    the scale n0 |d|^2 / hbar and multiplies by gamma, so it does not depend
    on the density or on the absolute dipole moment.
    """

    value: object
    lines: tuple
    scale: float
    gamma: float
    convention: str = "angular"

    @property
    def normalized(self):
        return self.value * (self.gamma / self.scale)

    @property
    def real(self):
        return np.real(self.value)

    @property
    def imag(self):
        return np.imag(self.value)


# ---------------------------------------------------------------- zero order

def zero_order_state(scheme: LevelScheme, mode: str = "full"):
    """Stationary zero-order values (rho_ss, rho_gg, sigma_ge).

    ``mode="simplified"`` returns (0, 1, 0): all atoms in |g>.  The full mode
    balances transit loss against control-field pumping from |s> to |g>;
    each excited level enters with its own detuning Delta_c - omega_F.
    """
    if mode == "simplified":
        return 0.0, 1.0, 0.0
    if mode != "full":
        raise DomainError(f"unknown zero-order mode {mode!r}")
    g = scheme.gamma
    if g == 0:
        raise DomainError("gamma must be nonzero")
    dc = np.asarray(scheme.delta_c, dtype=float)
    splits = [w for w in scheme.omega_ep[1:] if w > 0]
    big = max(np.max(np.abs(scheme.rabi_c)), abs(scheme.rabi_eg))
    if splits and big >= min(splits):
        warnings.warn("control Rabi frequency is not small against the excited hyperfine splitting",
                      RuntimeWarning, stacklevel=2)
    rate = 0.0
    for om, wF in zip(scheme.rabi_c, scheme.omega_ep):
        a2 = abs(om) ** 2
        rate = rate + a2 * (g / 2) / (4 * (dc - wF) ** 2 + g**2 + a2)
    pump = scheme.tau_d * rate
    rho_ss = 0.5 / (1 + pump)
    rho_gg = 0.5 + pump * rho_ss
    d = dc - scheme.omega_ee2 - scheme.omega_sg
    e2 = abs(scheme.rabi_eg) ** 2
    sigma_ge = -2 * (d + 0.5j * g) * np.conj(scheme.rabi_eg) * rho_gg / (4 * d**2 + g**2 + e2)
    return rho_ss, rho_gg, sigma_ge


def with_zero_order(scheme: LevelScheme, mode: str = "full") -> LevelScheme:
    ss, gg, ge = zero_order_state(scheme, mode)
    return replace(scheme, rho_ss=ss, rho_gg=gg, sigma_ge=ge)


# ---------------------------------------------------------------- denominators

def detunings(scheme: LevelScheme) -> ComplexDetunings:
    """Evaluate the dressed denominators in dependency order eg -> fe -> se -> sg."""
    s = scheme
    dp, dc = s.delta_p, s.delta_c
    E2 = abs(s.rabi_eg) ** 2
    om2 = [abs(o) ** 2 for o in s.rabi_c]

    eg = tuple(dp - w + 1j * s.gamma_eg for w in s.omega_ep)
    # omega_{e_F' e} = omega_F - omega_ee2
    fe_bare = tuple(dp - dc - (w - s.omega_ee2) + s.omega_sg + 1j * s.gamma_fe for w in s.omega_ep)
    fe = tuple(f0 - E2 / (4 * d) for f0, d in zip(fe_bare, eg))
    se_bare = dp - 2 * dc + s.omega_ee2 + s.omega_sg + 1j * s.gamma_se
    se = se_bare - sum(o / (4 * f) for o, f in zip(om2, fe))
    sg_bare = dp - dc + 1j * s.gamma_sg
    sg_lambda = sg_bare - sum(o / (4 * d) for o, d in zip(om2, eg)) - E2 / (4 * se)

    # V/N-type correction, exact elimination of sigma_se and sigma_{e_F' e}
    S = 1 + sum(o / (4 * d * f) for o, d, f in zip(om2, eg, fe))
    n = sum(
        E2 * np.conj(om) / (8 * f * d) * (om / (2 * d) + om * S / (2 * se) + om / (2 * se))
        for om, d, f in zip(s.rabi_c, eg, fe)
    )
    return ComplexDetunings(eg, fe_bare, fe, se_bare, se, sg_bare, sg_lambda, n)


def coupling_coefficients(scheme: LevelScheme, dets: ComplexDetunings | None = None) -> CouplingCoefficients:
    s = scheme
    d = dets or detunings(s)
    G, H, T, D = _coefficients(s, d)
    coh = _six_level(s, d, G, H, T, D, include_n=True)
    rho = np.asarray(s.rho_gg)
    with np.errstate(divide="ignore", invalid="ignore"):
        N = tuple(-nt / rho for nt in coh.n_term)
    return CouplingCoefficients(G, H, T, D, N)


# ---------------------------------------------------------------- coherences

def three_level_coherence(scheme: LevelScheme):
    """Optical coherence sigma_{e2 g} of the three-level Lambda system.

    Written as -2 rho_gg Omega_p D_sg / (4 D_eg D_sg - |Omega_c|^2), which is
    algebraically the familiar -(rho/2D_eg)(1 + |Omega_c|^2/4 D_sg D_eg)Omega_p
    but vanishes exactly at the dark-state point.
    """
    s = scheme
    if any(s.rabi_c[1:]) or s.rabi_eg or any(s.probe_weights[1:]):
        raise DomainError("three_level_coherence needs a scheme with only |e_2> couplings")
    d_eg = s.delta_p - s.omega_ep[0] + 1j * s.gamma_eg
    d_sg = s.delta_p - s.delta_c + 1j * s.gamma_sg
    om2 = abs(s.rabi_c[0]) ** 2
    return -2 * s.rho_gg * s.probe_rabi * d_sg / (4 * d_eg * d_sg - om2)


def _six_level(s, d, G, H, T, D, include_n):
    a = s.rho_gg
    b = s.sigma_ge
    E = s.rabi_eg
    E2 = abs(E) ** 2
    om = s.rabi_c
    P = s.probe_rabis
    p = tuple(x / 2 for x in P)

    # Lambda part of sigma_sg, shared by the simplified and the full forms
    lam = sum(np.conj(o) * PF / (4 * a_) for o, PF, a_ in zip(om, P, d.eg))

    if not include_n:
        y = a * lam / d.sg_lambda
        eg = tuple(-(a * PF + y * o) / (2 * a_) for o, PF, a_ in zip(om, P, d.eg))
        return Coherences(eg, y)

    sg = d.sg
    y = (
        a * sum(np.conj(o) / (2 * sg) * (PF / (2 * a_) + E2 * T_ / (4 * f * a_))
                for o, PF, T_, f, a_ in zip(om, P, T, d.fe, d.eg))
        + b * sum(E * np.conj(o) / (4 * f * sg) * (H_ + pF / d.se)
                  for o, pF, H_, f in zip(om, p, H, d.fe))
    )
    eg = tuple(
        -a * (PF / (2 * a_) + E2 / (4 * f * a_) * D_)
        - y * (o / (2 * a_) + E2 / (4 * f * a_) * G_)
        - b * (E / (2 * f)) * H_
        for o, PF, a_, f, G_, H_, D_ in zip(om, P, d.eg, d.fe, G, H, D)
    )
    # decomposition used by chi(): two-level part, Lambda interference
    # (with the full sg), and the remaining V/N-type term
    two = tuple(-a * PF / (2 * a_) for PF, a_ in zip(P, d.eg))
    y_lam = a * lam / sg
    inter = tuple(-y_lam * o / (2 * a_) for o, a_ in zip(om, d.eg))
    n_term = tuple(x - t - i for x, t, i in zip(eg, two, inter))
    return Coherences(eg, y, two, inter, n_term)


def six_level_coherences(scheme: LevelScheme, include_n: bool = True) -> Coherences:
    """First-order coherences of the six-level model.

    With ``include_n`` (default) the V- and N-type processes through |e> are
    kept exactly.  Without it only the Lambda-type terms survive: the
    two-level response plus the interference through all three |e_F'>.
    """
    d = detunings(scheme)
    if not include_n:
        return _six_level(scheme, d, None, None, None, None, include_n=False)
    G, H, T, D = _coefficients(scheme, d)
    return _six_level(scheme, d, G, H, T, D, include_n=True)


def _coefficients(s, d):
    om = s.rabi_c
    p = tuple(P / 2 for P in s.probe_rabis)
    om2 = [abs(o) ** 2 for o in om]
    S = 1 + sum(o / (4 * a * f) for o, a, f in zip(om2, d.eg, d.fe))
    sum_h = sum(np.conj(o) * pF / (4 * f) for o, pF, f in zip(om, p, d.fe))
    sum_t = sum(np.conj(o) * pF / (f * a) for o, pF, f, a in zip(om, p, d.fe, d.eg))
    G = tuple(o / (2 * a) + o * S / (2 * d.se) for o, a in zip(om, d.eg))
    H = tuple(pF / a + o * sum_h / (a * d.se) for o, pF, a in zip(om, p, d.eg))
    T = tuple(pF / a + pF / d.se + o * sum_t / (4 * d.se) for o, pF, a in zip(om, p, d.eg))
    D = tuple(pF / a + o * sum_t / (4 * d.se) for o, pF, a in zip(om, p, d.eg))
    return G, H, T, D


# ---------------------------------------------------------------- chi

def chi(scheme: LevelScheme, model: Model = "six", *, n0: float = 1.1e10,
        dipole: float | None = None, include_n: bool = True) -> Susceptibility:
    """Complex susceptibility chi = n0 sum_F' d_{g e_F'} sigma_{e_F' g} / E_p.

    ``n0`` is in cm^-3 and ``dipole`` is the reduced D2 dipole moment in
    statC cm (Edmonds convention; defaults to the Cs value).
    """
    from .atomdata import CS_D2_REDUCED_DIPOLE

    if n0 < 0:
        raise DomainError("n0 must be non-negative")
    dip = CS_D2_REDUCED_DIPOLE if dipole is None else dipole
    s = scheme.for_model(model)
    coh = six_level_coherences(s, include_n=include_n)
    from scipy.constants import hbar

    hbar_cgs = hbar * 1e7
    scale = n0 * dip**2 / hbar_cgs
    w = s.probe_weights
    # E_p = hbar Omega_p / (2 d_red w_2), so chi = scale * 2 w_2 / Omega_p * sum w_F sigma_F
    k = scale * 2 * w[0] / s.probe_rabi

    def assemble(parts):
        return k * sum(wF * x for wF, x in zip(w, parts))

    value = assemble(coh.eg)
    if include_n:
        lines = (assemble(coh.two_level), assemble(coh.interference), assemble(coh.n_term))
    else:
        two = tuple(-s.rho_gg * PF / (2 * a_) for PF, a_ in zip(s.probe_rabis, detunings(s).eg))
        lines = (assemble(two), value - assemble(two), 0 * value)
    return Susceptibility(value=value, lines=lines, scale=scale, gamma=s.gamma)
