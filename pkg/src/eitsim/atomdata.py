"""Alkali D-line constants and the Cs D2 six-level scheme builder.

Internal frequencies are angular (rad/s).  Anything named ``*_mhz`` is a
cyclic frequency in MHz, i.e. omega / 2pi / 1e6.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import pi, sqrt

import numpy as np
from scipy import constants as sc

from .angular import AngMom, relative_dipole
from .errors import DomainError

__all__ = [
    "TWO_PI_MHZ",
    "mhz",
    "to_mhz",
    "Species",
    "CS133",
    "RB87",
    "RB85",
    "SPECIES",
    "doppler_width",
    "cs_six_level_scheme",
    "CS_D2_REDUCED_DIPOLE",
]

TWO_PI_MHZ = 2e6 * pi


def mhz(value):
    """Cyclic MHz -> rad/s."""
    return np.asarray(value, dtype=float) * TWO_PI_MHZ if np.ndim(value) else float(value) * TWO_PI_MHZ


def to_mhz(omega):
    """rad/s -> cyclic MHz."""
    return np.asarray(omega) / TWO_PI_MHZ if np.ndim(omega) else omega / TWO_PI_MHZ


# e*a0 in Gaussian units (statC cm)
E_A0_ESU_CM = sc.physical_constants["atomic unit of electric dipole mom."][0] / 3.33564095198152e-12

# Reference D2 value is 4.4786 e a0 in the convention <J||er||J'> that keeps
# a sqrt(2J+1) outside; in the Edmonds convention used by relative_dipole the
# same transition strength is sqrt(2) times larger.
CS_D2_REDUCED_DIPOLE = 4.4786 * sqrt(2.0) * E_A0_ESU_CM


@dataclass(frozen=True)
class Species:
    name: str
    nuclear_spin: AngMom
    mass: float  # kg
    d1_wavelength: float  # m
    d2_wavelength: float  # m
    gamma: float  # rad/s, D2 natural linewidth
    hyperfine_splittings_d2: tuple  # rad/s between consecutive F' (ascending F')
    excited_f_d2: tuple  # F' values the splittings refer to
    ground_splitting: float  # rad/s
    excited_splitting_d1: float = float("nan")  # rad/s
    reduced_dipole_d2: float = float("nan")  # statC cm, Edmonds convention

    def __post_init__(self):
        if self.gamma <= 0:
            raise DomainError("gamma must be positive")
        s = self.hyperfine_splittings_d2
        if any(x <= 0 for x in s) or list(s) != sorted(s):
            raise DomainError("hyperfine splittings must be positive and ascending")
        if self.ground_splitting <= 0:
            raise DomainError("ground splitting must be positive")

    @property
    def I(self) -> float:
        return self.nuclear_spin.j

    def excited_offsets_d2(self):
        """Cumulative energy of each F' above the lowest one, rad/s."""
        out = {self.excited_f_d2[0]: 0.0}
        acc = 0.0
        for f, step in zip(self.excited_f_d2[1:], self.hyperfine_splittings_d2):
            acc += step
            out[f] = acc
        return out


CS133 = Species(
    name="Cs133",
    nuclear_spin=AngMom.of(Fraction(7, 2)),
    mass=132.905451931 * sc.atomic_mass,
    d1_wavelength=894.59295986e-9,
    d2_wavelength=852.34727582e-9,
    gamma=mhz(5.2),
    hyperfine_splittings_d2=(mhz(151.0), mhz(201.0), mhz(251.0)),
    excited_f_d2=(2, 3, 4, 5),
    ground_splitting=mhz(9192.631770),
    excited_splitting_d1=mhz(1168.0),
    reduced_dipole_d2=CS_D2_REDUCED_DIPOLE,
)

RB87 = Species(
    name="Rb87",
    nuclear_spin=AngMom.of(Fraction(3, 2)),
    mass=86.909180527 * sc.atomic_mass,
    d1_wavelength=794.978851156e-9,
    d2_wavelength=780.241209686e-9,
    gamma=mhz(6.0666),
    hyperfine_splittings_d2=(mhz(72.0), mhz(157.0), mhz(267.0)),
    excited_f_d2=(0, 1, 2, 3),
    ground_splitting=mhz(6834.682611),
    excited_splitting_d1=mhz(817.0),
)

RB85 = Species(
    name="Rb85",
    nuclear_spin=AngMom.of(Fraction(5, 2)),
    mass=84.911789738 * sc.atomic_mass,
    d1_wavelength=794.979014933e-9,
    d2_wavelength=780.241368271e-9,
    gamma=mhz(6.0666),
    hyperfine_splittings_d2=(mhz(29.0), mhz(63.0), mhz(120.0)),
    excited_f_d2=(1, 2, 3, 4),
    ground_splitting=mhz(3035.732439),
    excited_splitting_d1=mhz(362.0),
)

SPECIES = {s.name.lower(): s for s in (CS133, RB87, RB85)}


def doppler_width(species: Species, T: float, line: str = "D2") -> float:
    """Gaussian sigma of the Doppler-shift distribution, rad/s.

    Gamma_D = k * sqrt(kB T / m) with k = 2pi / lambda.
    """
    if not T > 0:
        raise DomainError(f"temperature must be positive, got {T}")
    lam = {"D1": species.d1_wavelength, "D2": species.d2_wavelength}.get(line.upper())
    if lam is None:
        raise DomainError(f"unknown line {line!r}")
    return 2 * pi * sqrt(sc.k * T / species.mass) / lam


# Quantum numbers of the six-level model (F, m) on the Cs D2 line.
G_STATE = (3, 3)
S_STATE = (3, 1)
E_LEVELS = {2: (2, 2), 3: (3, 2), 4: (4, 2)}
E_STATE = (4, 4)


@dataclass(frozen=True)
class SixLevelWeights:
    """Signed relative dipoles of the six-level model."""

    probe: tuple  # |g> -> |e_F'>, F'=2,3,4
    control: tuple  # |s> -> |e_F'>, F'=2,3,4
    control_eg: float  # |g> -> |e>

    @property
    def control_ratios(self):
        ref = self.control[0]
        return tuple(c / ref for c in self.control)

    @property
    def control_eg_ratio(self):
        return self.control_eg / self.control[0]


def cs_d2_weights() -> SixLevelWeights:
    I = 3.5
    probe = tuple(relative_dipole(*G_STATE, *E_LEVELS[f], I=I) for f in (2, 3, 4))
    control = tuple(relative_dipole(*S_STATE, *E_LEVELS[f], I=I) for f in (2, 3, 4))
    eg = relative_dipole(*G_STATE, *E_STATE, I=I)
    return SixLevelWeights(probe, control, eg)


def cs_six_level_scheme(omega_c: float, delta_c: float = 0.0, **kwargs):
    """Six-level Cs D2 scheme with all control/probe Rabi frequencies set.

    ``omega_c`` is the control Rabi frequency on |s> <-> |e2> (rad/s); the
    other control couplings, including |g> <-> |e>, follow from the
    relative dipole weights.  Remaining keyword arguments are forwarded to
    ``LevelScheme``.
    """
    from .susceptibility import LevelScheme

    w = cs_d2_weights()
    off = CS133.excited_offsets_d2()
    # e_F' energies relative to e2, and |e> = |F'=4, m=4> sits with F'=4
    omega_ep = tuple(off[f] - off[2] for f in (2, 3, 4))
    omega_ee2 = off[4] - off[2]
    ratios = w.control_ratios
    kwargs.setdefault("gamma", CS133.gamma)
    kwargs.setdefault("probe_weights", w.probe)
    return LevelScheme(
        delta_c=delta_c,
        omega_ep=omega_ep,
        omega_ee2=omega_ee2,
        omega_sg=0.0,
        rabi_c=tuple(omega_c * r for r in ratios),
        rabi_eg=omega_c * w.control_eg_ratio,
        **kwargs,
    )
