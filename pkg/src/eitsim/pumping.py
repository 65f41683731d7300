"""Zeeman-resolved optical pumping on the Cs D2 line, one velocity class at a time.

Fields
------
* control, sigma+, F=3 -> F', detuning ``delta_c`` from F=3 -> F'=2,
  co-propagating with the probe (Doppler shift +Delta_D);
* repump, sigma+, F=4 -> F', detuning ``delta_repump`` from F=4 -> F'=4,
  counter-propagating by default (Doppler shift -Delta_D);
* optional hole-burning pump, modelled as an effective rate that moves
  atoms out of |F=3, m=3> (see ``add_hole_burning``).

Rabi frequencies follow the Omega = 2 d E / hbar convention.  The control
value refers to |3,1> -> |2',2> and the repump value to the cycling
transition |4,4> -> |5',5>; all other couplings scale with the signed
relative dipoles.

Model
-----
Ground and excited blocks keep the populations and the coherences between
levels of equal m (pure sigma+ light never creates others).  Optical
coherences obey a closed equation with a diagonal generator, so they are
eliminated exactly (Schur complement) and the remaining real system over
the Hermitian block parameters is solved directly.  Relaxation: ground
elements decay at 1/tau_d, excited elements at gamma + 1/tau_d, optical
coherences at gamma/2.  Fresh unpolarized atoms enter at rate 1/tau_d, so
the steady total population equals f0(Delta_D).  Spontaneous emission
feeds ground populations with the branching ratios.

Frame
-----
F=3 sits at zero, excited levels rotate with the control and F=4 with the
control-repump difference, so the ground hyperfine coherence oscillates at
the Raman detuning.  ``ground_frame="bare"`` replaces that by the full
ground splitting omega_43 instead.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .angular import branching_ratio, relative_dipole
from .atomdata import CS133, doppler_width, mhz, to_mhz
from .csvio import write_csv
from .doppler import VelocityDistribution, _gauss
from .errors import DomainError, NumericalError

__all__ = [
    "ZeemanBasis",
    "PumpConfig",
    "SteadySystem",
    "DensityMatrixBlock",
    "pump_rate",
    "build_steady_system",
    "add_hole_burning",
    "steady_state",
    "modified_distribution",
    "HOLE_BURNING_WEIGHTS",
    "DEFAULT_REPUMP_RABI",
]

GROUND_F = (3, 4)
EXCITED_F = (2, 3, 4, 5)
N_GROUND = 16

# 4.4 mW over a 1 cm diameter beam is 5.6 mW/cm^2; with the cycling
# transition saturation intensity of 1.1049 mW/cm^2 this is Omega = 1.59 gamma.
# Calibration-uncertain: beam profile and polarization purity are unknown.
DEFAULT_REPUMP_RABI = 1.59 * CS133.gamma


def _hole_burning_weights():
    # decay channels of |F'=4, m=4>: back to |3,3>, or to |4,3>, |4,4>
    return (
        float(branching_ratio(4, 4, 3, 3)),
        float(branching_ratio(4, 4, 4, 3)),
        float(branching_ratio(4, 4, 4, 4)),
    )


HOLE_BURNING_WEIGHTS = _hole_burning_weights()


@dataclass(frozen=True)
class ZeemanBasis:
    """Ground (F=3,4) and excited (F'=2..5) Zeeman sublevels of Cs D2."""

    ground: tuple
    excited: tuple

    @classmethod
    def cs_d2(cls) -> "ZeemanBasis":
        ground = tuple((F, m) for F in GROUND_F for m in range(-F, F + 1))
        excited = tuple((F, m) for F in EXCITED_F for m in range(-F, F + 1))
        return cls(ground, excited)

    @property
    def levels(self):
        return self.ground + self.excited

    @property
    def dimension(self) -> int:
        return len(self.ground) + len(self.excited)

    def index(self):
        """Level positions keyed by ("g" | "e", F, m); F alone is ambiguous."""
        out = {("g",) + lv: i for i, lv in enumerate(self.ground)}
        out.update({("e",) + lv: i + len(self.ground) for i, lv in enumerate(self.excited)})
        return out

    def is_excited(self, i: int) -> bool:
        return i >= len(self.ground)


BASIS = ZeemanBasis.cs_d2()


@dataclass(frozen=True)
class PumpConfig:
    """Fields, transit time and velocity distribution of the pumping model.

    All frequencies are rad/s.  ``doppler_width`` is the width of the
    unperturbed Maxwellian f0; it defaults to Cs D2 at 300 K.
    """

    control_rabi: float = mhz(12.0)
    delta_c: float = 0.0
    repump_rabi: float = DEFAULT_REPUMP_RABI
    delta_repump: float = 0.0
    counter_propagating: bool = True
    pump_rabi: float = 0.0
    delta_pump: float = 0.0
    tau_d: float = 300e-6
    gamma: float = CS133.gamma
    doppler_width: float | None = None
    ground_frame: str = "raman"

    def __post_init__(self):
        if self.doppler_width is None:
            object.__setattr__(self, "doppler_width", doppler_width(CS133, 300.0))
        for name in ("control_rabi", "repump_rabi", "pump_rabi"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be non-negative")
        if not self.tau_d > 0 or not self.gamma > 0 or not self.doppler_width > 0:
            raise DomainError("tau_d, gamma and doppler_width must be positive")
        if self.ground_frame not in ("raman", "bare"):
            raise DomainError("ground_frame must be 'raman' or 'bare'")
        big = max(self.control_rabi, self.repump_rabi, self.pump_rabi)
        if big > 0.1 * CS133.ground_splitting:
            warnings.warn("Rabi frequency is not small against the ground hyperfine splitting",
                          RuntimeWarning, stacklevel=2)

    @property
    def repump_doppler_sign(self) -> int:
        return -1 if self.counter_propagating else 1

    def f0(self, delta_d):
        return _gauss(np.asarray(delta_d, dtype=float), self.doppler_width)

    def fields_off(self) -> "PumpConfig":
        return replace(self, control_rabi=0.0, repump_rabi=0.0, pump_rabi=0.0)


def pump_rate(config: PumpConfig, delta_d):
    """Effective depopulation rate of |3,3> by the hole-burning pump."""
    g, om = config.gamma, config.pump_rabi
    return g * om**2 / (4 * (delta_d + config.delta_pump) ** 2 + g**2 + om**2)


def _excited_offsets():
    off = CS133.excited_offsets_d2()
    return {F: off[F] - off[2] for F in EXCITED_F}


def effective_detunings(config: PumpConfig, delta_d):
    """Field detunings seen by the atom: {(F', F): detuning} for F=3 (control), F=4 (repump)."""
    off = _excited_offsets()
    out = {}
    for Fp in EXCITED_F:
        out[(Fp, 3)] = config.delta_c + delta_d - off[Fp]
        out[(Fp, 4)] = config.delta_repump + config.repump_doppler_sign * delta_d - (off[Fp] - off[4])
    return out


def optical_denominator(config: PumpConfig, Fp, F, delta_d):
    """Complex denominator i gamma/2 - Delta_{F'F} - Delta_D of the eliminated coherences.

    Written with the Doppler shift each field actually sees.
    """
    return 0.5j * config.gamma - effective_detunings(config, delta_d)[(Fp, F)]


def frame_energies(config: PumpConfig, delta_d):
    """Rotating-frame level energies (rad/s) in the basis order."""
    off = _excited_offsets()
    dets = effective_detunings(config, delta_d)
    h = np.zeros(BASIS.dimension)
    raman = -dets[(4, 3)] + dets[(4, 4)]
    for i, (F, m) in enumerate(BASIS.levels):
        if i < N_GROUND:
            h[i] = 0.0 if F == 3 else raman
        else:
            h[i] = -dets[(F, 3)]
    return h


def coupling_matrix(config: PumpConfig):
    """Interaction V (rad/s): -(Omega/2)|F' m+1><F m| + h.c. for both fields."""
    idx = BASIS.index()
    V = np.zeros((BASIS.dimension, BASIS.dimension))
    ref = {3: relative_dipole(3, 1, 2, 2), 4: relative_dipole(4, 4, 5, 5)}
    amp = {3: config.control_rabi, 4: config.repump_rabi}
    for F, n in BASIS.ground:
        for Fp in EXCITED_F:
            if abs(n + 1) > Fp or abs(Fp - F) > 1:
                continue
            d = relative_dipole(F, n, Fp, n + 1)
            if d == 0:
                continue
            om = amp[F] * d / ref[F]
            e, g = idx[("e", Fp, n + 1)], idx[("g", F, n)]
            V[e, g] = -om / 2
            V[g, e] = -om / 2
    return V


def _decay_matrix():
    """p[g, e]: branching ratio of excited level e into ground level g."""
    p = np.zeros((N_GROUND, len(BASIS.excited)))
    for j, (Fp, k) in enumerate(BASIS.excited):
        for i, (F, n) in enumerate(BASIS.ground):
            if abs(k - n) <= 1 and abs(Fp - F) <= 1:
                p[i, j] = float(branching_ratio(Fp, k, F, n))
    return p


DECAY = _decay_matrix()


def _support():
    """Block elements (equal m within ground or within excited) and optical ones."""
    lv = BASIS.levels
    block, optical = [], []
    for a, (Fa, ma) in enumerate(lv):
        for b, (Fb, mb) in enumerate(lv):
            ea, eb = BASIS.is_excited(a), BASIS.is_excited(b)
            if ea == eb and ma == mb:
                block.append((a, b))
            elif ea and not eb and ma == mb + 1:
                optical.append((a, b))
            elif eb and not ea and mb == ma + 1:
                optical.append((a, b))
    return tuple(block), tuple(optical)


BLOCK, OPTICAL = _support()


def _relaxation_rate(config, a, b):
    ea, eb = BASIS.is_excited(a), BASIS.is_excited(b)
    if ea and eb:
        return config.gamma + 1.0 / config.tau_d
    if ea or eb:
        return config.gamma / 2
    return 1.0 / config.tau_d


@dataclass(frozen=True)
class SteadySystem:
    """Real linear system A x = b over the Hermitian block parameters.

    ``complex_matrix`` and ``complex_source`` hold the eliminated complex
    generator over ``BLOCK`` (d rho/dt = M rho + s).  ``params`` lists the
    real unknowns as (kind, a, b) with kind in {"pop", "re", "im"}.
    """

    A: np.ndarray
    b: np.ndarray
    complex_matrix: np.ndarray
    complex_source: np.ndarray
    params: tuple
    delta_d: float
    f0: float
    config: PumpConfig


def full_generator(config: PumpConfig, delta_d, *, hole_burning=True):
    """Complex generator over BLOCK + OPTICAL before elimination.

    Returns (M, s, elements) with d rho/dt = M rho + s on the listed
    elements; the source is the unpolarized influx.
    """
    elements = BLOCK + OPTICAL
    pos = {el: i for i, el in enumerate(elements)}
    n = len(elements)
    M = np.zeros((n, n), dtype=complex)
    s = np.zeros(n, dtype=complex)
    h = frame_energies(config, delta_d)
    V = coupling_matrix(config)
    nz = [np.nonzero(V[i])[0] for i in range(V.shape[0])]
    omega_43 = CS133.ground_splitting
    f0 = float(config.f0(delta_d))
    for (a, b), r in pos.items():
        free = h[a] - h[b]
        if config.ground_frame == "bare" and a < N_GROUND and b < N_GROUND and a != b:
            fa, fb = BASIS.levels[a][0], BASIS.levels[b][0]
            free = (omega_43 if fa == 4 else -omega_43) if fa != fb else 0.0
        M[r, r] += -1j * free - _relaxation_rate(config, a, b)
        # -i [V, rho]_{ab} = -i sum_c V_ac rho_cb + i sum_c rho_ac V_cb
        for c in nz[a]:
            M[r, pos[(c, b)]] += -1j * V[a, c]
        for c in nz[b]:
            M[r, pos[(a, c)]] += 1j * V[c, b]
        if a == b and a < N_GROUND:
            s[r] = f0 / (N_GROUND * config.tau_d)
            for j in range(len(BASIS.excited)):
                e = N_GROUND + j
                if DECAY[a, j]:
                    M[r, pos[(e, e)]] += config.gamma * DECAY[a, j]
    if hole_burning and config.pump_rabi > 0:
        _hole_burning_terms(M, pos, config, delta_d)
    return M, s, elements


def _hole_burning_terms(M, pos, config, delta_d):
    idx = BASIS.index()
    rate = pump_rate(config, delta_d)
    p_back, p3, p4 = HOLE_BURNING_WEIGHTS
    src = idx[("g", 3, 3)]
    col = pos[(src, src)]
    M[col, col] -= rate * (1 - p_back)
    t3, t4 = idx[("g", 4, 3)], idx[("g", 4, 4)]
    M[pos[(t3, t3)], col] += rate * p3
    M[pos[(t4, t4)], col] += rate * p4


def _eliminate(M, s, n_block):
    Mbb, Mbo = M[:n_block, :n_block], M[:n_block, n_block:]
    Mob, Moo = M[n_block:, :n_block], M[n_block:, n_block:]
    diag = np.diag(Moo)
    if np.count_nonzero(Moo - np.diag(diag)):
        raise NumericalError("optical generator is not diagonal; elimination would be inexact")
    return Mbb - Mbo @ (Mob / diag[:, None]), s[:n_block]


def _hermitian_params():
    params = []
    for a, b in BLOCK:
        if a == b:
            params.append(("pop", a, b))
        elif a < b:
            params.append(("re", a, b))
            params.append(("im", a, b))
    return tuple(params)


PARAMS = _hermitian_params()


def _param_transform():
    """Complex block vector = T @ real params."""
    pos = {el: i for i, el in enumerate(BLOCK)}
    T = np.zeros((len(BLOCK), len(PARAMS)), dtype=complex)
    for k, (kind, a, b) in enumerate(PARAMS):
        if kind == "pop":
            T[pos[(a, a)], k] = 1.0
        elif kind == "re":
            T[pos[(a, b)], k] = 1.0
            T[pos[(b, a)], k] = 1.0
        else:
            T[pos[(a, b)], k] = 1j
            T[pos[(b, a)], k] = -1j
    return T


T_PARAMS = _param_transform()


def _to_real(Mc, sc):
    pos = {el: i for i, el in enumerate(BLOCK)}
    MT = Mc @ T_PARAMS
    rows, rhs = [], []
    for kind, a, b in PARAMS:
        r = pos[(a, b)]
        part = np.imag if kind == "im" else np.real
        rows.append(part(MT[r]))
        rhs.append(-part(sc[r]))
    return np.array(rows), np.array(rhs)


def build_steady_system(config: PumpConfig, delta_d, *, hole_burning=False) -> SteadySystem:
    """Eliminated steady-state system for one velocity class.

    The hole-burning pump is left out unless ``hole_burning`` is set; see
    ``add_hole_burning``.
    """
    M, s, _ = full_generator(config, delta_d, hole_burning=hole_burning)
    Mc, sc = _eliminate(M, s, len(BLOCK))
    A, b = _to_real(Mc, sc)
    return SteadySystem(A, b, Mc, sc, PARAMS, float(delta_d), float(config.f0(delta_d)), config)


def add_hole_burning(system: SteadySystem, config: PumpConfig | None = None, delta_d=None) -> SteadySystem:
    """Add the velocity-selective depopulation of |3,3> to ``system``.

    Atoms leave |3,3> at gamma_pump (1 - p_back) and arrive in |4,3> and
    |4,4> at gamma_pump p_3 and gamma_pump p_4, with the branching ratios of
    |F'=4, m=4>.
    """
    cfg = system.config if config is None else config
    dd = system.delta_d if delta_d is None else delta_d
    if cfg.pump_rabi == 0:
        return system
    pos = {el: i for i, el in enumerate(BLOCK)}
    Mc = system.complex_matrix.copy()
    _hole_burning_terms(Mc, pos, cfg, dd)
    A, b = _to_real(Mc, system.complex_source)
    return replace(system, A=A, b=b, complex_matrix=Mc)


@dataclass(frozen=True)
class DensityMatrixBlock:
    """Steady ground (16x16) and excited (32x32) density matrices of one velocity class."""

    ground: np.ndarray
    excited: np.ndarray
    delta_d: float
    f0: float
    residual: float = 0.0
    condition: float = 1.0

    @property
    def rho_gg(self) -> float:
        """Population of |g> = |F=3, m=3>."""
        return float(self.ground[BASIS.ground.index((3, 3)), BASIS.ground.index((3, 3))].real)

    def population(self, F, m, excited=False) -> float:
        if excited:
            i = BASIS.excited.index((F, m))
            return float(self.excited[i, i].real)
        i = BASIS.ground.index((F, m))
        return float(self.ground[i, i].real)

    def hyperfine_population(self, F) -> float:
        return float(sum(self.ground[i, i].real for i, (f, _) in enumerate(BASIS.ground) if f == F))

    @property
    def trace(self) -> float:
        return float(np.trace(self.ground).real + np.trace(self.excited).real)

    def hermiticity_error(self) -> float:
        return max(float(np.max(np.abs(self.ground - self.ground.conj().T))),
                   float(np.max(np.abs(self.excited - self.excited.conj().T))))

    def to_csv(self, target, metadata=None):
        """One row per nonzero element: block, row level, column level, re, im."""
        rows = []
        for name, mat, lv in (("ground", self.ground, BASIS.ground), ("excited", self.excited, BASIS.excited)):
            for i, j in zip(*np.nonzero(np.abs(mat) > 0)):
                rows.append((0 if name == "ground" else 1, lv[i][0], lv[i][1], lv[j][0], lv[j][1],
                             mat[i, j].real, mat[i, j].imag))
        meta = {"delta_D_MHz": to_mhz(self.delta_d), "block": "0 = ground, 1 = excited"}
        meta.update(metadata or {})
        return write_csv(target, ["block", "F_row", "m_row", "F_col", "m_col", "re", "im"], rows, meta)


def block_from_vector(vec, delta_d, f0, residual=0.0, condition=1.0) -> DensityMatrixBlock:
    """Assemble ground/excited matrices from a complex vector over BLOCK."""
    full = np.zeros((BASIS.dimension, BASIS.dimension), dtype=complex)
    for (a, b), v in zip(BLOCK, vec):
        full[a, b] = v
    return DensityMatrixBlock(full[:N_GROUND, :N_GROUND].copy(), full[N_GROUND:, N_GROUND:].copy(),
                              float(delta_d), float(f0), residual, condition)


POPULATION_TOL = 1e-12


def solve_system(system: SteadySystem) -> DensityMatrixBlock:
    A, b = system.A, system.b
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"steady-state system is singular (cond = {np.linalg.cond(A):.3g})") from exc
    resid = float(np.linalg.norm(A @ x - b) / max(np.linalg.norm(b), np.finfo(float).tiny))
    cond = float(np.linalg.cond(A))
    if not np.all(np.isfinite(x)):
        raise NumericalError(f"steady-state solve produced non-finite values (cond = {cond:.3g})")
    vec = T_PARAMS @ x
    blk = block_from_vector(vec, system.delta_d, system.f0, resid, cond)
    ground, excited = blk.ground, blk.excited
    # re-symmetrize and clip round-off negatives
    ground = 0.5 * (ground + ground.conj().T)
    excited = 0.5 * (excited + excited.conj().T)
    floor = -POPULATION_TOL * max(system.f0, np.finfo(float).tiny)
    for mat in (ground, excited):
        d = np.real(np.diag(mat)).copy()
        if np.any(d < floor):
            raise NumericalError(f"negative population {d.min():.3g} (cond = {cond:.3g})")
        np.fill_diagonal(mat, np.maximum(d, 0.0))
    return replace(blk, ground=ground, excited=excited)


def steady_state(config: PumpConfig, delta_d) -> DensityMatrixBlock:
    """Steady Zeeman density matrix of the velocity class ``delta_d`` (rad/s)."""
    system = add_hole_burning(build_steady_system(config, delta_d), config, delta_d)
    return solve_system(system)


@dataclass(frozen=True)
class PumpedDistribution:
    """rho_gg per velocity class, raw and normalized, ready for averaging."""

    grid: np.ndarray
    rho_gg: np.ndarray
    f0: np.ndarray
    distribution: VelocityDistribution

    @property
    def normalized(self) -> VelocityDistribution:
        return self.distribution.normalized_view()

    def to_csv(self, target, metadata=None):
        """Columns ``delta_D_MHz, f_value`` (per cyclic MHz) plus the unpumped f0/16."""
        scale = 2e6 * math.pi
        rows = zip(to_mhz(self.grid), self.rho_gg * scale, self.f0 * scale / N_GROUND)
        return write_csv(target, ["delta_D_MHz", "f_value", "f0_over_16"], rows, metadata)


def modified_distribution(config: PumpConfig, grid, *, workers=1) -> PumpedDistribution:
    """|g> population versus Doppler shift, not renormalized.

    ``grid`` should span at least +-5 Doppler widths.  Velocity classes are
    independent and may be solved on ``workers`` threads.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be a strictly increasing 1-d array")
    span = 5 * config.doppler_width * (1 - 1e-9)
    if grid[0] > -span or grid[-1] < span:
        warnings.warn("velocity grid does not cover +-5 Doppler widths", RuntimeWarning, stacklevel=2)

    def one(dd):
        return steady_state(config, dd).rho_gg

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = np.array(list(pool.map(one, grid)))
    else:
        values = np.array([one(dd) for dd in grid])
    dist = VelocityDistribution.tabulated(grid, values, normalized=False)
    return PumpedDistribution(grid, values, config.f0(grid), dist)
