"""Brute-force time integration used to validate the closed-form solutions.

Nothing here is used by the production code paths.  The master equations
are assembled from scratch as superoperators acting on the full density
matrix (commutators plus element-wise relaxation), integrated forward in
time from an empty state and read out once the state stops changing.

Integration scheme
------------------
For dx/dt = L x + s the one-step map is

    x_{n+1} = exp(hL) x_n + h exp(hL/2) s                 ("midpoint")

which treats the homogeneous part exactly and the source with the midpoint
rule, so the stationary point carries an O(h^2) error.  ``"exact"`` uses
the exact affine propagator instead.  Because the map is linear and time
independent, 2^k steps are taken at once by squaring the augmented
(n+1)x(n+1) step matrix, which makes horizons of 10^10 steps cheap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import ConvergenceError, DomainError

__all__ = [
    "EvolutionConfig",
    "EvolutionResult",
    "integrate_linear",
    "six_level_liouvillian",
    "evolve_six_level",
    "evolve_pumping",
]


@dataclass(frozen=True)
class EvolutionConfig:
    """Step size, horizon and convergence threshold of the oracle.

    ``step`` and ``horizon`` default to values derived from the spectrum of
    the generator: step = ``step_factor`` / max|lambda| and horizon =
    ``horizon_factor`` / min|Re lambda|.
    """

    step: float | None = None
    horizon: float | None = None
    tol: float = 1e-10
    scheme: str = "midpoint"
    step_factor: float = 5e-4
    horizon_factor: float = 20.0
    max_doublings: int = 80

    def __post_init__(self):
        if self.scheme not in ("midpoint", "exact"):
            raise DomainError(f"unknown scheme {self.scheme!r}")
        if self.step is not None and self.step <= 0:
            raise DomainError("step must be positive")
        if self.horizon is not None and self.horizon <= 0:
            raise DomainError("horizon must be positive")


@dataclass(frozen=True)
class EvolutionResult:
    state: np.ndarray
    time: float
    step: float
    steps: int
    change: float
    trace_history: tuple = ()


def _step_matrix(L, s, h, scheme):
    n = L.shape[0]
    P = np.zeros((n + 1, n + 1), dtype=complex)
    P[n, n] = 1.0
    if scheme == "exact":
        M = np.zeros((n + 1, n + 1), dtype=complex)
        M[:n, :n] = L
        M[:n, n] = s
        return expm(h * M)
    half = expm(0.5 * h * L)
    P[:n, :n] = half @ half
    P[:n, n] = h * (half @ s)
    return P


def _rates(L):
    ev = np.linalg.eigvals(L)
    slow = np.min(-ev.real)
    return float(np.max(np.abs(ev))), float(slow)


def integrate_linear(L, s, config: EvolutionConfig = EvolutionConfig(), x0=None, observe=None):
    """Integrate dx/dt = L x + s from x0 (default 0) until stationary.

    ``observe`` is an optional callable applied to the state after every
    doubling; its results are returned in ``trace_history``.
    """
    L = np.asarray(L, dtype=complex)
    s = np.asarray(s, dtype=complex)
    n = L.shape[0]
    fast, slow = _rates(L)
    if not slow > 0:
        raise ConvergenceError("generator has a non-decaying mode; no unique steady state")
    h = config.step if config.step is not None else config.step_factor / fast
    horizon = config.horizon if config.horizon is not None else config.horizon_factor / slow
    P = _step_matrix(L, s, h, config.scheme)
    y = np.zeros(n + 1, dtype=complex)
    if x0 is not None:
        y[:n] = x0
    y[n] = 1.0
    y = P @ y
    t, steps = h, 1
    history = []
    prev = None
    change = np.inf
    for _ in range(config.max_doublings):
        # y holds the state after `steps` steps; P advances by `steps` steps
        if observe is not None:
            history.append(observe(y[:n]))
        if t >= horizon and prev is not None:
            scale = max(np.max(np.abs(y[:n])), np.finfo(float).tiny)
            change = np.max(np.abs(y[:n] - prev)) / scale
            if change <= config.tol:
                return EvolutionResult(y[:n].copy(), t, h, steps, change, tuple(history))
        prev = y[:n].copy()
        y = P @ y
        P = P @ P
        t *= 2
        steps *= 2
    raise ConvergenceError(f"no steady state after {steps} steps (last relative change {change:.3g})")


# ---------------------------------------------------------------- six-level

G, S, E2, E3, E4, E = range(6)
EXC = (E2, E3, E4)


def _commutator_super(H):
    n = H.shape[0]
    I = np.eye(n)
    # row-major vec: vec(A X B) = kron(A, B.T) vec(X)
    return -1j * (np.kron(H, I) - np.kron(I, H.T))


def _six_level_hamiltonian(scheme, probe=True):
    s = scheme
    H = np.zeros((6, 6), dtype=complex)
    # rotating-frame level energies; see module docs of susceptibility
    H[G, G] = 0.0
    H[S, S] = s.delta_c - s.delta_p
    for k, w in zip(EXC, s.omega_ep):
        H[k, k] = w - s.delta_p
    H[E, E] = s.omega_ee2 + s.omega_sg - s.delta_c
    V = np.zeros((6, 6), dtype=complex)
    for k, om in zip(EXC, s.rabi_c):
        V[k, S] = -om / 2
    V[E, G] = -s.rabi_eg / 2
    Vp = np.zeros((6, 6), dtype=complex)
    if probe:
        for k, om in zip(EXC, s.probe_rabis):
            Vp[k, G] = -om / 2
    V = V + V.conj().T
    Vp = Vp + Vp.conj().T
    return H + V, Vp


def _six_level_relaxation(scheme):
    s = scheme
    g = s.gamma
    rate = np.zeros((6, 6))
    excited = EXC + (E,)
    for a in range(6):
        for b in range(6):
            ea, eb = a in excited, b in excited
            if a == b:
                rate[a, b] = g if ea else 1.0 / s.tau_d
            elif ea and eb:
                rate[a, b] = s.gamma_fe
            elif ea or eb:
                lower = b if ea else a
                rate[a, b] = s.gamma_eg if lower == G else s.gamma_se
            else:
                rate[a, b] = s.gamma_sg
    D = -np.diag(rate.reshape(-1)).astype(complex)
    # spontaneous emission refills the ground populations
    for k in EXC:
        D[G * 6 + G, k * 6 + k] += g / 2
        D[S * 6 + S, k * 6 + k] += g / 2
    D[G * 6 + G, E * 6 + E] += g
    return D


def six_level_liouvillian(scheme):
    """First-order generator L and source term for the six-level model.

    The probe enters only through the source -i[V_p, rho0], with rho0 built
    from the zero-order values stored on the scheme.
    """
    for name in ("delta_p", "delta_c", "rho_gg", "rho_ss", "sigma_ge"):
        if np.ndim(getattr(scheme, name)):
            raise DomainError("the oracle works on scalar schemes only")
    H0, Vp = _six_level_hamiltonian(scheme)
    L = _commutator_super(H0) + _six_level_relaxation(scheme)
    rho0 = np.zeros((6, 6), dtype=complex)
    rho0[G, G] = scheme.rho_gg
    rho0[S, S] = scheme.rho_ss
    rho0[G, E] = scheme.sigma_ge
    rho0[E, G] = np.conj(scheme.sigma_ge)
    src = (-1j * (Vp @ rho0 - rho0 @ Vp)).reshape(-1)
    return L, src


def evolve_six_level(scheme, config: EvolutionConfig = EvolutionConfig()):
    """Steady first-order coherences (sigma_e2g, sigma_e3g, sigma_e4g, sigma_sg).

    Raises ``DomainError`` if the probe is not weak (|Omega_p| > 0.05 gamma).
    """
    if abs(scheme.probe_rabi) > 0.05 * scheme.gamma:
        raise DomainError("probe Rabi frequency must not exceed 0.05 gamma")
    L, src = six_level_liouvillian(scheme)
    res = integrate_linear(L, src, config)
    rho1 = res.state.reshape(6, 6)
    return (rho1[E2, G], rho1[E3, G], rho1[E4, G], rho1[S, G]), res


# ---------------------------------------------------------------- pumping


def _pumping_operators(config, delta_d):
    """Full 48x48 Hamiltonian (rotating frame), decay rates and jump weights.

    Built from level energies and dipoles directly; shares no assembly code
    with the steady-state solver.
    """
    from .angular import branching_ratio, relative_dipole
    from .atomdata import CS133

    ground = [(F, m) for F in (3, 4) for m in range(-F, F + 1)]
    excited = [(F, m) for F in (2, 3, 4, 5) for m in range(-F, F + 1)]
    ng, n = len(ground), len(ground) + len(excited)
    off = CS133.excited_offsets_d2()
    # lab-frame energies relative to |F'=2>, then shift by the field frequencies
    w_c = config.delta_c + delta_d                       # control, as seen by the atom
    w_r = config.delta_repump + config.repump_doppler_sign * delta_d + (off[4] - off[2])
    H = np.zeros((n, n), dtype=complex)
    for j, (Fp, _) in enumerate(excited):
        H[ng + j, ng + j] = (off[Fp] - off[2]) - w_c
    for i, (F, _) in enumerate(ground):
        if F == 4:
            if config.ground_frame == "bare":
                H[i, i] = CS133.ground_splitting
            else:
                H[i, i] = w_r - w_c
    ref3 = relative_dipole(3, 1, 2, 2)
    ref4 = relative_dipole(4, 4, 5, 5)
    for i, (F, m) in enumerate(ground):
        for j, (Fp, k) in enumerate(excited):
            if k != m + 1 or abs(Fp - F) > 1:
                continue
            om = config.control_rabi * relative_dipole(F, m, Fp, k) / ref3 if F == 3 else \
                config.repump_rabi * relative_dipole(F, m, Fp, k) / ref4
            H[ng + j, i] += -om / 2
            H[i, ng + j] += -om / 2
    jumps = np.zeros((ng, len(excited)))
    for i, (F, m) in enumerate(ground):
        for j, (Fp, k) in enumerate(excited):
            if abs(k - m) <= 1 and abs(Fp - F) <= 1:
                jumps[i, j] = float(branching_ratio(Fp, k, F, m))
    return ground, excited, H, jumps


def _pumping_rhs(config, delta_d, ground, excited, H, jumps):
    """Right-hand side rho -> d rho/dt as a function on 48x48 matrices."""
    from .pumping import pump_rate

    ng = len(ground)
    n = H.shape[0]
    g, loss = config.gamma, 1.0 / config.tau_d
    exc = np.zeros(n, dtype=bool)
    exc[ng:] = True
    # element-wise damping: transit loss everywhere on the ground, gamma/2 per excited index
    damp = np.where(exc[:, None] & exc[None, :], g + loss,
                    np.where(exc[:, None] | exc[None, :], g / 2, loss))
    rate = pump_rate(config, delta_d) if config.pump_rabi > 0 else 0.0
    hb = config.pump_rabi > 0
    i33 = ground.index((3, 3))
    i43, i44 = ground.index((4, 3)), ground.index((4, 4))
    from .pumping import HOLE_BURNING_WEIGHTS
    p_back, p3, p4 = HOLE_BURNING_WEIGHTS

    def rhs(rho):
        out = -1j * (H @ rho - rho @ H) - damp * rho
        pops = np.real(np.diag(rho))[ng:]
        out[np.arange(ng), np.arange(ng)] += g * (jumps @ pops)
        if hb:
            r = rate * rho[i33, i33]
            out[i33, i33] -= r * (1 - p_back)
            out[i43, i43] += r * p3
            out[i44, i44] += r * p4
        return out

    return rhs


def pumping_generator(config, delta_d):
    """Linear generator on the support reached from an unpolarized ground state.

    The support is found by closing {ground populations} under the dynamics,
    so it is derived rather than assumed.  Returns (L, s, elements, dim).
    """
    ground, excited, H, jumps = _pumping_operators(config, delta_d)
    rhs = _pumping_rhs(config, delta_d, ground, excited, H, jumps)
    n = H.shape[0]
    ng = len(ground)
    f0 = float(config.f0(delta_d))
    # closure of the reachable element set under the homogeneous dynamics
    pattern = np.zeros((n, n), dtype=bool)
    pattern[np.arange(ng), np.arange(ng)] = True
    coupled = (np.abs(H) > 0) | np.eye(n, dtype=bool)
    while True:
        grown = (coupled.astype(int) @ pattern.astype(int) @ coupled.astype(int)) > 0
        diag = np.zeros((n, n), dtype=bool)
        diag[np.arange(ng), np.arange(ng)] = True
        grown |= diag | pattern
        if np.array_equal(grown, pattern):
            break
        pattern = grown
    elements = tuple(zip(*np.nonzero(pattern)))
    L = np.zeros((len(elements), len(elements)), dtype=complex)
    for c, (a, b) in enumerate(elements):
        unit = np.zeros((n, n), dtype=complex)
        unit[a, b] = 1.0
        image = rhs(unit)
        leak = np.abs(image[~pattern]).max(initial=0.0)
        if leak > 0:
            raise DomainError("dynamics leave the closed support")
        L[:, c] = image[pattern]
    src = np.zeros(len(elements), dtype=complex)
    for c, (a, b) in enumerate(elements):
        if a == b and a < ng:
            src[c] = f0 / (ng * config.tau_d)
    return L, src, elements, n


def evolve_pumping(config, delta_d, evolution: EvolutionConfig | None = None, *, track_trace=True):
    """Time-integrate the un-eliminated pumping dynamics to steady state.

    Starts from the unpolarized ground state f0/16 per sublevel, which keeps
    the total population at f0 at all times.  Returns (DensityMatrixBlock,
    EvolutionResult); ``trace_history`` holds the total population after
    every doubling of the elapsed time.
    """
    from .pumping import block_from_vector, BLOCK

    evolution = evolution or EvolutionConfig(scheme="exact", step=1.0 / config.gamma)
    L, src, elements, n = pumping_generator(config, delta_d)
    f0 = float(config.f0(delta_d))
    pos = {el: i for i, el in enumerate(elements)}
    x0 = np.zeros(len(elements), dtype=complex)
    diag_idx = [pos[(a, a)] for a in range(n) if (a, a) in pos]
    for a in range(16):
        x0[pos[(a, a)]] = f0 / 16

    def observe(x):
        return float(np.real(np.sum(x[diag_idx])))

    res = integrate_linear(L, src, evolution, x0=x0, observe=observe if track_trace else None)
    vec = np.array([res.state[pos[el]] if el in pos else 0.0 for el in BLOCK], dtype=complex)
    return block_from_vector(vec, delta_d, f0), res
