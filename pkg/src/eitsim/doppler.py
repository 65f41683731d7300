"""Velocity averaging, Beer's-law transmittance and EIT contrast.

Probe and control propagate in the same direction, so an atom with Doppler
shift ``d`` sees both detunings increased by ``d``.  Averages are weighted
sums over a fixed set of nodes; the weights already contain the quadrature
measure, so for a normalized distribution they add up to one.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.signal import find_peaks

from .atomdata import CS133, to_mhz
from .csvio import write_csv
from .errors import DomainError, FlatCurveError
from .susceptibility import LevelScheme, Susceptibility, chi, with_zero_order

__all__ = [
    "VelocityDistribution",
    "TransmittanceCurve",
    "average_chi",
    "transmittance",
    "contrast",
    "transparency_peak",
    "probe_grid",
]

DEFAULT_NODES = 2048
DEFAULT_SPAN = 6.0  # half-width of the trapezoid grid in units of the Doppler width
NORM_TOL = 1e-6


def _trapezoid_weights(x):
    h = np.diff(x)
    w = np.zeros_like(x)
    w[:-1] += h / 2
    w[1:] += h / 2
    return w


def _gauss(x, width):
    return np.exp(-0.5 * (x / width) ** 2) / (np.sqrt(2 * np.pi) * width)


@dataclass(frozen=True)
class VelocityDistribution:
    """Doppler-shift distribution sampled on quadrature nodes.

    ``density`` is f(Delta_D) per rad/s at each node; ``weights`` is the
    quadrature weight times the density.  ``normalized`` is False for
    distributions that are depleted on purpose (optical pumping), in which
    case the weights are not required to add up to one.
    """

    nodes: np.ndarray
    weights: np.ndarray
    density: np.ndarray
    kind: str
    width: float = 0.0
    normalized: bool = True

    def __post_init__(self):
        for name in ("nodes", "weights", "density"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not (self.nodes.shape == self.weights.shape == self.density.shape) or self.nodes.ndim != 1:
            raise DomainError("nodes, weights and density must be 1-d arrays of equal length")

    @classmethod
    def gaussian(cls, width, nodes=DEFAULT_NODES, span=DEFAULT_SPAN, rule="trapezoid"):
        """Maxwellian distribution of standard deviation ``width`` (rad/s)."""
        if not width > 0:
            raise DomainError("Doppler width must be positive")
        if rule == "trapezoid":
            if nodes < 2:
                raise DomainError("need at least two nodes")
            x = np.linspace(-span * width, span * width, nodes)
            f = _gauss(x, width)
            return cls(x, _trapezoid_weights(x) * f, f, "gaussian", float(width))
        if rule == "gauss-hermite":
            t, w = np.polynomial.hermite.hermgauss(nodes)
            x = np.sqrt(2.0) * width * t
            return cls(x, w / np.sqrt(np.pi), _gauss(x, width), "gaussian", float(width))
        raise DomainError(f"unknown quadrature rule {rule!r}")

    @classmethod
    def at_rest(cls):
        """All atoms at zero velocity."""
        return cls(np.zeros(1), np.ones(1), np.ones(1), "delta")

    @classmethod
    def tabulated(cls, grid, values, nodes=None, normalized=False):
        """Distribution given by samples ``values`` (per rad/s) at ``grid``.

        Values are interpolated linearly onto ``nodes`` (default: the grid
        itself) and taken as zero outside the tabulated range.
        """
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
            raise DomainError("grid and values must be matching 1-d arrays")
        if np.any(np.diff(grid) <= 0):
            raise DomainError("grid must be strictly increasing")
        x = grid if nodes is None else np.asarray(nodes, dtype=float)
        f = np.interp(x, grid, values, left=0.0, right=0.0)
        width = float(np.sqrt(max(np.sum(_trapezoid_weights(grid) * values * grid**2), 0.0)
                              / max(np.sum(_trapezoid_weights(grid) * values), np.finfo(float).tiny)))
        return cls(x, _trapezoid_weights(x) * f, f, "tabulated", width, normalized)

    @property
    def total(self) -> float:
        return float(np.sum(self.weights))

    def moment(self, k: int) -> float:
        return float(np.sum(self.weights * self.nodes**k))

    def normalized_view(self) -> "VelocityDistribution":
        t = self.total
        if not t > 0:
            raise DomainError("distribution is empty")
        return replace(self, weights=self.weights / t, density=self.density / t, normalized=True)

    def validate(self):
        if not np.all(np.isfinite(self.weights)) or np.any(self.weights < 0):
            raise DomainError("distribution weights must be finite and non-negative")
        if self.normalized and abs(self.total - 1.0) > NORM_TOL:
            raise DomainError(f"distribution weights add up to {self.total!r}, not 1")

    def to_csv(self, target, metadata=None):
        """Columns ``delta_D_MHz, f_value``; f is per cyclic MHz."""
        per_mhz = self.density * 2e6 * np.pi
        rows = zip(to_mhz(self.nodes), per_mhz)
        return write_csv(target, ["delta_D_MHz", "f_value"], rows, metadata)


def _chunk_chi(scheme, model, dp_rows, nodes, weights, include_n, n0, dipole, zero_order):
    dp = dp_rows[:, None] + nodes[None, :]
    dc = scheme.delta_c + nodes[None, :]
    s = scheme.with_detunings(delta_p=dp, delta_c=np.broadcast_to(dc, dp.shape))
    if zero_order is not None:
        s = with_zero_order(s, zero_order)
    x = chi(s, model, n0=n0, dipole=dipole, include_n=include_n)
    # numpy's pairwise sum over a fixed axis keeps the reduction order fixed
    value = np.sum(x.value * weights, axis=1)
    lines = tuple(np.sum(np.broadcast_to(l, dp.shape) * weights, axis=1) for l in x.lines)
    return value, lines, x.scale


def average_chi(scheme: LevelScheme, distribution: VelocityDistribution, delta_p, model="six", *,
                include_n=True, n0=1.1e10, dipole=None, zero_order=None, chunk=32, workers=1):
    """Velocity-averaged susceptibility at each probe detuning in ``delta_p``.

    ``zero_order`` (``"full"`` or ``"simplified"``) recomputes the zero-order
    populations per velocity class; ``None`` keeps the scheme's values.
    Chunks of probe detunings can be evaluated on ``workers`` threads; the
    result does not depend on the worker count.
    """
    distribution.validate()
    dp = np.atleast_1d(np.asarray(delta_p, dtype=float))
    nodes, weights = distribution.nodes, distribution.weights
    starts = range(0, dp.size, chunk)

    def job(i):
        return _chunk_chi(scheme, model, dp[i:i + chunk], nodes, weights, include_n, n0, dipole, zero_order)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, starts))
    else:
        parts = [job(i) for i in starts]
    value = np.concatenate([p[0] for p in parts])
    lines = tuple(np.concatenate([p[1][k] for p in parts]) for k in range(3))
    scale = parts[0][2]
    return Susceptibility(value=value, lines=lines, scale=scale, gamma=scheme.gamma)


@dataclass(frozen=True)
class TransmittanceCurve:
    delta_p: np.ndarray
    chi: np.ndarray
    t: np.ndarray
    metadata: dict = field(default_factory=dict)

    def to_csv(self, target, metadata=None):
        meta = dict(self.metadata)
        meta.update(metadata or {})
        rows = zip(to_mhz(self.delta_p), np.real(self.chi), np.imag(self.chi), self.t)
        return write_csv(target, ["delta_p_MHz", "re_chi", "im_chi", "transmittance"], rows, meta)


def transmittance(delta_p, chi_bar, *, length=1.0, wavelength=None, metadata=None) -> TransmittanceCurve:
    """Beer's law t = exp(-4 pi k_p L Im chi) with L in cm and lambda in m.

    Values above 1 can only come from round-off in a passive medium and are
    capped at 1.
    """
    if not length > 0:
        raise DomainError("length must be positive")
    lam = CS133.d2_wavelength if wavelength is None else wavelength
    value = chi_bar.value if isinstance(chi_bar, Susceptibility) else np.asarray(chi_bar)
    k_p = 2 * np.pi / (lam * 100.0)  # cm^-1
    t = np.exp(-4 * np.pi * k_p * length * np.imag(value))
    t = np.minimum(t, 1.0)
    meta = {"length_cm": length, "wavelength_m": lam}
    meta.update(metadata or {})
    return TransmittanceCurve(np.asarray(delta_p, dtype=float), np.asarray(value), t, meta)


def _local_maxima(t):
    inner = (t[1:-1] > t[:-2]) & (t[1:-1] >= t[2:])
    return np.nonzero(inner)[0] + 1


def contrast(curve: TransmittanceCurve, center=None, *, gamma=None, plateau=(15.0, 25.0),
             peak_halfwidth=3.0, peak="local", noise_floor=1e-12) -> float:
    """EIT contrast (t_max - t_min) / (1 - t_min).

    t_min is the mean transmittance over ``center + plateau`` (in units of
    gamma).  With ``peak="local"`` t_max is the highest local maximum of t
    within ``peak_halfwidth`` gamma of ``center``, so a sloped background
    without a transparency peak gives 0; ``peak="max"`` takes the plain
    maximum over that window.  A curve that is flat to within
    ``noise_floor`` raises ``FlatCurveError``.
    """
    g = CS133.gamma if gamma is None else gamma
    c = curve.metadata.get("eit_position", 0.0) if center is None else center
    x, t = curve.delta_p, curve.t
    plateau_mask = (x >= c + plateau[0] * g) & (x <= c + plateau[1] * g)
    peak_mask = np.abs(x - c) <= peak_halfwidth * g
    if not plateau_mask.any() or not peak_mask.any():
        raise DomainError("probe grid does not cover the plateau and peak windows")
    if np.ptp(t) <= noise_floor:
        raise FlatCurveError("transmittance curve is flat")
    t_min = float(np.mean(t[plateau_mask]))
    if 1 - t_min <= noise_floor:
        raise FlatCurveError("plateau is fully transparent; contrast undefined")
    if peak == "max":
        t_max = float(np.max(t[peak_mask]))
    elif peak == "local":
        idx = [i for i in _local_maxima(t) if peak_mask[i]]
        if not idx:
            return 0.0
        t_max = float(np.max(t[idx]))
    else:
        raise DomainError(f"unknown peak rule {peak!r}")
    return float(np.clip((t_max - t_min) / (1 - t_min), 0.0, 1.0))


@dataclass(frozen=True)
class TransparencyPeak:
    position: float
    height: float
    prominence: float


def transparency_peak(curve: TransmittanceCurve, center=0.0, *, halfwidth, gamma=None):
    """Most prominent local maximum of t within ``halfwidth`` gamma of ``center``.

    Returns None when the window holds no local maximum.  Prominence is
    measured with scipy's peak-prominence definition on the whole curve.
    """
    g = CS133.gamma if gamma is None else gamma
    idx, props = find_peaks(curve.t, prominence=0.0)
    keep = [k for k, i in enumerate(idx) if abs(curve.delta_p[i] - center) <= halfwidth * g]
    if not keep:
        return None
    k = max(keep, key=lambda j: props["prominences"][j])
    i = idx[k]
    return TransparencyPeak(float(curve.delta_p[i]), float(curve.t[i]), float(props["prominences"][k]))


def probe_grid(center, gamma, *, span=(-30.0, 30.0), coarse=241, fine_halfwidth=3.0, fine=401):
    """Probe detunings: a coarse grid over ``span`` gamma plus a dense core around ``center``."""
    a = center + gamma * np.linspace(span[0], span[1], coarse)
    b = center + gamma * np.linspace(-fine_halfwidth, fine_halfwidth, fine)
    return np.unique(np.concatenate([a, b]))
