import io
from dataclasses import replace

import numpy as np
import pytest

from eitsim.atomdata import CS133, mhz
from eitsim.errors import DomainError
from eitsim.pumping import (BASIS, BLOCK, HOLE_BURNING_WEIGHTS, OPTICAL, PumpConfig, ZeemanBasis,
                            add_hole_burning, build_steady_system, effective_detunings, modified_distribution,
                            optical_denominator, pump_rate, solve_system, steady_state)

G = CS133.gamma
BASE = PumpConfig()


def random_configs(n, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        yield PumpConfig(control_rabi=rng.uniform(0.2, 4) * G, delta_c=mhz(rng.uniform(-30, 30)),
                         repump_rabi=rng.uniform(0, 3) * G, delta_repump=mhz(rng.uniform(-30, 30)),
                         pump_rabi=rng.uniform(0, 0.5) * G, delta_pump=mhz(rng.uniform(-80, 80)),
                         counter_propagating=bool(rng.integers(2))), mhz(rng.uniform(-400, 400))


def test_basis_dimensions():
    b = ZeemanBasis.cs_d2()
    assert len(b.ground) == 16 and len(b.excited) == 32
    assert b.dimension == 48
    assert len(set(b.index())) == 48


def test_support_has_no_cross_m_elements():
    for a, b in BLOCK:
        assert BASIS.levels[a][1] == BASIS.levels[b][1]
    for a, b in OPTICAL:
        assert abs(BASIS.levels[a][1] - BASIS.levels[b][1]) == 1


@pytest.mark.parametrize("cfg,dd", list(random_configs(8)))
def test_invariants(cfg, dd):
    blk = steady_state(cfg, dd)
    assert blk.residual <= 1e-10
    assert blk.hermiticity_error() <= 1e-10 * blk.f0
    assert blk.trace == pytest.approx(blk.f0, rel=1e-10)
    assert np.all(np.real(np.diag(blk.ground)) >= 0)
    assert np.all(np.real(np.diag(blk.excited)) >= 0)


def test_no_fields_gives_unpolarized_ground():
    for dd in (0.0, mhz(250.0)):
        blk = steady_state(BASE.fields_off(), dd)
        np.testing.assert_allclose(np.diag(blk.ground).real, blk.f0 / 16, rtol=1e-12)
        assert np.abs(blk.excited).max() == 0
        assert np.abs(blk.ground - np.diag(np.diag(blk.ground))).max() == 0


def test_optical_denominator_form():
    cfg = replace(BASE, delta_c=mhz(3.0))
    dd = mhz(40.0)
    off3 = CS133.excited_offsets_d2()[3] - CS133.excited_offsets_d2()[2]
    assert optical_denominator(cfg, 3, 3, dd) == pytest.approx(0.5j * G - (mhz(3.0) - off3) - dd)
    # the counter-propagating repump sees the opposite Doppler shift
    dets = effective_detunings(cfg, dd)
    assert dets[(4, 4)] == pytest.approx(cfg.delta_repump - dd)


def test_hole_burning_weights():
    assert HOLE_BURNING_WEIGHTS == pytest.approx((25 / 60, 7 / 60, 28 / 60), abs=1e-15)


def test_pump_rate_lorentzian():
    cfg = replace(BASE, pump_rabi=0.15 * G, delta_pump=mhz(-40))
    peak = pump_rate(cfg, mhz(40))
    assert peak == pytest.approx(G * (0.15 * G) ** 2 / (G**2 + (0.15 * G) ** 2))
    assert pump_rate(cfg, mhz(39)) < peak and pump_rate(cfg, mhz(41)) < peak


def test_hole_burning_without_pump_leaves_system_unchanged():
    sys0 = build_steady_system(BASE, mhz(10))
    assert add_hole_burning(sys0, BASE, mhz(10)) is sys0


def test_hole_burning_moves_population_from_g():
    cfg = replace(BASE, pump_rabi=0.3 * G, delta_pump=mhz(-40))
    with_hb = solve_system(add_hole_burning(build_steady_system(cfg, mhz(40)), cfg, mhz(40)))
    without = solve_system(build_steady_system(cfg, mhz(40)))
    assert with_hb.rho_gg < without.rho_gg
    assert with_hb.population(4, 4) > without.population(4, 4)
    assert with_hb.trace == pytest.approx(without.trace, rel=1e-10)


def test_control_only_empties_f3():
    cfg = replace(BASE, repump_rabi=0.0)
    blk = steady_state(cfg, 0.0)
    assert blk.hyperfine_population(3) < 0.05 * blk.f0


def test_f3_population_falls_with_control_intensity():
    vals = [steady_state(PumpConfig(control_rabi=x * G, repump_rabi=0.0), mhz(5)).hyperfine_population(3)
            for x in (0.05, 0.1, 0.3, 1.0, 2.3)]
    assert np.all(np.diff(vals) < 0)


def test_positive_doppler_shifts_are_depleted():
    assert steady_state(BASE, mhz(100)).rho_gg / steady_state(BASE, mhz(-100)).rho_gg < 0.5


def test_raman_and_bare_frames_agree_off_raman_resonance():
    a = steady_state(BASE, mhz(-100)).rho_gg
    b = steady_state(replace(BASE, ground_frame="bare"), mhz(-100)).rho_gg
    assert a == pytest.approx(b, rel=0.01)


@pytest.fixture(scope="module")
def grid():
    W = BASE.doppler_width
    return np.linspace(-6 * W, 6 * W, 401)


def test_distribution_is_narrowed(grid):
    pd = modified_distribution(BASE, grid)
    d = pd.normalized
    width = np.sqrt(d.moment(2) - d.moment(1) ** 2)
    assert width < 0.9 * BASE.doppler_width
    assert d.moment(1) < 0  # depleted on the positive side
    assert pd.distribution.total < 1 / 16


def test_no_field_distribution_is_f0_over_16(grid):
    pd = modified_distribution(BASE.fields_off(), grid)
    np.testing.assert_allclose(pd.rho_gg, pd.f0 / 16, rtol=1e-12)


def test_hole_depth_grows_with_pump_strength():
    hole_at, ref_at = mhz(40), mhz(40)
    base = steady_state(BASE, ref_at).rho_gg
    depths = [1 - steady_state(replace(BASE, pump_rabi=x * G, delta_pump=mhz(-40)), hole_at).rho_gg / base
              for x in (0.05, 0.1, 0.15, 0.3)]
    assert np.all(np.diff(depths) > 0)


def test_hole_is_centred_at_minus_pump_detuning():
    cfg = replace(BASE, pump_rabi=0.15 * G, delta_pump=mhz(-40))
    dd = mhz(np.linspace(20, 60, 81))
    ratio = [steady_state(cfg, x).rho_gg / steady_state(BASE, x).rho_gg for x in dd]
    i = int(np.argmin(ratio))
    assert abs(dd[i] - mhz(40)) <= mhz(1.0)
    # width at half depth is at least the natural linewidth
    half = 1 - (1 - ratio[i]) / 2
    inside = dd[np.array(ratio) < half]
    assert inside[-1] - inside[0] >= G


def test_grid_and_config_validation(grid):
    with pytest.raises(DomainError):
        modified_distribution(BASE, grid[::-1])
    with pytest.warns(RuntimeWarning):
        modified_distribution(BASE, np.linspace(-1e8, 1e8, 5))
    with pytest.raises(DomainError):
        PumpConfig(control_rabi=-1.0)
    with pytest.raises(DomainError):
        PumpConfig(ground_frame="lab")


def test_csv_dumps(grid):
    blk = steady_state(BASE, 0.0)
    text = blk.to_csv(io.StringIO())
    assert "block,F_row,m_row,F_col,m_col,re,im" in text
    pd = modified_distribution(BASE, grid[::40])
    assert "delta_D_MHz,f_value,f0_over_16" in pd.to_csv(io.StringIO())
