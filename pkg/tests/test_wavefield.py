import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirmeas.wavefield import (
    Grid,
    JointState,
    WaveFunction,
    from_momentum,
    gaussian_source,
    make_grid,
    momentum_amplitude,
    normalize,
    overlap,
    to_momentum,
)

from conftest import random_state


def test_grid_two_points():
    g = make_grid(2, 1.0)
    assert g.spacing == 1.0
    np.testing.assert_allclose(g.x, [-0.5, 0.5])


def test_grid_sixty_points_bin_scale():
    assert make_grid(60).spacing == pytest.approx(1 / 30)


def test_grid_first_centre():
    # -1 + 0.5 * (2/64)
    assert make_grid(64).x[0] == pytest.approx(-0.984375, abs=1e-15)


def test_grid_rejects_bad_input():
    with pytest.raises(ValueError):
        make_grid(1)
    with pytest.raises(ValueError):
        make_grid(4, 0.0)


def test_momentum_grid_has_zero_sample():
    for n in (4, 7, 64):
        g = make_grid(n)
        assert g.p[g.zero_momentum_index] == 0.0
        assert g.p_spacing == pytest.approx(2 * np.pi / (n * g.spacing))


def test_normalize_uniform():
    g = make_grid(4, 1.0)
    out = normalize(WaveFunction(g, np.ones(4)))
    np.testing.assert_allclose(out.amplitudes, 1 / np.sqrt(2))


def test_normalize_idempotent_and_homogeneous():
    psi = random_state(16, seed=3)
    np.testing.assert_allclose(normalize(psi).amplitudes, psi.amplitudes, atol=1e-12)
    scaled = normalize(WaveFunction(psi.grid, 7j * psi.amplitudes))
    np.testing.assert_allclose(np.abs(scaled.amplitudes), np.abs(psi.amplitudes), atol=1e-12)
    np.testing.assert_allclose(scaled.amplitudes, 1j * psi.amplitudes, atol=1e-12)


def test_normalize_zero_rejected():
    with pytest.raises(ValueError):
        normalize(WaveFunction(make_grid(4), np.zeros(4)))


def test_overlap_examples():
    psi = random_state(8, seed=1)
    assert overlap(psi, psi) == pytest.approx(1.0, abs=1e-12)
    g = make_grid(8)
    left = WaveFunction(g, (g.x < 0).astype(float))
    right = WaveFunction(g, (g.x > 0).astype(float))
    assert overlap(left, right) == 0


def test_overlap_matches_summation_oracle():
    a, b = random_state(8, seed=5), random_state(8, seed=6)
    oracle = 0j
    for u, v in zip(a.amplitudes, b.amplitudes):
        oracle += u.conjugate() * v * 0.25
    assert abs(overlap(a, b) - oracle) < 1e-14


def test_overlap_grid_mismatch():
    with pytest.raises(ValueError):
        overlap(random_state(8), random_state(16))


def test_uniform_state_concentrated_at_zero_momentum():
    g = make_grid(16)
    phi = to_momentum(normalize(WaveFunction(g, np.ones(16))))
    mags = np.abs(phi.amplitudes)
    assert np.argmax(mags) == g.zero_momentum_index
    others = np.delete(mags, g.zero_momentum_index)
    assert np.max(others) < 1e-12


def test_single_bin_has_flat_spectrum():
    amps = np.zeros(32)
    amps[11] = 1.0
    phi = to_momentum(WaveFunction(make_grid(32), amps))
    np.testing.assert_allclose(np.abs(phi.amplitudes), np.abs(phi.amplitudes[0]), rtol=1e-12)


def test_to_momentum_matches_direct_sum():
    psi = random_state(12, seed=2)
    g = psi.grid
    direct = np.array([np.sum(psi.amplitudes * np.exp(-1j * p * g.x)) * g.spacing
                       for p in g.p]) / np.sqrt(2 * np.pi)
    np.testing.assert_allclose(to_momentum(psi).amplitudes, direct, atol=1e-13)
    np.testing.assert_allclose(momentum_amplitude(g, psi.amplitudes, g.p), direct, atol=1e-13)


def test_gaussian_fourier_pair():
    # wide window: the packet exp(-x^2/(2a)) with a = 0.25 is negligible at |x| = 4
    a = 0.25
    g = make_grid(256, 4.0)
    psi = WaveFunction(g, np.exp(-g.x**2 / (2 * a)))
    phi = to_momentum(psi)
    analytic = np.sqrt(a) * np.exp(-a * g.p**2 / 2)
    np.testing.assert_allclose(phi.amplitudes, analytic, atol=1e-10)
    # uncertainty product of a Gaussian is exactly 1/2
    px = np.abs(psi.amplitudes) ** 2
    pp = np.abs(phi.amplitudes) ** 2
    sx = np.sqrt(np.sum(g.x**2 * px) / np.sum(px))
    sp = np.sqrt(np.sum(g.p**2 * pp) / np.sum(pp))
    assert sx * sp == pytest.approx(0.5, rel=1e-8)


@settings(max_examples=100, deadline=None)
@given(n=st.sampled_from([4, 8, 64, 256]), seed=st.integers(0, 2**32 - 1))
def test_parseval_and_round_trip(n, seed):
    psi = random_state(n, seed=seed)
    phi = to_momentum(psi)
    assert abs(phi.norm2 - psi.norm2) < 1e-10
    back = from_momentum(phi)
    np.testing.assert_allclose(back.amplitudes, psi.amplitudes, atol=1e-10)


def test_gaussian_ratio_at_edge():
    g = Grid(2001)  # odd: x = 0 and x = +-(1 - dx/2) are samples
    psi = gaussian_source(1.0, g)
    ratio = psi.amplitudes[1000] / psi.amplitudes[-1]
    assert ratio.real == pytest.approx(np.exp(g.x[-1] ** 2 / 2), rel=1e-12)
    assert np.exp(0.5) == pytest.approx(1.6487, abs=1e-4)


def test_gaussian_variance_scaling():
    g = make_grid(512, 20.0)  # wide window, no truncation
    var = []
    for a in (1.0, 0.5):
        w = np.abs(gaussian_source(a, g).amplitudes) ** 2
        var.append(np.sum(g.x**2 * w) / np.sum(w))
    assert var[1] / var[0] == pytest.approx(0.5, rel=1e-10)


def test_gaussian_free_evolution_oracle():
    g = make_grid(128)
    t, a = 0.8, 1.0
    psi0 = gaussian_source(a, g)
    psi = gaussian_source(a, g, t=t)
    # |exp(-x^2/(2(a+it)))| = exp(-x^2 a / (2 (a^2 + t^2)))
    expect = np.exp(-g.x**2 * a / (2 * (a**2 + t**2)))
    mod = np.abs(psi.amplitudes)
    np.testing.assert_allclose(mod / mod[64], expect / expect[64], rtol=1e-12)
    assert mod[0] / mod.max() > np.abs(psi0.amplitudes[0]) / np.abs(psi0.amplitudes).max()


def test_gaussian_t0_real_even_unimodal():
    psi = gaussian_source(0.75, make_grid(64))
    amps = psi.amplitudes
    assert np.all(amps.imag == 0) and np.all(amps.real > 0)
    np.testing.assert_allclose(amps, amps[::-1], atol=1e-15)
    assert np.all(np.diff(amps.real[:32]) > 0)


def test_gaussian_rejects_bad_input():
    with pytest.raises(ValueError):
        gaussian_source(0.0, make_grid(8))
    with pytest.raises(ValueError):
        gaussian_source(1.0, make_grid(8), t=-1.0)


def test_joint_embed_crop_round_trip():
    psi = random_state(16, seed=9)
    j = JointState.from_wavefunction(psi)
    big = j.embed(3)
    assert big.grid.n_points == 48 and big.grid.spacing == pytest.approx(j.grid.spacing)
    assert big.norm2 == pytest.approx(j.norm2, abs=1e-14)
    back = big.crop(j.grid)
    np.testing.assert_array_equal(back.amp0, j.amp0)
    np.testing.assert_allclose(big.grid.x[16:32], j.grid.x, atol=1e-14)
