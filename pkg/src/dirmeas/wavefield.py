"""Discretized wave functions on a uniform transverse grid.

Internal units: hbar = 1 and lengths in units of the measuring half-range L,
so the measuring range is x in [-1, 1] and momenta are in units of 1/L
(reported elsewhere as multiples of pi/L).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid",
    "WaveFunction",
    "MomentumWaveFunction",
    "JointState",
    "make_grid",
    "normalize",
    "overlap",
    "to_momentum",
    "from_momentum",
    "momentum_amplitude",
    "gaussian_source",
]

SQRT_2PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class Grid:
    """Uniform bin-centred grid on [-half_range, half_range]."""

    n_points: int
    half_range: float = 1.0

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError(f"n_points must be an integer >= 2, got {self.n_points}")
        if not self.half_range > 0:
            raise ValueError(f"half_range must be positive, got {self.half_range}")
        object.__setattr__(self, "n_points", int(self.n_points))
        object.__setattr__(self, "half_range", float(self.half_range))

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_range / self.n_points

    @property
    def x(self) -> np.ndarray:
        k = np.arange(self.n_points)
        return -self.half_range + (k + 0.5) * self.spacing

    @property
    def p_spacing(self) -> float:
        return 2.0 * np.pi / (self.n_points * self.spacing)

    @property
    def p(self) -> np.ndarray:
        """Conjugate momentum grid; p = 0 sits at index n_points // 2."""
        j = np.arange(self.n_points) - self.n_points // 2
        return j * self.p_spacing

    @property
    def zero_momentum_index(self) -> int:
        return self.n_points // 2

    def index_of(self, x: float) -> int:
        """Index of the bin containing position ``x``."""
        k = int(np.floor((x + self.half_range) / self.spacing))
        if not 0 <= k < self.n_points:
            raise ValueError(f"position {x} lies outside the grid")
        return k

    def padded(self, factor: int) -> "Grid":
        """Grid with the same spacing covering ``factor`` times the range."""
        if factor < 1 or int(factor) != factor:
            raise ValueError("guard factor must be a positive integer")
        return Grid(self.n_points * int(factor), self.half_range * int(factor))


def _as_amplitudes(grid: Grid, amplitudes) -> np.ndarray:
    arr = np.array(amplitudes, dtype=complex)
    if arr.shape != (grid.n_points,):
        raise ValueError(
            f"expected {grid.n_points} amplitudes, got array of shape {arr.shape}"
        )
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class WaveFunction:
    """Position-space amplitudes psi(x_k) of the probe state."""

    grid: Grid
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _as_amplitudes(self.grid, self.amplitudes))

    @property
    def norm2(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.spacing)

    def __mul__(self, other):
        return WaveFunction(self.grid, self.amplitudes * other)

    __rmul__ = __mul__


@dataclass(frozen=True)
class MomentumWaveFunction:
    """Amplitudes phi(p_j) on the conjugate momentum grid of ``grid``."""

    grid: Grid
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _as_amplitudes(self.grid, self.amplitudes))

    @property
    def p(self) -> np.ndarray:
        return self.grid.p

    @property
    def norm2(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.p_spacing)

    def at_zero(self) -> complex:
        return complex(self.amplitudes[self.grid.zero_momentum_index])


@dataclass(frozen=True)
class JointState:
    """Probe field resolved into pointer |0> and |1> components."""

    grid: Grid
    amp0: np.ndarray = field(repr=False)
    amp1: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "amp0", _as_amplitudes(self.grid, self.amp0))
        object.__setattr__(self, "amp1", _as_amplitudes(self.grid, self.amp1))

    @classmethod
    def from_wavefunction(cls, psi: WaveFunction) -> "JointState":
        """Product state psi(x)|0>."""
        return cls(psi.grid, psi.amplitudes, np.zeros(psi.grid.n_points))

    @property
    def norm2(self) -> float:
        total = np.sum(np.abs(self.amp0) ** 2 + np.abs(self.amp1) ** 2)
        return float(total * self.grid.spacing)

    @property
    def norm2_signal(self) -> float:
        return float(np.sum(np.abs(self.amp1) ** 2) * self.grid.spacing)

    def embed(self, factor: int) -> "JointState":
        """Zero-pad onto a grid ``factor`` times wider (same spacing)."""
        big = self.grid.padded(factor)
        start = (big.n_points - self.grid.n_points) // 2
        a0 = np.zeros(big.n_points, complex)
        a1 = np.zeros(big.n_points, complex)
        a0[start:start + self.grid.n_points] = self.amp0
        a1[start:start + self.grid.n_points] = self.amp1
        return JointState(big, a0, a1)

    def crop(self, grid: Grid) -> "JointState":
        """Inverse of :meth:`embed` for a grid with the same spacing."""
        if not np.isclose(grid.spacing, self.grid.spacing):
            raise ValueError("crop target must share the grid spacing")
        start = (self.grid.n_points - grid.n_points) // 2
        sl = slice(start, start + grid.n_points)
        return JointState(grid, self.amp0[sl], self.amp1[sl])


def make_grid(n_points: int, half_range: float = 1.0) -> Grid:
    return Grid(n_points, half_range)


def normalize(psi: WaveFunction) -> WaveFunction:
    """Rescale so that sum |psi|^2 dx = 1."""
    n2 = psi.norm2
    if n2 == 0.0:
        raise ValueError("cannot normalize an all-zero wave function")
    return WaveFunction(psi.grid, psi.amplitudes / np.sqrt(n2))


def overlap(psi1: WaveFunction, psi2: WaveFunction) -> complex:
    """<psi1|psi2> = sum conj(psi1) psi2 dx."""
    if psi1.grid != psi2.grid:
        raise ValueError(f"grid mismatch: {psi1.grid} vs {psi2.grid}")
    return complex(np.vdot(psi1.amplitudes, psi2.amplitudes) * psi1.grid.spacing)


def _phase_ramp(grid: Grid) -> np.ndarray:
    # exp(-i p_j x_0); x_0 is the first bin centre
    return np.exp(-1j * grid.p * grid.x[0])


def to_momentum(psi: WaveFunction) -> MomentumWaveFunction:
    """phi(p_j) = sum_k psi(x_k) exp(-i p_j x_k) dx / sqrt(2 pi)."""
    g = psi.grid
    spectrum = np.roll(np.fft.fft(psi.amplitudes), g.n_points // 2)
    phi = spectrum * _phase_ramp(g) * g.spacing / SQRT_2PI
    return MomentumWaveFunction(g, phi)


def from_momentum(phi: MomentumWaveFunction) -> WaveFunction:
    """Inverse of :func:`to_momentum`."""
    g = phi.grid
    spectrum = phi.amplitudes / _phase_ramp(g) * SQRT_2PI / g.spacing
    psi = np.fft.ifft(np.roll(spectrum, -(g.n_points // 2)))
    return WaveFunction(g, psi)


def momentum_amplitude(grid: Grid, amplitudes, p) -> np.ndarray:
    """Band-limited momentum amplitude at arbitrary momenta ``p``.

    Same convention as :func:`to_momentum`, evaluated off the conjugate grid.
    """
    p = np.atleast_1d(np.asarray(p, dtype=float))
    kernel = np.exp(-1j * np.outer(p, grid.x))
    return kernel @ np.asarray(amplitudes, complex) * grid.spacing / SQRT_2PI


def gaussian_source(a: float, grid: Grid, t: float = 0.0, mass: float = 1.0) -> WaveFunction:
    """Normalized Gaussian packet after free evolution for time ``t``.

    psi(x) = [a / (a + i t/m)]^(3/2) exp(-x^2 / (2 (a + i t/m))), sampled on
    ``grid`` and renormalized there. The 3/2 power only contributes a global
    factor and is kept as written.
    """
    if not a > 0:
        raise ValueError(f"waist a must be positive, got {a}")
    if t < 0:
        raise ValueError(f"propagation time must be non-negative, got {t}")
    width = a + 1j * t / mass
    amps = (a / width) ** 1.5 * np.exp(-grid.x**2 / (2.0 * width))
    return normalize(WaveFunction(grid, amps))
