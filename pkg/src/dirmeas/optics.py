"""Polarization-resolved paraxial Fourier optics for the two measurement set-ups.

Lengths are in units of the measuring half-range L (use
:meth:`OpticalConfig.from_physical` to convert from SI). The field of each
pointer component is a :class:`~dirmeas.wavefield.JointState` sampled on a
bin-centred grid; the focal plane behind the FT-lens is sampled on its own,
much finer, grid so that a narrow slit can be resolved.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .coupling import (
    STRONG,
    ModifiedScheme,
    PointerProbs,
    StandardScheme,
    apply_coupling,
    check_theta,
    integrated_pointer_probabilities,
    reconstruct_strong,
)
from .wavefield import Grid, JointState, WaveFunction, normalize

__all__ = [
    "SamplingError",
    "OpticalConfig",
    "MeasurementRecord",
    "fresnel_propagate",
    "apply_lens_phase",
    "apply_lcp",
    "apply_hwp_sliver",
    "apply_slit",
    "focal_grid",
    "run_standard_scheme",
    "run_modified_scheme",
]


class SamplingError(ValueError):
    """The grid cannot represent the requested propagation without aliasing."""


@dataclass(frozen=True)
class OpticalConfig:
    """Geometry of the set-up in units of L.

    ``lcp_center`` of None makes the LCP follow the sliver, as the modified
    scheme requires. ``lcp_focal_length`` of None uses ``focal_length``.
    ``guard`` is the zero-padding factor of the propagation window.
    """

    wavelength: float
    focal_length: float
    slit_width: float
    theta: float = STRONG
    sliver_bin: Optional[int] = None
    lcp_center: Optional[float] = None
    lcp_focal_length: Optional[float] = None
    guard: int = 2
    focal_samples: int = 256
    focal_half_width: Optional[float] = None

    def __post_init__(self):
        for name in ("wavelength", "focal_length", "slit_width"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        check_theta(self.theta)
        if self.lcp_focal_length is not None and not self.lcp_focal_length > 0:
            raise ValueError("lcp_focal_length must be positive")
        if int(self.guard) != self.guard or self.guard < 1:
            raise ValueError("guard must be a positive integer")
        if self.focal_samples < 2:
            raise ValueError("focal_samples must be >= 2")

    @classmethod
    def from_physical(cls, half_range: float, wavelength: float, focal_length: float,
                      slit_width: float, **kwargs) -> "OpticalConfig":
        """Build from lengths in any common unit (e.g. metres); L = half_range."""
        return cls(wavelength=wavelength / half_range,
                   focal_length=focal_length / half_range,
                   slit_width=slit_width / half_range, **kwargs)

    @classmethod
    def reference_setup(cls, **kwargs) -> "OpticalConfig":
        """L = 30 mm, f = 1000 mm, slit 15 um, lambda = 800 nm."""
        return cls.from_physical(30e-3, 800e-9, 1.0, 15e-6, **kwargs)

    @property
    def wavenumber(self) -> float:
        return 2.0 * np.pi / self.wavelength

    @property
    def effective_mass(self) -> float:
        """m c / hbar of the paraxial photon, 2 pi / lambda in internal units."""
        return self.wavenumber

    @property
    def delta_p(self) -> float:
        """Momentum half-width passed by the slit, pi l / (lambda f)."""
        return np.pi * self.slit_width / (self.wavelength * self.focal_length)

    @property
    def lcp_f(self) -> float:
        return self.focal_length if self.lcp_focal_length is None else self.lcp_focal_length


@dataclass
class MeasurementRecord:
    """Per-bin outcome of one simulated scan of the sliver across the grid."""

    scheme: str
    grid: Grid
    bins: np.ndarray
    psi_true: np.ndarray
    readout: np.ndarray
    probs: list
    success_prob: np.ndarray
    signal_transmission: np.ndarray
    beta_eff: np.ndarray
    config: dict = field(default_factory=dict)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x[self.bins]

    def psi_hat(self) -> WaveFunction:
        """Normalized reconstruction on the full grid (unscanned bins are zero)."""
        amps = np.zeros(self.grid.n_points, complex)
        amps[self.bins] = self.readout / np.sqrt(self.grid.spacing)
        return normalize(WaveFunction(self.grid, amps))


def _check_tf_sampling(grid: Grid, z: float, wavelength: float):
    # transfer-function chirp: phase step at the band edge is pi*lambda*|z|/(N dx^2)
    limit = grid.n_points * grid.spacing**2
    if wavelength * abs(z) > limit * (1 + 1e-9):
        max_n = int((2 * grid.half_range) ** 2 / (wavelength * abs(z)))
        raise SamplingError(
            f"propagation over z={z:g} aliases on a {grid.n_points}-point window of "
            f"width {2 * grid.half_range:g}: the transfer-function chirp needs "
            f"n_points <= {max_n} on this window (or a wider guard band)"
        )


def _tf_step(joint: JointState, z: float, wavelength: float) -> JointState:
    g = joint.grid
    _check_tf_sampling(g, z, wavelength)
    p = 2 * np.pi * np.fft.fftfreq(g.n_points, d=g.spacing)
    h = np.exp(-1j * p**2 * z * wavelength / (4 * np.pi))
    return JointState(g,
                      np.fft.ifft(np.fft.fft(joint.amp0) * h),
                      np.fft.ifft(np.fft.fft(joint.amp1) * h))


def _direct_step(joint: JointState, z: float, wavelength: float, out: Grid) -> JointState:
    g = joint.grid
    # band-limited input reaches at most lambda z / (2 dx) off axis
    reach = wavelength * abs(z) / (2 * g.spacing)
    if out.half_range > reach:
        raise SamplingError(
            f"output window +-{out.half_range:g} exceeds the band-limited reach "
            f"{reach:g} of the input sampling"
        )
    kernel = _fresnel_kernel(g, out, z, wavelength)
    return JointState(out, kernel @ joint.amp0, kernel @ joint.amp1)


@lru_cache(maxsize=16)
def _fresnel_kernel(g: Grid, out: Grid, z: float, wavelength: float) -> np.ndarray:
    kernel = np.exp(1j * np.pi * (out.x[:, None] - g.x[None, :]) ** 2 / (wavelength * z))
    kernel *= np.exp(-1j * np.pi / 4 * np.sign(z)) / np.sqrt(wavelength * abs(z)) * g.spacing
    kernel.setflags(write=False)
    return kernel


def fresnel_propagate(field: JointState, z: float, config: OpticalConfig,
                      guard: Optional[int] = None, out_grid: Optional[Grid] = None) -> JointState:
    """Paraxial free-space propagation of both pointer components over ``z``.

    Without ``out_grid`` the transfer-function method is used on a window
    zero-padded by ``guard`` (default ``config.guard``) and cropped back.
    With ``out_grid`` the Fresnel integral is summed directly onto that grid,
    which is how the narrow focal plane is reached.
    """
    if z == 0:
        return field
    if out_grid is not None:
        return _direct_step(field, z, config.wavelength, out_grid)
    guard = config.guard if guard is None else guard
    if guard == 1:
        return _tf_step(field, z, config.wavelength)
    wide = _tf_step(field.embed(guard), z, config.wavelength)
    return wide.crop(field.grid)


def _chirp(grid: Grid, f: float, center: float, wavelength: float) -> np.ndarray:
    return np.exp(-1j * np.pi * (grid.x - center) ** 2 / (wavelength * f))


def apply_lens_phase(field: JointState, f: float, center: float, config: OpticalConfig) -> JointState:
    """Thin FT-lens: both components pick up exp(-i pi (x-c)^2 / (lambda f))."""
    u = _chirp(field.grid, f, center, config.wavelength)
    return JointState(field.grid, field.amp0 * u, field.amp1 * u)


def apply_lcp(field: JointState, f: float, center: float, config: OpticalConfig) -> JointState:
    """Liquid-crystal plate: a lens acting on the |1> component only."""
    u = _chirp(field.grid, f, center, config.wavelength)
    return JointState(field.grid, field.amp0, field.amp1 * u)


def apply_hwp_sliver(field: JointState, bin: int, theta: float) -> JointState:
    return apply_coupling(field, bin, theta)


def apply_slit(field: JointState, l_slit: float) -> tuple[JointState, float]:
    """Top-hat aperture |x| <= l_slit/2; returns the field and transmitted fraction."""
    if not l_slit > 0:
        raise ValueError("slit width must be positive")
    if l_slit < field.grid.spacing:
        raise SamplingError(
            f"slit of width {l_slit:g} is narrower than the grid spacing "
            f"{field.grid.spacing:g}; use a finer grid"
        )
    mask = np.abs(field.grid.x) <= l_slit / 2
    out = JointState(field.grid, field.amp0 * mask, field.amp1 * mask)
    before = field.norm2
    return out, (out.norm2 / before if before > 0 else 0.0)


def focal_grid(config: OpticalConfig) -> Grid:
    """Sampling grid of the focal plane, centred on the slit."""
    half = config.focal_half_width
    if half is None:
        half = config.slit_width
    return Grid(config.focal_samples, half)


def _lift(psi: WaveFunction) -> JointState:
    return JointState.from_wavefunction(psi)


def _standard_optics(field: JointState, config: OpticalConfig, fgrid: Grid) -> JointState:
    f = config.focal_length
    field = fresnel_propagate(field, f, config, guard=1)
    field = apply_lens_phase(field, f, 0.0, config)
    return fresnel_propagate(field, f, config, out_grid=fgrid)


def _modified_optics(field: JointState, center: float, config: OpticalConfig,
                     fgrid: Grid) -> JointState:
    f = config.focal_length
    field = fresnel_propagate(field, f, config, guard=1)
    field = apply_lcp(field, config.lcp_f, center, config)
    field = fresnel_propagate(field, 2 * f, config, guard=1)
    field = apply_lens_phase(field, f, 0.0, config)
    return fresnel_propagate(field, f, config, out_grid=fgrid)


def _scan(psi: WaveFunction, config: OpticalConfig, bins, threads, one_bin):
    grid = psi.grid
    if bins is None:
        bins = range(grid.n_points) if config.sliver_bin is None else [config.sliver_bin]
    bins = np.asarray(list(bins), dtype=int)
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one_bin, bins))
    else:
        results = [one_bin(b) for b in bins]
    return bins, results


def _record(scheme, psi, config, bins, results) -> MeasurementRecord:
    readout, probs, success, trans, beta = zip(*results)
    return MeasurementRecord(
        scheme=scheme,
        grid=psi.grid,
        bins=bins,
        psi_true=psi.amplitudes.copy(),
        readout=np.asarray(readout, complex),
        probs=list(probs),
        success_prob=np.asarray(success, float),
        signal_transmission=np.asarray(trans, float),
        beta_eff=np.asarray(beta, complex),
        config=asdict(config),
    )


def _slit_readout(focal: JointState, config: OpticalConfig, signal_before: float):
    passed, _ = apply_slit(focal, config.slit_width)
    probs = integrated_pointer_probabilities(passed.amp0, passed.amp1, passed.grid.spacing)
    trans = passed.norm2_signal / signal_before if signal_before > 0 else 0.0
    return passed, probs, trans


def run_standard_scheme(psi: WaveFunction, config: OpticalConfig,
                        bins: Optional[Sequence[int]] = None, threads: int = 1) -> MeasurementRecord:
    """Scan the sliver over ``bins``: sliver, f, FT-lens, f, slit, pointer readout."""
    psi = normalize(psi)
    fgrid = focal_grid(config)
    scheme = StandardScheme(theta=config.theta)

    def one_bin(b):
        field = apply_hwp_sliver(_lift(psi), int(b), config.theta)
        before = field.norm2_signal
        focal = _standard_optics(field.embed(config.guard), config, fgrid)
        _, probs, trans = _slit_readout(focal, config, before)
        k = reconstruct_strong(probs, scheme)
        return k, probs, probs.total, trans, np.nan

    bins, results = _scan(psi, config, bins, threads, one_bin)
    return _record("standard", psi, config, bins, results)


def _unit_excitation(grid: Grid, b: int, component: int) -> JointState:
    e = np.zeros(grid.n_points, complex)
    e[b] = 1.0 / np.sqrt(grid.spacing)
    z = np.zeros(grid.n_points, complex)
    return JointState(grid, e, z) if component == 0 else JointState(grid, z, e)


def run_modified_scheme(psi: WaveFunction, config: OpticalConfig,
                        bins: Optional[Sequence[int]] = None, threads: int = 1) -> MeasurementRecord:
    """Scan with the LCP inserted: sliver, f, LCP, 2f, FT-lens, f, slit, readout.

    The readout correction needs beta of this geometry; it is obtained by
    sending a unit excitation of the bin through both polarization channels.
    """
    psi = normalize(psi)
    fgrid = focal_grid(config)
    grid = psi.grid

    def one_bin(b):
        b = int(b)
        center = grid.x[b] if config.lcp_center is None else config.lcp_center
        field = apply_hwp_sliver(_lift(psi), b, config.theta)
        before = field.norm2_signal
        focal = _modified_optics(field.embed(config.guard), center, config, fgrid)
        _, probs, trans = _slit_readout(focal, config, before)

        ref = apply_slit(_modified_optics(_unit_excitation(grid, b, 0).embed(config.guard),
                                          center, config, fgrid), config.slit_width)[0].amp0
        sig = apply_slit(_modified_optics(_unit_excitation(grid, b, 1).embed(config.guard),
                                          center, config, fgrid), config.slit_width)[0].amp1
        ss = np.vdot(sig, sig)
        beta = np.vdot(sig, ref) / ss if ss != 0 else 0.0
        k = reconstruct_strong(probs, ModifiedScheme(beta=beta, theta=config.theta))
        return k, probs, probs.total, trans, beta

    bins, results = _scan(psi, config, bins, threads, one_bin)
    return _record("modified", psi, config, bins, results)
