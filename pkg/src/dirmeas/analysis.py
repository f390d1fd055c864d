"""Parameter sweeps behind the beta profiles, fidelity curves and magnification curves.

Momenta in sweep specs and output rows are multiples of pi/L; positions and
waists are in units of L.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .coupling import BetaModel, beta_value, binned_beta, delta_p_from_slit, magnification
from .wavefield import WaveFunction, gaussian_source, make_grid, normalize, overlap

__all__ = [
    "NORMALIZATIONS",
    "SweepSpec",
    "SetupReport",
    "check_delta_p",
    "fidelity",
    "beta_profile",
    "fidelity_sweep",
    "magnification_sweep",
    "estimate_paper_setup",
]

NORMALIZATIONS = ("none", "unit_sum_over_bins", "unit_norm_windows")


@dataclass(frozen=True)
class SweepSpec:
    """One swept variable plus fixed parameters.

    ``variable`` is ``delta_p``, ``n_points`` or ``waist``; ``values`` must be
    strictly monotone.
    """

    variable: str
    values: tuple
    fixed: dict = field(default_factory=dict)
    normalization: str = "unit_sum_over_bins"

    def __post_init__(self):
        if self.variable not in ("delta_p", "n_points", "waist"):
            raise ValueError(f"unknown sweep variable {self.variable!r}")
        vals = tuple(self.values)
        if not vals:
            raise ValueError("sweep range is empty")
        diffs = np.diff(np.asarray(vals, dtype=float))
        if len(vals) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("sweep range must be strictly monotone")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"unknown normalization {self.normalization!r}")
        object.__setattr__(self, "values", vals)


def fidelity(psi_m: WaveFunction, psi_g: WaveFunction) -> float:
    """|<psi_m|psi_g>|^2 after normalizing both states."""
    f = abs(overlap(normalize(psi_m), normalize(psi_g))) ** 2
    return float(min(f, 1.0))


def check_delta_p(values):
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"delta_p = {v} pi/L outside [0, pi/L]")


def _window_shape(x, delta_p):
    # beta(x) up to the x-independent factor 2 delta_p / sqrt(2 pi)
    return np.sinc(delta_p * np.asarray(x) / np.pi)


def beta_profile(spec: SweepSpec) -> list[tuple[float, float, float]]:
    """Rows (delta_p in pi/L, x in L, |beta(x)|) for each delta_p curve.

    With ``unit_sum_over_bins`` each curve satisfies sum_k |beta(x_k)|^2 = 1;
    with ``none`` the raw window integral is returned.
    """
    if spec.variable != "delta_p":
        raise ValueError("beta_profile sweeps delta_p")
    check_delta_p(spec.values)
    grid = make_grid(int(spec.fixed.get("n_points", 60)), 1.0)
    rows = []
    for dp_pi in spec.values:
        dp = dp_pi * np.pi
        if spec.normalization == "none":
            curve = np.abs(beta_value(BetaModel("momentum_window", delta_p=dp), grid.x))
        elif spec.normalization == "unit_sum_over_bins":
            curve = np.abs(_window_shape(grid.x, dp))
            curve = curve / np.sqrt(np.sum(curve**2))
        else:
            raise ValueError("beta profiles support 'none' or 'unit_sum_over_bins'")
        rows.extend((float(dp_pi), float(x), float(b)) for x, b in zip(grid.x, curve))
    return rows


def fidelity_sweep(spec: SweepSpec) -> list[tuple[float, float, float]]:
    """Rows (delta_p in pi/L, a in L, F) with psi_m = beta(x) psi_G(x).

    The Gaussian is sampled on a dense grid (``n_points``, default 4096) so F
    approximates the continuum overlap over [-L, L].
    """
    if spec.variable != "delta_p":
        raise ValueError("fidelity_sweep sweeps delta_p")
    check_delta_p(spec.values)
    waists = spec.fixed.get("waists", (1.0, 0.75, 0.5))
    t = float(spec.fixed.get("t", 0.0))
    grid = make_grid(int(spec.fixed.get("n_points", 4096)), 1.0)
    rows = []
    for a in waists:
        psi_g = gaussian_source(float(a), grid, t=t)
        for dp_pi in spec.values:
            # the x-independent prefactor of beta drops out after normalization
            beta = _window_shape(grid.x, dp_pi * np.pi)
            psi_m = WaveFunction(grid, beta * psi_g.amplitudes)
            rows.append((float(dp_pi), float(a), fidelity(psi_m, psi_g)))
    return rows


def magnification_sweep(spec: SweepSpec) -> list[tuple[int, float]]:
    """Rows (N, M) over measuring-point counts N with bins tiling [-L, L].

    ``mode`` is ``mub`` (beta = 1/sqrt(N)) or ``double_window`` with bin
    half-width L/N and the fixed ``delta_p`` (pi/L), evaluated at x = 0.
    """
    if spec.variable != "n_points":
        raise ValueError("magnification_sweep sweeps n_points")
    mode = spec.fixed.get("mode", "double_window")
    rows = []
    for n in spec.values:
        n = int(n)
        if n < 1:
            raise ValueError("number of measuring points must be >= 1")
        if mode == "mub":
            beta = beta_value(BetaModel("mub", d=n), 0.0)
        elif mode == "double_window":
            dp = float(spec.fixed.get("delta_p", 0.5625)) * np.pi
            check_delta_p([dp / np.pi])
            dx = 1.0 / n
            if spec.normalization == "unit_norm_windows":
                beta = binned_beta(0.0, dx, dp)
            elif spec.normalization == "none":
                beta = beta_value(BetaModel("double_window", delta_p=dp, delta_x=dx), 0.0)
            else:
                raise ValueError("magnification sweeps support 'none' or 'unit_norm_windows'")
        else:
            raise ValueError(f"unknown magnification mode {mode!r}")
        rows.append((n, magnification(beta)))
    return rows


@dataclass(frozen=True)
class SetupReport:
    delta_x_over_L: float
    delta_p_over_piL: float
    beta_abs: float
    magnification: float
    convention: str
    alternatives: dict


def estimate_paper_setup(half_range: float = 30e-3, step: float = 1e-3,
                         focal_length: float = 1.0, slit_width: float = 15e-6,
                         wavelength: float = 800e-9) -> SetupReport:
    """Post-selection overlap and magnification for a slit/lens geometry.

    ``step`` is the width of one measuring bin. |beta| is the overlap of the
    unit-norm bin state (half-width step/2) with the unit-norm momentum window
    selected by the slit. Other normalizations are listed in ``alternatives``
    for comparison.
    """
    dx_half = step / (2 * half_range)
    dp = delta_p_from_slit(slit_width, focal_length, wavelength, half_range=half_range)
    beta = abs(binned_beta(0.0, dx_half, dp))

    n_bins = int(round(2 * half_range / step))
    grid = make_grid(n_bins, 1.0)
    raw = np.abs(beta_value(BetaModel("double_window", delta_p=dp, delta_x=dx_half), grid.x))
    unit_sum = raw / np.sqrt(np.sum(raw**2))
    alternatives = {
        "unit_norm_windows, half-width = step": float(abs(binned_beta(0.0, 2 * dx_half, dp))),
        "unit_sum_over_bins, centre bin": float(unit_sum.max()),
        "unit_sum_over_bins, rms over bins": float(np.sqrt(np.mean(unit_sum**2))),
        "unnormalized double integral, centre bin": float(raw.max()),
    }
    return SetupReport(
        delta_x_over_L=step / half_range,
        delta_p_over_piL=dp / np.pi,
        beta_abs=float(beta),
        magnification=magnification(beta),
        convention="unit_norm_windows, half-width = step/2",
        alternatives=alternatives,
    )
