"""Pointer coupling, momentum post-selection and the direct-measurement readout.

The pointer is a qubit (photon polarization). The coupling at bin x is
U = 1 - 2 sin^2(theta/2) |x><x| - sin(theta) |x><x| (i sigma_y), which sends
psi(x)|x>|0> to cos(theta) psi(x)|x>|0> - sin(theta) psi(x)|x>|1>.

Pointer amplitudes are expressed for unit-norm discrete states: psi(x) here
means the amplitude of the unit vector |x_k>, i.e. psi(x_k) * sqrt(dx).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import integrate

from .wavefield import SQRT_2PI, JointState

__all__ = [
    "STRONG",
    "PointerState",
    "PointerProbs",
    "BetaModel",
    "StandardScheme",
    "ModifiedScheme",
    "check_theta",
    "correction_coefficient",
    "apply_coupling",
    "postselect_momentum",
    "window_overlaps",
    "pointer_probabilities",
    "integrated_pointer_probabilities",
    "reconstruct_strong",
    "reconstruct_weak",
    "beta_value",
    "binned_beta",
    "magnification",
    "delta_p_from_slit",
]

STRONG = np.pi / 2


def check_theta(theta: float) -> float:
    theta = float(theta)
    if not 0.0 <= theta <= STRONG + 1e-15:
        raise ValueError(f"coupling angle must lie in [0, pi/2], got {theta}")
    return theta


@dataclass(frozen=True)
class PointerState:
    """Unnormalized post-selected pointer vector a0|0> + a1|1>."""

    a0: complex
    a1: complex

    @property
    def norm2(self) -> float:
        return abs(self.a0) ** 2 + abs(self.a1) ** 2


@dataclass(frozen=True)
class PointerProbs:
    """Joint probabilities of post-selection and each pointer projection."""

    p_plus: float
    p_minus: float
    p_l: float
    p_r: float
    p_one: float

    @property
    def total(self) -> float:
        return self.p_plus + self.p_minus

    def interference(self) -> complex:
        """(1/2)[(P+ - P-) - i(PL - PR)], equal to conj(a0) a1."""
        return 0.5 * ((self.p_plus - self.p_minus) - 1j * (self.p_l - self.p_r))


@dataclass(frozen=True)
class BetaModel:
    """Overlap beta = <p|x> between post-selected state and measured bin.

    ``mode`` is one of ``point``, ``momentum_window``, ``double_window`` or
    ``mub``. ``delta_p`` is the momentum half-width in internal units (1/L),
    ``delta_x`` the position half-width in units of L.
    """

    mode: str = "momentum_window"
    delta_p: float = 0.0
    delta_x: float = 0.0
    p: float = 0.0
    d: Optional[int] = None

    def __post_init__(self):
        if self.mode not in ("point", "momentum_window", "double_window", "mub"):
            raise ValueError(f"unknown beta mode {self.mode!r}")
        if self.delta_p < 0 or self.delta_x < 0:
            raise ValueError("window half-widths must be non-negative")
        if self.mode == "mub" and (self.d is None or self.d < 1):
            raise ValueError(f"mub mode needs dimension d >= 1, got {self.d}")
        if self.mode == "double_window" and self.delta_x == 0:
            raise ValueError("double_window mode needs delta_x > 0")


@dataclass(frozen=True)
class StandardScheme:
    """Readout settings for the standard post-selection scheme.

    ``p_one_reading`` selects how the |1> projection enters the correction:
    ``postselected`` uses P1 measured after post-selection with the exact
    weight tan(theta/2); ``unconditioned`` uses the printed weight
    2|beta|^2 sin^2(theta/2) sin(theta) applied to the bin probability
    |psi(x)|^2 measured without post-selection.
    """

    theta: float = STRONG
    beta: complex = 1.0
    p_one_reading: str = "postselected"

    def __post_init__(self):
        check_theta(self.theta)
        if self.p_one_reading not in ("postselected", "unconditioned"):
            raise ValueError(f"unknown P1 reading {self.p_one_reading!r}")


@dataclass(frozen=True)
class ModifiedScheme:
    """Readout settings for the LCP-modified scheme (strong coupling by default)."""

    beta: complex
    theta: float = STRONG

    def __post_init__(self):
        check_theta(self.theta)


Scheme = Union[StandardScheme, ModifiedScheme]


def apply_coupling(joint: JointState, x_bin: int, theta: float) -> JointState:
    """Rotate the pointer inside bin ``x_bin``; other bins are untouched."""
    theta = check_theta(theta)
    n = joint.grid.n_points
    if not 0 <= x_bin < n:
        raise IndexError(f"bin {x_bin} outside 0..{n - 1}")
    c, s = np.cos(theta), np.sin(theta)
    amp0 = joint.amp0.copy()
    amp1 = joint.amp1.copy()
    u0, u1 = amp0[x_bin], amp1[x_bin]
    amp0[x_bin] = c * u0 + s * u1
    amp1[x_bin] = -s * u0 + c * u1
    return JointState(joint.grid, amp0, amp1)


def window_overlaps(grid, p_window: float) -> np.ndarray:
    """<P|x_k> for every bin, with |P> the unit-norm momentum window state.

    ``p_window == 0`` selects the single p = 0 sample of the conjugate grid,
    for which the overlaps are exactly 1/sqrt(n).
    """
    if p_window < 0:
        raise ValueError("momentum window must be non-negative")
    if p_window == 0:
        return np.full(grid.n_points, 1.0 / np.sqrt(grid.n_points), dtype=complex)
    # (1/sqrt(2 dp)) int_{-dp}^{dp} e^{ipx}/sqrt(2pi) dp, times sqrt(dx) for |x_k>
    integral = 2.0 * p_window * np.sinc(p_window * grid.x / np.pi) / SQRT_2PI
    return (integral * np.sqrt(grid.spacing) / np.sqrt(2.0 * p_window)).astype(complex)


def postselect_momentum(joint: JointState, p_window: float = 0.0) -> tuple[PointerState, float]:
    """Project the probe onto the (unit-norm) momentum window around p = 0."""
    norm2 = joint.norm2
    if norm2 == 0.0:
        raise ValueError("cannot post-select a zero-norm state")
    bra = window_overlaps(joint.grid, p_window)
    # amplitude of the unit vector |x_k> is amp_k sqrt(dx)
    root = np.sqrt(joint.grid.spacing)
    a0 = complex(np.vdot(bra, joint.amp0 * root))
    a1 = complex(np.vdot(bra, joint.amp1 * root))
    state = PointerState(a0, a1)
    return state, state.norm2 / norm2


def pointer_probabilities(f: PointerState) -> PointerProbs:
    """Probabilities of projecting f on |+-> = (|1> +- |0>)/sqrt2, |L,R> = (|1> +- i|0>)/sqrt2 and |1>."""
    a0, a1 = f.a0, f.a1
    return PointerProbs(
        p_plus=abs(a1 + a0) ** 2 / 2,
        p_minus=abs(a1 - a0) ** 2 / 2,
        p_l=abs(a1 - 1j * a0) ** 2 / 2,
        p_r=abs(a1 + 1j * a0) ** 2 / 2,
        p_one=abs(a1) ** 2,
    )


def integrated_pointer_probabilities(amp0, amp1, weight: float) -> PointerProbs:
    """Bucket-detector probabilities for a pointer field resolved over many modes.

    Sums the single-mode probabilities over samples, each weighted by ``weight``
    (the sample width).
    """
    amp0 = np.asarray(amp0, complex)
    amp1 = np.asarray(amp1, complex)
    return PointerProbs(
        p_plus=float(np.sum(np.abs(amp1 + amp0) ** 2) * weight / 2),
        p_minus=float(np.sum(np.abs(amp1 - amp0) ** 2) * weight / 2),
        p_l=float(np.sum(np.abs(amp1 - 1j * amp0) ** 2) * weight / 2),
        p_r=float(np.sum(np.abs(amp1 + 1j * amp0) ** 2) * weight / 2),
        p_one=float(np.sum(np.abs(amp1) ** 2) * weight),
    )


def correction_coefficient(scheme: Scheme) -> complex:
    """Weight c of the post-selected P1 term that makes the readout exact."""
    t = np.tan(scheme.theta / 2)
    if isinstance(scheme, ModifiedScheme):
        return t * np.conj(scheme.beta)
    return t


def reconstruct_strong(probs: PointerProbs, scheme: Scheme,
                       p_one_unconditioned: Optional[float] = None) -> complex:
    """Direct-measurement readout k(x) from pointer probabilities.

    Standard scheme: k = -beta sin(theta) conj(phi_p) psi(x).
    Modified scheme: k = -conj(phi(0)) psi(x) (times sin(theta) off the strong point).
    """
    if scheme.theta >= np.pi:
        raise ValueError("tan(theta/2) is singular at theta = pi")
    signal = probs.interference()
    if isinstance(scheme, StandardScheme) and scheme.p_one_reading == "unconditioned":
        if p_one_unconditioned is None:
            raise ValueError("unconditioned P1 reading needs p_one_unconditioned")
        s2 = np.sin(scheme.theta / 2) ** 2
        weight = 2 * abs(scheme.beta) ** 2 * s2 * np.sin(scheme.theta)
        return complex(signal - weight * p_one_unconditioned)
    return complex(signal - correction_coefficient(scheme) * probs.p_one)


def reconstruct_weak(probs: PointerProbs, theta: float, beta: complex, phi_p: complex) -> complex:
    """Weak-coupling estimate of psi(x): the interference term over -beta sin(theta) conj(phi_p)."""
    theta = check_theta(theta)
    if theta == 0:
        raise ValueError("weak readout is undefined at theta = 0")
    denom = -beta * np.sin(theta) * np.conj(phi_p)
    if denom == 0:
        raise ValueError("beta and phi_p must be non-zero")
    return complex(probs.interference() / denom)


def _window_beta(x, delta_p):
    # int_{-dp}^{dp} e^{ipx}/sqrt(2pi) dp
    return 2.0 * delta_p * np.sinc(delta_p * np.asarray(x, float) / np.pi) / SQRT_2PI


def _double_window_beta(x: float, delta_x: float, delta_p: float) -> float:
    val, _ = integrate.quad(_window_beta, x - delta_x, x + delta_x,
                            args=(delta_p,), epsabs=1e-12, epsrel=1e-12, limit=200)
    return val


def beta_value(model: BetaModel, x):
    """Evaluate beta at position(s) ``x`` (units of L)."""
    x_arr = np.asarray(x, dtype=float)
    if model.mode == "point":
        out = np.exp(1j * model.p * x_arr) / SQRT_2PI
    elif model.mode == "momentum_window":
        out = _window_beta(x_arr, model.delta_p).astype(complex)
    elif model.mode == "double_window":
        flat = [_double_window_beta(xi, model.delta_x, model.delta_p) for xi in x_arr.ravel()]
        out = np.asarray(flat, dtype=complex).reshape(x_arr.shape)
    else:
        out = np.full(x_arr.shape, 1.0 / np.sqrt(model.d), dtype=complex)
    return complex(out) if out.ndim == 0 else out


def binned_beta(x, delta_x: float, delta_p: float):
    """Overlap of the unit-norm bin state (half-width delta_x) with the unit-norm
    momentum window state (half-width delta_p). |binned_beta|^2 is the
    probability that light filling the bin passes the momentum window coherently."""
    model = BetaModel("double_window", delta_p=delta_p, delta_x=delta_x)
    return beta_value(model, x) / np.sqrt(4.0 * delta_x * delta_p)


def magnification(beta: complex) -> float:
    if beta == 0:
        raise ZeroDivisionError("magnification undefined for beta = 0")
    return 1.0 / abs(beta)


def delta_p_from_slit(l_slit: float, f: float, wavelength: float,
                      half_range: Optional[float] = None) -> float:
    """Momentum half-width pi * l_slit / (f * lambda) selected by a focal-plane slit.

    Lengths share one unit. With ``half_range`` the result is returned in the
    internal units 1/L; divide by pi for multiples of pi/L.
    """
    for name, val in (("l_slit", l_slit), ("f", f), ("wavelength", wavelength)):
        if not val > 0:
            raise ValueError(f"{name} must be positive, got {val}")
    dp = np.pi * l_slit / (f * wavelength)
    if half_range is not None:
        if not half_range > 0:
            raise ValueError("half_range must be positive")
        dp *= half_range
    return float(dp)
