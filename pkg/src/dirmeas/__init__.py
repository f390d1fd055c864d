"""Simulation of direct wave-function measurement with a qubit pointer.

Covers the standard momentum post-selection scheme and the variant with a
polarization-selective lens (LCP) that maps the signal onto zero momentum.
"""

from .wavefield import (
    Grid,
    JointState,
    MomentumWaveFunction,
    WaveFunction,
    from_momentum,
    gaussian_source,
    make_grid,
    normalize,
    overlap,
    to_momentum,
)

__version__ = "0.1.0"
