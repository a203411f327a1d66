"""Deterministic random sampling for verification suites.

A splitmix64 sequence: starting from a 64-bit seed, each draw advances the
state by the odd constant 0x9E3779B97F4A7C15 and scrambles it with two
xor-shift multiplies.  Doubles take the top 53 bits of a draw.  The sequence
is fully specified here so suites can be reproduced by any implementation
from the seed alone.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Uniform double in [lo, hi) from the top 53 bits of one draw."""
        u = self.next_u64() >> 11
        return lo + (hi - lo) * (u * (1.0 / (1 << 53)))

    def complex_in_box(self, re_lo, re_hi, im_lo, im_hi) -> complex:
        re = self.uniform(re_lo, re_hi)
        im = self.uniform(im_lo, im_hi)
        return complex(re, im)

    def tau(self, im_lo: float = 0.7, im_hi: float = 1.5) -> complex:
        """A generic torus modulus with bounded real part."""
        return self.complex_in_box(-0.4, 0.4, im_lo, im_hi)

    def cell_point(self, tau: complex, margin: float = 0.15) -> complex:
        """A point a + b*tau with lattice coordinates in [margin, 1-margin]."""
        a = self.uniform(margin, 1.0 - margin)
        b = self.uniform(margin, 1.0 - margin)
        return a + b * tau
