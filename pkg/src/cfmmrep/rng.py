"""Seeded random numbers for reproducible simulations.

Uniforms come from SplitMix64 (Steele, Lea & Flood's 64-bit mixing
generator), which is fully specified by integer arithmetic and therefore
produces identical streams on every platform.  Normals are drawn by
inverse-CDF so the whole pipeline is one uniform per variate.
"""

from .normal import norm_inv

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """64-bit counter-based generator; one multiply-xor-shift mix per draw."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_uint64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        # 53-bit mantissa, offset half a step: lands strictly inside (0, 1).
        return ((self.next_uint64() >> 11) + 0.5) * 2.0 ** -53

    def normal(self) -> float:
        return norm_inv(self.uniform())
