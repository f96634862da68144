"""Deterministic 64-bit PRNG used for every seeded operation in this package.

The generator is SplitMix64.  Its entire definition fits in two update
equations on 64-bit unsigned integers (all arithmetic mod 2**64):

    state   <- state + 0x9E3779B97F4A7C15
    z       <- state
    z       <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9
    z       <- (z XOR (z >> 27)) * 0x94D049BB133111EB
    output  <- z XOR (z >> 31)

Because the state sequence is an arithmetic progression, a block of n
outputs can be produced in one vectorized pass, which is what the bulk
sampling methods below do.  Floating-point derivations (uniform doubles,
Box-Muller normals) are fixed formulas on those integers, so a seed pins
every downstream draw.
"""

from __future__ import annotations

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = 0xFFFFFFFFFFFFFFFF


def splitmix64_mix(z: int) -> int:
    """Output function of SplitMix64 applied to a single 64-bit value."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def _mix_array(states: np.ndarray) -> np.ndarray:
    z = states.astype(np.uint64, copy=True)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """Seeded SplitMix64 stream with scalar and vectorized draws."""

    def __init__(self, seed: int):
        self._seed = seed & _MASK
        self._state = self._seed

    @property
    def state(self) -> int:
        return self._state

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & _MASK
        return splitmix64_mix(self._state)

    def u64(self, n: int) -> np.ndarray:
        """n raw outputs as uint64, advancing the stream by n."""
        steps = np.arange(1, n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            states = np.uint64(self._state) + np.uint64(GOLDEN) * steps
            out = _mix_array(states)
        self._state = (self._state + n * GOLDEN) & _MASK
        return out

    def uniform(self, n: int | None = None) -> np.ndarray | float:
        """Uniform doubles in [0, 1), using the top 53 bits of each output."""
        if n is None:
            return (self.next_u64() >> 11) * 2.0**-53
        return (self.u64(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def normal(self, n: int | None = None) -> np.ndarray | float:
        """Standard normals via Box-Muller on consecutive uniform pairs."""
        m = 1 if n is None else n
        pairs = (m + 1) // 2
        u = self.uniform(2 * pairs)
        u1 = np.maximum(u[0::2], 2.0**-53)  # avoid log(0)
        u2 = u[1::2]
        r = np.sqrt(-2.0 * np.log(u1))
        out = np.empty(2 * pairs)
        out[0::2] = r * np.cos(2.0 * np.pi * u2)
        out[1::2] = r * np.sin(2.0 * np.pi * u2)
        if n is None:
            return float(out[0])
        return out[:n]

    def lognormal(self, median: float, sigma_log: float, n: int | None = None):
        return median * np.exp(sigma_log * self.normal(n))

    def integers(self, bound: int, n: int | None = None):
        """Integers in [0, bound) by modulo reduction (bound << 2**64)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        if n is None:
            return self.next_u64() % bound
        return (self.u64(n) % np.uint64(bound)).astype(np.int64)

    def shuffle(self, items: np.ndarray) -> None:
        """In-place Fisher-Yates shuffle driven by bounded integer draws."""
        for i in range(len(items) - 1, 0, -1):
            j = self.integers(i + 1)
            items[i], items[j] = items[j], items[i]

    def permutation(self, n: int) -> np.ndarray:
        idx = np.arange(n)
        self.shuffle(idx)
        return idx

    def spawn(self, stream_id: int) -> "SplitMix64":
        """Independent child stream; the derivation is two mix rounds of
        (seed + (stream_id+1)*GOLDEN), so children are reproducible from the
        parent seed alone and never depend on draw order."""
        base = (self._seed + (stream_id + 1) * GOLDEN) & _MASK
        return SplitMix64(splitmix64_mix(splitmix64_mix(base)))

    def __repr__(self) -> str:
        return f"SplitMix64(state={self._state:#018x})"
