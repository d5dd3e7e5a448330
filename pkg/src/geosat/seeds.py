"""Deterministic random number generation with cross-machine reproducible streams.

The generator is SplitMix64 (Steele, Lea & Flood; the java.util.SplittableRandom
finalizer) used in counter mode: output i of a stream seeded with s is
mix64(s + (i+1) * GOLDEN_GAMMA), all in 64-bit wrapping arithmetic.  Counter
mode makes batched draws trivially vectorizable with numpy uint64 ops while
producing the exact same sequence as the scalar reference, on any platform.

Draw conventions (fixed; instance reproducibility depends on them):
  * floats are uniform on [0, 1) from the top 53 bits: (x >> 11) * 2**-53
  * bounded integers in [0, b) use mask-and-reject on the low bits; counter
    values are consumed in stream order, rejected values are skipped, and
    the cursor is left just past the last accepted value
"""

from __future__ import annotations

import numpy as np

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MASK64 = 0xFFFFFFFFFFFFFFFF
_INV_2_53 = 2.0 ** -53


def mix64(x: int) -> int:
    """SplitMix64 finalizer: a 64-bit bijection with strong avalanche."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_instance_seed(master_seed: int, instance_index: int) -> int:
    """Derive the seed of one instance in a batch from the batch master seed.

    This is output number ``instance_index`` of a SplitMix64 stream seeded
    with ``master_seed``.  For a fixed master seed the map is injective in
    the index, and for a fixed index it is injective in the master seed
    (both arguments enter through 64-bit bijections).
    """
    return mix64((master_seed + (instance_index + 1) * GOLDEN_GAMMA) & _MASK64)


def _mix64_vec(x: np.ndarray) -> np.ndarray:
    # numpy uint64 arithmetic wraps, matching the scalar reference exactly
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


class SeedStream:
    """A seeded stream of SplitMix64 outputs with vectorized batch draws.

    All draws advance a single cursor into the counter sequence, so the
    values obtained depend only on the seed and the sequence of draw calls,
    never on batch sizes or platform.
    """

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self._pos = 0

    def _raw(self, count: int) -> np.ndarray:
        """Next `count` raw uint64 outputs."""
        idx = np.arange(self._pos + 1, self._pos + count + 1, dtype=np.uint64)
        self._pos += count
        with np.errstate(over="ignore"):
            return _mix64_vec(np.uint64(self.seed) + idx * np.uint64(GOLDEN_GAMMA))

    def floats(self, count: int) -> np.ndarray:
        """Uniform floats on [0, 1), 53-bit resolution."""
        return (self._raw(count) >> np.uint64(11)).astype(np.float64) * _INV_2_53

    def bits(self, count: int) -> np.ndarray:
        """Uniform bits as a uint8 array of 0/1."""
        return (self._raw(count) & np.uint64(1)).astype(np.uint8)

    def integers(self, bound: int, count: int) -> np.ndarray:
        """Uniform integers in [0, bound) as int64, via mask-and-reject."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        if bound == 1:
            return np.zeros(count, dtype=np.int64)
        mask = np.uint64((1 << (bound - 1).bit_length()) - 1)
        out = np.empty(count, dtype=np.int64)
        filled = 0
        while filled < count:
            need = count - filled
            # oversample to keep the expected number of refill rounds tiny
            chunk = self._raw(need + (need >> 2) + 8)
            vals = (chunk & mask).astype(np.int64)
            good = vals < bound
            accepted = vals[good]
            if len(accepted) >= need:
                # rewind the cursor past exactly the `need`-th accepted value
                kth = int(np.nonzero(good)[0][need - 1])
                self._pos -= len(chunk) - (kth + 1)
                out[filled:] = accepted[:need]
                filled = count
            else:
                out[filled : filled + len(accepted)] = accepted
                filled += len(accepted)
        return out

