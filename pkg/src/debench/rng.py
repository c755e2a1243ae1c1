"""Counter-based random streams.

Every random number used by the optimizer is addressed by
``(seed, generation, individual, purpose, counter)``.  The value is a pure
function of that address, so the trajectory of a run does not depend on the
order in which individuals are processed or on how many workers process them.

The generator is SplitMix64 (Steele, Lea & Flood 2014; the seeding generator of
``java.util.SplittableRandom`` and of the xoshiro family).  Its ``n``-th output
for state ``s`` is ``mix64(s + (n + 1) * GOLDEN)``, which gives random access
into a stream of period 2**64.  Each logical stream gets its own state
``mix64(mix64(seed) ^ stream_id)``.

The same arithmetic is implemented three times: with Python integers
(:func:`splitmix_reference`, the slow reference), with numpy ``uint64`` arrays
(:class:`RngStream`, used by the per-individual operators) and inside compiled
kernels (:mod:`debench.exec.kernels`).  They must agree bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB

# purposes of a per-individual stream within one generation
INIT = 0
INDEX = 1
CROSSOVER = 2
JDE = 3

_INDIVIDUAL_BITS = 24
_PURPOSE_BITS = 4
MAX_INDIVIDUALS = 1 << _INDIVIDUAL_BITS
MAX_GENERATION = 1 << (64 - _INDIVIDUAL_BITS - _PURPOSE_BITS)

_U_GOLDEN = np.uint64(GOLDEN)
_U_MIX1 = np.uint64(MIX1)
_U_MIX2 = np.uint64(MIX2)
_TO_UNIT = 2.0 ** -53


def mix64(z: int) -> int:
    """SplitMix64 finalizer on Python integers."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def stream_id(generation: int, individual: int, purpose: int) -> int:
    """Pack a (generation, individual, purpose) address into one 64-bit id."""
    if not 0 <= individual < MAX_INDIVIDUALS:
        raise ValueError(f"individual index {individual} out of range")
    if not 0 <= generation < MAX_GENERATION:
        raise ValueError(f"generation {generation} out of range")
    if not 0 <= purpose < (1 << _PURPOSE_BITS):
        raise ValueError(f"purpose {purpose} out of range")
    return (((generation << _INDIVIDUAL_BITS) | individual) << _PURPOSE_BITS) | purpose


def stream_key(seed: int, sid: int) -> int:
    return mix64(mix64(seed & MASK64) ^ sid)


def splitmix_reference(seed: int, sid: int, start: int, n: int) -> list[float]:
    """Draws ``start .. start+n-1`` of a stream, one Python int at a time."""
    key = stream_key(seed, sid)
    out = []
    for c in range(start, start + n):
        bits = mix64(key + (c + 1) * GOLDEN)
        out.append((bits >> 11) * _TO_UNIT)
    return out


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _U_MIX1
    z = (z ^ (z >> np.uint64(27))) * _U_MIX2
    return z ^ (z >> np.uint64(31))


@dataclass(frozen=True)
class RngStream:
    """Immutable position in one logical random stream.

    Drawing never mutates the token; it returns the values and the advanced
    token.  Uniform values lie in ``[0, 1)`` with 53 bits of resolution.
    """

    seed: int
    stream_id: int
    counter: int = 0
    _key: np.uint64 = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_key", np.uint64(stream_key(self.seed, self.stream_id)))

    @classmethod
    def for_individual(cls, seed: int, generation: int, individual: int, purpose: int) -> "RngStream":
        return cls(seed, stream_id(generation, individual, purpose))

    def _advanced(self, n: int) -> "RngStream":
        new = object.__new__(RngStream)
        object.__setattr__(new, "seed", self.seed)
        object.__setattr__(new, "stream_id", self.stream_id)
        object.__setattr__(new, "counter", self.counter + n)
        object.__setattr__(new, "_key", self._key)
        return new

    def uniforms(self, n: int) -> tuple[np.ndarray, "RngStream"]:
        counters = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        bits = _mix64_array(self._key + counters * _U_GOLDEN)
        return (bits >> np.uint64(11)).astype(np.float64) * _TO_UNIT, self._advanced(n)

    def uniform(self) -> tuple[float, "RngStream"]:
        u, nxt = self.uniforms(1)
        return float(u[0]), nxt

    def below(self, n: int) -> tuple[int, "RngStream"]:
        """Uniform integer in ``[0, n)``."""
        u, nxt = self.uniform()
        return int(u * n), nxt
