"""Counter-based random streams and inverse-transform samplers.

Every uniform is a pure function of ``(key, counter)``: a stream is a pair of
64-bit keys derived from ``(master_seed, stream_index)`` and the ``counter``
says which draw is wanted.  Nothing depends on call order across streams, so
work can be split over any number of processes and still reproduce the same
bits.  The same hash is implemented in the compiled kernels, which lets the
two backends agree draw for draw.

The mixer is the SplitMix64 finalizer applied twice with two keys.  It is fast
and passes the usual statistical batteries; it is not meant to be
cryptographic.
"""

from __future__ import annotations

import numpy as np

from .errors import EmptyRequestError, ParameterError

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_SEED_SALT = 0x243F6A8885A308D3
_LANE_SALT = 0xA0761D6478BD642F
_TWO_M53 = 2.0 ** -53

# Per-record counters are (record << RECORD_SHIFT) | draw.
RECORD_SHIFT = 32


def mix64_int(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def mix64(z):
    """Vectorised SplitMix64 finalizer on uint64 arrays (wraps mod 2**64)."""
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def hash_bits(k0, k1, counters):
    """Raw 64-bit outputs for the given keys and counters (broadcasting)."""
    k0 = np.atleast_1d(np.asarray(k0, dtype=np.uint64))
    k1 = np.atleast_1d(np.asarray(k1, dtype=np.uint64))
    c = np.atleast_1d(np.asarray(counters, dtype=np.uint64))
    return mix64(mix64(k0 + c * np.uint64(GOLDEN)) ^ k1)


def hash_uniforms(k0, k1, counters):
    """Uniforms on the open interval (0, 1); exact 0 and 1 never occur."""
    bits = hash_bits(k0, k1, counters)
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_M53


def hash_uniform_int(k0: int, k1: int, counter: int) -> float:
    """Scalar reference implementation of :func:`hash_uniforms`."""
    bits = mix64_int(mix64_int(k0 + counter * GOLDEN) ^ k1)
    return ((bits >> 11) + 0.5) * _TWO_M53


def stream_keys(master_seed: int, stream_index: int) -> tuple[int, int]:
    seed = int(master_seed) & MASK64
    k0 = mix64_int(mix64_int(seed ^ _SEED_SALT) + (int(stream_index) + 1) * GOLDEN)
    k1 = mix64_int(k0 ^ _LANE_SALT ^ (int(stream_index) & MASK64))
    return k0, k1


def stream_keys_array(master_seed: int, indices) -> tuple[np.ndarray, np.ndarray]:
    """Keys of many streams at once; element ``i`` matches ``stream_keys``."""
    idx = np.asarray(indices, dtype=np.uint64)
    base = np.uint64(mix64_int((int(master_seed) & MASK64) ^ _SEED_SALT))
    k0 = mix64(base + (idx + np.uint64(1)) * np.uint64(GOLDEN))
    k1 = mix64(k0 ^ np.uint64(_LANE_SALT) ^ idx)
    return k0, k1


def lane_keys(k0, k1, lane: int):
    """Keys of sub-stream ``lane``; accepts ints or uint64 arrays."""
    if isinstance(k0, (int, np.integer)) and isinstance(k1, (int, np.integer)):
        return (
            mix64_int(int(k0) + (lane + 1) * _LANE_SALT),
            mix64_int(int(k1) ^ ((lane + 1) * GOLDEN & MASK64)),
        )
    k0 = np.asarray(k0, dtype=np.uint64)
    k1 = np.asarray(k1, dtype=np.uint64)
    return (
        mix64(k0 + np.uint64((lane + 1) * _LANE_SALT & MASK64)),
        mix64(k1 ^ np.uint64((lane + 1) * GOLDEN & MASK64)),
    )


class RngStream:
    """A seekable stream of uniforms identified by ``(master_seed, stream_index)``.

    Draws are consumed sequentially through ``position``.  ``lane(i)`` gives
    an independent sub-stream, used where a sampler needs several families of
    draws (arrivals, signs, trajectories) without them interleaving.

    A single stream must not be advanced by two workers at once; copy it or
    derive one stream per path instead.
    """

    __slots__ = ("master_seed", "stream_index", "lanes", "k0", "k1", "position")

    def __init__(self, master_seed: int, stream_index: int, lanes: tuple = ()):
        if int(stream_index) < 0:
            raise ParameterError(f"stream_index must be nonnegative, got {stream_index}")
        self.master_seed = int(master_seed) & MASK64
        self.stream_index = int(stream_index)
        self.lanes = tuple(lanes)
        k0, k1 = stream_keys(self.master_seed, self.stream_index)
        for lane in self.lanes:
            k0, k1 = lane_keys(k0, k1, lane)
        self.k0 = k0
        self.k1 = k1
        self.position = 0

    def __repr__(self):
        return (
            f"RngStream(master_seed={self.master_seed}, stream_index={self.stream_index}, "
            f"lanes={self.lanes}, position={self.position})"
        )

    def lane(self, label: int) -> "RngStream":
        return RngStream(self.master_seed, self.stream_index, self.lanes + (int(label),))

    def copy(self) -> "RngStream":
        other = RngStream(self.master_seed, self.stream_index, self.lanes)
        other.position = self.position
        return other

    def uniforms(self, size: int) -> np.ndarray:
        counters = np.arange(self.position, self.position + size, dtype=np.uint64)
        self.position += size
        if size == 0:
            return np.empty(0)
        return hash_uniforms(self.k0, self.k1, counters)

    def uniform(self) -> float:
        u = hash_uniform_int(self.k0, self.k1, self.position)
        self.position += 1
        return u


def derive_stream(master_seed: int, stream_index: int) -> RngStream:
    return RngStream(master_seed, stream_index)


def poisson_arrivals(rng: RngStream, count: int) -> np.ndarray:
    """First ``count`` arrival times of a unit-rate Poisson process."""
    if count < 1:
        raise EmptyRequestError("count must be at least 1")
    gammas = np.cumsum(-np.log(rng.uniforms(count)))
    if count > 1 and not np.all(np.diff(gammas) > 0):
        raise ArithmeticError("arrival times failed to increase strictly")
    return gammas


def sample_rademacher(rng: RngStream, size: int | None = None):
    if size is None:
        return 1 if rng.uniform() >= 0.5 else -1
    return np.where(rng.uniforms(size) >= 0.5, 1.0, -1.0)


def sample_power_time(rng: RngStream, beta: float, size: int | None = None):
    """Draw ``U**(1/beta)``, which has CDF ``x**beta`` on (0, 1]."""
    if not 0.0 < beta <= 1.0:
        raise ParameterError(f"beta must lie in (0, 1], got {beta}")
    if size is None:
        return rng.uniform() ** (1.0 / beta)
    return rng.uniforms(size) ** (1.0 / beta)


def sample_frechet(rng: RngStream, law, size: int | None = None):
    """Inverse-transform Frechet draw ``sigma * (-log U)**(-1/alpha)``."""
    if size is None:
        return float(law.sigma * (-np.log(rng.uniform())) ** (-1.0 / law.alpha))
    return law.sigma * (-np.log(rng.uniforms(size))) ** (-1.0 / law.alpha)


def derive_seed(master_seed: int, tag: int) -> int:
    """An independent master seed for sub-experiment ``tag``."""
    return mix64_int(mix64_int(int(master_seed) & MASK64) + (int(tag) + 1) * _LANE_SALT)
