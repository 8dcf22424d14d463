"""Reproducible Gaussian sampling on a counter-based 64-bit generator.

Every draw is a pure function of ``(key, counter)``: the ``i``-th uniform of a
stream is ``mix64(key + (i + 1) * GOLDEN)`` (the SplitMix64 output function),
and normals come from Box-Muller on consecutive uniform pairs.  Child streams
are derived by ``mix64(key ^ mix64(id * GOLDEN + 1))``.  Because nothing
depends on call order, batches of streams can be evaluated together and
results do not depend on how work is split between workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .exceptions import DimensionError, ParameterError
from .quaternion import FIELDS, QUATERNION, REAL, Quaternion

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_GOLDEN = np.uint64(GOLDEN)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TWO_PI = 2.0 * np.pi


def mix64(z):
    """SplitMix64 finalizer applied elementwise to a ``uint64`` array."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


def _mix64_int(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_key(key: int, stream_id: int) -> int:
    """Key of child stream ``stream_id`` of the stream keyed by ``key``."""
    return _mix64_int(key ^ _mix64_int(stream_id * GOLDEN + 1))


def derive_keys(key: int, stream_ids) -> np.ndarray:
    """Vectorized :func:`derive_key` over an array of stream ids."""
    ids = np.asarray(stream_ids, dtype=np.uint64)
    with np.errstate(over="ignore"):
        inner = mix64(ids * _GOLDEN + np.uint64(1))
    return mix64(np.uint64(key) ^ inner)


def uniforms(keys, counters) -> np.ndarray:
    """Uniform draws in the open interval (0, 1); ``keys`` and ``counters`` broadcast."""
    keys = np.asarray(keys, dtype=np.uint64)
    counters = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = mix64(keys + (counters + np.uint64(1)) * _GOLDEN)
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * (1.0 / 9007199254740992.0)


def normals(keys, indices) -> np.ndarray:
    """Standard normal draws addressed by index.

    Normal ``2p`` and ``2p + 1`` are the cosine and sine outputs of Box-Muller
    applied to uniforms ``2p`` and ``2p + 1``.
    """
    indices = np.asarray(indices, dtype=np.uint64)
    pair = (indices >> np.uint64(1)) << np.uint64(1)
    u1 = uniforms(keys, pair)
    u2 = uniforms(keys, pair + np.uint64(1))
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = _TWO_PI * u2
    odd = (indices & np.uint64(1)).astype(bool)
    return radius * np.where(odd, np.sin(angle), np.cos(angle))


class RngStream:
    """A single-owner random stream: a 64-bit key plus a draw counter.

    Parameters
    ----------
    seed : int
        Master seed (any integer, reduced modulo 2**64).
    stream : int
        Stream identifier; distinct ids give statistically independent streams.
    """

    def __init__(self, seed: int = 0, stream: int = 0, *, key: int | None = None):
        self.seed = int(seed) & MASK64
        self.stream = int(stream)
        if key is None:
            key = derive_key(_mix64_int(self.seed + GOLDEN), self.stream)
        self.key = int(key) & MASK64
        self.counter = 0

    def spawn(self, stream_id: int) -> "RngStream":
        """Child stream; independent of this stream's counter."""
        return RngStream(self.seed, stream_id, key=derive_key(self.key, stream_id))

    def spawn_keys(self, stream_ids) -> np.ndarray:
        return derive_keys(self.key, stream_ids)

    def _take(self, size: int) -> int:
        start = self.counter
        self.counter += int(size)
        return start

    def uniform(self, size: int) -> np.ndarray:
        start = self._take(size)
        return uniforms(np.uint64(self.key), np.arange(start, start + size, dtype=np.uint64))

    def _take_normals(self, size: int) -> int:
        # normal j shares uniform slot j; Box-Muller pairs must start on an even slot
        self.counter += self.counter % 2
        return self._take(size + size % 2)

    def normal(self, size: int) -> np.ndarray:
        start = self._take_normals(size)
        return normals(np.uint64(self.key), np.arange(start, start + size, dtype=np.uint64))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream={self.stream}, counter={self.counter})"


@dataclass(frozen=True)
class GaussianSpec:
    """Entry distribution: real ``N(0, variance)`` or quaternion ``N_H(0, variance)``.

    In the quaternion case the four components are independent ``N(0, variance / 4)``.
    """

    field: str = QUATERNION
    variance: float = 1.0

    def __post_init__(self):
        if self.field not in FIELDS:
            raise ParameterError(f"field must be one of {FIELDS}, got {self.field!r}")
        if not self.variance >= 0:
            raise ParameterError(f"variance must be nonnegative, got {self.variance}")

    @property
    def component_scale(self) -> float:
        """Standard deviation of each drawn real component."""
        if self.field == REAL:
            return float(np.sqrt(self.variance))
        return float(np.sqrt(self.variance / 4.0))


def _quaternion_block(keys, base, field):
    """Normals ``base .. base + 3`` as one quaternion per element of ``base``.

    ``base`` must be even. Equal to ``normals(keys, base + arange(4))`` for the
    quaternion field; the real field keeps component 0 and zeros the rest
    without drawing them.
    """
    base = np.asarray(base, dtype=np.uint64)
    u0 = uniforms(keys, base)
    u1 = uniforms(keys, base + np.uint64(1))
    r = np.sqrt(-2.0 * np.log(u0))
    out = np.zeros(np.broadcast_shapes(u0.shape, base.shape) + (4,))
    out[..., 0] = r * np.cos(_TWO_PI * u1)
    if field == REAL:
        return out
    out[..., 1] = r * np.sin(_TWO_PI * u1)
    u2 = uniforms(keys, base + np.uint64(2))
    u3 = uniforms(keys, base + np.uint64(3))
    r = np.sqrt(-2.0 * np.log(u2))
    out[..., 2] = r * np.cos(_TWO_PI * u3)
    out[..., 3] = r * np.sin(_TWO_PI * u3)
    return out


def gaussian_entries(keys, m: int, n: int, columns, spec: GaussianSpec, offset: int = 0):
    """Columns of Gaussian ``m x n`` matrices, one matrix per key.

    Entry ``(k, l)`` component ``e`` is normal number ``offset + (k n + l) 4 + e``
    of its stream, so any column subset agrees with the full matrix. The real
    field keeps only the ``e = 0`` draws.

    Returns an array of shape ``keys.shape + (m, len(columns), 4)``.
    """
    keys = np.asarray(keys, dtype=np.uint64)
    columns = np.asarray(columns, dtype=np.int64)
    rows = np.arange(m, dtype=np.int64)
    base = (rows[:, None] * n + columns[None, :]) * 4 + offset
    draws = _quaternion_block(keys.reshape(keys.shape + (1, 1)), base.astype(np.uint64), spec.field)
    return draws * spec.component_scale


def sample_gaussian_quaternion(rng: RngStream, variance: float = 1.0) -> Quaternion:
    """One draw from ``N_H(0, variance)``."""
    spec = GaussianSpec(QUATERNION, variance)
    return Quaternion.from_array(rng.normal(4) * spec.component_scale)


def sample_gaussian_matrix(rng: RngStream, m: int, n: int, spec: GaussianSpec | None = None) -> np.ndarray:
    """An ``m x n`` matrix of independent entries distributed per ``spec``.

    Consumes ``4 m n`` normals from ``rng`` whatever the field, so real and
    quaternion matrices drawn from equal streams are paired component-wise.
    """
    spec = spec or GaussianSpec()
    if m < 1 or n < 1:
        raise ParameterError(f"matrix dimensions must be positive, got {m}x{n}")
    offset = rng._take_normals(4 * m * n)
    return gaussian_entries(np.uint64(rng.key), m, n, np.arange(n), spec, offset=offset)


def sparse_unit_entries(keys, s: int, count: int, field: str, offset: int = 0) -> np.ndarray:
    """``count`` unit vectors per key, each with ``s`` nonzero quaternion entries.

    Returns the on-support entries, shape ``keys.shape + (count, s, 4)``.
    Vector ``v`` uses normals ``offset + (v s + j) 4 + e``, so a larger
    ``count`` yields a superset of the same vectors.
    """
    if s < 1:
        raise ParameterError("support must be nonempty")
    keys = np.asarray(keys, dtype=np.uint64)
    base = (np.arange(count, dtype=np.int64)[:, None] * s + np.arange(s)[None, :]) * 4 + offset
    draws = _quaternion_block(keys.reshape(keys.shape + (1, 1)), base.astype(np.uint64), field)
    norms = np.sqrt(np.sum(draws * draws, axis=(-2, -1), keepdims=True))
    return draws / norms


def sample_sparse_unit_vector(rng: RngStream, n: int, support, field: str = QUATERNION) -> np.ndarray:
    """A unit vector, uniform on the sphere of vectors supported on ``support``."""
    support = np.asarray(sorted(set(int(i) for i in support)), dtype=np.int64)
    if support.size == 0:
        raise ParameterError("support must be nonempty")
    if support[0] < 0 or support[-1] >= n:
        raise DimensionError(f"support {support.tolist()} not within 0..{n - 1}")
    if field not in FIELDS:
        raise ParameterError(f"unknown field {field!r}")
    offset = rng._take_normals(4 * support.size)
    entries = sparse_unit_entries(np.uint64(rng.key), support.size, 1, field, offset=offset)[0]
    x = np.zeros((n, 4))
    x[support] = entries
    return x


def random_supports(keys, n: int, s: int, count: int, offset: int = 0) -> np.ndarray:
    """``count`` uniformly random ``s``-subsets of ``range(n)`` per key, each sorted.

    Support ``v`` ranks uniforms ``offset + v n + l`` and keeps the ``s``
    smallest, which makes it a uniformly random subset.
    """
    if not 1 <= s <= n:
        raise ParameterError(f"need 1 <= s <= n, got s={s}, n={n}")
    keys = np.asarray(keys, dtype=np.uint64)
    idx = np.arange(count, dtype=np.int64)[:, None] * n + np.arange(n)[None, :] + offset
    u = uniforms(keys.reshape(keys.shape + (1, 1)), idx.astype(np.uint64))
    chosen = np.argsort(u, axis=-1, kind="stable")[..., :s]
    return np.sort(chosen, axis=-1)


def sample_support(rng: RngStream, n: int, s: int) -> np.ndarray:
    offset = rng._take(n)
    return random_supports(np.uint64(rng.key), n, s, 1, offset=offset)[0]


def n_supports(n: int, s: int) -> int:
    return comb(n, s)
