"""Restricted isometry constants: exact enumeration, Monte-Carlo estimators and bounds.

For ``Phi`` with ``m`` rows and ``n`` columns, the ``s``-restricted isometry
constant is ``delta_s = max_{#S <= s} ||Phi_S* Phi_S - Id||``. Exact values
come from enumerating supports and taking Hermitian operator norms. Empirical
values are maxima of ``|R - 1|`` over sampled unit vectors, where
``R = ||Phi x||^2 / ||x||^2``, so they are always lower bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from itertools import combinations

import numpy as np

from .exceptions import CapExceededError, DomainError, ParameterError
from .linalg import op_norm_hermitian
from .quaternion import FIELDS, REAL, adjoint, as_quaternion_array, embed, field_of, identity, matmul, matvec
from .sampling import RngStream, derive_keys, random_supports, sparse_unit_entries
from .validation import check_count, check_matrix, check_vectors

DEFAULT_MAX_SUPPORTS = 100_000
#: Covering radius with ``log(1 + 2 / gamma) = 7/2``.
COVERING_GAMMA = 2.0 / (math.exp(3.5) - 1.0)
#: Sampled supports read their uniforms this far into the per-support stream,
#: clear of the vector draws that start at 0.
SUPPORT_OFFSET = 1 << 40
# bytes budget for one batched product when evaluating Rayleigh quotients
_CHUNK_BYTES = 32 << 20
_VECTOR_CHUNK = 64
_DENSE_CHUNK = 256


@dataclass(frozen=True)
class RipEstimate:
    """Value of ``delta_s`` with its provenance.

    ``mode == "empirical"`` values are lower bounds on the exact constant.
    """

    mode: str
    value: float
    s: int
    n_supports: int
    n_vectors: int = 0
    per_support: tuple | None = dc_field(default=None, repr=False)

    @property
    def is_lower_bound(self) -> bool:
        return self.mode == "empirical"


@dataclass(frozen=True)
class RicRivSample:
    """One-sided constants over a vector pool and their one-vector-per-support versions."""

    ric_left: float
    ric_right: float
    riv_left: float
    riv_right: float

    def as_tuple(self):
        return (self.ric_left, self.ric_right, self.riv_left, self.riv_right)


def rayleigh_quotient(Phi, x) -> float:
    """``||Phi x||^2 / ||x||^2`` for a nonzero vector ``x``."""
    x = as_quaternion_array(x, 1)
    norm2 = float(np.sum(x * x))
    if norm2 == 0.0:
        raise DomainError("Rayleigh quotient of the zero vector is undefined")
    y = matvec(Phi, x)
    return float(np.sum(y * y)) / norm2


def rayleigh_quotients(Phi, X) -> np.ndarray:
    """Rayleigh quotients of each row vector of ``X`` (shape ``(V, n)`` or ``(V, n, 4)``)."""
    Phi = check_matrix(Phi)
    X = check_vectors(X, Phi.shape[1])
    norm2 = np.sum(X * X, axis=(1, 2))
    if np.any(norm2 == 0.0):
        raise DomainError("Rayleigh quotient of the zero vector is undefined")
    Y = X.reshape(X.shape[0], -1) @ embed(Phi).T
    return np.sum(Y * Y, axis=1) / norm2


def enumerate_supports(n: int, s: int, max_supports: int = DEFAULT_MAX_SUPPORTS) -> np.ndarray:
    """All ``s``-subsets of ``range(n)`` in lexicographic order, shape ``(C(n, s), s)``."""
    if not 1 <= s <= n:
        raise ParameterError(f"need 1 <= s <= n, got s={s}, n={n}")
    count = math.comb(n, s)
    if count > max_supports:
        raise CapExceededError(
            f"C({n}, {s}) = {count} supports exceeds the enumeration cap {max_supports}; "
            "use the empirical estimator instead"
        )
    return np.array(list(combinations(range(n), s)), dtype=np.int64).reshape(count, s)


def exact_delta_s(Phi, s: int, max_supports: int = DEFAULT_MAX_SUPPORTS, per_support: bool = False) -> RipEstimate:
    """Exact ``delta_s`` by enumerating every support of size exactly ``s``.

    Supports of size ``s`` suffice because ``||Phi_S* Phi_S - Id||`` can only
    grow when ``S`` grows (its embedding's principal submatrices interlace).
    """
    Phi = check_matrix(Phi)
    n = Phi.shape[1]
    supports = enumerate_supports(n, check_count(s, "s"), max_supports)
    gram = matmul(adjoint(Phi), Phi) - identity(n)
    values = [op_norm_hermitian(gram[np.ix_(S, S)]) for S in supports]
    detail = tuple((tuple(S.tolist()), v) for S, v in zip(supports, values)) if per_support else None
    return RipEstimate("exact", float(max(values)), int(s), len(supports), 0, detail)


def _field_for(Phi, field):
    if field is None:
        return field_of(Phi)
    if field not in FIELDS:
        raise ParameterError(f"field must be one of {FIELDS}, got {field!r}")
    return field


def _row_sum_squares(Y):
    """Sum of squares along the last axis, row by row."""
    Y = np.ascontiguousarray(Y)
    return np.sum(Y * Y, axis=-1)


def support_rayleigh(Phi, supports, entries) -> np.ndarray:
    """Rayleigh quotients of sparse vectors given by their on-support entries.

    Parameters
    ----------
    Phi : (m, n, 4) array
    supports : (P, s) int array
        One support per row.
    entries : (P, V, s, 4) array
        ``V`` vectors for every support.

    Returns
    -------
    (P, V) array

    Notes
    -----
    Products run in fixed-width, zero-padded vector chunks. BLAS results for
    one column then depend only on that column, so a vector gets bit-identical
    quotients in every pool that contains it.
    """
    Phi = check_matrix(Phi)
    supports = np.asarray(supports, dtype=np.int64)
    P, V, s = entries.shape[:3]
    m, n = Phi.shape[:2]
    real = field_of(Phi) == REAL and field_of(entries) == REAL
    if real:
        X = entries[..., 0]
        A = Phi[..., 0]
    else:
        X = entries.reshape(P, V, 4 * s)
        A = embed(Phi)
    norm2 = _row_sum_squares(X)
    if V == 1:
        return _rayleigh_dense(A, supports, X[:, 0, :], real, n)[:, None] / norm2

    rows, cols = A.shape[0], X.shape[-1]
    chunk = max(1, _CHUNK_BYTES // (8 * rows * (cols + _VECTOR_CHUNK)))
    blocks = A if real else A.reshape(rows, n, 4)
    out = np.empty((P, V))
    for p0 in range(0, P, chunk):
        p1 = min(p0 + chunk, P)
        S = supports[p0:p1]
        block = np.ascontiguousarray(blocks[:, S].reshape(rows, p1 - p0, cols).transpose(1, 0, 2))
        for v0 in range(0, V, _VECTOR_CHUNK):
            v1 = min(v0 + _VECTOR_CHUNK, V)
            Xc = np.zeros((p1 - p0, cols, _VECTOR_CHUNK))
            Xc[:, :, : v1 - v0] = X[p0:p1, v0:v1].transpose(0, 2, 1)
            Y = block @ Xc
            out[p0:p1, v0:v1] = _row_sum_squares(Y.transpose(0, 2, 1))[:, : v1 - v0]
    return out / norm2


def _rayleigh_dense(A, supports, X, real, n):
    """One vector per support: scatter into dense columns and multiply by the full matrix."""
    P, s = supports.shape
    width = 1 if real else 4
    out = np.empty(P)
    for v0 in range(0, P, _DENSE_CHUNK):
        v1 = min(v0 + _DENSE_CHUNK, P)
        dense = np.zeros((_DENSE_CHUNK, n, width))
        dense[np.arange(v1 - v0)[:, None], supports[v0:v1]] = X[v0:v1].reshape(v1 - v0, s, width)
        Y = A @ dense.reshape(_DENSE_CHUNK, n * width).T
        out[v0:v1] = _row_sum_squares(Y.T)[: v1 - v0]
    return out


def _resolve_rng(rng) -> RngStream:
    if rng is None:
        return RngStream(0)
    if isinstance(rng, RngStream):
        return rng
    return RngStream(int(rng))


def sampled_pool(rng, n: int, s: int, supports, vectors_per_support: int, field: str,
                 max_supports: int = DEFAULT_MAX_SUPPORTS):
    """Supports and unit-vector entries for the empirical estimators.

    Support ``i`` owns child stream ``i`` of ``rng``. Its vectors are read from
    the start of that stream, and when supports are sampled rather than
    enumerated the support itself comes from offset ``SUPPORT_OFFSET``. The
    pool for a larger count therefore contains the pool for a smaller one.
    """
    rng = _resolve_rng(rng)
    if isinstance(supports, str):
        if supports != "all":
            raise ParameterError(f"supports must be 'all' or a count, got {supports!r}")
        S = enumerate_supports(n, s, max_supports)
        keys = derive_keys(rng.key, np.arange(len(S)))
    else:
        count = check_count(supports, "supports")
        keys = derive_keys(rng.key, np.arange(count))
        S = random_supports(keys, n, s, 1, offset=SUPPORT_OFFSET)[:, 0, :]
    entries = sparse_unit_entries(keys, s, vectors_per_support, field)
    return S, entries


def empirical_delta_s(Phi, s: int, supports="all", vectors_per_support: int = 1000, rng=None,
                      field: str | None = None, max_supports: int = DEFAULT_MAX_SUPPORTS,
                      per_support: bool = False) -> RipEstimate:
    """Lower estimate ``max |R - 1|`` over random ``s``-sparse unit vectors.

    ``supports`` is ``"all"`` (enumerate every ``s``-subset) or a number of
    uniformly sampled supports. Vectors are real when ``field == "real"``
    (default: the field of ``Phi``).
    """
    Phi = check_matrix(Phi)
    n = Phi.shape[1]
    check_count(s, "s")
    vectors_per_support = check_count(vectors_per_support, "vectors_per_support")
    field = _field_for(Phi, field)
    S, entries = sampled_pool(rng, n, s, supports, vectors_per_support, field, max_supports)
    dev = np.abs(support_rayleigh(Phi, S, entries) - 1.0).max(axis=1)
    detail = tuple((tuple(Si.tolist()), float(v)) for Si, v in zip(S, dev)) if per_support else None
    return RipEstimate("empirical", float(dev.max()), int(s), len(S), len(S) * vectors_per_support, detail)


def empirical_ric_riv(Phi, s: int, vectors_per_support: int = 1000, rng=None, field: str | None = None,
                      max_supports: int = DEFAULT_MAX_SUPPORTS) -> RicRivSample:
    """Left/right constants over every support's vector pool, and over first vectors only.

    The one-vector versions use the first vector of each support's pool, so
    they never exceed the pooled versions.
    """
    Phi = check_matrix(Phi)
    check_count(s, "s")
    vectors_per_support = check_count(vectors_per_support, "vectors_per_support")
    field = _field_for(Phi, field)
    S, entries = sampled_pool(rng, Phi.shape[1], s, "all", vectors_per_support, field, max_supports)
    R = support_rayleigh(Phi, S, entries)
    first = R[:, 0]
    return RicRivSample(
        ric_left=float(1.0 - R.min()),
        ric_right=float(R.max() - 1.0),
        riv_left=float(1.0 - first.min()),
        riv_right=float(first.max() - 1.0),
    )


def _check_delta_eps(delta, eps):
    if not 0.0 < delta < 1.0 / math.sqrt(3.0):
        raise ParameterError(f"delta must lie in (0, 1/sqrt(3)), got {delta}")
    if not 0.0 < eps < 1.0:
        raise ParameterError(f"epsilon must lie in (0, 1), got {eps}")


def sample_size_fixed_support(delta: float, eps: float, s: int) -> int:
    """Smallest ``m >= (10/3) delta^-2 (14 s + ln(2/eps))``."""
    _check_delta_eps(delta, eps)
    s = check_count(s, "s")
    return math.ceil(10.0 / 3.0 / delta**2 * (14 * s + math.log(2.0 / eps)))


def sample_size_rip(delta: float, eps: float, s: int, n: int) -> int:
    """Smallest ``m >= (10/3) delta^-2 (15 s + ln(2/eps) + s ln(n/s))``."""
    _check_delta_eps(delta, eps)
    s = check_count(s, "s")
    n = check_count(n, "n")
    if s > n:
        raise ParameterError(f"need s <= n, got s={s}, n={n}")
    return math.ceil(10.0 / 3.0 / delta**2 * (15 * s + math.log(2.0 / eps) + s * math.log(n / s)))


def covering_count_bound(s: int, gamma: float = COVERING_GAMMA) -> float:
    """``log`` of the covering-number bound ``(1 + 2/gamma)^(4s)`` for the unit sphere of ``H^s``."""
    s = check_count(s, "s")
    if not 0.0 < gamma < 0.5:
        raise ParameterError(f"gamma must lie in (0, 1/2), got {gamma}")
    return 4 * s * math.log(1.0 + 2.0 / gamma)
