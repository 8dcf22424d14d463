"""Quaternion scalars, vectors and matrices.

Quaternion arrays are plain ``numpy`` float arrays whose trailing axis has
length 4 and holds the components ``(a, b, c, d)`` of ``a + bi + cj + dk``.
A vector of length ``n`` therefore has shape ``(n, 4)`` and an ``m x n``
matrix has shape ``(m, n, 4)``.  Real data is the special case ``b = c = d = 0``.

Matrices act on column vectors from the left, and scalars multiply vectors
from the right (``H^n`` is a right module over the quaternions).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError

#: Absolute tolerance used for equality/zero tests on quaternion components.
ATOL = 1e-12

REAL = "real"
QUATERNION = "quaternion"
FIELDS = (REAL, QUATERNION)

# Left-multiplication matrix of q = a + bi + cj + dk:
#   (a, -b, -c, -d), (b, a, -d, c), (c, d, a, -b), (d, -c, b, a)
_L_INDEX = np.array([[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]])
_L_SIGN = np.array(
    [[1.0, -1.0, -1.0, -1.0], [1.0, 1.0, -1.0, 1.0], [1.0, 1.0, 1.0, -1.0], [1.0, -1.0, 1.0, 1.0]]
)
_CONJ = np.array([1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class Quaternion:
    """A single quaternion ``a + bi + cj + dk``."""

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    @classmethod
    def from_array(cls, q) -> "Quaternion":
        a, b, c, d = (float(v) for v in np.asarray(q, dtype=float).reshape(4))
        return cls(a, b, c, d)

    def to_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d], dtype=float)

    def conj(self) -> "Quaternion":
        return Quaternion(self.a, -self.b, -self.c, -self.d)

    def norm2(self) -> float:
        return self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d

    def __abs__(self) -> float:
        return math.sqrt(self.norm2())

    def __add__(self, other):
        other = _coerce(other)
        return Quaternion(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return Quaternion(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __neg__(self):
        return Quaternion(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, other):
        return Quaternion.from_array(qmul(self.to_array(), _coerce(other).to_array()))

    def __rmul__(self, other):
        return Quaternion.from_array(qmul(_coerce(other).to_array(), self.to_array()))

    def isclose(self, other, atol: float = ATOL) -> bool:
        other = _coerce(other)
        return bool(np.all(np.abs(self.to_array() - other.to_array()) <= atol))

    def is_zero(self, atol: float = ATOL) -> bool:
        return self.isclose(Quaternion(), atol)

    def __str__(self):
        return f"{self.a:g}{self.b:+g}i{self.c:+g}j{self.d:+g}k"


def _coerce(value) -> Quaternion:
    if isinstance(value, Quaternion):
        return value
    if isinstance(value, (int, float, np.floating, np.integer)):
        return Quaternion(float(value))
    return Quaternion.from_array(value)


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def as_quaternion_array(X, ndim: int) -> np.ndarray:
    """Validate ``X`` as a quaternion array with ``ndim`` quaternion axes.

    Accepts a float array of shape ``(..., 4)`` with ``ndim + 1`` axes, a real
    array with exactly ``ndim`` axes (embedded with zero imaginary parts), or a
    nested sequence of :class:`Quaternion` objects.
    """
    if isinstance(X, Quaternion):
        X = X.to_array()
    elif isinstance(X, (list, tuple)) and _contains_quaternion(X):
        X = _nested_to_array(X)
    X = np.asarray(X, dtype=float)
    if X.ndim == ndim:
        out = np.zeros(X.shape + (4,))
        out[..., 0] = X
        return out
    if X.ndim == ndim + 1 and X.shape[-1] == 4:
        return X
    raise DimensionError(
        f"expected a real array with {ndim} axes or a quaternion array of shape "
        f"(..., 4) with {ndim + 1} axes, got shape {X.shape}"
    )


def _contains_quaternion(seq) -> bool:
    for item in seq:
        if isinstance(item, Quaternion):
            return True
        if isinstance(item, (list, tuple)) and _contains_quaternion(item):
            return True
    return False


def _nested_to_array(seq):
    if isinstance(seq, Quaternion):
        return seq.to_array()
    if isinstance(seq, (int, float)):
        return np.array([float(seq), 0.0, 0.0, 0.0])
    return np.stack([_nested_to_array(item) for item in seq])


def field_of(X, atol: float = 0.0) -> str:
    """Return ``"real"`` if every imaginary component is (within ``atol``) zero."""
    X = np.asarray(X)
    return REAL if np.all(np.abs(X[..., 1:]) <= atol) else QUATERNION


def qmul(p, q) -> np.ndarray:
    """Hamilton product of quaternion arrays, broadcasting over leading axes."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    a1, b1, c1, d1 = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    a2, b2, c2, d2 = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ],
        axis=-1,
    )


def qconj(q) -> np.ndarray:
    return np.asarray(q, dtype=float) * _CONJ


def qnorm(q):
    """Euclidean norm ``|q|`` of each quaternion in ``q``."""
    if isinstance(q, Quaternion):
        return abs(q)
    return np.sqrt(np.sum(np.square(np.asarray(q, dtype=float)), axis=-1))


def vector_norm(x) -> float:
    """``||x||_2`` of a quaternion vector."""
    x = as_quaternion_array(x, 1)
    return float(np.sqrt(np.sum(np.square(x))))


def hermitian_form(x, y) -> np.ndarray:
    """``<x, y> = y* x = sum_i conj(y_i) x_i`` as a length-4 array."""
    x = as_quaternion_array(x, 1)
    y = as_quaternion_array(y, 1)
    if x.shape != y.shape:
        raise DimensionError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    return qmul(qconj(y), x).sum(axis=0)


def support(x, atol: float = ATOL) -> np.ndarray:
    """Indices of the nonzero coordinates of ``x``."""
    x = as_quaternion_array(x, 1)
    return np.flatnonzero(np.any(np.abs(x) > atol, axis=-1))


def is_sparse(x, s: int, atol: float = ATOL) -> bool:
    return len(support(x, atol)) <= s


def matvec(Phi, x) -> np.ndarray:
    """``Phi @ x`` with matrix entries multiplying coordinates from the left."""
    Phi = as_quaternion_array(Phi, 2)
    x = as_quaternion_array(x, 1)
    if Phi.shape[1] != x.shape[0]:
        raise DimensionError(f"matrix has {Phi.shape[1]} columns, vector has length {x.shape[0]}")
    return qmul(Phi, x[np.newaxis, :, :]).sum(axis=1)


def matmul(P, Q) -> np.ndarray:
    P = as_quaternion_array(P, 2)
    Q = as_quaternion_array(Q, 2)
    if P.shape[1] != Q.shape[0]:
        raise DimensionError(f"inner dimensions differ: {P.shape[1]} vs {Q.shape[0]}")
    return qmul(P[:, :, np.newaxis, :], Q[np.newaxis, :, :, :]).sum(axis=1)


def adjoint(Phi) -> np.ndarray:
    """Conjugate transpose ``Phi*``."""
    Phi = as_quaternion_array(Phi, 2)
    return np.ascontiguousarray(qconj(Phi).transpose(1, 0, 2))


def identity(n: int) -> np.ndarray:
    out = np.zeros((n, n, 4))
    out[np.arange(n), np.arange(n), 0] = 1.0
    return out


def is_hermitian(Psi, atol: float = ATOL) -> bool:
    Psi = as_quaternion_array(Psi, 2)
    if Psi.shape[0] != Psi.shape[1]:
        return False
    return bool(np.all(np.abs(Psi - adjoint(Psi)) <= atol))


def left_matrix(q) -> np.ndarray:
    """4x4 real matrix ``L`` with ``L @ vec(p) = vec(q p)``; broadcasts over leading axes."""
    q = np.asarray(q, dtype=float)
    return q[..., _L_INDEX] * _L_SIGN


def embed(Phi) -> np.ndarray:
    """Real ``4m x 4n`` embedding whose ``(k, l)`` block is ``left_matrix(Phi[k, l])``.

    Satisfies ``vec(Phi @ x) == embed(Phi) @ vec(x)``, ``embed(P @ Q) ==
    embed(P) @ embed(Q)`` and ``embed(Phi*) == embed(Phi).T``.
    """
    Phi = as_quaternion_array(Phi, 2)
    m, n = Phi.shape[:2]
    return left_matrix(Phi).transpose(0, 2, 1, 3).reshape(4 * m, 4 * n)


def vec(x) -> np.ndarray:
    """Stack the ``(a, b, c, d)`` quadruples of a quaternion vector."""
    return as_quaternion_array(x, 1).reshape(-1)


def unvec(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size % 4:
        raise DimensionError(f"cannot reshape length {v.size} into quaternion coordinates")
    return v.reshape(-1, 4)
