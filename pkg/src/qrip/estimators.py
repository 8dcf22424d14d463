"""scikit-learn style wrappers around the restricted isometry estimators.

The "data" handed to ``fit`` is the measurement matrix itself, given as an
``(m, n)`` real array or an ``(m, n, 4)`` quaternion array.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import ParameterError
from .rip import DEFAULT_MAX_SUPPORTS, empirical_delta_s, empirical_ric_riv, exact_delta_s, rayleigh_quotients
from .sampling import RngStream
from .validation import check_count, check_matrix


def _rng_from(random_state):
    if random_state is None:
        return RngStream(0)
    if isinstance(random_state, RngStream):
        return random_state
    return RngStream(int(random_state))


class RestrictedIsometryConstant(BaseEstimator):
    """Estimate ``delta_s`` of a matrix.

    Parameters
    ----------
    s : int
        Sparsity level.
    mode : {"exact", "empirical"}
        ``"exact"`` enumerates every support and is refused when ``C(n, s)``
        exceeds ``max_supports``; ``"empirical"`` returns a lower bound.
    supports : "all" or int
        Empirical mode only: enumerate supports or sample this many.
    vectors_per_support : int
        Empirical mode only.
    max_supports : int
        Enumeration cap.
    random_state : int, RngStream or None
        Seed of the vector and support streams.

    Attributes
    ----------
    delta_ : float
    estimate_ : RipEstimate
    n_features_in_ : int
        Number of columns of the fitted matrix.
    """

    def __init__(self, s=1, mode="exact", supports="all", vectors_per_support=1000,
                 max_supports=DEFAULT_MAX_SUPPORTS, random_state=None):
        self.s = s
        self.mode = mode
        self.supports = supports
        self.vectors_per_support = vectors_per_support
        self.max_supports = max_supports
        self.random_state = random_state

    def fit(self, X, y=None):
        Phi = check_matrix(X)
        check_count(self.s, "s")
        if self.mode == "exact":
            est = exact_delta_s(Phi, self.s, self.max_supports)
        elif self.mode == "empirical":
            est = empirical_delta_s(Phi, self.s, self.supports, self.vectors_per_support,
                                    _rng_from(self.random_state), max_supports=self.max_supports)
        else:
            raise ParameterError(f"mode must be 'exact' or 'empirical', got {self.mode!r}")
        self.estimate_ = est
        self.delta_ = est.value
        self.n_features_in_ = Phi.shape[1]
        return self


class RicRivEstimator(BaseEstimator):
    """Left/right isometry constants over pools of random sparse vectors.

    After ``fit``, ``ric_`` holds ``(left, right)`` over the whole pool and
    ``riv_`` the same over the first vector of each support.
    """

    def __init__(self, s=1, vectors_per_support=100, max_supports=DEFAULT_MAX_SUPPORTS, random_state=None):
        self.s = s
        self.vectors_per_support = vectors_per_support
        self.max_supports = max_supports
        self.random_state = random_state

    def fit(self, X, y=None):
        Phi = check_matrix(X)
        sample = empirical_ric_riv(Phi, self.s, self.vectors_per_support, _rng_from(self.random_state),
                                   max_supports=self.max_supports)
        self.sample_ = sample
        self.ric_ = (sample.ric_left, sample.ric_right)
        self.riv_ = (sample.riv_left, sample.riv_right)
        self.n_features_in_ = Phi.shape[1]
        return self


class RayleighQuotientTransformer(TransformerMixin, BaseEstimator):
    """Map vectors to their Rayleigh quotients ``||Phi x||^2 / ||x||^2``.

    Parameters
    ----------
    matrix : array of shape (m, n) or (m, n, 4)
        The measurement matrix.

    ``transform`` takes ``(V, n)`` or ``(V, n, 4)`` vectors and returns a
    ``(V, 1)`` column.
    """

    def __init__(self, matrix=None):
        self.matrix = matrix

    def fit(self, X=None, y=None):
        if self.matrix is None:
            raise ParameterError("matrix must be set before fitting")
        self.matrix_ = check_matrix(self.matrix)
        self.n_features_in_ = self.matrix_.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "matrix_")
        return rayleigh_quotients(self.matrix_, X)[:, np.newaxis]
