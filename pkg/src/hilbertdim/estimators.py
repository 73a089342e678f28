"""scikit-learn style wrappers around the bound evaluators.

Both transformers are stateless: ``fit`` only validates its input, and
``transform`` maps each sample to a row of bound values (``inf`` where a
bound certifies that no finite model exists).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from . import bounds
from .correlation import DEFAULT_TOL
from .psdrank import psd_rank_f1_bound, psd_rank_fidelity_bound
from .validation import check_correlations, check_tol

_CORRELATION_FEATURES = ("f1", "f2", "dimension_lower_bound")


class DimensionBoundTransformer(TransformerMixin, BaseEstimator):
    """Map correlations to ``[f1, f2, dimension_lower_bound]``.

    Parameters
    ----------
    tol : float
        Validation tolerance for incoming tables.
    zero_threshold : float
        Bracket values below this count as zero, giving an infinite bound.
    features : tuple of str
        Subset and order of the output columns.
    """

    def __init__(self, tol=DEFAULT_TOL, zero_threshold=bounds.ZERO_THRESHOLD, features=_CORRELATION_FEATURES):
        self.tol = tol
        self.zero_threshold = zero_threshold
        self.features = features

    def _check_params(self):
        check_tol(self.tol)
        check_tol(self.zero_threshold, "zero_threshold")
        unknown = set(self.features) - set(_CORRELATION_FEATURES)
        if unknown or not self.features:
            raise ValueError("features must be a nonempty subset of %r" % (_CORRELATION_FEATURES,))

    def fit(self, X, y=None):
        self._check_params()
        check_correlations(X, self.tol)
        return self

    def transform(self, X):
        self._check_params()
        rows = []
        for p in check_correlations(X, self.tol):
            report = bounds.dimension_lower_bound(p, self.zero_threshold)
            values = {
                "f1": report.f1,
                "f2": report.f2,
                "dimension_lower_bound": float(report.dimension_lower_bound),
            }
            rows.append([values[k] for k in self.features])
        return np.array(rows, dtype=np.float64).reshape(len(rows), len(self.features))

    def get_feature_names_out(self, input_features=None):
        return np.array(list(self.features), dtype=object)

    def __sklearn_is_fitted__(self):
        return True


class PSDRankBoundTransformer(TransformerMixin, BaseEstimator):
    """Map nonnegative matrices to PSD-rank lower bounds.

    Output columns are the fidelity bound and, when ``include_f1`` is set,
    the squared-overlap bound from :func:`psd_rank_f1_bound`.
    """

    def __init__(self, include_f1=True, zero_threshold=bounds.ZERO_THRESHOLD):
        self.include_f1 = include_f1
        self.zero_threshold = zero_threshold

    def fit(self, X, y=None):
        check_tol(self.zero_threshold, "zero_threshold")
        for m in X:
            psd_rank_fidelity_bound(m)
        return self

    def transform(self, X):
        rows = []
        for m in X:
            row = [psd_rank_fidelity_bound(m, self.zero_threshold)]
            if self.include_f1:
                row.append(psd_rank_f1_bound(m, self.zero_threshold))
            rows.append(row)
        width = 2 if self.include_f1 else 1
        return np.array(rows, dtype=np.float64).reshape(len(rows), width)

    def get_feature_names_out(self, input_features=None):
        names = ["psd_fidelity_bound", "psd_f1_bound"] if self.include_f1 else ["psd_fidelity_bound"]
        return np.array(names, dtype=object)

    def __sklearn_is_fitted__(self):
        return True
