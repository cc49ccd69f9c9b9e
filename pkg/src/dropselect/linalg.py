"""Dense least-squares fits, subset refits and column permutation helpers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dataset import Dataset
from .errors import DataError, SingularFitError

# A pivot this much smaller than the largest pivot declares rank deficiency.
RANK_TOL = 1e-10


@dataclass(frozen=True)
class FitResult:
    """Least-squares coefficients and error sum of squares.

    ``coefficients`` holds the intercept first (when fitted), then one entry
    per feature column in input order. ``k`` is the feature count excluding
    the intercept.
    """

    coefficients: np.ndarray
    sse: float
    n: int
    k: int


def fit_ols(X, y, with_intercept: bool = True) -> FitResult:
    """Fit ordinary least squares via column-pivoted QR.

    Raises SingularFitError when the design is rank deficient; the error
    carries the feature column index implicated by the deficient pivot
    (-1 when it is the intercept column).
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y, dtype=float).ravel()
    n, k = X.shape
    if n != len(y):
        raise DataError(f"X has {n} rows but y has {len(y)} entries")
    ncols = k + (1 if with_intercept else 0)
    if n < ncols:
        raise SingularFitError(
            f"{n} samples cannot determine {ncols} coefficients", column=None
        )
    A = np.column_stack([np.ones(n), X]) if with_intercept else X
    Q, R, piv = scipy.linalg.qr(A, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0:
        raise SingularFitError("empty design", column=None)
    bad = np.nonzero(diag <= RANK_TOL * diag.max())[0]
    if bad.size:
        offending = int(piv[bad[0]]) - (1 if with_intercept else 0)
        raise SingularFitError(
            f"rank-deficient design (column {offending})", column=offending
        )
    coef_pivoted = scipy.linalg.solve_triangular(R, Q.T @ y)
    coef = np.empty_like(coef_pivoted)
    coef[piv] = coef_pivoted
    resid = y - A @ coef
    return FitResult(coefficients=coef, sse=float(resid @ resid), n=n, k=k)


def sse_of_subset(dataset: Dataset, subset) -> float:
    """Error sum of squares of an intercept-included fit on the given columns.

    The empty subset yields the total sum of squares about the mean of y.
    """
    subset = list(subset)
    p = dataset.n_features
    if len(set(subset)) != len(subset):
        raise DataError(f"subset contains duplicate indices: {subset}")
    for j in subset:
        if not 0 <= j < p:
            raise DataError(f"feature index {j} out of range [0, {p})")
    if dataset.n_samples <= len(subset) + 1:
        raise DataError(
            f"{dataset.n_samples} samples too few for a {len(subset)}-feature fit"
        )
    y = np.asarray(dataset.target, dtype=float)
    if not subset:
        centered = y - y.mean()
        return float(centered @ centered)
    return fit_ols(dataset.X[:, subset], y, with_intercept=True).sse


def swap_columns(X: np.ndarray, i: int, j: int) -> np.ndarray:
    """Return a copy of X with columns i and j exchanged."""
    X = np.asarray(X)
    p = X.shape[1]
    for idx in (i, j):
        if not 0 <= idx < p:
            raise DataError(f"column index {idx} out of range [0, {p})")
    Z = X.copy()
    Z[:, [i, j]] = Z[:, [j, i]]
    return Z
