"""Selection criteria: Mallows's Cp for regression, trace separability for
classification, plus the signed-gain interface consumed by the selectors.

Both criteria expose a uniform orientation-free "gain" so the selectors never
need to know whether lower or higher is better. Cp additionally publishes a
``threshold_scale`` so that the enter/remove thresholds alpha and beta act on
a size-free scale (gains measured as fractions of the intercept-only error
sum of squares); without this rescaling the thresholds would depend on the
units of the response.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import CLASSIFICATION, REGRESSION, Dataset
from .errors import (
    DataError,
    EstimationError,
    SingularFitError,
    SingularScatterError,
)
from .linalg import RANK_TOL, fit_ols

ADD = "add"
REMOVE = "remove"


def mallows_cp(sse: float, n: int, k: int, sigma2: float) -> float:
    """Cp = SSE / sigma2 - n + 2(k + 1), counting the intercept."""
    if sigma2 <= 0:
        raise DataError(f"sigma2 must be positive, got {sigma2}")
    if n <= k + 1:
        raise DataError(f"need n > k + 1 (n={n}, k={k})")
    if sse < 0:
        raise DataError(f"sse must be nonnegative, got {sse}")
    return sse / sigma2 - n + 2 * (k + 1)


class _RegressionGram:
    """Cached cross-products for fast intercept-included subset SSE.

    SSE(S) is obtained from the Gram matrix of [1, X] restricted to S via a
    Cholesky solve; equivalent to a from-scratch refit on well-conditioned
    subsets, which is what the tests assert.
    """

    def __init__(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float).ravel()
        n = X.shape[0]
        A = np.column_stack([np.ones(n), X])
        self.n = n
        self.p = X.shape[1]
        self.gram = A.T @ A
        self.cross = A.T @ y
        self.yy = float(y @ y)

    def sse(self, subset) -> float:
        idx = [0] + [j + 1 for j in subset]
        G = self.gram[np.ix_(idx, idx)]
        b = self.cross[idx]
        try:
            L = np.linalg.cholesky(G)
        except np.linalg.LinAlgError:
            raise SingularFitError(
                f"singular Gram matrix for subset {tuple(subset)}", column=None
            ) from None
        diag = np.diag(L)
        if diag.min() <= RANK_TOL * diag.max():
            raise SingularFitError(
                f"near-singular Gram matrix for subset {tuple(subset)}", column=None
            )
        z = np.linalg.solve(L, b)
        return max(self.yy - float(z @ z), 0.0)


def estimate_sigma2(dataset: Dataset, override: float | None = None) -> float:
    """Residual-variance estimate for Cp.

    Uses the full-model mean squared error when the sample size allows it;
    otherwise falls back to the residual variance of a greedy forward path
    capped at n // 2 features (needed when p is close to or exceeds n and the
    full model is singular).
    """
    if override is not None:
        if override <= 0:
            raise DataError(f"sigma2 override must be positive, got {override}")
        return float(override)
    if dataset.task != REGRESSION:
        raise DataError("sigma2 estimation requires a regression dataset")
    n, p = dataset.n_samples, dataset.n_features
    if n < 4:
        raise DataError("need at least 4 samples to estimate sigma2")
    gram = _RegressionGram(dataset.X, dataset.target)
    if n > p + 2:
        sse = gram.sse(range(p))
        sigma2 = sse / (n - p - 1)
    else:
        cap = n // 2
        subset: list[int] = []
        sse = gram.sse(())
        while len(subset) < cap:
            best_drop, best_j = 0.0, None
            for j in range(p):
                if j in subset:
                    continue
                try:
                    drop = sse - gram.sse(subset + [j])
                except SingularFitError:
                    continue
                if drop > best_drop:
                    best_drop, best_j = drop, j
            if best_j is None:
                break
            subset.append(best_j)
            sse -= best_drop
        sigma2 = sse / (n - len(subset) - 1)
    if sigma2 <= 0:
        raise EstimationError(
            "estimated sigma2 is non-positive (near-zero residuals); "
            "pass an explicit override"
        )
    return float(sigma2)


@dataclass
class ScatterPair:
    """Between-class and within-class scatter of one feature subset."""

    s_b: np.ndarray
    s_w: np.ndarray
    class_counts: np.ndarray
    class_means: np.ndarray
    overall_mean: np.ndarray
    classes: np.ndarray


def scatter_matrices(X_subset, labels) -> ScatterPair:
    X = np.asarray(X_subset, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    labels = np.asarray(labels)
    n, d = X.shape
    if n < 2:
        raise DataError("need at least 2 samples for scatter matrices")
    if d == 0:
        raise DataError("scatter matrices need a nonempty feature subset")
    if len(labels) != n:
        raise DataError("labels length must match sample count")
    classes, inverse = np.unique(labels, return_inverse=True)
    counts = np.bincount(inverse)
    overall = X.mean(axis=0)
    means = np.zeros((len(classes), d))
    s_w = np.zeros((d, d))
    for c in range(len(classes)):
        Xc = X[inverse == c]
        means[c] = Xc.mean(axis=0)
        centered = Xc - means[c]
        s_w += centered.T @ centered
    dev = means - overall
    s_b = (dev * counts[:, None]).T @ dev
    s_b = (s_b + s_b.T) / 2
    s_w = (s_w + s_w.T) / 2
    return ScatterPair(
        s_b=s_b,
        s_w=s_w,
        class_counts=counts,
        class_means=means,
        overall_mean=overall,
        classes=classes,
    )


def trace_criterion(X_subset, labels, ridge: float = 0.0) -> float:
    """trace((S_w + lambda I)^-1 S_b) with lambda = ridge * tr(S_w) / d."""
    pair = scatter_matrices(X_subset, labels)
    return _trace_from_scatter(pair.s_w, pair.s_b, ridge)


def _trace_from_scatter(s_w, s_b, ridge: float) -> float:
    d = s_w.shape[0]
    if ridge < 0:
        raise DataError(f"ridge must be nonnegative, got {ridge}")
    lam = ridge * np.trace(s_w) / d
    if lam == 0.0 and ridge > 0:
        # zero within-class scatter: fall back to an absolute ridge
        lam = ridge
    M = s_w + lam * np.eye(d)
    try:
        solved = np.linalg.solve(M, s_b)
    except np.linalg.LinAlgError:
        raise SingularScatterError(
            "within-class scatter is singular; use a positive ridge"
        ) from None
    value = float(np.trace(solved))
    if not math.isfinite(value):
        raise SingularScatterError(
            "within-class scatter is numerically singular; use a positive ridge"
        )
    return value


class Criterion:
    """Base class: a criterion value per feature subset, plus bookkeeping.

    ``evals`` counts every subset evaluation; ``threshold_scale`` converts the
    user-facing alpha/beta thresholds to this criterion's gain scale.
    """

    orientation: str = "minimize"
    threshold_scale: float = 1.0

    def __init__(self):
        self.evals = 0

    def value(self, subset) -> float:
        self.evals += 1
        return self._value(tuple(subset))

    def _value(self, subset) -> float:  # pragma: no cover - abstract
        raise NotImplementedError


class CpCriterion(Criterion):
    """Mallows's Cp over intercept-included least-squares subsets."""

    orientation = "minimize"

    def __init__(self, dataset: Dataset, sigma2: float | None = None):
        super().__init__()
        if dataset.task != REGRESSION:
            raise DataError("Cp requires a regression dataset")
        self.dataset = dataset
        self.sigma2 = estimate_sigma2(dataset, sigma2)
        self._gram = _RegressionGram(dataset.X, dataset.target)
        tss = self._gram.sse(())
        # Gains are Cp differences ~ Delta(SSE)/sigma2; rescaling thresholds
        # by TSS/sigma2 makes alpha act on the fraction-of-TSS scale, which
        # keeps selections invariant to the units of y.
        self.threshold_scale = tss / self.sigma2 if tss > 0 else 1.0

    def _value(self, subset) -> float:
        sse = self._gram.sse(subset)
        return mallows_cp(sse, self._gram.n, len(subset), self.sigma2)


class TraceCriterion(Criterion):
    """Class-separability trace criterion over feature subsets."""

    orientation = "maximize"

    def __init__(self, X, labels, ridge: float = 1e-8):
        super().__init__()
        full = scatter_matrices(X, labels)
        self._s_b = full.s_b
        self._s_w = full.s_w
        self.ridge = float(ridge)
        self.classes = full.classes

    def _value(self, subset) -> float:
        if not subset:
            return 0.0
        idx = list(subset)
        s_w = self._s_w[np.ix_(idx, idx)]
        s_b = self._s_b[np.ix_(idx, idx)]
        return _trace_from_scatter(s_w, s_b, self.ridge)


@dataclass(frozen=True)
class CriterionState:
    """Immutable snapshot: current subset and its criterion value."""

    criterion: Criterion
    subset: tuple
    value: float


def initial_state(criterion: Criterion, subset=()) -> CriterionState:
    subset = tuple(subset)
    return CriterionState(criterion, subset, criterion.value(subset))


def criterion_gain(state: CriterionState, candidate: int, direction: str = ADD) -> float:
    """Signed improvement of one add/remove move; positive always means better.

    A singular refit on the modified subset yields -inf so the candidate can
    never be selected.
    """
    if direction == ADD:
        if candidate in state.subset:
            raise DataError(f"feature {candidate} already in subset")
        modified = state.subset + (candidate,)
    elif direction == REMOVE:
        if candidate not in state.subset:
            raise DataError(f"feature {candidate} not in subset")
        modified = tuple(f for f in state.subset if f != candidate)
    else:
        raise DataError(f"direction must be 'add' or 'remove', got {direction!r}")
    try:
        new_value = state.criterion.value(modified)
    except (SingularFitError, SingularScatterError):
        return -math.inf
    if state.criterion.orientation == "minimize":
        return state.value - new_value
    return new_value - state.value


def apply_move(state: CriterionState, candidate: int, direction: str, gain: float) -> CriterionState:
    """New state after a move whose gain is already known (no re-evaluation)."""
    if direction == ADD:
        subset = state.subset + (candidate,)
    else:
        subset = tuple(f for f in state.subset if f != candidate)
    if state.criterion.orientation == "minimize":
        value = state.value - gain
    else:
        value = state.value + gain
    return CriterionState(state.criterion, subset, value)


def build_criterion(dataset: Dataset, name: str, sigma2: float | None = None,
                    ridge: float = 1e-8) -> Criterion:
    if name == "cp":
        return CpCriterion(dataset, sigma2=sigma2)
    if name == "trace":
        if dataset.task != CLASSIFICATION:
            raise DataError("trace criterion requires a classification dataset")
        return TraceCriterion(dataset.X, dataset.target, ridge=ridge)
    raise DataError(f"unknown criterion {name!r} (expected 'cp' or 'trace')")
