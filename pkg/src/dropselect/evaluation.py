"""Real-data pipeline: standardization, stratified splits, an LDA classifier,
a PCA baseline, and the selector-versus-extraction comparison."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .criteria import scatter_matrices
from .dataset import CLASSIFICATION, Dataset, StandardizationStats
from .errors import DataError, SingularScatterError
from .selectors import SELECTORS, SelectionConfig

DEFAULT_LDA_RIDGE = 1e-6
DEFAULT_PCA_TARGET = 0.985


def standardize(train: Dataset, test: Dataset | None = None):
    """Shift/scale every column by the training mean and population std.

    Constant training columns are centered but left unscaled and recorded in
    the stats. Test data, when given, is transformed with the training stats.
    """
    if train.n_samples == 0:
        raise DataError("cannot standardize an empty training set")
    mean = train.X.mean(axis=0)
    std = train.X.std(axis=0)
    constant = [int(j) for j in np.nonzero(std == 0)[0]]
    scale = np.where(std == 0, 1.0, std)
    stats = StandardizationStats(mean=mean, std=scale, constant_columns=constant)

    def transform(ds: Dataset) -> Dataset:
        return Dataset(
            X=(ds.X - mean) / scale,
            target=ds.target,
            column_names=list(ds.column_names),
            task=ds.task,
            stats=stats,
        )

    if test is None:
        return transform(train)
    return transform(train), transform(test)


def train_test_split(dataset: Dataset, test_fraction: float = 0.3, seed: int = 0):
    """Seeded split; stratified by class for classification datasets."""
    if not 0 < test_fraction < 1:
        raise DataError("test_fraction must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    n = dataset.n_samples
    if dataset.task == CLASSIFICATION:
        test_idx = []
        for cls in np.unique(dataset.target):
            members = np.nonzero(dataset.target == cls)[0]
            members = rng.permutation(members)
            n_test = int(round(len(members) * test_fraction))
            n_test = min(n_test, len(members) - 1)  # keep every class in train
            test_idx.extend(members[:n_test])
        test_idx = np.sort(np.array(test_idx, dtype=int))
    else:
        perm = rng.permutation(n)
        test_idx = np.sort(perm[: int(round(n * test_fraction))])
    mask = np.zeros(n, dtype=bool)
    mask[test_idx] = True
    return dataset.subset_rows(~mask), dataset.subset_rows(mask)


@dataclass
class LdaModel:
    classes: np.ndarray
    means: np.ndarray
    pooled_cov: np.ndarray
    priors: np.ndarray
    weights: np.ndarray
    offsets: np.ndarray


def lda_fit(train: Dataset, ridge: float = DEFAULT_LDA_RIDGE) -> LdaModel:
    """Gaussian discriminant with pooled, ridge-regularized covariance."""
    if train.task != CLASSIFICATION:
        raise DataError("LDA requires a classification dataset")
    labels = train.target
    classes, inverse = np.unique(labels, return_inverse=True)
    if len(classes) < 2:
        raise DataError("LDA needs at least 2 classes")
    counts = np.bincount(inverse)
    if counts.min() < 2:
        raise DataError("every class needs at least 2 training samples")
    pair = scatter_matrices(train.X, labels)
    n, d = train.n_samples, train.n_features
    pooled = pair.s_w / (n - len(classes))
    lam = ridge * np.trace(pooled) / d
    pooled_reg = pooled + lam * np.eye(d)
    try:
        inv = np.linalg.inv(pooled_reg)
    except np.linalg.LinAlgError:
        raise SingularScatterError(
            "pooled covariance is singular; increase the LDA ridge"
        ) from None
    priors = counts / n
    weights = pair.class_means @ inv  # one row per class
    offsets = -0.5 * np.einsum("ij,ij->i", weights, pair.class_means) + np.log(priors)
    return LdaModel(
        classes=classes, means=pair.class_means, pooled_cov=pooled_reg,
        priors=priors, weights=weights, offsets=offsets,
    )


def lda_predict(model: LdaModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    scores = X @ model.weights.T + model.offsets
    # argmax keeps the first maximum, so ties break to the lower class index
    return model.classes[np.argmax(scores, axis=1)]


@dataclass
class PcaResult:
    train: np.ndarray
    test: np.ndarray | None
    explained: float
    n_components: int
    clamped: bool


def pca_fit_transform(train_X, test_X, k_or_variance) -> PcaResult:
    """Project onto the top principal directions of the training covariance.

    ``k_or_variance``: an int picks that many components (clamped to the data
    rank, with ``clamped`` flagged); a fraction in (0, 1) picks the smallest
    component count whose explained-variance fraction reaches it, capped at
    min(n - 1, p).
    """
    train_X = np.asarray(train_X, dtype=float)
    n, p = train_X.shape
    mean = train_X.mean(axis=0)
    centered = train_X - mean
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    variances = svals**2
    total = variances.sum()
    if total == 0:
        raise DataError("training data has zero variance; PCA is undefined")
    rank = int(np.sum(svals > svals[0] * 1e-12))
    cap = min(n - 1, p)
    clamped = False
    if isinstance(k_or_variance, (int, np.integer)) and not isinstance(k_or_variance, bool):
        k = int(k_or_variance)
        if k < 1:
            raise DataError("component count must be >= 1")
        if k > min(rank, cap):
            k = min(rank, cap)
            clamped = True
    else:
        target = float(k_or_variance)
        if not 0 < target <= 1:
            raise DataError("explained-variance target must lie in (0, 1]")
        cum = np.cumsum(variances) / total
        k = int(np.searchsorted(cum, target - 1e-12) + 1)
        k = min(k, rank, cap)
    directions = vt[:k].T
    explained = float(variances[:k].sum() / total)
    train_T = centered @ directions
    test_T = None
    if test_X is not None:
        test_T = (np.asarray(test_X, dtype=float) - mean) @ directions
    return PcaResult(
        train=train_T, test=test_T, explained=explained,
        n_components=k, clamped=clamped,
    )


def error_rate(predicted, truth) -> float:
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if len(predicted) == 0:
        raise DataError("error_rate needs at least one label")
    if len(predicted) != len(truth):
        raise DataError(
            f"length mismatch: {len(predicted)} predictions, {len(truth)} truths"
        )
    return float(np.mean(predicted != truth))


@dataclass
class MethodComparison:
    method: str
    test_error: float
    n_selected: int
    selected: list[int]
    wall_time_seconds: float
    criterion_evals: int
    extra: dict | None = None


@dataclass
class ComparisonReport:
    rows: list[MethodComparison]
    train_samples: int
    test_samples: int

    def row(self, method: str) -> MethodComparison:
        for r in self.rows:
            if r.method == method:
                return r
        raise KeyError(method)


def compare_pipeline(
    dataset: Dataset,
    config: SelectionConfig,
    methods=("dfb", "stepwise", "fb"),
    test: Dataset | None = None,
    test_fraction: float = 0.3,
    seed: int = 0,
    with_all_features: bool = False,
    with_pca: bool = False,
    pca_target: float = DEFAULT_PCA_TARGET,
    lda_ridge: float = DEFAULT_LDA_RIDGE,
) -> ComparisonReport:
    """Select on training data, fit LDA on the selected features, report
    test error per method; optional all-features and PCA baselines."""
    if dataset.task != CLASSIFICATION:
        raise DataError("compare_pipeline requires a classification dataset")
    if config.criterion != "trace":
        raise DataError("compare_pipeline selects with the trace criterion")
    for m in methods:
        if m not in SELECTORS:
            raise DataError(f"unknown method {m!r}; valid: {', '.join(sorted(SELECTORS))}")
    if test is None:
        train, test = train_test_split(dataset, test_fraction, seed)
    else:
        train = dataset
    train, test = standardize(train, test)
    rows = []
    for m in methods:
        try:
            report = SELECTORS[m](train, config)
        except Exception as exc:
            raise type(exc)(f"method {m}: {exc}") from exc
        selected = sorted(report.selected)
        if not selected:
            raise DataError(
                f"method {m} selected no features; lower alpha or check the data"
            )
        model = lda_fit(_restrict(train, selected), ridge=lda_ridge)
        pred = lda_predict(model, test.X[:, selected])
        rows.append(MethodComparison(
            method=m,
            test_error=error_rate(pred, test.target),
            n_selected=len(selected),
            selected=selected,
            wall_time_seconds=report.wall_time_seconds,
            criterion_evals=report.criterion_evals,
        ))
    if with_all_features:
        model = lda_fit(train, ridge=lda_ridge)
        pred = lda_predict(model, test.X)
        rows.append(MethodComparison(
            method="all-features",
            test_error=error_rate(pred, test.target),
            n_selected=train.n_features,
            selected=list(range(train.n_features)),
            wall_time_seconds=0.0,
            criterion_evals=0,
        ))
    if with_pca:
        pca = pca_fit_transform(train.X, test.X, pca_target)
        pca_train = Dataset(
            X=pca.train, target=train.target,
            column_names=[f"pc{i + 1}" for i in range(pca.n_components)],
            task=CLASSIFICATION,
        )
        model = lda_fit(pca_train, ridge=lda_ridge)
        pred = lda_predict(model, pca.test)
        rows.append(MethodComparison(
            method="pca-baseline",
            test_error=error_rate(pred, test.target),
            n_selected=pca.n_components,
            selected=[],
            wall_time_seconds=0.0,
            criterion_evals=0,
            extra={"explained_variance": pca.explained},
        ))
    return ComparisonReport(
        rows=rows, train_samples=train.n_samples, test_samples=test.n_samples
    )


def _restrict(dataset: Dataset, columns) -> Dataset:
    return Dataset(
        X=dataset.X[:, columns],
        target=dataset.target,
        column_names=[dataset.column_names[j] for j in columns],
        task=dataset.task,
        stats=dataset.stats,
    )
