"""Seeded synthetic data generation and the Monte Carlo benchmark harness."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, REGRESSION, default_column_names
from .errors import DataError, DropselectError, NumericalError
from .selectors import SELECTORS, SelectionConfig

# 1-based feature positions and coefficients of the simulated regression model
BUILTIN_COEFFICIENTS = {1: 3.0, 2: 2.1, 7: 3.5, 12: 0.8}
BUILTIN_INTERCEPT = 4.5
BUILTIN_NOISE_VARIANCE = 2.0

_CORR_REPAIR_RETRIES = 5
_MIN_EIGENVALUE = 1e-8


@dataclass
class SimulationSpec:
    """Design of one simulated regression experiment.

    ``coefficients`` maps 0-based feature indices to signal values. When it is
    None, the first ``model_size`` features carry the signal: a fixed
    ``signal_value`` each, or per-replication Uniform draws over
    ``signal_range`` when that is set. The noise is Gaussian with variance
    ``noise_variance``.
    """

    n: int
    p: int
    coefficients: dict[int, float] | None = None
    model_size: int | None = None
    signal_value: float = 2.5
    signal_range: tuple[float, float] | None = None
    intercept: float = 4.5
    noise_variance: float = 2.0
    max_corr: float = 0.0
    replications: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.replications < 1:
            raise DataError("replications must be >= 1")
        if self.noise_variance <= 0:
            raise DataError("noise_variance must be positive")
        if not 0 <= self.max_corr < 1:
            raise DataError("max_corr must lie in [0, 1)")
        if self.coefficients is not None:
            for idx in self.coefficients:
                if not 0 <= idx < self.p:
                    raise DataError(f"coefficient index {idx} out of range")
        elif self.model_size is not None:
            if not 0 <= self.model_size <= self.p:
                raise DataError("model_size out of range")
        else:
            raise DataError("specify either coefficients or model_size")

    def draw_coefficients(self, rng: np.random.Generator) -> dict[int, float]:
        if self.coefficients is not None:
            return dict(self.coefficients)
        if self.signal_range is not None:
            lo, hi = self.signal_range
            values = rng.uniform(lo, hi, self.model_size)
        else:
            values = np.full(self.model_size, self.signal_value)
        return {i: float(values[i]) for i in range(self.model_size)}


def builtin_model_spec(p: int = 80, n: int = 80, replications: int = 1,
                       seed: int = 0, max_corr: float = 0.0) -> SimulationSpec:
    """The simulated model with signal on features 1, 2, 7 and 12 (1-based)."""
    coeffs = {i - 1: c for i, c in BUILTIN_COEFFICIENTS.items()}
    return SimulationSpec(
        n=n, p=p, coefficients=coeffs, intercept=BUILTIN_INTERCEPT,
        noise_variance=BUILTIN_NOISE_VARIANCE, max_corr=max_corr,
        replications=replications, seed=seed,
    )


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_correlation_matrix(p: int, max_corr: float, seed) -> np.ndarray:
    """Random positive-definite correlation matrix with off-diagonals drawn
    from Uniform(0, max_corr), repaired by eigenvalue clipping."""
    if not 0 <= max_corr < 1:
        raise DataError("max_corr must lie in [0, 1)")
    rng = _as_rng(seed)
    if max_corr == 0:
        return np.eye(p)
    for _ in range(_CORR_REPAIR_RETRIES):
        upper = rng.uniform(0, max_corr, size=(p, p))
        corr = np.triu(upper, 1)
        corr = corr + corr.T + np.eye(p)
        eigval, eigvec = np.linalg.eigh(corr)
        if eigval.min() < _MIN_EIGENVALUE:
            eigval = np.clip(eigval, 1e-6, None)
            corr = eigvec @ np.diag(eigval) @ eigvec.T
            scale = np.sqrt(np.diag(corr))
            corr = corr / np.outer(scale, scale)
            eigval = np.linalg.eigvalsh(corr)
        if eigval.min() >= _MIN_EIGENVALUE:
            return (corr + corr.T) / 2
    raise NumericalError(
        f"failed to repair a positive-definite correlation matrix "
        f"(p={p}, max_corr={max_corr})"
    )


def sample_mvn(n: int, correlation: np.ndarray, seed) -> np.ndarray:
    """n samples from a zero-mean multivariate normal with the given
    correlation matrix."""
    rng = _as_rng(seed)
    correlation = np.asarray(correlation, dtype=float)
    p = correlation.shape[0]
    if n == 0:
        return np.empty((0, p))
    try:
        chol = np.linalg.cholesky(correlation)
    except np.linalg.LinAlgError:
        raise NumericalError("correlation matrix is not positive definite") from None
    return rng.standard_normal((n, p)) @ chol.T


def simulate_regression(spec: SimulationSpec, seed=None) -> Dataset:
    """One draw of the simulated design and response."""
    rng = _as_rng(spec.seed if seed is None else seed)
    correlation = random_correlation_matrix(spec.p, spec.max_corr, rng)
    X = sample_mvn(spec.n, correlation, rng)
    coeffs = spec.draw_coefficients(rng)
    y = np.full(spec.n, float(spec.intercept))
    for idx, value in coeffs.items():
        y = y + value * X[:, idx]
    y = y + rng.normal(0.0, np.sqrt(spec.noise_variance), spec.n)
    return Dataset(
        X=X, target=y, column_names=default_column_names(spec.p), task=REGRESSION
    )


@dataclass
class MethodSummary:
    method: str
    mean_selected: float
    mean_backward_steps: float
    mean_wall_time: float
    mean_criterion_evals: float


@dataclass
class MonteCarloSummary:
    replications: int
    methods: dict[str, MethodSummary]
    spec: SimulationSpec = None


def run_monte_carlo(spec: SimulationSpec, methods, config: SelectionConfig) -> MonteCarloSummary:
    """Run each method on every replication's dataset and average the stats.

    Replication r uses the r-th child of SeedSequence(spec.seed), so each
    replication is reproducible independently of execution order; within a
    replication all methods see the same data.
    """
    for m in methods:
        if m not in SELECTORS:
            raise DataError(f"unknown method {m!r}; Monte Carlo supports "
                            f"{', '.join(sorted(SELECTORS))}")
    totals = {m: np.zeros(4) for m in methods}
    children = np.random.SeedSequence(spec.seed).spawn(spec.replications)
    for r, child in enumerate(children):
        dataset = simulate_regression(spec, seed=np.random.default_rng(child))
        for m in methods:
            try:
                report = SELECTORS[m](dataset, config)
            except DropselectError as exc:
                raise type(exc)(
                    f"replication {r}, method {m}: {exc}"
                ) from exc
            totals[m] += [
                len(report.selected),
                report.backward_steps_taken,
                report.wall_time_seconds,
                report.criterion_evals,
            ]
    summaries = {
        m: MethodSummary(
            method=m,
            mean_selected=t[0] / spec.replications,
            mean_backward_steps=t[1] / spec.replications,
            mean_wall_time=t[2] / spec.replications,
            mean_criterion_evals=t[3] / spec.replications,
        )
        for m, t in totals.items()
    }
    return MonteCarloSummary(
        replications=spec.replications, methods=summaries, spec=spec
    )
