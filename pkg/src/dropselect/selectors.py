"""The five wrapper selection procedures.

All selectors are criterion-agnostic: they see only signed gains, the
enter/remove thresholds and the (optional) feature cap, and they emit a full
step trace with counters so runs can be replayed and audited.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from .criteria import (
    ADD,
    REMOVE,
    Criterion,
    CriterionState,
    apply_move,
    build_criterion,
    criterion_gain,
    initial_state,
)
from .dataset import Dataset
from .errors import DataError

FORWARD = "forward"
BACKWARD = "backward"
DROP = "drop"
RE_FORWARD = "re-forward"

SELECTOR_NAMES = ("forward", "backward", "stepwise", "fb", "dfb")


@dataclass
class SelectionConfig:
    """Thresholds and criterion choice for one selection run.

    alpha is the minimum gain to enter a feature; beta the maximum criterion
    degradation tolerated when removing one; drop_beta (defaults to beta)
    governs candidate dropping in the dropping forward-backward scheme.
    Thresholds are interpreted on the criterion's normalized gain scale.
    """

    alpha: float
    beta: float
    drop_beta: float | None = None
    max_features: int | None = None
    criterion: str = "cp"
    sigma2_override: float | None = None
    ridge: float = 1e-8
    seed: int | None = None

    def __post_init__(self):
        if self.max_features is not None and self.max_features < 0:
            raise DataError("max_features must be nonnegative")


@dataclass(frozen=True)
class SelectionStep:
    kind: str
    features: tuple
    gain: float
    value_after: float


@dataclass
class SelectionReport:
    selected: list[int]
    steps: list[SelectionStep]
    backward_steps_taken: int
    criterion_evals: int
    wall_time_seconds: float
    final_criterion_value: float


class _Search:
    """Shared state machine driving all selector variants."""

    def __init__(self, criterion: Criterion, config: SelectionConfig, p: int):
        self.criterion = criterion
        self.config = config
        self.p = p
        scale = criterion.threshold_scale
        self.enter_threshold = config.alpha * scale
        self.remove_threshold = config.beta * scale
        drop_beta = config.beta if config.drop_beta is None else config.drop_beta
        self.drop_threshold = drop_beta * scale if math.isfinite(drop_beta) else drop_beta
        self.state = initial_state(criterion)
        self.selected: list[int] = []
        self.steps: list[SelectionStep] = []
        self.backward_steps = 0

    def _at_cap(self) -> bool:
        cap = self.config.max_features
        return cap is not None and len(self.selected) >= cap

    def scan(self, pool):
        """Gains for every candidate in the pool, in ascending index order."""
        return [(f, criterion_gain(self.state, f, ADD)) for f in sorted(pool)]

    @staticmethod
    def best(gains):
        best_f, best_g = None, -math.inf
        for f, g in gains:
            if g > best_g:
                best_f, best_g = f, g
        return best_f, best_g

    def add(self, feature, gain, kind):
        self.state = apply_move(self.state, feature, ADD, gain)
        self.selected.append(feature)
        self.steps.append(SelectionStep(kind, (feature,), gain, self.state.value))

    def forward_pass(self, pool: set, kind: str = FORWARD):
        """Plain greedy additions until no gain exceeds the enter threshold."""
        while pool and not self._at_cap():
            f, g = self.best(self.scan(pool))
            if f is None or g <= self.enter_threshold:
                break
            self.add(f, g, kind)
            pool.discard(f)

    def backward_pass(self):
        """Remove minimal-degradation features while degradation <= beta."""
        while self.selected:
            best_f, best_d = None, math.inf
            for f in sorted(self.selected):
                degradation = -criterion_gain(self.state, f, REMOVE)
                if degradation < best_d:
                    best_f, best_d = f, degradation
            if best_f is None or best_d > self.remove_threshold:
                break
            self.state = apply_move(self.state, best_f, REMOVE, -best_d)
            self.selected.remove(best_f)
            self.steps.append(
                SelectionStep(BACKWARD, (best_f,), -best_d, self.state.value)
            )
            self.backward_steps += 1

    def report(self, wall_time: float) -> SelectionReport:
        return SelectionReport(
            selected=list(self.selected),
            steps=self.steps,
            backward_steps_taken=self.backward_steps,
            criterion_evals=self.criterion.evals,
            wall_time_seconds=wall_time,
            final_criterion_value=self.state.value,
        )


def _timed(func):
    start = time.perf_counter()
    search = func()
    return search.report(time.perf_counter() - start)


def _make_search(dataset: Dataset, config: SelectionConfig) -> _Search:
    criterion = build_criterion(
        dataset, config.criterion, sigma2=config.sigma2_override, ridge=config.ridge
    )
    if config.max_features is not None and config.max_features > dataset.n_features:
        raise DataError(
            f"max_features {config.max_features} exceeds feature count "
            f"{dataset.n_features}"
        )
    return _Search(criterion, config, dataset.n_features)


def forward_select(dataset: Dataset, config: SelectionConfig) -> SelectionReport:
    """Greedy forward selection with enter threshold alpha."""

    def run():
        search = _make_search(dataset, config)
        search.forward_pass(set(range(dataset.n_features)))
        return search

    return _timed(run)


def backward_eliminate(dataset: Dataset, config: SelectionConfig, initial) -> SelectionReport:
    """Backward elimination from an explicit initial feature set."""
    initial = list(initial)
    if len(set(initial)) != len(initial):
        raise DataError(f"initial set contains duplicates: {initial}")
    for f in initial:
        if not 0 <= f < dataset.n_features:
            raise DataError(f"initial feature {f} out of range")

    def run():
        criterion = build_criterion(
            dataset, config.criterion, sigma2=config.sigma2_override, ridge=config.ridge
        )
        search = _Search(criterion, config, dataset.n_features)
        # evaluating the initial set raises on a singular fit, per contract
        search.state = initial_state(criterion, tuple(initial))
        search.selected = list(initial)
        search.backward_pass()
        return search

    return _timed(run)


def stepwise_select(dataset: Dataset, config: SelectionConfig) -> SelectionReport:
    """One forward step, then a full backward sweep, until forward stalls."""

    def run():
        search = _make_search(dataset, config)
        seen_subsets = set()
        while not search._at_cap():
            pool = set(range(dataset.n_features)) - set(search.selected)
            if not pool:
                break
            f, g = search.best(search.scan(pool))
            if f is None or g <= search.enter_threshold:
                break
            search.add(f, g, FORWARD)
            search.backward_pass()
            key = frozenset(search.selected)
            if key in seen_subsets:
                # add/remove cycle (possible when beta > alpha); stop cleanly
                break
            seen_subsets.add(key)
        return search

    return _timed(run)


def forward_backward_select(dataset: Dataset, config: SelectionConfig) -> SelectionReport:
    """Complete forward pass, then one backward-elimination pass."""

    def run():
        search = _make_search(dataset, config)
        search.forward_pass(set(range(dataset.n_features)))
        search.backward_pass()
        return search

    return _timed(run)


def dropping_fb_select(dataset: Dataset, config: SelectionConfig) -> SelectionReport:
    """Dropping forward-backward scheme.

    Phase 1 adds the best candidate per scan and drops, from the active pool,
    every candidate whose gain in that same scan is at or below drop_beta.
    Phase 2 re-runs plain forward over all not-yet-selected features.
    Phase 3 is a final backward pass.
    """

    def run():
        search = _make_search(dataset, config)
        pool = set(range(dataset.n_features))
        while pool and not search._at_cap():
            gains = search.scan(pool)
            f, g = search.best(gains)
            if f is None or g <= search.enter_threshold:
                break
            search.add(f, g, FORWARD)
            pool.discard(f)
            for cand, cand_gain in gains:
                if cand != f and cand_gain <= search.drop_threshold:
                    pool.discard(cand)
                    search.steps.append(
                        SelectionStep(DROP, (cand,), cand_gain, search.state.value)
                    )
        pool = set(range(dataset.n_features)) - set(search.selected)
        search.forward_pass(pool, kind=RE_FORWARD)
        search.backward_pass()
        return search

    return _timed(run)


SELECTORS = {
    "forward": forward_select,
    "stepwise": stepwise_select,
    "fb": forward_backward_select,
    "dfb": dropping_fb_select,
}


def run_selector(method: str, dataset: Dataset, config: SelectionConfig,
                 initial=None) -> SelectionReport:
    if method == "backward":
        if initial is None:
            initial = list(range(dataset.n_features))
        return backward_eliminate(dataset, config, initial)
    try:
        selector = SELECTORS[method]
    except KeyError:
        raise DataError(
            f"unknown method {method!r}; valid methods: "
            f"{', '.join(SELECTOR_NAMES)}"
        ) from None
    return selector(dataset, config)
