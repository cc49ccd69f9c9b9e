import itertools
import math

import numpy as np
import pytest

from dropselect.criteria import CpCriterion
from dropselect.dataset import CLASSIFICATION, Dataset, REGRESSION, default_column_names
from dropselect.errors import DataError
from dropselect.linalg import sse_of_subset
from dropselect.selectors import (
    SelectionConfig,
    backward_eliminate,
    dropping_fb_select,
    forward_backward_select,
    forward_select,
    run_selector,
    stepwise_select,
)


def regression_dataset(X, y):
    return Dataset(X=X, target=y, column_names=default_column_names(X.shape[1]),
                   task=REGRESSION)


def planted_dataset(seed=0, n=60, p=12, signal=(0, 3, 7), coef=3.0, noise=1.0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    y = 1.0 + sum(coef * X[:, j] for j in signal) + rng.normal(0, noise, n)
    return regression_dataset(X, y)


def cp_config(**kwargs):
    defaults = dict(alpha=0.01, beta=0.01, sigma2_override=1.0)
    defaults.update(kwargs)
    return SelectionConfig(**defaults)


def greedy_forward_oracle(ds, sigma2, alpha):
    """Independent forward selection built on from-scratch refits only."""
    n = ds.X.shape[0]
    tss = float(np.sum((ds.target - ds.target.mean()) ** 2))
    threshold = alpha * tss / sigma2
    selected = []
    current_cp = None
    while len(selected) < ds.X.shape[1]:
        best = None
        for j in range(ds.X.shape[1]):
            if j in selected:
                continue
            sse = sse_of_subset(ds, selected + [j])
            cp = sse / sigma2 - n + 2 * (len(selected) + 2)
            if best is None or cp < best[1]:
                best = (j, cp)
        if current_cp is None:
            base = sse_of_subset(ds, selected)
            current_cp = base / sigma2 - n + 2 * (len(selected) + 1)
        if best is None or current_cp - best[1] <= threshold:
            break
        selected.append(best[0])
        current_cp = best[1]
    return selected


class TestForward:
    def test_recovers_planted_support(self):
        ds = planted_dataset(seed=1)
        report = forward_select(ds, cp_config())
        assert set(report.selected) == {0, 3, 7}

    def test_matches_independent_oracle(self):
        for seed in range(8):
            ds = planted_dataset(seed=seed, n=40, p=8, signal=(1, 5))
            report = forward_select(ds, cp_config())
            oracle = greedy_forward_oracle(ds, sigma2=1.0, alpha=0.01)
            assert report.selected == oracle

    def test_selection_order_by_signal_strength(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((100, 4))
        y = 10 * X[:, 2] + 3 * X[:, 0] + rng.normal(0, 0.5, 100)
        report = forward_select(regression_dataset(X, y), cp_config())
        assert report.selected[:2] == [2, 0]

    def test_huge_alpha_selects_nothing(self):
        ds = planted_dataset(seed=3)
        report = forward_select(ds, cp_config(alpha=1e9))
        assert report.selected == []
        assert report.backward_steps_taken == 0

    def test_max_features_cap(self):
        ds = planted_dataset(seed=4)
        report = forward_select(ds, cp_config(max_features=2))
        assert len(report.selected) == 2

    def test_cap_exceeding_p_rejected(self):
        ds = planted_dataset(seed=5, p=6, signal=(0, 3))
        with pytest.raises(DataError):
            forward_select(ds, cp_config(max_features=7))

    def test_steps_trace_is_consistent(self):
        ds = planted_dataset(seed=6)
        report = forward_select(ds, cp_config())
        assert [s.features[0] for s in report.steps] == report.selected
        assert all(s.kind == "forward" for s in report.steps)
        crit = CpCriterion(ds, sigma2=1.0)
        assert report.final_criterion_value == pytest.approx(
            crit.value(tuple(report.selected)), abs=1e-9)

    def test_tie_break_lowest_index(self):
        # duplicate the signal column so indices 0 and 1 have identical gains
        rng = np.random.default_rng(7)
        base = rng.standard_normal(50)
        X = np.column_stack([base, base.copy(), rng.standard_normal(50)])
        y = 4 * base + rng.normal(0, 1.0, 50)
        report = forward_select(regression_dataset(X, y), cp_config(max_features=1))
        assert report.selected == [0]


class TestBackward:
    def test_eliminates_pure_noise_features(self):
        ds = planted_dataset(seed=8)
        report = backward_eliminate(ds, cp_config(beta=0.01), range(12))
        assert set(report.selected) == {0, 3, 7}
        assert report.backward_steps_taken == 9

    def test_zero_beta_keeps_everything_in_noise_free_tie(self):
        ds = planted_dataset(seed=9)
        report = backward_eliminate(ds, cp_config(beta=-1e9), range(12))
        assert report.selected == list(range(12))

    def test_initial_set_validation(self):
        ds = planted_dataset(seed=10, p=5, signal=(0, 3))
        with pytest.raises(DataError):
            backward_eliminate(ds, cp_config(), [0, 0, 1])
        with pytest.raises(DataError):
            backward_eliminate(ds, cp_config(), [0, 9])

    def test_removal_order_weakest_first(self):
        rng = np.random.default_rng(11)
        X = rng.standard_normal((120, 3))
        y = 6 * X[:, 0] + 0.05 * X[:, 1] + rng.normal(0, 1.0, 120)
        report = backward_eliminate(regression_dataset(X, y),
                                    cp_config(beta=1e9), [0, 1, 2])
        removed = [s.features[0] for s in report.steps]
        # strongest signal feature must be the last one removed
        assert removed[-1] == 0

    def test_steps_all_backward_kind(self):
        ds = planted_dataset(seed=12)
        report = backward_eliminate(ds, cp_config(), range(12))
        assert all(s.kind == "backward" for s in report.steps)
        assert report.backward_steps_taken == len(report.steps)


class TestStepwise:
    def test_recovers_planted_support(self):
        ds = planted_dataset(seed=13)
        report = stepwise_select(ds, cp_config())
        assert set(report.selected) == {0, 3, 7}

    def test_backward_step_can_undo_an_early_entry(self):
        # x2 is nearly (but not exactly) x0 + x1: it enters first as a proxy
        # for both, then becomes redundant once the true pair is in.
        rng = np.random.default_rng(210)
        n = 400
        x0 = rng.standard_normal(n)
        x1 = rng.standard_normal(n)
        x2 = x0 + x1 + rng.normal(0, 0.3, n)
        X = np.column_stack([x0, x1, x2, rng.standard_normal(n)])
        y = 3 * x0 + 1.5 * x1 + rng.normal(0, 1.0, n)
        report = stepwise_select(regression_dataset(X, y),
                                 cp_config(alpha=0.001, beta=0.001))
        entered = [s.features[0] for s in report.steps if s.kind == "forward"]
        removed = [s.features[0] for s in report.steps if s.kind == "backward"]
        assert 2 in entered and 2 in removed
        assert set(report.selected) == {0, 1}
        assert report.backward_steps_taken >= 1

    def test_matches_forward_when_no_removals_fire(self):
        for seed in range(6):
            ds = planted_dataset(seed=40 + seed)
            fwd = forward_select(ds, cp_config())
            sw = stepwise_select(ds, cp_config())
            if sw.backward_steps_taken == 0:
                assert sorted(sw.selected) == sorted(fwd.selected)

    def test_terminates_with_adversarial_thresholds(self):
        # beta much larger than alpha invites add/remove cycling
        ds = planted_dataset(seed=14, n=30, p=6, signal=(0, 3), coef=0.8, noise=2.0)
        report = stepwise_select(ds, cp_config(alpha=0.001, beta=0.5))
        assert len(report.steps) < 1000


class TestForwardBackward:
    def test_recovers_planted_support(self):
        ds = planted_dataset(seed=15)
        report = forward_backward_select(ds, cp_config())
        assert set(report.selected) == {0, 3, 7}

    def test_equals_forward_then_backward_composition(self):
        ds = planted_dataset(seed=16, n=50, p=10, coef=1.2, noise=1.5)
        config = cp_config(alpha=0.005, beta=0.02)
        combined = forward_backward_select(ds, config)
        fwd = forward_select(ds, config)
        back = backward_eliminate(ds, config, fwd.selected)
        assert sorted(combined.selected) == sorted(back.selected)
        assert combined.backward_steps_taken == back.backward_steps_taken

    def test_step_kinds_partitioned(self):
        ds = planted_dataset(seed=17)
        report = forward_backward_select(ds, cp_config())
        kinds = [s.kind for s in report.steps]
        if "backward" in kinds:
            assert kinds.index("backward") >= kinds.count("forward")


class TestDroppingFb:
    def test_recovers_planted_support(self):
        ds = planted_dataset(seed=18)
        report = dropping_fb_select(ds, cp_config())
        assert set(report.selected) == {0, 3, 7}

    def test_drops_recorded_and_pool_shrinks(self):
        ds = planted_dataset(seed=19, n=80, p=30)
        report = dropping_fb_select(ds, cp_config())
        drops = [s for s in report.steps if s.kind == "drop"]
        assert drops, "noise-heavy design should trigger drops"
        for step in drops:
            assert step.gain <= 0.01 * CpCriterion(
                ds, sigma2=1.0).threshold_scale + 1e-12

    def test_dropped_features_can_return_in_phase_two(self):
        # Feature 1 only helps once feature 0 is in (complementary pair),
        # so it is droppable early but must survive via the re-forward pass.
        rng = np.random.default_rng(220)
        n = 300
        x0 = rng.standard_normal(n)
        x1 = rng.standard_normal(n)
        X = np.column_stack([x0 + x1, x1, rng.standard_normal((n, 3))])
        y = 5 * x0 + rng.normal(0, 0.5, n)  # = 5*(X0 - X1) + noise
        report = dropping_fb_select(
            regression_dataset(X, y),
            cp_config(alpha=0.01, beta=0.01, drop_beta=0.01, sigma2_override=0.25))
        assert {0, 1} <= set(report.selected)

    def test_same_final_set_as_fb_on_clean_designs(self):
        for seed in range(6):
            ds = planted_dataset(seed=50 + seed)
            dfb = dropping_fb_select(ds, cp_config())
            fb = forward_backward_select(ds, cp_config())
            assert sorted(dfb.selected) == sorted(fb.selected)

    def test_fewer_evals_than_fb_on_noise_heavy_design(self):
        ds = planted_dataset(seed=20, n=80, p=60)
        dfb = dropping_fb_select(ds, cp_config())
        fb = forward_backward_select(ds, cp_config())
        assert dfb.criterion_evals < fb.criterion_evals

    def test_eval_accounting_identity(self):
        # forward scans cost (pool size) evals each; replay the trace and
        # check the reported counter matches an independent tally
        ds = planted_dataset(seed=21, n=60, p=20)
        report = dropping_fb_select(ds, cp_config())
        p = 20
        pool = p
        expected = 1  # initial empty-subset evaluation
        n_selected = 0
        for step in report.steps:
            if step.kind == "forward":
                expected += pool
                pool -= 1
                n_selected += 1
            elif step.kind == "drop":
                pool -= 1
        # terminal phase-1 scan (if phase 1 ended on a failed scan)
        expected += pool
        # phase 2: pool resets to all not-selected features
        pool2 = p - n_selected
        for step in report.steps:
            if step.kind == "re-forward":
                expected += pool2
                pool2 -= 1
                n_selected += 1
        expected += pool2  # terminal phase-2 scan
        # phase 3 backward sweeps
        sel = n_selected
        for step in report.steps:
            if step.kind == "backward":
                expected += sel
                sel -= 1
        expected += sel  # terminal backward scan (zero when nothing is left)
        assert report.criterion_evals == expected

    def test_drop_beta_minus_inf_disables_dropping(self):
        ds = planted_dataset(seed=22, n=60, p=15)
        report = dropping_fb_select(ds, cp_config(drop_beta=-math.inf))
        assert not any(s.kind == "drop" for s in report.steps)


class TestRunSelector:
    def test_dispatch_matches_direct_calls(self):
        ds = planted_dataset(seed=23)
        config = cp_config()
        assert (run_selector("forward", ds, config).selected
                == forward_select(ds, config).selected)
        assert (run_selector("dfb", ds, config).selected
                == dropping_fb_select(ds, config).selected)

    def test_backward_defaults_to_full_set(self):
        ds = planted_dataset(seed=24)
        report = run_selector("backward", ds, cp_config())
        assert set(report.selected) == {0, 3, 7}

    def test_unknown_method(self):
        ds = planted_dataset(seed=25)
        with pytest.raises(DataError):
            run_selector("lasso", ds, cp_config())


class TestTraceSelection:
    def make_classification(self, seed=26, n=90, p=10, signal=(0, 4)):
        rng = np.random.default_rng(seed)
        labels = np.array(["a", "b"])[rng.integers(0, 2, n)]
        X = rng.standard_normal((n, p))
        for j in signal:
            X[:, j] += np.where(labels == "a", 1.6, -1.6)
        return Dataset(X=X, target=labels, column_names=default_column_names(p),
                       task=CLASSIFICATION)

    def test_forward_finds_discriminative_features(self):
        ds = self.make_classification()
        config = SelectionConfig(alpha=0.2, beta=0.2, criterion="trace")
        report = forward_select(ds, config)
        assert {0, 4} <= set(report.selected)

    def test_all_selectors_run_on_trace(self):
        ds = self.make_classification(seed=27)
        config = SelectionConfig(alpha=0.2, beta=0.2, criterion="trace",
                                 max_features=6)
        for method in ("forward", "stepwise", "fb", "dfb"):
            report = run_selector(method, ds, config)
            assert {0, 4} <= set(report.selected)
