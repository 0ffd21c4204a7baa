import numpy as np
import pytest

import pgmmreg.boosting as boosting
from pgmmreg.boosting import early_stop_threshold, fit_lp_boost, lp_grad, lp_hess, lp_loss, predict_boost
from pgmmreg.data import Dataset
from pgmmreg.trees import apply_bins, build_bins, grow_tree


def _friedman(n, seed, noise=0.1):
    rng = np.random.default_rng(seed)
    X = rng.random((n, 5))
    y = 10 * np.sin(np.pi * X[:, 0] * X[:, 1]) + 20 * (X[:, 2] - 0.5) ** 2 + 10 * X[:, 3] + 5 * X[:, 4]
    return Dataset(X, y + noise * rng.normal(size=n))


def test_lp_loss_examples():
    assert lp_loss([1.0, 2.0], [1.0, 2.0], 3) == 0
    assert lp_loss([2.0], [0.0], 2) == 4
    assert lp_loss([1.0, -1.0], [0.0, 0.0], 3) == 1
    with pytest.raises(ValueError):
        lp_loss([1.0], [1.0, 2.0], 2)


def test_lp_grad_examples():
    assert lp_grad(1.0, 0.0, 2) == -2
    assert lp_grad(0.0, 2.0, 3) == 12
    assert lp_grad(1.0, 1.0, 1.0) == 0
    assert lp_grad(3.0, 1.0, 1.0) == -1


def test_lp_hess_examples():
    assert np.all(lp_hess(np.array([0.0, 3.0, -7.5]), np.array([0.0, 1.0, 2.0]), 2) == 2)
    assert lp_hess(5.0, 0.0, 3) == 30
    assert lp_hess(1.0, 1.0, 4) == 0
    with pytest.raises(ValueError):
        lp_hess(1.0, 0.0, 1.5)


@pytest.mark.parametrize("p", [1.5, 2, 2.5, 3, 4, 4.5])
def test_grad_central_difference(p):
    rng = np.random.default_rng(int(p * 10))
    y = rng.normal(size=200)
    r = rng.uniform(0.1, 3.0, 200) * rng.choice([-1, 1], 200)
    F = y - r
    step = 1e-6
    num = (np.abs(y - F - step) ** p - np.abs(y - F + step) ** p) / (2 * step)
    np.testing.assert_allclose(lp_grad(y, F, p), num, rtol=1e-5)


@pytest.mark.parametrize("p", [2, 3, 4.5])
def test_hess_central_difference(p):
    rng = np.random.default_rng(int(p * 10) + 1)
    y = rng.normal(size=200)
    F = y - rng.uniform(0.1, 3.0, 200) * rng.choice([-1, 1], 200)
    step = 1e-6
    num = (lp_grad(y, F + step, p) - lp_grad(y, F - step, p)) / (2 * step)
    np.testing.assert_allclose(lp_hess(y, F, p), num, rtol=1e-5)


def test_early_stop_threshold_examples():
    assert early_stop_threshold([1.0, 1.0], 2, 1e-5) == pytest.approx(1e-5, rel=1e-14)
    assert early_stop_threshold([1.0, -3.0], 3, 1.0) == 14
    assert early_stop_threshold([0.0, 0.0], 2) == 0


def test_constant_target_stops_after_one_iteration():
    data = Dataset(np.ones((4, 1)), [4.0, 4.0, 4.0, 4.0])
    model = fit_lp_boost(data, p=2, J=2, nu=1.0, M=50)
    assert model.iterations_run == 1 and model.stopped_early
    assert model.trees[0].n_leaves == 1 and model.trees[0].value[0] == 4
    assert model.train_loss_history.tolist() == [0.0]
    assert predict_boost(model, [[1.0], [7.0]]).tolist() == [4.0, 4.0]


def test_shrinkage_geometric_recursion():
    data = Dataset(np.ones((4, 1)), [4.0] * 4)
    model = fit_lp_boost(data, p=2, J=2, nu=0.1, M=30)
    assert model.iterations_run == 30 and not model.stopped_early
    for m in (1, 5, 30):
        assert predict_boost(model, [[1.0]], n_trees=m)[0] == pytest.approx(4 * (1 - 0.9**m), rel=1e-12)


def test_zero_trees_predict_zero():
    model = fit_lp_boost(_friedman(30, 0), p=2, J=4, M=3)
    assert predict_boost(model, np.ones((3, 5)), n_trees=0).tolist() == [0.0] * 3


def test_least_squares_boost_self_consistency():
    data = _friedman(200, 1)
    model = fit_lp_boost(data, p=2, J=6, nu=0.1, M=40)
    binner = build_bins(data.features, 255)
    codes = apply_bins(data.features, binner)
    F = np.zeros(data.n)
    for tree in model.trees:
        resid = data.targets - F
        ref = grow_tree(codes, -resid, np.ones(data.n), J=6)
        leaf = ref.apply(codes)
        # residual mean per leaf, a plain least-squares fit
        means = {k: resid[leaf == k].mean() for k in np.unique(leaf)}
        np.testing.assert_allclose(tree.predict(codes), [means[k] for k in leaf], rtol=1e-10, atol=1e-12)
        F = F + 0.1 * tree.predict(codes)


def test_training_predictions_match_internal_state():
    data = _friedman(150, 2)
    model = fit_lp_boost(data, p=3, J=8, nu=0.2, M=25)
    F = predict_boost(model, data.features)
    assert np.mean((data.targets - F) ** 2) == model.train_l2_history[-1]
    assert np.mean(np.abs(data.targets - F) ** 3) == model.train_loss_history[-1]


@pytest.mark.parametrize("nu", [0.06, 0.1, 0.2])
def test_l2_training_loss_nonincreasing(nu):
    model = fit_lp_boost(_friedman(300, 3), p=2, J=10, nu=nu, M=100)
    assert np.all(np.diff(model.train_loss_history) <= 0)


@pytest.mark.parametrize("p", [1.0, 1.2, 1.5, 1.99])
def test_first_order_mode_never_evaluates_hessian(monkeypatch, p):
    def forbidden(*args, **kwargs):
        raise AssertionError("second derivative evaluated in first-order mode")

    monkeypatch.setattr(boosting, "lp_hess", forbidden)
    model = fit_lp_boost(_friedman(80, 4), p=p, J=6, M=10)
    assert model.iterations_run == 10


@pytest.mark.parametrize("p", [2.0, 3.0])
def test_second_order_mode_evaluates_hessian(monkeypatch, p):
    calls = []
    real = boosting.lp_hess
    monkeypatch.setattr(boosting, "lp_hess", lambda *a: calls.append(1) or real(*a))
    fit_lp_boost(_friedman(80, 4), p=p, J=6, M=4)
    assert len(calls) == 4


@pytest.mark.parametrize("p", [2.0, 3.0])
def test_early_stop_on_fittable_data(p):
    X = np.repeat(np.arange(4.0), 5)[:, None]
    y = np.repeat([1.0, -2.0, 3.0, 0.5], 5)
    model = fit_lp_boost(Dataset(X, y), p=p, J=4, nu=0.5, M=2000)
    assert model.stopped_early and model.iterations_run < 2000
    assert model.train_loss_history[-1] < early_stop_threshold(y, p, 1e-5)
    assert np.all(model.train_loss_history[:-1] >= early_stop_threshold(y, p, 1e-5))


def test_eval_set_history_and_best_iteration():
    train, test = _friedman(200, 5), _friedman(100, 6)
    model = fit_lp_boost(train, p=2, J=6, M=30, eval_set=test)
    assert len(model.test_l2_history) == 30
    final = np.mean((test.targets - predict_boost(model, test.features)) ** 2)
    assert final == pytest.approx(model.test_l2_history[-1], rel=1e-12)
    assert model.test_l2_history[model.best_iteration - 1] == model.test_l2_history.min()


def test_bit_identical_refits():
    data = _friedman(120, 7)
    a = fit_lp_boost(data, p=2.5, J=10, nu=0.1, M=20)
    b = fit_lp_boost(data, p=2.5, J=10, nu=0.1, M=20)
    assert np.array_equal(a.train_loss_history, b.train_loss_history)
    assert np.array_equal(predict_boost(a, data.features), predict_boost(b, data.features))


@pytest.mark.parametrize("kwargs", [{"p": 0.5}, {"J": 1}, {"nu": 0.0}, {"nu": 1.5}, {"M": 0}, {"epsilon": 0.0}])
def test_invalid_hyperparameters(kwargs):
    with pytest.raises(ValueError):
        fit_lp_boost(_friedman(20, 8), **kwargs)


def test_predict_dimension_mismatch():
    model = fit_lp_boost(_friedman(20, 9), M=2)
    with pytest.raises(ValueError):
        predict_boost(model, np.ones((2, 3)))
