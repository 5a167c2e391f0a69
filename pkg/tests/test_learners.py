import numpy as np
import pytest

from conftest import make_dataset
from errors import ConfigError, ValidationError
from learners import (
    ConstantModel,
    ForestSpec,
    KnnSpec,
    LogRegSpec,
    TreeSpec,
    bootstrap_counts,
    fit,
    predict_batch,
    spec_from_dict,
    spec_to_dict,
    tree_seed,
)
from learners.logistic import gradient_lipschitz
from learners.tree import grow_tree


@pytest.fixture
def separable():
    return make_dataset([[-2.0], [-1.0], [1.0], [2.0]], [0, 0, 1, 1], [0, 1, 0, 1])


@pytest.fixture
def noisy(biased_population):
    return biased_population.take(np.arange(0, biased_population.n, 7))


def test_logreg_separates_separable_data(separable):
    labels, scores = predict_batch(fit(LogRegSpec(), separable), separable)
    assert labels.tolist() == [0, 0, 1, 1]
    assert np.all((scores >= 0) & (scores <= 1))


def test_logreg_without_iterations_scores_one_half(separable):
    labels, scores = predict_batch(fit(LogRegSpec(max_iters=0), separable), separable)
    assert np.all(scores == 0.5)
    assert labels.tolist() == [1, 1, 1, 1]


@pytest.mark.parametrize('spec', [LogRegSpec(max_iters=200), TreeSpec(max_depth=3, min_leaf=2)])
def test_integer_weights_match_duplication(noisy, spec):
    doubled = np.zeros(noisy.n)
    doubled[::3] = 1.0
    weights = 1.0 + doubled
    duplicated = noisy.take(np.concatenate([np.arange(noisy.n), np.flatnonzero(doubled)]))
    _, weighted_scores = predict_batch(fit(spec, noisy, weights), noisy)
    _, duplicated_scores = predict_batch(fit(spec, duplicated), noisy)
    np.testing.assert_allclose(weighted_scores, duplicated_scores, atol=1e-9)


def test_tree_stump_leaves_are_laplace_smoothed():
    ds = make_dataset([0.0, 1.0, 2.0, 3.0], [0, 0, 1, 1], [0, 0, 1, 1])
    model = fit(TreeSpec(max_depth=1, min_leaf=1), ds)
    _, scores = predict_batch(model, ds)
    np.testing.assert_allclose(scores, [0.25, 0.25, 0.75, 0.75])
    assert model.threshold[0] == 1.5


def test_tree_min_leaf_is_a_weight():
    ds = make_dataset([0.0, 1.0, 2.0, 3.0], [0, 0, 1, 1], [0, 0, 1, 1])
    model = fit(TreeSpec(max_depth=3, min_leaf=3), ds)
    assert model.n_nodes == 1
    heavy = fit(TreeSpec(max_depth=3, min_leaf=3), ds, np.full(4, 2.0))
    assert heavy.n_nodes == 3


def test_knn_one_neighbour_recovers_training_labels(noisy):
    labels, scores = predict_batch(fit(KnnSpec(k=1), noisy), noisy)
    assert labels.tolist() == noisy.labels.tolist()
    assert scores.tolist() == noisy.labels.astype(float).tolist()


def test_knn_ignores_zero_weight_rows(separable):
    model = fit(KnnSpec(k=1), separable, np.array([1.0, 1.0, 0.0, 1.0]))
    assert model.Z.shape[0] == 3
    labels, _ = predict_batch(model, separable)
    assert labels.tolist() == [0, 0, 1, 1]


def test_knn_k_larger_than_training_set(separable):
    _, scores = predict_batch(fit(KnnSpec(k=50), separable), separable)
    assert np.all(scores == 0.5)


def test_single_forest_tree_matches_grow_tree(noisy):
    spec = ForestSpec(n_trees=1, max_depth=4, min_leaf=2, seed=11)
    seed = tree_seed(spec.seed, 0)
    tree = grow_tree(noisy.features, noisy.labels.astype(float), bootstrap_counts(noisy.n, seed),
                     spec.max_depth, spec.min_leaf, spec.features_per_split(noisy.d), np.random.default_rng(seed))
    _, forest_scores = predict_batch(fit(spec, noisy), noisy)
    np.testing.assert_array_equal(forest_scores, tree.predict_scores(noisy.features))


def test_forest_is_deterministic(noisy):
    spec = ForestSpec(n_trees=5, seed=3)
    _, a = predict_batch(fit(spec, noisy), noisy)
    _, b = predict_batch(fit(spec, noisy), noisy)
    assert a.tobytes() == b.tobytes()


def test_bootstrap_counts_sum_to_n():
    counts = bootstrap_counts(50, seed=1)
    assert counts.sum() == 50
    assert counts.shape == (50,)


@pytest.mark.parametrize('value, d, expected', [('sqrt', 10, 3), (0.5, 10, 5), (20, 10, 10), (1.0, 7, 7), (0.01, 5, 1)])
def test_features_per_split(value, d, expected):
    assert ForestSpec(feature_subsample=value).features_per_split(d) == expected


@pytest.mark.parametrize('spec', [LogRegSpec(), TreeSpec(), KnnSpec(), ForestSpec(n_trees=2)])
def test_single_class_training_is_degenerate(spec):
    ds = make_dataset([[0.0], [1.0], [2.0]], [1, 1, 1], [0, 1, 1])
    model = fit(spec, ds)
    assert isinstance(model, ConstantModel)
    assert model.degenerate
    labels, scores = predict_batch(model, ds)
    assert labels.tolist() == [1, 1, 1]
    assert scores.tolist() == [1.0, 1.0, 1.0]


def test_zero_weight_class_is_degenerate(separable):
    model = fit(LogRegSpec(), separable, np.array([1.0, 1.0, 0.0, 0.0]))
    assert isinstance(model, ConstantModel)
    assert model.score == 0.0


def test_predict_batch_rejects_dimension_mismatch(separable):
    model = fit(LogRegSpec(), separable)
    wide = make_dataset([[0.0, 1.0]], [1], [0])
    with pytest.raises(ValidationError):
        predict_batch(model, wide)


@pytest.mark.parametrize('weights', [np.ones(3), -np.ones(4), np.zeros(4), np.array([1.0, np.nan, 1.0, 1.0])])
def test_fit_rejects_bad_weights(separable, weights):
    with pytest.raises(ValidationError):
        fit(LogRegSpec(), separable, weights)


def test_spec_dict_round_trip():
    spec = ForestSpec(n_trees=7, feature_subsample=0.5, seed=2)
    assert spec_from_dict(spec_to_dict(spec)) == spec
    assert spec_to_dict(LogRegSpec())['kind'] == 'logreg'


def test_spec_from_dict_errors():
    with pytest.raises(ConfigError) as info:
        spec_from_dict({'kind': 'svm'})
    assert info.value.token == 'svm'
    with pytest.raises(ConfigError) as info:
        spec_from_dict({'kind': 'tree', 'depth': 3})
    assert info.value.token == 'depth'
    with pytest.raises(ConfigError):
        spec_from_dict({'kind': 'logreg', 'lr': 0})


def test_curvature_bound_of_a_standardized_column():
    z = np.array([-1.0, 1.0, -1.0, 1.0])
    assert gradient_lipschitz(z[:, None], np.ones(4), l2=2.0) == pytest.approx(0.25 + 0.5)


def test_oversized_learning_rate_is_capped(noisy):
    capped = fit(LogRegSpec(lr=1e6), noisy)
    reference = fit(LogRegSpec(), noisy)
    _, scores = predict_batch(capped, noisy)
    assert np.all(np.isfinite(scores))
    np.testing.assert_allclose(capped.coef, reference.coef, atol=1e-3)
