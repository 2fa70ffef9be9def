import numpy as np
import pytest

from depscreen import classifiers as cl
from depscreen.errors import ConfigError, DataError, NumericError
from depscreen.sparse import SparseMatrix


def sp(rows):
    return SparseMatrix.from_dense(np.asarray(rows, dtype=float))


def brute_force_nb_posterior(train_rows, y, test_row, alpha):
    """Independent Bayes enumeration: P(c|d) ~ P(c) * prod_t P(t|c)^x_t,
    with Laplace-smoothed term likelihoods, normalized over classes."""
    train_rows = np.asarray(train_rows, dtype=float)
    y = np.asarray(y)
    v = train_rows.shape[1]
    joints = []
    for c in (0, 1):
        prior = np.sum(y == c) / len(y)
        counts = train_rows[y == c].sum(axis=0)
        joint = prior
        for t in range(v):
            p_t = (counts[t] + alpha) / (counts.sum() + alpha * v)
            joint *= p_t ** test_row[t]
        joints.append(joint)
    return joints[0] / (joints[0] + joints[1])


class TestMultinomialNb:
    def fixture(self):
        # class 0: "a a b"; class 1: "b b c" over vocabulary (a, b, c)
        X = sp([[2, 1, 0], [0, 2, 1]])
        return cl.MultinomialNb(alpha=1.0).fit(X, [0, 1])

    def test_hand_posterior(self):
        model = self.fixture()
        proba = model.predict_proba(sp([[1, 1, 0]]))
        assert proba[0, 0] == pytest.approx(2.0 / 3.0, abs=1e-9)
        assert model.predict(sp([[1, 1, 0]]))[0] == 0

    def test_identical_classes_posterior_half(self):
        X = sp([[1, 1], [1, 1]])
        model = cl.MultinomialNb().fit(X, [0, 1])
        proba = model.predict_proba(sp([[3, 1]]))
        np.testing.assert_allclose(proba, 0.5)

    def test_unseen_terms_yield_priors(self):
        # asymmetric priors: 2 docs of class 0, 1 of class 1
        X = sp([[1, 0], [1, 0], [0, 1]])
        model = cl.MultinomialNb().fit(X, [0, 0, 1])
        proba = model.predict_proba(sp([[0, 0]]))
        np.testing.assert_allclose(proba[0], [2 / 3, 1 / 3], atol=1e-12)

    def test_matches_brute_force_enumeration(self):
        rng = np.random.default_rng(42)
        for _ in range(30):
            v = int(rng.integers(1, 6))
            n = int(rng.integers(2, 9))
            X = rng.integers(0, 4, size=(n, v)).astype(float)
            y = rng.integers(0, 2, size=n)
            if len(np.unique(y)) < 2:
                y[0] = 1 - y[-1]
            alpha = float(rng.uniform(0.2, 2.0))
            test_row = rng.integers(0, 3, size=v).astype(float)
            model = cl.MultinomialNb(alpha=alpha).fit(sp(X), y)
            got = model.predict_proba(sp([test_row]))[0, 0]
            want = brute_force_nb_posterior(X, y, test_row, alpha)
            assert got == pytest.approx(want, abs=1e-9)

    def test_negative_counts_rejected(self):
        with pytest.raises(DataError, match="nonnegative"):
            cl.MultinomialNb().fit(sp([[-1, 0], [0, 1]]), [0, 1])

    def test_probabilities_sum_to_one(self):
        model = self.fixture()
        rng = np.random.default_rng(1)
        X = sp(rng.integers(0, 5, size=(20, 3)).astype(float))
        proba = model.predict_proba(X)
        assert np.all((proba >= 0) & (proba <= 1))
        np.testing.assert_allclose(proba.sum(axis=1), 1.0, atol=1e-9)


class TestGaussianNb:
    def test_constant_within_class_separated_means(self):
        X = sp([[0.0], [0.0], [4.0], [4.0]])
        model = cl.GaussianNb().fit(X, [0, 0, 1, 1])
        assert model.predict(sp([[0.0]]))[0] == 0
        assert model.predict(sp([[4.0]]))[0] == 1

    def test_mirrored_classes_midpoint(self):
        X = sp([[-2.0], [-1.0], [1.0], [2.0]])
        model = cl.GaussianNb().fit(X, [0, 0, 1, 1])
        proba = model.predict_proba(sp([[0.0]]))
        assert proba[0, 1] == pytest.approx(0.5, abs=1e-9)

    def test_hand_log_density_comparison(self):
        rng = np.random.default_rng(3)
        x0 = rng.normal(0.0, 1.0, size=(200, 1))
        x1 = rng.normal(4.0, 1.0, size=(200, 1))
        X = sp(np.vstack([x0, x1]))
        y = np.array([0] * 200 + [1] * 200)
        model = cl.GaussianNb().fit(X, y)
        assert model.predict(sp([[1.0]]))[0] == 0

    def test_dense_guard(self):
        X = sp(np.ones((4, 4)))
        with pytest.raises(DataError, match="cell limit"):
            cl.GaussianNb(max_dense_cells=8).fit(X, [0, 0, 1, 1])

    def test_probabilities_sum_to_one(self):
        rng = np.random.default_rng(5)
        X = sp(rng.normal(size=(30, 4)))
        model = cl.GaussianNb().fit(X, rng.integers(0, 2, 30))
        proba = model.predict_proba(X)
        np.testing.assert_allclose(proba.sum(axis=1), 1.0, atol=1e-9)


def separable_1d():
    X = sp([[-1.0], [-1.0], [1.0], [1.0]])
    y = np.array([0, 0, 1, 1])
    return X, y


def grid_search_separator(X, y, score_fn):
    """Oracle: exhaustive (w, b) grid confirming a perfect separator."""
    dense = X.to_dense()[:, 0]
    best = 0.0
    for w in np.linspace(-3, 3, 25):
        for b in np.linspace(-1, 1, 9):
            pred = (score_fn(w * dense + b)).astype(int)
            best = max(best, float(np.mean(pred == y)))
    return best


class TestLogistic:
    def test_separable_fixture(self):
        X, y = separable_1d()
        oracle = grid_search_separator(X, y, lambda z: 1 / (1 + np.exp(-z)) >= 0.5)
        assert oracle == 1.0  # a separator exists
        model = cl.LogisticRegression(epochs=50, batch_size=2).fit(X, y)
        assert np.array_equal(model.predict(X), y)

    def test_zero_weights_score_half(self):
        model = cl.LogisticRegression()
        model.weights = np.zeros(3)
        model.bias = 0.0
        scores = model.predict_score(sp([[5.0, -2.0, 1.0]]))
        assert scores[0] == 0.5

    def test_scores_strictly_inside_unit_interval(self):
        X, y = separable_1d()
        model = cl.LogisticRegression(epochs=10, batch_size=2).fit(X, y)
        rng = np.random.default_rng(0)
        scores = model.predict_score(sp(rng.normal(size=(50, 1)) * 10))
        assert np.all((scores > 0.0) & (scores < 1.0))

    def test_divergence_reports_epoch(self):
        X = sp([[1.0], [1.0]])
        X.data[0] = np.nan  # poisoned input triggers the finiteness guard
        with pytest.raises(NumericError, match="epoch 1"):
            cl.LogisticRegression(epochs=3, batch_size=2).fit(X, [0, 1])

    def test_deterministic_for_seed(self):
        X, y = separable_1d()
        a = cl.LogisticRegression(seed=7).fit(X, y)
        b = cl.LogisticRegression(seed=7).fit(X, y)
        assert np.array_equal(a.weights, b.weights) and a.bias == b.bias

    def test_bad_lr(self):
        with pytest.raises(ConfigError):
            cl.LogisticRegression(lr=0.0)


class TestLinearSvm:
    def test_separable_fixture(self):
        X, y = separable_1d()
        oracle = grid_search_separator(X, y, lambda z: z >= 0)
        assert oracle == 1.0
        model = cl.LinearSvm(epochs=50).fit(X, y)
        assert np.array_equal(model.predict(X), y)

    def test_single_class_rejected(self):
        X = sp([[1.0], [2.0]])
        with pytest.raises(DataError, match="both classes"):
            cl.LinearSvm().fit(X, [1, 1])

    def test_label_flip_negates_margins(self):
        rng = np.random.default_rng(11)
        X = sp(rng.normal(size=(20, 4)))
        y = rng.integers(0, 2, size=20)
        y[0], y[1] = 0, 1
        a = cl.LinearSvm(seed=5, epochs=10).fit(X, y)
        b = cl.LinearSvm(seed=5, epochs=10).fit(X, 1 - y)
        np.testing.assert_array_equal(a.weights, -b.weights)
        assert a.bias == -b.bias
        np.testing.assert_array_equal(a.predict(X), 1 - b.predict(X))

    def test_margin_scoring(self):
        X, y = separable_1d()
        model = cl.LinearSvm(epochs=30).fit(X, y)
        margins = model.predict_score(X)
        assert margins[0] < 0 < margins[-1]

    def test_deterministic_for_seed(self):
        X, y = separable_1d()
        a = cl.LinearSvm(seed=3).fit(X, y)
        b = cl.LinearSvm(seed=3).fit(X, y)
        assert np.array_equal(a.weights, b.weights) and a.bias == b.bias


class TestDecisionTree:
    def test_pure_input_single_leaf(self):
        model = cl.DecisionTree().fit(sp([[1.0], [2.0]]), [1, 1])
        assert model.root == {"class": 1, "dist": [0, 2]}

    def test_exhaustive_split_fixture(self):
        X = sp([[1.0], [2.0], [3.0], [4.0]])
        y = [0, 0, 1, 1]
        model = cl.DecisionTree().fit(X, y)
        assert model.root["feature"] == 0
        assert model.root["threshold"] == 2.5
        assert np.array_equal(model.predict(X), y)

    def test_constant_features_majority_leaf(self):
        X = sp([[1.0], [1.0], [1.0]])
        model = cl.DecisionTree().fit(X, [1, 1, 0])
        assert model.root == {"class": 1, "dist": [1, 2]}

    def test_leaf_tie_goes_to_class_zero(self):
        model = cl.DecisionTree().fit(sp([[1.0], [1.0]]), [0, 1])
        assert model.root["class"] == 0

    def test_memorizes_distinct_rows(self):
        rng = np.random.default_rng(8)
        X = rng.permutation(40).reshape(20, 2).astype(float)
        y = rng.integers(0, 2, size=20)
        model = cl.DecisionTree().fit(sp(X), y)
        assert np.array_equal(model.predict(sp(X)), y)

    def test_max_depth_one_gives_stump(self):
        X = sp([[1.0, 0.0], [2.0, 1.0], [3.0, 0.0], [4.0, 1.0]])
        model = cl.DecisionTree(max_depth=1).fit(X, [0, 0, 1, 1])
        assert "feature" in model.root
        assert "class" in model.root["left"] and "class" in model.root["right"]

    def test_min_leaf_respected(self):
        X = sp([[1.0], [2.0], [3.0], [4.0]])
        model = cl.DecisionTree(min_leaf=2).fit(X, [0, 0, 1, 1])
        assert model.root["threshold"] == 2.5  # 1.5/3.5 would leave size-1 leaves


class TestRandomForest:
    def test_degenerate_forest_equals_tree(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            n, f = int(rng.integers(5, 40)), int(rng.integers(1, 10))
            X = sp(rng.normal(size=(n, f)))
            y = rng.integers(0, 2, size=n)
            forest = cl.RandomForest(n_trees=1, bootstrap=False,
                                     features_per_split="all").fit(X, y)
            tree = cl.DecisionTree().fit(X, y)
            probe = sp(rng.normal(size=(30, f)))
            np.testing.assert_array_equal(forest.predict(probe),
                                          tree.predict(probe))

    def test_pure_input_unanimous(self):
        X = sp([[1.0], [2.0], [3.0]])
        forest = cl.RandomForest(n_trees=5).fit(X, [1, 1, 1])
        assert all(t == {"class": 1, "dist": [0, 3]} for t in forest.trees)
        np.testing.assert_array_equal(forest.predict(X), [1, 1, 1])

    def test_same_seed_identical(self):
        rng = np.random.default_rng(2)
        X = sp(rng.normal(size=(25, 4)))
        y = rng.integers(0, 2, size=25)
        a = cl.RandomForest(n_trees=7, seed=9).fit(X, y)
        b = cl.RandomForest(n_trees=7, seed=9).fit(X, y)
        assert a.trees == b.trees

    def test_vote_tie_goes_to_class_zero(self):
        forest = cl.RandomForest(n_trees=2)
        forest.trees = [{"class": 0, "dist": [1, 0]},
                        {"class": 1, "dist": [0, 1]}]
        forest._n_features = 1
        assert forest.predict(sp([[1.0]]))[0] == 0
        assert forest.predict_score(sp([[1.0]]))[0] == 0.5

    def test_param_validation(self):
        with pytest.raises(ConfigError):
            cl.RandomForest(n_trees=0)
        with pytest.raises(ConfigError):
            cl.RandomForest(features_per_split="half")


class TestSharedContract:
    def test_threshold_semantics_for_probabilistic_models(self):
        rng = np.random.default_rng(4)
        X = sp(rng.normal(size=(30, 3)) + 1.0)
        Xc = sp(np.abs(rng.integers(0, 4, size=(30, 3))).astype(float))
        y = rng.integers(0, 2, size=30)
        y[0], y[1] = 0, 1
        models = [cl.MultinomialNb().fit(Xc, y),
                  cl.GaussianNb().fit(X, y),
                  cl.LogisticRegression(epochs=5).fit(X, y)]
        for model in models:
            probe = Xc if model.kind == "mnb" else X
            scores = model.predict_score(probe)
            np.testing.assert_array_equal(model.predict(probe, 0.5),
                                          (scores >= 0.5).astype(int))
            np.testing.assert_array_equal(model.predict(probe, 0.0),
                                          np.ones(30, dtype=int))

    def test_svm_thresholds_on_sign(self):
        X, y = separable_1d()
        model = cl.LinearSvm(epochs=20).fit(X, y)
        margins = model.predict_score(X)
        np.testing.assert_array_equal(model.predict(X),
                                      (margins >= 0.0).astype(int))
