from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import sparse

from newswatch.features.pipeline import FeaturePipeline, FeatureVector
from newswatch.model import (
    Model,
    ModelFormatError,
    bin_index,
    family_contributions,
    load_model,
    objective_and_grad,
    predict_index,
    save_model,
    score_text,
    sigmoid,
    train,
)


def _fv(values_by_col: dict[int, float], width: int, spans=None) -> FeatureVector:
    indices = np.array(sorted(values_by_col), dtype=np.int64)
    values = np.array([values_by_col[i] for i in indices], dtype=np.float64)
    return FeatureVector(
        indices=indices,
        values=values,
        width=width,
        family_spans=spans or {"ngrams": (0, width), "lexicon": (width, width),
                               "style": (width, width), "nela": (width, width)},
    )


def _random_problem(rng, n=12, d=5):
    x = sparse.csr_matrix(rng.normal(size=(n, d)))
    y = rng.integers(0, 2, size=n).astype(np.float64)
    if y.min() == y.max():
        y[0] = 1.0 - y[0]
    lam = float(rng.uniform(0.01, 2.0))
    return x, y, lam


class TestObjectiveGradient:
    def test_matches_central_finite_differences(self):
        rng = np.random.default_rng(42)
        h = 1e-5
        worst = 0.0
        for _ in range(50):
            x, y, lam = _random_problem(rng)
            params = rng.normal(scale=0.5, size=x.shape[1] + 1)
            _, analytic = objective_and_grad(params, x, y, lam)
            fd = np.zeros_like(params)
            for i in range(len(params)):
                bump = np.zeros_like(params)
                bump[i] = h
                f_plus, _ = objective_and_grad(params + bump, x, y, lam)
                f_minus, _ = objective_and_grad(params - bump, x, y, lam)
                fd[i] = (f_plus - f_minus) / (2 * h)
            rel = np.abs(analytic - fd) / np.maximum(np.abs(fd), 1e-6)
            worst = max(worst, float(rel.max()))
        assert worst <= 1e-4

    def test_objective_includes_l2_on_weights_not_bias(self):
        x = sparse.csr_matrix(np.zeros((2, 1)))
        y = np.array([0.0, 1.0])
        base, _ = objective_and_grad(np.array([0.0, 0.0]), x, y, 1.0)
        with_w, _ = objective_and_grad(np.array([2.0, 0.0]), x, y, 1.0)
        with_b, _ = objective_and_grad(np.array([0.0, 2.0]), x, y, 1.0)
        assert with_w == pytest.approx(base + 4.0)  # lambda * w^2  (features are 0)
        # bias changes only the data term, symmetric labels keep the sum equal
        assert with_b == pytest.approx(
            float(np.logaddexp(0, -2.0) + np.logaddexp(0, 2.0))
        )


class TestTrain:
    def test_one_feature_separable(self):
        vectors = [_fv({0: -1.0}, 1), _fv({0: 1.0}, 1)]
        model = train(vectors, [0, 1], l2_lambda=0.1)
        assert model.weights[0] > 0
        high = predict_index(model, vectors[1])
        low = predict_index(model, vectors[0])
        assert low < 0.5 < high

    def test_zero_features_bias_hits_class_prior_logit(self):
        vectors = [_fv({}, 0) for _ in range(10)]
        labels = [1, 1, 1, 0, 0, 0, 0, 0, 0, 0]
        model = train(vectors, labels, l2_lambda=1.0)
        assert model.bias == pytest.approx(math.log(0.3 / 0.7), abs=1e-6)
        assert model.weights.size == 0

    def test_huge_lambda_shrinks_weights(self):
        rng = np.random.default_rng(1)
        vectors = [_fv({0: float(rng.normal()), 1: float(rng.normal())}, 2) for _ in range(20)]
        labels = [i % 2 for i in range(20)]
        model = train(vectors, labels, l2_lambda=1e6)
        assert float(np.linalg.norm(model.weights)) < 1e-3

    def test_objective_monotone_nonincreasing(self):
        rng = np.random.default_rng(7)
        x, y, lam = _random_problem(rng, n=40, d=8)
        from newswatch.optim import minimize

        result = minimize(
            lambda p: objective_and_grad(p, x, y, lam),
            np.zeros(x.shape[1] + 1),
        )
        history = result.objective_history
        assert all(b <= a + 1e-12 for a, b in zip(history, history[1:]))

    def test_doubled_data_with_doubled_lambda_same_optimum(self):
        rng = np.random.default_rng(3)
        vectors = [
            _fv({0: float(rng.normal()), 1: float(rng.normal()), 2: float(rng.normal())}, 3)
            for _ in range(16)
        ]
        labels = [int(v.values[0] + 0.3 * rng.normal() > 0) for v in vectors]
        if len(set(labels)) < 2:
            labels[0] = 1 - labels[0]
        single = train(vectors, labels, l2_lambda=0.5)
        double = train(vectors + vectors, labels + labels, l2_lambda=1.0)
        assert np.allclose(single.weights, double.weights, atol=1e-6)
        assert double.bias == pytest.approx(single.bias, abs=1e-6)

    def test_single_class_fatal(self):
        vectors = [_fv({0: 1.0}, 1), _fv({0: 2.0}, 1)]
        with pytest.raises(ValueError, match="single class"):
            train(vectors, [1, 1])

    def test_nonfinite_feature_fatal(self):
        bad = FeatureVector(
            indices=np.array([0]),
            values=np.array([np.inf]),
            width=1,
            family_spans={"ngrams": (0, 1), "lexicon": (1, 1), "style": (1, 1), "nela": (1, 1)},
        )
        with pytest.raises(ValueError, match="non-finite"):
            train([bad, _fv({0: 1.0}, 1)], [0, 1])

    def test_deterministic(self):
        rng = np.random.default_rng(11)
        vectors = [_fv({0: float(rng.normal()), 1: float(rng.normal())}, 2) for _ in range(12)]
        labels = [i % 2 for i in range(12)]
        a = train(vectors, labels, l2_lambda=0.7)
        b = train(vectors, labels, l2_lambda=0.7)
        assert np.array_equal(a.weights, b.weights) and a.bias == b.bias


class TestPredict:
    def test_zero_model_is_half(self):
        model = Model(weights=np.zeros(3), bias=0.0, l2_lambda=1.0, pipeline=FeaturePipeline(flags=set()))
        assert predict_index(model, _fv({0: 5.0, 2: -1.0}, 3)) == 0.5

    def test_log_three_gives_three_quarters(self):
        model = Model(weights=np.array([1.0]), bias=0.0, l2_lambda=1.0, pipeline=FeaturePipeline(flags=set()))
        assert predict_index(model, _fv({0: math.log(3)}, 1)) == pytest.approx(0.75, abs=1e-12)

    def test_monotone_in_positive_weight_feature(self):
        model = Model(weights=np.array([2.0]), bias=-0.3, l2_lambda=1.0, pipeline=FeaturePipeline(flags=set()))
        previous = 0.0
        for value in np.linspace(-3, 3, 13):
            p = predict_index(model, _fv({0: float(value)}, 1))
            assert p >= previous
            previous = p

    def test_strictly_inside_unit_interval(self):
        model = Model(weights=np.array([1000.0]), bias=0.0, l2_lambda=1.0, pipeline=FeaturePipeline(flags=set()))
        assert 0.0 < predict_index(model, _fv({0: 1000.0}, 1)) < 1.0
        assert 0.0 < predict_index(model, _fv({0: -1000.0}, 1)) < 1.0

    def test_width_mismatch_fatal(self):
        model = Model(weights=np.zeros(2), bias=0.0, l2_lambda=1.0, pipeline=FeaturePipeline(flags=set()))
        with pytest.raises(ValueError):
            predict_index(model, _fv({0: 1.0}, 3))


class TestBin:
    @pytest.mark.parametrize(
        "p,expected",
        [(0.0, 1), (0.19, 1), (0.2, 2), (0.39, 2), (0.4, 3), (0.6, 4), (0.79, 4), (0.8, 5), (1.0, 5)],
    )
    def test_edges(self, p, expected):
        assert bin_index(p) == expected

    @pytest.mark.parametrize("p", [-0.1, 1.1, 2.0])
    def test_out_of_range_fatal(self, p):
        with pytest.raises(ValueError):
            bin_index(p)


class TestSaveLoad:
    def test_roundtrip_identical_predictions(self, small_model_pipeline, tmp_path):
        model = small_model_pipeline
        path = tmp_path / "model.nwm"
        save_model(model, path)
        loaded = load_model(path)
        rng = np.random.default_rng(5)
        vocabulary = ["you", "budget", "AMAZING", "committee", "report", "truth", "!"]
        for _ in range(100):
            text = " ".join(rng.choice(vocabulary, size=rng.integers(3, 30)))
            a = score_text(model, text)
            b = score_text(loaded, text)
            assert a == b

    def test_truncated_file_rejected(self, small_model_pipeline, tmp_path):
        path = tmp_path / "model.nwm"
        save_model(small_model_pipeline, path)
        data = path.read_bytes()
        path.write_bytes(data[: len(data) // 2])
        with pytest.raises(ModelFormatError, match="truncated"):
            load_model(path)

    def test_version_mismatch_rejected(self, small_model_pipeline, tmp_path):
        import struct

        path = tmp_path / "model.nwm"
        save_model(small_model_pipeline, path)
        data = bytearray(path.read_bytes())
        data[8:12] = struct.pack("<I", 99)
        path.write_bytes(bytes(data))
        with pytest.raises(ModelFormatError, match="version 99"):
            load_model(path)

    def test_not_a_model_file(self, tmp_path):
        path = tmp_path / "junk.nwm"
        path.write_bytes(b"definitely not a model")
        with pytest.raises(ModelFormatError, match="magic"):
            load_model(path)


class TestContributions:
    def test_contributions_sum_to_logit(self, small_model_pipeline):
        model = small_model_pipeline
        text = "You will not believe this shocking report about the budget!"
        index, _bucket, contributions = score_text(model, text)
        z = sum(contributions.values()) + model.bias
        assert math.log(index / (1 - index)) == pytest.approx(z, abs=1e-9)

    def test_family_restriction(self):
        spans = {"ngrams": (0, 2), "lexicon": (2, 3), "style": (3, 3), "nela": (3, 3)}
        fv = _fv({0: 1.0, 1: 2.0, 2: 3.0}, 3, spans=spans)
        model = Model(
            weights=np.array([1.0, 1.0, 2.0]),
            bias=0.0,
            l2_lambda=1.0,
            pipeline=FeaturePipeline(flags=set()),
        )
        contributions = family_contributions(model, fv)
        assert contributions["ngrams"] == pytest.approx(3.0)
        assert contributions["lexicon"] == pytest.approx(6.0)
        assert contributions["style"] == 0.0
