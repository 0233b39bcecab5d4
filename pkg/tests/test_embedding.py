from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newswatch.embedding import (
    DocVector,
    FileEmbedder,
    HashedBowEmbedder,
    cosine_distance,
    distance_matrix,
    fnv1a_64,
    make_doc_vector,
)


class TestHashedBow:
    def test_empty_text_zero_vector(self):
        vec = HashedBowEmbedder().embed("")
        assert not vec.norm_flag
        assert np.all(vec.values == 0.0)

    def test_whitespace_only_zero_vector(self):
        assert not HashedBowEmbedder().embed("  \n\t ").norm_flag

    def test_identical_texts_identical_vectors(self):
        emb = HashedBowEmbedder()
        a, b = emb.embed("Some news text here"), emb.embed("Some news text here")
        assert np.array_equal(a.values, b.values)
        assert cosine_distance(a, b) == 0.0

    def test_normalized(self):
        vec = HashedBowEmbedder().embed("a few words a few more")
        assert math.isclose(float(np.linalg.norm(vec.values)), 1.0, abs_tol=1e-6)

    def test_disjoint_bucket_documents_are_orthogonal(self):
        emb = HashedBowEmbedder()
        doc_a, doc_b = ("alpha bravo", "charlie delta")
        buckets_a = {emb.bucket(t) for t in doc_a.split()}
        buckets_b = {emb.bucket(t) for t in doc_b.split()}
        # precondition of this example: tokens hash into disjoint buckets
        assert buckets_a.isdisjoint(buckets_b)
        assert cosine_distance(emb.embed(doc_a), emb.embed(doc_b)) == pytest.approx(1.0)

    @given(st.text(max_size=200))
    @settings(max_examples=60, deadline=None)
    def test_depends_only_on_text_bytes(self, text):
        a = HashedBowEmbedder().embed(text)
        b = HashedBowEmbedder().embed(text)
        assert np.array_equal(a.values, b.values)
        assert a.norm_flag == b.norm_flag

    def test_fnv_reference_value(self):
        # published FNV-1a 64 test vector
        assert fnv1a_64(b"") == 0xCBF29CE484222325
        assert fnv1a_64(b"a") == 0xAF63DC4C8601EC8C


class TestFileEmbedder:
    def test_sidecar_lookup(self, tmp_path):
        path = tmp_path / "vectors.tsv"
        path.write_text("art-1\t" + ",".join(["1.0"] + ["0.0"] * 3) + "\n", encoding="utf-8")
        emb = FileEmbedder(path, dim=4)

        class Stub:
            id = "art-1"

        vec = emb.vector_for(Stub())
        assert vec.norm_flag
        assert vec.values[0] == 1.0

    def test_unknown_id_becomes_zero_vector(self, tmp_path):
        path = tmp_path / "vectors.tsv"
        path.write_text("art-1\t1.0,0.0\n", encoding="utf-8")
        emb = FileEmbedder(path, dim=2)

        class Stub:
            id = "other"

        assert not emb.vector_for(Stub()).norm_flag

    def test_dimension_mismatch_rejected(self, tmp_path):
        path = tmp_path / "vectors.tsv"
        path.write_text("art-1\t1.0,2.0,3.0\n", encoding="utf-8")
        with pytest.raises(ValueError):
            FileEmbedder(path, dim=2)


class TestCosineDistance:
    def test_identical_nonzero_is_zero(self):
        u = make_doc_vector(np.array([1.0, 2.0, 3.0]))
        assert cosine_distance(u, u) == 0.0

    def test_orthogonal_unit_vectors(self):
        u = make_doc_vector(np.array([1.0, 0.0]))
        v = make_doc_vector(np.array([0.0, 1.0]))
        assert cosine_distance(u, v) == pytest.approx(1.0)

    def test_hand_computed_value(self):
        u = make_doc_vector(np.array([1.0, 0.0]))
        v = make_doc_vector(np.array([1.0, 1.0]) / math.sqrt(2))
        assert cosine_distance(u, v) == pytest.approx(1.0 - 1.0 / math.sqrt(2), abs=1e-12)

    def test_zero_vector_sentinel(self):
        zero = make_doc_vector(np.zeros(3))
        u = make_doc_vector(np.array([1.0, 0.0, 0.0]))
        assert cosine_distance(zero, u) == 1.0
        assert cosine_distance(zero, zero) == 1.0

    def test_dimension_mismatch_fatal(self):
        u = make_doc_vector(np.ones(2))
        v = make_doc_vector(np.ones(3))
        with pytest.raises(ValueError):
            cosine_distance(u, v)

    @given(
        st.lists(st.floats(-10, 10), min_size=4, max_size=4),
        st.lists(st.floats(-10, 10), min_size=4, max_size=4),
    )
    @settings(max_examples=80, deadline=None)
    def test_symmetry_exact(self, a, b):
        u, v = make_doc_vector(np.array(a)), make_doc_vector(np.array(b))
        assert cosine_distance(u, v) == cosine_distance(v, u)

    @given(
        st.lists(st.floats(-10, 10), min_size=4, max_size=4),
        st.floats(0.001, 1000.0),
    )
    @settings(max_examples=80, deadline=None)
    def test_scale_invariance(self, a, scale):
        base = np.round(np.array(a), 6)  # keep components away from underflow
        u = make_doc_vector(np.array([1.0, 2.0, 0.5, -1.0]))
        v1 = make_doc_vector(base)
        v2 = make_doc_vector(base * scale)
        assert cosine_distance(u, v1) == pytest.approx(cosine_distance(u, v2), abs=1e-9)


class TestDistanceMatrix:
    def test_matches_pairwise_function(self):
        rng = np.random.default_rng(3)
        vectors = [make_doc_vector(rng.random(8)) for _ in range(6)]
        vectors.append(make_doc_vector(np.zeros(8)))
        dist = distance_matrix(vectors)
        for i, u in enumerate(vectors):
            for j, v in enumerate(vectors):
                assert dist[i, j] == pytest.approx(cosine_distance(u, v), abs=1e-12)
        assert np.array_equal(dist, dist.T)
