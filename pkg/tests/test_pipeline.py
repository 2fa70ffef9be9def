import json

import numpy as np
import pytest

from depscreen import pipeline
from depscreen.config import RunConfig
from depscreen.corpus import Corpus, LabeledDocument
from depscreen.errors import ConfigError, DataError

from synth import keyword_corpus, keyword_pools, sample_corpus

FAST_OVERRIDES = {
    "features": {"min_n": 1, "max_n": 2},
    "nn": {"epochs": 3, "hidden": 32, "batch_size": 8},
    "forest": {"n_trees": 10},
    "logreg": {"epochs": 10},
    "svm": {"epochs": 10},
}


def fast_config(**extra):
    doc = json.loads(json.dumps(FAST_OVERRIDES))
    doc.update(extra)
    return RunConfig.from_dict(doc)


class TestFitPipeline:
    def test_small_corpus_memorized_by_mnb(self, tiny_corpus):
        config = fast_config()
        artifact = pipeline.fit_pipeline(tiny_corpus, config, "mnb")
        result = pipeline.predict_one(artifact, tiny_corpus.docs[0].text)
        assert result["label"] == 1
        assert result["label_name"] == "depressive"

    def test_single_class_rejected(self):
        docs = tuple(LabeledDocument(f"w{i}", 1) for i in range(4))
        with pytest.raises(DataError, match="both classes"):
            pipeline.fit_pipeline(Corpus(docs), fast_config(), "mnb")

    def test_empty_vocab_is_stage_tagged(self):
        config = fast_config(features={"min_n": 1, "max_n": 1, "min_df": 99})
        with pytest.raises(DataError, match=r"\[vocabulary\]"):
            pipeline.fit_pipeline(sample_corpus(), config, "mnb")

    def test_unknown_kind(self):
        with pytest.raises(ConfigError, match="unknown model kind"):
            pipeline.fit_pipeline(sample_corpus(), fast_config(), "xgboost")

    def test_artifacts_byte_identical_for_same_seed(self):
        corpus = keyword_corpus(n_docs=40, seed=7)
        config = fast_config()
        a = pipeline.fit_pipeline(corpus, config, "nn")
        b = pipeline.fit_pipeline(corpus, config, "nn")
        assert (json.dumps(pipeline.artifact_to_dict(a))
                == json.dumps(pipeline.artifact_to_dict(b)))

    def test_default_k_caps_at_5000(self):
        corpus = keyword_corpus(n_docs=30, seed=8)
        artifact = pipeline.fit_pipeline(corpus, fast_config(), "mnb")
        chain = artifact.chain
        assert len(chain.selector.selected) == min(5000, len(chain.vocab))

    def test_stage_isolation_of_textprep_toggles(self):
        corpus = keyword_corpus(n_docs=40, seed=9)
        full = pipeline.fit_pipeline(corpus, fast_config(), "mnb")
        bare = pipeline.fit_pipeline(
            corpus,
            fast_config(textprep={"use_stopwords": False,
                                  "use_stemming": False}),
            "mnb")
        assert bare.chain.stopwords is None
        assert bare.chain.suffixes is None
        # downstream stages survived; only the vocabulary may differ
        assert pipeline.predict_one(bare, corpus.docs[0].text)["label"] in (0, 1)
        assert full.chain.vocab.terms != () and bare.chain.vocab.terms != ()


class TestPredictOne:
    def fixture(self):
        corpus = keyword_corpus(n_docs=40, seed=10)
        return corpus, pipeline.fit_pipeline(corpus, fast_config(), "tree")

    def test_oov_flag(self):
        _, artifact = self.fixture()
        result = pipeline.predict_one(artifact, "zzz qqq totally unseen")
        assert result["oov"] is True

    def test_memorizing_tree_returns_training_label(self):
        corpus, artifact = self.fixture()
        for doc in corpus.docs[:10]:
            assert pipeline.predict_one(artifact, doc.text)["label"] == doc.label

    def test_deterministic(self):
        corpus, artifact = self.fixture()
        text = corpus.docs[0].text
        assert (pipeline.predict_one(artifact, text)
                == pipeline.predict_one(artifact, text))


class TestPersistence:
    @pytest.mark.parametrize("kind", pipeline.MODEL_KINDS)
    def test_round_trip_reproduces_predictions(self, kind, tmp_path):
        rng = np.random.default_rng(12)
        corpus = keyword_corpus(n_docs=60, seed=12)
        artifact = pipeline.fit_pipeline(corpus, fast_config(), kind)
        path = tmp_path / f"{kind}.json"
        pipeline.save(artifact, path)
        again = pipeline.load(path)
        pool0, pool1, shared = keyword_pools()
        pool = pool0[:3] + pool1[:3] + shared[:2] + ["zzz"]
        texts = [" ".join(rng.choice(pool, size=rng.integers(1, 5)))
                 for _ in range(30)]
        l1, s1, o1 = artifact.predict(texts)
        l2, s2, o2 = again.predict(texts)
        np.testing.assert_array_equal(l1, l2)
        np.testing.assert_array_equal(s1, s2)  # bitwise, not approximate
        np.testing.assert_array_equal(o1, o2)

    def test_corrupted_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"format_version": 1, "config": {', encoding="utf-8")
        with pytest.raises(DataError, match="not valid JSON"):
            pipeline.load(path)

    def test_missing_field_named(self, tmp_path):
        corpus = keyword_corpus(n_docs=30, seed=13)
        artifact = pipeline.fit_pipeline(corpus, fast_config(), "mnb")
        doc = pipeline.artifact_to_dict(artifact)
        del doc["vocabulary"]
        with pytest.raises(DataError, match="missing field 'vocabulary'"):
            pipeline.artifact_from_dict(doc)

    def test_version_bump_is_explicit_error(self, tmp_path):
        corpus = keyword_corpus(n_docs=30, seed=14)
        artifact = pipeline.fit_pipeline(corpus, fast_config(), "mnb")
        doc = pipeline.artifact_to_dict(artifact)
        doc["format_version"] = 2
        with pytest.raises(DataError, match="format_version 2"):
            pipeline.artifact_from_dict(doc)

    def test_dimension_mismatch_detected(self):
        corpus = keyword_corpus(n_docs=30, seed=15)
        artifact = pipeline.fit_pipeline(corpus, fast_config(), "mnb")
        doc = pipeline.artifact_to_dict(artifact)
        doc["selector"]["selected"] = doc["selector"]["selected"][:-1]
        with pytest.raises(DataError, match="features"):
            pipeline.artifact_from_dict(doc)

    def test_unknown_model_kind_rejected(self):
        corpus = keyword_corpus(n_docs=30, seed=16)
        artifact = pipeline.fit_pipeline(corpus, fast_config(), "mnb")
        doc = pipeline.artifact_to_dict(artifact)
        doc["model_kind"] = "catboost"
        with pytest.raises(DataError, match="unknown model_kind"):
            pipeline.artifact_from_dict(doc)


class TestStrictConfig:
    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match="unknown config key.*learning_rate"):
            RunConfig.from_dict({"learning_rate": 0.1})

    def test_unknown_nested_key(self):
        with pytest.raises(ConfigError, match="nn.dropout$"):
            RunConfig.from_dict({"nn": {"dropout": 0.2}})

    def test_section_must_be_object(self):
        with pytest.raises(ConfigError, match="must be an object"):
            RunConfig.from_dict({"nn": 3})

    def test_round_trips_through_dict(self):
        config = fast_config()
        assert RunConfig.from_dict(config.to_dict()) == config

    def test_bad_input_switch(self):
        with pytest.raises(ConfigError, match="input"):
            RunConfig.from_dict({"svm": {"input": "embeddings"}})

    def test_json_file_loading(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text('{"seed": 5, "nn": {"epochs": 2}}', encoding="utf-8")
        config = RunConfig.from_json_file(path)
        assert config.seed == 5 and config.nn.epochs == 2
        bad = tmp_path / "bad.json"
        bad.write_text("{", encoding="utf-8")
        with pytest.raises(ConfigError, match="not valid JSON"):
            RunConfig.from_json_file(bad)
