from __future__ import annotations

import json

import pytest

from designgen.clients.mock import MockImageGen, MockTextGen
from designgen.config import ClientSet, PipelineConfig
from designgen.document import Canvas
from designgen.errors import InputError
from designgen.pipeline import load_corpus, run_generate

from corpus_builders import write_corpus_dir

CONFIG = PipelineConfig(mock=True, seed=2, canvas=Canvas(128, 128), image_size=(128, 128))


class BrokenMM:
    def complete(self, image, prompt, sampling):
        return "I refuse to answer with JSON."


def clients_with(mm) -> ClientSet:
    clients = ClientSet(text=MockTextGen(), image=MockImageGen(), multimodal=mm)
    return clients


def test_typography_failure_keeps_earlier_artifacts(tmp_path, fonts):
    manifest = run_generate(
        "A poster", CONFIG, clients_with(BrokenMM()), fonts, tmp_path
    )
    assert manifest.failed_stage == "typography"
    assert (tmp_path / "plan.json").is_file()
    assert (tmp_path / "image.png").is_file()
    assert not (tmp_path / "typography.json").exists()
    assert not (tmp_path / "final.png").exists()
    saved = json.loads((tmp_path / "manifest.json").read_text())
    assert saved["failed_stage"] == "typography"
    assert saved["error"]


def test_whitespace_intention_is_recorded_input_failure(tmp_path, fonts):
    from designgen.clients.mock import MockMultimodal

    manifest = run_generate("   ", CONFIG, clients_with(MockMultimodal()), fonts, tmp_path)
    assert manifest.failed_stage == "design_plan"
    assert not (tmp_path / "plan.json").exists()


def test_load_corpus_rejects_duplicate_ids(tmp_path):
    corpus = tmp_path / "corpus"
    write_corpus_dir(corpus, n_docs=2)
    docs = sorted(corpus.glob("doc-*.json"))
    # Same document body under a second filename: same id, different file.
    (corpus / "zz-copy.json").write_bytes(docs[0].read_bytes())
    with pytest.raises(InputError) as err:
        load_corpus(corpus)
    assert "duplicate document id" in str(err.value)


def test_load_corpus_sorted_and_parsed(tmp_path):
    corpus = tmp_path / "corpus"
    ids = write_corpus_dir(corpus, n_docs=3)
    docs = load_corpus(corpus)
    assert [d.id for d in docs] == sorted(ids)


def test_load_corpus_missing_dir(tmp_path):
    with pytest.raises(InputError):
        load_corpus(tmp_path / "nope")
