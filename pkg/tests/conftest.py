import pytest

from synth import SAMPLE_ROWS, sample_corpus


@pytest.fixture
def tiny_corpus():
    return sample_corpus()


@pytest.fixture
def sample_csv(tmp_path):
    path = tmp_path / "corpus.csv"
    lines = ["text,label"]
    lines += [f'"{text}",{label}' for text, label in SAMPLE_ROWS]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
