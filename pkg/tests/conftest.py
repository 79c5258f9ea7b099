import importlib.resources as resources

import pytest

from g2p_bridge.corpus import load_corpus


@pytest.fixture(scope="session")
def toy_corpus_path():
    return str(resources.files("g2p_bridge.data") / "toy_corpus.jsonl")


@pytest.fixture(scope="session")
def toy_corpus(toy_corpus_path):
    return load_corpus(toy_corpus_path)
