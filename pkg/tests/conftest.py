import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ipredict.decoder import SearchConfig
from ipredict.demo import demo_scorer, demo_source, demo_vocabulary
from ipredict.seqcore import Vocabulary


@pytest.fixture
def tiny_vocab() -> Vocabulary:
    return Vocabulary.from_tokens(["a", "bench", "building", "bank", "ramp"])


@pytest.fixture
def demo():
    """(vocab, scorer, source) of the bundled captioning showcase."""
    vocab = demo_vocabulary()
    return vocab, demo_scorer(vocab), demo_source()


@pytest.fixture
def search_cfg() -> SearchConfig:
    return SearchConfig(beam_size=6, max_length=64)
