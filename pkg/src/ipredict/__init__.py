"""Interactive-predictive sequence prediction engine.

Generate hypotheses for an input object, take character-level prefix
corrections from a user (live over HTTP or simulated), regenerate
constrained hypotheses, and measure the correction effort.
"""

from .corpus import Dataset, ExperimentConfig, Sample, ScorerConfig, load_features, load_parallel, validate
from .decoder import Hypothesis, SearchConfig, beam_search, constrained_search, force_decode, vocab_mask
from .errors import (
    CorpusFormatError,
    IPredictError,
    SessionStateError,
    TerminatedStateError,
    UnknownSourceError,
    UnsupportedModalityError,
)
from .metrics import (
    EffortCounts,
    EffortReport,
    InteractionTrace,
    KsmrConvention,
    bleu,
    character_ter,
    damerau_levenshtein,
    ksmr,
    meteor_lite,
)
from .scorers import (
    DecoderState,
    NBestScorer,
    NgramConditionalScorer,
    Scorer,
    UniformScorer,
    advance,
    next_distribution,
    read_feature_matrix,
    train_ngram,
    write_feature_matrix,
)
from .seqcore import (
    END_OF_TEXT,
    FeedbackSignal,
    PrefixConstraint,
    SourceContext,
    TokenSequence,
    Vocabulary,
    detokenize,
    load_vocabulary,
    save_vocabulary,
    split_prefix,
    tokenize,
)
from .simulator import ExperimentReport, LatencyStats, SimulationConfig, run_experiment, simulate_session

__version__ = "0.1.0"
