"""Bag-of-ngrams feedforward sentiment classifiers for code-mixed (Hinglish) tweets."""

from .corpus import (
    CorpusError,
    LangTag,
    Label,
    ProcessedTweet,
    RawToken,
    RawTweet,
    is_url,
    parse_conll,
    preprocess,
    read_simple_format,
    write_simple_format,
)
from .ensemble import Ensemble, EnsembleConfig, bootstrap_sample, predict_vote, train_ensemble
from .features import (
    FeatureMode,
    VocabConfig,
    Vocabulary,
    VocabularyError,
    build_vocabulary,
    count_frequent_ngrams,
    extract_ngrams,
    vectorize,
)
from .metrics import ConfusionMatrix, MetricsReport, confusion, report
from .network import (
    Network,
    NetworkConfig,
    TrainReport,
    adam_step,
    backward,
    cross_entropy,
    forward,
    init_network,
    predict,
    softmax,
    train,
)

__version__ = "0.1.0"
