"""Toolkit for building and evaluating machine-translated SQuAD-style datasets."""

from .dataset import (
    Answer,
    Article,
    Dataset,
    Paragraph,
    Question,
    SplitStats,
    dataset_stats,
    iter_paragraphs,
    iter_questions,
    load_dataset,
    parse_dataset,
    save_dataset,
    serialize_dataset,
    validate_dataset,
)
from .errors import (
    ConfigError,
    CycleError,
    LexiconError,
    ParseError,
    SquadmtError,
    TranslationError,
    ValidationError,
)
from .locate import Dropped, LocateQuery, Span, locate_answer, project_question
from .metrics import ENGLISH_ARTICLES, EvalConfig, EvalReport, evaluate, normalize_answer, score_question
from .morph import (
    DerivationForest,
    LemmaLexicon,
    Normalizer,
    Token,
    load_derivation_forest,
    load_lemma_lexicon,
    tokenize,
)
from .pipeline import (
    BuildConfig,
    BuildResult,
    RetentionStats,
    RoundTripBundle,
    build_target_dataset,
    format_percentage,
    report_stats,
    round_trip_back,
    round_trip_forward,
)
from .translate import (
    CachedProvider,
    HttpProvider,
    HttpProviderConfig,
    IdentityProvider,
    TranslationTable,
    file_cache_provider,
)

__version__ = "0.1.0"
