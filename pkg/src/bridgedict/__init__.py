"""bridgedict: two-community corpus statistics and a generative dictionary."""

__version__ = "0.1.0"

from .corpus import Corpus, Document, extract_ngrams, ingest, normalize, tokenize
from .curation import CurationConfig, CuratedTerm, curate, log_odds_z
from .index import InvertedIndex, TermStats, build_index, compare, term_stats
from .rag import GenerationRequest, SampleSet, StubBackend, sample_matches
from .scatter import ScatterPayload, build_scatter, cluster, embed, project_2d
from .sentiment import SentimentLexicon, load_lexicon, score

__all__ = [
    "Corpus",
    "CuratedTerm",
    "CurationConfig",
    "Document",
    "GenerationRequest",
    "InvertedIndex",
    "SampleSet",
    "ScatterPayload",
    "SentimentLexicon",
    "StubBackend",
    "TermStats",
    "build_index",
    "build_scatter",
    "cluster",
    "compare",
    "curate",
    "embed",
    "extract_ngrams",
    "ingest",
    "load_lexicon",
    "log_odds_z",
    "normalize",
    "project_2d",
    "sample_matches",
    "score",
    "term_stats",
    "tokenize",
]
