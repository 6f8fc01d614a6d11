"""Toolkit for extracting code-switches from bilingual transcripts,
annotating the speaker's motivation, and training per-label classifiers."""

__version__ = "0.1.0"

from .chat_parser import (
    CorpusStats,
    LangTag,
    ParserProfile,
    Token,
    Transcript,
    Utterance,
    corpus_stats,
    parse_file,
    parse_transcript,
)
from .switch_extractor import SwitchInstance, extract_instances, find_switch_points

__all__ = [
    "CorpusStats",
    "LangTag",
    "ParserProfile",
    "Token",
    "Transcript",
    "Utterance",
    "SwitchInstance",
    "corpus_stats",
    "extract_instances",
    "find_switch_points",
    "parse_file",
    "parse_transcript",
]
