"""Text cleaning, tokenization, stopword removal and suffix stemming.

All functions are pure and stateless. The default stopword list and
suffix rules live in editable package data files; neither is derived
from a published resource for Romanized Sinhala, so treat them as a
starting point, not ground truth.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass, field
from importlib import resources

from .errors import ConfigError

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_MENTION_HASHTAG_RE = re.compile(r"[@#]\w+")
_WS_RE = re.compile(r"\s+")

TokenSeq = list  # list[str]: nonempty lowercase tokens


@dataclass(frozen=True)
class CleanConfig:
    lowercase: bool = True
    strip_urls: bool = True
    strip_mentions_hashtags: bool = True
    allowed_chars: str = string.ascii_letters

    def __post_init__(self):
        if not self.allowed_chars:
            raise ConfigError("allowed_chars must be nonempty")

    def allowed_set(self):
        return frozenset(self.allowed_chars) | {" "}


@dataclass(frozen=True)
class StopwordList:
    words: frozenset

    def __contains__(self, token):
        return token in self.words


@dataclass(frozen=True)
class SuffixRule:
    suffix: str
    min_stem_len: int


@dataclass(frozen=True)
class SuffixRuleTable:
    rules: tuple = field(default_factory=tuple)


def clean(text, config=CleanConfig()):
    """Strip URLs/mentions/hashtags, drop disallowed characters, collapse
    whitespace. Idempotent; may return the empty string."""
    s = text
    if config.strip_urls:
        s = _URL_RE.sub(" ", s)
    if config.strip_mentions_hashtags:
        s = _MENTION_HASHTAG_RE.sub(" ", s)
    if config.lowercase:
        s = s.lower()
    allowed = config.allowed_set()
    s = "".join(ch if ch in allowed else " " for ch in s)
    return _WS_RE.sub(" ", s).strip()


def tokenize(cleaned):
    """Split cleaned text on whitespace runs; never yields empty tokens."""
    return cleaned.split()


def remove_stopwords(tokens, stopwords):
    return [t for t in tokens if t not in stopwords]


def stem(token, table):
    """Strip the single longest matching suffix that leaves at least
    min_stem_len characters; unchanged when no rule applies."""
    best = None
    for rule in table.rules:
        if (token.endswith(rule.suffix)
                and len(token) - len(rule.suffix) >= rule.min_stem_len):
            if best is None or len(rule.suffix) > len(best.suffix):
                best = rule
    if best is None:
        return token
    return token[:-len(best.suffix)]


def stem_all(tokens, table):
    return [stem(t, table) for t in tokens]


def preprocess(text, config=CleanConfig(), stopwords=None, suffixes=None):
    """Full pipeline: clean -> tokenize -> stopwords -> stemming.

    Pass stopwords=None or suffixes=None to skip that stage.
    """
    tokens = tokenize(clean(text, config))
    if stopwords is not None:
        tokens = remove_stopwords(tokens, stopwords)
    if suffixes is not None:
        tokens = stem_all(tokens, suffixes)
    return tokens


def _data_lines(text, path):
    for line_num, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield line_num, line


def parse_stopwords(text, source="<string>"):
    """One token per line, '#' comments. Entries must already be clean
    tokens (single lowercase ASCII-letter words)."""
    words = set()
    for line_num, line in _data_lines(text, source):
        if not line.isascii() or not line.isalpha() or line != line.lower():
            raise ConfigError(
                f"{source} line {line_num}: stopword {line!r} is not a "
                "clean lowercase token")
        words.add(line)
    return StopwordList(frozenset(words))


def parse_suffix_rules(text, source="<string>"):
    """Lines of ``suffix,min_stem_len``, '#' comments, order preserved."""
    rules = []
    for line_num, line in _data_lines(text, source):
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise ConfigError(f"{source} line {line_num}: expected "
                              f"'suffix,min_stem_len', got {line!r}")
        suffix, raw_len = parts
        if not suffix:
            raise ConfigError(f"{source} line {line_num}: empty suffix")
        try:
            min_len = int(raw_len)
        except ValueError:
            raise ConfigError(f"{source} line {line_num}: min_stem_len "
                              f"{raw_len!r} is not an integer")
        if min_len < 2:
            raise ConfigError(f"{source} line {line_num}: min_stem_len "
                              f"must be >= 2, got {min_len}")
        rules.append(SuffixRule(suffix, min_len))
    return SuffixRuleTable(tuple(rules))


def load_stopwords(path):
    with open(path, encoding="utf-8") as fh:
        return parse_stopwords(fh.read(), source=str(path))


def load_suffix_rules(path):
    with open(path, encoding="utf-8") as fh:
        return parse_suffix_rules(fh.read(), source=str(path))


def default_stopwords():
    text = resources.files("depscreen").joinpath("data/stopwords.txt").read_text("utf-8")
    return parse_stopwords(text, source="data/stopwords.txt")


def default_suffix_rules():
    text = resources.files("depscreen").joinpath("data/suffixes.txt").read_text("utf-8")
    return parse_suffix_rules(text, source="data/suffixes.txt")
