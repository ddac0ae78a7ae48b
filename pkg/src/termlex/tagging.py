"""Tokenization and coarse part-of-speech tagging for titles.

A 10-tag tagset is enough to drive the syntactic term patterns. Tagging
is a per-token cascade: closed-class lexicon, then user-supplied domain
overrides, then suffix rules, then numeral/punctuation checks, and
finally NOUN as the default for unknown content words (which, in titles,
are overwhelmingly nouns). Pre-tagged corpora from a stronger external
tagger can be loaded instead, as long as they use this tagset.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .errors import InputFormatError

TAGSET = ("NOUN", "ADJ", "VERB", "ADV", "PREP", "DET", "CONJ", "NUM", "PUNCT", "OTHER")
TAG_IDS = {tag: i for i, tag in enumerate(TAGSET)}

# Word tokens are unicode alphanumeric runs; internal hyphens stay inside
# the token ("co-composting"). Any other non-space character is its own
# punctuation token.
_TOKEN_RE = re.compile(r"[^\W_]+(?:-[^\W_]+)*|[^\s]", re.UNICODE)

_NUM_RE = re.compile(r"\d+(?:[.,]\d+)*")


def _closed_class() -> dict[str, str]:
    groups = {
        "PREP": """of in on for with from by at to into onto over under
                   between among through during before after above below
                   about against toward towards upon within without via
                   per across near along around behind beyond despite
                   except since until versus vs amid onto off""",
        "DET": """the a an this that these those each every all both some
                  any no several many much most more few various such
                  its their his her our your my""",
        "CONJ": "and or but nor although because while whereas whether",
        "VERB": """is are was were be been being am has have had having
                   do does did can could may might must shall should
                   will would""",
        "ADV": "not very also well only often always never highly",
        "OTHER": "we you he she it they them i us who whom which what",
    }
    lexicon: dict[str, str] = {}
    for tag, words in groups.items():
        for word in words.split():
            lexicon.setdefault(word, tag)
    return lexicon


CLOSED_CLASS_LEXICON = _closed_class()

# Words ending in -ing/-ed that titles use as nouns; consulted by the
# suffix step before it falls back to VERB.
ING_ED_NOUNS = frozenset(
    """
    composting co-composting vermicomposting mulching recycling farming
    cropping processing landfilling dewatering manufacturing engineering
    monitoring modelling modeling housing building training breeding
    planting seeding harvesting fencing weathering liming breed
    """.split()
)

_SUFFIX_RULES = (
    ("ological", "ADJ"),
    ("ication", "NOUN"),
    ("ization", "NOUN"),
    ("isation", "NOUN"),
    ("ility", "NOUN"),
    ("tion", "NOUN"),
    ("sion", "NOUN"),
    ("ment", "NOUN"),
    ("ness", "NOUN"),
    ("ship", "NOUN"),
    ("ance", "NOUN"),
    ("ence", "NOUN"),
    ("ology", "NOUN"),
    ("ism", "NOUN"),
    ("ity", "NOUN"),
    ("able", "ADJ"),
    ("ible", "ADJ"),
    ("ical", "ADJ"),
    ("ful", "ADJ"),
    ("less", "ADJ"),
    ("ous", "ADJ"),
    ("ive", "ADJ"),
    ("al", "ADJ"),
    ("ic", "ADJ"),
    ("ly", "ADV"),
)


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    norm: str
    tag: str


@dataclass
class TaggedTitle:
    doc_id: str
    tokens: list[TaggedToken]


def tokenize(title: str) -> list[str]:
    """Split a title into word and punctuation tokens."""
    return _TOKEN_RE.findall(title)


def _suffix_tag(norm: str) -> str | None:
    candidates = [norm]
    if norm.endswith("s") and not norm.endswith("ss"):
        candidates.append(norm[:-1])
    for form in candidates:
        if len(form) >= 5 and (form.endswith("ing") or form.endswith("ed")):
            return "NOUN" if form in ING_ED_NOUNS or norm in ING_ED_NOUNS else "VERB"
        for suffix, tag in _SUFFIX_RULES:
            if len(form) > len(suffix) + 1 and form.endswith(suffix):
                return tag
    return None


def tag_token(surface: str, overrides: dict[str, str] | None = None) -> TaggedToken:
    """Assign exactly one tag to a token via the rule cascade."""
    norm = surface.lower()
    tag = CLOSED_CLASS_LEXICON.get(norm)
    if tag is None and overrides:
        tag = overrides.get(norm)
    if tag is None:
        tag = _suffix_tag(norm)
    if tag is None:
        if _NUM_RE.fullmatch(norm):
            tag = "NUM"
        elif not any(ch.isalnum() for ch in norm):
            tag = "PUNCT"
        else:
            tag = "NOUN"
    return TaggedToken(surface=surface, norm=norm, tag=tag)


def tag(tokens: list[str], doc_id: str = "", overrides: dict[str, str] | None = None) -> TaggedTitle:
    """Tag a token list; total (every token gets exactly one tagset member)."""
    return TaggedTitle(doc_id=doc_id, tokens=[tag_token(t, overrides) for t in tokens])


def tag_title(doc_id: str, title: str, overrides: dict[str, str] | None = None) -> TaggedTitle:
    return tag(tokenize(title), doc_id=doc_id, overrides=overrides)


def load_lexicon(path) -> dict[str, str]:
    """Read a 'token<TAB>TAG' lexicon file (domain overrides)."""
    path = Path(path)
    lexicon: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise InputFormatError(
                    "expected 'token<TAB>TAG'", path=path, line=line_no
                )
            token, tag_name = parts[0].strip().lower(), parts[1].strip()
            if tag_name not in TAGSET:
                raise InputFormatError(
                    f"unknown tag {tag_name!r}", path=path, line=line_no
                )
            lexicon[token] = tag_name
    return lexicon


def load_tagged(path) -> list[TaggedTitle]:
    """Read a tagged corpus: one title per line, 'doc_id<TAB>tok/TAG tok/TAG ...'.

    Every tag is validated against the tagset; an unknown tag is a hard
    error naming the line.
    """
    path = Path(path)
    titles: list[TaggedTitle] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if "\t" not in line:
                raise InputFormatError(
                    "expected 'doc_id<TAB>token/TAG ...'", path=path, line=line_no
                )
            doc_id, rest = line.split("\t", 1)
            tokens = []
            for item in rest.split():
                if "/" not in item:
                    raise InputFormatError(
                        f"token {item!r} has no /TAG suffix", path=path, line=line_no
                    )
                surface, tag_name = item.rsplit("/", 1)
                if tag_name not in TAGSET:
                    raise InputFormatError(
                        f"unknown tag {tag_name!r}", path=path, line=line_no
                    )
                if not surface:
                    raise InputFormatError(
                        f"empty token in {item!r}", path=path, line=line_no
                    )
                tokens.append(TaggedToken(surface=surface, norm=surface.lower(), tag=tag_name))
            titles.append(TaggedTitle(doc_id=doc_id, tokens=tokens))
    return titles


def save_tagged(titles: list[TaggedTitle], path) -> None:
    """Write the tagged-corpus format read back by load_tagged."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for title in titles:
            body = " ".join(f"{t.surface}/{t.tag}" for t in title.tokens)
            fh.write(f"{title.doc_id}\t{body}\n")
