"""Deterministic text cleanup and canonical-key derivation.

All grouping, deduplication, and search in the term base rides on the
canonical key produced here, so the rules are fixed per language profile
and documented as code-point ranges:

=============================  ==========================================
what                           code points
=============================  ==========================================
Arabic diacritics (tashkeel)   U+064B..U+0652, U+0670
tatweel                        U+0640
Arabic script (foreign under   U+0600..U+06FF, U+0750..U+077F,
en/fr profiles)                U+08A0..U+08FF, U+FB50..U+FDFF,
                               U+FE70..U+FEFF
Latin letters (foreign under   any code point whose Unicode name starts
the ar profile)                with "LATIN"
special characters             Unicode categories P* and S*, replaced by
                               a space before whitespace collapse
=============================  ==========================================

Hamza and alef variants are intentionally NOT folded: that changes
meaning for some terms.  Profiles are frozen; output depends only on
(text, profile).
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from functools import lru_cache

from .errors import UnsupportedLanguageError

ARABIC_DIACRITICS = frozenset(
    [chr(cp) for cp in range(0x064B, 0x0653)] + ["ٰ"]
)
TATWEEL = "ـ"

_ARABIC_BLOCKS = (
    (0x0600, 0x06FF),
    (0x0750, 0x077F),
    (0x08A0, 0x08FF),
    (0xFB50, 0xFDFF),
    (0xFE70, 0xFEFF),
)


@dataclass(frozen=True)
class NormalizationProfile:
    """Switches that fully determine normalizer output for one language."""

    lang: str
    strip_diacritics: bool = True
    strip_tatweel: bool = True
    fold_case: bool = True
    strip_foreign_script: bool = True
    collapse_whitespace: bool = True
    # Reserved: folding أ/إ/آ onto ا is off everywhere in v1.
    fold_hamza_variants: bool = False


BUILTIN_PROFILES: dict[str, NormalizationProfile] = {
    "ar": NormalizationProfile(lang="ar", fold_case=False),
    "en": NormalizationProfile(lang="en"),
    "fr": NormalizationProfile(lang="fr"),
}


def profile_for(lang: str) -> NormalizationProfile:
    """Built-in profile for a language code, or UnsupportedLanguageError."""
    try:
        return BUILTIN_PROFILES[lang]
    except KeyError:
        raise UnsupportedLanguageError(
            f"no normalization profile for language {lang!r}; "
            f"supported: {sorted(BUILTIN_PROFILES)}"
        ) from None


def _is_arabic(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _ARABIC_BLOCKS)


@lru_cache(maxsize=4096)
def _is_latin(ch: str) -> bool:
    return unicodedata.name(ch, "").startswith("LATIN")


def _strip_combining_marks(text: str) -> str:
    # For Latin-script profiles "diacritics" means combining accents:
    # decompose, drop marks, recompose.
    decomposed = unicodedata.normalize("NFD", text)
    kept = "".join(ch for ch in decomposed if unicodedata.category(ch) != "Mn")
    return unicodedata.normalize("NFC", kept)


def normalize(text: str, profile: NormalizationProfile) -> str:
    """Apply the profile's cleanup to ``text``.

    Deterministic and idempotent; may legally return "" when nothing
    survives cleanup.
    """
    out = unicodedata.normalize("NFC", text)

    if profile.strip_tatweel:
        out = out.replace(TATWEEL, "")

    if profile.strip_diacritics:
        if profile.lang == "ar":
            out = "".join(ch for ch in out if ch not in ARABIC_DIACRITICS)
        else:
            out = _strip_combining_marks(out)

    chars: list[str] = []
    for ch in out:
        if ch.isspace():
            chars.append(" ")
            continue
        cat = unicodedata.category(ch)
        if cat in ("Cc", "Cf", "Cs"):
            # Non-whitespace controls, format chars (ZWNJ, RLM, ...), and
            # stray surrogates vanish without splitting the word they sit
            # inside.
            continue
        if cat[0] in ("P", "S"):
            chars.append(" ")
            continue
        if profile.strip_foreign_script:
            if profile.lang == "ar" and _is_latin(ch):
                chars.append(" ")
                continue
            if profile.lang != "ar" and _is_arabic(ch):
                chars.append(" ")
                continue
        chars.append(ch)
    out = "".join(chars)

    if profile.fold_case:
        out = out.lower()

    if profile.collapse_whitespace:
        out = " ".join(out.split())

    return out


def canonical_key(text: str, lang: str) -> str:
    """Grouping key: profile cleanup with whitespace collapsed to single spaces.

    Surface variants differing only in diacritics, case, or extra spacing
    yield identical keys.
    """
    key = normalize(text, profile_for(lang))
    # Built-in profiles already collapse; guard stays for custom profiles.
    return " ".join(key.split())
