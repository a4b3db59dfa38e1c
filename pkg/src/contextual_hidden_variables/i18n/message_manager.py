"""
Message Manager

CLI and error-catalog text in English or Japanese. Reports and log files are
never localized; only what goes to stderr and `--format table` output is.
"""

import os
from typing import Any, Mapping, Optional, Sequence

from .message_catalog import MESSAGES

LANG_ENV_VAR = "CONTEXTUAL_HV_LANG"
DEFAULT_LANGUAGE = "en"

# POSIX precedence for the message category
_POSIX_VARS = ("LC_ALL", "LC_MESSAGES", "LANG")


def resolve_language(environ: Optional[Mapping[str, str]] = None) -> str:
    """
    Pick the CLI language from the environment

    CONTEXTUAL_HV_LANG wins, then LC_ALL / LC_MESSAGES / LANG. Anything that
    is not Japanese falls back to English.
    """
    env = os.environ if environ is None else environ
    for var in (LANG_ENV_VAR,) + _POSIX_VARS:
        value = env.get(var, "")
        if value:
            return "ja" if value.lower().startswith("ja") else DEFAULT_LANGUAGE
    return DEFAULT_LANGUAGE


class MessageManager:
    """Localized message lookup, language fixed at construction"""

    def __init__(self, language: Optional[str] = None):
        language = language or resolve_language()
        self.language = language if language in MESSAGES else DEFAULT_LANGUAGE
        self._catalog = MESSAGES[self.language]
        self._fallback = MESSAGES[DEFAULT_LANGUAGE]

    def get(self, key: str, **kwargs: Any) -> str:
        """Message for key (English, then the key itself, when missing)"""
        message = self._catalog.get(key) or self._fallback.get(key, key)
        if not kwargs:
            return message
        try:
            return message.format(**kwargs)
        except (KeyError, ValueError):
            return message

    def has(self, key: str) -> bool:
        return key in self._fallback

    def block(self, indices: Sequence[int]) -> str:
        """0-based index block as a 1-based set: (0, 1) -> '{1,2}'"""
        return "{" + ",".join(str(i + 1) for i in indices) + "}"
