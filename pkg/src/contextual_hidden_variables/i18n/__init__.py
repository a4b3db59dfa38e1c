"""
Internationalization (i18n) for Contextual Hidden Variables

Japanese or English CLI messages, chosen from the environment.
"""

from .message_catalog import MESSAGES
from .message_manager import LANG_ENV_VAR, MessageManager, resolve_language

__all__ = ["LANG_ENV_VAR", "MESSAGES", "MessageManager", "resolve_language"]
