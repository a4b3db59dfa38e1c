"""
Tests for internationalization (i18n) functionality
"""

import os
import sys
import unittest
from pathlib import Path
from unittest.mock import patch

# Add src directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from contextual_hidden_variables.i18n import (  # noqa: E402
    MESSAGES,
    MessageManager,
    resolve_language,
)


class TestResolveLanguage(unittest.TestCase):
    """Tests for resolve_language"""

    def test_japanese_from_lang(self):
        self.assertEqual(resolve_language({"LANG": "ja_JP.UTF-8"}), "ja")

    def test_english_from_lang(self):
        self.assertEqual(resolve_language({"LANG": "en_US.UTF-8"}), "en")

    def test_override_wins_over_lang(self):
        """CONTEXTUAL_HV_LANG takes precedence over the POSIX variables"""
        env = {"CONTEXTUAL_HV_LANG": "ja", "LC_ALL": "en_US.UTF-8"}
        self.assertEqual(resolve_language(env), "ja")
        env = {"CONTEXTUAL_HV_LANG": "en", "LANG": "ja_JP.UTF-8"}
        self.assertEqual(resolve_language(env), "en")

    def test_posix_precedence(self):
        """LC_ALL before LC_MESSAGES before LANG"""
        env = {"LC_ALL": "ja_JP.UTF-8", "LANG": "en_US.UTF-8"}
        self.assertEqual(resolve_language(env), "ja")
        env = {"LC_MESSAGES": "en_GB.UTF-8", "LANG": "ja_JP.UTF-8"}
        self.assertEqual(resolve_language(env), "en")

    def test_other_languages_fall_back_to_english(self):
        self.assertEqual(resolve_language({"LANG": "de_DE.UTF-8"}), "en")
        self.assertEqual(resolve_language({}), "en")

    def test_reads_process_environment(self):
        with patch.dict(os.environ, {"CONTEXTUAL_HV_LANG": "ja"}):
            self.assertEqual(resolve_language(), "ja")
            self.assertEqual(MessageManager().language, "ja")


class TestMessageManager(unittest.TestCase):
    """Tests for MessageManager"""

    def test_get_english_message(self):
        msg = MessageManager("en")
        self.assertEqual(msg.get("error_prefix"), "Error")
        self.assertEqual(msg.get("yes"), "yes")

    def test_get_japanese_message(self):
        msg = MessageManager("ja")
        self.assertEqual(msg.get("error_prefix"), "エラー")
        self.assertEqual(msg.get("yes"), "はい")

    def test_unknown_language_uses_english(self):
        self.assertEqual(MessageManager("fr").language, "en")

    def test_language_fixed_at_construction(self):
        """Changing the environment later does not switch the language"""
        msg = MessageManager("en")
        with patch.dict(os.environ, {"CONTEXTUAL_HV_LANG": "ja"}):
            self.assertEqual(msg.get("error_prefix"), "Error")

    def test_message_formatting(self):
        en = MessageManager("en")
        ja = MessageManager("ja")
        kwargs = {"suite": "gfunc", "passed": 20, "trials": 20}
        self.assertEqual(
            en.get("suite_passed", **kwargs), "Suite gfunc: 20/20 trials passed"
        )
        self.assertEqual(ja.get("suite_passed", **kwargs), "スイート gfunc: 20/20 回成功")

    def test_missing_format_parameter(self):
        """A missing format parameter returns the raw template"""
        msg = MessageManager("en")
        self.assertEqual(msg.get("report_written"), "Report written: {path}")
        self.assertEqual(msg.get("report_written", other=1), "Report written: {path}")

    def test_fallback_to_key(self):
        msg = MessageManager("ja")
        self.assertEqual(msg.get("nonexistent_key"), "nonexistent_key")
        self.assertFalse(msg.has("nonexistent_key"))
        self.assertTrue(msg.has("error_prefix"))

    def test_block_is_one_based(self):
        """Partition blocks are printed with 1-based indices"""
        msg = MessageManager("en")
        self.assertEqual(msg.block((0, 1)), "{1,2}")
        self.assertEqual(msg.block([2]), "{3}")

    def test_catalogs_have_same_keys(self):
        self.assertEqual(set(MESSAGES["en"]), set(MESSAGES["ja"]))


if __name__ == "__main__":
    unittest.main()
