"""
エラーハンドリングモジュール
ドメイン例外の定義と、ユーザーフレンドリーなエラーメッセージ・終了コードを提供

Note: Messages shown to users go through the i18n MessageManager.
      Exception messages themselves are technical records.
"""

import sys
import traceback
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional

from .i18n import MessageManager


class ErrorCategory(Enum):
    """エラーカテゴリ"""

    INPUT = "input"
    CONFIG = "config"
    NUMERIC = "numeric"
    ASSERTION = "assertion"
    SYSTEM = "system"


# ---------------------------------------------------------------------------
# ドメイン例外
# ---------------------------------------------------------------------------


class ContextualHVError(Exception):
    """全てのドメイン例外の基底クラス"""

    code = "UNEXPECTED_ERROR"


class DimensionMismatch(ContextualHVError):
    code = "DIMENSION_MISMATCH"


class NotHermitian(ContextualHVError):
    code = "NOT_HERMITIAN"


class NotUnitary(ContextualHVError):
    code = "NOT_UNITARY"


class InvalidConfig(ContextualHVError):
    code = "INVALID_CONFIG"


class InvalidDocument(ContextualHVError):
    code = "INVALID_DOCUMENT"


class NotStable(ContextualHVError):
    code = "NOT_STABLE"


class EquivalentContexts(ContextualHVError):
    code = "EQUIVALENT_CONTEXTS"


class UndefinedFunctionValue(ContextualHVError):
    code = "UNDEFINED_FUNCTION_VALUE"


class ZeroMassLabel(ContextualHVError):
    code = "ZERO_MASS_LABEL"


class NoConvergence(ContextualHVError):
    code = "NO_CONVERGENCE"


class SpanMismatch(ContextualHVError):
    code = "SPAN_MISMATCH"


class NotPermutation(ContextualHVError):
    code = "NOT_PERMUTATION"


class BlockMassMismatch(ContextualHVError):
    code = "BLOCK_MASS_MISMATCH"


class UnlabeledPoint(ContextualHVError):
    code = "UNLABELED_POINT"


class AmbiguousTube(ContextualHVError):
    code = "AMBIGUOUS_TUBE"


class UndefinedValue(ContextualHVError):
    code = "UNDEFINED_VALUE"


class PropositionViolation(ContextualHVError):
    """命題違反（発生してはならない）"""

    code = "PROPOSITION_VIOLATION"

    def __init__(
        self,
        message: str,
        proposition: str = "",
        sample_index: Optional[int] = None,
    ):
        super().__init__(message)
        self.proposition = proposition
        self.sample_index = sample_index


class GFuncViolation(PropositionViolation):
    code = "GFUNC_VIOLATION"


class NTrnsViolation(PropositionViolation):
    code = "NTRNS_VIOLATION"


class AssertionFailure(PropositionViolation):
    code = "ASSERTION_FAILURE"


# ---------------------------------------------------------------------------
# エラーカタログ
# ---------------------------------------------------------------------------


@dataclass
class ErrorInfo:
    """エラー情報クラス"""

    category: ErrorCategory
    code: str
    message_key: str
    details_key: Optional[str] = None
    suggestion_keys: Optional[List[str]] = None


class ErrorHandler:
    """エラーハンドリングクラス"""

    def __init__(self, verbose: bool = False, msg: Optional[MessageManager] = None):
        self.verbose = verbose
        self.msg = msg or MessageManager()
        self.error_catalog = self._build_error_catalog()

    def _build_error_catalog(self) -> Dict[str, ErrorInfo]:
        """エラーカタログを構築"""

        def entry(category, code, suggestions=None):
            key = code.lower()
            return ErrorInfo(
                category=category,
                code=code,
                message_key=f"err_{key}",
                details_key=f"err_{key}_details",
                suggestion_keys=suggestions,
            )

        return {
            # 入力エラー
            "USAGE_ERROR": entry(ErrorCategory.INPUT, "USAGE_ERROR", ["sug_help"]),
            "DIMENSION_MISMATCH": entry(
                ErrorCategory.INPUT, "DIMENSION_MISMATCH", ["sug_check_dimensions"]
            ),
            "NOT_HERMITIAN": entry(
                ErrorCategory.INPUT, "NOT_HERMITIAN", ["sug_check_observable"]
            ),
            "NOT_UNITARY": entry(ErrorCategory.INPUT, "NOT_UNITARY"),
            "INVALID_DOCUMENT": entry(
                ErrorCategory.INPUT,
                "INVALID_DOCUMENT",
                ["sug_document_format", "sug_docs_configuration"],
            ),
            "NOT_STABLE": entry(
                ErrorCategory.INPUT, "NOT_STABLE", ["sug_check_observable"]
            ),
            "EQUIVALENT_CONTEXTS": entry(
                ErrorCategory.INPUT, "EQUIVALENT_CONTEXTS", ["sug_history"]
            ),
            "UNDEFINED_FUNCTION_VALUE": entry(
                ErrorCategory.INPUT, "UNDEFINED_FUNCTION_VALUE"
            ),
            "ZERO_MASS_LABEL": entry(ErrorCategory.INPUT, "ZERO_MASS_LABEL"),
            # 設定エラー
            "INVALID_CONFIG": entry(
                ErrorCategory.CONFIG,
                "INVALID_CONFIG",
                ["sug_epsilon_range", "sug_docs_configuration"],
            ),
            "CONFIG_SYNTAX_ERROR": entry(
                ErrorCategory.CONFIG, "CONFIG_SYNTAX_ERROR", ["sug_json_syntax"]
            ),
            "FILE_NOT_FOUND": entry(
                ErrorCategory.CONFIG, "FILE_NOT_FOUND", ["sug_check_path"]
            ),
            # 数値的破綻
            "NO_CONVERGENCE": entry(ErrorCategory.NUMERIC, "NO_CONVERGENCE"),
            "SPAN_MISMATCH": entry(
                ErrorCategory.NUMERIC, "SPAN_MISMATCH", ["sug_tolerance"]
            ),
            "NOT_PERMUTATION": entry(ErrorCategory.NUMERIC, "NOT_PERMUTATION"),
            "BLOCK_MASS_MISMATCH": entry(
                ErrorCategory.NUMERIC, "BLOCK_MASS_MISMATCH", ["sug_tolerance"]
            ),
            "UNLABELED_POINT": entry(ErrorCategory.NUMERIC, "UNLABELED_POINT"),
            "AMBIGUOUS_TUBE": entry(
                ErrorCategory.NUMERIC, "AMBIGUOUS_TUBE", ["sug_epsilon_range"]
            ),
            "UNDEFINED_VALUE": entry(ErrorCategory.NUMERIC, "UNDEFINED_VALUE"),
            # 命題違反
            "PROPOSITION_VIOLATION": entry(
                ErrorCategory.ASSERTION, "PROPOSITION_VIOLATION", ["sug_report_bug"]
            ),
            "GFUNC_VIOLATION": entry(
                ErrorCategory.ASSERTION, "GFUNC_VIOLATION", ["sug_report_bug"]
            ),
            "NTRNS_VIOLATION": entry(
                ErrorCategory.ASSERTION, "NTRNS_VIOLATION", ["sug_report_bug"]
            ),
            "ASSERTION_FAILURE": entry(
                ErrorCategory.ASSERTION, "ASSERTION_FAILURE", ["sug_report_bug"]
            ),
            # システムエラー
            "PERMISSION_DENIED": entry(ErrorCategory.SYSTEM, "PERMISSION_DENIED"),
            "UNEXPECTED_ERROR": entry(
                ErrorCategory.SYSTEM,
                "UNEXPECTED_ERROR",
                ["sug_verbose", "sug_report_bug"],
            ),
        }

    def get_error_info(self, error_code: str) -> Optional[ErrorInfo]:
        """エラー情報を取得"""
        return self.error_catalog.get(error_code)

    def handle_error(
        self,
        error_code: str,
        context: Optional[Dict[str, Any]] = None,
        exception: Optional[BaseException] = None,
    ) -> None:
        """エラーを処理して標準エラー出力に表示"""
        error_info = self.get_error_info(error_code)

        if not error_info:
            # 未知のエラーコード
            error_info = self.error_catalog["UNEXPECTED_ERROR"]

        print(
            f"\n{self.msg.get('error_prefix')}: {self.msg.get(error_info.message_key)}",
            file=sys.stderr,
        )

        if error_info.details_key:
            details = self.msg.get(error_info.details_key)
            if details != error_info.details_key:
                print(f"{self.msg.get('details_prefix')}: {details}", file=sys.stderr)

        if exception is not None and str(exception):
            print(f"  {exception}", file=sys.stderr)

        # コンテキスト情報の表示
        if context:
            print(self.msg.get("additional_info"), file=sys.stderr)
            for key, value in context.items():
                print(f"  {key}: {value}", file=sys.stderr)

        # 解決策の表示
        if error_info.suggestion_keys:
            print(f"\n{self.msg.get('suggestions')}", file=sys.stderr)
            for i, key in enumerate(error_info.suggestion_keys, 1):
                print(f"  {i}. {self.msg.get(key)}", file=sys.stderr)

        # 詳細モードでのスタックトレース
        if self.verbose and exception is not None:
            print(f"\n{self.msg.get('exception_details')}", file=sys.stderr)
            traceback.print_exception(
                type(exception), exception, exception.__traceback__, file=sys.stderr
            )

    def classify_exception(self, exception: BaseException) -> str:
        """例外からエラーコードを推定"""
        if isinstance(exception, ContextualHVError):
            return exception.code
        if isinstance(exception, FileNotFoundError):
            return "FILE_NOT_FOUND"
        if isinstance(exception, PermissionError):
            return "PERMISSION_DENIED"
        if isinstance(exception, ValueError):
            message = str(exception).lower()
            if "json" in message or "syntax" in message:
                return "CONFIG_SYNTAX_ERROR"
            return "INVALID_CONFIG"
        return "UNEXPECTED_ERROR"

    def handle_exception(
        self, exception: BaseException, context: Optional[Dict[str, Any]] = None
    ) -> str:
        """例外を処理してエラーコードを返す"""
        error_code = self.classify_exception(exception)
        if isinstance(exception, PropositionViolation):
            context = dict(context or {})
            if exception.proposition:
                context["proposition"] = exception.proposition
            if exception.sample_index is not None:
                context["sample"] = exception.sample_index
        self.handle_error(error_code, context, exception)
        return error_code

    def create_error_report(
        self,
        error_code: str,
        context: Optional[Dict[str, Any]] = None,
        exception: Optional[BaseException] = None,
    ) -> Dict[str, Any]:
        """エラーレポートを作成（JSON 出力用、タイムスタンプなし）"""
        error_info = (
            self.get_error_info(error_code) or self.error_catalog["UNEXPECTED_ERROR"]
        )

        report: Dict[str, Any] = {
            "error_code": error_code,
            "category": error_info.category.value,
            "message": self.msg.get(error_info.message_key),
            "exit_code": self.get_exit_code(error_code),
            "context": context or {},
        }

        if exception is not None:
            report["exception"] = {
                "type": type(exception).__name__,
                "message": str(exception),
            }
            if isinstance(exception, PropositionViolation):
                report["exception"]["proposition"] = exception.proposition
                report["exception"]["sample_index"] = exception.sample_index

        return report

    def get_exit_code(self, error_code: str) -> int:
        """エラーコードに対応する終了コードを取得"""
        error_info = self.get_error_info(error_code)
        if error_info is None:
            return 1
        exit_codes = {
            ErrorCategory.ASSERTION: 1,
            ErrorCategory.INPUT: 2,
            ErrorCategory.CONFIG: 2,
            ErrorCategory.NUMERIC: 3,
            ErrorCategory.SYSTEM: 1,
        }
        return exit_codes[error_info.category]
