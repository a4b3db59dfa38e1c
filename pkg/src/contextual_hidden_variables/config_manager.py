"""
設定ファイル管理モジュール
JSON形式の設定ファイルと入力ドキュメント (状態・履歴・観測量・フレーム) の
読み込みと検証を管理
"""

import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np

from .context import Context, context_from_document, decode_matrix, decode_vector
from .error_handler import InvalidDocument
from .linalg import require_hermitian

CONFIG_ENV_VAR = "CONTEXTUAL_HV_CONFIG"
CONFIG_VERSION = "1.0"

SCENARIOS = ("peres", "remark", "born", "partitions", "check")
OUTPUT_FORMATS = ("json", "table")
SUITES = (
    "gfunc",
    "ntrns",
    "symplectic",
    "born",
    "partitions",
    "reduction",
    "dualpath",
    "all",
)

DEFAULT_EPSILON = 0.3
DEFAULT_SAMPLES = 100000
DEFAULT_SEED = 42
DEFAULT_FORMAT = "json"
DEFAULT_TRIALS = 20
MAX_EPSILON = math.sqrt(2.0) / 2.0
MAX_SEED = 2**64

# 組み込みの Peres コンテキスト名の別名
CONTEXT_ALIASES = {
    "alpha": "α",
    "beta": "β",
    "gamma": "γ",
    "delta": "δ",
    "epsilon": "ε",
    "xi": "ξ",
}


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


@dataclass
class ScenarioConfig:
    """シナリオ実行設定クラス"""

    scenario: str
    epsilon: float = DEFAULT_EPSILON
    seed: int = DEFAULT_SEED
    n_samples: int = DEFAULT_SAMPLES
    output_format: str = DEFAULT_FORMAT
    include_samples: bool = False
    suite: str = "all"
    trials: int = DEFAULT_TRIALS

    def __post_init__(self):
        """初期化後の検証"""
        if self.scenario not in SCENARIOS:
            raise ValueError(f"未知のシナリオです: {self.scenario}")
        if not _is_number(self.epsilon) or not 0.0 < self.epsilon < MAX_EPSILON:
            raise ValueError(
                f"epsilon は 0 より大きく {MAX_EPSILON:.6f} 未満である必要があります: {self.epsilon}"
            )
        if not _is_int(self.n_samples) or self.n_samples < 1:
            raise ValueError(f"samples は1以上の整数である必要があります: {self.n_samples}")
        if not _is_int(self.seed) or not 0 <= self.seed < MAX_SEED:
            raise ValueError(f"seed は 0 以上 2^64 未満の整数である必要があります: {self.seed}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"format は json か table である必要があります: {self.output_format}")
        if self.suite not in SUITES:
            raise ValueError(f"未知のチェックスイートです: {self.suite}")
        if not _is_int(self.trials) or self.trials < 1:
            raise ValueError(f"trials は1以上の整数である必要があります: {self.trials}")


class ConfigManager:
    """設定ファイル管理クラス"""

    def __init__(self, verbose: bool = False):
        self.verbose = verbose

    def _log(self, message: str) -> None:
        """ログ出力（詳細モード時のみ、標準エラー出力）"""
        if self.verbose:
            print(f"[設定管理] {message}", file=sys.stderr)

    def get_default_config_path(self) -> Path:
        """デフォルト設定ファイルパスを取得"""
        return Path.home() / ".config" / "contextual-hv" / "config.json"

    def get_config_path(self, config_arg: Optional[Path] = None) -> Tuple[Path, bool]:
        """
        設定ファイルパスを決定（優先順位に従って）

        Returns:
            Tuple[Path, bool]: (パス, 明示的に指定されたか)
        """
        # 1. コマンドライン引数
        if config_arg:
            self._log(f"コマンドライン引数から設定ファイルパス: {config_arg}")
            return Path(config_arg), True

        # 2. 環境変数
        env_config = os.environ.get(CONFIG_ENV_VAR)
        if env_config:
            path = Path(env_config)
            self._log(f"環境変数から設定ファイルパス: {path}")
            return path, True

        # 3. デフォルト
        default_path = self.get_default_config_path()
        self._log(f"デフォルト設定ファイルパス: {default_path}")
        return default_path, False

    def validate_config_structure(self, config_data: Any) -> List[str]:
        """設定ファイル構造の検証"""
        errors: List[str] = []

        if not isinstance(config_data, dict):
            return ["設定ファイルはオブジェクトである必要があります"]

        if "version" not in config_data:
            errors.append("必須フィールド 'version' が見つかりません")
        elif not isinstance(config_data["version"], str):
            errors.append("'version' は文字列である必要があります")

        known = {"version", "epsilon", "samples", "seed", "format", "trials"}
        for key in sorted(set(config_data) - known):
            errors.append(f"未知のフィールド '{key}' があります")

        if "epsilon" in config_data:
            eps = config_data["epsilon"]
            if not _is_number(eps):
                errors.append("'epsilon' は数値である必要があります")
            elif not 0.0 < eps < MAX_EPSILON:
                errors.append(
                    f"'epsilon' は 0 より大きく {MAX_EPSILON:.6f} 未満である必要があります"
                )

        if "samples" in config_data:
            samples = config_data["samples"]
            if not _is_int(samples):
                errors.append("'samples' は整数である必要があります")
            elif samples < 1:
                errors.append("'samples' は1以上である必要があります")

        if "seed" in config_data:
            seed = config_data["seed"]
            if not _is_int(seed):
                errors.append("'seed' は整数である必要があります")
            elif not 0 <= seed < MAX_SEED:
                errors.append("'seed' は 0 以上 2^64 未満である必要があります")

        if "format" in config_data and config_data["format"] not in OUTPUT_FORMATS:
            errors.append("'format' は 'json' か 'table' である必要があります")

        if "trials" in config_data:
            trials = config_data["trials"]
            if not _is_int(trials) or trials < 1:
                errors.append("'trials' は1以上の整数である必要があります")

        return errors

    def load_config(
        self, config_path: Path, required: bool = False
    ) -> Tuple[bool, Dict[str, Any], List[str]]:
        """
        設定ファイルを読み込み

        Args:
            config_path: 設定ファイルパス
            required: True ならファイルがないことをエラーとする

        Returns:
            Tuple[bool, Dict[str, Any], List[str]]: (成功フラグ, 既定値の辞書, エラーリスト)
        """
        self._log(f"設定ファイルを読み込み中: {config_path}")

        if not config_path.exists():
            if required:
                return False, {}, [f"設定ファイルが見つかりません: {config_path}"]
            self._log("設定ファイルがないため組み込みの既定値を使用")
            return True, {}, []

        try:
            with open(config_path, "r", encoding="utf-8") as f:
                config_data = json.load(f)

            self._log("JSON解析完了")

            validation_errors = self.validate_config_structure(config_data)
            if validation_errors:
                return False, {}, validation_errors

            defaults = {k: v for k, v in config_data.items() if k != "version"}
            self._log(f"設定ファイル読み込み完了: {sorted(defaults)}")
            return True, defaults, []

        except json.JSONDecodeError as e:
            error_msg = f"JSON構文エラー: {e.msg} (行 {e.lineno}, 列 {e.colno})"
            return False, {}, [error_msg]
        except OSError as e:
            return False, {}, [f"設定ファイル読み込みエラー: {e}"]

    def build_scenario_config(
        self,
        scenario: str,
        args: Any,
        file_defaults: Optional[Mapping[str, Any]] = None,
    ) -> ScenarioConfig:
        """
        シナリオ設定を構築（優先順位: コマンドライン > 設定ファイル > 組み込み既定値）

        args は argparse.Namespace などの属性を持つオブジェクト。指定されていない
        オプションは None か属性なし。
        """
        file_defaults = file_defaults or {}

        def pick(attr: str, key: str, default: Any) -> Any:
            value = getattr(args, attr, None)
            if value is not None:
                return value
            return file_defaults.get(key, default)

        config = ScenarioConfig(
            scenario=scenario,
            epsilon=pick("epsilon", "epsilon", DEFAULT_EPSILON),
            seed=pick("seed", "seed", DEFAULT_SEED),
            n_samples=pick("samples", "samples", DEFAULT_SAMPLES),
            output_format=pick("format", "format", DEFAULT_FORMAT),
            include_samples=bool(getattr(args, "include_samples", False)),
            suite=getattr(args, "suite", None) or "all",
            trials=pick("trials", "trials", DEFAULT_TRIALS),
        )
        self._log(
            f"シナリオ設定: {scenario} epsilon={config.epsilon} "
            f"samples={config.n_samples} seed={config.seed}"
        )
        return config

    # -----------------------------------------------------------------------
    # 入力ドキュメント
    # -----------------------------------------------------------------------

    def read_document(self, path: Path) -> Any:
        """JSON ドキュメントを読み込み"""
        self._log(f"ドキュメントを読み込み中: {path}")
        if not Path(path).exists():
            raise FileNotFoundError(f"document not found: {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                return json.load(f)
        except json.JSONDecodeError as e:
            raise InvalidDocument(
                f"{path}: JSON syntax error: {e.msg} "
                f"(line {e.lineno}, column {e.colno})"
            )

    def load_frame_document(self, path: Path) -> Context:
        """フレームドキュメント {"vectors": [...], "name": ...} を読み込み"""
        return context_from_document(self.read_document(path))

    def load_state_document(self, path: Path) -> np.ndarray:
        """状態ドキュメント {"state": [[re, im], ...]} を読み込み"""
        doc = self.read_document(path)
        items = doc.get("state") if isinstance(doc, dict) else doc
        return decode_vector(items)

    def load_observable_document(self, path: Path) -> np.ndarray:
        """観測量ドキュメント {"observable": [[[re, im], ...], ...]} を読み込み"""
        doc = self.read_document(path)
        rows = doc.get("observable") if isinstance(doc, dict) else doc
        return require_hermitian(decode_matrix(rows))

    def load_history_document(
        self,
        path: Path,
        named_contexts: Optional[Mapping[str, Context]] = None,
    ) -> List[Context]:
        """
        履歴ドキュメント {"history": [...]} を読み込み

        各要素はフレームオブジェクト、または組み込みコンテキスト名
        (alpha … xi またはギリシャ文字)。
        """
        doc = self.read_document(path)
        items = doc.get("history") if isinstance(doc, dict) else doc
        if not isinstance(items, list) or not items:
            raise InvalidDocument("history must be a non-empty list")
        return [self.resolve_context(item, named_contexts) for item in items]

    def resolve_context(
        self, item: Any, named_contexts: Optional[Mapping[str, Context]] = None
    ) -> Context:
        """履歴の要素をコンテキストに変換"""
        if isinstance(item, str):
            name = CONTEXT_ALIASES.get(item.lower(), item)
            if named_contexts and name in named_contexts:
                return named_contexts[name]
            raise InvalidDocument(f"unknown context name: {item!r}")
        return context_from_document(item)
