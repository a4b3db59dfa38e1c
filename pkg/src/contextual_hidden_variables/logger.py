"""
ログ管理モジュール
シナリオ実行とチェックスイートの構造化ログ (JSON Lines)

Log files are always written in English. CLI text goes through MessageManager.
Nothing here writes to stdout, so reports stay byte-identical.
"""

import json
import os
import sys
from collections import Counter
from dataclasses import asdict, dataclass
from datetime import datetime
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, List, Optional

from .i18n import MessageManager

if TYPE_CHECKING:
    from .context import PartitionPair
    from .scenarios import BornReport, PeresReport, RemarkReport
    from .suites import SuiteResult

LOG_DIR_ENV_VAR = "CONTEXTUAL_HV_LOG_DIR"

Details = Optional[Dict[str, Any]]


@dataclass
class LogEntry:
    """1行分のログ"""

    timestamp: str
    level: str  # INFO / SUCCESS / WARNING / ERROR / DEBUG
    component: str  # config, linalg, context, ensemble, scenario, check, cli
    message: str
    details: Details = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class Logger:
    """構造化ログとセッションサマリー"""

    def __init__(self, verbose: bool = False, log_to_file: bool = True):
        self.verbose = verbose
        self.log_to_file = log_to_file
        self.log_entries: List[LogEntry] = []
        self._log_file_path: Optional[Path] = None

        self.msg = MessageManager()

        if self.log_to_file:
            self._open_log_file()

    def get_log_dir(self) -> Path:
        """ログディレクトリ (CONTEXTUAL_HV_LOG_DIR が優先)"""
        env_dir = os.environ.get(LOG_DIR_ENV_VAR)
        if env_dir:
            return Path(env_dir)
        return Path.home() / ".local" / "state" / "contextual-hv" / "logs"

    def _open_log_file(self) -> None:
        log_dir = self.get_log_dir()
        try:
            log_dir.mkdir(parents=True, exist_ok=True)
            os.chmod(log_dir, 0o700)
        except OSError as e:
            # 作れなければファイル出力なしで続行
            print(f"Log directory unavailable: {e}", file=sys.stderr)
            self.log_to_file = False
            return

        day = datetime.now().strftime("%Y%m%d")
        self._log_file_path = log_dir / f"contextual_hv_{day}.log"

    def _append(self, entry: LogEntry) -> None:
        if not self.log_to_file or self._log_file_path is None:
            return
        line = json.dumps(entry.to_dict(), ensure_ascii=False)
        try:
            with open(self._log_file_path, "a", encoding="utf-8") as f:
                f.write(line + "\n")
        except OSError as e:
            print(f"Log file write error: {e}", file=sys.stderr)

    def log(
        self, level: str, component: str, message: str, details: Details = None
    ) -> None:
        """ログを1件記録 (verbose 時の DEBUG のみ標準エラー出力にも表示)"""
        entry = LogEntry(datetime.now().isoformat(), level, component, message, details)
        self.log_entries.append(entry)
        self._append(entry)
        if self.verbose and level == "DEBUG":
            print(f"[{component}] {message}", file=sys.stderr)

    def info(self, component: str, message: str, details: Details = None) -> None:
        self.log("INFO", component, message, details)

    def success(self, component: str, message: str, details: Details = None) -> None:
        self.log("SUCCESS", component, message, details)

    def warning(self, component: str, message: str, details: Details = None) -> None:
        self.log("WARNING", component, message, details)

    def error(self, component: str, message: str, details: Details = None) -> None:
        self.log("ERROR", component, message, details)

    def debug(self, component: str, message: str, details: Details = None) -> None:
        self.log("DEBUG", component, message, details)

    def _outcome(
        self, ok: bool, component: str, passed: str, failed: str, details: Details
    ) -> None:
        if ok:
            self.success(component, passed, details)
        else:
            self.error(component, failed, details)

    # -----------------------------------------------------------------------
    # ドメイン別のログ
    # -----------------------------------------------------------------------

    def log_config_load(
        self,
        config_path: Path,
        success: bool,
        defaults: Details = None,
        errors: Optional[List[str]] = None,
    ) -> None:
        details: Dict[str, Any] = {"config_path": str(config_path)}
        if success:
            details["defaults"] = dict(defaults or {})
        else:
            details["errors"] = list(errors or [])
        self._outcome(
            success,
            "config",
            "Configuration loaded",
            "Configuration load failed",
            details,
        )

    def log_run_start(self, scenario: str, parameters: Dict[str, Any]) -> None:
        self.info("scenario", f"Scenario started: {scenario}", dict(parameters))

    def log_peres_report(self, report: "PeresReport") -> None:
        details = {
            "samples": report.samples,
            "product_value": report.product_value,
            "noncontextual_product": report.noncontextual_product,
            "hysteresis": dict(report.hysteresis_counts),
        }
        self._outcome(
            report.contradiction_verified,
            "scenario",
            "Peres scenario verified",
            "Peres scenario failed",
            details,
        )

    def log_remark_report(self, report: "RemarkReport") -> None:
        details = {
            "samples": report.samples,
            "route_consistent": report.route_consistent,
            "checks": [c.proposition for c in report.checks],
        }
        self._outcome(
            report.route_consistent,
            "scenario",
            "Remark scenario verified",
            "Remark scenario failed",
            details,
        )

    def log_born_result(self, report: "BornReport") -> None:
        details = {
            "history": report.history,
            "exact": report.exact,
            "quantum": report.quantum,
            "residual": report.residual,
        }
        self._outcome(
            report.passed,
            "ensemble",
            "Born expectation reproduced",
            "Born expectation mismatch",
            details,
        )

    def log_partitions(self, source: str, target: str, parts: "PartitionPair") -> None:
        details = {"source": source, "target": target, **parts.to_dict()}
        self.info("context", f"Finest partitions: {parts.m} block(s)", details)

    def log_suite_result(self, result: "SuiteResult") -> None:
        # 失敗の詳細は先頭10件まで
        details = {
            "suite": result.suite,
            "trials": result.trials,
            "passed": result.passed,
            "failures": result.failures[:10],
        }
        self._outcome(
            result.success,
            "check",
            f"Suite passed: {result.suite}",
            f"Suite failed: {result.suite}",
            details,
        )

    # -----------------------------------------------------------------------
    # セッションサマリー
    # -----------------------------------------------------------------------

    def get_session_summary(self) -> Dict[str, Any]:
        """レベル別・コンポーネント別の件数と開始・終了時刻"""
        entries = self.log_entries
        return {
            "total_entries": len(entries),
            "by_level": dict(Counter(e.level for e in entries)),
            "by_component": dict(Counter(e.component for e in entries)),
            "session_start": entries[0].timestamp if entries else None,
            "session_end": entries[-1].timestamp if entries else None,
        }

    def print_session_summary(self) -> None:
        """セッションサマリーを標準エラー出力に表示"""
        if not self.log_entries:
            return

        summary = self.get_session_summary()
        out = sys.stderr
        rule = "=" * 50

        print(f"\n{rule}\n{self.msg.get('session_summary')}\n{rule}", file=out)
        total = summary["total_entries"]
        print(self.msg.get("total_log_entries", count=total), file=out)

        for key in ("by_level", "by_component"):
            print(f"\n{self.msg.get(key)}", file=out)
            for name, count in summary[key].items():
                print(f"  {name}: {count}", file=out)

        if self.log_to_file and self._log_file_path:
            print(f"\n{self.msg.get('log_file', path=self._log_file_path)}", file=out)
        if self.has_errors():
            print(f"\n{self.msg.get('errors_occurred')}", file=out)

    def get_error_summary(self) -> List[Dict[str, str]]:
        return [
            {"component": e.component, "message": e.message, "timestamp": e.timestamp}
            for e in self.log_entries
            if e.level == "ERROR"
        ]

    def has_errors(self) -> bool:
        return any(e.level == "ERROR" for e in self.log_entries)

    def get_log_file_path(self) -> Optional[Path]:
        return self._log_file_path
