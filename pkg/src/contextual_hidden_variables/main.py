#!/usr/bin/env python3
"""
Contextual Hidden Variables - メインエントリーポイント
履歴に依存する文脈的隠れた変数モデルのシナリオ実行と検証
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, List, Optional

from . import __version__
from .config_manager import OUTPUT_FORMATS, SUITES, ConfigManager
from .error_handler import ErrorHandler
from .i18n import MessageManager
from .logger import Logger
from .scenarios import ScenarioRunner, peres_contexts
from .suites import CheckSuiteRunner


def _add_run_options(parser: argparse.ArgumentParser, samples: bool = True) -> None:
    """シナリオ共通のオプション"""
    if samples:
        parser.add_argument("--epsilon", type=float, help="球の半径 ε (0 < ε < √2/2)")
        parser.add_argument("--samples", type=int, help="サンプル数 (デフォルト: 100000)")
    parser.add_argument("--seed", type=int, help="乱数シード (デフォルト: 42)")
    _add_output_options(parser)


def _add_output_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=Path, help="レポートの出力先 (デフォルト: 標準出力)")
    parser.add_argument("--format", choices=OUTPUT_FORMATS, help="出力形式 (json / table)")


def build_parser() -> argparse.ArgumentParser:
    """コマンドライン引数のパーサーを構築"""
    parser = argparse.ArgumentParser(
        prog="contextual-hv",
        description="履歴に依存する文脈的隠れた変数モデルのシミュレーター",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
使用例:
  contextual-hv peres --samples 100000 --seed 7         # Peres の例 (JSON)
  contextual-hv peres --format table                    # 表形式で表示
  contextual-hv remark                                  # 2つのコンテキストで安定な縮退オブザーバブル
  contextual-hv born --state s.json --history h.json --observable o.json
  contextual-hv partitions --frame-a a.json --frame-b b.json
  contextual-hv check --suite gfunc --trials 20         # ランダム化チェック
        """,
    )

    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="詳細ログを表示")
    parser.add_argument(
        "--config",
        type=Path,
        help="設定ファイルのパス (デフォルト: ~/.config/contextual-hv/config.json)",
    )
    parser.add_argument(
        "--no-log", action="store_true", help="ログファイルに書き込まない"
    )

    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    peres = sub.add_parser("peres", help="Peres の2量子ビットの例を実行")
    _add_run_options(peres)
    peres.add_argument(
        "--include-samples", action="store_true", help="サンプルごとの値を JSON に含める"
    )

    remark = sub.add_parser("remark", help="2つのコンテキストで安定な縮退オブザーバブルの例")
    _add_run_options(remark)
    remark.add_argument(
        "--include-samples", action="store_true", help="サンプルごとの値を JSON に含める"
    )

    born = sub.add_parser("born", help="任意の状態・履歴・観測量でボルン則を検証")
    born.add_argument("--state", type=Path, required=True, help="状態ドキュメント")
    born.add_argument("--history", type=Path, required=True, help="履歴ドキュメント")
    born.add_argument("--observable", type=Path, required=True, help="観測量ドキュメント")
    _add_run_options(born)

    partitions = sub.add_parser("partitions", help="2つのフレームの最も細かい共通分割")
    partitions.add_argument("--frame-a", type=Path, required=True, help="フレーム α")
    partitions.add_argument("--frame-b", type=Path, required=True, help="フレーム β")
    _add_output_options(partitions)

    check = sub.add_parser("check", help="ランダム化チェックスイートを実行")
    check.add_argument("--suite", choices=SUITES, default="all", help="チェックスイート")
    check.add_argument("--trials", type=int, help="試行回数 (デフォルト: 20)")
    _add_run_options(check, samples=False)

    return parser


def _emit(text: str, out: Optional[Path], msg: MessageManager, verbose: bool) -> None:
    """レポートをファイルまたは標準出力に書き出す"""
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as f:
        f.write(text)
    if verbose:
        print(msg.get("report_written", path=out), file=sys.stderr)


def _run_command(
    args: argparse.Namespace,
    config_manager: ConfigManager,
    defaults: dict,
    logger: Logger,
    msg: MessageManager,
) -> int:
    """サブコマンドを実行して終了コードを返す"""
    runner = ScenarioRunner(verbose=args.verbose, logger=logger, msg=msg)
    cfg = config_manager.build_scenario_config(args.command, args, defaults)
    report: Any

    if args.command == "check":
        checker = CheckSuiteRunner(
            seed=cfg.seed,
            trials=cfg.trials,
            verbose=args.verbose,
            logger=logger,
            msg=msg,
        )
        results = checker.run(cfg.suite)
        _emit(checker.render(cfg.output_format), args.out, msg, args.verbose)
        return 0 if all(r.success for r in results) else 1

    if args.command == "peres":
        report = runner.run_peres(cfg)
    elif args.command == "remark":
        report = runner.run_remark(cfg)
    elif args.command == "born":
        named, _ = peres_contexts()
        state = config_manager.load_state_document(args.state)
        contexts = config_manager.load_history_document(args.history, named)
        observable = config_manager.load_observable_document(args.observable)
        report = runner.run_born(cfg, state, contexts, observable)
    elif args.command == "partitions":
        ca = config_manager.load_frame_document(args.frame_a)
        cb = config_manager.load_frame_document(args.frame_b)
        report = runner.run_partitions(ca, cb)
    else:
        raise ValueError(f"unknown command: {args.command}")

    text = runner.render(report, cfg.output_format, cfg.include_samples)
    _emit(text, args.out, msg, args.verbose)
    return 0


def cli_main(argv: Optional[List[str]] = None) -> int:
    """メイン実行関数 (終了コードを返す)"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse の使用法エラーは 2、--help / --version は 0
        return int(e.code) if isinstance(e.code, int) else 2

    msg = MessageManager()

    logger = Logger(verbose=args.verbose, log_to_file=not args.no_log)
    error_handler = ErrorHandler(verbose=args.verbose, msg=msg)

    try:
        logger.info("cli", f"Contextual Hidden Variables v{__version__} started")
        if args.verbose:
            print(msg.get("app_start", version=__version__), file=sys.stderr)
            print(msg.get("verbose_enabled"), file=sys.stderr)
            if args.no_log:
                print(msg.get("logging_disabled"), file=sys.stderr)

        # 設定ファイルの読み込み
        config_manager = ConfigManager(verbose=args.verbose)
        config_path, required = config_manager.get_config_path(args.config)
        if args.verbose:
            print(msg.get("config_file_path", path=config_path), file=sys.stderr)

        success, defaults, errors = config_manager.load_config(config_path, required)
        if not success:
            logger.log_config_load(config_path, False, errors=errors)
            if not config_path.exists():
                error_code = "FILE_NOT_FOUND"
            elif any("JSON構文エラー" in error for error in errors):
                error_code = "CONFIG_SYNTAX_ERROR"
            else:
                error_code = "INVALID_CONFIG"
            print(msg.get("config_invalid"), file=sys.stderr)
            for error in errors:
                print(msg.get("config_issue_item", issue=error), file=sys.stderr)
            error_handler.handle_error(error_code, {"config_path": str(config_path)})
            return error_handler.get_exit_code(error_code)

        logger.log_config_load(config_path, True, defaults=defaults)
        if args.verbose and not config_path.exists():
            print(msg.get("config_default_used"), file=sys.stderr)

        exit_code = _run_command(args, config_manager, defaults, logger, msg)

        if exit_code == 0:
            logger.success("cli", f"Command completed: {args.command}")
        else:
            logger.error("cli", f"Command failed: {args.command}")

        if args.verbose:
            print(msg.get("app_complete"), file=sys.stderr)
            logger.print_session_summary()

        return exit_code

    except KeyboardInterrupt:
        print(f"\n{msg.get('app_interrupted')}", file=sys.stderr)
        logger.warning("cli", "Interrupted by user")
        return 1
    except Exception as e:
        context = {"command": args.command}
        error_code = error_handler.handle_exception(e, context)
        logger.error("cli", f"{type(e).__name__}: {e}", {"error_code": error_code})
        if getattr(args, "format", None) == "json":
            report = error_handler.create_error_report(error_code, context, e)
            text = json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False)
            _emit(text + "\n", getattr(args, "out", None), msg, args.verbose)
        return error_handler.get_exit_code(error_code)


def main() -> None:
    """コンソールスクリプトのエントリーポイント"""
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
