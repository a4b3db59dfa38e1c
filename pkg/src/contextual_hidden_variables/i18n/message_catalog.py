"""
Message Catalog

Contains all user-facing messages in English and Japanese.
"""

MESSAGES = {
    "en": {
        # System messages
        "app_start": "Contextual Hidden Variables v{version}",
        "app_complete": "Run completed",
        "app_interrupted": "Interrupted",
        "app_error": "An error occurred: {error}",
        "verbose_enabled": "Verbose logging: Enabled",
        "logging_disabled": "File logging: Disabled",
        # Config messages
        "loading_config": "Loading configuration file...",
        "config_file_path": "Configuration file: {path}",
        "config_default_used": "No configuration file found, using built-in defaults",
        "config_invalid": "Configuration file has issues:",
        "config_issue_item": "  - {issue}",
        "run_parameters": "Parameters: epsilon={epsilon}, samples={samples}, seed={seed}",
        # Scenario messages
        "scenario_start": "Running scenario: {scenario}",
        "suite_start": "Running check suite: {suite} ({trials} trials)",
        "suite_passed": "Suite {suite}: {passed}/{trials} trials passed",
        "suite_failed": "Suite {suite}: {failed} trial(s) failed",
        "report_written": "Report written: {path}",
        "all_checks_passed": "All checks passed",
        "checks_failed": "Some checks failed",
        # Table report labels
        "table_peres_title": "Peres two-qubit scenario",
        "table_remark_title": "Degenerate observable stable in two contexts",
        "table_born_title": "Born rule reproduction",
        "table_partitions_title": "Finest common partitions",
        "table_check_title": "Randomized checks",
        "table_parameters": "epsilon={epsilon}  samples={samples}  seed={seed}",
        "table_product_value": "Product value v_xi((sx.sy)(sy.sx)):",
        "table_noncontextual_product": "Noncontextual product:",
        "table_contradiction": "Contradiction verified:",
        "table_hysteresis": "Hysteresis flags (samples per flipped observable):",
        "table_history_values": "Per-history value counts:",
        "table_stability": "Stability table:",
        "table_unstable_in": "Flipped observable is not stable in:",
        "table_route_consistent": "Route consistent on all samples:",
        "table_expectation_exact": "Exact expectation:",
        "table_expectation_quantum": "Quantum expectation:",
        "table_expectation_mc": "Monte Carlo estimate:",
        "table_blocks": "Blocks:",
        "table_block_count": "Block count:",
        "table_suite_row": "{suite:<12} trials={trials:<5} passed={passed:<5} failed={failed}",
        "yes": "yes",
        "no": "no",
        # Session summary messages
        "session_summary": "Session Summary",
        "total_log_entries": "Total log entries: {count}",
        "by_level": "By level:",
        "by_component": "By component:",
        "log_file": "Log file: {path}",
        "errors_occurred": "Note: Errors occurred during execution",
        # Error display
        "error_prefix": "Error",
        "details_prefix": "Details",
        "additional_info": "Additional information:",
        "suggestions": "Suggestions:",
        "exception_details": "Exception details:",
        # Error catalog
        "err_usage_error": "Invalid command line",
        "err_dimension_mismatch": "Dimension mismatch",
        "err_dimension_mismatch_details": "Vectors, frames and observables must share the same dimension n",
        "err_not_hermitian": "Observable is not Hermitian",
        "err_not_unitary": "Matrix is not unitary",
        "err_invalid_document": "Input document is invalid",
        "err_not_stable": "Observable is not stable in the current context",
        "err_not_stable_details": "The observable must be diagonal in the frame of the last context of the history",
        "err_equivalent_contexts": "Consecutive contexts are equivalent",
        "err_equivalent_contexts_details": "A context change needs two different contexts",
        "err_undefined_function_value": "Function has no value for an eigenvalue",
        "err_zero_mass_label": "Label carries zero Born weight",
        "err_invalid_config": "Configuration is invalid",
        "err_config_syntax_error": "Configuration file has a syntax error",
        "err_file_not_found": "File not found",
        "err_no_convergence": "Eigensolver did not converge",
        "err_span_mismatch": "Partition blocks do not span equal subspaces",
        "err_span_mismatch_details": "Overlaps close to the zero threshold broke the block structure",
        "err_not_permutation": "Composed change is not a permutation of the frame",
        "err_block_mass_mismatch": "Block masses do not match during refinement",
        "err_unlabeled_point": "Sample falls outside every segment",
        "err_ambiguous_tube": "Point lies in more than one eigenspace tube",
        "err_undefined_value": "Value is undefined at this point",
        "err_proposition_violation": "A proposition of the model was violated",
        "err_gfunc_violation": "Functional composition was violated",
        "err_ntrns_violation": "Non-transition condition was violated",
        "err_assertion_failure": "Scenario assertion failed",
        "err_permission_denied": "Permission denied",
        "err_unexpected_error": "Unexpected error",
        # Suggestions
        "sug_help": "Run with --help to see the available options",
        "sug_check_dimensions": "Check that all input documents use the same dimension",
        "sug_check_observable": "Check that the observable is Hermitian and diagonal in the context",
        "sug_document_format": "Complex numbers are written as [re, im] pairs",
        "sug_docs_configuration": "See docs/configuration.md",
        "sug_history": "Remove repeated consecutive contexts from the history",
        "sug_epsilon_range": "epsilon must lie strictly between 0 and 0.7071",
        "sug_json_syntax": "Check the JSON syntax of the configuration file",
        "sug_check_path": "Check the file path",
        "sug_tolerance": "Input frames may have overlaps close to 1e-8; perturb or orthonormalize them",
        "sug_report_bug": "This indicates a defect; please report it with the seed used",
        "sug_verbose": "Run with --verbose for a stack trace",
    },
    "ja": {
        # システムメッセージ
        "app_start": "Contextual Hidden Variables v{version}",
        "app_complete": "実行が完了しました",
        "app_interrupted": "中断されました",
        "app_error": "エラーが発生しました: {error}",
        "verbose_enabled": "詳細ログ: 有効",
        "logging_disabled": "ファイルログ: 無効",
        # 設定ファイルメッセージ
        "loading_config": "設定ファイルを読み込み中...",
        "config_file_path": "設定ファイル: {path}",
        "config_default_used": "設定ファイルがないため既定値を使用します",
        "config_invalid": "設定ファイルに問題があります:",
        "config_issue_item": "  - {issue}",
        "run_parameters": "パラメータ: epsilon={epsilon}, samples={samples}, seed={seed}",
        # シナリオメッセージ
        "scenario_start": "シナリオ実行: {scenario}",
        "suite_start": "チェックスイート実行: {suite} ({trials}回)",
        "suite_passed": "スイート {suite}: {passed}/{trials} 回成功",
        "suite_failed": "スイート {suite}: {failed} 回失敗",
        "report_written": "レポートを書き出しました: {path}",
        "all_checks_passed": "全てのチェックに成功しました",
        "checks_failed": "失敗したチェックがあります",
        # 表形式レポート
        "table_peres_title": "Peres 2量子ビットシナリオ",
        "table_remark_title": "2つのコンテキストで安定な縮退オブザーバブル",
        "table_born_title": "ボルン則の再現",
        "table_partitions_title": "最も細かい共通分割",
        "table_check_title": "ランダム化チェック",
        "table_parameters": "epsilon={epsilon}  samples={samples}  seed={seed}",
        "table_product_value": "積の値 v_xi((sx.sy)(sy.sx)):",
        "table_noncontextual_product": "非文脈的な積:",
        "table_contradiction": "矛盾を確認:",
        "table_hysteresis": "ヒステリシス (反転したオブザーバブル別サンプル数):",
        "table_history_values": "履歴ごとの値の集計:",
        "table_stability": "安定性の表:",
        "table_unstable_in": "反転したオブザーバブルが安定でないコンテキスト:",
        "table_route_consistent": "全サンプルで経路に依存しない:",
        "table_expectation_exact": "厳密な期待値:",
        "table_expectation_quantum": "量子力学の期待値:",
        "table_expectation_mc": "モンテカルロ推定値:",
        "table_blocks": "ブロック:",
        "table_block_count": "ブロック数:",
        "table_suite_row": "{suite:<12} trials={trials:<5} passed={passed:<5} failed={failed}",
        "yes": "はい",
        "no": "いいえ",
        # セッションサマリーメッセージ
        "session_summary": "セッションサマリー",
        "total_log_entries": "総ログエントリ数: {count}",
        "by_level": "レベル別:",
        "by_component": "コンポーネント別:",
        "log_file": "ログファイル: {path}",
        "errors_occurred": "注意: 実行中にエラーが発生しました",
        # エラー表示
        "error_prefix": "エラー",
        "details_prefix": "詳細",
        "additional_info": "追加情報:",
        "suggestions": "解決策:",
        "exception_details": "例外詳細:",
        # エラーカタログ
        "err_usage_error": "コマンドラインが不正です",
        "err_dimension_mismatch": "次元が一致しません",
        "err_dimension_mismatch_details": "ベクトル・フレーム・オブザーバブルは同じ次元 n である必要があります",
        "err_not_hermitian": "オブザーバブルがエルミートではありません",
        "err_not_unitary": "行列がユニタリではありません",
        "err_invalid_document": "入力ドキュメントが不正です",
        "err_not_stable": "オブザーバブルが現在のコンテキストで安定ではありません",
        "err_not_stable_details": "オブザーバブルは履歴の最後のコンテキストのフレームで対角である必要があります",
        "err_equivalent_contexts": "連続するコンテキストが同値です",
        "err_equivalent_contexts_details": "コンテキスト変更には異なる2つのコンテキストが必要です",
        "err_undefined_function_value": "固有値に対する関数の値がありません",
        "err_zero_mass_label": "ボルン重みが0のラベルです",
        "err_invalid_config": "設定が不正です",
        "err_config_syntax_error": "設定ファイルに構文エラーがあります",
        "err_file_not_found": "ファイルが見つかりません",
        "err_no_convergence": "固有値ソルバーが収束しませんでした",
        "err_span_mismatch": "分割ブロックの張る部分空間が一致しません",
        "err_span_mismatch_details": "ゼロ判定閾値付近の重なりがブロック構造を壊しました",
        "err_not_permutation": "合成した変更がフレームの置換になっていません",
        "err_block_mass_mismatch": "細分化でブロックの質量が一致しません",
        "err_unlabeled_point": "サンプルがどの区間にも属しません",
        "err_ambiguous_tube": "点が複数の固有空間チューブに属しています",
        "err_undefined_value": "この点では値が定義されていません",
        "err_proposition_violation": "モデルの命題が破れました",
        "err_gfunc_violation": "関数合成条件が破れました",
        "err_ntrns_violation": "非遷移条件が破れました",
        "err_assertion_failure": "シナリオの検証に失敗しました",
        "err_permission_denied": "アクセス権限がありません",
        "err_unexpected_error": "予期しないエラー",
        # 解決策
        "sug_help": "--help で利用可能なオプションを確認してください",
        "sug_check_dimensions": "全ての入力ドキュメントの次元が同じか確認してください",
        "sug_check_observable": "オブザーバブルがエルミートでコンテキスト内で対角か確認してください",
        "sug_document_format": "複素数は [re, im] の組で記述します",
        "sug_docs_configuration": "docs/configuration.md を参照してください",
        "sug_history": "履歴から連続する同じコンテキストを取り除いてください",
        "sug_epsilon_range": "epsilon は 0 より大きく 0.7071 未満である必要があります",
        "sug_json_syntax": "設定ファイルの JSON 構文を確認してください",
        "sug_check_path": "ファイルパスを確認してください",
        "sug_tolerance": "入力フレームの重なりが 1e-8 付近です。摂動または正規直交化してください",
        "sug_report_bug": "不具合の可能性があります。使用したシードと共に報告してください",
        "sug_verbose": "--verbose でスタックトレースを表示できます",
    },
}
