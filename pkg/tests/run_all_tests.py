#!/usr/bin/env python3
"""
全テストを実行するマスタースクリプト

tests/test_*.py を探して、数値計算コアから CLI の順に1ファイルずつ実行する。
  python3 tests/run_all_tests.py            # すべて
  python3 tests/run_all_tests.py context    # 名前に context を含むものだけ
"""
import argparse
import subprocess
import sys
import time
from pathlib import Path
from typing import List, Optional

TESTS_DIR = Path(__file__).resolve().parent
PROJECT_ROOT = TESTS_DIR.parent

# 依存の下位から順に実行する (ここにないものは最後に名前順)
LAYER_ORDER = (
    "linalg",
    "context",
    "phase_space",
    "ensemble",
    "scenarios",
    "suites",
)


def _rank(path: Path) -> tuple:
    module = path.stem[len("test_") :]
    if module in LAYER_ORDER:
        return (LAYER_ORDER.index(module), module)
    return (len(LAYER_ORDER), module)


def discover_test_files(keyword: Optional[str] = None) -> List[Path]:
    """テストファイルを実行順に返す"""
    files = sorted(TESTS_DIR.glob("test_*.py"), key=_rank)
    if keyword:
        files = [f for f in files if keyword in f.stem]
    return files


def run_test_file(test_file: Path) -> bool:
    print(f"\n{'=' * 80}\n実行中: {test_file.relative_to(PROJECT_ROOT)}\n{'=' * 80}")
    result = subprocess.run([sys.executable, str(test_file)], cwd=PROJECT_ROOT)
    return result.returncode == 0


def main(argv: Optional[List[str]] = None) -> bool:
    parser = argparse.ArgumentParser(description="全テストスイートを実行")
    parser.add_argument("keyword", nargs="?", help="ファイル名で絞り込む")
    args = parser.parse_args(argv)

    files = discover_test_files(args.keyword)
    if not files:
        print(f"テストファイルが見つかりません: {args.keyword}")
        return False

    print("\n" + "=" * 80)
    print(f"Contextual Hidden Variables - テストスイート ({len(files)} ファイル)")
    print("=" * 80)

    results = []
    for test_file in files:
        started = time.perf_counter()
        ok = run_test_file(test_file)
        results.append((test_file.stem, ok, time.perf_counter() - started))

    print("\n" + "=" * 80)
    print("全テスト結果サマリー")
    print("=" * 80)
    for name, ok, elapsed in results:
        status = "✓ PASS" if ok else "✗ FAIL"
        print(f"  {status}: {name} ({elapsed:.1f}s)")

    passed = sum(1 for _, ok, _ in results if ok)
    print(f"\n合計: {passed}/{len(results)} テストファイル成功")
    return passed == len(results)


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
