#!/usr/bin/env python3
"""
シナリオモジュールのテスト
Peres の例、縮退オブザーバブルの例、ボルン則、最も細かい共通分割、レポート整形
"""
import json
import sys
from pathlib import Path

import numpy as np

# src ディレクトリをパスに追加
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from contextual_hidden_variables.config_manager import ScenarioConfig  # noqa: E402
from contextual_hidden_variables.error_handler import NotStable  # noqa: E402
from contextual_hidden_variables.logger import Logger  # noqa: E402
from contextual_hidden_variables.scenarios import (  # noqa: E402
    EXPECTED_HYSTERESIS_CAUSE,
    PERES_EXPECTED_STABILITY,
    PERES_OBSERVABLES,
    REMARK_A,
    ScenarioRunner,
    noncontextual_product,
    peres_contexts,
    peres_stability_table,
    remark_contexts,
    run_born,
    run_partitions,
    run_peres,
    run_remark,
)

SAMPLES = 2000


def _runner():
    logger = Logger(verbose=False, log_to_file=False)
    return ScenarioRunner(verbose=False, logger=logger)


def test_peres_contexts_and_singlet():
    """6つのコンテキストと一重項"""
    print("\n=== test_peres_contexts_and_singlet ===")
    contexts, singlet = peres_contexts()
    assert sorted(contexts) == sorted(["α", "β", "γ", "δ", "ε", "ξ"])
    assert all(c.n == 4 for c in contexts.values())
    assert abs(np.linalg.norm(singlet) - 1.0) < 1e-12
    weights = np.abs(contexts["γ"].frame.coefficients(singlet)) ** 2
    assert np.allclose(weights, [0, 0, 0.5, 0.5]), "一重項は +− と −+ のみ"
    zz = PERES_OBSERVABLES["σx⊗σy"] @ PERES_OBSERVABLES["σy⊗σx"]
    assert np.allclose(zz, PERES_OBSERVABLES["σz⊗σz"]), "(σx⊗σy)(σy⊗σx) = σz⊗σz"
    print("  ✓ コンテキストと一重項")


def test_peres_stability_table():
    """各オブザーバブルを安定にするコンテキスト"""
    print("\n=== test_peres_stability_table ===")
    table = peres_stability_table()
    assert table == PERES_EXPECTED_STABILITY, f"予期しない安定性: {table}"
    print("  ✓ 安定性の表")


def test_noncontextual_product_is_plus_one():
    """経路によらない値の割り当てでは積は常に +1"""
    print("\n=== test_noncontextual_product_is_plus_one ===")
    rng = np.random.default_rng(0)
    v_x = rng.choice([-1.0, 1.0], size=100)
    v_y = rng.choice([-1.0, 1.0], size=100)
    assert np.all(noncontextual_product(v_x, v_y) == 1)
    print("  ✓ 非文脈的な積 +1")


def test_run_peres_contradiction():
    """Peres の例: 文脈的な積 −1 と非文脈的な積 +1"""
    print("\n=== test_run_peres_contradiction ===")
    report = run_peres(ScenarioConfig("peres", 0.3, 7, SAMPLES))
    assert report.product_value == -1, "v(σx⊗σy)·v(σy⊗σx) = −1"
    assert report.noncontextual_product == 1
    assert report.contradiction_verified
    assert all(step["passed"] for step in report.checks), "全ての検証に合格すべき"
    assert report.hysteresis_cause == EXPECTED_HYSTERESIS_CAUSE
    print(f"  ✓ 検証ステップ {len(report.checks)} 件")

    counts = report.hysteresis_counts
    assert sum(counts.values()) == SAMPLES, "各サンプルでちょうど1つの組が反転する"
    print(f"  ✓ ヒステリシス {counts}")

    values = report.per_history_values
    a = values["ξ→δ→α"]["σx⊗I"]
    b = values["ξ→δ→β"]["σy⊗I"]
    c = values["ξ→ε→β"]["σy⊗I"]
    d = values["ξ→ε→α"]["σx⊗I"]
    assert np.allclose(a * b * c * d, -1.0), "ABCD = −1"
    assert np.allclose(values["ξ→γ"]["σz⊗I"], -values["ξ→γ"]["I⊗σz"]), "反相関"
    assert np.allclose(values["ξ"]["σx⊗σy"] * values["ξ"]["σy⊗σx"], -1.0)
    print("  ✓ 4つの因子の積 −1")


def test_run_peres_is_deterministic():
    """同じシードで同じレポート"""
    print("\n=== test_run_peres_is_deterministic ===")
    runner = _runner()
    cfg = ScenarioConfig("peres", 0.3, 11, 500)
    first = runner.render(runner.run_peres(cfg))
    second = runner.render(runner.run_peres(cfg))
    assert first == second, "出力はバイト単位で一致すべき"

    doc = json.loads(first)
    assert doc["product_value"] == -1 and doc["parameters"]["samples"] == 500
    assert "flags" not in doc["hysteresis"]

    full = runner.run_peres(cfg).to_dict(include_samples=True)
    assert len(full["hysteresis"]["flags"]) == 500
    assert len(full["histories"]["ξ"]["σz⊗σz"]["values"]) == 500
    print("  ✓ 決定性とサンプルごとの出力")


def test_run_remark_route_consistent():
    """Â の値は B→C と C→B で一致する"""
    print("\n=== test_run_remark_route_consistent ===")
    report = run_remark(ScenarioConfig("remark", 0.3, 3, SAMPLES))
    assert report.f_of_b_matches and report.g_of_c_matches
    assert report.stable_in == ("B", "C")
    assert report.partitions.i_blocks == ((0, 1), (2,))
    assert report.route_consistent
    values = report.per_history_values
    assert np.allclose(values["B→C"], values["C→B"])
    assert all(c.passed for c in report.checks) and len(report.checks) == 6
    assert abs(report.expectation - report.quantum) < 1e-9
    assert set(np.rint(report.per_history_values["B→C"])) <= {2.0, 3.0}
    print("  ✓ 経路によらない値とボルン則")


def test_run_born_peres_history():
    """ξ→δ→α での σx⊗I の期待値は 0"""
    print("\n=== test_run_born_peres_history ===")
    contexts, singlet = peres_contexts()
    history = [contexts["ξ"], contexts["δ"], contexts["α"]]
    cfg = ScenarioConfig("born", 0.3, 5, SAMPLES)
    report = run_born(cfg, singlet, history, PERES_OBSERVABLES["σx⊗I"])
    assert report.passed and report.residual < 1e-9
    assert abs(report.exact) < 1e-9, f"期待値は 0: {report.exact}"
    assert report.history == "ξ→δ→α"
    doc = report.to_dict()
    assert doc["passed"] and doc["ensemble"]["config"]["n_samples"] == SAMPLES

    try:
        run_born(cfg, singlet, history, PERES_OBSERVABLES["σz⊗I"])
    except NotStable:
        print("  ✓ ボルン則と NotStable")
        return
    raise AssertionError("NotStable が送出されるべき")


def test_run_partitions_and_tables():
    """最も細かい共通分割のレポートと表形式 (1始まりの添字)"""
    print("\n=== test_run_partitions_and_tables ===")
    contexts, _ = peres_contexts()
    report = run_partitions(contexts["α"], contexts["δ"])
    doc = report.to_dict()
    assert doc["i_blocks"] == [[0, 2], [1, 3]] and doc["m"] == 2
    assert doc["source"] == "α" and doc["target"] == "δ"

    runner = _runner()
    table = runner.render(report, "table")
    assert "{1,3} ↔ {1,3}" in table and "{2,4} ↔ {2,4}" in table

    remark = runner.run_remark(ScenarioConfig("remark", 0.3, 3, 500))
    table = runner.render(remark, "table")
    assert "{1,2} {3}" in table and "A = diag(2, 2, 3)" in table

    try:
        runner.render(object(), "table")
    except TypeError:
        print("  ✓ 分割と表形式")
        return
    raise AssertionError("TypeError が送出されるべき")


def test_remark_fixture():
    """Â は B と C の両方で安定"""
    print("\n=== test_remark_fixture ===")
    ctx_b, ctx_c = remark_contexts()
    assert ctx_b.label == "B" and ctx_c.label == "C"
    assert np.allclose(REMARK_A, np.diag([2, 2, 3]))
    print("  ✓ B と C")


def run_all_tests():
    """すべてのテストを実行"""
    print("=" * 70)
    print("テスト: シナリオ")
    print("=" * 70)

    tests = [
        ("コンテキストと一重項", test_peres_contexts_and_singlet),
        ("安定性の表", test_peres_stability_table),
        ("非文脈的な積", test_noncontextual_product_is_plus_one),
        ("Peres の矛盾", test_run_peres_contradiction),
        ("Peres の決定性", test_run_peres_is_deterministic),
        ("縮退オブザーバブル", test_run_remark_route_consistent),
        ("ボルン則", test_run_born_peres_history),
        ("分割と表形式", test_run_partitions_and_tables),
        ("B と C", test_remark_fixture),
    ]

    results = []
    for name, func in tests:
        try:
            func()
            results.append((name, True))
        except Exception as e:
            print(f"\n✗ {name} 失敗: {e}")
            results.append((name, False))

    print("\n" + "=" * 70)
    print("テスト結果サマリー")
    print("=" * 70)
    for name, result in results:
        status = "✓ PASS" if result else "✗ FAIL"
        print(f"{status}: {name}")

    passed = sum(1 for _, result in results if result)
    print(f"\n合計: {passed}/{len(results)} テスト成功")
    return passed == len(results)


if __name__ == "__main__":
    sys.exit(0 if run_all_tests() else 1)
