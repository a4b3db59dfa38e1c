#!/usr/bin/env python3
"""
コンテキストモジュールの単体テスト
同値性、安定性、最も細かい共通分割、変更ユニタリ、履歴の簡約
"""
import json
import sys
from pathlib import Path

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

# src ディレクトリをパスに追加
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from contextual_hidden_variables.context import (  # noqa: E402
    Context,
    History,
    change_between_equivalent,
    change_unitary,
    context_change,
    context_from_document,
    context_to_document,
    contexts_equivalent,
    finest_partitions,
    frame_from_document,
    frame_to_document,
    invariance_check,
    is_stable,
    reduce_history,
    s_permutation,
    shared_projectors,
    stable_spectrum,
)
from contextual_hidden_variables.error_handler import (  # noqa: E402
    DimensionMismatch,
    EquivalentContexts,
    InvalidDocument,
    NotStable,
)
from contextual_hidden_variables.linalg import (  # noqa: E402
    Frame,
    diagonal_in,
    is_unitary,
    random_hermitian,
    random_unitary,
)
from contextual_hidden_variables.scenarios import (  # noqa: E402
    PERES_OBSERVABLES,
    REMARK_A,
    REMARK_B,
    REMARK_C,
    peres_contexts,
    remark_contexts,
)
from contextual_hidden_variables.suites import (  # noqa: E402
    brute_force_partitions,
    random_neighbor,
)


def test_context_id_ignores_order_and_phase():
    """識別子は並び順と位相に依存しない"""
    print("\n=== test_context_id_ignores_order_and_phase ===")
    a = Context(Frame.standard(3))
    permuted = np.eye(3, dtype=np.complex128)[:, [2, 0, 1]] * np.exp(1j * 0.7)
    b = Context(Frame(permuted))
    assert a.id == b.id, "同値なフレームは同じ識別子を持つべき"

    witness = contexts_equivalent(a, b)
    assert witness is not None, "同値性の証拠が得られるべき"
    assert witness.permutation == (2, 0, 1)
    assert all(abs(p - 0.7) < 1e-9 for p in witness.phases)

    _, ctx_c = remark_contexts()
    assert contexts_equivalent(a, ctx_c) is None, "B と C は同値ではない"
    assert a.id != ctx_c.id
    print("  ✓ 識別子と同値性の証拠")


def test_contexts_equivalent_dimension_mismatch():
    """次元の異なるフレームは DimensionMismatch"""
    print("\n=== test_contexts_equivalent_dimension_mismatch ===")
    try:
        contexts_equivalent(Frame.standard(2), Frame.standard(3))
    except DimensionMismatch:
        print("  ✓ DimensionMismatch")
        return
    raise AssertionError("DimensionMismatch が送出されるべき")


def test_stability_and_spectrum():
    """安定性の判定と添字ごとの固有値ブロック"""
    print("\n=== test_stability_and_spectrum ===")
    ctx_b, ctx_c = remark_contexts()
    assert is_stable(REMARK_A, ctx_b) and is_stable(REMARK_A, ctx_c), "Â は B と C で安定"
    assert is_stable(REMARK_B, ctx_b) and not is_stable(REMARK_B, ctx_c)
    assert is_stable(REMARK_C, ctx_c) and not is_stable(REMARK_C, ctx_b)

    spectrum = stable_spectrum(REMARK_C, ctx_c)
    assert np.allclose([b.eigenvalue for b in spectrum.blocks], [1.0, 2.0, 3.0])
    assert [b.indices for b in spectrum.blocks] == [(0,), (1,), (2,)]

    spectrum = stable_spectrum(REMARK_A, ctx_c)
    assert [b.indices for b in spectrum.blocks] == [(0, 1), (2,)]

    try:
        stable_spectrum(REMARK_B, ctx_c)
    except NotStable:
        print("  ✓ 安定性と固有値ブロック")
        return
    raise AssertionError("NotStable が送出されるべき")


def test_finest_partitions_fixtures():
    """既知のフレーム対の最も細かい共通分割"""
    print("\n=== test_finest_partitions_fixtures ===")
    ctx_b, ctx_c = remark_contexts()
    parts = finest_partitions(ctx_b, ctx_c)
    assert parts.i_blocks == ((0, 1), (2,)), f"予期しない I: {parts.i_blocks}"
    assert parts.j_blocks == ((0, 1), (2,)), f"予期しない J: {parts.j_blocks}"
    print("  ✓ B/C: {0,1} {2}")

    contexts, _ = peres_contexts()
    parts = finest_partitions(contexts["α"], contexts["δ"])
    assert parts.i_blocks == ((0, 2), (1, 3))
    assert parts.j_blocks == ((0, 2), (1, 3))
    print("  ✓ α/δ: {0,2} {1,3}")

    parts = finest_partitions(contexts["α"], contexts["γ"])
    assert parts.m == 1 and parts.i_blocks == ((0, 1, 2, 3),)
    print("  ✓ α/γ: 1ブロック")

    parts = finest_partitions(contexts["ξ"], contexts["γ"])
    assert parts.i_blocks == ((0, 1), (2, 3))
    projectors = shared_projectors(contexts["ξ"], contexts["γ"])
    assert np.allclose(sum(projectors), np.eye(4)), "共通射影の和は恒等"
    print("  ✓ ξ/γ: {0,1} {2,3}")

    try:
        finest_partitions(ctx_b, Context(Frame.standard(3)))
    except EquivalentContexts:
        print("  ✓ 同値なコンテキストは EquivalentContexts")
        return
    raise AssertionError("EquivalentContexts が送出されるべき")


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 5))
def test_finest_partitions_match_brute_force(seed, n):
    """2部グラフによる分割は全探索の結果と一致する"""
    rng = np.random.default_rng(seed)
    base = Context(Frame.standard(n))
    neighbor = random_neighbor(base, rng)
    fast = finest_partitions(base, neighbor)
    slow = brute_force_partitions(base.frame, neighbor.frame)
    assert fast.i_blocks == slow.i_blocks
    assert fast.j_blocks == slow.j_blocks


def test_change_unitary_maps_frames():
    """U_{α→β} は |α_i⟩ を |β_{q(i)}⟩ に写す"""
    print("\n=== test_change_unitary_maps_frames ===")
    ctx_b, ctx_c = remark_contexts()
    ch = change_unitary(ctx_b, ctx_c)
    assert ch.q == (0, 1, 2), f"ブロック内で順序を保つべき: {ch.q}"
    assert is_unitary(ch.unitary)
    for i in range(3):
        image = ch.unitary @ ctx_b.frame.vector(i)
        assert np.allclose(image, ctx_c.frame.vector(ch.q[i]))
    assert ch.label == "B→C"
    assert invariance_check(REMARK_A, ch), "Â は U_{B→C} で不変"
    assert not invariance_check(REMARK_B, ch), "B̂ は不変ではない"
    print("  ✓ 変更ユニタリと不変性")


def test_change_between_equivalent():
    """同値な代表フレーム間の変更は証拠の置換を使う"""
    print("\n=== test_change_between_equivalent ===")
    a = Context(Frame.standard(3), "a")
    b = Context(Frame(np.eye(3, dtype=np.complex128)[:, [1, 2, 0]] * 1j), "b")
    ch = change_between_equivalent(a, b)
    for i in range(3):
        assert np.allclose(ch.unitary @ a.frame.vector(i), b.frame.vector(ch.q[i]))
    assert context_change(a, b).q == ch.q, "context_change は同値な場合に委譲する"
    try:
        change_between_equivalent(a, remark_contexts()[1])
    except ValueError:
        print("  ✓ 同値な代表間の変更")
        return
    raise AssertionError("ValueError が送出されるべき")


def test_s_permutation_is_bijection():
    """S = U†_{α→γ} U_{β→γ} U_{α→β} は α フレームの置換"""
    print("\n=== test_s_permutation_is_bijection ===")
    contexts, _ = peres_contexts()
    p = s_permutation(contexts["α"], contexts["δ"], contexts["γ"])
    assert sorted(p) == [0, 1, 2, 3], f"置換であるべき: {p}"
    p = s_permutation(contexts["ξ"], contexts["δ"], contexts["α"])
    assert sorted(p) == [0, 1, 2, 3], f"置換であるべき: {p}"
    print(f"  ✓ 置換 {p}")


def test_history_validation():
    """履歴は隣り合う同値なコンテキストと次元の混在を拒否する"""
    print("\n=== test_history_validation ===")
    contexts, _ = peres_contexts()
    h = History.of(contexts["ξ"], contexts["δ"], contexts["α"])
    assert h.label == "ξ→δ→α"
    assert len(h.truncate()) == 2 and h.truncate().last is contexts["δ"]
    assert h.extend(contexts["γ"]).last is contexts["γ"]

    try:
        History.of(contexts["α"], Context(contexts["α"].frame))
        raise AssertionError("EquivalentContexts が送出されるべき")
    except EquivalentContexts:
        pass
    try:
        History.of(contexts["α"], remark_contexts()[0])
        raise AssertionError("DimensionMismatch が送出されるべき")
    except DimensionMismatch:
        pass
    print("  ✓ 履歴の検証")


def test_reduce_history_round_trip():
    """ξ→γ→ξ の合成は恒等で、置換は自明"""
    print("\n=== test_reduce_history_round_trip ===")
    contexts, _ = peres_contexts()
    reduction = reduce_history(History.of(contexts["ξ"], contexts["γ"], contexts["ξ"]))
    assert np.allclose(reduction.composed, np.eye(4)), "往復の合成は恒等であるべき"
    assert reduction.permutation == (0, 1, 2, 3)
    assert reduction.pullback_permutation == (0, 1, 2, 3)
    print("  ✓ 往復の簡約")


def test_reduce_history_permutation_identity():
    """合成は α フレーム上で U_{α→β}∘p に等しい"""
    print("\n=== test_reduce_history_permutation_identity ===")
    contexts, _ = peres_contexts()
    h = History.of(contexts["ξ"], contexts["δ"], contexts["α"], contexts["γ"])
    reduction = reduce_history(h)
    base, last = h.base.frame, h.last.frame
    for i in range(4):
        lhs = reduction.composed @ base.vector(i)
        rhs = reduction.change.unitary @ base.vector(reduction.permutation[i])
        assert np.allclose(lhs, rhs), f"添字 {i} で一致しない"
        pulled = reduction.composed @ base.vector(reduction.pullback_permutation[i])
        assert np.allclose(pulled, last.vector(i)), f"引き戻しが添字 {i} で一致しない"

    try:
        reduce_history(History.of(contexts["ξ"]))
    except ValueError:
        print(f"  ✓ 置換 {reduction.permutation}")
        return
    raise AssertionError("1つのコンテキストの簡約は ValueError")


def test_context_document_round_trip():
    """ドキュメントへの変換と復元"""
    print("\n=== test_context_document_round_trip ===")
    contexts, _ = peres_contexts()
    doc = context_to_document(contexts["ξ"])
    assert doc["name"] == "ξ" and doc["id"] == contexts["ξ"].id
    restored = context_from_document(doc)
    assert restored.id == contexts["ξ"].id and restored.name == "ξ"

    frame = frame_from_document({"vectors": [[1, 0], [0, [0.0, 1.0]]]})
    assert np.allclose(frame.matrix, np.diag([1, 1j]))

    for bad in ({}, {"vectors": []}, {"vectors": [["x", 0], [0, 1]]}):
        try:
            frame_from_document(bad)
            raise AssertionError(f"InvalidDocument が送出されるべき: {bad}")
        except InvalidDocument:
            pass
    print("  ✓ ドキュメント変換")


def _perturbed(frame, rng):
    """並べ替えと位相の違いだけを持つフレーム"""
    n = frame.n
    phases = np.exp(1j * rng.uniform(-np.pi, np.pi, size=n))
    return Frame((frame.matrix * phases)[:, rng.permutation(n)])


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6))
def test_equivalence_is_an_equivalence_relation(seed, n):
    """同値性は反射的、対称的、推移的"""
    rng = np.random.default_rng(seed)
    a = Frame(random_unitary(n, rng))
    b = _perturbed(a, rng)
    c = _perturbed(b, rng)

    same = contexts_equivalent(a, a)
    assert same is not None and same.permutation == tuple(range(n))
    assert all(abs(t) < 1e-9 for t in same.phases)

    ab = contexts_equivalent(a, b)
    assert ab is not None and contexts_equivalent(b, a) is not None
    for j, i in enumerate(ab.permutation):
        expected = np.exp(1j * ab.phases[i]) * a.vector(i)
        assert np.allclose(b.vector(j), expected, atol=1e-8), "証拠が一致しない"
    assert contexts_equivalent(b, c) is not None
    assert contexts_equivalent(a, c) is not None, "推移性"
    assert Context(a).id == Context(c).id

    if n > 1:
        other = Frame(random_unitary(n, rng))
        assert contexts_equivalent(a, other) is None
        assert contexts_equivalent(other, a) is None


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 5))
def test_stability_is_commuting_with_frame_projectors(seed, n):
    """is_stable(O, c) は O が全ての |α_i⟩⟨α_i| と可換であることと同値"""
    rng = np.random.default_rng(seed)
    ctx = Context(Frame(random_unitary(n, rng)))
    projectors = [ctx.frame.projector([i]) for i in range(n)]

    def commutes(o):
        tol = 1e-8 * (1.0 + np.max(np.abs(o)))
        return all(np.max(np.abs(o @ p - p @ o)) <= tol for p in projectors)

    diagonal = diagonal_in(ctx.frame, rng.integers(-2, 3, size=n))
    generic, _ = random_hermitian(n, rng)
    for o in (diagonal, generic, np.eye(n)):
        assert is_stable(o, ctx) == commutes(o)
    assert is_stable(diagonal, ctx) and not is_stable(generic, ctx)


def test_invariance_under_alpha_to_delta():
    """U_{α→δ} は σx⊗I を保ち、σy⊗I は保たない"""
    print("\n=== test_invariance_under_alpha_to_delta ===")
    contexts, _ = peres_contexts()
    ch = change_unitary(contexts["α"], contexts["δ"])
    assert invariance_check(PERES_OBSERVABLES["σx⊗I"], ch), "σx⊗I は両方で安定"
    assert not invariance_check(PERES_OBSERVABLES["σy⊗I"], ch)
    assert not is_stable(PERES_OBSERVABLES["σy⊗I"], contexts["δ"])
    assert is_stable(np.eye(4), contexts["δ"]), "恒等演算子はどこでも安定"
    print("  ✓ σx⊗I は不変、σy⊗I は不変でない")


def test_shared_projectors_peres():
    """α/δ は (I ± σx⊗I)/2、α/γ は恒等のみ"""
    print("\n=== test_shared_projectors_peres ===")
    contexts, _ = peres_contexts()
    x = PERES_OBSERVABLES["σx⊗I"]
    expected = [(np.eye(4) + x) / 2, (np.eye(4) - x) / 2]
    projectors = shared_projectors(contexts["α"], contexts["δ"])
    assert len(projectors) == 2
    for target in expected:
        matches = [np.allclose(p, target) for p in projectors]
        assert sum(matches) == 1, "(I ± σx⊗I)/2 がちょうど1回現れるべき"

    projectors = shared_projectors(contexts["α"], contexts["γ"])
    assert len(projectors) == 1 and np.allclose(projectors[0], np.eye(4))

    ctx_b, ctx_c = remark_contexts()
    projectors = shared_projectors(ctx_b, ctx_c)
    assert np.allclose(projectors[0], np.diag([1, 1, 0]))
    assert np.allclose(projectors[1], np.diag([0, 0, 1]))
    print("  ✓ 共通射影")


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 5))
def test_documents_round_trip_bit_exact(seed, n):
    """JSON を経由したフレームとコンテキストの復元はビット単位で一致する"""
    rng = np.random.default_rng(seed)
    frame = Frame(random_unitary(n, rng))
    text = json.dumps(frame_to_document(frame))
    restored = frame_from_document(json.loads(text))
    assert np.array_equal(restored.matrix, frame.matrix)

    ctx = Context(frame, "c")
    doc = json.loads(json.dumps(context_to_document(ctx)))
    back = context_from_document(doc)
    assert np.array_equal(back.frame.matrix, frame.matrix)
    assert back.id == ctx.id and back.name == "c"


def test_peres_observable_stability():
    """Peres の観測量は対応するコンテキストでのみ安定"""
    print("\n=== test_peres_observable_stability ===")
    contexts, _ = peres_contexts()
    assert is_stable(PERES_OBSERVABLES["σx⊗σy"], contexts["ξ"])
    assert is_stable(PERES_OBSERVABLES["σx⊗I"], contexts["δ"])
    assert not is_stable(PERES_OBSERVABLES["σx⊗I"], contexts["ε"])
    print("  ✓ 安定性")


def run_all_tests():
    """すべてのテストを実行"""
    tests = [
        test_context_id_ignores_order_and_phase,
        test_contexts_equivalent_dimension_mismatch,
        test_stability_and_spectrum,
        test_finest_partitions_fixtures,
        test_finest_partitions_match_brute_force,
        test_change_unitary_maps_frames,
        test_change_between_equivalent,
        test_s_permutation_is_bijection,
        test_history_validation,
        test_reduce_history_round_trip,
        test_reduce_history_permutation_identity,
        test_context_document_round_trip,
        test_equivalence_is_an_equivalence_relation,
        test_stability_is_commuting_with_frame_projectors,
        test_invariance_under_alpha_to_delta,
        test_shared_projectors_peres,
        test_documents_round_trip_bit_exact,
        test_peres_observable_stability,
    ]

    passed = 0
    for test in tests:
        try:
            test()
            passed += 1
        except Exception as e:
            print(f"\n✗ {test.__name__} 失敗: {e}")

    print(f"\n合計: {passed}/{len(tests)} テスト成功")
    return passed == len(tests)


if __name__ == "__main__":
    sys.exit(0 if run_all_tests() else 1)
