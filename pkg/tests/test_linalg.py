#!/usr/bin/env python3
"""
線形代数モジュールの単体テスト
"""
import sys
from pathlib import Path

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

# src ディレクトリをパスに追加
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from contextual_hidden_variables.error_handler import (  # noqa: E402
    NotHermitian,
    NotUnitary,
    UndefinedFunctionValue,
)
from contextual_hidden_variables.linalg import (  # noqa: E402
    Frame,
    apply_fn_spectral,
    canonical_phase,
    diagonal_in,
    group_eigenvalues,
    is_unitary,
    jacobi_eigh,
    random_hermitian,
    random_state,
    random_unitary,
    realify,
    spectral_value,
)
from contextual_hidden_variables.scenarios import (  # noqa: E402
    PERES_OBSERVABLES,
    REMARK_C,
)


def test_jacobi_diagonal():
    """対角行列の固有値分解"""
    print("\n=== test_jacobi_diagonal ===")
    frame, spectrum = jacobi_eigh(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(spectrum.eigenvalues, [1.0, 2.0, 3.0]), "固有値は昇順であるべき"
    expected = np.eye(3)[:, [1, 2, 0]]
    assert np.allclose(frame.matrix, expected), "固有ベクトルは標準基底の並べ替えであるべき"
    print("  ✓ 固有値と固有フレーム")


def test_jacobi_pauli_y():
    """σy の固有値分解 (複素の非対角要素)"""
    print("\n=== test_jacobi_pauli_y ===")
    sigma_y = np.array([[0, -1j], [1j, 0]])
    frame, spectrum = jacobi_eigh(sigma_y)
    assert np.allclose(spectrum.eigenvalues, [-1.0, 1.0]), "σy の固有値は ±1"
    assert np.allclose(spectrum.reconstruct(frame), sigma_y), "Σ o_k P_k が元の行列に一致すべき"
    for v in frame.vectors:
        k = int(np.argmax(np.abs(v)))
        assert abs(v[k].imag) < 1e-12 and v[k].real > 0, "位相は正規化されるべき"
    print("  ✓ σy の固有値 ±1 と再構成")


def test_jacobi_degenerate_blocks():
    """縮退した固有値のブロック化"""
    print("\n=== test_jacobi_degenerate_blocks ===")
    _, spectrum = jacobi_eigh(np.diag([2.0, 3.0, 2.0]))
    assert len(spectrum.blocks) == 2, "ブロックは2つであるべき"
    assert spectrum.blocks[0].eigenvalue == 2.0
    assert len(spectrum.blocks[0].indices) == 2
    assert spectrum.blocks[1].indices == (2,)
    print("  ✓ {2, 2} と {3} のブロック")


def test_jacobi_rejects_non_hermitian():
    """エルミートでない行列は NotHermitian"""
    print("\n=== test_jacobi_rejects_non_hermitian ===")
    try:
        jacobi_eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))
    except NotHermitian:
        print("  ✓ NotHermitian")
        return
    raise AssertionError("NotHermitian が送出されるべき")


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 6))
def test_jacobi_reconstructs_random_hermitian(seed, n):
    """ランダムなエルミート行列の再構成と固有値の一致"""
    rng = np.random.default_rng(seed)
    h, values = random_hermitian(n, rng)
    frame, spectrum = jacobi_eigh(h)
    assert is_unitary(frame.matrix), "固有フレームはユニタリであるべき"
    assert np.max(np.abs(spectrum.reconstruct(frame) - h)) < 1e-9, "再構成誤差が大きい"
    assert np.allclose(spectrum.eigenvalues, np.sort(values), atol=1e-9)


def test_group_eigenvalues_tolerance():
    """許容誤差内の固有値はまとめられる"""
    print("\n=== test_group_eigenvalues_tolerance ===")
    form = group_eigenvalues([1.0, 1.0 + 1e-12, 2.0])
    assert [b.indices for b in form.blocks] == [(0, 1), (2,)]
    form = group_eigenvalues([1.0, 1.0 + 1e-6, 2.0])
    assert len(form.blocks) == 3, "1e-6 の差は別の固有値"
    print("  ✓ グループ化の閾値")


def test_apply_fn_spectral():
    """表による関数 f(B̂) の適用"""
    print("\n=== test_apply_fn_spectral ===")
    b = np.diag([1.0, 2.0, 3.0])
    a = apply_fn_spectral(b, {1.0: 2.0, 2.0: 2.0, 3.0: 3.0})
    assert np.allclose(a, np.diag([2.0, 2.0, 3.0])), "f(B) = diag(2, 2, 3)"

    c = np.array([[1.5, -0.5, 0.0], [-0.5, 1.5, 0.0], [0.0, 0.0, 3.0]])
    g_of_c = apply_fn_spectral(c, {1.0: 2.0, 2.0: 2.0, 3.0: 3.0})
    assert np.allclose(g_of_c, a), "g(C) = f(B)"

    squared = apply_fn_spectral(c, lambda x: x * x)
    assert np.allclose(squared, c @ c), "呼び出し可能な関数も使える"

    try:
        spectral_value({1.0: 0.0}, 2.0)
    except UndefinedFunctionValue:
        print("  ✓ f(B), g(C), 関数の適用と UndefinedFunctionValue")
        return
    raise AssertionError("UndefinedFunctionValue が送出されるべき")


def test_realify_matches_complex_action():
    """realify(U) は (Re z, Im z) に U z と同じく作用する"""
    print("\n=== test_realify_matches_complex_action ===")
    rng = np.random.default_rng(3)
    u = random_unitary(3, rng)
    z = random_state(3, rng)
    lhs = realify(u) @ np.concatenate([z.real, z.imag])
    w = u @ z
    assert np.allclose(lhs, np.concatenate([w.real, w.imag]))
    print("  ✓ realify")


def test_jacobi_sigma_zz():
    """σz⊗σz の固有値は −1 と +1 で、それぞれ2次元のブロック"""
    print("\n=== test_jacobi_sigma_zz ===")
    zz = PERES_OBSERVABLES["σz⊗σz"]
    frame, spectrum = jacobi_eigh(zz)
    assert np.allclose(spectrum.eigenvalues, [-1.0, -1.0, 1.0, 1.0])
    assert np.allclose([b.eigenvalue for b in spectrum.blocks], [-1.0, 1.0])
    assert [len(b.indices) for b in spectrum.blocks] == [2, 2]
    for block in spectrum.blocks:
        for i in block.indices:
            v = frame.vector(i)
            assert np.allclose(zz @ v, block.eigenvalue * v), f"添字 {i} が固有ベクトルでない"
    print("  ✓ {−1, −1} と {+1, +1} のブロック")


def test_jacobi_remark_c_eigenvectors():
    """Ĉ の固有ベクトルは (e1+e2)/√2, (−e1+e2)/√2, e3 (位相を除く)"""
    print("\n=== test_jacobi_remark_c_eigenvectors ===")
    frame, spectrum = jacobi_eigh(REMARK_C)
    assert np.allclose(spectrum.eigenvalues, [1.0, 2.0, 3.0])
    s = 1.0 / np.sqrt(2.0)
    expected = [np.array([s, s, 0]), np.array([-s, s, 0]), np.array([0, 0, 1.0])]
    for i, e in enumerate(expected):
        v = frame.vector(i)
        assert abs(abs(np.vdot(e, v)) - 1.0) < 1e-12, f"添字 {i} の固有ベクトル"
        assert np.allclose(REMARK_C @ v, spectrum.eigenvalues[i] * v)
    print("  ✓ Ĉ の固有値 1, 2, 3 と固有ベクトル")


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 6))
def test_apply_fn_spectral_composition(seed, n):
    """(f∘g)(O) = f(g(O)) と恒等写像"""
    rng = np.random.default_rng(seed)
    h, _ = random_hermitian(n, rng, rng.uniform(-2.0, 2.0, size=n))

    def f(x):
        return 2.0 * x + 1.0

    def g(x):
        return x**3

    composed = apply_fn_spectral(h, lambda x: f(g(x)))
    nested = apply_fn_spectral(apply_fn_spectral(h, g), f)
    assert np.max(np.abs(composed - nested)) <= 1e-8, "合成が一致しない"
    assert np.max(np.abs(apply_fn_spectral(h, lambda x: x) - h)) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6))
def test_realify_is_multiplicative(seed, n):
    """realify(UV) = realify(U) realify(V) と det realify(U) = 1"""
    rng = np.random.default_rng(seed)
    u = random_unitary(n, rng)
    v = random_unitary(n, rng)
    assert np.max(np.abs(realify(u @ v) - realify(u) @ realify(v))) <= 1e-9
    assert abs(np.linalg.det(realify(u)) - 1.0) <= 1e-9


def test_realify_fixed_cases():
    """realify(I) = I と realify(iI) = [[0, −I], [I, 0]]"""
    print("\n=== test_realify_fixed_cases ===")
    assert np.array_equal(realify(np.eye(3)), np.eye(6))
    assert np.array_equal(realify(1j * np.eye(1)), [[0.0, -1.0], [1.0, 0.0]])
    eye, zero = np.eye(2), np.zeros((2, 2))
    quarter = np.block([[zero, -eye], [eye, zero]])
    assert np.array_equal(realify(1j * np.eye(2)), quarter), "i 倍は四分の一回転"
    print("  ✓ 恒等と i 倍")


def test_random_generators():
    """random_unitary と random_state"""
    print("\n=== test_random_generators ===")
    rng = np.random.default_rng(0)
    for n in (1, 2, 5, 8):
        assert is_unitary(random_unitary(n, rng)), f"n={n} でユニタリであるべき"
        assert abs(np.linalg.norm(random_state(n, rng)) - 1.0) < 1e-12
    a = random_unitary(4, np.random.default_rng(9))
    b = random_unitary(4, np.random.default_rng(9))
    assert np.array_equal(a, b), "同じシードで同じ行列"
    print("  ✓ ユニタリ性、正規化、決定性")


def test_frame_validation():
    """Frame は正規直交性を検証し、読み取り専用"""
    print("\n=== test_frame_validation ===")
    frame = Frame.standard(3)
    assert not frame.matrix.flags.writeable, "フレームは読み取り専用であるべき"
    assert np.allclose(frame.coefficients([0, 1j, 0]), [0, 1j, 0])
    assert np.allclose(diagonal_in(frame, [1, 2, 3]), np.diag([1, 2, 3]))
    try:
        Frame.from_vectors([[1, 0], [1, 1]])
    except NotUnitary:
        print("  ✓ 正規直交でないフレームは NotUnitary")
        return
    raise AssertionError("NotUnitary が送出されるべき")


def test_canonical_phase():
    """最大成分を正の実数にする位相"""
    print("\n=== test_canonical_phase ===")
    v = canonical_phase(np.array([0.1, -0.9j, 0.2]))
    assert abs(v[1] - 0.9) < 1e-12, "最大成分は正の実数"
    assert abs(np.linalg.norm(v) - np.linalg.norm([0.1, 0.9, 0.2])) < 1e-12
    print("  ✓ 位相の正規化")


def run_all_tests():
    """すべてのテストを実行"""
    tests = [
        test_jacobi_diagonal,
        test_jacobi_pauli_y,
        test_jacobi_degenerate_blocks,
        test_jacobi_rejects_non_hermitian,
        test_jacobi_reconstructs_random_hermitian,
        test_group_eigenvalues_tolerance,
        test_apply_fn_spectral,
        test_realify_matches_complex_action,
        test_jacobi_sigma_zz,
        test_jacobi_remark_c_eigenvectors,
        test_apply_fn_spectral_composition,
        test_realify_is_multiplicative,
        test_realify_fixed_cases,
        test_random_generators,
        test_frame_validation,
        test_canonical_phase,
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
