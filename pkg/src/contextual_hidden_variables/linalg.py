"""
線形代数モジュール
小さな次元 (2 ≤ n ≤ 16) 向けの密な複素線形代数:
エルミート行列の固有値分解、スペクトル関数の適用、ユニタリ行列の実数化
"""

from dataclasses import dataclass
from typing import Callable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .error_handler import (
    DimensionMismatch,
    NoConvergence,
    NotHermitian,
    NotUnitary,
    UndefinedFunctionValue,
)

HERMITIAN_TOL = 1e-9
UNITARY_TOL = 1e-9
DEFAULT_GROUP_TOL = 1e-8
OFFDIAG_REL_TOL = 1e-12
MAX_SWEEPS = 100
PHASE_TIE_TOL = 1e-9

# 関数は固有値→値の表、または実数を受け取る呼び出し可能オブジェクト
SpectralFunction = Union[Mapping[float, float], Callable[[float], float]]


def as_cvector(v: Sequence[complex], n: Optional[int] = None) -> np.ndarray:
    """複素ベクトル (n,) に変換"""
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1:
        raise DimensionMismatch(
            f"vector must be one-dimensional, got shape {arr.shape}"
        )
    if n is not None and arr.shape[0] != n:
        raise DimensionMismatch(f"vector has dimension {arr.shape[0]}, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise DimensionMismatch("vector has non-finite entries")
    return arr


def as_cmatrix(m: Sequence[Sequence[complex]], n: Optional[int] = None) -> np.ndarray:
    """正方複素行列 (n, n) に変換"""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"matrix must be square, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise DimensionMismatch(f"matrix has dimension {arr.shape[0]}, expected {n}")
    return arr


def max_norm(m: np.ndarray) -> float:
    """最大値ノルム ‖M‖_max"""
    return float(np.max(np.abs(m))) if m.size else 0.0


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    """‖M − M†‖_max ≤ tol か判定"""
    m = as_cmatrix(m)
    return max_norm(m - m.conj().T) <= tol


def is_unitary(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    """‖M†M − I‖_max ≤ tol か判定"""
    m = as_cmatrix(m)
    return max_norm(m.conj().T @ m - np.eye(m.shape[0])) <= tol


def require_hermitian(m: np.ndarray) -> np.ndarray:
    """エルミートでなければ NotHermitian を送出"""
    m = as_cmatrix(m)
    residual = max_norm(m - m.conj().T)
    if residual > HERMITIAN_TOL:
        raise NotHermitian(f"‖M − M†‖_max = {residual:.3e} exceeds {HERMITIAN_TOL:g}")
    return m


def canonical_phase(v: np.ndarray) -> np.ndarray:
    """
    最大絶対値の成分が正の実数になるよう位相を回転

    絶対値が最大値から PHASE_TIE_TOL 以内の成分が複数ある場合は最初の添字を使う。
    """
    v = np.asarray(v, dtype=np.complex128)
    mags = np.abs(v)
    peak = mags.max()
    if peak == 0.0:
        return v.copy()
    k = int(np.flatnonzero(mags >= peak - PHASE_TIE_TOL)[0])
    return v * (np.conj(v[k]) / mags[k])


@dataclass(frozen=True, eq=False)
class Frame:
    """
    正規直交フレーム (CONS)

    matrix の列がフレームのベクトル |α_i⟩。構築後は読み取り専用。
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = as_cmatrix(self.matrix).copy()
        if m.shape[0] < 1:
            raise DimensionMismatch("frame must contain at least one vector")
        gram = m.conj().T @ m
        residual = max_norm(gram - np.eye(m.shape[0]))
        if residual > UNITARY_TOL:
            raise NotUnitary(
                f"frame vectors are not orthonormal (residual {residual:.3e})"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence[complex]]) -> "Frame":
        """ベクトルのリストからフレームを作成"""
        cols = [as_cvector(v) for v in vectors]
        if not cols:
            raise DimensionMismatch("frame must contain at least one vector")
        n = cols[0].shape[0]
        if len(cols) != n or any(c.shape[0] != n for c in cols):
            raise DimensionMismatch(
                f"frame needs exactly n vectors of dimension n, got {len(cols)}"
            )
        return cls(np.column_stack(cols))

    @classmethod
    def standard(cls, n: int) -> "Frame":
        """標準基底"""
        return cls(np.eye(n, dtype=np.complex128))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def vectors(self) -> List[np.ndarray]:
        return [self.matrix[:, i] for i in range(self.n)]

    def vector(self, i: int) -> np.ndarray:
        return self.matrix[:, i]

    def coefficients(self, v: np.ndarray) -> np.ndarray:
        """展開係数 ⟨α_i|v⟩"""
        return self.matrix.conj().T @ as_cvector(v, self.n)

    def projector(self, indices: Sequence[int]) -> np.ndarray:
        """射影演算子 Σ_{i∈indices} |α_i⟩⟨α_i|"""
        cols = self.matrix[:, list(indices)]
        return cols @ cols.conj().T

    def matrix_elements(self, op: np.ndarray) -> np.ndarray:
        """行列要素 ⟨α_i|O|α_j⟩"""
        op = as_cmatrix(op, self.n)
        return self.matrix.conj().T @ op @ self.matrix


@dataclass(frozen=True)
class SpectralBlock:
    """固有値と、それに対応するフレーム添字の集合"""

    eigenvalue: float
    indices: Tuple[int, ...]


@dataclass(frozen=True)
class SpectralForm:
    """固有値ブロックのリスト (固有値の昇順)"""

    blocks: Tuple[SpectralBlock, ...]

    def __post_init__(self):
        values = [b.eigenvalue for b in self.blocks]
        if any(a >= b for a, b in zip(values, values[1:])):
            raise ValueError("固有値はブロック間で狭義単調増加である必要があります")
        all_indices = sorted(i for b in self.blocks for i in b.indices)
        if all_indices != list(range(len(all_indices))):
            raise ValueError("ブロックの添字は {0..n-1} の分割である必要があります")

    @property
    def n(self) -> int:
        return sum(len(b.indices) for b in self.blocks)

    @property
    def eigenvalues(self) -> np.ndarray:
        """添字ごとの固有値 (長さ n)"""
        out = np.empty(self.n, dtype=np.float64)
        for block in self.blocks:
            out[list(block.indices)] = block.eigenvalue
        return out

    def block_of(self, index: int) -> SpectralBlock:
        for block in self.blocks:
            if index in block.indices:
                return block
        raise IndexError(f"index {index} is not in the spectral form")

    def projectors(self, frame: Frame) -> List[np.ndarray]:
        return [frame.projector(b.indices) for b in self.blocks]

    def reconstruct(self, frame: Frame) -> np.ndarray:
        """Σ o_k P_k を再構成"""
        return frame.matrix @ np.diag(self.eigenvalues) @ frame.matrix.conj().T


def group_eigenvalues(
    eigenvalues: Sequence[float], group_tol: float = DEFAULT_GROUP_TOL
) -> SpectralForm:
    """昇順の固有値を |λ_i − λ_j| ≤ group_tol·(1+max|λ|) でブロックにまとめる"""
    values = np.asarray(eigenvalues, dtype=np.float64)
    if values.size == 0:
        return SpectralForm(())
    threshold = group_tol * (1.0 + float(np.max(np.abs(values))))

    groups: List[List[int]] = [[0]]
    for i in range(1, values.size):
        if values[i] - values[groups[-1][0]] <= threshold:
            groups[-1].append(i)
        else:
            groups.append([i])

    blocks = tuple(
        SpectralBlock(float(np.mean(values[g])), tuple(g)) for g in groups
    )
    return SpectralForm(blocks)


def _offdiag_max(h: np.ndarray) -> float:
    return max_norm(h - np.diag(np.diag(h)))


def jacobi_eigh(
    h: np.ndarray, group_tol: float = DEFAULT_GROUP_TOL
) -> Tuple[Frame, SpectralForm]:
    """
    巡回複素ヤコビ法によるエルミート行列の固有値分解

    掃引順序は上三角の行優先 (p < q)。各回転は b = H[p,q] の位相を
    D = diag(1, e^{-iφ}) で除いてから実回転 θ = ½·atan2(2|b|, a − d) を適用する。

    Args:
        h: エルミート行列
        group_tol: 固有値をブロックにまとめる相対許容誤差

    Returns:
        Tuple[Frame, SpectralForm]: 固有フレーム (固有値昇順、位相正規化済み) とブロック

    Raises:
        NotHermitian: エルミート判定に失敗
        NoConvergence: MAX_SWEEPS 回の掃引で収束しない
    """
    h = require_hermitian(h)
    n = h.shape[0]
    work = 0.5 * (h + h.conj().T)
    v = np.eye(n, dtype=np.complex128)

    scale = float(np.linalg.norm(work))
    stop = OFFDIAG_REL_TOL * scale

    sweeps = 0
    while _offdiag_max(work) > stop:
        if sweeps >= MAX_SWEEPS:
            raise NoConvergence(
                f"Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps "
                f"(off-diagonal {_offdiag_max(work):.3e})"
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = work[p, q]
                mag = abs(b)
                if mag <= stop:
                    continue
                a = work[p, p].real
                d = work[q, q].real
                phase = np.exp(-1j * np.angle(b))
                theta = 0.5 * np.arctan2(2.0 * mag, a - d)
                c, s = np.cos(theta), np.sin(theta)
                w = np.array([[c, -s], [s * phase, c * phase]], dtype=np.complex128)

                idx = [p, q]
                work[:, idx] = work[:, idx] @ w
                work[idx, :] = w.conj().T @ work[idx, :]
                v[:, idx] = v[:, idx] @ w
                work[p, q] = work[q, p] = 0.0
        sweeps += 1

    eigenvalues = np.real(np.diag(work))
    order = np.argsort(eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    v = v[:, order]
    for i in range(n):
        v[:, i] = canonical_phase(v[:, i])

    return Frame(v), group_eigenvalues(eigenvalues, group_tol)


def spectral_value(f: SpectralFunction, value: float) -> float:
    """
    固有値 value における f の値

    表の場合はキーを許容誤差 DEFAULT_GROUP_TOL·(1+|value|) で照合する。
    """
    if callable(f):
        return float(f(value))

    tol = DEFAULT_GROUP_TOL * (1.0 + abs(value))
    for key, result in f.items():
        if abs(float(key) - value) <= tol:
            return float(result)
    raise UndefinedFunctionValue(
        f"function table has no entry for eigenvalue {value!r}"
    )


def apply_fn_spectral(
    o: np.ndarray, f: SpectralFunction, group_tol: float = DEFAULT_GROUP_TOL
) -> np.ndarray:
    """
    スペクトル分解による関数の適用 f(O) = Σ f(o_k) P_k

    Raises:
        NotHermitian: O がエルミートではない
        UndefinedFunctionValue: 表に固有値のエントリがない
    """
    frame, spectrum = jacobi_eigh(o, group_tol)
    values = np.empty(frame.n, dtype=np.float64)
    for block in spectrum.blocks:
        values[list(block.indices)] = spectral_value(f, block.eigenvalue)
    result = frame.matrix @ np.diag(values) @ frame.matrix.conj().T
    return 0.5 * (result + result.conj().T)


def realify(u: np.ndarray) -> np.ndarray:
    """
    複素行列の実数化 [[Re U, −Im U], [Im U, Re U]]

    座標 (x, y) = (Re z, Im z) に対して U z と同じ作用をする 2n×2n 実行列。
    """
    u = as_cmatrix(u)
    return np.block([[u.real, -u.imag], [u.imag, u.real]])


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """複素ガウス行列の QR 分解 (R の対角の位相を補正) による一様ランダムユニタリ"""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    """ランダムな単位ベクトル"""
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z / np.linalg.norm(z)


def random_hermitian(
    n: int,
    rng: np.random.Generator,
    eigenvalues: Optional[Sequence[float]] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    ランダムなエルミート行列

    Returns:
        Tuple[np.ndarray, np.ndarray]: (行列, 使用した固有値)
    """
    if eigenvalues is None:
        eigenvalues = rng.normal(size=n)
    values = np.asarray(eigenvalues, dtype=np.float64)
    u = random_unitary(n, rng)
    h = u @ np.diag(values) @ u.conj().T
    return 0.5 * (h + h.conj().T), values


def diagonal_in(frame: Frame, values: Sequence[float]) -> np.ndarray:
    """フレームで対角な観測量 Σ values[i] |α_i⟩⟨α_i|"""
    vals = np.asarray(values, dtype=np.float64)
    if vals.shape != (frame.n,):
        raise DimensionMismatch(f"need {frame.n} values, got {vals.shape}")
    m = frame.matrix @ np.diag(vals) @ frame.matrix.conj().T
    return 0.5 * (m + m.conj().T)
