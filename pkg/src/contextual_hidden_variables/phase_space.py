"""
位相空間モジュール
隠れた変数の空間 Ω = R^{2n}: 座標チャート、シンプレクティック性と体積の検証、
球の幾何、チューブによる値の割り当て、Ω 上のコンテキスト変更写像
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional, Union

import numpy as np

from .context import Context, ContextChange, Frame, stable_spectrum
from .error_handler import AmbiguousTube, DimensionMismatch, InvalidConfig, NotUnitary
from .linalg import as_cmatrix, as_cvector, is_unitary, max_norm, realify

MAX_EPSILON = float(np.sqrt(2.0) / 2.0)
SYMPLECTIC_TOL = 1e-9
BALL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Chart:
    """
    基底コンテキスト α の座標チャート ι_α

    |φ⟩ の座標は (x, y) = (Re ⟨α_i|φ⟩, Im ⟨α_i|φ⟩)。
    """

    base: Context

    @classmethod
    def standard(cls, n: int) -> "Chart":
        return cls(Context(Frame.standard(n), "standard"))

    @property
    def n(self) -> int:
        return self.base.n

    def to_coords(self, z: np.ndarray) -> np.ndarray:
        """ベクトル (..., n) → 座標 (..., 2n)"""
        z = np.asarray(z, dtype=np.complex128)
        if z.shape[-1] != self.n:
            raise DimensionMismatch(
                f"vector has dimension {z.shape[-1]}, chart {self.n}"
            )
        w = z @ self.base.representative.matrix.conj()
        return np.concatenate([w.real, w.imag], axis=-1)

    def from_coords(self, p: np.ndarray) -> np.ndarray:
        """座標 (..., 2n) → ベクトル (..., n)"""
        p = np.asarray(p, dtype=np.float64)
        if p.shape[-1] != 2 * self.n:
            raise DimensionMismatch(
                f"point has {p.shape[-1]} coordinates, chart needs {2 * self.n}"
            )
        w = p[..., : self.n] + 1j * p[..., self.n :]
        return w @ self.base.representative.matrix.T


def iota(chart: Chart, v: np.ndarray) -> np.ndarray:
    """ι_α: |φ⟩ ↦ (x¹, …, xⁿ, y¹, …, yⁿ)"""
    return chart.to_coords(as_cvector(v, chart.n))


def iota_inv(chart: Chart, p: np.ndarray) -> np.ndarray:
    """ι_α の逆写像"""
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (2 * chart.n,):
        raise DimensionMismatch(
            f"point must have shape ({2 * chart.n},), got {p.shape}"
        )
    return chart.from_coords(p)


def symplectic_form(n: int) -> np.ndarray:
    """標準シンプレクティック行列 J = [[0, I], [−I, 0]]"""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


@dataclass(frozen=True)
class SymplecticReport:
    """シンプレクティック性と体積保存の検証結果"""

    symplectic_residual: float
    det: float
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "symplectic_residual": self.symplectic_residual,
            "det": self.det,
            "passed": self.passed,
        }


def symplectic_volume_check(u: np.ndarray, strict: bool = True) -> SymplecticReport:
    """
    M = realify(U) について ‖MᵀJM − J‖_max と det M を検証

    Args:
        u: 検証する行列
        strict: True ならユニタリでない行列で NotUnitary を送出、
                False なら不合格のレポートを返す

    Raises:
        NotUnitary: strict かつ U がユニタリではない
    """
    u = as_cmatrix(u)
    if strict and not is_unitary(u):
        raise NotUnitary("symplectic check needs a unitary matrix")
    n = u.shape[0]
    m = realify(u)
    j = symplectic_form(n)
    residual = max_norm(m.T @ j @ m - j)
    det = float(np.linalg.det(m))
    passed = residual <= SYMPLECTIC_TOL and abs(det - 1.0) <= SYMPLECTIC_TOL
    return SymplecticReport(residual, det, passed)


@dataclass(frozen=True, eq=False)
class Ball:
    """中心 |φ⟩、半径 r の 2n 次元球"""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"半径は正である必要があります: {self.radius}")
        object.__setattr__(self, "center", as_cvector(self.center))

    @property
    def n(self) -> int:
        return self.center.shape[0]


def unit_ball_offsets(
    rng: np.random.Generator, dimension: int, size: int
) -> np.ndarray:
    """
    単位球内の一様サンプル (size, dimension)

    正規分布の方向を正規化し、半径 u^{1/dimension} を掛ける。
    """
    directions = rng.standard_normal((size, dimension))
    norms = np.linalg.norm(directions, axis=1, keepdims=True)
    # 長さ 0 の方向は確率 0
    norms[norms == 0.0] = 1.0
    radii = rng.random(size) ** (1.0 / dimension)
    return directions / norms * radii[:, None]


def sample_ball(
    ball: Ball,
    rng: np.random.Generator,
    chart: Optional[Chart] = None,
    size: Optional[int] = None,
) -> np.ndarray:
    """
    球 B^{2n}(|φ⟩; r) 内の一様サンプル

    Returns:
        np.ndarray: size が None なら (2n,)、そうでなければ (size, 2n)
    """
    chart = chart or Chart.standard(ball.n)
    count = 1 if size is None else size
    offsets = unit_ball_offsets(rng, 2 * ball.n, count)
    points = iota(chart, ball.center)[None, :] + ball.radius * offsets
    return points[0] if size is None else points


def tube_values(
    o: np.ndarray,
    c: Context,
    points: np.ndarray,
    epsilon: float,
    chart: Optional[Chart] = None,
) -> np.ndarray:
    """
    tube_value のベクトル化版

    Returns:
        np.ndarray: 各点の値 (未定義の点は NaN)

    Raises:
        AmbiguousTube: ある点が2つ以上のチューブに属する
    """
    if not 0.0 < epsilon < MAX_EPSILON:
        raise InvalidConfig(
            f"epsilon must lie in (0, {MAX_EPSILON:.6f}), got {epsilon}"
        )
    chart = chart or Chart(c)
    spectrum = stable_spectrum(o, c)
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    z = chart.from_coords(points)
    w = z @ c.representative.matrix.conj()  # ⟨α_i|z⟩

    values = np.full(points.shape[0], np.nan)
    hits = np.zeros(points.shape[0], dtype=np.int64)
    for block in spectrum.blocks:
        idx = list(block.indices)
        weight = np.linalg.norm(w[:, idx], axis=1)
        nonzero = weight > 0.0
        diff = w.copy()
        scaled = np.zeros_like(w[:, idx])
        scaled[nonzero] = w[nonzero][:, idx] / weight[nonzero, None]
        diff[:, idx] = w[:, idx] - scaled
        distance = np.linalg.norm(diff, axis=1)
        inside = nonzero & (distance < epsilon)
        hits += inside
        values[inside] = block.eigenvalue

    ambiguous = np.flatnonzero(hits > 1)
    if ambiguous.size:
        raise AmbiguousTube(
            f"point {int(ambiguous[0])} lies in "
            f"{int(hits[ambiguous[0]])} eigenspace tubes"
        )
    return values


def tube_value(
    o: np.ndarray,
    c: Context,
    p: np.ndarray,
    epsilon: float,
    chart: Optional[Chart] = None,
) -> Optional[float]:
    """
    チューブによる値 v_α(O)(p)

    z = ι⁻¹(p) と各固有空間ブロック P_k の f* = P_k z/‖P_k z‖ の距離が ε 未満なら
    その固有値を返す。どのブロックにも入らなければ None (未定義)。

    Args:
        o: c で安定な観測量
        c: コンテキスト
        p: 位相空間の点
        epsilon: 0 < ε < √2/2
        chart: 座標チャート (省略時は c を基底とするチャート)

    Raises:
        AmbiguousTube: 2つ以上のブロックに入る
    """
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1:
        raise DimensionMismatch(f"point must be one-dimensional, got shape {p.shape}")
    value = tube_values(o, c, p[None, :], epsilon, chart)[0]
    return None if np.isnan(value) else float(value)


def change_map_matrix(chart: Chart, ch: ContextChange) -> np.ndarray:
    """T = ι_α ∘ U ∘ ι_α⁻¹ の実行列 realify(A†UA)"""
    a = chart.base.representative.matrix
    if ch.n != chart.n:
        raise DimensionMismatch(f"change has dimension {ch.n}, chart {chart.n}")
    return realify(a.conj().T @ ch.unitary @ a)


def context_change_map(
    chart: Chart,
    ch: ContextChange,
    p: np.ndarray,
    inverse: bool = False,
) -> np.ndarray:
    """
    Ω 上のコンテキスト変更写像 T (inverse=True なら T⁻¹ = Tᵀ)

    p は (2n,) または (N, 2n)。
    """
    t = change_map_matrix(chart, ch)
    p = np.asarray(p, dtype=np.float64)
    if p.shape[-1] != 2 * chart.n:
        raise DimensionMismatch(
            f"point has {p.shape[-1]} coordinates, chart needs {2 * chart.n}"
        )
    # 行ベクトル表現: p Tᵀ が T p に対応
    return p @ (t if inverse else t.T)


@dataclass(frozen=True)
class BallMapReport:
    """U B(φ; r) = B(Uφ; r) の数値検証結果"""

    samples: int
    radius: float
    max_distance: float
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "samples": self.samples,
            "radius": self.radius,
            "max_distance": self.max_distance,
            "passed": self.passed,
        }


def ball_maps_to_ball(
    u: Union[np.ndarray, ContextChange],
    ball: Ball,
    samples: int,
    rng: np.random.Generator,
    chart: Optional[Chart] = None,
) -> BallMapReport:
    """球の像が球 B(Uφ; r) に入るかを標本で検証"""
    unitary = u.unitary if isinstance(u, ContextChange) else as_cmatrix(u, ball.n)
    chart = chart or Chart.standard(ball.n)
    a = chart.base.representative.matrix
    t = realify(a.conj().T @ unitary @ a)

    points = sample_ball(ball, rng, chart, size=samples)
    images = points @ t.T
    center = iota(chart, unitary @ ball.center)
    distance = float(np.max(np.linalg.norm(images - center[None, :], axis=1)))
    return BallMapReport(
        samples, float(ball.radius), distance, distance < ball.radius + BALL_TOL
    )
