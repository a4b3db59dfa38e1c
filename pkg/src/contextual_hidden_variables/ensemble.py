"""
アンサンブルモジュール
ε 球アンサンブル、区間の細分としての分割 (splitting)、履歴に依存する値の割り当て、
厳密およびモンテカルロの期待値、gFUNC と n-TRNS の検証

分割は [0,1) の区間分割として一次元的に実現する。各サンプルは持続的な座標
u ∈ [0,1) と単位 2n 球内のオフセット e を持ち、コンテキスト変更で変化しない。
"""

from bisect import bisect_right
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .context import (
    Context,
    History,
    change_unitary,
    contexts_equivalent,
    context_to_document,
    encode_vector,
    is_stable,
    stable_spectrum,
)
from .error_handler import (
    BlockMassMismatch,
    DimensionMismatch,
    GFuncViolation,
    InvalidConfig,
    NotStable,
    NTrnsViolation,
    UndefinedValue,
    UnlabeledPoint,
    ZeroMassLabel,
)
from .linalg import SpectralFunction, apply_fn_spectral, as_cvector, spectral_value
from .phase_space import (
    MAX_EPSILON,
    Chart,
    context_change_map,
    iota,
    tube_values,
    unit_ball_offsets,
)

NORM_TOL = 1e-9
ZERO_MASS = 1e-14
BLOCK_MASS_TOL = 1e-9
COVER_TOL = 1e-12
VALUE_TOL = 1e-8
MAX_SEED = 2**64


@dataclass(frozen=True, eq=False)
class ModelConfig:
    """モデルの設定 (状態 φ、ε、基底コンテキスト、シード、サンプル数)"""

    state: np.ndarray
    epsilon: float
    base_context: Context
    seed: int = 42
    n_samples: int = 100000

    def __post_init__(self):
        state = as_cvector(self.state)
        if state.shape[0] != self.base_context.n:
            raise DimensionMismatch(
                f"state has dimension {state.shape[0]}, "
                f"context {self.base_context.n}"
            )
        norm = float(np.linalg.norm(state))
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidConfig(f"state must be a unit vector, norm is {norm:.12f}")
        if not 0.0 < self.epsilon < MAX_EPSILON:
            raise InvalidConfig(
                f"epsilon must lie in (0, {MAX_EPSILON:.6f}), got {self.epsilon}"
            )
        seed_ok = isinstance(self.seed, (int, np.integer))
        if not seed_ok or not 0 <= self.seed < MAX_SEED:
            raise InvalidConfig(
                f"seed must be an integer in [0, 2^64), got {self.seed}"
            )
        if not isinstance(self.n_samples, (int, np.integer)) or self.n_samples < 1:
            raise InvalidConfig(f"n_samples must be positive, got {self.n_samples}")
        state.setflags(write=False)
        object.__setattr__(self, "state", state)

    @property
    def n(self) -> int:
        return self.base_context.n


@dataclass(frozen=True)
class Segment:
    """区間 [lo, hi) とそのラベル (現在のフレームの添字)"""

    lo: float
    hi: float
    label: int

    @property
    def length(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True, eq=False)
class Split:
    """[0,1) の順序付き区間分割"""

    segments: Tuple[Segment, ...]
    context: Context

    def __post_init__(self):
        segments = tuple(self.segments)
        if not segments:
            raise ValueError("分割には少なくとも1つの区間が必要です")
        gap = abs(segments[0].lo) + abs(1.0 - segments[-1].hi)
        for prev, nxt in zip(segments, segments[1:]):
            if nxt.lo < prev.hi:
                raise ValueError(f"区間が重なっています: {prev} / {nxt}")
            gap += nxt.lo - prev.hi
        if gap > COVER_TOL:
            raise ValueError(f"区間が [0,1) を覆っていません (隙間 {gap:.3e})")
        object.__setattr__(self, "segments", segments)

    @property
    def lows(self) -> np.ndarray:
        return np.array([s.lo for s in self.segments])

    @property
    def highs(self) -> np.ndarray:
        return np.array([s.hi for s in self.segments])

    @property
    def labels(self) -> np.ndarray:
        return np.array([s.label for s in self.segments], dtype=np.int64)

    def masses(self) -> np.ndarray:
        """ラベルごとの区間の長さの合計"""
        out = np.zeros(self.context.n)
        for s in self.segments:
            out[s.label] += s.length
        return out

    def union_of(self, labels: Sequence[int]) -> List[Tuple[float, float]]:
        """指定ラベルの区間の和集合 (隣接区間は結合)"""
        wanted = set(labels)
        union: List[Tuple[float, float]] = []
        for s in self.segments:
            if s.label not in wanted:
                continue
            if union and union[-1][1] == s.lo:
                union[-1] = (union[-1][0], s.hi)
            else:
                union.append((s.lo, s.hi))
        return union

    def to_dict(self) -> Dict[str, Any]:
        return {
            "context": self.context.label,
            "segments": [[s.lo, s.hi, s.label] for s in self.segments],
        }


@dataclass(frozen=True)
class HiddenSample:
    """隠れた変数: 持続的な座標 u と単位球内のオフセット e"""

    u: float
    e: np.ndarray


@dataclass(frozen=True, eq=False)
class SampleSet:
    """サンプルの配列表現 u (N,) と e (N, 2n)"""

    u: np.ndarray
    e: np.ndarray

    def __post_init__(self):
        self.u.setflags(write=False)
        self.e.setflags(write=False)

    def __len__(self) -> int:
        return int(self.u.shape[0])

    def __getitem__(self, index: int) -> HiddenSample:
        return HiddenSample(float(self.u[index]), self.e[index])


@dataclass(frozen=True, eq=False)
class LabeledEnsemble:
    """ラベル付きアンサンブル (設定、履歴、分割、サンプル)"""

    config: ModelConfig
    history: History
    split: Split
    samples: SampleSet

    def __post_init__(self):
        if self.split.context is not self.history.last:
            raise ValueError("分割のコンテキストは履歴の最後のコンテキストである必要があります")

    @property
    def context(self) -> Context:
        return self.history.last

    @property
    def chart(self) -> Chart:
        return Chart(self.history.base)

    def born_weights(self) -> np.ndarray:
        """現在のフレームでのボルン重み |⟨β_i|φ⟩|²"""
        return np.abs(self.context.representative.coefficients(self.config.state)) ** 2

    def extend(self, nxt: Context, merge: bool = True) -> "LabeledEnsemble":
        return extend_history(self, nxt, merge)


# ---------------------------------------------------------------------------
# 準備と細分
# ---------------------------------------------------------------------------


def _initial_segments(weights: np.ndarray) -> List[Segment]:
    """累積ボルン重みによる連続区間 (最後の境界は 1.0)"""
    positive = [i for i, w in enumerate(weights) if w >= ZERO_MASS]
    cumulative = np.cumsum(weights)
    segments = []
    cursor = 0.0
    for i in positive:
        hi = 1.0 if i == positive[-1] else float(cumulative[i])
        segments.append(Segment(cursor, hi, i))
        cursor = hi
    return segments


def prepare(config: ModelConfig) -> LabeledEnsemble:
    """
    基底コンテキストだけの履歴でアンサンブルを準備

    u は [0,1) 上の一様分布、e は単位 2n 球内の一様分布 (シードから決定的に生成)。
    """
    rng = np.random.default_rng(config.seed)
    n = config.n
    u = rng.random(config.n_samples)
    e = unit_ball_offsets(rng, 2 * n, config.n_samples)

    history = History((config.base_context,))
    weights = np.abs(config.base_context.representative.coefficients(config.state)) ** 2
    split = Split(tuple(_initial_segments(weights)), history.last)
    return LabeledEnsemble(config, history, split, SampleSet(u, e))


def _merge_segments(segments: List[Segment]) -> List[Segment]:
    merged: List[Segment] = []
    for s in segments:
        if merged and merged[-1].label == s.label and merged[-1].hi == s.lo:
            merged[-1] = Segment(merged[-1].lo, s.hi, s.label)
        else:
            merged.append(s)
    return merged


def _subdivide_block(
    sources: List[Segment], targets: List[Tuple[int, float]]
) -> List[Segment]:
    """
    ブロック内の区間を左から順に、目標ラベルの質量で昇順に再分割

    最後の目標ラベルが残りを全て受け取るので、ブロックの和集合の境界は変わらない。
    """
    out: List[Segment] = []
    t = 0
    remaining = targets[0][1]
    for seg in sources:
        pos = seg.lo
        while pos < seg.hi:
            label = targets[t][0]
            last = t == len(targets) - 1
            if last or pos + remaining >= seg.hi:
                hi = seg.hi
            else:
                hi = pos + remaining
            if hi > pos:
                out.append(Segment(pos, hi, label))
                remaining -= hi - pos
                pos = hi
                exhausted = remaining <= 0.0
            else:
                # 残りが浮動小数点の分解能以下
                exhausted = True
            if exhausted and not last:
                t += 1
                remaining = targets[t][1]
    return out


def extend_history(
    le: LabeledEnsemble, nxt: Context, merge: bool = True
) -> LabeledEnsemble:
    """
    履歴を1つのコンテキストで延長し、分割を細分

    最も細かい共通分割の各ブロック k について、I_k のラベルを持つ区間の和集合を
    J_k のラベル (昇順) に |⟨γ_j|φ⟩|² の質量で左から再分割する。サンプルは不変。

    Raises:
        EquivalentContexts: nxt が現在のコンテキストと同値
        BlockMassMismatch: ブロックの質量が一致しない
    """
    history = le.history.extend(nxt)
    change = change_unitary(le.context, nxt)
    parts = change.partitions
    weights = np.abs(nxt.representative.coefficients(le.config.state)) ** 2

    segments: List[Segment] = []
    for block_a, block_b in zip(parts.i_blocks, parts.j_blocks):
        wanted = set(block_a)
        sources = [s for s in le.split.segments if s.label in wanted]
        source_mass = sum(s.length for s in sources)
        target_mass = float(sum(weights[j] for j in block_b))
        if abs(source_mass - target_mass) > BLOCK_MASS_TOL:
            raise BlockMassMismatch(
                f"block {block_a}->{block_b}: source mass {source_mass:.12f}, "
                f"target mass {target_mass:.12f}"
            )
        if not sources:
            continue
        targets = [(j, float(weights[j])) for j in block_b if weights[j] >= ZERO_MASS]
        if not targets:
            # 残りの微小な長さは最大重みのラベルが受け取る
            j = max(block_b, key=lambda k: (weights[k], k))
            targets = [(j, float(weights[j]))]
        segments.extend(_subdivide_block(sources, targets))

    segments.sort(key=lambda s: s.lo)
    if merge:
        segments = _merge_segments(segments)
    split = Split(tuple(segments), history.last)
    return LabeledEnsemble(le.config, history, split, le.samples)


def run_history(
    config: ModelConfig, contexts: Sequence[Context], merge: bool = True
) -> LabeledEnsemble:
    """基底コンテキストから始まる履歴を辿ったアンサンブル"""
    if not contexts or (
        contexts[0] is not config.base_context
        and contexts_equivalent(contexts[0], config.base_context) is None
    ):
        raise InvalidConfig("history must start with the base context")
    le = prepare(config)
    for c in contexts[1:]:
        le = extend_history(le, c, merge)
    return le


# ---------------------------------------------------------------------------
# ラベルと位置
# ---------------------------------------------------------------------------


SampleRef = Union[int, HiddenSample]


def _u_of(le: LabeledEnsemble, sample: SampleRef) -> float:
    return le.samples.u[sample] if isinstance(sample, (int, np.integer)) else sample.u


def _e_of(le: LabeledEnsemble, sample: SampleRef) -> np.ndarray:
    return le.samples.e[sample] if isinstance(sample, (int, np.integer)) else sample.e


def label_of(le: LabeledEnsemble, sample: SampleRef) -> int:
    """
    サンプルの u を含む区間のラベル (二分探索)

    Raises:
        UnlabeledPoint: u がどの区間にも入らない
    """
    u = float(_u_of(le, sample))
    segments = le.split.segments
    k = bisect_right([s.lo for s in segments], u) - 1
    if k < 0 or not segments[k].lo <= u < segments[k].hi:
        raise UnlabeledPoint(f"u = {u!r} lies in no segment")
    return segments[k].label


def labels(le: LabeledEnsemble) -> np.ndarray:
    """全サンプルのラベル (label_of のベクトル化版)"""
    lows, highs = le.split.lows, le.split.highs
    k = np.searchsorted(lows, le.samples.u, side="right") - 1
    bad = (k < 0) | (le.samples.u >= highs[np.clip(k, 0, None)])
    if np.any(bad):
        first = int(np.flatnonzero(bad)[0])
        raise UnlabeledPoint(
            f"sample {first} (u = {le.samples.u[first]!r}) lies in no segment"
        )
    return le.split.labels[k]


def _radii(le: LabeledEnsemble, label_array: np.ndarray) -> np.ndarray:
    """縮小半径 ε·|⟨β_i|φ⟩|^{1/n}"""
    weights = le.born_weights()
    zero = weights[label_array] < ZERO_MASS
    if np.any(zero):
        first = int(np.flatnonzero(zero)[0])
        raise ZeroMassLabel(
            f"label {int(label_array[first])} has zero Born weight (sample {first})"
        )
    amplitudes = np.sqrt(weights)
    return le.config.epsilon * amplitudes[label_array] ** (1.0 / le.config.n)


def position_of(le: LabeledEnsemble, sample: SampleRef) -> np.ndarray:
    """
    分割後の位置 ι_α(β_label) + ε·|⟨β_label|φ⟩|^{1/n}·e

    Raises:
        ZeroMassLabel: ラベルのボルン重みが 0
    """
    label = label_of(le, sample)
    radius = _radii(le, np.array([label]))[0]
    center = iota(le.chart, le.context.representative.vector(label))
    return center + radius * _e_of(le, sample)


def positions(le: LabeledEnsemble) -> np.ndarray:
    """全サンプルの位置 (N, 2n)"""
    label_array = labels(le)
    radii = _radii(le, label_array)
    centers = le.chart.to_coords(le.context.representative.matrix.T)
    return centers[label_array] + radii[:, None] * le.samples.e


def prepared_position_of(le: LabeledEnsemble, sample: SampleRef) -> np.ndarray:
    """分割前の ε 球アンサンブル上の位置 ι_α(φ) + ε·e"""
    return iota(le.chart, le.config.state) + le.config.epsilon * _e_of(le, sample)


def prepared_positions(le: LabeledEnsemble) -> np.ndarray:
    return iota(le.chart, le.config.state)[None, :] + le.config.epsilon * le.samples.e


@dataclass(frozen=True)
class SplittingVolumeReport:
    """分割の体積条件の検証結果"""

    masses: Tuple[float, ...]
    born_weights: Tuple[float, ...]
    volume_ratios: Tuple[float, ...]
    max_residual: float
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "masses": list(self.masses),
            "born_weights": list(self.born_weights),
            "volume_ratios": list(self.volume_ratios),
            "max_residual": self.max_residual,
            "passed": self.passed,
        }


def splitting_volume_check(le: LabeledEnsemble) -> SplittingVolumeReport:
    """
    ラベルの質量とボルン重み、および像の球の体積比 (r_i/ε)^{2n} が一致するか検証
    """
    n = le.config.n
    masses = le.split.masses()
    weights = le.born_weights()
    radii = le.config.epsilon * np.sqrt(weights) ** (1.0 / n)
    ratios = (radii / le.config.epsilon) ** (2 * n)
    residual = float(
        max(np.max(np.abs(masses - weights)), np.max(np.abs(ratios - weights)))
    )
    return SplittingVolumeReport(
        tuple(float(x) for x in masses),
        tuple(float(x) for x in weights),
        tuple(float(x) for x in ratios),
        residual,
        residual <= BLOCK_MASS_TOL,
    )


# ---------------------------------------------------------------------------
# 値の割り当て
# ---------------------------------------------------------------------------


def eigenvalue_table(le: LabeledEnsemble, o: np.ndarray) -> np.ndarray:
    """
    現在のフレームの添字ごとの固有値 Re⟨β_i|O|β_i⟩

    Raises:
        NotStable: O が現在のコンテキストで安定ではない
    """
    return stable_spectrum(o, le.context).eigenvalues


def assign_value(le: LabeledEnsemble, o: np.ndarray) -> np.ndarray:
    """各サンプルの値: ラベルの固有ベクトルに対する O の固有値"""
    return eigenvalue_table(le, o)[labels(le)]


def assign_value_pullback(le: LabeledEnsemble, o: np.ndarray) -> np.ndarray:
    """
    履歴を遡って値を計算

    各変更について O ← U†OU、p ← T⁻¹(p) とし、最後に基底コンテキストで
    tube_value を評価する。assign_value と全サンプルで一致する。

    Raises:
        NotStable: O が現在のコンテキストで安定ではない
        UndefinedValue: どのチューブにも入らない点がある
    """
    if not is_stable(o, le.context):
        raise NotStable(f"observable is not stable in context {le.context.label}")
    chart = le.chart
    points = positions(le)
    pulled = np.asarray(o, dtype=np.complex128)
    for change in reversed(le.history.changes()):
        u = change.unitary
        pulled = u.conj().T @ pulled @ u
        pulled = 0.5 * (pulled + pulled.conj().T)
        points = context_change_map(chart, change, points, inverse=True)

    values = tube_values(pulled, le.history.base, points, le.config.epsilon, chart)
    undefined = np.flatnonzero(np.isnan(values))
    if undefined.size:
        raise UndefinedValue(f"sample {int(undefined[0])} lies in no eigenspace tube")
    return values


def expectation_exact(le: LabeledEnsemble, o: np.ndarray) -> float:
    """区間の質量による厳密な期待値 Σ_i mass(i)·eigenvalue(i)"""
    table = eigenvalue_table(le, o)
    return float(np.dot(le.split.masses(), table))


def quantum_expectation(state: np.ndarray, o: np.ndarray) -> float:
    """⟨φ|O|φ⟩"""
    state = as_cvector(state)
    return float(np.real(np.vdot(state, np.asarray(o) @ state)))


def expectation_mc(le: LabeledEnsemble, o: np.ndarray) -> Tuple[float, float]:
    """
    モンテカルロ推定値と標準誤差

    Returns:
        Tuple[float, float]: (標本平均, 標準誤差)
    """
    values = assign_value(le, o)
    estimate = float(np.mean(values))
    if values.size < 2:
        return estimate, 0.0
    return estimate, float(np.std(values, ddof=1) / np.sqrt(values.size))


# ---------------------------------------------------------------------------
# gFUNC と n-TRNS
# ---------------------------------------------------------------------------


@dataclass
class CheckReport:
    """命題の検証結果"""

    proposition: str
    samples: int
    violations: int = 0
    first_violation: Optional[int] = None
    details: Optional[Dict[str, int]] = None

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "proposition": self.proposition,
            "samples": self.samples,
            "violations": self.violations,
            "first_violation": self.first_violation,
            "details": self.details or {},
            "passed": self.passed,
        }


def _mismatch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.abs(a - b) > VALUE_TOL * (1.0 + np.abs(b))


def check_gfunc(
    le: LabeledEnsemble,
    b: np.ndarray,
    f: SpectralFunction,
    raise_on_violation: bool = True,
) -> CheckReport:
    """
    v(f(B)) = f(v(B)) と、可換な組 A = f(B) に対する
    v(A+B) = v(A)+v(B), v(AB) = v(A)v(B) をサンプルごとに検証

    f は B の固有値表に適用し、サンプルの値には直接適用しない。

    Raises:
        NotStable: B が現在のコンテキストで安定ではない
        GFuncViolation: 違反があり raise_on_violation が True
    """
    label_array = labels(le)
    table_b = eigenvalue_table(le, b)
    f_table = np.array([spectral_value(f, x) for x in table_b])

    a = apply_fn_spectral(b, f)
    v_b = table_b[label_array]
    v_a = eigenvalue_table(le, a)[label_array]
    v_sum = eigenvalue_table(le, a + b)[label_array]
    product = a @ b
    v_prod = eigenvalue_table(le, 0.5 * (product + product.conj().T))[label_array]

    checks = {
        "function": _mismatch(v_a, f_table[label_array]),
        "sum": _mismatch(v_sum, v_a + v_b),
        "product": _mismatch(v_prod, v_a * v_b),
    }
    bad = np.zeros(label_array.shape[0], dtype=bool)
    for mask in checks.values():
        bad |= mask

    report = CheckReport(
        proposition="gFUNC",
        samples=int(label_array.shape[0]),
        violations=int(bad.sum()),
        first_violation=int(np.flatnonzero(bad)[0]) if bad.any() else None,
        details={name: int(mask.sum()) for name, mask in checks.items()},
    )
    if raise_on_violation and not report.passed:
        raise GFuncViolation(
            f"gFUNC violated on {report.violations} sample(s)",
            proposition="gFUNC",
            sample_index=report.first_violation,
        )
    return report


def check_ntrns(
    le_before: LabeledEnsemble,
    le_after: LabeledEnsemble,
    o: np.ndarray,
    raise_on_violation: bool = True,
) -> CheckReport:
    """
    履歴を1つ延長しても、両方のコンテキストで安定な O の値が変わらないか検証

    Raises:
        NotStable: O が最後の2つのコンテキストのどちらかで安定ではない
        NTrnsViolation: 違反があり raise_on_violation が True
    """
    before, after = le_before.history.contexts, le_after.history.contexts
    if len(after) != len(before) + 1 or any(
        x is not y for x, y in zip(before, after[:-1])
    ):
        raise ValueError("le_before は le_after の履歴を1つ短くしたものである必要があります")
    if le_before.samples is not le_after.samples:
        raise ValueError("2つのアンサンブルは同じサンプルを共有する必要があります")

    v_before = assign_value(le_before, o)
    v_after = assign_value(le_after, o)
    bad = _mismatch(v_after, v_before)
    report = CheckReport(
        proposition="n-TRNS",
        samples=int(bad.shape[0]),
        violations=int(bad.sum()),
        first_violation=int(np.flatnonzero(bad)[0]) if bad.any() else None,
    )
    if raise_on_violation and not report.passed:
        raise NTrnsViolation(
            f"n-TRNS violated on {report.violations} sample(s)",
            proposition="n-TRNS",
            sample_index=report.first_violation,
        )
    return report


# ---------------------------------------------------------------------------
# ダンプ
# ---------------------------------------------------------------------------


def ensemble_to_document(
    le: LabeledEnsemble, include_samples: bool = False
) -> Dict[str, Any]:
    """アンサンブルのダンプ (設定、履歴、区間表、必要ならサンプル)"""
    doc: Dict[str, Any] = {
        "config": {
            "state": encode_vector(le.config.state),
            "epsilon": le.config.epsilon,
            "seed": int(le.config.seed),
            "n_samples": int(le.config.n_samples),
            "base_context": context_to_document(le.config.base_context),
        },
        "history": [{"id": c.id, "name": c.name} for c in le.history.contexts],
        "segments": [[s.lo, s.hi, s.label] for s in le.split.segments],
    }
    if include_samples:
        doc["samples"] = {
            "u": le.samples.u.tolist(),
            "e": le.samples.e.tolist(),
        }
    return doc
