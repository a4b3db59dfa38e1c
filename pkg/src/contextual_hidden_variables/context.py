"""
コンテキストモジュール
正規直交フレームの同値類としてのコンテキスト、安定性、最も細かい共通分割、
コンテキスト変更ユニタリ、履歴の基底コンテキスト置換への簡約
"""

import hashlib
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .error_handler import (
    DimensionMismatch,
    EquivalentContexts,
    InvalidDocument,
    NotPermutation,
    NotStable,
    SpanMismatch,
)
from .linalg import (
    DEFAULT_GROUP_TOL,
    Frame,
    SpectralBlock,
    SpectralForm,
    as_cvector,
    canonical_phase,
    group_eigenvalues,
    is_unitary,
    jacobi_eigh,
    max_norm,
    require_hermitian,
)

__all__ = [
    "Frame",
    "Context",
    "EquivalenceWitness",
    "PartitionPair",
    "ContextChange",
    "History",
    "HistoryReduction",
    "contexts_equivalent",
    "is_stable",
    "stable_spectrum",
    "finest_partitions",
    "shared_projectors",
    "change_unitary",
    "change_between_equivalent",
    "context_change",
    "invariance_check",
    "s_permutation",
    "reduce_history",
    "frame_to_document",
    "frame_from_document",
    "context_to_document",
    "context_from_document",
]

EQUIVALENCE_TOL = 1e-8
STABILITY_TOL = 1e-8
OVERLAP_ZERO_TOL = 1e-8
PROJECTOR_TOL = 1e-7
PERMUTATION_TOL = 1e-8
ID_DECIMALS = 10
ID_LENGTH = 16


def _frame_id(frame: Frame) -> str:
    """位相と並び順を正規化したフレームのハッシュ"""
    rows = []
    for v in frame.vectors:
        c = canonical_phase(v)
        # -0.0 を 0.0 に揃える
        re = np.round(c.real, ID_DECIMALS) + 0.0
        im = np.round(c.imag, ID_DECIMALS) + 0.0
        rows.append(tuple(float(x) for pair in zip(re, im) for x in pair))
    rows.sort()
    digest = hashlib.sha256(repr(rows).encode("utf-8")).hexdigest()
    return digest[:ID_LENGTH]


@dataclass(frozen=True, eq=False)
class Context:
    """コンテキスト (代表フレームとその同値類の識別子)"""

    representative: Frame
    name: Optional[str] = None
    id: str = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "id", _frame_id(self.representative))

    @classmethod
    def from_vectors(
        cls, vectors: Sequence[Sequence[complex]], name: Optional[str] = None
    ) -> "Context":
        return cls(Frame.from_vectors(vectors), name)

    @classmethod
    def from_observable(
        cls,
        o: np.ndarray,
        name: Optional[str] = None,
        group_tol: float = DEFAULT_GROUP_TOL,
    ) -> "Context":
        """観測量の固有フレームからコンテキストを作成"""
        frame, _ = jacobi_eigh(o, group_tol)
        return cls(frame, name)

    @property
    def n(self) -> int:
        return self.representative.n

    @property
    def frame(self) -> Frame:
        return self.representative

    @property
    def label(self) -> str:
        return self.name or self.id

    def __repr__(self) -> str:
        return f"Context(label={self.label!r}, n={self.n})"


def _frame_of(c: Union[Frame, Context]) -> Frame:
    return c.representative if isinstance(c, Context) else c


@dataclass(frozen=True)
class EquivalenceWitness:
    """同値性の証拠: |β_j⟩ = e^{iθ_{p(j)}} |α_{p(j)}⟩"""

    permutation: Tuple[int, ...]
    phases: Tuple[float, ...]


def contexts_equivalent(
    a: Union[Frame, Context], b: Union[Frame, Context]
) -> Optional[EquivalenceWitness]:
    """
    2つのフレームが置換と位相の違いを除いて一致するか判定

    Returns:
        Optional[EquivalenceWitness]: 同値なら証拠 (p, θ)、そうでなければ None

    Raises:
        DimensionMismatch: 次元が異なる
    """
    fa, fb = _frame_of(a), _frame_of(b)
    if fa.n != fb.n:
        raise DimensionMismatch(f"frames have dimensions {fa.n} and {fb.n}")

    amplitudes = fa.matrix.conj().T @ fb.matrix  # [i, j] = ⟨α_i|β_j⟩
    weights = np.abs(amplitudes) ** 2
    ones = weights >= 1.0 - EQUIVALENCE_TOL
    zeros = weights <= EQUIVALENCE_TOL
    if not np.all(ones | zeros):
        return None
    if not (np.all(ones.sum(axis=0) == 1) and np.all(ones.sum(axis=1) == 1)):
        return None

    permutation = tuple(int(np.argmax(ones[:, j])) for j in range(fb.n))
    phases = [0.0] * fa.n
    for j, i in enumerate(permutation):
        phase = np.angle(amplitudes[i, j])
        residual = np.abs(fb.vector(j) - np.exp(1j * phase) * fa.vector(i)).max()
        if residual > EQUIVALENCE_TOL:
            return None
        phases[i] = float(phase)
    return EquivalenceWitness(permutation, tuple(phases))


def is_stable(o: np.ndarray, c: Union[Frame, Context]) -> bool:
    """
    観測量がコンテキストで安定 (代表フレームで対角) か判定

    Raises:
        NotHermitian: O がエルミートではない
    """
    o = require_hermitian(o)
    frame = _frame_of(c)
    if o.shape[0] != frame.n:
        raise DimensionMismatch(
            f"observable has dimension {o.shape[0]}, frame {frame.n}"
        )
    elements = frame.matrix_elements(o)
    off = elements - np.diag(np.diag(elements))
    return max_norm(off) <= STABILITY_TOL * (1.0 + max_norm(o))


def stable_spectrum(
    o: np.ndarray, c: Union[Frame, Context], group_tol: float = DEFAULT_GROUP_TOL
) -> SpectralForm:
    """
    コンテキストで安定な観測量の固有値ブロック

    ブロックの添字は代表フレームの添字で、固有値は Re⟨α_i|O|α_i⟩。

    Raises:
        NotStable: O がコンテキストで安定ではない
    """
    if not is_stable(o, c):
        raise NotStable(f"observable is not stable in context {_label_of(c)}")
    frame = _frame_of(c)
    diagonal = np.real(np.diag(frame.matrix_elements(o)))
    order = np.argsort(diagonal, kind="stable")
    grouped = group_eigenvalues(diagonal[order], group_tol)
    return SpectralForm(
        tuple(
            SpectralBlock(
                block.eigenvalue,
                tuple(sorted(int(order[k]) for k in block.indices)),
            )
            for block in grouped.blocks
        )
    )


def _label_of(c: Union[Frame, Context]) -> str:
    return c.label if isinstance(c, Context) else "<frame>"


@dataclass(frozen=True)
class PartitionPair:
    """最も細かい共通分割 (α 側 I_k と β 側 J_k)"""

    i_blocks: Tuple[Tuple[int, ...], ...]
    j_blocks: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.i_blocks) != len(self.j_blocks):
            raise ValueError("I と J のブロック数が一致しません")
        for ib, jb in zip(self.i_blocks, self.j_blocks):
            if len(ib) != len(jb):
                raise ValueError(f"ブロックの大きさが一致しません: {ib} / {jb}")

    @property
    def m(self) -> int:
        return len(self.i_blocks)

    def block_of_source(self, i: int) -> int:
        for k, block in enumerate(self.i_blocks):
            if i in block:
                return k
        raise IndexError(f"source index {i} is not covered")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "i_blocks": [list(b) for b in self.i_blocks],
            "j_blocks": [list(b) for b in self.j_blocks],
            "m": self.m,
        }


def _overlap_components(adjacency: np.ndarray) -> List[Tuple[List[int], List[int]]]:
    """2部グラフ (α 添字, β 添字) の連結成分"""
    n = adjacency.shape[0]
    seen_a = [False] * n
    seen_b = [False] * n
    components = []
    for start in range(n):
        if seen_a[start]:
            continue
        block_a, block_b = [], []
        stack = [("a", start)]
        seen_a[start] = True
        while stack:
            side, idx = stack.pop()
            if side == "a":
                block_a.append(idx)
                for j in np.flatnonzero(adjacency[idx, :]):
                    if not seen_b[j]:
                        seen_b[j] = True
                        stack.append(("b", int(j)))
            else:
                block_b.append(idx)
                for i in np.flatnonzero(adjacency[:, idx]):
                    if not seen_a[i]:
                        seen_a[i] = True
                        stack.append(("a", int(i)))
        components.append((sorted(block_a), sorted(block_b)))
    return components


def finest_partitions(
    ca: Union[Frame, Context], cb: Union[Frame, Context]
) -> PartitionPair:
    """
    最も細かい共通分割

    重なり |⟨α_i|β_j⟩| > OVERLAP_ZERO_TOL を辺とする2部グラフの連結成分を求め、
    各ブロックの射影演算子が一致することを検証する。

    Raises:
        EquivalentContexts: 2つのコンテキストが同値
        SpanMismatch: ブロックが同じ部分空間を張らない
    """
    fa, fb = _frame_of(ca), _frame_of(cb)
    if contexts_equivalent(fa, fb) is not None:
        raise EquivalentContexts(
            "finest partitions are trivial for equivalent contexts"
        )

    adjacency = np.abs(fa.matrix.conj().T @ fb.matrix) > OVERLAP_ZERO_TOL
    components = _overlap_components(adjacency)
    components.sort(key=lambda comp: comp[0][0])

    for block_a, block_b in components:
        if len(block_a) != len(block_b):
            raise SpanMismatch(
                f"component sizes differ: alpha {block_a} vs beta {block_b}"
            )
        residual = max_norm(fa.projector(block_a) - fb.projector(block_b))
        if residual > PROJECTOR_TOL:
            raise SpanMismatch(
                f"projectors differ by {residual:.3e} on block {block_a}/{block_b}"
            )

    return PartitionPair(
        tuple(tuple(a) for a, _ in components),
        tuple(tuple(b) for _, b in components),
    )


def shared_projectors(
    ca: Union[Frame, Context], cb: Union[Frame, Context]
) -> List[np.ndarray]:
    """両方のコンテキストで安定な観測量を張る共通スペクトル射影 P_k"""
    fa = _frame_of(ca)
    parts = finest_partitions(ca, cb)
    return [fa.projector(block) for block in parts.i_blocks]


@dataclass(frozen=True, eq=False)
class ContextChange:
    """コンテキスト変更ユニタリ U = Σ_k Σ_{i∈I_k} |β_{q(i)}⟩⟨α_i|"""

    source: Context
    target: Context
    unitary: np.ndarray
    q: Tuple[int, ...]
    partitions: PartitionPair

    @property
    def n(self) -> int:
        return self.source.n

    @property
    def label(self) -> str:
        return f"{self.source.label}→{self.target.label}"


def _as_context(c: Union[Frame, Context]) -> Context:
    return c if isinstance(c, Context) else Context(c)


def _build_change(
    ca: Context, cb: Context, q: Sequence[int], parts: PartitionPair
) -> ContextChange:
    fa, fb = ca.representative, cb.representative
    u = fb.matrix[:, list(q)] @ fa.matrix.conj().T
    if not is_unitary(u):
        raise SpanMismatch(f"context change {ca.label}→{cb.label} is not unitary")
    u.setflags(write=False)
    return ContextChange(ca, cb, u, tuple(int(x) for x in q), parts)


def change_unitary(
    ca: Union[Frame, Context], cb: Union[Frame, Context]
) -> ContextChange:
    """
    コンテキスト変更ユニタリを構築

    q は各ブロック内で順序を保つ全単射 (α 添字の昇順 → β 添字の昇順)。
    """
    ca, cb = _as_context(ca), _as_context(cb)
    parts = finest_partitions(ca, cb)
    q = [0] * ca.n
    for block_a, block_b in zip(parts.i_blocks, parts.j_blocks):
        for i, j in zip(block_a, block_b):
            q[i] = j
    return _build_change(ca, cb, q, parts)


def change_between_equivalent(
    ca: Union[Frame, Context], cb: Union[Frame, Context]
) -> ContextChange:
    """
    同値な2つの代表フレーム間の変更ユニタリ

    分割は1点ブロックで、同値性の証拠により α_i と対応する β_j を組にする。

    Raises:
        ValueError: 2つのコンテキストが同値ではない
    """
    ca, cb = _as_context(ca), _as_context(cb)
    witness = contexts_equivalent(ca, cb)
    if witness is None:
        raise ValueError(f"{ca.label} と {cb.label} は同値ではありません")
    q = [0] * ca.n
    for j, i in enumerate(witness.permutation):
        q[i] = j
    parts = PartitionPair(
        tuple((i,) for i in range(ca.n)),
        tuple((q[i],) for i in range(ca.n)),
    )
    return _build_change(ca, cb, q, parts)


def context_change(
    ca: Union[Frame, Context], cb: Union[Frame, Context]
) -> ContextChange:
    """同値性に応じて change_unitary か change_between_equivalent を使う"""
    if contexts_equivalent(ca, cb) is not None:
        return change_between_equivalent(ca, cb)
    return change_unitary(ca, cb)


def invariance_check(o: np.ndarray, ch: ContextChange) -> bool:
    """‖U O U† − O‖_max ≤ 1e−8·(1+‖O‖_max) か判定"""
    o = require_hermitian(o)
    if o.shape[0] != ch.n:
        raise DimensionMismatch(f"observable has dimension {o.shape[0]}, change {ch.n}")
    u = ch.unitary
    return max_norm(u @ o @ u.conj().T - o) <= STABILITY_TOL * (1.0 + max_norm(o))


def _match_permutation(images: np.ndarray, frame: Frame) -> Tuple[int, ...]:
    """像ベクトル (列) をフレームのベクトルに完全一致で対応付ける"""
    n = frame.n
    mapping = []
    for i in range(n):
        image = images[:, i]
        residuals = np.abs(frame.matrix - image[:, None]).max(axis=0)
        j = int(np.argmin(residuals))
        if residuals[j] > PERMUTATION_TOL:
            raise NotPermutation(
                f"image of vector {i} matches no frame vector "
                f"(residual {residuals[j]:.3e})"
            )
        mapping.append(j)
    if sorted(mapping) != list(range(n)):
        raise NotPermutation(f"images do not form a bijection: {mapping}")
    return tuple(mapping)


def s_permutation(
    ca: Union[Frame, Context],
    cb: Union[Frame, Context],
    cg: Union[Frame, Context],
) -> Tuple[int, ...]:
    """
    S = U†_{α→γ} U_{β→γ} U_{α→β} が α フレームに引き起こす置換 p

    S|α_i⟩ = |α_{p(i)}⟩ を位相を含めて完全一致で検証する。
    """
    ca, cb, cg = _as_context(ca), _as_context(cb), _as_context(cg)
    u_ab = change_unitary(ca, cb).unitary
    u_bg = change_unitary(cb, cg).unitary
    u_ag = change_unitary(ca, cg).unitary
    s = u_ag.conj().T @ u_bg @ u_ab
    return _match_permutation(s @ ca.representative.matrix, ca.representative)


@dataclass(frozen=True, eq=False)
class History:
    """コンテキスト変更の履歴 (隣り合うコンテキストは同値でない)"""

    contexts: Tuple[Context, ...]

    def __post_init__(self):
        contexts = tuple(_as_context(c) for c in self.contexts)
        if not contexts:
            raise ValueError("履歴には少なくとも1つのコンテキストが必要です")
        n = contexts[0].n
        for c in contexts:
            if c.n != n:
                raise DimensionMismatch(f"history mixes dimensions {n} and {c.n}")
        for prev, nxt in zip(contexts, contexts[1:]):
            if contexts_equivalent(prev, nxt) is not None:
                raise EquivalentContexts(
                    f"consecutive contexts {prev.label} and {nxt.label} are equivalent"
                )
        object.__setattr__(self, "contexts", contexts)

    @classmethod
    def of(cls, *contexts: Context) -> "History":
        return cls(tuple(contexts))

    def __len__(self) -> int:
        return len(self.contexts)

    @property
    def n(self) -> int:
        return self.contexts[0].n

    @property
    def base(self) -> Context:
        return self.contexts[0]

    @property
    def last(self) -> Context:
        return self.contexts[-1]

    @property
    def label(self) -> str:
        return "→".join(c.label for c in self.contexts)

    def extend(self, nxt: Context) -> "History":
        return History(self.contexts + (nxt,))

    def truncate(self) -> "History":
        return History(self.contexts[:-1])

    def changes(self) -> List[ContextChange]:
        return [change_unitary(a, b) for a, b in zip(self.contexts, self.contexts[1:])]


@dataclass(frozen=True, eq=False)
class HistoryReduction:
    """履歴の簡約結果"""

    change: ContextChange
    permutation: Tuple[int, ...]
    pullback_permutation: Tuple[int, ...]
    composed: np.ndarray


def reduce_history(h: History) -> HistoryReduction:
    """
    履歴を最初から最後へのコンテキスト変更と置換に簡約

    合成 C = U_{ζ→β}…U_{α→ξ} は α フレーム上で U_{α→β}∘p に等しい。
    また C†|β_i⟩ = |α_{p'(i)}⟩ となる逆向きの置換 p' も返す。
    最初と最後が同値な場合は change_between_equivalent を使う。
    """
    if len(h) < 2:
        raise ValueError("履歴の簡約には2つ以上のコンテキストが必要です")

    composed = np.eye(h.n, dtype=np.complex128)
    for ch in h.changes():
        composed = ch.unitary @ composed

    direct = context_change(h.base, h.last)
    base_frame = h.base.representative
    last_frame = h.last.representative

    permutation = _match_permutation(
        direct.unitary.conj().T @ composed @ base_frame.matrix, base_frame
    )
    pullback = _match_permutation(composed.conj().T @ last_frame.matrix, base_frame)
    composed.setflags(write=False)
    return HistoryReduction(direct, permutation, pullback, composed)


# ---------------------------------------------------------------------------
# シリアライズ (複素数は [re, im] の組)
# ---------------------------------------------------------------------------


def _encode_complex(z: complex) -> List[float]:
    return [float(z.real), float(z.imag)]


def _decode_complex(item: Any) -> complex:
    if isinstance(item, (int, float)) and not isinstance(item, bool):
        return complex(float(item), 0.0)
    if (
        isinstance(item, (list, tuple))
        and len(item) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in item)
    ):
        return complex(float(item[0]), float(item[1]))
    raise InvalidDocument(f"complex number must be [re, im], got {item!r}")


def encode_vector(v: np.ndarray) -> List[List[float]]:
    return [_encode_complex(z) for z in v]


def decode_vector(items: Any) -> np.ndarray:
    if not isinstance(items, list) or not items:
        raise InvalidDocument("vector must be a non-empty list of [re, im] pairs")
    return as_cvector([_decode_complex(z) for z in items])


def encode_matrix(m: np.ndarray) -> List[List[List[float]]]:
    return [encode_vector(row) for row in m]


def decode_matrix(rows: Any) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise InvalidDocument("matrix must be a non-empty list of rows")
    decoded = [decode_vector(r) for r in rows]
    if any(r.shape[0] != len(decoded) for r in decoded):
        raise InvalidDocument("matrix must be square")
    return np.vstack(decoded)


def frame_to_document(frame: Frame) -> Dict[str, Any]:
    """フレームをドキュメントに変換 ({"vectors": [[[re, im], ...], ...]})"""
    return {"vectors": [encode_vector(v) for v in frame.vectors]}


def frame_from_document(doc: Any) -> Frame:
    """ドキュメントからフレームを復元"""
    if not isinstance(doc, dict) or "vectors" not in doc:
        raise InvalidDocument("frame document must be an object with 'vectors'")
    vectors = doc["vectors"]
    if not isinstance(vectors, list) or not vectors:
        raise InvalidDocument("'vectors' must be a non-empty list")
    return Frame.from_vectors([decode_vector(v) for v in vectors])


def context_to_document(c: Context) -> Dict[str, Any]:
    doc = frame_to_document(c.representative)
    doc["id"] = c.id
    if c.name:
        doc["name"] = c.name
    return doc


def context_from_document(doc: Any) -> Context:
    frame = frame_from_document(doc)
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise InvalidDocument("'name' must be a string")
    return Context(frame, name)
