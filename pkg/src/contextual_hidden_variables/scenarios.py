"""
シナリオモジュール
2量子ビットの Peres の例と、2つのコンテキストで安定な縮退オブザーバブルの例を
組み立てて実行し、ボルン則と最も細かい共通分割のレポートを作成
"""

import json
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .config_manager import ScenarioConfig
from .context import Context, PartitionPair, finest_partitions, is_stable
from .ensemble import (
    VALUE_TOL,
    CheckReport,
    LabeledEnsemble,
    ModelConfig,
    SplittingVolumeReport,
    assign_value,
    check_gfunc,
    check_ntrns,
    ensemble_to_document,
    expectation_exact,
    expectation_mc,
    prepare,
    quantum_expectation,
    run_history,
    splitting_volume_check,
)
from .error_handler import AssertionFailure, GFuncViolation
from .i18n import MessageManager
from .linalg import apply_fn_spectral, max_norm, random_state
from .logger import Logger

BORN_TOL = 1e-9
MATRIX_TOL = 1e-9

# ---------------------------------------------------------------------------
# パウリ行列と2量子ビットのコンテキスト
# ---------------------------------------------------------------------------

IDENTITY_2 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

_S = 1.0 / np.sqrt(2.0)
X_PLUS = np.array([_S, _S], dtype=np.complex128)
X_MINUS = np.array([_S, -_S], dtype=np.complex128)
Y_PLUS = np.array([_S, 1j * _S], dtype=np.complex128)
Y_MINUS = np.array([_S, -1j * _S], dtype=np.complex128)
Z_PLUS = np.array([1, 0], dtype=np.complex128)
Z_MINUS = np.array([0, 1], dtype=np.complex128)

PERES_OBSERVABLES: Dict[str, np.ndarray] = {
    "σx⊗I": np.kron(SIGMA_X, IDENTITY_2),
    "I⊗σx": np.kron(IDENTITY_2, SIGMA_X),
    "σx⊗σx": np.kron(SIGMA_X, SIGMA_X),
    "σy⊗I": np.kron(SIGMA_Y, IDENTITY_2),
    "I⊗σy": np.kron(IDENTITY_2, SIGMA_Y),
    "σy⊗σy": np.kron(SIGMA_Y, SIGMA_Y),
    "σz⊗I": np.kron(SIGMA_Z, IDENTITY_2),
    "I⊗σz": np.kron(IDENTITY_2, SIGMA_Z),
    "σz⊗σz": np.kron(SIGMA_Z, SIGMA_Z),
    "σx⊗σy": np.kron(SIGMA_X, SIGMA_Y),
    "σy⊗σx": np.kron(SIGMA_Y, SIGMA_X),
}

PERES_CONTEXT_NAMES = ("α", "β", "γ", "δ", "ε", "ξ")

PERES_EXPECTED_STABILITY: Dict[str, Tuple[str, ...]] = {
    "σx⊗I": ("α", "δ"),
    "I⊗σx": ("α", "ε"),
    "σx⊗σx": ("α",),
    "σy⊗I": ("β", "ε"),
    "I⊗σy": ("β", "δ"),
    "σy⊗σy": ("β",),
    "σz⊗I": ("γ",),
    "I⊗σz": ("γ",),
    "σz⊗σz": ("γ", "ξ"),
    "σx⊗σy": ("δ", "ξ"),
    "σy⊗σx": ("ε", "ξ"),
}

# 反転しうるオブザーバブル (フラグ 0, 1 の順)
HYSTERESIS_OBSERVABLES = ("σx⊗I", "σy⊗I")
EXPECTED_HYSTERESIS_CAUSE: Dict[str, Tuple[str, ...]] = {
    "σx⊗I": ("ε",),
    "σy⊗I": ("δ",),
}


def product_frame(
    a_plus: np.ndarray, a_minus: np.ndarray, b_plus: np.ndarray, b_minus: np.ndarray
) -> List[np.ndarray]:
    """積フレーム (++, −−, +−, −+) の順"""
    return [
        np.kron(a_plus, b_plus),
        np.kron(a_minus, b_minus),
        np.kron(a_plus, b_minus),
        np.kron(a_minus, b_plus),
    ]


def peres_contexts() -> Tuple[Dict[str, Context], np.ndarray]:
    """
    Peres の例の6つのコンテキストと一重項状態

    Returns:
        Tuple[Dict[str, Context], np.ndarray]: (名前 → コンテキスト, 一重項)
    """
    zz = {
        "++": np.kron(Z_PLUS, Z_PLUS),
        "--": np.kron(Z_MINUS, Z_MINUS),
        "+-": np.kron(Z_PLUS, Z_MINUS),
        "-+": np.kron(Z_MINUS, Z_PLUS),
    }
    xi = [
        _S * (zz["++"] + 1j * zz["--"]),
        _S * (zz["++"] - 1j * zz["--"]),
        _S * (zz["+-"] + 1j * zz["-+"]),
        _S * (zz["+-"] - 1j * zz["-+"]),
    ]
    contexts = {
        "α": Context.from_vectors(product_frame(X_PLUS, X_MINUS, X_PLUS, X_MINUS), "α"),
        "β": Context.from_vectors(product_frame(Y_PLUS, Y_MINUS, Y_PLUS, Y_MINUS), "β"),
        "γ": Context.from_vectors(product_frame(Z_PLUS, Z_MINUS, Z_PLUS, Z_MINUS), "γ"),
        "δ": Context.from_vectors(product_frame(X_PLUS, X_MINUS, Y_PLUS, Y_MINUS), "δ"),
        "ε": Context.from_vectors(product_frame(Y_PLUS, Y_MINUS, X_PLUS, X_MINUS), "ε"),
        "ξ": Context.from_vectors(xi, "ξ"),
    }
    singlet = _S * (zz["+-"] - zz["-+"])
    return contexts, singlet


def peres_stability_table(
    contexts: Optional[Mapping[str, Context]] = None,
) -> Dict[str, Tuple[str, ...]]:
    """各オブザーバブルを安定にするコンテキスト名 (α … ξ の順)"""
    if contexts is None:
        contexts, _ = peres_contexts()
    return {
        name: tuple(c for c in PERES_CONTEXT_NAMES if is_stable(o, contexts[c]))
        for name, o in PERES_OBSERVABLES.items()
    }


def noncontextual_product(v_x: np.ndarray, v_y: np.ndarray) -> np.ndarray:
    """
    非文脈的な値の割り当てでの4因子の積 v(σx⊗I)² v(σy⊗I)²

    各オブザーバブルが経路によらず1つの値を持つので常に +1。
    """
    v_x = np.rint(np.asarray(v_x, dtype=np.float64))
    v_y = np.rint(np.asarray(v_y, dtype=np.float64))
    return np.rint(v_x * v_y * v_y * v_x).astype(np.int64)


def _as_signs(values: np.ndarray) -> np.ndarray:
    return np.rint(values).astype(np.int64)


def _value_counts(values: np.ndarray) -> Dict[str, int]:
    keys, counts = np.unique(np.rint(values).astype(np.int64), return_counts=True)
    return {str(int(k)): int(c) for k, c in zip(keys, counts)}


def _step(
    proposition: str,
    observable: str,
    history: str,
    bad: np.ndarray,
) -> Dict[str, Any]:
    """サンプルごとの比較結果を検証ステップの辞書にまとめる"""
    report = CheckReport(
        proposition=proposition,
        samples=int(bad.shape[0]),
        violations=int(bad.sum()),
        first_violation=int(np.flatnonzero(bad)[0]) if bad.any() else None,
    )
    step = report.to_dict()
    step.update({"observable": observable, "history": history})
    return step


def _require(
    step: Dict[str, Any], error_cls: type = AssertionFailure
) -> Dict[str, Any]:
    if not step["passed"]:
        raise error_cls(
            f"{step['proposition']} failed for {step['observable']} on "
            f"{step['history']}: {step['violations']} sample(s)",
            proposition=step["proposition"],
            sample_index=step["first_violation"],
        )
    return step


def _mismatch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.abs(a - b) > VALUE_TOL


# ---------------------------------------------------------------------------
# Peres の例
# ---------------------------------------------------------------------------


@dataclass
class PeresReport:
    """Peres シナリオの結果"""

    epsilon: float
    seed: int
    samples: int
    product_value: int
    noncontextual_product: int
    contradiction_verified: bool
    per_history_values: Dict[str, Dict[str, np.ndarray]]
    hysteresis_flags: np.ndarray
    stability_table: Dict[str, Tuple[str, ...]]
    hysteresis_cause: Dict[str, Tuple[str, ...]]
    checks: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def hysteresis_counts(self) -> Dict[str, int]:
        """反転したオブザーバブルごとのサンプル数"""
        return {
            name: int(np.sum(self.hysteresis_flags == k))
            for k, name in enumerate(HYSTERESIS_OBSERVABLES)
        }

    def to_dict(self, include_samples: bool = False) -> Dict[str, Any]:
        histories: Dict[str, Any] = {}
        for label, values in self.per_history_values.items():
            entry: Dict[str, Any] = {}
            for name, v in values.items():
                item: Dict[str, Any] = {"counts": _value_counts(v)}
                if include_samples:
                    item["values"] = _as_signs(v).tolist()
                entry[name] = item
            histories[label] = entry

        hysteresis: Dict[str, Any] = {"counts": self.hysteresis_counts}
        if include_samples:
            hysteresis["flags"] = [
                HYSTERESIS_OBSERVABLES[k] for k in self.hysteresis_flags.tolist()
            ]

        return {
            "scenario": "peres",
            "parameters": {
                "epsilon": self.epsilon,
                "seed": self.seed,
                "samples": self.samples,
            },
            "product_value": self.product_value,
            "noncontextual_product": self.noncontextual_product,
            "contradiction_verified": self.contradiction_verified,
            "histories": histories,
            "hysteresis": hysteresis,
            "hysteresis_cause": {k: list(v) for k, v in self.hysteresis_cause.items()},
            "stability_table": {k: list(v) for k, v in self.stability_table.items()},
            "checks": self.checks,
        }


@dataclass
class PeresEnsembles:
    """一重項と共通サンプルから派生した Peres の各履歴のアンサンブル"""

    xi: LabeledEnsemble
    xi_gamma: LabeledEnsemble
    xi_delta: LabeledEnsemble
    xi_delta_alpha: LabeledEnsemble
    xi_delta_beta: LabeledEnsemble
    xi_epsilon: LabeledEnsemble
    xi_epsilon_beta: LabeledEnsemble
    xi_epsilon_alpha: LabeledEnsemble

    def final_histories(self) -> List[LabeledEnsemble]:
        return [
            self.xi,
            self.xi_gamma,
            self.xi_delta_alpha,
            self.xi_delta_beta,
            self.xi_epsilon_beta,
            self.xi_epsilon_alpha,
        ]


def peres_ensembles(epsilon: float, seed: int, n_samples: int) -> PeresEnsembles:
    """ξ から始まる6つの履歴 (と途中の δ, ε) のアンサンブル"""
    contexts, singlet = peres_contexts()
    model = ModelConfig(singlet, epsilon, contexts["ξ"], seed, n_samples)
    le_xi = prepare(model)
    le_delta = le_xi.extend(contexts["δ"])
    le_epsilon = le_xi.extend(contexts["ε"])
    return PeresEnsembles(
        xi=le_xi,
        xi_gamma=le_xi.extend(contexts["γ"]),
        xi_delta=le_delta,
        xi_delta_alpha=le_delta.extend(contexts["α"]),
        xi_delta_beta=le_delta.extend(contexts["β"]),
        xi_epsilon=le_epsilon,
        xi_epsilon_beta=le_epsilon.extend(contexts["β"]),
        xi_epsilon_alpha=le_epsilon.extend(contexts["α"]),
    )


def run_peres(cfg: ScenarioConfig) -> PeresReport:
    """
    Peres の例を実行し、全サンプルで各命題を検証

    Raises:
        AssertionFailure: 検証に失敗 (起きてはならない)
        GFuncViolation: 積の準同型が成り立たない
        NTrnsViolation: 安定なオブザーバブルの値が履歴の延長で変わる
    """
    contexts, _ = peres_contexts()
    obs = PERES_OBSERVABLES
    checks: List[Dict[str, Any]] = []

    table = peres_stability_table(contexts)
    if table != PERES_EXPECTED_STABILITY:
        raise AssertionFailure(
            f"stability table differs: {table}", proposition="stability"
        )

    product = obs["σx⊗σy"] @ obs["σy⊗σx"]
    if max_norm(product - obs["σz⊗σz"]) > MATRIX_TOL:
        raise AssertionFailure(
            "(σx⊗σy)(σy⊗σx) is not σz⊗σz", proposition="product"
        )

    ens = peres_ensembles(cfg.epsilon, cfg.seed, cfg.n_samples)

    # n-TRNS: 両方のコンテキストで安定なオブザーバブル
    chain = [
        ("σx⊗σy", ens.xi, ens.xi_delta),
        ("σx⊗I", ens.xi_delta, ens.xi_delta_alpha),
        ("I⊗σy", ens.xi_delta, ens.xi_delta_beta),
        ("σy⊗σx", ens.xi, ens.xi_epsilon),
        ("σy⊗I", ens.xi_epsilon, ens.xi_epsilon_beta),
        ("I⊗σx", ens.xi_epsilon, ens.xi_epsilon_alpha),
        ("σz⊗σz", ens.xi, ens.xi_gamma),
    ]
    for name, before, after in chain:
        step = check_ntrns(before, after, obs[name]).to_dict()
        step.update({"observable": name, "history": after.history.label})
        checks.append(step)

    # gFUNC: 可換な組の積
    v = {name: assign_value(ens.xi, obs[name]) for name in ("σx⊗σy", "σy⊗σx", "σz⊗σz")}
    checks.append(
        _require(
            _step(
                "gFUNC",
                "σz⊗σz",
                ens.xi.history.label,
                _mismatch(v["σx⊗σy"] * v["σy⊗σx"], v["σz⊗σz"]),
            ),
            GFuncViolation,
        )
    )
    for le, whole, left, right in (
        (ens.xi_delta, "σx⊗σy", "σx⊗I", "I⊗σy"),
        (ens.xi_epsilon, "σy⊗σx", "σy⊗I", "I⊗σx"),
    ):
        lhs = assign_value(le, obs[whole])
        rhs = assign_value(le, obs[left]) * assign_value(le, obs[right])
        checks.append(
            _require(
                _step("gFUNC", whole, le.history.label, _mismatch(lhs, rhs)),
                GFuncViolation,
            )
        )

    # a-CRL: 一重項の完全な反相関
    for le, first, second in (
        (ens.xi_gamma, "σz⊗I", "I⊗σz"),
        (ens.xi_delta_alpha, "σx⊗I", "I⊗σx"),
        (ens.xi_epsilon_alpha, "σx⊗I", "I⊗σx"),
        (ens.xi_delta_beta, "σy⊗I", "I⊗σy"),
        (ens.xi_epsilon_beta, "σy⊗I", "I⊗σy"),
    ):
        lhs = assign_value(le, obs[first])
        rhs = -assign_value(le, obs[second])
        checks.append(
            _require(
                _step(
                    "a-CRL",
                    f"{first},{second}",
                    le.history.label,
                    _mismatch(lhs, rhs),
                )
            )
        )

    product_values = _as_signs(v["σx⊗σy"] * v["σy⊗σx"])
    checks.append(
        _require(
            _step("product", "σz⊗σz", ens.xi.history.label, product_values != -1)
        )
    )

    # 4つの因子 (ξ→δ→α, ξ→δ→β, ξ→ε→β, ξ→ε→α)
    a = _as_signs(assign_value(ens.xi_delta_alpha, obs["σx⊗I"]))
    b = _as_signs(assign_value(ens.xi_delta_beta, obs["σy⊗I"]))
    c = _as_signs(assign_value(ens.xi_epsilon_beta, obs["σy⊗I"]))
    d = _as_signs(assign_value(ens.xi_epsilon_alpha, obs["σx⊗I"]))

    checks.append(
        _require(
            _step(
                "chain",
                "σx⊗σy",
                ens.xi_delta.history.label,
                _as_signs(v["σx⊗σy"]) != -a * b,
            )
        )
    )
    checks.append(
        _require(
            _step(
                "chain",
                "σy⊗σx",
                ens.xi_epsilon.history.label,
                _as_signs(v["σy⊗σx"]) != -c * d,
            )
        )
    )
    checks.append(
        _require(_step("hysteresis", "σx⊗I,σy⊗I", "ξ→δ|ε→α|β", a * b * c * d != -1))
    )
    # 4つの ±1 の和が ±2 なら、ちょうど1つの因子だけ符号が異なる
    checks.append(
        _require(
            _step(
                "exactly-one-flip",
                "σx⊗I,σy⊗I",
                "ξ→δ|ε→α|β",
                np.abs(a + b + c + d) != 2,
            )
        )
    )

    x_flip = a != d
    y_flip = b != c
    checks.append(
        _require(_step("one-pair", "σx⊗I,σy⊗I", "ξ→δ|ε→α|β", x_flip == y_flip))
    )
    flags = np.where(x_flip, 0, 1).astype(np.int64)

    nc = noncontextual_product(a, b)
    if np.any(nc != 1):
        raise AssertionFailure(
            "noncontextual product is not +1", proposition="noncontextual"
        )
    product_value = int(product_values[0])
    noncontextual = int(nc[0])

    # 反転したオブザーバブルを安定にしない経路上のコンテキスト
    cause = {
        name: tuple(
            label for label in ("δ", "ε") if not is_stable(obs[name], contexts[label])
        )
        for name in HYSTERESIS_OBSERVABLES
    }
    if cause != EXPECTED_HYSTERESIS_CAUSE:
        raise AssertionFailure(
            f"unexpected hysteresis cause: {cause}", proposition="stability"
        )

    per_history = {
        ens.xi.history.label: v,
        ens.xi_gamma.history.label: {
            name: assign_value(ens.xi_gamma, obs[name])
            for name in ("σz⊗σz", "σz⊗I", "I⊗σz")
        },
    }
    for le in (
        ens.xi_delta_alpha,
        ens.xi_epsilon_alpha,
    ):
        per_history[le.history.label] = {
            name: assign_value(le, obs[name]) for name in ("σx⊗I", "I⊗σx")
        }
    for le in (
        ens.xi_delta_beta,
        ens.xi_epsilon_beta,
    ):
        per_history[le.history.label] = {
            name: assign_value(le, obs[name]) for name in ("σy⊗I", "I⊗σy")
        }

    return PeresReport(
        epsilon=cfg.epsilon,
        seed=cfg.seed,
        samples=cfg.n_samples,
        product_value=product_value,
        noncontextual_product=noncontextual,
        contradiction_verified=product_value == -1 and noncontextual == 1,
        per_history_values=per_history,
        hysteresis_flags=flags,
        stability_table=table,
        hysteresis_cause=cause,
        checks=checks,
    )


# ---------------------------------------------------------------------------
# 縮退オブザーバブルの例
# ---------------------------------------------------------------------------

REMARK_B = np.diag([1.0, 2.0, 3.0]).astype(np.complex128)
REMARK_C = np.array(
    [[1.5, -0.5, 0.0], [-0.5, 1.5, 0.0], [0.0, 0.0, 3.0]], dtype=np.complex128
)
REMARK_A = np.diag([2.0, 2.0, 3.0]).astype(np.complex128)
REMARK_F = {1.0: 2.0, 2.0: 2.0, 3.0: 3.0}
REMARK_G = {1.0: 2.0, 2.0: 2.0, 3.0: 3.0}


def remark_contexts() -> Tuple[Context, Context]:
    """B̂ と Ĉ の固有フレーム"""
    ctx_b = Context.from_vectors(np.eye(3), "B")
    ctx_c = Context.from_vectors(
        [[_S, _S, 0.0], [_S, -_S, 0.0], [0.0, 0.0, 1.0]], "C"
    )
    return ctx_b, ctx_c


def remark_state(seed: int) -> np.ndarray:
    """シードから派生した乱数列によるランダムな状態"""
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
    return random_state(3, rng)


@dataclass
class RemarkReport:
    """縮退オブザーバブルのシナリオの結果"""

    epsilon: float
    seed: int
    samples: int
    a_matrix: np.ndarray
    f_of_b_matches: bool
    g_of_c_matches: bool
    stable_in: Tuple[str, ...]
    partitions: PartitionPair
    per_history_values: Dict[str, np.ndarray]
    route_consistent: bool
    expectation: float
    quantum: float
    checks: List[CheckReport] = field(default_factory=list)

    def to_dict(self, include_samples: bool = False) -> Dict[str, Any]:
        histories: Dict[str, Any] = {}
        for label, values in self.per_history_values.items():
            item: Dict[str, Any] = {"counts": _value_counts(values)}
            if include_samples:
                item["values"] = _as_signs(values).tolist()
            histories[label] = item
        return {
            "scenario": "remark",
            "parameters": {
                "epsilon": self.epsilon,
                "seed": self.seed,
                "samples": self.samples,
            },
            "a_diagonal": [float(x) for x in np.real(np.diag(self.a_matrix))],
            "f_of_b_matches": self.f_of_b_matches,
            "g_of_c_matches": self.g_of_c_matches,
            "stable_in": list(self.stable_in),
            "partitions": self.partitions.to_dict(),
            "histories": histories,
            "route_consistent": self.route_consistent,
            "expectation_exact": self.expectation,
            "expectation_quantum": self.quantum,
            "checks": [c.to_dict() for c in self.checks],
        }


def run_remark(cfg: ScenarioConfig) -> RemarkReport:
    """
    Â = f(B̂) = g(Ĉ) の値が B→C と C→B のどちらの順でも一致することを検証

    Raises:
        AssertionFailure: 検証に失敗 (起きてはならない)
    """
    ctx_b, ctx_c = remark_contexts()
    a_from_b = apply_fn_spectral(REMARK_B, REMARK_F)
    a_from_c = apply_fn_spectral(REMARK_C, REMARK_G)
    f_ok = max_norm(a_from_b - REMARK_A) <= MATRIX_TOL
    g_ok = max_norm(a_from_c - REMARK_A) <= MATRIX_TOL
    if not (f_ok and g_ok):
        raise AssertionFailure("f(B) and g(C) do not both equal A", proposition="gFUNC")

    stable_in = tuple(c.label for c in (ctx_b, ctx_c) if is_stable(REMARK_A, c))
    if stable_in != ("B", "C"):
        raise AssertionFailure(
            f"A is stable only in {stable_in}", proposition="stability"
        )

    parts = finest_partitions(ctx_b, ctx_c)

    state = remark_state(cfg.seed)
    le_b = prepare(ModelConfig(state, cfg.epsilon, ctx_b, cfg.seed, cfg.n_samples))
    le_c = prepare(ModelConfig(state, cfg.epsilon, ctx_c, cfg.seed, cfg.n_samples))
    le_bc = le_b.extend(ctx_c)
    le_cb = le_c.extend(ctx_b)

    checks = [
        check_ntrns(le_b, le_bc, REMARK_A),
        check_ntrns(le_c, le_cb, REMARK_A),
        check_gfunc(le_b, REMARK_B, REMARK_F),
        check_gfunc(le_bc, REMARK_C, REMARK_G),
        check_gfunc(le_c, REMARK_C, REMARK_G),
        check_gfunc(le_cb, REMARK_B, REMARK_F),
    ]

    v_bc = assign_value(le_bc, REMARK_A)
    v_cb = assign_value(le_cb, REMARK_A)
    bad = _mismatch(v_bc, v_cb)
    if bad.any():
        raise AssertionFailure(
            f"value of A depends on the visiting order on {int(bad.sum())} sample(s)",
            proposition="route",
            sample_index=int(np.flatnonzero(bad)[0]),
        )

    exact = expectation_exact(le_bc, REMARK_A)
    quantum = quantum_expectation(state, REMARK_A)
    if abs(exact - quantum) > BORN_TOL:
        raise AssertionFailure(
            f"exact expectation {exact!r} differs from {quantum!r}", proposition="Born"
        )

    return RemarkReport(
        epsilon=cfg.epsilon,
        seed=cfg.seed,
        samples=cfg.n_samples,
        a_matrix=REMARK_A,
        f_of_b_matches=f_ok,
        g_of_c_matches=g_ok,
        stable_in=stable_in,
        partitions=parts,
        per_history_values={
            le_bc.history.label: v_bc,
            le_cb.history.label: v_cb,
        },
        route_consistent=True,
        expectation=exact,
        quantum=quantum,
        checks=checks,
    )


# ---------------------------------------------------------------------------
# ボルン則と最も細かい共通分割
# ---------------------------------------------------------------------------


@dataclass
class BornReport:
    """任意の状態・履歴・観測量に対するボルン則の検証結果"""

    history: str
    exact: float
    quantum: float
    mc_estimate: float
    standard_error: float
    splitting: SplittingVolumeReport
    ensemble: LabeledEnsemble

    @property
    def residual(self) -> float:
        return abs(self.exact - self.quantum)

    @property
    def within_5se(self) -> bool:
        bound = 5.0 * self.standard_error + BORN_TOL
        return abs(self.mc_estimate - self.exact) <= bound

    @property
    def passed(self) -> bool:
        return self.residual <= BORN_TOL and self.splitting.passed

    def to_dict(self, include_samples: bool = False) -> Dict[str, Any]:
        return {
            "scenario": "born",
            "history": self.history,
            "expectation_exact": self.exact,
            "expectation_quantum": self.quantum,
            "residual": self.residual,
            "mc_estimate": self.mc_estimate,
            "standard_error": self.standard_error,
            "within_5se": self.within_5se,
            "splitting": self.splitting.to_dict(),
            "passed": self.passed,
            "ensemble": ensemble_to_document(self.ensemble, include_samples),
        }


def run_born(
    cfg: ScenarioConfig,
    state: np.ndarray,
    contexts: Sequence[Context],
    observable: np.ndarray,
) -> BornReport:
    """
    履歴を辿ったアンサンブルで期待値が ⟨φ|O|φ⟩ に一致することを検証

    Raises:
        NotStable: O が最後のコンテキストで安定ではない
        AssertionFailure: 厳密な期待値が一致しない
    """
    model = ModelConfig(state, cfg.epsilon, contexts[0], cfg.seed, cfg.n_samples)
    le = run_history(model, contexts)
    exact = expectation_exact(le, observable)
    quantum = quantum_expectation(le.config.state, observable)
    mc, se = expectation_mc(le, observable)
    report = BornReport(
        history=le.history.label,
        exact=exact,
        quantum=quantum,
        mc_estimate=mc,
        standard_error=se,
        splitting=splitting_volume_check(le),
        ensemble=le,
    )
    if not report.passed:
        raise AssertionFailure(
            f"Born rule not reproduced on {report.history}: "
            f"residual {report.residual:.3e}",
            proposition="Born",
        )
    return report


@dataclass
class PartitionsReport:
    """2つのフレームの最も細かい共通分割"""

    source: str
    target: str
    partitions: PartitionPair

    def to_dict(self, include_samples: bool = False) -> Dict[str, Any]:
        doc = {"scenario": "partitions", "source": self.source, "target": self.target}
        doc.update(self.partitions.to_dict())
        return doc


def run_partitions(ca: Context, cb: Context) -> PartitionsReport:
    """
    Raises:
        EquivalentContexts: 2つのコンテキストが同値
        SpanMismatch: 数値的に分割が求まらない
    """
    return PartitionsReport(ca.label, cb.label, finest_partitions(ca, cb))


# ---------------------------------------------------------------------------
# 実行とレポートの出力
# ---------------------------------------------------------------------------


class ScenarioRunner:
    """シナリオの実行、ログ記録、レポート整形"""

    def __init__(
        self,
        verbose: bool = False,
        logger: Optional[Logger] = None,
        msg: Optional[MessageManager] = None,
    ):
        self.verbose = verbose
        self.logger = logger or Logger(verbose=verbose, log_to_file=False)
        self.msg = msg or self.logger.msg

    def _log(self, message: str) -> None:
        """ログ出力（詳細モード時のみ、標準エラー出力）"""
        if self.verbose:
            print(f"[シナリオ] {message}", file=sys.stderr)

    def _start(self, cfg: ScenarioConfig) -> None:
        self._log(self.msg.get("scenario_start", scenario=cfg.scenario))
        self._log(
            self.msg.get(
                "run_parameters",
                epsilon=cfg.epsilon,
                samples=cfg.n_samples,
                seed=cfg.seed,
            )
        )
        self.logger.log_run_start(
            cfg.scenario,
            {"epsilon": cfg.epsilon, "samples": cfg.n_samples, "seed": cfg.seed},
        )

    def run_peres(self, cfg: ScenarioConfig) -> PeresReport:
        self._start(cfg)
        report = run_peres(cfg)
        self.logger.log_peres_report(report)
        return report

    def run_remark(self, cfg: ScenarioConfig) -> RemarkReport:
        self._start(cfg)
        report = run_remark(cfg)
        self.logger.log_remark_report(report)
        return report

    def run_born(
        self,
        cfg: ScenarioConfig,
        state: np.ndarray,
        contexts: Sequence[Context],
        observable: np.ndarray,
    ) -> BornReport:
        self._start(cfg)
        report = run_born(cfg, state, contexts, observable)
        self.logger.log_born_result(report)
        return report

    def run_partitions(self, ca: Context, cb: Context) -> PartitionsReport:
        self._log(self.msg.get("scenario_start", scenario="partitions"))
        report = run_partitions(ca, cb)
        self.logger.log_partitions(report.source, report.target, report.partitions)
        return report

    def render(
        self, report: Any, output_format: str = "json", include_samples: bool = False
    ) -> str:
        """レポートを JSON (キー順固定) または表形式の文字列に変換"""
        if output_format == "json":
            doc = report.to_dict(include_samples)
            return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
        if isinstance(report, PeresReport):
            lines = self._peres_table(report)
        elif isinstance(report, RemarkReport):
            lines = self._remark_table(report)
        elif isinstance(report, BornReport):
            lines = self._born_table(report)
        elif isinstance(report, PartitionsReport):
            lines = self._partitions_table(report)
        else:
            raise TypeError(f"no table layout for {type(report).__name__}")
        return "\n".join(lines) + "\n"

    def _yes_no(self, flag: bool) -> str:
        return self.msg.get("yes") if flag else self.msg.get("no")

    def _row(self, key: str, value: Any) -> str:
        return f"{self.msg.get(key):<40} {value}"

    def _header(self, title_key: str, report: Any) -> List[str]:
        title = self.msg.get(title_key)
        lines = [title, "=" * max(len(title), 40)]
        if hasattr(report, "epsilon"):
            lines.append(
                self.msg.get(
                    "table_parameters",
                    epsilon=report.epsilon,
                    samples=report.samples,
                    seed=report.seed,
                )
            )
        return lines

    def _peres_table(self, report: PeresReport) -> List[str]:
        lines = self._header("table_peres_title", report)
        lines.append(self._row("table_product_value", f"{report.product_value:+d}"))
        lines.append(
            self._row(
                "table_noncontextual_product", f"{report.noncontextual_product:+d}"
            )
        )
        lines.append(
            self._row(
                "table_contradiction", self._yes_no(report.contradiction_verified)
            )
        )
        lines.append("")
        lines.append(self.msg.get("table_hysteresis"))
        unstable_in = self.msg.get("table_unstable_in")
        for name, count in report.hysteresis_counts.items():
            cause = ", ".join(report.hysteresis_cause[name])
            lines.append(f"  {name:<8} {count:>8}   ({unstable_in} {cause})")
        lines.append("")
        lines.append(self.msg.get("table_history_values"))
        for label, values in report.per_history_values.items():
            for name, v in values.items():
                counts = _value_counts(v)
                lines.append(
                    f"  {label:<10} {name:<8} "
                    f"+1: {counts.get('1', 0):>8}  -1: {counts.get('-1', 0):>8}"
                )
        lines.append("")
        lines.append(self.msg.get("table_stability"))
        for name, names in report.stability_table.items():
            lines.append(f"  {name:<8} {' '.join(names)}")
        return lines

    def _remark_table(self, report: RemarkReport) -> List[str]:
        lines = self._header("table_remark_title", report)
        diag = ", ".join(f"{x:g}" for x in np.real(np.diag(report.a_matrix)))
        blocks = " ".join(self.msg.block(b) for b in report.partitions.i_blocks)
        lines.append(f"A = diag({diag})")
        lines.append(self._row("table_stability", " ".join(report.stable_in)))
        lines.append(self._row("table_blocks", blocks))
        lines.append(
            self._row("table_route_consistent", self._yes_no(report.route_consistent))
        )
        lines.append(self._row("table_expectation_exact", f"{report.expectation:.12f}"))
        lines.append(self._row("table_expectation_quantum", f"{report.quantum:.12f}"))
        lines.append("")
        lines.append(self.msg.get("table_history_values"))
        for label, values in report.per_history_values.items():
            counts = "  ".join(f"{k}: {v}" for k, v in _value_counts(values).items())
            lines.append(f"  {label:<10} {counts}")
        return lines

    def _born_table(self, report: BornReport) -> List[str]:
        lines = self._header("table_born_title", report)
        lines.append(report.history)
        lines.append(self._row("table_expectation_exact", f"{report.exact:.12f}"))
        lines.append(self._row("table_expectation_quantum", f"{report.quantum:.12f}"))
        lines.append(
            self._row(
                "table_expectation_mc",
                f"{report.mc_estimate:.6f} ± {report.standard_error:.6f}",
            )
        )
        return lines

    def _partitions_table(self, report: PartitionsReport) -> List[str]:
        lines = self._header("table_partitions_title", report)
        lines.append(f"{report.source} / {report.target}")
        lines.append(self._row("table_block_count", report.partitions.m))
        lines.append(self.msg.get("table_blocks"))
        for ib, jb in zip(report.partitions.i_blocks, report.partitions.j_blocks):
            lines.append(f"  {self.msg.block(ib)} ↔ {self.msg.block(jb)}")
        return lines
