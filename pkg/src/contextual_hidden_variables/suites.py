"""
チェックスイートモジュール
ランダムな状態・履歴・観測量で各命題を繰り返し検証する
"""

import itertools
import json
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .context import (
    Context,
    Frame,
    History,
    PartitionPair,
    contexts_equivalent,
    finest_partitions,
    reduce_history,
)
from .ensemble import (
    VALUE_TOL,
    LabeledEnsemble,
    ModelConfig,
    assign_value,
    assign_value_pullback,
    check_gfunc,
    check_ntrns,
    expectation_exact,
    expectation_mc,
    prepare,
    quantum_expectation,
    run_history,
    splitting_volume_check,
)
from .error_handler import ContextualHVError
from .i18n import MessageManager
from .linalg import diagonal_in, random_state, random_unitary
from .logger import Logger
from .phase_space import symplectic_volume_check
from .scenarios import (
    PERES_OBSERVABLES,
    REMARK_A,
    peres_contexts,
    peres_ensembles,
    remark_contexts,
    remark_state,
)

SUITE_ORDER = (
    "born",
    "gfunc",
    "ntrns",
    "symplectic",
    "partitions",
    "reduction",
    "dualpath",
)

BORN_TOL = 1e-9
PROJECTOR_TOL = 1e-7
TRIAL_EPSILON = 0.3
BORN_SAMPLES = 10000
TRIAL_SAMPLES = 2000
DUALPATH_SAMPLES = 5000
MAX_DEPTH = 5
MAX_REDUCTION_DEPTH = 6
MAX_SYMPLECTIC_N = 8


@dataclass
class SuiteResult:
    """チェックスイートの結果クラス"""

    suite: str
    trials: int
    passed: int = 0
    failures: List[Dict[str, Any]] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def failed(self) -> int:
        return self.trials - self.passed

    @property
    def success(self) -> bool:
        return self.failed == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "trials": self.trials,
            "passed": self.passed,
            "failed": self.failed,
            "failures": self.failures,
            "details": self.details,
        }


# ---------------------------------------------------------------------------
# ランダムなコンテキストと履歴
# ---------------------------------------------------------------------------


def random_block_partition(n: int, rng: np.random.Generator) -> List[List[int]]:
    """
    {0..n-1} のランダムな集合分割

    n ≥ 2 なら大きさ2以上のブロックを少なくとも1つ含む。
    """
    while True:
        order = rng.permutation(n).tolist()
        cuts = sorted(int(k) for k in np.flatnonzero(rng.random(n - 1) < 0.5) + 1)
        blocks = [sorted(order[a:b]) for a, b in zip([0] + cuts, cuts + [n])]
        if n < 2 or any(len(b) > 1 for b in blocks):
            return blocks


def random_neighbor(
    c: Context, rng: np.random.Generator, name: Optional[str] = None
) -> Context:
    """
    c とブロック構造を共有するランダムなコンテキスト

    ランダムな分割の各ブロック内でフレームをユニタリで混ぜ、最後に添字を並べ替える。
    """
    n = c.n
    while True:
        blocks = random_block_partition(n, rng)
        matrix = c.representative.matrix.copy()
        for block in blocks:
            matrix[:, block] = matrix[:, block] @ random_unitary(len(block), rng)
        matrix = matrix[:, rng.permutation(n)]
        nxt = Context(Frame(matrix), name)
        if contexts_equivalent(c, nxt) is None:
            return nxt


def random_history(
    n: int, depth: int, rng: np.random.Generator
) -> Tuple[List[Context], np.ndarray]:
    """
    ランダムな基底コンテキストから depth 回の変更を行う履歴とランダムな状態

    隣り合うコンテキストは非自明な共通分割を持つ。
    """
    base = Context(Frame(random_unitary(n, rng)), "c0")
    contexts = [base]
    for k in range(depth):
        contexts.append(random_neighbor(contexts[-1], rng, f"c{k + 1}"))
    return contexts, random_state(n, rng)


def random_integer_values(n: int, rng: np.random.Generator) -> np.ndarray:
    """縮退を含みやすい小さな整数の固有値"""
    return rng.integers(-2, 3, size=n).astype(np.float64)


def _set_partitions(items: Sequence[int]) -> Iterator[List[List[int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], list(items[1:])
    for partition in _set_partitions(rest):
        for k in range(len(partition)):
            yield partition[:k] + [[first] + partition[k]] + partition[k + 1 :]
        yield [[first]] + partition


def brute_force_partitions(a: Frame, b: Frame) -> PartitionPair:
    """
    最も細かい共通分割を総当たりで求める

    α 添字の全ての集合分割について、各ブロックと同じ部分空間を張る β 添字の集合を
    全ての部分集合から探し、成立するもののうちブロック数が最大のものを返す。
    """
    n = a.n
    subsets: Dict[int, List[Tuple[int, ...]]] = {
        k: list(itertools.combinations(range(n), k)) for k in range(1, n + 1)
    }
    best: Optional[List[Tuple[Tuple[int, ...], Tuple[int, ...]]]] = None
    for partition in _set_partitions(list(range(n))):
        if best is not None and len(partition) <= len(best):
            continue
        pairs = []
        used: set = set()
        for block in partition:
            block = tuple(sorted(block))
            proj = a.projector(block)
            match = None
            for cand in subsets[len(block)]:
                if used.intersection(cand):
                    continue
                if np.max(np.abs(proj - b.projector(cand))) <= PROJECTOR_TOL:
                    match = cand
                    break
            if match is None:
                break
            used.update(match)
            pairs.append((block, match))
        else:
            best = pairs
    assert best is not None
    best.sort(key=lambda p: p[0][0])
    return PartitionPair(tuple(p[0] for p in best), tuple(p[1] for p in best))


# ---------------------------------------------------------------------------
# スイート
# ---------------------------------------------------------------------------


class CheckSuiteRunner:
    """ランダム化チェックスイートの実行クラス"""

    def __init__(
        self,
        seed: int = 42,
        trials: int = 20,
        verbose: bool = False,
        logger: Optional[Logger] = None,
        msg: Optional[MessageManager] = None,
    ):
        self.seed = seed
        self.trials = trials
        self.verbose = verbose
        self.logger = logger or Logger(verbose=verbose, log_to_file=False)
        self.msg = msg or self.logger.msg
        self.results: List[SuiteResult] = []

    def _log(self, message: str) -> None:
        """ログ出力（詳細モード時のみ、標準エラー出力）"""
        if self.verbose:
            print(f"[チェック] {message}", file=sys.stderr)

    def _rng(self, suite: str) -> np.random.Generator:
        """スイートごとに独立した乱数列 (実行するスイートの組み合わせに依存しない)"""
        children = np.random.SeedSequence(self.seed).spawn(len(SUITE_ORDER))
        return np.random.default_rng(children[SUITE_ORDER.index(suite)])

    def _run_trials(
        self, suite: str, trial: Callable[[int, np.random.Generator], Dict[str, Any]]
    ) -> SuiteResult:
        """各試行を実行し、例外や不合格を失敗として記録"""
        rng = self._rng(suite)
        result = SuiteResult(suite, self.trials)
        worst: Dict[str, float] = {}
        for k in range(self.trials):
            try:
                outcome = trial(k, rng)
            except ContextualHVError as e:
                result.failures.append(
                    {"trial": k, "error": e.code, "message": str(e)}
                )
                continue
            for key, value in outcome.get("metrics", {}).items():
                worst[key] = max(worst.get(key, 0.0), float(value))
            if outcome["passed"]:
                result.passed += 1
            else:
                result.failures.append({"trial": k, "message": outcome["message"]})
        result.details = {f"max_{key}": value for key, value in sorted(worst.items())}
        return result

    def suite_born(self) -> SuiteResult:
        """ランダムな状態・履歴・安定な観測量でボルン則の再現を検証"""

        def trial(k: int, rng: np.random.Generator) -> Dict[str, Any]:
            n = int(rng.integers(2, 5))
            depth = int(rng.integers(0, MAX_DEPTH + 1))
            contexts, state = random_history(n, depth, rng)
            model = ModelConfig(
                state,
                TRIAL_EPSILON,
                contexts[0],
                int(rng.integers(2**32)),
                BORN_SAMPLES,
            )
            le = run_history(model, contexts)
            o = diagonal_in(le.context.representative, rng.normal(size=n))
            exact = expectation_exact(le, o)
            quantum = quantum_expectation(state, o)
            mc, se = expectation_mc(le, o)
            residual = abs(exact - quantum)
            z = abs(mc - exact) / se if se > 0 else 0.0
            splitting = splitting_volume_check(le)
            passed = residual <= BORN_TOL and z <= 5.0 and splitting.passed
            return {
                "passed": passed,
                "message": f"n={n} depth={depth} residual={residual:.3e} z={z:.2f}",
                "metrics": {
                    "residual": residual,
                    "z": z,
                    "splitting_residual": splitting.max_residual,
                },
            }

        return self._run_trials("born", trial)

    def suite_gfunc(self) -> SuiteResult:
        """ランダムな区分的関数 f で v(f(B)) = f(v(B)) と和・積の準同型を検証"""

        def trial(k: int, rng: np.random.Generator) -> Dict[str, Any]:
            le = self._random_ensemble(rng)
            values = random_integer_values(le.config.n, rng)
            b = diagonal_in(le.context.representative, values)
            f = {float(v): float(rng.integers(-3, 4)) for v in np.unique(values)}
            report = check_gfunc(le, b, f, raise_on_violation=False)
            return {
                "passed": report.passed,
                "message": f"{report.violations} violation(s) {report.details}",
                "metrics": {"violations": report.violations},
            }

        return self._run_trials("gfunc", trial)

    def suite_ntrns(self) -> SuiteResult:
        """両方のコンテキストで安定な観測量の値が履歴の延長で変わらないことを検証"""

        def trial(k: int, rng: np.random.Generator) -> Dict[str, Any]:
            le = self._random_ensemble(rng)
            current = le.context
            nxt = random_neighbor(current, rng, "next")
            blocks = finest_partitions(current, nxt).i_blocks
            values = np.empty(current.n)
            for block, value in zip(blocks, rng.normal(size=len(blocks))):
                values[list(block)] = value
            o = diagonal_in(current.representative, values)
            report = check_ntrns(le, le.extend(nxt), o, raise_on_violation=False)
            return {
                "passed": report.passed,
                "message": f"{report.violations} violation(s)",
                "metrics": {"violations": report.violations},
            }

        return self._run_trials("ntrns", trial)

    def suite_symplectic(self) -> SuiteResult:
        """ランダムなユニタリの実数化がシンプレクティックで体積を保存することを検証"""

        def trial(k: int, rng: np.random.Generator) -> Dict[str, Any]:
            n = int(rng.integers(1, MAX_SYMPLECTIC_N + 1))
            report = symplectic_volume_check(random_unitary(n, rng))
            return {
                "passed": report.passed,
                "message": (
                    f"n={n} residual={report.symplectic_residual:.3e} "
                    f"det={report.det!r}"
                ),
                "metrics": {
                    "symplectic_residual": report.symplectic_residual,
                    "det_deviation": abs(report.det - 1.0),
                },
            }

        return self._run_trials("symplectic", trial)

    def suite_partitions(self) -> SuiteResult:
        """最も細かい共通分割を総当たりの結果と比較 (固定の3例を含む)"""
        fixtures = self._partition_fixtures()

        def trial(k: int, rng: np.random.Generator) -> Dict[str, Any]:
            if k < len(fixtures):
                a, b = fixtures[k]
            else:
                n = int(rng.integers(2, 5))
                a = Context(Frame(random_unitary(n, rng)), "a")
                b = random_neighbor(a, rng, "b")
            fast = finest_partitions(a, b)
            oracle = brute_force_partitions(a.representative, b.representative)
            passed = fast.to_dict() == oracle.to_dict()
            return {
                "passed": passed,
                "message": (
                    f"{a.label}/{b.label}: {fast.to_dict()} vs {oracle.to_dict()}"
                ),
                "metrics": {"blocks": fast.m},
            }

        return self._run_trials("partitions", trial)

    def suite_reduction(self) -> SuiteResult:
        """履歴の合成ユニタリが基底フレームを基底フレームの置換に写すことを検証"""
        contexts, _ = peres_contexts()
        fixtures = [
            [contexts["ξ"], contexts["γ"], contexts["ξ"]],
            [contexts["ξ"], contexts["δ"], contexts["α"], contexts["γ"]],
        ]

        def trial(k: int, rng: np.random.Generator) -> Dict[str, Any]:
            if k < len(fixtures):
                history = History(tuple(fixtures[k]))
            else:
                n = int(rng.integers(2, 5))
                depth = int(rng.integers(1, MAX_REDUCTION_DEPTH + 1))
                history = History(tuple(random_history(n, depth, rng)[0]))
            reduction = reduce_history(history)
            frame = history.base.representative.matrix
            mapped = reduction.change.unitary.conj().T @ reduction.composed @ frame
            residual = float(
                np.max(np.abs(mapped - frame[:, list(reduction.permutation)]))
            )
            return {
                "passed": residual <= VALUE_TOL,
                "message": f"{history.label}: residual {residual:.3e}",
                "metrics": {"residual": residual},
            }

        return self._run_trials("reduction", trial)

    def suite_dualpath(self) -> SuiteResult:
        """ラベルによる値と履歴を遡る値が全サンプルで一致することを検証"""
        ens = peres_ensembles(TRIAL_EPSILON, self.seed, DUALPATH_SAMPLES)
        fixtures: List[Tuple[LabeledEnsemble, np.ndarray]] = [
            (ens.xi, PERES_OBSERVABLES["σz⊗σz"]),
            (ens.xi_gamma, PERES_OBSERVABLES["σz⊗σz"]),
            (ens.xi_delta_alpha, PERES_OBSERVABLES["σx⊗I"]),
            (ens.xi_delta_beta, PERES_OBSERVABLES["σy⊗I"]),
            (ens.xi_epsilon_beta, PERES_OBSERVABLES["σy⊗I"]),
            (ens.xi_epsilon_alpha, PERES_OBSERVABLES["σx⊗I"]),
        ]
        ctx_b, ctx_c = remark_contexts()
        remark = prepare(
            ModelConfig(
                remark_state(self.seed),
                TRIAL_EPSILON,
                ctx_b,
                self.seed,
                DUALPATH_SAMPLES,
            )
        )
        fixtures.append((remark.extend(ctx_c), REMARK_A))

        def trial(k: int, rng: np.random.Generator) -> Dict[str, Any]:
            if k < len(fixtures):
                le, o = fixtures[k]
            else:
                le = self._random_ensemble(rng, DUALPATH_SAMPLES)
                o = diagonal_in(
                    le.context.representative, random_integer_values(le.config.n, rng)
                )
            by_label = assign_value(le, o)
            by_pullback = assign_value_pullback(le, o)
            bad = int(np.sum(np.abs(by_label - by_pullback) > VALUE_TOL))
            return {
                "passed": bad == 0,
                "message": f"{le.history.label}: {bad} sample(s) differ",
                "metrics": {"mismatches": bad},
            }

        return self._run_trials("dualpath", trial)

    def _random_ensemble(
        self, rng: np.random.Generator, samples: int = TRIAL_SAMPLES
    ) -> LabeledEnsemble:
        n = int(rng.integers(2, 5))
        depth = int(rng.integers(0, MAX_DEPTH + 1))
        contexts, state = random_history(n, depth, rng)
        model = ModelConfig(
            state, TRIAL_EPSILON, contexts[0], int(rng.integers(2**32)), samples
        )
        return run_history(model, contexts)

    def _partition_fixtures(self) -> List[Tuple[Context, Context]]:
        peres, _ = peres_contexts()
        return [
            remark_contexts(),
            (peres["α"], peres["δ"]),
            (peres["α"], peres["γ"]),
        ]

    def run_suite(self, suite: str) -> SuiteResult:
        """1つのスイートを実行"""
        runners = {
            "born": self.suite_born,
            "gfunc": self.suite_gfunc,
            "ntrns": self.suite_ntrns,
            "symplectic": self.suite_symplectic,
            "partitions": self.suite_partitions,
            "reduction": self.suite_reduction,
            "dualpath": self.suite_dualpath,
        }
        if suite not in runners:
            raise ValueError(f"未知のチェックスイートです: {suite}")

        self._log(self.msg.get("suite_start", suite=suite, trials=self.trials))
        start_time = time.time()
        result = runners[suite]()
        elapsed = time.time() - start_time

        if result.success:
            self._log(
                self.msg.get(
                    "suite_passed",
                    suite=suite,
                    passed=result.passed,
                    trials=result.trials,
                )
            )
        else:
            self._log(self.msg.get("suite_failed", suite=suite, failed=result.failed))
        self._log(f"{suite}: {elapsed:.2f}s")

        self.logger.log_suite_result(result)
        self.results.append(result)
        return result

    def run(self, suite: str = "all") -> List[SuiteResult]:
        """指定スイート (all なら全て) を実行"""
        names = SUITE_ORDER if suite == "all" else (suite,)
        return [self.run_suite(name) for name in names]

    def get_summary(self) -> Dict[str, Any]:
        """実行結果のサマリー (JSON 出力用)"""
        return {
            "scenario": "check",
            "seed": self.seed,
            "trials": self.trials,
            "suites": [r.to_dict() for r in self.results],
            "passed": all(r.success for r in self.results),
        }

    def render(self, output_format: str = "json") -> str:
        """サマリーを JSON または表形式の文字列に変換"""
        summary = self.get_summary()
        if output_format == "json":
            text = json.dumps(summary, sort_keys=True, indent=2, ensure_ascii=False)
            return text + "\n"

        title = self.msg.get("table_check_title")
        lines = [title, "=" * max(len(title), 40), f"seed={self.seed}"]
        for r in self.results:
            lines.append(
                self.msg.get(
                    "table_suite_row",
                    suite=r.suite,
                    trials=r.trials,
                    passed=r.passed,
                    failed=r.failed,
                )
            )
        lines.append("")
        key = "all_checks_passed" if summary["passed"] else "checks_failed"
        lines.append(self.msg.get(key))
        return "\n".join(lines) + "\n"


def run_check_suites(
    suite: str = "all", trials: int = 20, seed: int = 42, verbose: bool = False
) -> List[SuiteResult]:
    """チェックスイートを実行して結果を返す"""
    runner = CheckSuiteRunner(seed=seed, trials=trials, verbose=verbose)
    return runner.run(suite)
