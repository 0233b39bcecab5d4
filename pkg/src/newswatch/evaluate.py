"""Metrics, McNemar significance testing, and hyperparameter tuning harnesses.

The chi-square upper tail is computed from the regularized incomplete gamma
function: a power series for x < a + 1 and a modified Lentz continued
fraction otherwise, so no statistics package is needed at runtime.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .clustering import NOISE, ClusteringConfig, dbscan
from .corpus import PROPAGANDA, LabeledDoc, load_labeled_docs
from .dedup import DedupConfig, jaccard, shingles
from .embedding import HashedBowEmbedder
from .features.lexicon import builtin_lexicons
from .features.pipeline import ALL_FAMILIES, FeaturePipeline
from .model import Model, predict_index, train


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    tn: int
    n_test: int

    def as_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "tn": self.tn,
            "n_test": self.n_test,
        }


@dataclass(frozen=True)
class McNemarResult:
    b: int  # A right, B wrong
    c: int  # A wrong, B right
    statistic: float
    p_value: float


def score(pred: list[int], gold: list[int]) -> EvalReport:
    """Confusion-matrix metrics with propaganda (1) as the positive class."""
    if len(pred) != len(gold):
        raise ValueError(f"length mismatch: {len(pred)} predictions vs {len(gold)} gold")
    if not gold:
        raise ValueError("empty evaluation set")
    tp = fp = fn = tn = 0
    for p, g in zip(pred, gold):
        if p == 1 and g == 1:
            tp += 1
        elif p == 1 and g == 0:
            fp += 1
        elif p == 0 and g == 1:
            fn += 1
        else:
            tn += 1
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return EvalReport(
        precision=precision, recall=recall, f1=f1, tp=tp, fp=fp, fn=fn, tn=tn, n_test=len(gold)
    )


# ---------------------------------------------------------------------------
# Chi-square upper tail (df degrees of freedom) via incomplete gamma
# ---------------------------------------------------------------------------

def _lower_gamma_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) by power series (x < a+1)."""
    term = 1.0 / a
    total = term
    denom = a
    for _ in range(1000):
        denom += 1.0
        term *= x / denom
        total += term
        if abs(term) < abs(total) * 1e-16:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))

def _upper_gamma_cf(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) by continued fraction (x >= a+1)."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def chi_square_sf(x: float, df: int = 1) -> float:
    """P(X > x) for a chi-square variable with df degrees of freedom."""
    if df < 1:
        raise ValueError("df must be >= 1")
    if x <= 0.0:
        return 1.0
    a = df / 2.0
    half = x / 2.0
    if half < a + 1.0:
        return max(0.0, min(1.0, 1.0 - _lower_gamma_series(a, half)))
    return max(0.0, min(1.0, _upper_gamma_cf(a, half)))


def mcnemar(
    pred_a: list[int], pred_b: list[int], gold: list[int], corrected: bool = True
) -> McNemarResult:
    """Paired test on discordant counts; continuity-corrected by default."""
    if not (len(pred_a) == len(pred_b) == len(gold)):
        raise ValueError("prediction/gold length mismatch")
    b = sum(1 for pa, pb, g in zip(pred_a, pred_b, gold) if pa == g and pb != g)
    c = sum(1 for pa, pb, g in zip(pred_a, pred_b, gold) if pa != g and pb == g)
    if b + c == 0:
        return McNemarResult(b=0, c=0, statistic=0.0, p_value=1.0)
    if corrected:
        statistic = (abs(b - c) - 1.0) ** 2 / (b + c)
    else:
        statistic = float(b - c) ** 2 / (b + c)
    return McNemarResult(b=b, c=c, statistic=statistic, p_value=chi_square_sf(statistic, df=1))


# ---------------------------------------------------------------------------
# Dedup threshold tuning (text-reuse pairs file: label<TAB>textA<TAB>textB)
# ---------------------------------------------------------------------------

DERIVED = "derived"
NOT_DERIVED = "not_derived"


@dataclass(frozen=True)
class GridCell:
    n: int
    theta: float
    f1: float
    precision: float
    recall: float


@dataclass(frozen=True)
class DedupTuneResult:
    best_n: int
    best_theta: float
    best_f1: float
    table: tuple[GridCell, ...]


def load_pairs(path: str | Path) -> list[tuple[str, str, str]]:
    pairs = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        label, text_a, text_b = line.split("\t", 2)
        pairs.append((text_a, text_b, label))
    return pairs


def tune_dedup(
    pairs: list[tuple[str, str, str]],
    ns: list[int],
    thetas: list[float],
    stopwords: frozenset[str] | None = None,
) -> DedupTuneResult:
    """Exhaustive grid search of (n, theta) against derived/not_derived pairs.

    Classification rule: jaccard >= theta predicts derived.  Ties in F1 go
    to the smallest n, then the largest theta.
    """
    if not ns or not thetas:
        raise ValueError("empty tuning grid")
    if not pairs:
        raise ValueError("no labeled pairs")
    labels = {label for _, _, label in pairs}
    if labels != {DERIVED, NOT_DERIVED}:
        raise ValueError(f"pairs must carry both labels, got {sorted(labels)}")
    gold = [1 if label == DERIVED else 0 for _, _, label in pairs]

    cells: list[GridCell] = []
    best: GridCell | None = None
    for n in sorted(set(ns)):
        config = DedupConfig(
            n=n, theta=min(thetas), stopwords=stopwords if stopwords is not None else frozenset()
        )
        sims = [jaccard(shingles(a, config), shingles(b, config)) for a, b, _ in pairs]
        for theta in sorted(set(thetas)):
            pred = [1 if s >= theta else 0 for s in sims]
            report = score(pred, gold)
            cell = GridCell(
                n=n, theta=theta, f1=report.f1, precision=report.precision, recall=report.recall
            )
            cells.append(cell)
            if (
                best is None
                or cell.f1 > best.f1
                or (cell.f1 == best.f1 and cell.n == best.n and cell.theta > best.theta)
            ):
                best = cell
    return DedupTuneResult(
        best_n=best.n, best_theta=best.theta, best_f1=best.f1, table=tuple(cells)
    )


# ---------------------------------------------------------------------------
# Clustering radius tuning against gold story groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EpsCell:
    eps: float
    f1: float
    precision: float
    recall: float
    n_clusters: int
    n_noise: int


@dataclass(frozen=True)
class EpsTuneResult:
    best_eps: float
    best_f1: float
    table: tuple[EpsCell, ...]


def pairwise_cocluster_report(labels: list[int], gold_groups: list[str]) -> EvalReport:
    """Pairwise co-clustering metrics: a pair is positive iff co-clustered."""
    n = len(labels)
    tp = fp = fn = tn = 0
    for i in range(n):
        for j in range(i + 1, n):
            pred_same = labels[i] != NOISE and labels[i] == labels[j]
            gold_same = gold_groups[i] == gold_groups[j]
            if pred_same and gold_same:
                tp += 1
            elif pred_same:
                fp += 1
            elif gold_same:
                fn += 1
            else:
                tn += 1
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    n_pairs = n * (n - 1) // 2
    return EvalReport(
        precision=precision, recall=recall, f1=f1, tp=tp, fp=fp, fn=fn, tn=tn, n_test=n_pairs
    )


def tune_eps(
    docs: list[tuple[str, str]],
    eps_grid: list[float],
    embedder: HashedBowEmbedder | None = None,
    min_members: int = 2,
) -> EpsTuneResult:
    """Grid-search the clustering radius against gold (group_id, text) docs.

    The objective is pairwise co-clustering F1; ties go to the smallest eps.
    """
    if not eps_grid:
        raise ValueError("empty eps grid")
    if not docs:
        raise ValueError("no labeled documents")
    embedder = embedder or HashedBowEmbedder()
    vectors = [embedder.embed(text) for _, text in docs]
    gold_groups = [group for group, _ in docs]

    cells: list[EpsCell] = []
    best: EpsCell | None = None
    for eps in sorted(set(eps_grid)):
        labels = dbscan(vectors, ClusteringConfig(eps=eps, min_members=min_members))
        report = pairwise_cocluster_report(labels, gold_groups)
        cell = EpsCell(
            eps=eps,
            f1=report.f1,
            precision=report.precision,
            recall=report.recall,
            n_clusters=len({l for l in labels if l != NOISE}),
            n_noise=sum(1 for l in labels if l == NOISE),
        )
        cells.append(cell)
        if best is None or cell.f1 > best.f1:
            best = cell
    return EpsTuneResult(best_eps=best.eps, best_f1=best.f1, table=tuple(cells))


# ---------------------------------------------------------------------------
# Train/test experiment: full feature set vs n-gram baseline
# ---------------------------------------------------------------------------

@dataclass
class ExperimentReport:
    baseline: EvalReport
    full: EvalReport
    mcnemar_full_vs_baseline: McNemarResult
    seed: int
    n_train: int
    n_test: int
    baseline_model: Model
    full_model: Model

    def as_dict(self) -> dict:
        return {
            "baseline": self.baseline.as_dict(),
            "full": self.full.as_dict(),
            "mcnemar": {
                "b": self.mcnemar_full_vs_baseline.b,
                "c": self.mcnemar_full_vs_baseline.c,
                "statistic": self.mcnemar_full_vs_baseline.statistic,
                "p_value": self.mcnemar_full_vs_baseline.p_value,
            },
            "seed": self.seed,
            "n_train": self.n_train,
            "n_test": self.n_test,
        }


def stratified_split(
    labels: list[int], train_fraction: float, seed: int
) -> tuple[list[int], list[int]]:
    """Deterministic stratified index split behind one seed."""
    if not (0.0 < train_fraction < 1.0):
        raise ValueError("train fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    train_idx: list[int] = []
    test_idx: list[int] = []
    for cls in (0, 1):
        idx = np.array([i for i, y in enumerate(labels) if y == cls])
        rng.shuffle(idx)
        cut = int(round(train_fraction * len(idx)))
        train_idx.extend(idx[:cut].tolist())
        test_idx.extend(idx[cut:].tolist())
    train_idx.sort()
    test_idx.sort()
    train_classes = {labels[i] for i in train_idx}
    test_classes = {labels[i] for i in test_idx}
    if train_classes != {0, 1} or test_classes != {0, 1}:
        raise ValueError("degenerate split: a class is absent from train or test")
    return train_idx, test_idx


def _fit_and_eval(
    train_texts: list[str],
    train_labels: list[int],
    test_texts: list[str],
    flags: set[str],
    l2_lambda: float,
    min_df: int,
    max_iter: int,
) -> tuple[Model, list[int], list[float]]:
    pipeline = FeaturePipeline(
        flags=set(flags),
        lexicons=builtin_lexicons() if "lexicon" in flags else [],
        min_df=min_df,
    ).fit(train_texts)
    feature_mat = [pipeline.assemble(t) for t in train_texts]
    model = train(feature_mat, train_labels, l2_lambda=l2_lambda, pipeline=pipeline, max_iter=max_iter)
    indices = [predict_index(model, pipeline.assemble(t)) for t in test_texts]
    pred = [1 if p >= 0.5 else 0 for p in indices]
    return model, pred, indices


def run_experiment(
    corpus: list[LabeledDoc] | str | Path,
    train_fraction: float = 0.8,
    seed: int = 42,
    l2_lambda: float = 1.0,
    families: set[str] | None = None,
    min_df: int = 2,
    max_iter: int = 1000,
) -> ExperimentReport:
    """Train the n-gram baseline and the full model on one stratified split.

    Both models see identical train/test documents; the McNemar comparison
    pairs the full model (A) against the baseline (B).
    """
    docs = corpus if isinstance(corpus, list) else load_labeled_docs(corpus)
    labels = [1 if d.label == PROPAGANDA else 0 for d in docs]
    if len(set(labels)) < 2:
        raise ValueError("corpus must contain both classes")
    texts = [d.text for d in docs]
    train_idx, test_idx = stratified_split(labels, train_fraction, seed)
    train_texts = [texts[i] for i in train_idx]
    train_labels = [labels[i] for i in train_idx]
    test_texts = [texts[i] for i in test_idx]
    test_labels = [labels[i] for i in test_idx]

    baseline_model, baseline_pred, _ = _fit_and_eval(
        train_texts, train_labels, test_texts, {"ngrams"}, l2_lambda, min_df, max_iter
    )
    full_model, full_pred, _ = _fit_and_eval(
        train_texts,
        train_labels,
        test_texts,
        set(families or ALL_FAMILIES),
        l2_lambda,
        min_df,
        max_iter,
    )
    return ExperimentReport(
        baseline=score(baseline_pred, test_labels),
        full=score(full_pred, test_labels),
        mcnemar_full_vs_baseline=mcnemar(full_pred, baseline_pred, test_labels),
        seed=seed,
        n_train=len(train_idx),
        n_test=len(test_idx),
        baseline_model=baseline_model,
        full_model=full_model,
    )
