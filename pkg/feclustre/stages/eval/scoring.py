"""Precision, recall and F-beta over aligned feature lists."""
import logging
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from ...config.settings import DEFAULT_BETA, DEFAULT_N_SLACK
from .matching import FeatureLike, MatchConfig, align_review
from .models import CorrectnessRow, EvalReport, ReviewAlignment

logger = logging.getLogger(__name__)

AVERAGE_DATASET = "Avg."


def prf(matched: int, predicted_total: int, gold_total: int, beta: float = DEFAULT_BETA) -> Tuple[float, float, float]:
    precision = matched / predicted_total if predicted_total else 0.0
    recall = matched / gold_total if gold_total else 0.0
    return precision, recall, f_beta(precision, recall, beta)


def f_beta(precision: float, recall: float, beta: float = DEFAULT_BETA) -> float:
    if precision == 0.0 and recall == 0.0:
        return 0.0
    b2 = beta * beta
    value = (1 + b2) * precision * recall / (b2 * precision + recall)
    # rounding can push the harmonic mean just outside [min(P, R), max(P, R)]
    return min(max(value, min(precision, recall)), max(precision, recall))


def evaluate_corpus(predicted: Mapping[str, Sequence[FeatureLike]], gold: Mapping[str, Sequence[FeatureLike]],
                    config: MatchConfig = MatchConfig()) -> EvalReport:
    """Align every review and micro-average the counts over the corpus."""
    reviews = []
    matched = predicted_total = gold_total = 0
    for review_id in sorted(set(predicted) | set(gold)):
        p, g = predicted.get(review_id, ()), gold.get(review_id, ())
        pairs = align_review(p, g, config)
        reviews.append(ReviewAlignment(review_id=review_id, matches=pairs, predicted=len(p), gold=len(g)))
        matched += len(pairs)
        predicted_total += len(p)
        gold_total += len(g)
    precision, recall, f = prf(matched, predicted_total, gold_total, config.beta)
    return EvalReport(n_slack=config.n_slack, beta=config.beta, precision=precision, recall=recall, f_beta=f,
                      matched=matched, predicted_total=predicted_total, gold_total=gold_total, reviews=reviews)


def correctness_table(predicted: Mapping[str, Mapping[str, Mapping[str, Sequence[FeatureLike]]]],
                      gold: Mapping[str, Mapping[str, Sequence[FeatureLike]]],
                      n_slack: Iterable[int] = DEFAULT_N_SLACK,
                      beta: float = DEFAULT_BETA) -> List[CorrectnessRow]:
    """Rows for every (dataset, extractor, n) combination.

    `predicted` maps dataset -> extractor -> review_id -> features; `gold` maps
    dataset -> review_id -> features.
    """
    rows = []
    for dataset in predicted:
        for extractor, by_review in predicted[dataset].items():
            for n in sorted(n_slack):
                report = evaluate_corpus(by_review, gold[dataset], MatchConfig(n_slack=n, beta=beta))
                rows.append(CorrectnessRow(dataset=dataset, extractor=extractor, n_slack=n,
                                           precision=report.precision, recall=report.recall, f_beta=report.f_beta))
                logger.info(f"{dataset}/{extractor} n={n}: P={report.precision:.3f} "
                            f"R={report.recall:.3f} F={report.f_beta:.3f}")
    return rows


def average_rows(rows: Sequence[CorrectnessRow], dataset: str = AVERAGE_DATASET) -> List[CorrectnessRow]:
    """Cross-dataset rows whose P, R and F cells are each the mean of the per-dataset cells."""
    groups: Dict[Tuple[str, int], List[CorrectnessRow]] = {}
    for row in rows:
        groups.setdefault((row.extractor, row.n_slack), []).append(row)
    return [
        CorrectnessRow(
            dataset=dataset,
            extractor=extractor,
            n_slack=n,
            precision=float(np.mean([r.precision for r in group])),
            recall=float(np.mean([r.recall for r in group])),
            f_beta=float(np.mean([r.f_beta for r in group])),
        )
        for (extractor, n), group in groups.items()
    ]


def render_correctness_table(rows: Sequence[CorrectnessRow]) -> str:
    """Aligned text table: one line per (dataset, extractor), P/R/F per n."""
    slack = sorted({r.n_slack for r in rows})
    cells: Dict[Tuple[str, str], Dict[int, CorrectnessRow]] = {}
    for row in rows:
        cells.setdefault((row.dataset, row.extractor), {})[row.n_slack] = row
    header = f"{'Dataset':<10} {'Extractor':<12}" + "".join(f" | n={n}  P     R     F    " for n in slack)
    lines = [header, "-" * len(header)]
    for (dataset, extractor), by_n in cells.items():
        line = f"{dataset:<10} {extractor:<12}"
        for n in slack:
            r = by_n.get(n)
            line += " |      " + (f"{r.precision:.3f} {r.recall:.3f} {r.f_beta:.3f}" if r else " " * 17)
        lines.append(line)
    return "\n".join(lines)
