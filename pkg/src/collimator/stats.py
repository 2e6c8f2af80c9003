"""Descriptive statistics and the one-tailed Mann-Whitney U test used to
compare the two widget treatments.

Skewness and kurtosis use the adjusted Fisher-Pearson estimators (G1, G2)
with the textbook standard errors

    SE(G1) = sqrt(6 n (n-1) / ((n-2)(n+1)(n+3)))
    SE(G2) = sqrt(24 n (n-1)^2 / ((n-3)(n-2)(n+3)(n+5)))

which reproduce the study-scale values 0.08 / 0.16 at n = 900.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .session import TrialRecord, TargetGroup, Widget


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class StatsSummary:
    n: int
    mean: float
    std: float                 # sample SD, n-1
    skewness: float            # G1; 0 with degenerate=True for constant data
    se_skewness: float | None  # defined for n >= 4
    kurtosis: float            # excess kurtosis G2
    se_kurtosis: float | None  # defined for n >= 4
    minimum: float
    maximum: float
    degenerate: bool = False


@dataclass(frozen=True)
class MannWhitneyResult:
    u: float                   # U statistic of the first sample
    u_other: float             # U of the second sample; u + u_other == n*m
    w: float                   # rank sum of the first sample
    p_value: float             # one-tailed
    method: str                # "exact-enumeration" | "normal-approximation-with-tie-correction"
    alternative: str           # "less" | "greater"


def describe(samples: Sequence[float]) -> StatsSummary:
    n = len(samples)
    if n < 2:
        raise InsufficientDataError(f"need at least 2 samples, got {n}")
    mean = math.fsum(samples) / n
    d = [x - mean for x in samples]
    m2 = math.fsum(v * v for v in d) / n
    var = math.fsum(v * v for v in d) / (n - 1)
    std = math.sqrt(var)
    if m2 < 1e-300:
        skew, kurt, degenerate = 0.0, 0.0, True
    else:
        m3 = math.fsum(v ** 3 for v in d) / n
        m4 = math.fsum(v ** 4 for v in d) / n
        g1 = m3 / m2 ** 1.5
        g2 = m4 / (m2 * m2) - 3.0
        skew = math.sqrt(n * (n - 1)) / (n - 2) * g1 if n > 2 else g1
        kurt = ((n + 1) * g2 + 6.0) * (n - 1) / ((n - 2) * (n - 3)) if n > 3 else g2
        degenerate = False
    se_skew = se_kurt = None
    if n >= 4:
        se_skew = math.sqrt(6.0 * n * (n - 1) / ((n - 2) * (n + 1) * (n + 3)))
        se_kurt = math.sqrt(24.0 * n * (n - 1) ** 2 / ((n - 3) * (n - 2) * (n + 3) * (n + 5)))
    return StatsSummary(
        n=n, mean=mean, std=std, skewness=skew, se_skewness=se_skew,
        kurtosis=kurt, se_kurtosis=se_kurt,
        minimum=min(samples), maximum=max(samples), degenerate=degenerate,
    )


def _midranks(pooled: Sequence[float]) -> list[float]:
    order = sorted(range(len(pooled)), key=lambda i: pooled[i])
    ranks = [0.0] * len(pooled)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        rank = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def _u_distribution(n: int, m: int) -> list[int]:
    """f[u] = number of ways to choose n of n+m distinct ranks with
    U = (rank sum) - n(n+1)/2 equal to u.  Gaussian-binomial recurrence."""
    f = [[0] * (n * m + 1) for _ in range(n + 1)]
    f[0][0] = 1
    for r in range(1, n + m + 1):
        for i in range(min(r, n), 0, -1):
            row = f[i]
            prev = f[i - 1]
            # picking rank r as the i-th chosen element adds r - i to U
            add = r - i
            for u in range(n * m - add, -1, -1):
                if prev[u]:
                    row[u + add] += prev[u]
    return f[n]


def mann_whitney_u(
    a: Sequence[float],
    b: Sequence[float],
    alternative: str = "less",
) -> MannWhitneyResult:
    """One-tailed Mann-Whitney U test of ``a`` against ``b``.

    alternative="less" tests whether values in ``a`` tend to be smaller.
    Exact p by the permutation distribution when n*m <= 400; enumeration
    over the observed values when ties are present and the split count is
    small, otherwise the normal approximation with tie-corrected variance
    and continuity correction.
    """
    if alternative not in ("less", "greater"):
        raise ValueError(f"alternative must be 'less' or 'greater', got {alternative!r}")
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        raise InsufficientDataError("both samples must be non-empty")
    pooled = list(a) + list(b)
    ranks = _midranks(pooled)
    r_a = math.fsum(ranks[:n])
    u_a = r_a - n * (n + 1) / 2.0
    u_b = n * m - u_a
    has_ties = len(set(pooled)) < len(pooled)
    # statistic whose small values support the alternative
    u_stat = u_a if alternative == "less" else u_b
    if n * m <= 400 and not has_ties:
        f = _u_distribution(n, m)
        total = math.comb(n + m, n)
        tail = sum(f[u] for u in range(int(round(u_stat)) + 1))
        return MannWhitneyResult(u_a, u_b, r_a, tail / total, "exact-enumeration", alternative)
    if n * m <= 400 and has_ties and math.comb(n + m, n) <= 200_000:
        # permutation distribution of the observed (tied) values
        count = 0
        total = 0
        all_idx = range(n + m)
        target = u_stat + 1e-9
        for subset in combinations(all_idx, n):
            rs = math.fsum(ranks[i] for i in subset)
            u = rs - n * (n + 1) / 2.0
            if alternative == "greater":
                u = n * m - u
            if u <= target:
                count += 1
            total += 1
        return MannWhitneyResult(u_a, u_b, r_a, count / total, "exact-enumeration", alternative)
    # normal approximation with tie correction
    nm = n + m
    tie_term = 0.0
    seen: dict[float, int] = {}
    for v in pooled:
        seen[v] = seen.get(v, 0) + 1
    for t in seen.values():
        tie_term += t ** 3 - t
    var = n * m / 12.0 * ((nm + 1) - tie_term / (nm * (nm - 1)))
    if var <= 0:
        return MannWhitneyResult(u_a, u_b, r_a, 1.0,
                                 "normal-approximation-with-tie-correction", alternative)
    z = (u_stat + 0.5 - n * m / 2.0) / math.sqrt(var)
    p = 0.5 * math.erfc(-z / math.sqrt(2.0))   # Phi(z)
    p = min(1.0, max(p, 5e-324))
    return MannWhitneyResult(u_a, u_b, r_a, p,
                             "normal-approximation-with-tie-correction", alternative)


# ---------------------------------------------------------------------------
# Report generation over trial records

ERROR_METRICS = ["pem_mm", "pe_x_mm", "pe_y_mm", "pe_z_mm",
                 "aem_deg", "ae_x_deg", "ae_y_deg", "ae_z_deg", "swing_deg"]
TIME_METRICS = ["tt_ms"]
ALL_METRICS = ERROR_METRICS + TIME_METRICS

# Direction of the study's one-tailed hypotheses: the collimation widget is
# expected to reduce error magnitudes and to increase task time.
DEFAULT_ALTERNATIVES = {m: "less" for m in ("pem_mm", "aem_deg", "swing_deg")}
DEFAULT_ALTERNATIVES["tt_ms"] = "greater"


@dataclass(frozen=True)
class MetricReport:
    metric: str
    summaries: dict[str, StatsSummary]        # keyed by widget name (or cell label)
    test: MannWhitneyResult | None            # ACW vs GSW
    insufficient: tuple[str, ...] = ()


@dataclass(frozen=True)
class AnalysisReport:
    metrics: tuple[MetricReport, ...]
    n_records: int
    grouping: str                             # "widget" | "widget+anatomy"


def analyze(
    records: Sequence[TrialRecord],
    grouping: str = "widget",
    metrics: Sequence[str] | None = None,
    alternatives: dict[str, str] | None = None,
) -> AnalysisReport:
    """Per-metric descriptive summaries per widget plus the ACW-vs-GSW
    one-tailed Mann-Whitney test; optional mandible/maxilla split."""
    if grouping not in ("widget", "widget+anatomy"):
        raise ValueError(f"unknown grouping {grouping!r}")
    metrics = list(metrics) if metrics is not None else ALL_METRICS
    alternatives = {**DEFAULT_ALTERNATIVES, **(alternatives or {})}
    cells: dict[str, list[TrialRecord]] = {}
    for r in records:
        keys = [r.widget.value]
        if grouping == "widget+anatomy" and r.group is not TargetGroup.TRAINING:
            keys.append(f"{r.widget.value}/{r.group.value}")
        for key in keys:
            cells.setdefault(key, []).append(r)
    out = []
    for metric in metrics:
        summaries: dict[str, StatsSummary] = {}
        insufficient: list[str] = []
        for key, recs in sorted(cells.items()):
            values = [getattr(r, metric) for r in recs]
            try:
                summaries[key] = describe(values)
            except InsufficientDataError:
                insufficient.append(key)
        test = None
        a = [getattr(r, metric) for r in cells.get(Widget.ACW.value, [])]
        b = [getattr(r, metric) for r in cells.get(Widget.GSW.value, [])]
        if a and b:
            test = mann_whitney_u(a, b, alternatives.get(metric, "less"))
        out.append(MetricReport(metric=metric, summaries=summaries, test=test,
                                insufficient=tuple(insufficient)))
    return AnalysisReport(metrics=tuple(out), n_records=len(records), grouping=grouping)


_ROWS = [
    ("Valid", lambda s: str(s.n)),
    ("Mean", lambda s: f"{s.mean:.2f}"),
    ("Std. Deviation", lambda s: f"{s.std:.2f}"),
    ("Skewness", lambda s: f"{s.skewness:.2f}"),
    ("Std. Error Skewness", lambda s: f"{s.se_skewness:.2f}" if s.se_skewness is not None else "n/a"),
    ("Kurtosis", lambda s: f"{s.kurtosis:.2f}"),
    ("Std. Error of Kurtosis", lambda s: f"{s.se_kurtosis:.2f}" if s.se_kurtosis is not None else "n/a"),
    ("Minimum", lambda s: f"{s.minimum:.2f}"),
    ("Maximum", lambda s: f"{s.maximum:.2f}"),
]


def report_text(report: AnalysisReport) -> str:
    """Aligned plain-text tables, one per metric, plus the test lines."""
    lines = [f"Analyzed records: {report.n_records} (grouping: {report.grouping})", ""]
    for mr in report.metrics:
        keys = list(mr.summaries)
        width = max([len(label) for label, _ in _ROWS] + [14])
        colw = max([len(k) for k in keys] + [10]) + 2
        lines.append(f"== {mr.metric} ==")
        lines.append(" " * width + "".join(k.rjust(colw) for k in keys))
        for label, fmt in _ROWS:
            row = label.ljust(width)
            for k in keys:
                row += fmt(mr.summaries[k]).rjust(colw)
            lines.append(row)
        for k in mr.insufficient:
            lines.append(f"  [{k}: insufficient data]")
        if mr.test is not None:
            t = mr.test
            lines.append(
                f"Mann-Whitney U (ACW vs GSW, alternative={t.alternative}): "
                f"U={t.u:.1f} W={t.w:.1f} p={_fmt_p(t.p_value)} [{t.method}]"
            )
        lines.append("")
    lines.append("Note: Shapiro-Wilk and Levene pre-tests are not computed here; "
                 "run them in a general statistics package if needed.")
    return "\n".join(lines) + "\n"


def _fmt_p(p: float) -> str:
    return "<.001" if p < 0.001 else f"{p:.4f}"


def report_csv(report: AnalysisReport) -> str:
    """Machine-readable mirror of the text report."""
    lines = ["metric,cell,n,mean,std,skewness,se_skewness,kurtosis,se_kurtosis,min,max"]
    for mr in report.metrics:
        for key, s in mr.summaries.items():
            lines.append(
                f"{mr.metric},{key},{s.n},{s.mean!r},{s.std!r},{s.skewness!r},"
                f"{'' if s.se_skewness is None else repr(s.se_skewness)},{s.kurtosis!r},"
                f"{'' if s.se_kurtosis is None else repr(s.se_kurtosis)},"
                f"{s.minimum!r},{s.maximum!r}"
            )
    lines.append("")
    lines.append("metric,u,u_other,w,p_value,method,alternative")
    for mr in report.metrics:
        if mr.test is not None:
            t = mr.test
            lines.append(f"{mr.metric},{t.u!r},{t.u_other!r},{t.w!r},{t.p_value!r},"
                         f"{t.method},{t.alternative}")
    return "\n".join(lines) + "\n"
