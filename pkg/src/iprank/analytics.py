"""Evaluation analytics: passivity evidence rates, attention-bound curves,
rank correlation, and top-k / rank-comparison reports.

Rates use the static follower snapshot for the entire trace. Every reception
is one event by a followed user; a reception counts as retweeted when the
receiver has a retweet crediting that (followee, url) pair, so both rates stay
within [0, 1] by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Callable

import numpy as np

from .baselines import ScoreVector
from .errors import InsufficientOverlap, InvalidParams, NoData
from .ingest import ActivityLog, FollowEdgeList

RATE_HIST_BINS = 10


@dataclass(frozen=True, slots=True)
class RateSummary:
    mean: float
    median: float
    histogram: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class RateReport:
    """Per-user retweeting rates plus population summaries.

    Users whose rate is undefined (zero denominator) are absent from the
    per-user maps and excluded from the summaries.
    """

    user_rates: dict[str, float]
    audience_rates: dict[str, float]
    user_summary: RateSummary
    audience_summary: RateSummary


@dataclass(frozen=True, slots=True)
class PercentileCurve:
    """Per-bin high quantile of clicks against a user attribute, with a
    log10-log10 least-squares fit."""

    bins: tuple[tuple[float, float], ...]
    q: float
    slope: float
    intercept: float

    @property
    def fit(self) -> tuple[float, float]:
        return (self.slope, self.intercept)


@dataclass(frozen=True, slots=True)
class RankReport:
    label: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]


def user_retweeting_rate(
    log: ActivityLog, follows: FollowEdgeList, user: str
) -> float | None:
    """Share of received URL posts the user retweeted; None when nothing received."""
    followees = follows.followees_of(user)
    if not followees:
        return None
    received = 0
    received_pairs: set[tuple[str, str]] = set()
    for followee in followees:
        for ev in log.events_of(followee):
            received += 1
            received_pairs.add((followee, ev.url))
    if received == 0:
        return None
    retweeted = {
        (ev.source, ev.url)
        for ev in log.events_of(user)
        if ev.source is not None and (ev.source, ev.url) in received_pairs
    }
    return len(retweeted) / received


def audience_retweeting_rate(
    log: ActivityLog, follows: FollowEdgeList, user: str
) -> float | None:
    """Share of deliveries to the user's followers that came back as retweets."""
    followers = follows.followers_of(user)
    if not followers:
        return None
    own_events = log.events_of(user)
    if not own_events:
        return None
    posted = {ev.url for ev in own_events}
    pairs: set[tuple[str, str]] = set()
    for follower in followers:
        for ev in log.events_of(follower):
            if ev.source == user and ev.url in posted:
                pairs.add((follower, ev.url))
    return len(pairs) / (len(own_events) * len(followers))


def _summarize(rates: dict[str, float]) -> RateSummary:
    if not rates:
        return RateSummary(float("nan"), float("nan"), (0,) * RATE_HIST_BINS)
    values = np.array(sorted(rates.values()))
    hist, _ = np.histogram(values, bins=RATE_HIST_BINS, range=(0.0, 1.0))
    return RateSummary(
        float(values.mean()), float(np.median(values)), tuple(int(c) for c in hist)
    )


def rate_report(log: ActivityLog, follows: FollowEdgeList) -> RateReport:
    everyone = sorted(log.users | follows.users())
    user_rates = {}
    audience_rates = {}
    for user in everyone:
        ur = user_retweeting_rate(log, follows, user)
        if ur is not None:
            user_rates[user] = ur
        ar = audience_retweeting_rate(log, follows, user)
        if ar is not None:
            audience_rates[user] = ar
    return RateReport(
        user_rates,
        audience_rates,
        _summarize(user_rates),
        _summarize(audience_rates),
    )


def url_attribute_average(
    log: ActivityLog, scores: ScoreVector
) -> dict[str, float]:
    """Mean score over the distinct users that mentioned each URL.

    Retweeting a URL counts as mentioning it. Unscored users shrink the
    averaging set; URLs with no scored mentioner are omitted.
    """
    mentioners: dict[str, set[str]] = {}
    for ev in log.events:
        mentioners.setdefault(ev.url, set()).add(ev.user)
    averages: dict[str, float] = {}
    for url in sorted(mentioners):
        vals = [scores.values[u] for u in sorted(mentioners[url]) if u in scores.values]
        if vals:
            averages[url] = sum(vals) / len(vals)
    return averages


def _nearest_rank(sorted_values: list[float], q: float) -> float:
    # rank floor(q*n) + 1, capped at n, with q read exactly from its decimal
    # form: equals ceil(q*n) except at integer q*n, which resolves upward
    n = len(sorted_values)
    k = int(Fraction(Decimal(str(q))) * n) + 1
    return sorted_values[min(n, k) - 1]


def percentile_curve(
    points: list[tuple[float, float]] | tuple[tuple[float, float], ...],
    q: float = 0.999,
    bin_count: int = 50,
) -> PercentileCurve:
    """Bin (attribute, clicks) points on a log-spaced attribute axis and take
    the nearest-rank q-quantile of clicks per bin.

    Points with a non-positive attribute are excluded (log-log axes); empty
    bins are omitted. The fit is ordinary least squares on
    (log10 bin center, log10 max(percentile, 1)); with fewer than two distinct
    centers the slope is 0 and the intercept is the mean.
    """
    if bin_count < 1:
        raise InvalidParams(f"bin_count must be >= 1, got {bin_count}")
    if not 0.0 < q <= 1.0:
        raise InvalidParams(f"q must be in (0, 1], got {q}")
    usable = [(x, c) for x, c in points if x > 0.0]
    if not usable:
        raise NoData("no points with positive attribute value")
    xs = [x for x, _ in usable]
    lo, hi = min(xs), max(xs)
    if lo == hi:
        edges = np.array([lo, hi])
        bin_count = 1
    else:
        edges = np.logspace(math.log10(lo), math.log10(hi), bin_count + 1)
    buckets: dict[int, list[float]] = {}
    for x, clicks in usable:
        idx = int(np.searchsorted(edges, x, side="right")) - 1
        idx = min(max(idx, 0), bin_count - 1)
        buckets.setdefault(idx, []).append(clicks)
    bins = []
    for idx in sorted(buckets):
        center = math.sqrt(edges[idx] * edges[idx + 1])
        bins.append((center, _nearest_rank(sorted(buckets[idx]), q)))
    log_x = [math.log10(c) for c, _ in bins]
    log_y = [math.log10(max(p, 1.0)) for _, p in bins]
    if len(set(log_x)) < 2 or len(set(log_y)) < 2:
        slope, intercept = 0.0, sum(log_y) / len(log_y)
    else:
        mx = sum(log_x) / len(log_x)
        my = sum(log_y) / len(log_y)
        sxx = sum((x - mx) ** 2 for x in log_x)
        sxy = sum((x - mx) * (y - my) for x, y in zip(log_x, log_y))
        slope = sxy / sxx
        intercept = my - slope * mx
    return PercentileCurve(tuple(bins), q, slope, intercept)


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks, ties receiving the mean of their rank range."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j + 2) / 2.0
        i = j + 1
    return ranks


def rank_correlation(a: ScoreVector, b: ScoreVector) -> float:
    """Spearman rank correlation over the users both vectors cover.

    Returns NaN when either vector is constant on the intersection.
    """
    common = sorted(a.values.keys() & b.values.keys())
    if len(common) < 2:
        raise InsufficientOverlap(
            f"only {len(common)} users shared between {a.label!r} and {b.label!r}"
        )
    ra = _average_ranks(np.array([a.values[u] for u in common]))
    rb = _average_ranks(np.array([b.values[u] for u in common]))
    ca = ra - ra.mean()
    cb = rb - rb.mean()
    den = math.sqrt(float(ca @ ca) * float(cb @ cb))
    if den == 0.0:
        return float("nan")
    return float((ca @ cb) / den)


def _ranking(scores: ScoreVector) -> list[tuple[str, float]]:
    return sorted(scores.values.items(), key=lambda kv: (-kv[1], kv[0]))


def ranks_of(scores: ScoreVector) -> dict[str, int]:
    """Rank 1 = highest value; ties broken by user id ascending."""
    return {user: k for k, (user, _) in enumerate(_ranking(scores), start=1)}


def top_k(
    scores: ScoreVector, k: int, predicate: Callable[[str], bool] | None = None
) -> RankReport:
    """Best k users by value, optionally restricted to eligible users first."""
    if k < 1:
        raise InvalidParams(f"k must be >= 1, got {k}")
    items = [
        (u, v)
        for u, v in scores.values.items()
        if predicate is None or predicate(u)
    ]
    items.sort(key=lambda kv: (-kv[1], kv[0]))
    rows = tuple((u, v, rank) for rank, (u, v) in enumerate(items[:k], start=1))
    return RankReport(
        label=f"top{k}_{scores.label}",
        columns=("user", scores.label, "rank"),
        rows=rows,
    )


def rank_join(a: ScoreVector, b: ScoreVector) -> RankReport:
    """Each shared user's rank under both measures, ranks over each full vector."""
    ranks_a = ranks_of(a)
    ranks_b = ranks_of(b)
    common = sorted(set(ranks_a) & set(ranks_b), key=lambda u: (ranks_a[u], u))
    rows = tuple((u, ranks_a[u], ranks_b[u]) for u in common)
    return RankReport(
        label=f"{a.label}_vs_{b.label}",
        columns=("user", f"rank_{a.label}", f"rank_{b.label}"),
        rows=rows,
    )


def _cell(value: object) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def report_to_tsv(report: RankReport) -> str:
    lines = [f"#report={report.label}", "#" + "\t".join(report.columns)]
    for row in report.rows:
        lines.append("\t".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def curve_to_tsv(curve: PercentileCurve) -> str:
    lines = [f"#q={curve.q!r}"]
    for center, pct in curve.bins:
        lines.append(f"{center!r}\t{pct!r}")
    lines.append(f"#fit slope={curve.slope!r} intercept={curve.intercept!r}")
    return "\n".join(lines) + "\n"


def _summary_line(tag: str, s: RateSummary) -> str:
    hist = ",".join(str(c) for c in s.histogram)
    return f"#{tag} mean={s.mean!r} median={s.median!r} hist={hist}"


def rates_to_tsv(report: RateReport) -> str:
    lines = [
        _summary_line("user_rate", report.user_summary),
        _summary_line("audience_rate", report.audience_summary),
        "#user\tuser_rate\taudience_rate",
    ]
    for user in sorted(set(report.user_rates) | set(report.audience_rates)):
        ur = report.user_rates.get(user)
        ar = report.audience_rates.get(user)
        lines.append(
            f"{user}\t{'-' if ur is None else format(ur, '.17g')}"
            f"\t{'-' if ar is None else format(ar, '.17g')}"
        )
    return "\n".join(lines) + "\n"
