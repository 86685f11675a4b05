"""Weighted influence-graph construction from activity traces.

Three builders produce the same graph type from different evidence:

* :func:`build_comention` -- follower j mentioned a URL after followee i did;
  arc weight ``S / (F + S)`` where S counts URLs j picked up from i and F
  counts i's URLs that j never mentioned.
* :func:`build_retweet` -- j retweeted i at least once; weight ``S / P`` where
  S counts distinct URLs of i that j retweeted and P counts all URLs i
  mentioned.
* :func:`build_retweet_follower` -- same as the retweet builder, restricted to
  pairs where j follows i.

All counts are over distinct URLs. Nodes must have mentioned at least
``min_urls`` distinct URLs; arcs touching an ineligible endpoint are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Sequence

import numpy as np

from .errors import InvalidParams
from .ingest import ActivityLog, FollowEdgeList, _iter_lines

WEIGHT_HIST_BINS = 10


class InfluenceGraph:
    """Immutable weighted directed graph with arc weights in (0, 1].

    Nodes are kept in sorted id order and arcs as index arrays sorted by
    (source, target), which fixes the accumulation order used by every
    downstream computation.
    """

    __slots__ = ("node_ids", "src", "dst", "weights", "_index", "_weight_map")

    def __init__(
        self,
        node_ids: Sequence[str],
        src: np.ndarray,
        dst: np.ndarray,
        weights: np.ndarray,
    ) -> None:
        ids = tuple(node_ids)
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate node ids")
        if any(ids[i] >= ids[i + 1] for i in range(len(ids) - 1)):
            raise ValueError("node ids must be sorted ascending; use from_arcs")
        n = len(ids)
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        weights = np.asarray(weights, dtype=np.float64)
        if not (src.shape == dst.shape == weights.shape):
            raise ValueError("arc arrays must have identical shape")
        if src.size:
            if src.min() < 0 or src.max() >= n or dst.min() < 0 or dst.max() >= n:
                raise ValueError("arc endpoint index out of range")
            if np.any(src == dst):
                raise ValueError("self-arcs are not allowed")
            if np.any(weights <= 0.0) or np.any(weights > 1.0):
                raise ValueError("arc weights must lie in (0, 1]")
            order = np.lexsort((dst, src))
            src, dst, weights = src[order], dst[order], weights[order]
            if np.any((src[1:] == src[:-1]) & (dst[1:] == dst[:-1])):
                raise ValueError("duplicate arcs")
        self.node_ids = ids
        self.src = src
        self.dst = dst
        self.weights = weights
        self._index = {uid: i for i, uid in enumerate(ids)}
        self._weight_map: dict[tuple[str, str], float] | None = None

    @classmethod
    def from_arcs(
        cls,
        arcs: Iterable[tuple[str, str, float]],
        nodes: Iterable[str] = (),
    ) -> "InfluenceGraph":
        """Build from (source id, target id, weight) triples plus extra nodes."""
        arc_list = list(arcs)
        ids = set(nodes)
        for i, j, _ in arc_list:
            ids.add(i)
            ids.add(j)
        ordered = sorted(ids)
        index = {uid: k for k, uid in enumerate(ordered)}
        src = np.array([index[i] for i, _, _ in arc_list], dtype=np.int64)
        dst = np.array([index[j] for _, j, _ in arc_list], dtype=np.int64)
        w = np.array([w for _, _, w in arc_list], dtype=np.float64)
        return cls(ordered, src, dst, w)

    @property
    def num_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def num_arcs(self) -> int:
        return int(self.src.size)

    def index_of(self, user: str) -> int:
        return self._index[user]

    def __contains__(self, user: str) -> bool:
        return user in self._index

    def arcs(self) -> Iterator[tuple[str, str, float]]:
        ids = self.node_ids
        for s, d, w in zip(self.src, self.dst, self.weights):
            yield ids[s], ids[d], float(w)

    def weight(self, i: str, j: str) -> float:
        if self._weight_map is None:
            self._weight_map = {(a, b): w for a, b, w in self.arcs()}
        return self._weight_map[(i, j)]

    def has_arc(self, i: str, j: str) -> bool:
        try:
            self.weight(i, j)
            return True
        except KeyError:
            return False

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InfluenceGraph):
            return NotImplemented
        return (
            self.node_ids == other.node_ids
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.weights, other.weights)
        )

    def __repr__(self) -> str:
        return f"InfluenceGraph({self.num_nodes} nodes, {self.num_arcs} arcs)"


@dataclass(frozen=True, slots=True)
class GraphStats:
    """Size and weight summary of an influence graph."""

    nodes: int
    arcs: int
    mean_weight: float
    weight_histogram: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class PairwiseCounts:
    """Distinct-URL counts behind a co-mention arc (i, j).

    ``s``: URLs j mentioned strictly after i's first mention of them;
    ``f``: URLs i mentioned that j never did; ``p``: all URLs i mentioned.
    """

    s: int
    f: int
    p: int

    def __post_init__(self) -> None:
        if not (0 <= self.s <= self.p and 0 <= self.f <= self.p):
            raise ValueError(f"counts out of range: s={self.s} f={self.f} p={self.p}")


def _url_times(log: ActivityLog) -> dict[str, dict[str, tuple[int, int]]]:
    """Per user: url -> (first mention time, last mention time)."""
    table: dict[str, dict[str, tuple[int, int]]] = {}
    for ev in log.events:
        per_url = table.setdefault(ev.user, {})
        if ev.url in per_url:
            first, _ = per_url[ev.url]
            per_url[ev.url] = (first, ev.time)
        else:
            per_url[ev.url] = (ev.time, ev.time)
    return table


def _eligible(
    times: dict[str, dict[str, tuple[int, int]]], min_urls: int
) -> set[str]:
    if min_urls < 1:
        raise InvalidParams(f"min_urls must be >= 1, got {min_urls}")
    return {u for u, d in times.items() if len(d) >= min_urls}


def _pair_counts(
    ti: dict[str, tuple[int, int]], tj: dict[str, tuple[int, int]]
) -> PairwiseCounts:
    shared = 0
    s = 0
    if len(ti) <= len(tj):
        for url, (first_i, _) in ti.items():
            if url in tj:
                shared += 1
                if tj[url][1] > first_i:
                    s += 1
    else:
        for url, (_, last_j) in tj.items():
            if url in ti:
                shared += 1
                if last_j > ti[url][0]:
                    s += 1
    return PairwiseCounts(s=s, f=len(ti) - shared, p=len(ti))


def pairwise_counts(log: ActivityLog, i: str, j: str) -> PairwiseCounts:
    """Co-mention counts for the ordered pair (i, j) over the whole log."""
    times = _url_times(log)
    return _pair_counts(times.get(i, {}), times.get(j, {}))


def build_comention(
    log: ActivityLog, follows: FollowEdgeList, min_urls: int = 3
) -> InfluenceGraph:
    """Influence graph from follower co-mentions.

    Arc (i, j) exists when j follows i and j mentioned at least one URL
    strictly after i's first mention of it. Equal timestamps carry no causal
    order and do not count.
    """
    times = _url_times(log)
    eligible = _eligible(times, min_urls)
    arcs: list[tuple[str, str, float]] = []
    for i, j in sorted(follows.edges):
        if i not in eligible or j not in eligible:
            continue
        counts = _pair_counts(times[i], times[j])
        if counts.s < 1:
            continue
        arcs.append((i, j, counts.s / (counts.f + counts.s)))
    return InfluenceGraph.from_arcs(arcs, nodes=eligible)


def _retweet_url_sets(
    log: ActivityLog,
    times: dict[str, dict[str, tuple[int, int]]],
    eligible: set[str],
) -> dict[tuple[str, str], set[str]]:
    """(source, retweeter) -> distinct retweeted URLs the source mentioned."""
    pairs: dict[tuple[str, str], set[str]] = {}
    for ev in log.events:
        if ev.source is None:
            continue
        i, j = ev.source, ev.user
        if i in eligible and j in eligible and ev.url in times.get(i, {}):
            pairs.setdefault((i, j), set()).add(ev.url)
    return pairs


def build_retweet(log: ActivityLog, min_urls: int = 3) -> InfluenceGraph:
    """Influence graph from explicit retweet credits: weight S_ij / P_i."""
    times = _url_times(log)
    eligible = _eligible(times, min_urls)
    pairs = _retweet_url_sets(log, times, eligible)
    arcs = [
        (i, j, len(urls) / len(times[i])) for (i, j), urls in sorted(pairs.items())
    ]
    return InfluenceGraph.from_arcs(arcs, nodes=eligible)


def build_retweet_follower(
    log: ActivityLog, follows: FollowEdgeList, min_urls: int = 3
) -> InfluenceGraph:
    """Retweet graph restricted to arcs where the retweeter follows the source."""
    times = _url_times(log)
    eligible = _eligible(times, min_urls)
    pairs = _retweet_url_sets(log, times, eligible)
    arcs = [
        (i, j, len(urls) / len(times[i]))
        for (i, j), urls in sorted(pairs.items())
        if (i, j) in follows
    ]
    return InfluenceGraph.from_arcs(arcs, nodes=eligible)


def graph_stats(g: InfluenceGraph) -> GraphStats:
    if g.num_arcs == 0:
        return GraphStats(g.num_nodes, 0, 0.0, (0,) * WEIGHT_HIST_BINS)
    hist, _ = np.histogram(g.weights, bins=WEIGHT_HIST_BINS, range=(0.0, 1.0))
    mean = float(g.weights.sum() / g.num_arcs)
    return GraphStats(g.num_nodes, g.num_arcs, mean, tuple(int(c) for c in hist))


def stats_to_tsv(stats: GraphStats) -> str:
    lines = [
        f"nodes\t{stats.nodes}",
        f"arcs\t{stats.arcs}",
        f"mean_weight\t{stats.mean_weight!r}",
    ]
    width = 1.0 / len(stats.weight_histogram)
    for k, count in enumerate(stats.weight_histogram):
        lines.append(f"hist\t{k * width!r}\t{(k + 1) * width!r}\t{count}")
    return "\n".join(lines) + "\n"


def graph_to_tsv(g: InfluenceGraph) -> str:
    """Serialize as ``i TAB j TAB w`` lines under a ``#nodes= arcs=`` header.

    Isolated nodes are listed as ``i TAB - TAB -``; the id ``-`` is therefore
    reserved and must not be used as a node id.
    """
    lines = [f"#nodes={g.num_nodes} arcs={g.num_arcs}"]
    touched: set[str] = set()
    for i, j, w in g.arcs():
        lines.append(f"{i}\t{j}\t{w!r}")
        touched.add(i)
        touched.add(j)
    for uid in g.node_ids:
        if uid not in touched:
            lines.append(f"{uid}\t-\t-")
    return "\n".join(lines) + "\n"


def graph_from_tsv(stream: IO | str | bytes) -> InfluenceGraph:
    arcs: list[tuple[str, str, float]] = []
    nodes: set[str] = set()
    for raw in _iter_lines(stream):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"bad graph line: {line!r}")
        if parts[1] == "-" and parts[2] == "-":
            nodes.add(parts[0])
        else:
            arcs.append((parts[0], parts[1], float(parts[2])))
    return InfluenceGraph.from_arcs(arcs, nodes=nodes)
