"""Influence and passivity scoring over social-activity graphs."""

from .analytics import (
    PercentileCurve,
    RankReport,
    RateReport,
    audience_retweeting_rate,
    percentile_curve,
    rank_correlation,
    rank_join,
    rate_report,
    top_k,
    url_attribute_average,
    user_retweeting_rate,
)
from .baselines import (
    PageRankParams,
    ScoreVector,
    follower_count,
    h_index,
    invert_graph,
    retweet_count,
    weighted_pagerank,
)
from .errors import IpRankError
from .graphs import (
    GraphStats,
    InfluenceGraph,
    PairwiseCounts,
    build_comention,
    build_retweet,
    build_retweet_follower,
    graph_stats,
    pairwise_counts,
)
from .ingest import (
    ActivityLog,
    ClickTable,
    FollowEdgeList,
    TweetEvent,
    parse_clicks,
    parse_events,
    parse_follows,
    url_counts,
)
from .ipcore import IpParams, IterationTrace, RateView, ScorePair, compute_rates, delta, run_ip

__version__ = "0.1.0"

__all__ = [
    "ActivityLog",
    "ClickTable",
    "FollowEdgeList",
    "GraphStats",
    "InfluenceGraph",
    "IpParams",
    "IpRankError",
    "IterationTrace",
    "PageRankParams",
    "PairwiseCounts",
    "PercentileCurve",
    "RankReport",
    "RateReport",
    "RateView",
    "ScorePair",
    "ScoreVector",
    "TweetEvent",
    "audience_retweeting_rate",
    "build_comention",
    "build_retweet",
    "build_retweet_follower",
    "compute_rates",
    "delta",
    "follower_count",
    "graph_stats",
    "h_index",
    "invert_graph",
    "pairwise_counts",
    "parse_clicks",
    "parse_events",
    "parse_follows",
    "percentile_curve",
    "rank_correlation",
    "rank_join",
    "rate_report",
    "retweet_count",
    "run_ip",
    "top_k",
    "url_attribute_average",
    "url_counts",
    "user_retweeting_rate",
    "weighted_pagerank",
]
