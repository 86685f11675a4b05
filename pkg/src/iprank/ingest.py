"""Parsers and containers for activity traces, follower edges, and click tables.

File formats (UTF-8, one record per line, TAB-separated):

  events:  ``time<TAB>user<TAB>url<TAB>M``                     plain mention
           ``time<TAB>user<TAB>url<TAB>RT<TAB>source``         retweet
  follows: ``followee<TAB>follower``
  clicks:  ``url<TAB>count``

``time`` is a base-10 integer (milliseconds). Blank lines and lines starting
with ``#`` are ignored, so serialized files may carry comment headers.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

from .errors import EmptyInput, InvalidParams, NegativeCount, UnparsableLine

MENTION = "M"
RETWEET = "RT"

_INT_RE = re.compile(r"^-?[0-9]+$")


@dataclass(frozen=True, slots=True)
class TweetEvent:
    """One timestamped URL post: a plain mention, or a retweet crediting a source."""

    time: int
    user: str
    url: str
    source: str | None = None

    def __post_init__(self) -> None:
        if not self.user:
            raise ValueError("empty user id")
        if not self.url:
            raise ValueError("empty url")
        if self.source is not None:
            if not self.source:
                raise ValueError("empty retweet source")
            if self.source == self.user:
                raise ValueError("retweet credits its own author")

    @property
    def is_retweet(self) -> bool:
        return self.source is not None

    @property
    def kind(self) -> str:
        return RETWEET if self.source is not None else MENTION

    def sort_key(self) -> tuple[int, str, str, str, str]:
        return (self.time, self.user, self.url, self.kind, self.source or "")


class ActivityLog:
    """Time-sorted event sequence with a per-user position index.

    Ties on time are ordered by (user, url, kind, source), so the log is
    identical no matter how the input lines were permuted.
    """

    __slots__ = ("events", "by_user", "skipped")

    def __init__(self, events: Iterable[TweetEvent], skipped: int = 0) -> None:
        self.events: tuple[TweetEvent, ...] = tuple(
            sorted(events, key=TweetEvent.sort_key)
        )
        index: dict[str, list[int]] = {}
        for pos, ev in enumerate(self.events):
            index.setdefault(ev.user, []).append(pos)
        self.by_user: dict[str, tuple[int, ...]] = {
            u: tuple(p) for u, p in index.items()
        }
        self.skipped = skipped

    @property
    def users(self) -> frozenset[str]:
        return frozenset(self.by_user)

    def events_of(self, user: str) -> tuple[TweetEvent, ...]:
        return tuple(self.events[p] for p in self.by_user.get(user, ()))

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[TweetEvent]:
        return iter(self.events)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ActivityLog):
            return NotImplemented
        return self.events == other.events

    def __hash__(self) -> int:
        return hash(self.events)

    def __repr__(self) -> str:
        return f"ActivityLog({len(self.events)} events, {len(self.by_user)} users)"


class FollowEdgeList:
    """Directed follow relation stored as (followee, follower) pairs."""

    __slots__ = ("edges", "skipped", "_followers", "_followees")

    def __init__(self, edges: Iterable[tuple[str, str]], skipped: int = 0) -> None:
        collected: set[tuple[str, str]] = set()
        for followee, follower in edges:
            if not followee or not follower:
                raise ValueError("empty user id in follow edge")
            if followee == follower:
                raise ValueError(f"self-follow: {followee!r}")
            collected.add((followee, follower))
        self.edges: frozenset[tuple[str, str]] = frozenset(collected)
        self.skipped = skipped
        followers: dict[str, set[str]] = {}
        followees: dict[str, set[str]] = {}
        for followee, follower in self.edges:
            followers.setdefault(followee, set()).add(follower)
            followees.setdefault(follower, set()).add(followee)
        self._followers = {u: frozenset(s) for u, s in followers.items()}
        self._followees = {u: frozenset(s) for u, s in followees.items()}

    def followers_of(self, user: str) -> frozenset[str]:
        return self._followers.get(user, frozenset())

    def followees_of(self, user: str) -> frozenset[str]:
        return self._followees.get(user, frozenset())

    def users(self) -> frozenset[str]:
        return frozenset(self._followers) | frozenset(self._followees)

    def __contains__(self, edge: tuple[str, str]) -> bool:
        return edge in self.edges

    def __len__(self) -> int:
        return len(self.edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FollowEdgeList):
            return NotImplemented
        return self.edges == other.edges

    def __hash__(self) -> int:
        return hash(self.edges)


@dataclass(slots=True)
class ClickTable:
    """Total registered clicks per URL."""

    clicks: dict[str, int]
    skipped: int = field(default=0, compare=False)


def _iter_lines(stream: IO | str | bytes | Iterable[str]) -> Iterator[str]:
    if isinstance(stream, bytes):
        yield from io.StringIO(stream.decode("utf-8"))
    elif isinstance(stream, str):
        yield from io.StringIO(stream)
    else:
        for raw in stream:
            yield raw.decode("utf-8") if isinstance(raw, bytes) else raw


def _parse_int(token: str) -> int:
    if not _INT_RE.match(token):
        raise ValueError(f"not a base-10 integer: {token!r}")
    return int(token)


def _parse_event_line(line: str) -> TweetEvent:
    parts = line.split("\t")
    if len(parts) == 4 and parts[3] == MENTION:
        return TweetEvent(time=_parse_int(parts[0]), user=parts[1], url=parts[2])
    if len(parts) == 5 and parts[3] == RETWEET:
        return TweetEvent(
            time=_parse_int(parts[0]), user=parts[1], url=parts[2], source=parts[4]
        )
    raise ValueError("expected 'time user url M' or 'time user url RT source'")


def _skippable(line: str) -> bool:
    return not line.strip() or line.lstrip().startswith("#")


def parse_events(
    stream: IO | str | bytes | Iterable[str], fmt: str = "tsv", strict: bool = True
) -> ActivityLog:
    """Parse an events stream into a time-sorted :class:`ActivityLog`.

    In strict mode the first malformed line raises :class:`UnparsableLine`;
    in lenient mode malformed lines are skipped and tallied on the returned
    log's ``skipped`` field.
    """
    if fmt != "tsv":
        raise InvalidParams(f"unknown events format: {fmt!r}")
    events: list[TweetEvent] = []
    skipped = 0
    for line_no, raw in enumerate(_iter_lines(stream), start=1):
        line = raw.rstrip("\r\n")
        if _skippable(line):
            continue
        try:
            events.append(_parse_event_line(line))
        except ValueError as exc:
            if strict:
                raise UnparsableLine(line_no, line, str(exc)) from None
            skipped += 1
    if not events:
        raise EmptyInput("no events parsed")
    return ActivityLog(events, skipped=skipped)


def parse_follows(
    stream: IO | str | bytes | Iterable[str], strict: bool = True
) -> FollowEdgeList:
    """Parse ``followee TAB follower`` lines; duplicates collapse to one edge."""
    edges: set[tuple[str, str]] = set()
    skipped = 0
    for line_no, raw in enumerate(_iter_lines(stream), start=1):
        line = raw.rstrip("\r\n")
        if _skippable(line):
            continue
        parts = line.split("\t")
        reason = None
        if len(parts) != 2:
            reason = "expected 'followee follower'"
        elif not parts[0] or not parts[1]:
            reason = "empty user id"
        elif parts[0] == parts[1]:
            reason = "self-follow"
        if reason is not None:
            if strict:
                raise UnparsableLine(line_no, line, reason)
            skipped += 1
            continue
        edges.add((parts[0], parts[1]))
    if not edges:
        raise EmptyInput("no follow edges parsed")
    return FollowEdgeList(edges, skipped=skipped)


def parse_clicks(
    stream: IO | str | bytes | Iterable[str], strict: bool = True
) -> ClickTable:
    """Parse ``url TAB count`` lines; duplicate URLs keep the maximum count."""
    clicks: dict[str, int] = {}
    skipped = 0
    for line_no, raw in enumerate(_iter_lines(stream), start=1):
        line = raw.rstrip("\r\n")
        if _skippable(line):
            continue
        parts = line.split("\t")
        try:
            if len(parts) != 2 or not parts[0]:
                raise ValueError("expected 'url count'")
            count = _parse_int(parts[1])
        except ValueError as exc:
            if strict:
                raise UnparsableLine(line_no, line, str(exc)) from None
            skipped += 1
            continue
        if count < 0:
            if strict:
                raise NegativeCount(f"line {line_no}: negative count {count}")
            skipped += 1
            continue
        url = parts[0]
        if url not in clicks or count > clicks[url]:
            clicks[url] = count
    return ClickTable(clicks, skipped=skipped)


def url_sets(log: ActivityLog) -> dict[str, frozenset[str]]:
    """Distinct URLs per user; retweets count as mentions by the retweeter."""
    seen: dict[str, set[str]] = {}
    for ev in log.events:
        seen.setdefault(ev.user, set()).add(ev.url)
    return {u: frozenset(s) for u, s in seen.items()}


def url_counts(log: ActivityLog) -> dict[str, int]:
    """Number of distinct URLs each user mentioned (mentions and retweets)."""
    return {u: len(s) for u, s in url_sets(log).items()}


def events_to_tsv(log: ActivityLog) -> str:
    lines = []
    for ev in log.events:
        if ev.source is None:
            lines.append(f"{ev.time}\t{ev.user}\t{ev.url}\t{MENTION}")
        else:
            lines.append(f"{ev.time}\t{ev.user}\t{ev.url}\t{RETWEET}\t{ev.source}")
    return "\n".join(lines) + ("\n" if lines else "")


def follows_to_tsv(follows: FollowEdgeList) -> str:
    lines = [f"{a}\t{b}" for a, b in sorted(follows.edges)]
    return "\n".join(lines) + ("\n" if lines else "")


def clicks_to_tsv(table: ClickTable) -> str:
    lines = [f"{url}\t{count}" for url, count in sorted(table.clicks.items())]
    return "\n".join(lines) + ("\n" if lines else "")
