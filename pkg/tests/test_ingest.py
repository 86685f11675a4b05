"""Parsing, container invariants, and serialization round-trips."""

import random

import pytest

from iprank.errors import EmptyInput, NegativeCount, UnparsableLine
from iprank.ingest import (
    ActivityLog,
    FollowEdgeList,
    TweetEvent,
    clicks_to_tsv,
    events_to_tsv,
    follows_to_tsv,
    parse_clicks,
    parse_events,
    parse_follows,
    url_counts,
)

EVENTS = "1\tu1\turl-a\tM\n2\tu2\turl-b\tM\n3\tu3\turl-c\tM\n"


class TestParseEvents:
    def test_three_wellformed_mentions(self):
        log = parse_events(EVENTS)
        assert len(log) == 3
        assert [ev.time for ev in log] == [1, 2, 3]
        assert all(not ev.is_retweet for ev in log)

    def test_out_of_order_lines_resorted(self):
        log = parse_events("5\tu1\ta\tM\n1\tu2\tb\tM\n3\tu3\tc\tM\n")
        assert [ev.time for ev in log] == [1, 3, 5]

    def test_retweet_line(self):
        log = parse_events("7\tu2\ta\tRT\tu1\n1\tu1\ta\tM\n")
        rt = log.events[1]
        assert rt.is_retweet and rt.source == "u1" and rt.kind == "RT"

    def test_self_retweet_rejected_strict(self):
        with pytest.raises(UnparsableLine):
            parse_events("1\tu1\ta\tRT\tu1\n")

    def test_self_retweet_skipped_lenient(self):
        log = parse_events("1\tu1\ta\tRT\tu1\n2\tu2\tb\tM\n", strict=False)
        assert len(log) == 1
        assert log.skipped == 1

    @pytest.mark.parametrize(
        "line",
        [
            "x\tu1\ta\tM",  # bad time
            "1\tu1\ta",  # missing kind
            "1\tu1\ta\tM\textra",  # mention with 5 fields
            "1\tu1\ta\tRT",  # retweet without source
            "1\tu1\t\tM",  # empty url
            "1\t\ta\tM",  # empty user
            "1\tu1\ta\tZ",  # unknown kind
            "0x1\tu1\ta\tM",  # non-decimal time
        ],
    )
    def test_malformed_lines_strict(self, line):
        with pytest.raises(UnparsableLine):
            parse_events(line + "\n")

    def test_lenient_tallies_malformed(self):
        text = "bad line\n" + EVENTS + "also bad\n"
        log = parse_events(text, strict=False)
        assert len(log) == 3
        assert log.skipped == 2

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            parse_events("")
        with pytest.raises(EmptyInput):
            parse_events("\n\n# only a comment\n")

    def test_comments_and_blanks_ignored(self):
        log = parse_events("# header\n\n" + EVENTS)
        assert len(log) == 3

    def test_unknown_format(self):
        from iprank.errors import InvalidParams

        with pytest.raises(InvalidParams):
            parse_events(EVENTS, fmt="csv")

    def test_accepts_file_object(self, tmp_path):
        p = tmp_path / "events.tsv"
        p.write_text(EVENTS, encoding="utf-8")
        with open(p, encoding="utf-8") as fh:
            assert len(parse_events(fh)) == 3

    def test_accepts_byte_stream(self, tmp_path):
        assert len(parse_events(EVENTS.encode("utf-8"))) == 3
        p = tmp_path / "events.tsv"
        p.write_bytes(EVENTS.encode("utf-8"))
        with open(p, "rb") as fh:
            assert len(parse_events(fh)) == 3

    def test_permutation_invariance(self):
        lines = [
            "5\tu1\ta\tM",
            "5\tu1\tb\tM",
            "5\tu2\ta\tM",
            "5\tu2\ta\tRT\tu1",
            "2\tu9\tz\tM",
        ]
        rng = random.Random(13)
        logs = []
        for _ in range(6):
            shuffled = lines[:]
            rng.shuffle(shuffled)
            logs.append(parse_events("\n".join(shuffled) + "\n"))
        assert all(lg == logs[0] for lg in logs)

    def test_index_covers_exactly_the_events(self):
        log = parse_events(EVENTS + "9\tu1\turl-z\tM\n")
        positions = sorted(p for ps in log.by_user.values() for p in ps)
        assert positions == list(range(len(log)))
        for user, ps in log.by_user.items():
            assert all(log.events[p].user == user for p in ps)


class TestParseFollows:
    def test_duplicates_collapse(self):
        f = parse_follows("a\tb\na\tb\n")
        assert f.edges == frozenset({("a", "b")})

    def test_self_follow_strict(self):
        with pytest.raises(UnparsableLine):
            parse_follows("a\ta\n")

    def test_self_follow_lenient(self):
        f = parse_follows("a\ta\na\tb\n", strict=False)
        assert f.edges == frozenset({("a", "b")})
        assert f.skipped == 1

    def test_two_distinct_pairs(self):
        f = parse_follows("a\tb\nb\ta\n")
        assert len(f) == 2
        assert ("a", "b") in f and ("b", "a") in f

    def test_empty(self):
        with pytest.raises(EmptyInput):
            parse_follows("")

    def test_maps(self):
        f = parse_follows("a\tb\na\tc\nd\tb\n")
        assert f.followers_of("a") == {"b", "c"}
        assert f.followees_of("b") == {"a", "d"}
        assert f.users() == {"a", "b", "c", "d"}


class TestParseClicks:
    def test_basic(self):
        assert parse_clicks("u1\t5\n").clicks == {"u1": 5}

    def test_duplicate_takes_max(self):
        assert parse_clicks("u1\t5\nu1\t7\nu1\t6\n").clicks == {"u1": 7}

    def test_negative_count(self):
        with pytest.raises(NegativeCount):
            parse_clicks("u1\t-2\n")

    def test_negative_skipped_lenient(self):
        table = parse_clicks("u1\t-2\nu2\t3\n", strict=False)
        assert table.clicks == {"u2": 3}
        assert table.skipped == 1

    def test_empty_table_is_legal(self):
        assert parse_clicks("").clicks == {}

    def test_malformed(self):
        with pytest.raises(UnparsableLine):
            parse_clicks("u1\tfive\n")


class TestUrlCounts:
    def test_repeat_mentions_counted_once(self):
        log = parse_events("1\tu\ta\tM\n2\tu\tb\tM\n3\tu\ta\tM\n")
        assert url_counts(log) == {"u": 2}

    def test_user_without_events_absent(self):
        log = parse_events(EVENTS)
        assert "ghost" not in url_counts(log)

    def test_retweet_counts_as_mention(self):
        log = parse_events("1\tv\tb\tM\n2\tu\ta\tM\n3\tu\tb\tRT\tv\n")
        counts = url_counts(log)
        # independent check: brute-force distinct-URL scan
        naive = {}
        for ev in log:
            naive.setdefault(ev.user, set()).add(ev.url)
        assert counts == {u: len(s) for u, s in naive.items()}
        assert counts["u"] == 2

    def test_matches_naive_scan_on_random_trace(self):
        rng = random.Random(5)
        events = []
        for t in range(200):
            user = f"u{rng.randrange(10)}"
            url = f"l{rng.randrange(15)}"
            events.append(TweetEvent(time=t, user=user, url=url))
        log = ActivityLog(events)
        naive = {}
        for ev in log:
            naive.setdefault(ev.user, set()).add(ev.url)
        assert url_counts(log) == {u: len(s) for u, s in naive.items()}


class TestRoundTrips:
    def test_events_round_trip(self):
        text = "1\tu1\ta\tM\n1\tu1\tb\tM\n2\tu2\ta\tRT\tu1\n"
        log = parse_events(text)
        assert parse_events(events_to_tsv(log)) == log

    def test_follows_round_trip(self):
        f = parse_follows("a\tb\nc\td\n")
        assert parse_follows(follows_to_tsv(f)) == f

    def test_clicks_round_trip(self):
        t = parse_clicks("a\t3\nb\t0\n")
        assert parse_clicks(clicks_to_tsv(t)).clicks == t.clicks


class TestConstructors:
    def test_event_invariants(self):
        with pytest.raises(ValueError):
            TweetEvent(time=1, user="u", url="a", source="u")
        with pytest.raises(ValueError):
            TweetEvent(time=1, user="u", url="")

    def test_follow_edge_list_rejects_self(self):
        with pytest.raises(ValueError):
            FollowEdgeList([("a", "a")])
