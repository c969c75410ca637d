from __future__ import annotations

from datetime import timedelta

import pytest
from builders import T0, make_account, make_timeline

from botwatch.corpus import (
    ACCOUNT_COLUMNS,
    PROBE_CODES,
    AccountState,
    AccountStatus,
    DatasetError,
    LabeledDataset,
    build_test_set,
    load_dataset,
    read_manifest,
    save_dataset,
    write_manifest,
)
from botwatch.evalkit import published


def _dataset(name, accounts, tweets=()):
    return LabeledDataset(name, tuple(accounts), tuple(tweets), (T0 + timedelta(days=30)).date())


def test_genuine_fixture_counts(genuine):
    assert len(genuine.accounts) == 3474
    assert len(genuine.tweets) > 0
    assert all(a.label == "genuine" for a in genuine.accounts)
    # every tweet is reachable through its account's timeline
    assert sum(len(genuine.timeline(a.id)) for a in genuine.accounts) == len(genuine.tweets)


def test_timelines_are_chronological(social1):
    for a in social1.accounts[:50]:
        stamps = [t.timestamp for t in social1.timeline(a.id)]
        assert stamps == sorted(stamps)


def test_empty_accounts_file(tmp_path):
    (tmp_path / "accounts.csv").write_text(",".join(ACCOUNT_COLUMNS) + "\n")
    (tmp_path / "tweets.csv").write_text("")
    ds = load_dataset(tmp_path)
    assert len(ds.accounts) == 0 and len(ds.tweets) == 0


def test_dangling_tweet_is_named(tmp_path):
    ds = _dataset("d", [make_account("a1")], make_timeline("a1", "pp"))
    save_dataset(ds, tmp_path)
    with open(tmp_path / "tweets.csv", "a") as fh:
        fh.write("x9,ghost42,2014-01-01T00:00:00Z,plain,,,\n")
    with pytest.raises(DatasetError, match="ghost42"):
        load_dataset(tmp_path)


def test_malformed_row_names_file_and_line(tmp_path):
    ds = _dataset("d", [make_account("a1"), make_account("a2")])
    save_dataset(ds, tmp_path)
    lines = (tmp_path / "accounts.csv").read_text().splitlines()
    lines[2] = lines[2].replace(",10,", ",many,")
    (tmp_path / "accounts.csv").write_text("\n".join(lines) + "\n")
    with pytest.raises(DatasetError, match=r"accounts\.csv:3"):
        load_dataset(tmp_path)


def test_duplicate_account_ids_rejected():
    with pytest.raises(DatasetError, match="duplicate"):
        _dataset("d", [make_account("a1"), make_account("a1")])


def test_account_after_snapshot_rejected():
    late = make_account("a1", created=T0 + timedelta(days=400))
    with pytest.raises(DatasetError, match="after snapshot"):
        _dataset("d", [late])


@pytest.mark.parametrize("compress", [False, True])
def test_round_trip(tmp_path, compress):
    accounts = [make_account("a1", code=63), make_account("a2", followers=0),
                make_account("a3", code=50, label="spambot")]
    tweets = (make_timeline("a1", "prt", urls=[["http://x"], [], ["u1", "u2"]],
                            mentions=[[], ["bob"], ["carol"]])
              + make_timeline("a3", "tt", hashtags=[["#a", "#b"], []]))
    ds = _dataset("rt", accounts, tweets)
    save_dataset(ds, tmp_path / "rt", compress_tweets=compress)
    back = load_dataset(tmp_path / "rt", snapshot_date=ds.snapshot_date)
    assert back == ds
    for a, b in zip(ds.accounts, back.accounts):
        assert a == b
    for a, b in zip(ds.tweets, back.tweets):
        assert a == b


def test_status_bijection():
    states = {AccountStatus.from_probe(code).state for code in PROBE_CODES}
    assert states == {AccountState.SUSPENDED, AccountState.DELETED}
    assert AccountStatus.from_probe(63).state is AccountState.SUSPENDED
    assert AccountStatus.from_probe(50).state is AccountState.DELETED
    assert AccountStatus.from_probe(None).state is AccountState.ALIVE
    with pytest.raises(DatasetError):
        AccountStatus.from_probe(34)
    with pytest.raises(DatasetError):
        AccountStatus(AccountState.SUSPENDED, 50)


def test_negative_counts_rejected():
    with pytest.raises(DatasetError):
        make_account("a1", followers=-1)


@pytest.mark.parametrize("manifest", sorted(published.TEST_SETS))
def test_manifest_sizes(fixtures, manifest):
    bots_name, size = published.TEST_SETS[manifest]
    genuine = load_dataset(fixtures / "genuine_accounts", tweets=False)
    bots = load_dataset(fixtures / bots_name, tweets=False)
    ts = build_test_set(genuine, bots, members=read_manifest(fixtures / f"{manifest}.csv"))
    assert len(ts.members) == size
    assert int(ts.labels.sum()) == size // 2
    assert len(set(ts.ids)) == size


def test_two_singletons():
    g = _dataset("g", [make_account("g1")])
    b = _dataset("b", [make_account("b1", label="spambot")])
    ts = build_test_set(g, b)
    assert sorted(ts.labels) == [0, 1]


def test_random_test_set_is_balanced_and_seeded():
    g = _dataset("g", [make_account(f"g{i}") for i in range(40)])
    b = _dataset("b", [make_account(f"b{i}", label="spambot") for i in range(15)])
    one, two = build_test_set(g, b, seed=3), build_test_set(g, b, seed=3)
    assert one.ids == two.ids
    assert len(one.members) == 30 and one.labels.sum() == 15
    assert build_test_set(g, b, seed=4).ids != one.ids


def test_test_set_rejects_empty_side():
    g = _dataset("g", [make_account("g1")])
    with pytest.raises(DatasetError):
        build_test_set(g, _dataset("b", []))


def test_manifest_round_trip(tmp_path):
    write_manifest(["x", "y", "z"], tmp_path / "m.csv")
    assert read_manifest(tmp_path / "m.csv") == ["x", "y", "z"]


def test_unknown_manifest_id():
    g = _dataset("g", [make_account("g1")])
    b = _dataset("b", [make_account("b1", label="spambot")])
    with pytest.raises(DatasetError, match="nobody"):
        build_test_set(g, b, members=["g1", "nobody"])
