"""Labeled account/tweet datasets: loading, validation, serialization, test sets.

Datasets live in a directory holding two delimiter-separated files with a
header row: ``accounts.csv`` and ``tweets.csv`` (either may be gzipped, as
``*.csv.gz``).
"""

from __future__ import annotations

import csv
import gzip
import io
import logging
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

logger = logging.getLogger(__name__)

ACCOUNT_COLUMNS = (
    "id",
    "screen_name",
    "created_at",
    "followers_count",
    "friends_count",
    "probe_code",
    "label",
    "dataset_tag",
)
TWEET_COLUMNS = ("id", "account_id", "timestamp", "kind", "urls", "hashtags", "mentions")
LIST_SEP = ";"

LABELS = ("genuine", "spambot", "unknown")
TWEET_KINDS = ("plain", "reply", "retweet")


class DatasetError(ValueError):
    """Raised for malformed or inconsistent dataset files."""


class AccountState(str, Enum):
    ALIVE = "alive"
    DELETED = "deleted"
    SUSPENDED = "suspended"
    PROTECTED = "protected"


# Replayed account-lookup error codes.
PROBE_CODES = {63: AccountState.SUSPENDED, 50: AccountState.DELETED}
_STATE_TO_CODE = {state: code for code, state in PROBE_CODES.items()}


@dataclass(frozen=True)
class AccountStatus:
    state: AccountState
    probe_code: int | None = None

    def __post_init__(self):
        expected = _STATE_TO_CODE.get(self.state)
        if self.probe_code != expected:
            raise DatasetError(
                f"probe_code {self.probe_code!r} inconsistent with state {self.state.value}"
            )

    @classmethod
    def from_probe(cls, code: int | None) -> "AccountStatus":
        if code is None:
            return cls(AccountState.ALIVE, None)
        try:
            return cls(PROBE_CODES[code], code)
        except KeyError:
            raise DatasetError(f"unknown probe_code {code!r}") from None


@dataclass(frozen=True)
class Account:
    id: str
    screen_name: str
    created_at: datetime
    followers_count: int
    friends_count: int
    status: AccountStatus
    label: str
    dataset_tag: str

    def __post_init__(self):
        if self.followers_count < 0 or self.friends_count < 0:
            raise DatasetError(f"account {self.id}: negative follower/friend count")
        if self.label not in LABELS:
            raise DatasetError(f"account {self.id}: unknown label {self.label!r}")


@dataclass(frozen=True)
class Tweet:
    id: str
    account_id: str
    timestamp: datetime
    kind: str
    urls: tuple[str, ...] = ()
    hashtags: tuple[str, ...] = ()
    mentions: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in TWEET_KINDS:
            raise DatasetError(f"tweet {self.id}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class LabeledDataset:
    name: str
    accounts: tuple[Account, ...]
    tweets: tuple[Tweet, ...]
    snapshot_date: date
    _timelines: dict = field(default=None, repr=False, compare=False)
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        ids = [a.id for a in self.accounts]
        if len(set(ids)) != len(ids):
            seen, dups = set(), []
            for i in ids:
                if i in seen:
                    dups.append(i)
                seen.add(i)
            raise DatasetError(f"{self.name}: duplicate account ids {sorted(set(dups))[:10]}")
        known = set(ids)
        dangling = sorted({t.account_id for t in self.tweets if t.account_id not in known})
        if dangling:
            raise DatasetError(
                f"{self.name}: tweets reference unknown account ids {dangling[:20]}"
            )
        snapshot_end = datetime.combine(self.snapshot_date, datetime.max.time(), timezone.utc)
        future = [a.id for a in self.accounts if a.created_at > snapshot_end]
        if future:
            raise DatasetError(f"{self.name}: accounts created after snapshot: {future[:10]}")
        timelines: dict[str, list[Tweet]] = {a.id: [] for a in self.accounts}
        for t in self.tweets:
            timelines[t.account_id].append(t)
        for tl in timelines.values():
            tl.sort(key=lambda t: (t.timestamp, t.id))
        object.__setattr__(
            self, "_timelines", {k: tuple(v) for k, v in timelines.items()}
        )
        object.__setattr__(self, "_index", {a.id: a for a in self.accounts})

    def __len__(self):
        return len(self.accounts)

    def timeline(self, account_id: str) -> tuple[Tweet, ...]:
        """Tweets of one account in chronological order."""
        return self._timelines[account_id]

    def account(self, account_id: str) -> Account:
        return self._index[account_id]


@dataclass(frozen=True)
class TestSet:
    """Binary-labeled account mix; ``labels`` is 1 for spambot, 0 for genuine."""

    name: str
    members: tuple[Account, ...]

    __test__ = False  # not a pytest class

    @property
    def ids(self) -> list[str]:
        return [a.id for a in self.members]

    @property
    def labels(self) -> np.ndarray:
        return np.array([1 if a.label == "spambot" else 0 for a in self.members], dtype=int)


# ---------------------------------------------------------------- parsing


def parse_timestamp(text: str) -> datetime:
    """Parse ISO-8601 into an aware UTC datetime; naive values are taken as UTC."""
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        return dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _split_list(text: str) -> tuple[str, ...]:
    return tuple(x for x in text.split(LIST_SEP) if x) if text else ()


def _open_text(path: Path):
    if path.suffix == ".gz":
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8", newline="")
    return open(path, encoding="utf-8", newline="")


def _find(directory: Path, stem: str) -> Path:
    for candidate in (directory / f"{stem}.csv", directory / f"{stem}.csv.gz"):
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"no {stem}.csv or {stem}.csv.gz in {directory}")


def _rows(path: Path, columns: tuple[str, ...]) -> Iterator[tuple[int, dict]]:
    with _open_text(path) as fh:
        reader = csv.DictReader(fh)
        header = tuple(reader.fieldnames or ())
        if header and header != columns:
            missing = [c for c in columns if c not in header]
            if missing:
                raise DatasetError(f"{path}: missing columns {missing}")
        for row in reader:
            yield reader.line_num, row


def _parse_account(row: dict) -> Account:
    code = row["probe_code"].strip()
    return Account(
        id=row["id"],
        screen_name=row["screen_name"],
        created_at=parse_timestamp(row["created_at"]),
        followers_count=int(row["followers_count"]),
        friends_count=int(row["friends_count"]),
        status=AccountStatus.from_probe(int(code) if code else None),
        label=row["label"],
        dataset_tag=row["dataset_tag"],
    )


def _parse_tweet(row: dict) -> Tweet:
    return Tweet(
        id=row["id"],
        account_id=row["account_id"],
        timestamp=parse_timestamp(row["timestamp"]),
        kind=row["kind"],
        urls=_split_list(row["urls"]),
        hashtags=_split_list(row["hashtags"]),
        mentions=_split_list(row["mentions"]),
    )


def read_accounts(path: Path) -> list[Account]:
    out = []
    for line, row in _rows(path, ACCOUNT_COLUMNS):
        try:
            out.append(_parse_account(row))
        except (ValueError, KeyError, TypeError) as exc:
            raise DatasetError(f"{path}:{line}: {exc}") from exc
    return out


def read_tweets(path: Path) -> list[Tweet]:
    out = []
    for line, row in _rows(path, TWEET_COLUMNS):
        try:
            out.append(_parse_tweet(row))
        except (ValueError, KeyError, TypeError) as exc:
            raise DatasetError(f"{path}:{line}: {exc}") from exc
    return out


def load_dataset(path: str | Path, name: str | None = None,
                 snapshot_date: date | None = None, tweets: bool = True) -> LabeledDataset:
    """Load and validate the dataset stored in directory ``path``.

    ``snapshot_date`` defaults to the latest date seen in either file.
    ``tweets=False`` skips the timelines (account-level analyses only).
    """
    path = Path(path)
    if not path.is_dir():
        raise FileNotFoundError(f"dataset directory not found: {path}")
    accounts = read_accounts(_find(path, "accounts"))
    tweets = read_tweets(_find(path, "tweets")) if tweets else []
    if snapshot_date is None:
        stamps = [a.created_at for a in accounts] + [t.timestamp for t in tweets]
        snapshot_date = max(stamps).date() if stamps else date(1970, 1, 1)
    ds = LabeledDataset(name or path.name, tuple(accounts), tuple(tweets), snapshot_date)
    logger.info("loaded %s: %d accounts, %d tweets", ds.name, len(ds.accounts), len(ds.tweets))
    return ds


def account_row(a: Account) -> list:
    return [
        a.id,
        a.screen_name,
        format_timestamp(a.created_at),
        a.followers_count,
        a.friends_count,
        "" if a.status.probe_code is None else a.status.probe_code,
        a.label,
        a.dataset_tag,
    ]


def tweet_row(t: Tweet) -> list:
    return [
        t.id,
        t.account_id,
        format_timestamp(t.timestamp),
        t.kind,
        LIST_SEP.join(t.urls),
        LIST_SEP.join(t.hashtags),
        LIST_SEP.join(t.mentions),
    ]


def _write(path: Path, columns: Iterable[str], rows: Iterable[list]) -> None:
    if path.suffix == ".gz":
        # mtime pinned so identical content gives identical bytes
        raw = gzip.GzipFile(path, "wb", mtime=0)
        fh = io.TextIOWrapper(raw, encoding="utf-8", newline="")
    else:
        fh = open(path, "w", encoding="utf-8", newline="")
    with fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(columns))
        w.writerows(rows)


def save_dataset(ds: LabeledDataset, path: str | Path, compress_tweets: bool = False) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    _write(path / "accounts.csv", ACCOUNT_COLUMNS, (account_row(a) for a in ds.accounts))
    tweets_name = "tweets.csv.gz" if compress_tweets else "tweets.csv"
    _write(path / tweets_name, TWEET_COLUMNS, (tweet_row(t) for t in ds.tweets))
    return path


# ---------------------------------------------------------------- test sets


def build_test_set(genuine: LabeledDataset, bots: LabeledDataset, seed: int = 0,
                   name: str | None = None,
                   members: Iterable[str] | None = None) -> TestSet:
    """Mix genuine and bot accounts 50/50.

    With ``members`` (an explicit id manifest) exactly those accounts are used,
    in manifest order. Otherwise every account of the smaller side is kept and
    the larger side is subsampled with ``numpy.random.default_rng(seed)``.
    """
    if not genuine.accounts or not bots.accounts:
        raise DatasetError("build_test_set needs two non-empty datasets")
    name = name or f"{bots.name}+{genuine.name}"
    if members is not None:
        index = {a.id: a for a in genuine.accounts}
        index.update({a.id: a for a in bots.accounts})
        members = list(members)
        missing = [m for m in members if m not in index]
        if missing:
            raise DatasetError(f"manifest ids not found in datasets: {missing[:20]}")
        return TestSet(name, tuple(index[m] for m in members))

    rng = np.random.default_rng(seed)
    n = min(len(genuine.accounts), len(bots.accounts))

    def pick(accounts: tuple[Account, ...]) -> list[Account]:
        if len(accounts) == n:
            return list(accounts)
        idx = np.sort(rng.choice(len(accounts), size=n, replace=False))
        return [accounts[i] for i in idx]

    return TestSet(name, tuple(pick(bots.accounts) + pick(genuine.accounts)))


def read_manifest(path: str | Path) -> list[str]:
    """Read a member-id manifest (one ``account_id`` column, header row)."""
    with _open_text(Path(path)) as fh:
        reader = csv.DictReader(fh)
        return [row["account_id"] for row in reader]


def write_manifest(ids: Iterable[str], path: str | Path) -> None:
    _write(Path(path), ["account_id"], ([i] for i in ids))
