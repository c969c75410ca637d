"""Deterministic synthetic fixtures shaped like the released datasets.

Account populations and their probe codes follow the published survivability
counts exactly. Timelines are synthetic and much shorter than the real ones;
they are generated only for the datasets the detectors consume (the genuine
accounts and the two social spambot groups used in the test sets). Spambot
groups replay a shared behavioural script, as coordinated accounts do, with a
small share of off-script members.
"""

from __future__ import annotations

import csv
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from .corpus import (
    ACCOUNT_COLUMNS,
    TWEET_COLUMNS,
    _write,
    format_timestamp,
    write_manifest,
)
from .evalkit import published
from .evalkit.annotations import ANNOTATION_COLUMNS

DEFAULT_SEED = 20170403
SNAPSHOT = datetime(2016, 6, 30, tzinfo=timezone.utc)

PREFIX = {
    "genuine_accounts": "gen",
    "social_spambots_1": "ss1",
    "social_spambots_2": "ss2",
    "social_spambots_3": "ss3",
    "traditional_spambots_1": "ts1",
    "traditional_spambots_2": "ts2",
    "traditional_spambots_3": "ts3",
    "traditional_spambots_4": "ts4",
    "fake_followers": "ff",
}
WITH_TIMELINES = ("genuine_accounts", "social_spambots_1", "social_spambots_3")
KIND_SYMBOL = {"plain": "A", "reply": "C", "retweet": "T"}
SYMBOL_KIND = {v: k for k, v in KIND_SYMBOL.items()}

# (year spread in years around the mean creation year, log10 followers mean, sd)
PROFILE = {
    "genuine_accounts": (2.5, 2.6, 0.7),
    "social_spambots_1": (0.15, 2.2, 0.15),
    "social_spambots_2": (0.2, 1.2, 0.2),
    "social_spambots_3": (0.15, 2.8, 0.15),
    "traditional_spambots_1": (0.8, 1.5, 0.5),
    "traditional_spambots_2": (0.5, 0.8, 0.4),
    "traditional_spambots_3": (0.5, 1.0, 0.4),
    "traditional_spambots_4": (0.8, 1.0, 0.4),
    "fake_followers": (0.6, 0.6, 0.4),
}


def _status_codes(name: str, n: int, rng: np.random.Generator) -> list[str]:
    counts = published.SURVIVAL_COUNTS.get(name)
    if counts is None:
        return [""] * n
    total, alive, deleted, suspended = counts
    if total != n:
        raise ValueError(f"{name}: population {n} != survivability total {total}")
    codes = [""] * alive + ["50"] * deleted + ["63"] * suspended
    rng.shuffle(codes)
    return codes


def _population(name: str) -> int:
    if name in published.SURVIVAL_COUNTS:
        return published.SURVIVAL_COUNTS[name][0]
    return published.DATASET_STATS[name][0]


def make_accounts(name: str, rng: np.random.Generator) -> list[list]:
    n = _population(name)
    year = published.DATASET_STATS[name][2]
    spread, f_mu, f_sd = PROFILE[name]
    center = datetime(year, 7, 1, tzinfo=timezone.utc)
    offsets = rng.uniform(-spread, spread, size=n) * 365.25 * 86400
    followers = np.floor(10 ** rng.normal(f_mu, f_sd, size=n)).astype(int)
    friends = np.floor(10 ** rng.normal(f_mu, f_sd + 0.2, size=n)).astype(int)
    codes = _status_codes(name, n, rng)
    label = "genuine" if name == published.GENUINE else "spambot"
    rows = []
    for i in range(n):
        created = min(center + timedelta(seconds=float(offsets[i])), SNAPSHOT)
        rows.append([
            f"{PREFIX[name]}-{i:05d}",
            f"{PREFIX[name]}_user{i}",
            format_timestamp(created.replace(microsecond=0)),
            int(followers[i]),
            int(friends[i]),
            codes[i],
            label,
            name,
        ])
    return rows


def _random_symbols(rng, n: int, probs) -> str:
    return "".join(rng.choice(list("ACT"), size=n, p=probs))


def _genuine_timeline(rng) -> tuple[str, dict]:
    probs = rng.dirichlet([4.0, 1.5, 2.5])
    dna = _random_symbols(rng, int(rng.integers(15, 46)), probs)
    style = {
        "url_rate": rng.uniform(0.0, 0.6),
        "tag_rate": rng.uniform(0.0, 0.8),
        "mention_rate": rng.uniform(0.0, 0.7),
        "url_pool": int(rng.integers(5, 200)),
        "tag_pool": int(rng.integers(5, 300)),
        "source_pool": int(rng.integers(5, 500)),
    }
    return dna, style


def _bot_script(rng, length: int, probs) -> str:
    return _random_symbols(rng, length, probs)


def make_timelines(name: str, account_ids: list[str], rng: np.random.Generator):
    """Yield ``(account_id, dna, style)`` per account."""
    if name == published.GENUINE:
        for aid in account_ids:
            dna, style = _genuine_timeline(rng)
            yield aid, dna, style
        return
    if name == "social_spambots_1":
        script = _bot_script(rng, 60, [0.15, 0.05, 0.80])
        style = {"url_rate": 0.05, "tag_rate": 0.9, "mention_rate": 0.1,
                 "url_pool": 3, "tag_pool": 4, "source_pool": 3}
    else:
        script = _bot_script(rng, 60, [0.70, 0.05, 0.25])
        style = {"url_rate": 0.95, "tag_rate": 0.3, "mention_rate": 0.05,
                 "url_pool": 6, "tag_pool": 3, "source_pool": 4}
    for aid in account_ids:
        if rng.random() < 0.03:
            dna, off_style = _genuine_timeline(rng)
            yield aid, dna, off_style
            continue
        head = _random_symbols(rng, int(rng.integers(0, 8)), [0.5, 0.2, 0.3])
        tail = _random_symbols(rng, int(rng.integers(0, 8)), [0.5, 0.2, 0.3])
        yield aid, head + script + tail, dict(style, shared=name)


def _pick(rng, pool: int, tag: str) -> str:
    # Zipf-like reuse of entity values
    return f"{tag}{int(min(rng.zipf(1.6), pool))}"


def tweet_rows(account_id: str, created: datetime, dna: str, style: dict,
               rng: np.random.Generator) -> list[list]:
    scope = style.get("shared", account_id)
    start = max(created, datetime(2012, 1, 1, tzinfo=timezone.utc))
    span = max((SNAPSHOT - start).total_seconds() - 86400, 3600.0)
    stamps = np.sort(rng.uniform(0, span, size=len(dna)))
    rows = []
    for i, (sym, off) in enumerate(zip(dna, stamps)):
        kind = SYMBOL_KIND[sym]
        ts = (start + timedelta(seconds=int(off))).replace(microsecond=0)
        urls = [_pick(rng, style["url_pool"], f"u.{scope}.")] if rng.random() < style["url_rate"] else []
        tags = [_pick(rng, style["tag_pool"], f"#{scope}.")] if rng.random() < style["tag_rate"] else []
        mentions = []
        if kind == "retweet":
            mentions.append(_pick(rng, style["source_pool"], f"@{scope}.src"))
        elif kind == "reply" or rng.random() < style["mention_rate"]:
            mentions.append(_pick(rng, style["source_pool"], f"@{scope}.m"))
        rows.append([f"{account_id}-{i:04d}", account_id, format_timestamp(ts), kind,
                     ";".join(urls), ";".join(tags), ";".join(mentions)])
    return rows


def write_dataset_fixture(root: Path, name: str, rng: np.random.Generator) -> list[list]:
    directory = root / name
    directory.mkdir(parents=True, exist_ok=True)
    accounts = make_accounts(name, rng)
    _write(directory / "accounts.csv", ACCOUNT_COLUMNS, accounts)
    tweets: list[list] = []
    if name in WITH_TIMELINES:
        created = {row[0]: datetime.strptime(row[2], "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=timezone.utc)
                   for row in accounts}
        for aid, dna, style in make_timelines(name, [r[0] for r in accounts], rng):
            tweets.extend(tweet_rows(aid, created[aid], dna, style, rng))
    _write(directory / "tweets.csv.gz", TWEET_COLUMNS, tweets)
    return accounts


def write_manifests(root: Path, accounts: dict[str, list[list]], rng: np.random.Generator) -> None:
    genuine_ids = [r[0] for r in accounts[published.GENUINE]]
    for test_set, (bot_name, size) in published.TEST_SETS.items():
        half = size // 2
        bot_ids = [r[0] for r in accounts[bot_name]]
        bots = sorted(rng.choice(bot_ids, size=half, replace=False).tolist())
        genuine = sorted(rng.choice(genuine_ids, size=half, replace=False).tolist())
        write_manifest(bots + genuine, root / f"{test_set}.csv")


def _answer_rows(rng, group: str, truth: str, n_accounts: int, majority: dict[str, int],
                 contributors: list[str], prefix: str) -> list[list]:
    """Three trusted answers per account with the requested majority outcomes."""
    finals = [label for label, k in majority.items() for _ in range(k)]
    if len(finals) != n_accounts:
        raise ValueError("majority counts do not add up to the account count")
    rng.shuffle(finals)
    rows = []
    for i, final in enumerate(finals):
        other = [a for a in ("spambot", "genuine", "unable_to_classify") if a != final]
        # 2-of-3 or 3-of-3 agreement on the final class
        answers = [final, final, final if rng.random() < 0.5 else str(rng.choice(other))]
        rng.shuffle(answers)
        raters = rng.choice(contributors, size=3, replace=False)
        for who, ans in zip(raters, answers):
            rows.append([f"{prefix}{i:05d}", group, truth, str(who), ans, 0])
    return rows


def write_annotations(path: Path, rng: np.random.Generator) -> None:
    """Synthetic crowdsourcing answers whose majority votes give the published
    per-group confusion counts. Accounts lost during the campaign are answered
    "unable_to_classify"; untrusted contributors add noise that gating removes.
    """
    trusted = [f"c{i:03d}" for i in range(200)]
    untrusted = [f"c{i:03d}" for i in range(200, published.CROWD_CONTRIBUTORS)]
    gold_truth = ["spambot"] * 10 + ["genuine"] * 10 + ["unable_to_classify"] * 5
    rows: list[list] = []
    for c in trusted + untrusted:
        accuracy = rng.uniform(0.76, 1.0) if c in trusted else rng.uniform(0.2, 0.68)
        n_right = int(np.floor(accuracy * len(gold_truth)))
        right = set(rng.choice(len(gold_truth), size=n_right, replace=False).tolist())
        for q, truth in enumerate(gold_truth):
            ans = truth if q in right else [a for a in ("spambot", "genuine", "unable_to_classify")
                                             if a != truth][int(rng.integers(0, 2))]
            rows.append([f"gold{q:02d}", "gold", truth, c, ans, 1])

    lost = published.CROWD_ACCOUNTS_REQUESTED - sum(v[0] for v in published.CROWD_RESULTS.values())
    lost_split = {"traditional_spambots": lost // 3, "social_spambots": lost // 3}
    lost_split["genuine_accounts"] = lost - sum(lost_split.values())
    truth_of = {"traditional_spambots": "spambot", "social_spambots": "spambot",
                "genuine_accounts": "genuine"}
    for group, (n, tp, tn, fp, fn, _acc, _kappa) in published.CROWD_RESULTS.items():
        truth = truth_of[group]
        if truth == "spambot":
            majority = {"spambot": tp, "genuine": fn}
        else:
            majority = {"genuine": tn, "spambot": fp}
        majority["unable_to_classify"] = lost_split[group]
        rows.extend(_answer_rows(rng, group, truth, n + lost_split[group], majority, trusted,
                                 prefix=f"{group[:3]}-"))
        # noise from contributors that fail the gold gate
        for i in range(0, n, 7):
            who = str(rng.choice(untrusted))
            rows.append([f"{group[:3]}-{i:05d}", group, truth, who,
                         str(rng.choice(["spambot", "genuine", "unable_to_classify"])), 0])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ANNOTATION_COLUMNS)
        w.writerows(rows)


def write_fixtures(root: str | Path, seed: int = DEFAULT_SEED) -> Path:
    """Write every fixture under ``root``; identical seeds give identical bytes."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    accounts = {}
    for name in published.DATASET_STATS:
        accounts[name] = write_dataset_fixture(root, name, np.random.default_rng(rng.integers(2**63)))
    write_manifests(root, accounts, np.random.default_rng(rng.integers(2**63)))
    write_annotations(root / "annotations.csv", np.random.default_rng(rng.integers(2**63)))
    return root


def default_fixture_root() -> Path:
    return Path(__file__).resolve().parent / "data" / "fixtures"
