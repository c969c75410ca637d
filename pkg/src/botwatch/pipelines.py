"""End-to-end runs behind the command line: load, detect, score, write reports.

Every run writes into ``cfg.out``; each text report starts with a header that
echoes the full configuration, and nothing time- or host-dependent is written,
so identical configs give byte-identical reports.
"""

from __future__ import annotations

import csv
import json
import logging
import warnings
from pathlib import Path
from typing import Mapping

import numpy as np

from . import disttest
from .config import RunConfig
from .corpus import DatasetError, LabeledDataset, TestSet, build_test_set, load_dataset, read_manifest
from .dna import DnaAlphabet, DnaEncoder, DnaSequence, classify_group, find_split, lcs_curve
from .evalkit import published, tables
from .evalkit.annotations import analyze_campaign, read_answers
from .evalkit.metrics import (
    METRIC_NAMES,
    ConfusionMatrix,
    MetricsReport,
    metrics_from_confusion,
    score_verdicts,
)
from .evalkit.survival import survivability
from .graph import (
    DegeneratePartitionWarning,
    build_graph,
    extract_features,
    fastgreedy,
    label_clusters,
)

logger = logging.getLogger(__name__)


class DataLoadError(RuntimeError):
    """A dataset, manifest or input file could not be read (exit code 3)."""


# ------------------------------------------------------------------ output


def _header(command: str, cfg: RunConfig) -> str:
    return f"# botwatch {command}\n# config: {json.dumps(cfg.echo(), sort_keys=True)}\n"


def _write_text(out: Path, name: str, command: str, cfg: RunConfig, body: str) -> Path:
    path = out / name
    path.write_text(_header(command, cfg) + body, encoding="utf-8")
    return path


def _write_json(out: Path, name: str, command: str, cfg: RunConfig, payload: dict) -> Path:
    path = out / name
    doc = {"command": command, "config": cfg.echo(), **payload}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def metrics_text(cm: ConfusionMatrix, m: MetricsReport) -> str:
    head = "TP\tTN\tFP\tFN\t" + "\t".join(n.replace("_", "-") for n in METRIC_NAMES)
    return head + "\n" + f"{cm.tp}\t{cm.tn}\t{cm.fp}\t{cm.fn}\t" + "\t".join(m.row(3)) + "\n"


def _write_scores(out: Path, command: str, cfg: RunConfig, truth: Mapping[str, str],
                  verdicts: Mapping[str, str], extra: dict | None = None) -> MetricsReport:
    cm = score_verdicts(truth, verdicts)
    m = metrics_from_confusion(cm)
    rows = "account_id\ttruth\tverdict\n" + "".join(
        f"{a}\t{truth[a]}\t{verdicts[a]}\n" for a in truth
    )
    _write_text(out, "verdicts.tsv", command, cfg, rows)
    _write_text(out, "metrics.tsv", command, cfg, metrics_text(cm, m))
    payload = {"confusion": {"tp": cm.tp, "tn": cm.tn, "fp": cm.fp, "fn": cm.fn},
               "metrics": {k: round(v, 6) for k, v in m.as_dict().items()}}
    payload.update(extra or {})
    _write_json(out, "metrics.json", command, cfg, payload)
    return m


# ------------------------------------------------------------------ loading


def load(cfg: RunConfig, ref: str, tweets: bool = True) -> LabeledDataset:
    path = cfg.resolve(ref)
    try:
        return load_dataset(path, name=Path(ref).name, tweets=tweets)
    except (FileNotFoundError, DatasetError) as exc:
        raise DataLoadError(f"cannot load dataset {path}: {exc}") from exc


def load_test_set(cfg: RunConfig) -> tuple[TestSet, dict[str, LabeledDataset]]:
    genuine, bots = load(cfg, cfg.genuine), load(cfg, cfg.bots)
    members = None
    name = f"{bots.name}+{genuine.name}"
    if cfg.test_set:
        manifest = cfg.resolve(cfg.test_set)
        try:
            members = read_manifest(manifest)
        except FileNotFoundError as exc:
            raise DataLoadError(f"cannot read test-set manifest {manifest}") from exc
        name = Path(cfg.test_set).stem
    try:
        ts = build_test_set(genuine, bots, seed=cfg.params.seed, name=name, members=members)
    except DatasetError as exc:
        raise DataLoadError(str(exc)) from exc
    source = {a.id: genuine for a in genuine.accounts}
    source.update({a.id: bots for a in bots.accounts})
    return ts, {a.id: source[a.id] for a in ts.members}


def _truth(ts: TestSet) -> dict[str, str]:
    return {a.id: a.label for a in ts.members}


def _out(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ------------------------------------------------------------------ detectors


def run_dna(cfg: RunConfig) -> MetricsReport:
    ts, source = load_test_set(cfg)
    encoder = DnaEncoder(DnaAlphabet(cfg.params.alphabet)).fit(None)
    strings = encoder.transform([source[a.id].timeline(a.id) for a in ts.members])
    seqs = [DnaSequence(a.id, s) for a, s in zip(ts.members, strings)]
    curve = lcs_curve(seqs)
    k_star = find_split(curve)
    if k_star is not None and k_star < cfg.params.min_group:
        k_star = None
    split = classify_group(seqs, curve, k_star)

    out = _out(cfg)
    _write_text(out, "curve.tsv", "detect-dna", cfg, curve.to_text())
    _write_text(out, "split.tsv", "detect-dna", cfg, split.to_text())
    return _write_scores(out, "detect-dna", cfg, _truth(ts), split.verdicts,
                         {"k_star": k_star, "witness_length": len(split.witness),
                          "test_set": ts.name, "accounts": len(ts.members)})


def run_graph(cfg: RunConfig) -> MetricsReport:
    ts, source = load_test_set(cfg)
    vectors = [extract_features(a.id, source[a.id].timeline(a.id)) for a in ts.members]
    graph = build_graph(vectors)
    partition = fastgreedy(graph)
    calibration = None
    if cfg.params.label_mode == "calibration":
        rng = np.random.default_rng(cfg.params.seed)
        n = max(1, int(round(cfg.params.calibration_fraction * len(ts.members))))
        picked = sorted(rng.choice(len(ts.members), size=n, replace=False).tolist())
        calibration = {ts.members[i].id: ts.members[i].label for i in picked}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DegeneratePartitionWarning)
        labeling = label_clusters(partition, graph, calibration)
    degenerate = any(issubclass(w.category, DegeneratePartitionWarning) for w in caught)
    if degenerate:
        logger.warning("degenerate partition: every account is in one community")

    out = _out(cfg)
    membership = partition.membership()
    rows = "account_id\tcommunity_id\tverdict\n" + "".join(
        f"{a}\t{membership[a]}\t{labeling.verdicts[a]}\n" for a in graph.nodes
    )
    _write_text(out, "partition.tsv", "detect-graph", cfg, rows)
    if cfg.params.export_graph:
        _write_text(out, "graph.tsv", "detect-graph", cfg, graph.to_text())
    return _write_scores(out, "detect-graph", cfg, _truth(ts), labeling.verdicts, {
        "communities": len(partition.communities),
        "modularity": round(partition.modularity, 6),
        "degenerate_partition": degenerate,
        "heuristic_fallback_communities": list(labeling.heuristic_fallback),
        "test_set": ts.name,
    })


def run_dist(cfg: RunConfig) -> list[dict]:
    genuine, bots = load(cfg, cfg.genuine, tweets=False), load(cfg, cfg.bots, tweets=False)
    reference = list(genuine.accounts)
    rng = np.random.default_rng(cfg.params.seed)
    perm = rng.permutation(len(reference))
    half = len(reference) // 2
    control = [reference[i] for i in perm[:half]]
    control_ref = [reference[i] for i in perm[half:]]
    groups = [(bots.name, list(bots.accounts), reference),
              (f"{genuine.name}[random half]", control, control_ref)]

    out = _out(cfg)
    results, lines = [], ["group\tscore_kind\tkl_value\tthreshold\ttampered"]
    for kind in cfg.params.score_kinds:
        for name, suspect, ref in groups:
            det = disttest.DistributionTamperDetector(
                score_kind=kind, bin_count=cfg.params.bin_count, threshold=cfg.params.threshold,
                quantile=cfg.params.quantile, n_boot=cfg.params.n_boot,
                sample_size=len(suspect), random_state=cfg.params.seed,
            ).fit(ref)
            verdict = det.predict(suspect)
            results.append({"group": name, "score_kind": kind, "kl_value": round(verdict.kl_value, 6),
                            "threshold": round(verdict.threshold, 6), "tampered": verdict.tampered})
            lines.append(f"{name}\t{kind}\t{verdict.kl_value:.6f}\t{verdict.threshold:.6f}"
                         f"\t{str(verdict.tampered).lower()}")
            suspect_dist = disttest.distribution(
                disttest.score_values(suspect, kind), kind, det.edges_)
            safe = name.replace("[", "_").replace("]", "").replace(" ", "_")
            _write_text(out, f"distribution_{safe}_{kind}.tsv", "detect-dist", cfg,
                        suspect_dist.to_text())
        reference_dist = disttest.histogram(reference, kind, cfg.params.bin_count)
        _write_text(out, f"distribution_reference_{kind}.tsv", "detect-dist", cfg,
                    reference_dist.to_text())
    _write_text(out, "verdicts.tsv", "detect-dist", cfg, "\n".join(lines) + "\n")
    _write_json(out, "verdicts.json", "detect-dist", cfg, {"results": results})
    return results


def read_verdict_file(path: Path) -> dict[str, str]:
    try:
        fh = open(path, encoding="utf-8", newline="")
    except FileNotFoundError as exc:
        raise DataLoadError(f"verdict file not found: {path}") from exc
    with fh:
        reader = csv.reader((line for line in fh if not line.startswith("#")), delimiter="\t")
        rows = list(reader)
    if rows and rows[0][:2] == ["account_id", "verdict"]:
        rows = rows[1:]
    out = {}
    for i, row in enumerate(rows, start=2):
        if len(row) < 2 or row[1] not in ("spambot", "genuine"):
            raise DataLoadError(f"{path}:{i}: expected 'account_id<TAB>spambot|genuine'")
        out[row[0]] = row[1]
    return out


def run_external(cfg: RunConfig, verdict_path: str | Path | None = None) -> MetricsReport:
    ts, _ = load_test_set(cfg)
    path = Path(verdict_path or cfg.verdicts or "")
    if not str(path) or str(path) == ".":
        raise DataLoadError("score-external needs a verdict file (--verdicts or config 'verdicts')")
    verdicts = read_verdict_file(path)
    truth = _truth(ts)
    missing = [a for a in truth if a not in verdicts]
    if missing:
        raise DataLoadError(f"verdict file lacks {len(missing)} test-set accounts: {missing[:20]}")
    return _write_scores(_out(cfg), "score-external", cfg, truth, verdicts,
                         {"test_set": ts.name, "verdict_file": path.name})


# ------------------------------------------------------------------ evaluation


def run_ingest(cfg: RunConfig) -> list[dict]:
    names = cfg.datasets or list(published.DATASET_STATS)
    rows = []
    for ref in names:
        ds = load(cfg, ref)
        expected = published.DATASET_STATS.get(ds.name, (None,))[0]
        rows.append({"dataset": ds.name, "accounts": len(ds.accounts), "tweets": len(ds.tweets),
                     "published_accounts": expected})
    body = "dataset\taccounts\ttweets\tpublished_accounts\n" + "".join(
        f"{r['dataset']}\t{r['accounts']}\t{r['tweets']}\t{r['published_accounts'] or '-'}\n"
        for r in rows
    )
    out = _out(cfg)
    _write_text(out, "ingest.tsv", "ingest", cfg, body)
    _write_json(out, "ingest.json", "ingest", cfg, {"datasets": rows})
    return rows


def _survival_report(cfg: RunConfig):
    names = cfg.datasets or list(published.SURVIVAL_COUNTS)
    return survivability([load(cfg, n, tweets=False) for n in names])


def run_survivability(cfg: RunConfig):
    report = _survival_report(cfg)
    out = _out(cfg)
    _write_text(out, "survivability.tsv", "survivability", cfg, report.to_text())
    _write_json(out, "survivability.json", "survivability", cfg, {"rows": report.records()})
    return report


def run_annotations(cfg: RunConfig, path: str | Path | None = None):
    source = Path(path) if path else cfg.resolve(cfg.annotations)
    try:
        answers = read_answers(source)
    except FileNotFoundError as exc:
        raise DataLoadError(f"annotation file not found: {source}") from exc
    except ValueError as exc:
        raise DataLoadError(str(exc)) from exc
    result = analyze_campaign(answers, group_order=list(published.CROWD_RESULTS))
    rows = [{"type": g.group, "accounts": g.accounts, "tp": g.confusion.tp, "tn": g.confusion.tn,
             "fp": g.confusion.fp, "fn": g.confusion.fn, "accuracy": g.accuracy, "kappa": g.kappa}
            for g in result.groups]
    out = _out(cfg)
    _write_text(out, "annotations.tsv", "annotations", cfg, tables.table4_text(rows))
    _write_json(out, "annotations.json", "annotations", cfg, {
        "trusted_contributors": len(result.trusted),
        "dropped_accounts": len(result.dropped),
        "groups": [{k: (round(v, 6) if isinstance(v, float) else v) for k, v in r.items()}
                   for r in rows],
    })
    return result


TABLES = ("table2", "table3", "table4", "table7-consistency")


def run_table(cfg: RunConfig, which: str) -> str:
    if which not in TABLES:
        raise ValueError(f"unknown table {which!r}; choose from {TABLES}")
    if which == "table2":
        body = tables.table2_text(_survival_report(cfg))
    elif which == "table3":
        body = tables.table3_text(_survival_report(cfg))
    elif which == "table4":
        body = tables.table4_text(tables.table4_rows())
    else:
        body = tables.table7_text(tables.table7_consistency())
    _write_text(_out(cfg), f"{which}.tsv", f"table {which}", cfg, body)
    return body
