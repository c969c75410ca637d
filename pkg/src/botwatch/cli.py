"""``botwatch`` command line.

Exit codes: 0 success, 1 unexpected error, 2 invalid configuration or
arguments, 3 dataset / input file could not be loaded.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import pipelines
from .config import ConfigError, load_config
from .fixtures import DEFAULT_SEED, write_fixtures

EXIT_OK, EXIT_ERROR, EXIT_CONFIG, EXIT_DATA = 0, 1, 2, 3

log = logging.getLogger("botwatch")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML run configuration")
    p.add_argument("--seed", type=int, help="override params.seed")
    p.add_argument("--out", help="output directory (overrides config 'out')")
    p.add_argument("--fixtures", help="fixture root (default: $BOTWATCH_FIXTURES or bundled)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="botwatch", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="load and validate datasets, echo row counts")
    _common(p)
    p.add_argument("datasets", nargs="*", help="dataset names or directories")

    for name, text in (("detect-dna", "digital-DNA LCS group detector"),
                       ("detect-graph", "feature-graph fastgreedy detector")):
        p = sub.add_parser(name, help=text)
        _common(p)
        p.add_argument("--test-set", help="test-set manifest name or path")
        p.add_argument("--bots", help="spambot dataset name or path")

    p = sub.add_parser("detect-dist", help="reputation-distribution tamper test")
    _common(p)
    p.add_argument("--bots", help="suspect dataset name or path")
    p.add_argument("--threshold", type=float, help="fixed KL threshold (default: calibrated)")

    p = sub.add_parser("score-external", help="score a third-party per-account verdict file")
    _common(p)
    p.add_argument("--test-set", help="test-set manifest name or path")
    p.add_argument("--bots", help="spambot dataset name or path")
    p.add_argument("--verdicts", help="TSV file: account_id, verdict")

    p = sub.add_parser("survivability", help="alive/deleted/suspended breakdown")
    _common(p)
    p.add_argument("datasets", nargs="*")

    p = sub.add_parser("annotations", help="crowdsourcing analytics (gating, vote, kappa)")
    _common(p)
    p.add_argument("--answers", help="annotation answers CSV")

    p = sub.add_parser("table", help="emit a replica evaluation table")
    _common(p)
    p.add_argument("which", choices=pipelines.TABLES)

    p = sub.add_parser("make-fixtures", help="regenerate the synthetic fixtures")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    return parser


def _config(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.params.seed = args.seed
    if args.out:
        cfg.out = args.out
    if getattr(args, "fixtures", None):
        cfg.fixtures = args.fixtures
    for attr in ("test_set", "bots", "verdicts"):
        value = getattr(args, attr, None)
        if value:
            setattr(cfg, attr, value)
    if getattr(args, "datasets", None):
        cfg.datasets = list(args.datasets)
    if getattr(args, "threshold", None) is not None:
        cfg.params.threshold = args.threshold
    return cfg.validate()


def dispatch(args) -> int:
    if args.command == "make-fixtures":
        root = write_fixtures(args.out, args.seed)
        print(f"fixtures written to {root}")
        return EXIT_OK

    cfg = _config(args)
    cmd = args.command
    if cmd == "ingest":
        for r in pipelines.run_ingest(cfg):
            print(f"{r['dataset']}: {r['accounts']:,} accounts, {r['tweets']:,} tweets")
    elif cmd in ("detect-dna", "detect-graph"):
        cfg.detector = "dna" if cmd == "detect-dna" else "graph"
        run = pipelines.run_dna if cmd == "detect-dna" else pipelines.run_graph
        m = run(cfg)
        print("  ".join(f"{k}={v:.3f}" for k, v in m.as_dict().items()))
    elif cmd == "detect-dist":
        cfg.detector = "dist"
        for r in pipelines.run_dist(cfg):
            print(f"{r['group']} [{r['score_kind']}]: KL={r['kl_value']:.4f} "
                  f"threshold={r['threshold']:.4f} tampered={r['tampered']}")
    elif cmd == "score-external":
        cfg.detector = "external-adapter"
        m = pipelines.run_external(cfg)
        print("  ".join(f"{k}={v:.3f}" for k, v in m.as_dict().items()))
    elif cmd == "survivability":
        print(pipelines.run_survivability(cfg).to_text(), end="")
    elif cmd == "annotations":
        result = pipelines.run_annotations(cfg, args.answers)
        for g in result.groups:
            kappa = "undefined" if g.kappa is None else f"{g.kappa:.3f}"
            print(f"{g.group}: accuracy={g.accuracy:.4f} kappa={kappa}")
    elif cmd == "table":
        print(pipelines.run_table(cfg, args.which), end="")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return dispatch(args)
    except ConfigError as exc:
        print(f"botwatch: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except pipelines.DataLoadError as exc:
        print(f"botwatch: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001 - top-level diagnostic
        log.debug("unhandled error", exc_info=True)
        print(f"botwatch: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
