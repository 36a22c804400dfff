"""Command line: ``analyze``, ``synth`` and ``oracle-check``."""

from __future__ import annotations

import argparse
import logging
import random
import sys
import time
from datetime import date
from pathlib import Path

from . import centrality
from .events import serialize_events
from .graph import InteractionGraph
from .pipeline import (ConfigError, InputError, PipelineConfig, PipelineError, read_flat_config,
                       run_pipeline)
from .synth import SynthConfig, generate

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INTERNAL = 0, 2, 3, 4

log = logging.getLogger("bugsna")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def synth_config_from_file(path: str | Path) -> tuple[SynthConfig, Path]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    raw = read_flat_config(path)
    out = path.parent / raw.pop("output_dir", "synth_out")
    kw = {}
    try:
        for key, text in raw.items():
            if key == "release_days":
                kw[key] = tuple(int(t) for t in text.split(",") if t.strip())
            elif key == "start_date":
                kw[key] = date.fromisoformat(text)
            elif key in ("base_rate", "burst_rate"):
                kw[key] = float(text)
            elif key in SynthConfig.__dataclass_fields__:
                kw[key] = int(text)
            else:
                raise ConfigError(f"unknown synth config key {key!r}")
    except ValueError as exc:
        raise ConfigError(f"bad synth config value: {exc}") from None
    cfg = SynthConfig(**kw)
    try:
        cfg.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg, out


def cmd_analyze(args) -> int:
    cfg = PipelineConfig.from_file(args.config)
    manifest = run_pipeline(cfg)
    counts = manifest["counts"]
    print(f"{counts['windows']} windows, {counts['participants_nonzero']}/{counts['participants_seen']} "
          f"participants with non-zero betweenness, labels {counts['labels']}")
    print(f"wrote {len(manifest['artifacts'])} artifacts to {cfg.output_dir}")
    return EXIT_OK


def cmd_synth(args) -> int:
    cfg, out = synth_config_from_file(args.config)
    elog, truth = generate(cfg)
    out.mkdir(parents=True, exist_ok=True)
    (out / "events.jsonl").write_bytes(serialize_events(elog))
    truth.write_csv(out / "ground_truth.csv")
    (out / "analyze.conf").write_text(
        "events = events.jsonl\n"
        f"range_start = {cfg.start_date.isoformat()}\n"
        f"range_end = {cfg.last_date.isoformat()}\n"
        "output_dir = analysis\n")
    print(f"wrote {len(elog.events)} events for {len(truth.labels)} planted participants to {out}")
    return EXIT_OK


def random_graph(rng: random.Random, max_nodes: int, max_weight: int = 5) -> InteractionGraph:
    n = rng.randint(1, max_nodes)
    p = rng.uniform(0.15, 0.7)
    nodes = [f"v{i}" for i in range(n)]
    edges = [(nodes[i], nodes[j], rng.randint(1, max_weight))
             for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return InteractionGraph.from_edges(edges, nodes)


def oracle_check(trials: int, max_nodes: int, seed: int, tol: float = 1e-9) -> tuple[int, float]:
    """Compare fast and brute-force betweenness; returns (mismatches, worst error)."""
    rng = random.Random(seed)
    bad, worst = 0, 0.0
    for _ in range(trials):
        g = random_graph(rng, max_nodes)
        for mode in centrality.DISTANCE_MODES:
            fast = centrality.betweenness(g, mode)
            slow = centrality.betweenness_bruteforce(g, mode, max_nodes=max_nodes)
            err = max((abs(fast[v] - slow[v]) for v in g.nodes), default=0.0)
            worst = max(worst, err)
            bad += err > tol
    return bad, worst


def cmd_oracle_check(args) -> int:
    if args.max_nodes < 1:
        raise ConfigError("--max-nodes must be >= 1")
    t0 = time.perf_counter()
    bad, worst = oracle_check(args.trials, args.max_nodes, args.seed)
    print(f"{args.trials} graphs x {len(centrality.DISTANCE_MODES)} modes: {bad} mismatches, "
          f"max |fast - brute| = {worst:.3g} ({time.perf_counter() - t0:.1f}s)")
    return EXIT_OK if bad == 0 else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bugsna", description="Sliding-window betweenness analysis of bug-tracker activity")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    a = sub.add_parser("analyze", help="run the full pipeline")
    a.add_argument("--config", required=True)
    a.set_defaults(func=cmd_analyze)
    s = sub.add_parser("synth", help="generate a synthetic event log with ground truth")
    s.add_argument("--config", required=True)
    s.set_defaults(func=cmd_synth)
    o = sub.add_parser("oracle-check", help="compare fast and brute-force betweenness")
    o.add_argument("--max-nodes", type=int, default=10)
    o.add_argument("--trials", type=int, default=500)
    o.add_argument("--seed", type=int, default=0)
    o.set_defaults(func=cmd_oracle_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PipelineError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        log.exception("unexpected failure")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
