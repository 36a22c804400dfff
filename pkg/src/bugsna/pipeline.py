"""End-to-end analysis: events -> windows -> graphs -> centrality -> patterns -> clusters."""

from __future__ import annotations

import csv
import dataclasses
import logging
import os
import shutil
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable

from . import activity, centrality, clustering, expertise, identity, report
from .events import EventFormatError, filter_date_range, read_events
from .graph import PRIOR_SCOPES, iter_graphs, write_edge_list
from .windows import enumerate_windows

log = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "BUGSNA_OUTPUT_DIR"


class ConfigError(ValueError):
    """Bad or incomplete configuration (CLI exit status 2)."""


class InputError(RuntimeError):
    """Unreadable or inconsistent input data (CLI exit status 3)."""


class PipelineError(RuntimeError):
    """Unexpected failure inside a stage (CLI exit status 4)."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
        self.stage = stage


def read_flat_config(path: str | Path) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class PipelineConfig:
    events: Path
    output_dir: Path = Path("out")
    events_format: str | None = None
    commits: Path | None = None
    merges: Path | None = None
    release_dates: Path | None = None
    common_names: Path | None = None
    window_days: int = 30
    slide_days: int = 1
    range_start: date | None = None
    range_end: date | None = None
    distance_mode: str = "weight"
    prior_scope: str = "window"
    k: int = 100
    seed: int = 0
    max_iter: int = 300
    continuous_threshold: float = activity.DEFAULT_CONTINUOUS_THRESHOLD
    ambiguity_length: int = identity.DEFAULT_AMBIGUITY_LENGTH
    casefold: bool = False
    naive_windows: bool = False
    log_scale: bool = False
    export_graphs: bool = False
    workers: int = 1

    @classmethod
    def from_mapping(cls, raw: dict[str, str], base: Path = Path(".")) -> "PipelineConfig":
        fields = {f.name: f for f in dataclasses.fields(cls)}
        unknown = set(raw) - set(fields)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if not raw.get("events"):
            raise ConfigError("config must set 'events'")
        kw = {}
        try:
            for key, text in raw.items():
                if key in ("events", "output_dir", "commits", "merges", "release_dates", "common_names"):
                    kw[key] = (base / text) if text else None
                elif key in ("range_start", "range_end"):
                    kw[key] = date.fromisoformat(text) if text else None
                elif key in ("casefold", "naive_windows", "log_scale", "export_graphs"):
                    kw[key] = _bool(text)
                elif key == "continuous_threshold":
                    kw[key] = float(text)
                elif key in ("distance_mode", "prior_scope", "events_format"):
                    kw[key] = text or None
                else:
                    kw[key] = int(text)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}") from None
        if kw.get("output_dir") is None:
            kw.pop("output_dir", None)
        cfg = cls(**kw)
        env_out = os.environ.get(OUTPUT_DIR_ENV)
        if env_out:
            cfg = dataclasses.replace(cfg, output_dir=Path(env_out))
        cfg.check()
        return cfg

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        return cls.from_mapping(read_flat_config(path), base=path.parent)

    def check(self) -> None:
        if self.window_days < 1 or self.slide_days < 1:
            raise ConfigError("window_days and slide_days must be >= 1")
        if self.distance_mode not in centrality.DISTANCE_MODES:
            raise ConfigError(f"distance_mode must be one of {centrality.DISTANCE_MODES}")
        if self.prior_scope not in PRIOR_SCOPES:
            raise ConfigError(f"prior_scope must be one of {PRIOR_SCOPES}")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if not 0 < self.continuous_threshold <= 1:
            raise ConfigError("continuous_threshold must be in (0, 1]")
        if (self.range_start is None) != (self.range_end is None):
            raise ConfigError("range_start and range_end must be given together")
        if self.range_start and self.range_start > self.range_end:
            raise ConfigError("range_start is after range_end")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def echo(self) -> dict[str, str]:
        """Config values that determine the outputs (paths by file name only)."""
        out = {}
        for f in dataclasses.fields(self):
            if f.name in ("output_dir", "workers"):
                continue
            v = getattr(self, f.name)
            out[f.name] = v.name if isinstance(v, Path) else ("" if v is None else str(v))
        return out


def read_release_dates(path: str | Path) -> dict[date, str]:
    """CSV ``date,label`` (header optional)."""
    out = {}
    with Path(path).open(newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().lower() in ("", "date") or row[0].startswith("#"):
                continue
            day = date.fromisoformat(row[0].strip())
            out[day] = row[1].strip() if len(row) > 1 and row[1].strip() else day.isoformat()
    return out


def _centrality_task(args):
    g, mode = args
    return centrality.window_centrality(g, mode)


def _window_records(graphs: Iterable, mode: str, workers: int) -> list[centrality.CentralityRecord]:
    records: list[centrality.CentralityRecord] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for recs in pool.map(_centrality_task, ((g, mode) for g in graphs), chunksize=8):
                records.extend(recs)
        return records
    previous = None
    for g in graphs:
        if previous is not None and previous[0].nodes == g.nodes and previous[0].edges == g.edges:
            # overlapping windows often yield the same graph
            recs = [dataclasses.replace(r, window_index=g.window.index) for r in previous[1]]
        else:
            recs = centrality.window_centrality(g, mode)
        previous = (g, recs)
        records.extend(recs)
    return records


def _stage(name):
    def wrap(fn):
        def inner(*a, **kw):
            try:
                return fn(*a, **kw)
            except (ConfigError, InputError, PipelineError):
                raise
            except Exception as exc:
                raise PipelineError(name, exc) from exc
        return inner
    return wrap


@_stage("event_model_ingest")
def _load_events(cfg: PipelineConfig):
    if not cfg.events.is_file():
        raise InputError(f"[event_model_ingest] events file not found: {cfg.events}")
    try:
        elog = read_events(cfg.events, cfg.events_format)
    except (EventFormatError, OSError) as exc:
        raise InputError(f"[event_model_ingest] {exc}") from exc
    if cfg.range_start is not None:
        elog = filter_date_range(elog, cfg.range_start, cfg.range_end)
    if elog.date_range is None:
        raise InputError("[event_model_ingest] event log is empty")
    return elog


@_stage("expertise_mapper")
def _expertise(cfg, participants, assignment, merges, out):
    if not cfg.commits.is_file():
        raise InputError(f"[expertise_mapper] commits file not found: {cfg.commits}")
    try:
        commits = expertise.read_commits(cfg.commits)
    except EventFormatError as exc:
        raise InputError(f"[expertise_mapper] {exc}") from exc
    profiles = expertise.expertise_profiles(participants, commits.commits, merges, cfg.casefold)
    expertise.write_expertise_csv(profiles, out / "expertise.csv")
    files = ["expertise.csv"]
    if assignment is not None:
        summaries = [expertise.cluster_expertise_summary(assignment.members(c), profiles, c)
                     for c in range(assignment.k)]
        expertise.write_cluster_expertise_csv(summaries, out / "cluster_expertise.csv")
        files.append("cluster_expertise.csv")
    return files, len(commits.rejects)


def run_pipeline(cfg: PipelineConfig) -> dict:
    """Run every stage, write artifacts to ``cfg.output_dir`` and return the manifest."""
    elog = _load_events(cfg)
    first_day, last_day = elog.date_range

    try:
        merges = identity.read_merges(cfg.merges) if cfg.merges else {}
        common = identity.read_name_list(cfg.common_names) if cfg.common_names else []
        releases = read_release_dates(cfg.release_dates) if cfg.release_dates else None
    except (OSError, ValueError) as exc:
        raise InputError(f"[cli_report] auxiliary input: {exc}") from exc

    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=cfg.output_dir))
    try:
        manifest = _run_stages(cfg, elog, first_day, last_day, merges, common, releases, staging)
        for item in sorted(staging.iterdir()):
            target = cfg.output_dir / item.name
            if target.is_dir():
                shutil.rmtree(target)
            os.replace(item, target)
        return manifest
    finally:
        shutil.rmtree(staging, ignore_errors=True)


def _run_stages(cfg, elog, first_day, last_day, merges, common, releases, out: Path) -> dict:
    files: list[str] = []
    notes: dict[str, str] = {}

    table = _stage("identity_resolution")(identity.build_identity_table)(
        elog, merges=merges, ambiguity_length=cfg.ambiguity_length,
        common_names=common, casefold=cfg.casefold)
    table.to_csv(out / "identity.csv")
    files.append("identity.csv")

    windows = enumerate_windows(first_day, last_day, cfg.window_days, cfg.slide_days)
    if not windows:
        raise InputError(f"[window_engine] range {first_day}..{last_day} is shorter than one window")

    graphs = iter_graphs(elog, table, windows, prior_scope=cfg.prior_scope, naive=cfg.naive_windows)
    if cfg.export_graphs:
        (out / "graphs").mkdir()
        graphs = list(graphs)
        for g in graphs:
            name = f"graphs/window_{g.window.index:05d}.csv"
            write_edge_list(g, out / name)
            files.append(name)
    records = _stage("centrality_engine")(_window_records)(graphs, cfg.distance_mode, cfg.workers)
    centrality.write_centrality_csv(records, out / "centrality.csv")
    files.append("centrality.csv")

    matrix = _stage("activity_analysis")(activity.assemble_matrix)(records, windows)
    patterns = activity.activity_patterns(matrix, cfg.continuous_threshold)
    activity.write_matrix_csv(matrix, out / "matrix.csv")
    activity.write_patterns_csv(patterns, out / "patterns.csv")
    activity.write_summary_csv(matrix, out / "summary.csv", releases)
    files += ["matrix.csv", "patterns.csv", "summary.csv"]

    assignment = None
    k_used = 0
    if matrix.values.shape[0] == 0:
        notes["clustering"] = "skipped: no participant has non-zero betweenness"
    else:
        k_used = min(cfg.k, matrix.values.shape[0])
        if k_used < cfg.k:
            notes["clustering"] = f"k reduced from {cfg.k} to {k_used} (row count)"
        assignment = _stage("clustering")(clustering.kmeans)(matrix, k_used, cfg.seed, cfg.max_iter)
        order = clustering.order_rows_for_heatmap(assignment, matrix)
        clustering.write_clusters_csv(assignment, out / "clusters.csv", order)
        clustering.write_centroids_csv(assignment, out / "centroids.csv")
        report.emit_heatmap(matrix, order, out / "heatmap.ppm", out / "heatmap.csv",
                            assignment.assignment, cfg.log_scale)
        files += ["clusters.csv", "centroids.csv", "heatmap.ppm", "heatmap.csv"]

    commit_rejects = 0
    if cfg.commits is None:
        notes["expertise"] = "skipped"
    else:
        extra_files, commit_rejects = _expertise(cfg, matrix.participants, assignment, merges, out)
        files += extra_files

    counts = activity.label_counts(patterns)
    summary = {
        "events": len(elog.events),
        "bugs": len(elog.index),
        "rejects": len(elog.rejects),
        "duplicates": elog.duplicates,
        "commit_rejects": commit_rejects,
        "participants_seen": matrix.n_seen,
        "participants_nonzero": len(matrix.participants),
        "windows": len(windows),
        "range": f"{first_day.isoformat()}..{last_day.isoformat()}",
        "k": k_used,
        "alias_collisions": len(table.collisions()),
        "labels": {lab.value: n for lab, n in counts.items()},
    }
    return report.write_manifest(out, files, {"config": cfg.echo(), "counts": summary, "notes": notes})
