"""Commit-log ingestion and path-based expertise tags."""

from __future__ import annotations

import csv
import enum
import io
import logging
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path, PurePosixPath
from typing import BinaryIO, Iterable, Mapping, Sequence

from .events import EventFormatError, Reject, parse_timestamp
from .identity import normalize_alias

log = logging.getLogger(__name__)

COMMIT_FIELDS = ("author", "project", "path", "ts")
MAX_SEGMENT_DEPTH = 6
TOP_TAGS = 5

SOURCE_EXT = {".c", ".cc", ".cpp", ".cxx", ".h", ".hh", ".hpp", ".java", ".kt", ".py", ".js",
              ".ts", ".go", ".rs", ".s", ".S", ".m", ".mm", ".aidl", ".cs", ".scala", ".sh"}
DOC_EXT = {".md", ".txt", ".rst", ".html", ".htm", ".jd", ".pdf", ".tex", ".adoc"}
BUILD_EXT = {".mk", ".gradle", ".bp", ".cmake", ".bzl", ".pro"}
BUILD_NAMES = {"makefile", "cmakelists.txt", "build.gradle", "android.mk", "application.mk",
               "android.bp", "build", "build.bazel", "configure", "configure.ac", "setup.py",
               "pom.xml"}
TEST_DIRS = {"test", "tests", "testing", "androidtest", "unittest", "unittests"}


class Role(str, enum.Enum):
    DEVELOPER = "Developer"
    PURE_USER = "PureUser"


@dataclass(frozen=True)
class CommitRecord:
    author_raw: str
    project: str
    target_path: str
    timestamp: datetime


@dataclass(frozen=True)
class CommitLog:
    commits: tuple[CommitRecord, ...]
    rejects: tuple[Reject, ...] = ()


@dataclass(frozen=True)
class ExpertiseProfile:
    participant: str
    commit_count: int = 0
    tags: Counter = field(default_factory=Counter, compare=False)
    projects: frozenset[str] = frozenset()

    @property
    def role(self) -> Role:
        return Role.DEVELOPER if self.commit_count >= 1 else Role.PURE_USER

    def top_tags(self, n: int = TOP_TAGS) -> list[tuple[str, int]]:
        return rank_tags(self.tags)[:n]


@dataclass(frozen=True)
class ClusterExpertise:
    cluster_id: int
    members: int
    developer_count: int
    tags: list[tuple[str, int]]


def parse_commits(stream: BinaryIO | bytes) -> CommitLog:
    """Read ``author,project,path,ts`` CSV rows; bad rows become rejects."""
    data = stream if isinstance(stream, bytes) else stream.read()
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise EventFormatError(f"commit file is not valid UTF-8: {exc}") from exc
    reader = csv.reader(io.StringIO(text, newline=""))
    header = next(reader, None)
    if header is None:
        raise EventFormatError("commit file has no header")
    header = [h.strip().lower() for h in header]
    missing = [f for f in COMMIT_FIELDS if f not in header]
    if missing:
        raise EventFormatError(f"commit csv missing columns: {','.join(missing)}")
    commits, rejects = [], []
    for row in reader:
        if not any(c.strip() for c in row):
            continue
        line = reader.line_num
        if len(row) != len(header):
            rejects.append(Reject(line, f"expected {len(header)} fields", ",".join(row)))
            continue
        rec = dict(zip(header, (c.strip() for c in row)))
        empty = [f for f in COMMIT_FIELDS if not rec[f]]
        if empty:
            rejects.append(Reject(line, "empty " + ",".join(empty), ",".join(row)))
            continue
        try:
            ts = parse_timestamp(rec["ts"])
        except ValueError:
            rejects.append(Reject(line, f"bad timestamp {rec['ts']!r}", ",".join(row)))
            continue
        commits.append(CommitRecord(rec["author"], rec["project"], rec["path"], ts))
    return CommitLog(tuple(commits), tuple(rejects))


def read_commits(path: str | Path) -> CommitLog:
    with Path(path).open("rb") as fh:
        return parse_commits(fh)


def file_category(path: str) -> str:
    p = PurePosixPath(path)
    name = p.name.lower()
    dirs = {d.lower() for d in p.parts[:-1]}
    if dirs & TEST_DIRS or name.startswith("test") or p.stem.endswith(("Test", "Tests", "_test")):
        return "test"
    if name in BUILD_NAMES or p.suffix.lower() in BUILD_EXT:
        return "build"
    if p.suffix in SOURCE_EXT or p.suffix.lower() in SOURCE_EXT:
        return "source"
    if p.suffix.lower() in DOC_EXT or name in {"readme", "notice", "license"}:
        return "doc"
    return "other"


def commit_tags(commit: CommitRecord, max_depth: int = MAX_SEGMENT_DEPTH) -> set[str]:
    """Project, directory segments (first ``max_depth``), source-file stem, file category."""
    p = PurePosixPath(commit.target_path.strip("/"))
    tags = {commit.project.lower()}
    tags.update(seg.lower() for seg in p.parts[:-1][:max_depth] if seg not in ("", "."))
    category = file_category(commit.target_path)
    if category == "source":
        tags.add(p.stem.lower())
    tags.add(category)
    return tags


def derive_expertise(participant: str, commits: Iterable[CommitRecord],
                     max_depth: int = MAX_SEGMENT_DEPTH) -> ExpertiseProfile:
    tags: Counter = Counter()
    projects = set()
    n = 0
    for c in commits:
        n += 1
        tags.update(commit_tags(c, max_depth))
        projects.add(c.project)
    return ExpertiseProfile(participant, n, tags, frozenset(projects))


def commit_alias(raw: str, merges: Mapping[str, str] | None = None, casefold: bool = False) -> str:
    """Bug-tracker alias for a commit author: manual merges first, then the truncation rule."""
    merges = merges or {}
    raw = raw.strip()
    if raw in merges:
        return merges[raw]
    alias = normalize_alias(raw, casefold=casefold).alias
    return merges.get(alias, alias)


def expertise_profiles(participants: Iterable[str], commits: Iterable[CommitRecord],
                       merges: Mapping[str, str] | None = None, casefold: bool = False,
                       max_depth: int = MAX_SEGMENT_DEPTH) -> dict[str, ExpertiseProfile]:
    by_alias: dict[str, list[CommitRecord]] = {}
    for c in commits:
        by_alias.setdefault(commit_alias(c.author_raw, merges, casefold), []).append(c)
    return {p: derive_expertise(p, by_alias.get(p, ()), max_depth) for p in participants}


def rank_tags(tags: Counter) -> list[tuple[str, int]]:
    return sorted(tags.items(), key=lambda kv: (-kv[1], kv[0]))


def cluster_expertise_summary(members: Sequence[str], profiles: Mapping[str, ExpertiseProfile],
                              cluster_id: int = 0) -> ClusterExpertise:
    total: Counter = Counter()
    developers = 0
    for m in members:
        prof = profiles.get(m)
        if prof is None:
            continue
        total.update(prof.tags)
        developers += prof.role is Role.DEVELOPER
    return ClusterExpertise(cluster_id, len(members), developers, rank_tags(total))


def write_expertise_csv(profiles: Mapping[str, ExpertiseProfile], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["participant", "role", "commit_count", "top_tags"])
        for p in sorted(profiles):
            prof = profiles[p]
            w.writerow([p, prof.role.value, prof.commit_count,
                        ";".join(f"{t}:{n}" for t, n in prof.top_tags())])


def write_cluster_expertise_csv(summaries: Iterable[ClusterExpertise], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["cluster_id", "members", "developer_count", "top_tags"])
        for s in sorted(summaries, key=lambda s: s.cluster_id):
            w.writerow([s.cluster_id, s.members, s.developer_count,
                        ";".join(f"{t}:{n}" for t, n in s.tags[:TOP_TAGS])])
