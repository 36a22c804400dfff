"""Author string normalization: semi-anonymous addresses to participant aliases."""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .events import EventLog

TRUNCATION_MARKER = "...."
DEFAULT_AMBIGUITY_LENGTH = 2


@dataclass(frozen=True)
class ParticipantId:
    alias: str
    ambiguous: bool = field(default=False, compare=False)
    raw_sources: frozenset[str] = field(default=frozenset(), compare=False)

    def __str__(self) -> str:
        return self.alias


def _strip_markers(raw: str) -> str:
    alias = raw.split(TRUNCATION_MARKER, 1)[0]
    alias = alias.split("@", 1)[0].strip()
    if alias:
        return alias
    # nothing before the marker: keep the remainder but make it marker-free
    rest = raw.replace(TRUNCATION_MARKER, "").replace("@", "_at_").strip()
    return rest or "_"


def normalize_alias(
    raw: str,
    *,
    ambiguity_length: int = DEFAULT_AMBIGUITY_LENGTH,
    common_names: Iterable[str] = (),
    casefold: bool = False,
) -> ParticipantId:
    """Map ``"mathias....@gmail.com"`` to alias ``mathias``.

    The alias is cut at the first ``....`` and then at the first ``@``.
    Short aliases and names from ``common_names`` are flagged ambiguous.
    """
    text = raw.strip()
    if not text:
        raise ValueError("empty author string")
    alias = _strip_markers(text)
    if casefold:
        alias = alias.casefold()
    common = {c.casefold() if casefold else c for c in common_names}
    ambiguous = len(alias) <= ambiguity_length or alias in common
    return ParticipantId(alias, ambiguous, frozenset({text}))


class IdentityTable(Mapping[str, ParticipantId]):
    """Total map from raw author strings to participants, with collision records."""

    def __init__(self, by_raw: Mapping[str, ParticipantId]):
        self._by_raw = dict(by_raw)

    def __getitem__(self, raw: str) -> ParticipantId:
        return self._by_raw[raw]

    def __iter__(self) -> Iterator[str]:
        return iter(self._by_raw)

    def __len__(self) -> int:
        return len(self._by_raw)

    def alias(self, raw: str) -> str:
        return self[raw].alias

    def collisions(self) -> dict[str, frozenset[str]]:
        """Aliases reached from more than one distinct raw string."""
        out = {}
        for pid in self._by_raw.values():
            if len(pid.raw_sources) > 1:
                out[pid.alias] = pid.raw_sources
        return dict(sorted(out.items()))

    def to_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["raw", "alias", "ambiguous"])
            for raw in sorted(self._by_raw):
                pid = self._by_raw[raw]
                w.writerow([raw, pid.alias, str(pid.ambiguous).lower()])


def build_identity_table(
    authors: EventLog | Iterable[str],
    *,
    merges: Mapping[str, str] | None = None,
    ambiguity_length: int = DEFAULT_AMBIGUITY_LENGTH,
    common_names: Iterable[str] = (),
    casefold: bool = False,
) -> IdentityTable:
    """Resolve every author in ``authors``.

    ``merges`` overrides the derived alias; its keys may be raw strings or
    derived aliases (raw wins).
    """
    raws = authors.authors if isinstance(authors, EventLog) else set(authors)
    merges = merges or {}
    common = tuple(common_names)
    resolved: dict[str, tuple[str, bool]] = {}
    sources: dict[str, set[str]] = defaultdict(set)
    for raw in sorted(raws):
        pid = normalize_alias(raw, ambiguity_length=ambiguity_length,
                              common_names=common, casefold=casefold)
        alias = merges.get(raw.strip(), merges.get(pid.alias, pid.alias))
        ambiguous = pid.ambiguous if alias == pid.alias else False
        resolved[raw] = (alias, ambiguous)
        sources[alias].add(raw.strip())
    by_raw = {raw: ParticipantId(alias, amb, frozenset(sources[alias]))
              for raw, (alias, amb) in resolved.items()}
    return IdentityTable(by_raw)


def read_name_list(path: str | Path) -> list[str]:
    """One alias per line; blank lines and ``#`` comments ignored."""
    names = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            names.append(line)
    return names


def read_merges(path: str | Path) -> dict[str, str]:
    """Manual merge file: CSV rows ``raw,alias`` (optional header)."""
    merges = {}
    with Path(path).open(newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#"):
                continue
            if len(row) < 2:
                raise ValueError(f"merge row needs raw,alias: {row}")
            raw, alias = row[0].strip(), row[1].strip()
            if (raw, alias) == ("raw", "alias"):
                continue
            merges[raw] = alias
    return merges
