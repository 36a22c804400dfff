"""Sliding-window social network analysis of bug-tracker event streams."""

from .activity import ActivityLabel, CentralityMatrix, assemble_matrix, classify, detect_runs, summary_series
from .centrality import betweenness, betweenness_bruteforce, normalize
from .clustering import cosine_distance, kmeans, order_rows_for_heatmap
from .events import BugEvent, EventKind, EventLog, filter_date_range, parse_events
from .graph import InteractionGraph, build_graph
from .identity import ParticipantId, build_identity_table, normalize_alias
from .windows import WindowSpec, enumerate_windows, events_in_window

__version__ = "0.1.0"
