from datetime import date

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bugsna.activity import (ActivityLabel, CentralityMatrix, ConsistencyError, activity_patterns,
                             assemble_matrix, classify, detect_runs, local_maxima, summary_series,
                             write_patterns_csv, write_summary_csv)
from bugsna.centrality import CentralityRecord
from bugsna.windows import enumerate_windows

WINDOWS = enumerate_windows(date(2010, 1, 1), date(2010, 2, 4), 30, 1)  # 6 windows


def rec(p, w, v):
    return CentralityRecord(p, w, v, v)


def matrix(rows):
    rows = np.asarray(rows, dtype=float)
    ws = enumerate_windows(date(2010, 1, 1), date(2010, 1, 1 + rows.shape[1] - 1), 1, 1) if rows.size else WINDOWS
    return CentralityMatrix(tuple(f"p{i}" for i in range(len(rows))), tuple(ws), rows.reshape(len(rows), -1))


def test_zero_rows_removed():
    m = assemble_matrix([rec("P1", 0, 0.5), rec("P2", 3, 0.1), rec("P3", 1, 0.0), rec("P3", 2, 0.0)], WINDOWS)
    assert m.participants == ("P1", "P2")
    assert m.n_seen == 3
    assert m.values.shape == (2, 6)


def test_single_window_participant():
    m = assemble_matrix([rec("P", 4, 0.25)], WINDOWS)
    assert np.count_nonzero(m.values[0]) == 1 and m.values[0, 4] == 0.25


def test_unknown_window_is_fatal():
    with pytest.raises(ConsistencyError):
        assemble_matrix([rec("P", 99, 0.2)], WINDOWS)


@pytest.mark.parametrize("row,runs", [
    ([0, 0.2, 0.3, 0, 0, 0.1], [(1, 2), (5, 5)]),
    ([0, 0, 0], []),
    ([0.1] * 673, [(0, 672)]),
    ([], []),
])
def test_detect_runs(row, runs):
    assert detect_runs(row) == runs


def test_classify_examples():
    assert classify([(0, 672)], 1.0) is ActivityLabel.CONTINUOUS
    assert classify([(100, 109)], 10 / 673) is ActivityLabel.ONE_TIME
    assert classify([(0, 9), (50, 59), (90, 99)], 0.3) is ActivityLabel.PHASER
    with pytest.raises(ValueError):
        classify([], 0.0)


def test_threshold_is_configurable():
    runs = [(0, 50), (60, 99)]
    assert classify(runs, 0.91) is ActivityLabel.CONTINUOUS
    assert classify(runs, 0.91, continuous_threshold=0.95) is ActivityLabel.PHASER


rows = st.lists(st.sampled_from([0.0, 0.0, 0.1, 0.5, 1.0]), min_size=1, max_size=40)


@given(rows)
def test_runs_disjoint_sorted_maximal(row):
    runs = detect_runs(row)
    covered = set()
    for a, b in runs:
        assert a <= b
        assert all(row[i] > 0 for i in range(a, b + 1))
        assert a == 0 or row[a - 1] == 0
        assert b == len(row) - 1 or row[b + 1] == 0
        covered |= set(range(a, b + 1))
    assert covered == {i for i, v in enumerate(row) if v > 0}
    assert all(r1[1] + 1 < r2[0] for r1, r2 in zip(runs, runs[1:]))


@given(rows, st.floats(0.01, 100))
def test_labels_invariant_under_rescaling(row, scale):
    if not any(row):
        return
    m1 = matrix([row])
    m2 = matrix([[v * scale for v in row]])
    assert activity_patterns(m1)[0].label == activity_patterns(m2)[0].label


def test_summary_examples():
    counts, sums = summary_series(matrix([[0, 0.5]]))
    assert list(counts) == [0, 1] and list(sums) == [0, 0.5]
    counts, sums = summary_series(matrix([[0.2, 0], [0.3, 0.4]]))
    assert list(counts) == [2, 1] and np.allclose(sums, [0.5, 0.4])


def test_summary_empty_matrix():
    m = CentralityMatrix((), tuple(WINDOWS), np.zeros((0, len(WINDOWS))))
    counts, sums = summary_series(m)
    assert list(counts) == [0] * 6 and list(sums) == [0.0] * 6


@given(st.lists(rows.filter(lambda r: len(r) == 10) | st.lists(st.sampled_from([0.0, 0.3]), min_size=10, max_size=10),
                min_size=1, max_size=8))
def test_active_count_total(row_list):
    row_list = [r[:10] + [0.0] * (10 - len(r[:10])) for r in row_list]
    m = matrix(row_list)
    counts, _ = summary_series(m)
    assert counts.sum() == np.count_nonzero(m.values)


def test_local_maxima():
    assert local_maxima([0, 1, 3, 2, 0, 0, 5, 5, 1], radius=2) == [2, 6]


def test_csv_exports(tmp_path):
    m = matrix([[0.0, 0.5, 0.0, 0.25], [0.1, 0.1, 0.1, 0.1]])
    write_patterns_csv(activity_patterns(m), tmp_path / "p.csv")
    assert (tmp_path / "p.csv").read_text().splitlines() == [
        "participant,label,run_count,coverage", "p0,Phaser,2,0.5", "p1,Continuous,1,1.0"]
    write_summary_csv(m, tmp_path / "s.csv", releases={date(2010, 1, 2): "Froyo"})
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == "window_index,active_count,betweenness_sum,releases"
    assert lines[2] == "1,2,0.6,Froyo"
