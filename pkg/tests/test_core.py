"""Dataset ingestion, partition validation, and seeded randomness."""

import numpy as np
import pytest

from whomp.core import (
    Dataset,
    Partition,
    Rng,
    dataset_from_csv,
    dataset_to_csv,
    partition_from_csv,
    partition_to_csv,
    partition_validate,
    random_balanced_assignment,
)


def test_csv_no_header(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("1,2\n3,4\n5.5,-6e-1\n")
    data = dataset_from_csv(path)
    assert data.n == 3 and data.dim == 2
    assert np.allclose(data.points, [[1, 2], [3, 4], [5.5, -0.6]])
    assert np.array_equal(data.ids, [0, 1, 2])


def test_csv_header_and_label_column(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("a,digit,b\n1,7,2\n3,9,4\n")
    data = dataset_from_csv(path, has_header=True, label_column="digit")
    assert data.points.shape == (2, 2)
    assert np.allclose(data.points, [[1, 2], [3, 4]])
    assert np.array_equal(data.labels, [7, 9])


def test_csv_rejects_nan_with_location(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("1,2\n3,NaN\n")
    with pytest.raises(ValueError, match="row 1, column 1"):
        dataset_from_csv(path)


def test_csv_rejects_text_and_ragged_and_empty(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\nx,4\n")
    with pytest.raises(ValueError, match="row 1, column 0"):
        dataset_from_csv(bad)
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("1,2\n3\n")
    with pytest.raises(ValueError, match="ragged"):
        dataset_from_csv(ragged)
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(ValueError, match="empty"):
        dataset_from_csv(empty)


def test_csv_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(3)
    data = Dataset(rng.normal(size=(17, 3)) * np.pi)
    path = tmp_path / "rt.csv"
    dataset_to_csv(data, path)
    back = dataset_from_csv(path)
    assert np.array_equal(back.points, data.points)


def test_dataset_invariants():
    with pytest.raises(ValueError, match="non-finite"):
        Dataset(np.array([[1.0, np.inf]]))
    with pytest.raises(ValueError):
        Dataset(np.empty((0, 2)))
    with pytest.raises(ValueError, match="labels"):
        Dataset(np.ones((3, 2)), labels=[1, 2])


def test_partition_validate_examples():
    partition_validate(Partition([0, 1, 0, 1], 2), 4, balanced=True)
    with pytest.raises(ValueError, match="equal|differ"):
        partition_validate(Partition([0, 0, 0, 1], 2), 4, balanced=True)
    with pytest.raises(ValueError, match="empty"):
        partition_validate(Partition([0, 2, 0, 2], 3), 4, balanced=False)
    with pytest.raises(ValueError, match="covers"):
        partition_validate(Partition([0, 1], 2), 4)


def test_random_balanced_assignment_sizes():
    assert sorted(random_balanced_assignment(6, 2, 0).sizes.tolist()) == [3, 3]
    assert sorted(random_balanced_assignment(7, 2, 0).sizes.tolist()) == [3, 4]
    with pytest.raises(ValueError):
        random_balanced_assignment(3, 4, 0)


def test_random_balanced_assignment_determinism():
    a = random_balanced_assignment(11, 3, Rng(42))
    b = random_balanced_assignment(11, 3, Rng(42))
    assert np.array_equal(a.assignment, b.assignment)
    c = random_balanced_assignment(11, 3, Rng(43))
    assert not np.array_equal(a.assignment, c.assignment)


def test_validator_accepts_every_random_assignment():
    rng = Rng(7)
    for n in range(1, 51, 7):
        for g in range(1, n + 1, 3):
            part = random_balanced_assignment(n, g, rng.child(n, g))
            partition_validate(part, n, balanced=True)


def test_rng_child_streams_are_stable_and_distinct():
    a = Rng(5).child(1, 2).integers(0, 1_000_000, size=4)
    b = Rng(5).child(1, 2).integers(0, 1_000_000, size=4)
    c = Rng(5).child(1, 3).integers(0, 1_000_000, size=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_partition_csv_round_trip(tmp_path):
    part = Partition([0, 2, 1, 2, 0, 1], 3)
    path = tmp_path / "p.csv"
    partition_to_csv(part, path)
    header = path.read_text().splitlines()[0]
    assert header == "id,group"
    back = partition_from_csv(path)
    assert np.array_equal(back.assignment, part.assignment)
    assert back.num_groups == 3
