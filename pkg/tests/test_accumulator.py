import math

import numpy as np
import pytest

from conftest import brute_force_intersections, min_line_distance
from pithfinder.accumulator import (
    Line,
    accumulation_space,
    lines_intersection_accumulation,
    lines_pass_through_accumulation,
    to_line,
)
from pithfinder.orientation import OrientationEstimate


def line_at(angle, cx, cy):
    return to_line(OrientationEstimate((cx, cy), angle, 1.0))


def random_lines(rng, n, size):
    return [
        line_at(rng.uniform(0, math.pi), rng.uniform(0, size - 1), rng.uniform(0, size - 1))
        for _ in range(n)
    ]


# ---------------------------------------------------------------- to_line


def test_to_line_horizontal():
    line = line_at(0.0, 10.0, 49.8)
    assert line.a == pytest.approx(0.0, abs=1e-12)
    assert line.b == pytest.approx(-1.0)
    assert line.c == pytest.approx(49.8)


def test_to_line_vertical():
    line = line_at(math.pi / 2, 50.2, 10.0)
    assert line.a == pytest.approx(1.0)
    assert line.b == pytest.approx(0.0, abs=1e-12)
    assert line.c == pytest.approx(-50.2)


def test_to_line_diagonal_through_origin():
    line = line_at(math.pi / 4, 0.0, 0.0)
    assert line.a == pytest.approx(math.sqrt(0.5))
    assert line.b == pytest.approx(-math.sqrt(0.5))
    assert line.c == pytest.approx(0.0, abs=1e-12)


def test_to_line_normal_is_unit_and_center_is_on_line():
    rng = np.random.default_rng(0)
    for _ in range(50):
        angle, cx, cy = rng.uniform(0, math.pi), rng.uniform(-50, 150), rng.uniform(-50, 150)
        line = line_at(angle, cx, cy)
        assert math.hypot(line.a, line.b) == pytest.approx(1.0)
        assert abs(line.a * cx + line.b * cy + line.c) < 1e-9


# ---------------------------------------------------------- intersections


def test_fewer_than_two_lines_gives_empty_space():
    dims = (40, 60)
    assert not lines_intersection_accumulation([], dims).any()
    assert not lines_intersection_accumulation([line_at(0.3, 5, 5)], dims).any()


def test_crossing_votes_round_half_up():
    lines = [line_at(0.0, 10.0, 49.8), line_at(math.pi / 2, 50.2, 10.0)]
    votes = lines_intersection_accumulation(lines, (100, 100))
    assert votes[50, 50] == 1
    assert votes.sum() == 1


def test_three_concurrent_lines_give_three_votes():
    lines = [
        line_at(0.0, 10.0, 30.0),
        line_at(math.pi / 2, 30.0, 5.0),
        line_at(math.pi / 4, 30.0, 30.0),
    ]
    votes = lines_intersection_accumulation(lines, (64, 64))
    assert votes[30, 30] == 3
    assert votes.sum() == 3


def test_parallel_lines_cast_no_votes():
    lines = [line_at(0.0, 0.0, 10.0), line_at(0.0, 0.0, 20.0), line_at(0.0, 50.0, 30.0)]
    assert lines_intersection_accumulation(lines, (100, 100)).sum() == 0


def test_out_of_bounds_intersections_are_dropped():
    lines = [line_at(0.0, 0.0, 50.0), line_at(math.pi / 2, 150.0, 0.0)]
    assert lines_intersection_accumulation(lines, (100, 100)).sum() == 0


def test_rounding_at_the_image_border():
    def crossing_at(x, y):
        return [line_at(0.0, 0.0, y), line_at(math.pi / 2, x, 0.0)]

    votes = lines_intersection_accumulation(crossing_at(99.4, 99.4), (100, 100))
    assert votes[99, 99] == 1
    assert lines_intersection_accumulation(crossing_at(99.6, 5.0), (100, 100)).sum() == 0
    votes = lines_intersection_accumulation(crossing_at(-0.4, 5.0), (100, 100))
    assert votes[5, 0] == 1
    assert lines_intersection_accumulation(crossing_at(-0.6, 5.0), (100, 100)).sum() == 0


def test_intersection_votes_match_pairwise_oracle():
    rng = np.random.default_rng(7)
    for _ in range(30):
        lines = random_lines(rng, int(rng.integers(2, 11)), 64)
        got = lines_intersection_accumulation(lines, (64, 64))
        want = brute_force_intersections(lines, 64, 64)
        np.testing.assert_array_equal(got, want)


def test_total_votes_bounded_by_pair_count():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(0, 12))
        lines = random_lines(rng, n, 50)
        assert lines_intersection_accumulation(lines, (50, 50)).sum() <= n * (n - 1) // 2


def test_intersection_space_is_permutation_invariant():
    rng = np.random.default_rng(13)
    lines = random_lines(rng, 8, 64)
    base = lines_intersection_accumulation(lines, (64, 64))
    shuffled = list(lines)
    rng.shuffle(shuffled)
    np.testing.assert_array_equal(base, lines_intersection_accumulation(shuffled, (64, 64)))


# ----------------------------------------------------------- pass-through


def test_axis_aligned_lines_cover_one_pixel_per_column():
    votes = lines_pass_through_accumulation([line_at(0.0, 0.0, 49.8)], (100, 100))
    assert votes.sum() == 100
    assert np.array_equal(np.nonzero(votes)[0], np.full(100, 50))

    votes = lines_pass_through_accumulation([line_at(math.pi / 2, 25.0, 0.0)], (100, 100))
    assert votes.sum() == 100
    assert np.array_equal(np.nonzero(votes)[1], np.full(100, 25))


def test_diagonal_line_covers_the_diagonal():
    votes = lines_pass_through_accumulation([line_at(math.pi / 4, 0.0, 0.0)], (100, 100))
    ys, xs = np.nonzero(votes)
    assert votes.sum() == 100
    assert np.array_equal(ys, xs)


def test_line_missing_the_image_casts_no_votes():
    lines = [line_at(0.0, 0.0, 200.0), line_at(math.pi / 4, -300.0, 0.0)]
    assert lines_pass_through_accumulation(lines, (100, 100)).sum() == 0


def test_every_voted_pixel_lies_within_half_a_pixel_of_its_line():
    rng = np.random.default_rng(19)
    for _ in range(20):
        line = random_lines(rng, 1, 100)[0]
        votes = lines_pass_through_accumulation([line], (100, 100))
        ys, xs = np.nonzero(votes)
        assert len(xs) > 0
        dist = min_line_distance([line], xs.astype(float), ys.astype(float))
        assert dist.max() <= 0.5 + 1e-6


def test_pass_through_votes_add_up_per_line():
    rng = np.random.default_rng(23)
    lines = random_lines(rng, 6, 80)
    combined = lines_pass_through_accumulation(lines, (80, 80))
    summed = sum(lines_pass_through_accumulation([ln], (80, 80)) for ln in lines)
    np.testing.assert_array_equal(combined, summed)


def test_steep_line_covers_one_pixel_per_row():
    # slope just past 45 degrees: y becomes the dominant axis
    votes = lines_pass_through_accumulation([line_at(math.pi / 3, 50.0, 50.0)], (100, 100))
    ys = np.nonzero(votes)[0]
    assert len(np.unique(ys)) == len(ys)


# -------------------------------------------------------------- dispatch


def test_accumulation_space_dispatches_on_acc_type():
    rng = np.random.default_rng(29)
    lines = random_lines(rng, 5, 64)
    np.testing.assert_array_equal(
        accumulation_space(lines, 1, (64, 64)), lines_intersection_accumulation(lines, (64, 64))
    )
    np.testing.assert_array_equal(
        accumulation_space(lines, 0, (64, 64)), lines_pass_through_accumulation(lines, (64, 64))
    )


def test_invalid_acc_type_raises():
    for bad in (2, -1, 7):
        with pytest.raises(ValueError):
            accumulation_space([], bad, (10, 10))
