"""
Tests for the constrained DTW alignment.
"""

from functools import cache
from unittest.mock import patch

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from loguru import logger

from eventwarp.curves import Domain, build_curve, prepare_curve
from eventwarp.dtw import (
    DIAGONAL,
    HORIZONTAL,
    VERTICAL,
    Alignment,
    align,
    align_sequences,
    alignment_cost,
    enumerate_alignments,
    path_cost,
    render_alignment,
)
from eventwarp.errors import (
    InvalidForcedPair,
    ShapeMismatch,
    TooLarge,
    UnanchoredInput,
)

pytestmark = pytest.mark.unit

# values and times whose unique zero-cost alignment fans a1..a3 into b1
FIG_A = [0.0, 0.0, 0.0, 1.0, 2.0]
FIG_T = [0.0, 1.0, 2.0, 3.0, 4.0]
FIG_B = [0.0, 1.0, 2.0, 2.0]
FIG_S = [0.0, 1.0, 2.0, 3.0]
FIG_PATH = "{(1,1),(1,0),(1,0),(1,1),(1,1),(0,1)}"


@pytest.fixture(autouse=True)
def quiet_errors():
    with patch.object(logger, "bind"):
        yield


def brute_force(a, t, b, s):
    paths = enumerate_alignments(len(a), len(b)).unwrap()
    return min(path_cost(p, a, t, b, s).unwrap().total for p in paths)


def count_paths(n_a, n_b):
    """Admissible paths through an n_a x n_b lattice, counted recursively."""
    steps = (DIAGONAL, VERTICAL, HORIZONTAL)

    @cache
    def walk(i, j, last):
        if (i, j) == (n_a - 1, n_b - 1):
            return 1
        total = 0
        for step in steps:
            if {last, step} == {VERTICAL, HORIZONTAL}:
                continue
            if i + step[0] < n_a and j + step[1] < n_b:
                total += walk(i + step[0], j + step[1], step)
        return total

    return walk(0, 0, DIAGONAL)


@st.composite
def sequences(draw, max_size=5):
    n = draw(st.integers(min_value=1, max_value=max_size))
    values = draw(
        st.lists(
            st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
            min_size=n,
            max_size=n,
        )
    )
    gaps = draw(
        st.lists(
            st.floats(min_value=0.01, max_value=1.0, allow_nan=False),
            min_size=n,
            max_size=n,
        )
    )
    return values, np.cumsum(gaps).tolist()


class TestAlignment:
    def test_cells_and_shape(self):
        path = Alignment.diagonal(3)
        assert path.shape == (3, 3)
        assert path.cells == ((0, 0), (1, 1), (2, 2))
        assert path.is_valid()

    def test_adjacency_violations(self):
        assert Alignment((DIAGONAL, VERTICAL, HORIZONTAL)).adjacency_violations() == 1
        assert Alignment((DIAGONAL, VERTICAL, DIAGONAL)).adjacency_violations() == 0

    def test_transpose(self):
        path = Alignment((DIAGONAL, VERTICAL, DIAGONAL))
        assert path.transpose().steps == (DIAGONAL, HORIZONTAL, DIAGONAL)
        assert path.transpose().shape == (2, 3)

    def test_render_transposed(self):
        path = Alignment((DIAGONAL, HORIZONTAL, HORIZONTAL))
        assert render_alignment(path) == "a1 -- b1 b2 b3"


class TestEnumerate:
    def test_counts(self):
        assert len(enumerate_alignments(2, 2).unwrap()) == 1
        assert len(enumerate_alignments(1, 4).unwrap()) == 1
        assert {str(p) for p in enumerate_alignments(2, 3).unwrap()} == {
            "{(1,1),(1,1),(0,1)}",
            "{(1,1),(0,1),(1,1)}",
        }

    def test_three_by_two(self):
        assert len(enumerate_alignments(3, 2).unwrap()) == count_paths(3, 2) == 2

    @pytest.mark.parametrize("shape", [(1, 5), (2, 6), (4, 4), (5, 3), (6, 6), (7, 5)])
    def test_counts_match_recursion(self, shape):
        assert len(enumerate_alignments(*shape).unwrap()) == count_paths(*shape)

    def test_every_path_is_admissible(self):
        for path in enumerate_alignments(4, 5).unwrap():
            assert path.is_valid()
            assert path.shape == (4, 5)
            assert path.adjacency_violations() == 0

    def test_size_guard(self):
        assert isinstance(enumerate_alignments(9, 2).unwrap_err(), TooLarge)
        assert isinstance(enumerate_alignments(0, 2).unwrap_err(), TooLarge)


class TestAlignSequences:
    def test_figure_fixture(self):
        path, cost = align_sequences(FIG_A, FIG_T, FIG_B, FIG_S).unwrap()
        assert str(path) == FIG_PATH
        assert cost.total == 0.0
        assert render_alignment(path).splitlines()[0] == "a1 a2 a3 -- b1"

    def test_single_points(self):
        path, cost = align_sequences([0.3], [0.0], [0.1], [0.0]).unwrap()
        assert path.steps == (DIAGONAL,)
        assert cost.total == 0.0

    def test_ragged_input(self):
        assert isinstance(
            align_sequences([0.0, 1.0], [0.0], [0.0], [0.0]).unwrap_err(), ShapeMismatch
        )

    def test_forced_pair_is_entered_diagonally(self):
        path, _ = align_sequences(
            FIG_A, FIG_T, FIG_B, FIG_S, forced_pairs=[(1, 1)]
        ).unwrap()
        k = path.cells.index((1, 1))
        assert path.steps[k] == DIAGONAL
        assert path.adjacency_violations() == 0

    def test_forced_final_cell(self):
        path, _ = align_sequences(
            FIG_A, FIG_T, FIG_B, FIG_S, forced_pairs=[(4, 3)]
        ).unwrap()
        assert path.steps[-1] == DIAGONAL
        assert path.shape == (5, 4)

    @pytest.mark.parametrize("pair", [(0, 2), (5, 1), (-1, 1)])
    def test_invalid_forced_pair(self, pair):
        result = align_sequences(FIG_A, FIG_T, FIG_B, FIG_S, forced_pairs=[pair])
        assert isinstance(result.unwrap_err(), InvalidForcedPair)

    def test_forced_pairs_must_be_reachable_diagonally(self):
        result = align_sequences(
            FIG_A, FIG_T, FIG_B, FIG_S, forced_pairs=[(1, 1), (3, 1)]
        )
        assert isinstance(result.unwrap_err(), InvalidForcedPair)

    def test_matches_brute_force_fixed_seed(self):
        rng = np.random.default_rng(7)
        for _ in range(40):
            n_a, n_b = rng.integers(1, 6, size=2)
            a, b = rng.random(n_a).tolist(), rng.random(n_b).tolist()
            t = np.cumsum(rng.random(n_a) + 0.05).tolist()
            s = np.cumsum(rng.random(n_b) + 0.05).tolist()
            path, cost = align_sequences(a, t, b, s).unwrap()
            assert cost.total == pytest.approx(brute_force(a, t, b, s), rel=1e-12, abs=1e-15)
            assert path.adjacency_violations() == 0

    @pytest.mark.property
    @settings(deadline=None)
    @given(sequences(), sequences())
    def test_optimal_over_all_paths(self, first, second):
        (a, t), (b, s) = first, second
        path, cost = align_sequences(a, t, b, s).unwrap()
        assert path.is_valid()
        assert path.adjacency_violations() == 0
        assert path.shape == (len(a), len(b))
        assert cost.total == pytest.approx(brute_force(a, t, b, s), rel=1e-12, abs=1e-15)

    @pytest.mark.property
    @settings(deadline=None)
    @given(sequences(), sequences())
    def test_cost_is_symmetric(self, first, second):
        (a, t), (b, s) = first, second
        forward = align_sequences(a, t, b, s).unwrap()[1].total
        backward = align_sequences(b, s, a, t).unwrap()[1].total
        assert forward == pytest.approx(backward, rel=1e-12, abs=1e-15)

    def test_cost_reported_matches_path_cost(self):
        path, cost = align_sequences(FIG_B, FIG_S, FIG_A, FIG_T).unwrap()
        assert path_cost(path, FIG_B, FIG_S, FIG_A, FIG_T).unwrap() == cost


class TestCost:
    def test_two_point_curves(self):
        cost = path_cost(Alignment.diagonal(2), [0.0, 1.0], [0.0, 10.0], [0.0, 0.5], [0.0, 10.0])
        assert cost.unwrap().total == 5.0

    def test_curves_use_values_and_times(self):
        dom = Domain(0.0, 10.0)
        a = prepare_curve("a", [2.0, 6.0], dom).unwrap()
        b = prepare_curve("b", [3.0, 5.0], dom).unwrap()
        path = Alignment.diagonal(len(a))
        expected = path_cost(path, a.values, a.times, b.values, b.times).unwrap()
        assert alignment_cost(path, a, b).unwrap() == expected
        assert expected.total == 0.0

    def test_path_must_fit(self):
        dom = Domain(0.0, 10.0)
        a = prepare_curve("a", [2.0, 6.0], dom).unwrap()
        result = alignment_cost(Alignment.diagonal(2), a, a)
        assert isinstance(result.unwrap_err(), ShapeMismatch)

    @pytest.mark.property
    @settings(deadline=None)
    @given(sequences(), sequences())
    def test_scales_with_time_axes(self, first, second):
        (a, t), (b, s) = first, second
        path, cost = align_sequences(a, t, b, s).unwrap()
        stretched = [4.0 * x for x in t], [4.0 * x for x in s]
        path_4, cost_4 = align_sequences(a, stretched[0], b, stretched[1]).unwrap()
        assert path_4 == path
        assert cost_4.total == pytest.approx(4.0 * cost.total, rel=1e-12, abs=1e-15)


class TestAlignCurves:
    def test_requires_anchoring(self):
        dom = Domain(0.0, 10.0)
        loose = build_curve(1, [1.0, 2.0], dom).unwrap()
        anchored = prepare_curve(2, [1.0, 2.0], dom).unwrap()
        assert isinstance(align(loose, anchored).unwrap_err(), UnanchoredInput)

    def test_requires_shared_domain(self):
        a = prepare_curve(1, [1.0], Domain(0.0, 10.0)).unwrap()
        b = prepare_curve(2, [1.0], Domain(0.0, 5.0)).unwrap()
        assert isinstance(align(a, b).unwrap_err(), UnanchoredInput)

    def test_self_alignment_is_diagonal(self):
        curve = prepare_curve(1, [1.0, 4.0, 6.0], Domain(0.0, 10.0)).unwrap()
        path, cost = align(curve, curve).unwrap()
        assert path == Alignment.diagonal(len(curve))
        assert cost.total == 0.0

    def test_force_last_event(self):
        dom = Domain(0.0, 10.0)
        a = prepare_curve("a", [1.0, 2.0, 3.0, 4.0], dom).unwrap()
        b = prepare_curve("b", [5.0, 9.0], dom).unwrap()
        path, _ = align(a, b, force_last_event=True).unwrap()
        k = path.cells.index((a.last_event_index, b.last_event_index))
        assert path.steps[k] == DIAGONAL
