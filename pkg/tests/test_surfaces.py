import os
import random
import unittest
from fractions import Fraction
from unittest.mock import patch

from BackEnd.core.config import reset_config
from BackEnd.models.complex import from_simplices
from BackEnd.models.errors import PartitionError, SearchLimitError, UnknownIdentifierError
from BackEnd.services.constructions import (
    DISC_CURVE,
    DISC_MOVES,
    grid_disc,
    random_pseudomanifold,
    tetrahedron,
    torus18,
    torus_lines,
    vertex_link,
)
from BackEnd.services.surfaces import (
    Partition,
    Surface,
    TopologicalIndex,
    Verdict,
    boundary_of_bricks,
    check_unstable,
    classify_surface,
    find_unstable_partition,
    is_embedded,
    is_proper,
    is_separating,
    is_stable_minimal,
    shortening_complex,
    shortening_moves,
    strength,
    surface_weight,
    topological_index01,
    vary,
)

# Edges of the tetrahedron boundary avoiding the pairs {0,1} and {2,3}.
QUAD = frozenset({(0, 2), (0, 3), (1, 2), (1, 3)})


class TestSurfaceBasics(unittest.TestCase):
    def setUp(self):
        self.tet = tetrahedron()

    def test_weights(self):
        self.assertEqual(surface_weight(self.tet, ()), 0)
        self.assertEqual(surface_weight(self.tet, QUAD), 4)
        self.assertEqual(surface_weight(grid_disc(), DISC_CURVE), 4)
        with self.assertRaises(UnknownIdentifierError):
            surface_weight(self.tet, [(0, 9)])

    def test_properness(self):
        self.assertTrue(is_proper(self.tet, QUAD))
        self.assertTrue(is_proper(self.tet, Surface()))
        self.assertFalse(is_proper(torus18(), [(0, 1)]))
        self.assertTrue(is_proper(grid_disc(), DISC_CURVE))

    def test_boundary_facets_are_never_proper(self):
        disc = grid_disc()
        boundary_edge = next(iter(disc.boundary_facets))
        self.assertFalse(is_proper(disc, [boundary_edge]))

    def test_strength(self):
        # brick 0 = (0,1,2) has edges (0,2) and (1,2) on the quadrilateral
        self.assertEqual(strength(self.tet, 0, QUAD), -1)
        self.assertEqual(strength(self.tet, 0, ()), 3)
        disc = grid_disc()
        for brick in DISC_MOVES:
            self.assertEqual(strength(disc, brick, DISC_CURVE), -1)

    def test_variation_across_disc_moves(self):
        disc = grid_disc()
        a, b = DISC_MOVES

        once = vary(disc, DISC_CURVE, a)
        twice = vary(disc, once, b)

        self.assertEqual(surface_weight(disc, once), 3)
        self.assertEqual(surface_weight(disc, twice), 4)
        self.assertTrue(is_proper(disc, twice))

    def test_variation_is_an_involution(self):
        S = Surface(QUAD)
        self.assertEqual(vary(self.tet, vary(self.tet, S, 2), 2), S)

    def test_varying_a_brick_boundary_empties_it(self):
        around = boundary_of_bricks(self.tet, [1])
        self.assertTrue(vary(self.tet, around, 1).is_empty)


class TestShorteningMoves(unittest.TestCase):
    def test_quadrilateral_has_four_strict_moves(self):
        moves = shortening_moves(tetrahedron(), QUAD)

        self.assertEqual([m.brick for m in moves], [0, 1, 2, 3])
        self.assertTrue(all(m.strength == -1 and m.strict for m in moves))

    def test_vertex_link_has_none(self):
        M = torus18()
        link = vertex_link(M, 4)

        self.assertEqual(shortening_moves(M, link), [])
        self.assertTrue(is_stable_minimal(M, link))

    def test_empty_surface(self):
        self.assertEqual(shortening_moves(tetrahedron(), ()), [])
        self.assertFalse(is_stable_minimal(tetrahedron(), ()))

    def test_disc_curve_is_not_stable(self):
        self.assertFalse(is_stable_minimal(grid_disc(), DISC_CURVE))

    def test_zero_strength_move_is_not_strict(self):
        M = from_simplices(
            [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)],
            weights={(0, 1): Fraction(2)},
        )
        # brick 1 = (0,1,3): (0,3) on S, (0,1) weight 2 and (1,3) on S
        moves = {m.brick: m for m in shortening_moves(M, [(0, 3), (1, 3), (0, 2), (1, 2)])}
        self.assertEqual(moves[1].strength, 0)
        self.assertFalse(moves[1].strict)


class TestInstability(unittest.TestCase):
    def setUp(self):
        self.tet = tetrahedron()

    def test_quadrilateral_split_along_the_surface(self):
        # (0,1) is off the surface, so bricks 0=(0,1,2) and 1=(0,1,3) stay together
        report = check_unstable(self.tet, QUAD, Partition.from_side_a(self.tet, {0, 1}))

        self.assertTrue(report.holds)
        self.assertTrue(report)

    def test_partition_cutting_a_non_surface_facet(self):
        report = check_unstable(self.tet, QUAD, Partition.from_side_a(self.tet, {0, 2}))

        self.assertFalse(report.holds)
        self.assertEqual(report.violated, 1)
        self.assertEqual(len(report.facets), 1)
        self.assertNotIn(report.facets[0], QUAD)

    def test_vertex_link_fails_condition_two(self):
        M = torus18()
        report = check_unstable(M, vertex_link(M, 4), Partition.from_side_a(M, {1}))
        # {1} is cut off along non-link edges too, so condition 1 trips first
        self.assertFalse(report.holds)
        link = vertex_link(M, 4)
        inside = {b for b in M.bricks if 4 in M.vertices[b]}
        report = check_unstable(M, link, Partition.from_side_a(M, inside))
        self.assertEqual(report.violated, 2)

    def test_partition_validation(self):
        with self.assertRaises(PartitionError):
            check_unstable(self.tet, QUAD, Partition(frozenset({0, 1, 2, 3}), frozenset()))
        with self.assertRaises(PartitionError):
            check_unstable(self.tet, QUAD, Partition(frozenset({0, 1}), frozenset({2})))
        with self.assertRaises(PartitionError):
            check_unstable(self.tet, QUAD, Partition(frozenset({0, 1}), frozenset({1, 2, 3})))

    def test_search_finds_the_quadrilateral_split(self):
        found = find_unstable_partition(self.tet, QUAD)

        self.assertIsNotNone(found)
        self.assertEqual({found.side_a, found.side_b}, {frozenset({0, 1}), frozenset({2, 3})})

    def test_search_returns_none_without_strict_moves(self):
        M = torus18()
        self.assertIsNone(find_unstable_partition(M, vertex_link(M, 0)))

    def test_single_brick_boundary_in_torus(self):
        M = torus18()
        self.assertIsNone(find_unstable_partition(M, boundary_of_bricks(M, [7])))

    def test_component_cap(self):
        with self.assertRaises(SearchLimitError) as caught:
            find_unstable_partition(self.tet, QUAD, cap=1)

        self.assertEqual(
            caught.exception.details, {"components": 2, "cut_components": 2, "cap": 1}
        )
        self.assertIn("counts only those", caught.exception.message)

    def test_cap_from_environment_turns_into_undetermined(self):
        with patch.dict(os.environ, {"THINPOS_PARTITION_CAP": "1"}):
            reset_config()
            classification = classify_surface(self.tet, QUAD)
        reset_config()
        self.assertEqual(classification.verdict, Verdict.UNDETERMINED)


class TestEmbeddingAndIndex(unittest.TestCase):
    def test_embedded(self):
        M = torus18()
        self.assertTrue(is_embedded(tetrahedron(), QUAD))
        self.assertTrue(is_embedded(M, vertex_link(M, 1)))
        self.assertTrue(is_embedded(M, torus_lines()["diagonal-2"]))
        self.assertTrue(is_embedded(grid_disc(), DISC_CURVE))

    def test_curve_through_a_vertex_twice(self):
        M = torus18()
        lines = torus_lines()
        crossing = lines["horizontal-0"] | lines["vertical-0"]
        self.assertTrue(is_proper(M, crossing))
        self.assertFalse(is_embedded(M, crossing))

    def test_separating(self):
        M = torus18()
        self.assertTrue(is_separating(tetrahedron(), QUAD))
        self.assertFalse(is_separating(M, torus_lines()["horizontal-1"]))
        self.assertFalse(is_separating(M, ()))
        self.assertTrue(is_separating(M, vertex_link(M, 2)))

    def test_shortening_complex_of_the_quadrilateral(self):
        D = shortening_complex(tetrahedron(), QUAD)

        self.assertEqual(D.vertices, (0, 1, 2, 3))
        self.assertEqual(set(D.edges), {(0, 1), (2, 3)})
        self.assertEqual(len(D.components), 2)
        self.assertTrue(D.is_simplex([0, 1]))
        self.assertFalse(D.is_simplex([0, 2]))

    def test_topological_index(self):
        M = torus18()
        self.assertEqual(topological_index01(M, vertex_link(M, 0)), TopologicalIndex.INDEX0)
        self.assertEqual(topological_index01(tetrahedron(), QUAD), TopologicalIndex.INDEX1)
        triangle = boundary_of_bricks(tetrahedron(), [0])
        self.assertEqual(topological_index01(tetrahedron(), triangle), TopologicalIndex.AT_LEAST_2)


class TestClassifySurface(unittest.TestCase):
    def test_verdicts(self):
        tet = tetrahedron()
        M = torus18()

        self.assertEqual(classify_surface(tet, QUAD).verdict, Verdict.UNSTABLE)
        self.assertEqual(classify_surface(tet, ()).verdict, Verdict.EMPTY)
        self.assertEqual(classify_surface(M, vertex_link(M, 5)).verdict, Verdict.STABLE)
        self.assertEqual(
            classify_surface(tet, boundary_of_bricks(tet, [0])).verdict, Verdict.NEITHER
        )
        self.assertEqual(classify_surface(M, [(0, 1)]).verdict, Verdict.IMPROPER)

    def test_hint_is_used_when_it_works(self):
        tet = tetrahedron()
        hint = Partition.from_side_a(tet, {2, 3})

        classification = classify_surface(tet, QUAD, hint=hint)

        self.assertEqual(classification.partition, hint)
        self.assertTrue(classification.report.holds)

    def test_to_dict(self):
        payload = classify_surface(tetrahedron(), QUAD).to_dict()

        self.assertEqual(payload["verdict"], "unstable")
        self.assertEqual(payload["weight"], "4")
        self.assertEqual(payload["strict_moves"], [0, 1, 2, 3])
        self.assertEqual(payload["index"], "index1")
        self.assertEqual(sorted(map(tuple, payload["partition"].values())), [(0, 1), (2, 3)])

    def test_neither_reports_the_failed_condition_of_the_hint(self):
        tet = tetrahedron()
        triangle = boundary_of_bricks(tet, [0])

        payload = classify_surface(tet, triangle, hint=Partition.from_side_a(tet, {0})).to_dict()

        self.assertEqual(payload["verdict"], "neither")
        self.assertEqual(payload["failed_condition"], 2)


class TestStructuralIdentities(unittest.TestCase):
    """Randomized checks of the variation identities on small pseudomanifolds."""

    def test_variation_identities(self):
        rng = random.Random(2024)
        weights = [Fraction(1), Fraction(1, 2), Fraction(2), Fraction(0)]
        checked = 0
        while checked < 1000:
            M = random_pseudomanifold(
                rng, 8, weight_choices=weights if rng.random() < 0.5 else None
            )
            bricks = list(M.brick_ids)
            for _ in range(25):
                region = [b for b in bricks if rng.random() < 0.5]
                S = boundary_of_bricks(M, region)
                a, b = rng.sample(bricks, 2)
                S_a = vary(M, S, a)
                S_b = vary(M, S, b)
                S_ab = vary(M, S_a, b)

                self.assertTrue(is_proper(M, S))
                self.assertTrue(is_proper(M, S_a))
                self.assertEqual(vary(M, S_a, a), S)
                self.assertEqual(
                    surface_weight(M, S_a), surface_weight(M, S) + strength(M, a, S)
                )
                self.assertEqual(strength(M, a, S_a), -strength(M, a, S))
                self.assertEqual(S_ab, vary(M, S_b, a))

                shared = M.shared_facets(a, b)
                if shared <= S.facets:
                    expected = (
                        surface_weight(M, S)
                        + strength(M, a, S)
                        + strength(M, b, S)
                        + 2 * M.weight_of(shared)
                    )
                    self.assertEqual(surface_weight(M, S_ab), expected)
                checked += 1


if __name__ == "__main__":
    unittest.main()
