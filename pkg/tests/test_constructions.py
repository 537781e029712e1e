import random
import unittest
from fractions import Fraction

from BackEnd.models.complex import BrickComplex, dual_graph, from_simplices, validate
from BackEnd.models.errors import ComplexError, SchemaError, UnknownIdentifierError
from BackEnd.services.constructions import (
    DISC_CURVE,
    DISC_MOVES,
    boundary_simplex,
    build_connected_sum,
    catalog,
    connected_sum,
    flip_edge,
    grid_disc,
    octahedron,
    random_pseudomanifold,
    relabel_vertices_for_sum,
    stabilize,
    tetrahedron,
    torus18,
    torus_lines,
    vertex_link,
)


def _closed_flags(M):
    report = validate(M)
    return report.pure, report.strongly_connected, report.closed


class TestCatalog(unittest.TestCase):
    def test_tetrahedron(self):
        M = catalog("tetrahedron")
        self.assertEqual((M.size, len(M.facets)), (4, 6))

    def test_torus18(self):
        M = catalog("torus18")

        self.assertEqual(M.size, 18)
        self.assertEqual(len(M.facets), 27)
        self.assertEqual(M.brick_ids, tuple(range(1, 19)))
        self.assertTrue(validate(M).is_closed_pseudomanifold)
        graph = dual_graph(M)
        self.assertEqual(graph.number_of_edges(), 27)
        self.assertTrue(all(degree == 3 for _, degree in graph.degree()))

    def test_torus18_neighbours_of_printed_labels(self):
        M = torus18()
        neighbours = {b for b, _ in M.neighbor_weights[7]}
        self.assertEqual(neighbours, {8, 9, 13})
        neighbours = {b for b, _ in M.neighbor_weights[1]}
        self.assertEqual(neighbours, {2, 5, 10})

    def test_boundary_simplex(self):
        M = catalog("boundary-simplex(4)")

        self.assertEqual((M.dimension, M.size, len(M.facets)), (4, 6, 15))
        self.assertTrue(validate(M).is_closed_pseudomanifold)

    def test_octahedron(self):
        M = octahedron()
        self.assertEqual((M.size, len(M.facets)), (8, 12))
        self.assertTrue(validate(M).is_closed_pseudomanifold)

    def test_grid_disc_catalog_entry(self):
        M = grid_disc()
        report = validate(M)

        self.assertEqual(M.size, 18)
        self.assertFalse(report.closed)
        self.assertTrue(report.strongly_connected)
        self.assertTrue(DISC_CURVE <= M.interior_facets)
        self.assertTrue(all(brick in M.bricks for brick in DISC_MOVES))

    def test_unknown_names(self):
        for name in ("cube", "boundary-simplex(0)", "boundary-simplex(x)"):
            with self.subTest(name):
                with self.assertRaises(SchemaError):
                    catalog(name)


class TestTorusFixtures(unittest.TestCase):
    def test_lines_have_three_edges_each(self):
        lines = torus_lines()
        M = torus18()

        self.assertEqual(len(lines), 9)
        for name, edges in lines.items():
            with self.subTest(name):
                self.assertEqual(len(edges), 3)
                self.assertTrue(edges <= M.interior_facets)

    def test_vertex_links_are_hexagons(self):
        M = torus18()
        for vertex in range(9):
            with self.subTest(vertex=vertex):
                self.assertEqual(len(vertex_link(M, vertex)), 6)

    def test_unknown_vertex(self):
        with self.assertRaises(UnknownIdentifierError):
            vertex_link(torus18(), 42)


class TestConnectedSum(unittest.TestCase):
    def test_two_tetrahedra(self):
        M1, M2 = tetrahedron(), tetrahedron()
        vertex_map = relabel_vertices_for_sum(M1, 3, M2, 0)

        built = build_connected_sum(M1, M2, 3, 0, vertex_map=vertex_map)

        self.assertEqual(built.complex.size, 6)
        self.assertEqual(len(built.complex.facets), 9)
        self.assertEqual(_closed_flags(built.complex), (True, True, True))
        self.assertEqual(built.interface, frozenset({(1, 2), (1, 3), (2, 3)}))
        self.assertEqual(built.complex.interface, built.interface)
        self.assertEqual(sorted(built.first.values()), [0, 1, 2])
        self.assertEqual(sorted(built.second.values()), [3, 4, 5])

    def test_interface_facets_join_the_two_sides(self):
        built = build_connected_sum(
            tetrahedron(), tetrahedron(), 3, 0, vertex_map={1: 0, 2: 1, 3: 2}
        )
        first_side = set(built.first.values())
        for facet_id in built.interface:
            a, b = built.complex.facets[facet_id].incidence
            self.assertNotEqual(a in first_side, b in first_side)

    def test_torus_with_tetrahedron(self):
        M1, M2 = torus18(), tetrahedron()
        glued = connected_sum(M1, M2, 1, 0, vertex_map=relabel_vertices_for_sum(M1, 1, M2, 0))

        self.assertEqual(glued.size, 20)
        self.assertEqual(_closed_flags(glued), (True, True, True))

    def test_generic_sum_along_a_facet_map(self):
        def two_cells(prefix):
            return BrickComplex.from_parts(
                1,
                {f"{prefix}A": ["p", "q"], f"{prefix}B": ["p", "q"]},
                {"p": ([], 1), "q": ([], 1)},
            )

        glued = connected_sum(two_cells("x"), two_cells("y"), "xA", "yB", boundary_map={"p": "q", "q": "p"})

        self.assertEqual(glued.size, 2)
        self.assertEqual(_closed_flags(glued), (True, True, True))

    def test_errors(self):
        tet = tetrahedron()
        with self.assertRaises(ComplexError):
            connected_sum(tet, boundary_simplex(4), 0, 0, vertex_map={0: 0, 1: 1, 2: 2})
        with self.assertRaises(ComplexError):
            connected_sum(tet, tet, 0, 0, vertex_map={0: 0, 1: 1, 2: 1})
        with self.assertRaises(ComplexError):
            connected_sum(tet, tet, 0, 0)
        with self.assertRaises(ComplexError):
            connected_sum(grid_disc(), tet, 1, 0, vertex_map={0: 0, 1: 1, 5: 2})
        with self.assertRaises(UnknownIdentifierError):
            connected_sum(tet, tet, 9, 0, vertex_map={0: 0, 1: 1, 2: 2})


class TestStabilize(unittest.TestCase):
    def test_tetrahedron(self):
        M, new = stabilize(tetrahedron(), 0)

        self.assertEqual(M.size, 6)
        self.assertEqual(new, [4, 5, 6])
        self.assertNotIn(0, M.bricks)
        self.assertEqual(_closed_flags(M), (True, True, True))
        self.assertTrue(all(4 in M.vertices[b] for b in new))

    def test_torus(self):
        M, _ = stabilize(torus18(), 5)
        self.assertEqual(M.size, 20)
        self.assertEqual(_closed_flags(M), (True, True, True))

    def test_keeps_old_weights(self):
        weighted = from_simplices(
            [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)], weights={(1, 2): Fraction(5, 2)}
        )
        M, _ = stabilize(weighted, 3)

        self.assertEqual(M.facets[(1, 2)].weight, Fraction(5, 2))
        self.assertEqual(M.facets[(1, 4)].weight, 1)

    def test_generic_complex_is_refused(self):
        M = BrickComplex.from_parts(1, {"A": ["p", "q"], "B": ["p", "q"]}, {"p": ([], 1), "q": ([], 1)})
        with self.assertRaises(ComplexError):
            stabilize(M, "A")


class TestRandomPseudomanifolds(unittest.TestCase):
    def test_flip_keeps_a_closed_surface(self):
        M = flip_edge(octahedron(), (0, 2))

        self.assertEqual(M.size, 8)
        self.assertEqual(_closed_flags(M), (True, True, True))
        self.assertNotIn((0, 2), M.facets)

    def test_random_complexes_are_closed_and_bounded(self):
        rng = random.Random(11)
        for sample in range(60):
            dimension = 2 if sample % 3 else 4
            M = random_pseudomanifold(rng, 8, dimension=dimension)
            with self.subTest(sample=sample):
                self.assertLessEqual(M.size, 8)
                self.assertEqual(M.dimension, dimension)
                self.assertEqual(_closed_flags(M), (True, True, True))

    def test_random_weights(self):
        rng = random.Random(3)
        choices = [Fraction(1), Fraction(1, 2), Fraction(3)]
        M = random_pseudomanifold(rng, 8, weight_choices=choices, steps=3)

        self.assertTrue(all(f.weight in choices for f in M.facets.values()))

    def test_too_small_budget(self):
        with self.assertRaises(ComplexError):
            random_pseudomanifold(random.Random(0), 3)


if __name__ == "__main__":
    unittest.main()
