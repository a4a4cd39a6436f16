import json

import pytest

from randpath import lattice as lat


class TestBuildTorus:
    @pytest.mark.parametrize("d,L,nv,ne", [(2, 4, 16, 32), (3, 4, 64, 192), (1, 6, 6, 6)])
    def test_counts(self, d, L, nv, ne):
        g = lat.build_torus(d, L)
        assert g.n_vertices == nv == L ** d
        assert g.n_edges == ne == d * L ** d

    def test_degrees(self):
        g = lat.build_torus(2, 6)
        assert all(g.degree(i) == 4 for i in range(g.n_vertices))

    def test_rejects_odd_L(self):
        with pytest.raises(lat.LatticeError, match="even"):
            lat.build_torus(2, 3)

    def test_rejects_small_L(self):
        with pytest.raises(lat.LatticeError):
            lat.build_torus(2, 2)

    def test_simple_graph(self):
        g = lat.build_torus(3, 4)
        assert len(set(g.edges)) == g.n_edges
        assert all(a != b for a, b in g.edges)

    def test_deterministic_ordering(self):
        g1, g2 = lat.build_torus(2, 4), lat.build_torus(2, 4)
        assert g1.vertices == g2.vertices and g1.edges == g2.edges
        assert list(g1.vertices) == sorted(g1.vertices)


class TestReflection:
    def test_edge_plane_images(self):
        g = lat.build_torus(2, 4)
        pl = lat.edge_plane(0, 0.5)
        assert lat.reflect_vertex(g, pl, (0, 0)) == (1, 0)
        assert lat.reflect_vertex(g, pl, (3, 2)) == (2, 2)

    def test_site_plane_fixed_point(self):
        g = lat.build_torus(2, 4)
        pl = lat.site_plane(0, 1)
        assert lat.reflect_vertex(g, pl, (1, 3)) == (1, 3)

    @pytest.mark.parametrize("kind,offset", [("edge", 1.5), ("site", 2)])
    def test_involution(self, kind, offset):
        g = lat.build_torus(2, 6)
        pl = lat.edge_plane(1, offset) if kind == "edge" else lat.site_plane(1, offset)
        for v in g.vertices:
            assert lat.reflect_vertex(g, pl, lat.reflect_vertex(g, pl, v)) == v

    def test_edge_plane_no_fixed_vertices(self):
        g = lat.build_torus(2, 4)
        for pl in lat.all_edge_planes(g):
            assert all(lat.reflect_vertex(g, pl, v) != v for v in g.vertices)

    def test_site_plane_fixed_count(self):
        g = lat.build_torus(2, 4)
        for pl in lat.all_site_planes(g):
            fixed = [v for v in g.vertices if lat.reflect_vertex(g, pl, v) == v]
            assert len(fixed) == 2 * g.L ** (g.d - 1)

    def test_maps_edges_to_edges(self):
        g = lat.build_torus(2, 6)
        eset = set(g.edges)
        for pl in [lat.edge_plane(0, 2.5), lat.site_plane(1, 3)]:
            perm = lat.reflect_index_map(g, pl)
            for a, b in g.edges:
                ia, ib = perm[a], perm[b]
                assert (min(ia, ib), max(ia, ib)) in eset

    def test_bad_offsets_rejected(self):
        with pytest.raises(lat.LatticeError):
            lat.edge_plane(0, 1)
        with pytest.raises(lat.LatticeError):
            lat.site_plane(0, 1.5)


class TestHalves:
    def test_edge_halves_T4(self):
        g = lat.build_torus(2, 4)
        plus, minus, bnd = lat.torus_halves(g, lat.edge_plane(0, 0.5))
        assert len(plus) == len(minus) == 8
        assert len(bnd) == 2 * g.L ** (g.d - 1) == 8
        assert plus.isdisjoint(minus)

    def test_site_halves_T4(self):
        g = lat.build_torus(2, 4)
        plus, minus, fixed = lat.torus_halves(g, lat.site_plane(0, 0))
        assert len(fixed) == 8
        assert plus & minus == fixed
        assert plus | minus == set(range(g.n_vertices))

    @pytest.mark.parametrize("d,L", [(1, 4), (2, 4), (2, 6), (3, 4)])
    def test_theta_swaps_halves(self, d, L):
        g = lat.build_torus(d, L)
        for pl in [lat.edge_plane(0, 0.5), lat.site_plane(d - 1, 1)]:
            plus, minus, _ = lat.torus_halves(g, pl)
            perm = lat.reflect_index_map(g, pl)
            assert {perm[i] for i in plus} == minus
            assert {perm[i] for i in minus} == plus

    def test_edge_boundary_structure(self):
        g = lat.build_torus(2, 6)
        pl = lat.edge_plane(0, 1.5)
        plus, minus, bnd = lat.torus_halves(g, pl)
        perm = lat.reflect_index_map(g, pl)
        for a, b in bnd:
            assert (a in plus) != (b in plus)
            # each boundary edge joins a vertex to its mirror
            assert perm[a] == b and perm[b] == a


class TestSpecialSets:
    @pytest.mark.parametrize("d,L,r", [(1, 4, 1), (2, 6, 1), (2, 6, 2), (3, 4, 1)])
    def test_slab_complement_cardinality(self, d, L, r):
        g = lat.build_torus(d, L)
        s = lat.slab_set(g, r)
        assert g.n_vertices - len(s) == (L - 2 * r) ** d

    def test_slab_non_integer_radius(self):
        g = lat.build_torus(2, 4)
        s = lat.slab_set(g, 0.5)
        # complement: coordinates in [0.5, 3.5) -> {1, 2, 3} on both axes
        assert g.n_vertices - len(s) == 9

    def test_origin_not_in_H(self):
        g = lat.build_torus(2, 4)
        h = lat.axes_and_bulk_set(g)
        assert g.index((0, 0)) not in h
        assert g.index((0, 0)) in lat.axes_and_bulk_set(g, include_origin=True)

    def test_H_matches_independent_predicate(self):
        g = lat.build_torus(2, 4)
        h = lat.axes_and_bulk_set(g)
        for i, x in enumerate(g.vertices):
            all_nonzero = all(c != 0 for c in x)
            on_axis = any(x[j] != 0 and all(x[k] == 0 for k in range(g.d) if k != j)
                          for j in range(g.d))
            assert (i in h) == (all_nonzero or on_axis)

    @pytest.mark.parametrize("L", [4, 6])
    def test_box_contains_ball_off_slab(self, L):
        g = lat.build_torus(2, L)
        r = L / 8
        s = lat.slab_set(g, r)
        b = lat.ball_set(g, r)
        for i in set(range(g.n_vertices)) - s:
            q = lat.box_set(g, g.vertices[i])
            assert b <= q
            # off-slab vertices always lie in H_L
            assert i in lat.axes_and_bulk_set(g)

    def test_ball_T4(self):
        g = lat.build_torus(2, 4)
        assert lat.ball_set(g, 0.5) == {g.index((0, 0))}
        assert len(lat.ball_set(g, 1)) == 9

    def test_special_sets_bundle(self):
        g = lat.build_torus(2, 6)
        out = lat.special_sets(g, (2, 2), 1)
        assert set(out) == {"Q", "H", "B", "S"}


class TestGeneralGraphs:
    def test_path_cycle_grid(self):
        assert lat.path_graph(3).n_edges == 2
        assert lat.cycle_graph(4).n_edges == 4
        g = lat.grid_graph(2, 2)
        assert g.n_vertices == 4 and g.n_edges == 4
        g23 = lat.grid_graph(2, 3)
        assert g23.n_vertices == 6 and g23.n_edges == 7

    def test_json_round_trip(self):
        g = lat.grid_graph(2, 3)
        g2 = lat.from_json(g.to_json())
        assert g2.vertices == g.vertices and g2.edges == g.edges

    def test_json_plain_labels(self):
        text = json.dumps({"vertices": [0, 1, 2], "edges": [[0, 1], [1, 2]]})
        g = lat.from_json(text)
        assert g.n_vertices == 3 and g.n_edges == 2
