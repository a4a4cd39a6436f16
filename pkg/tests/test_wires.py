from fractions import Fraction

import pytest

from randpath import lattice as lat
from randpath import wires as wr
from randpath import weights as wt


def single_edge():
    return lat.path_graph(2)


def loop_on_cycle4():
    """One colour-1 loop around the 4-cycle."""
    g = lat.cycle_graph(4)
    m = (1, 1, 1, 1)
    colours = ((1,), (1,), (1,), (1,))
    # pair the two incident slots at every vertex
    pairings = []
    for x in range(4):
        slots = wr.incident_slots(g, m, x)
        pairings.append((tuple(sorted(slots)),))
    w = wr.WireConfig(m=m, colours=colours, pairings=tuple(pairings))
    wr.validate(g, w)
    return g, w


class TestLocalCounts:
    def test_plaquette_loop(self):
        g, w = loop_on_cycle4()
        for x in range(4):
            c = wr.local_counts(g, w, x, 1)
            assert c.n == (1,) and c.u == (0,) and c.t == 0

    def test_doubled_edge_parallel_pairing(self):
        g = single_edge()
        m = (2,)
        colours = ((1, 1),)
        pair = (((0, 0), (0, 1)),)
        w = wr.WireConfig(m=m, colours=colours, pairings=(pair, pair))
        wr.validate(g, w)
        c = wr.local_counts(g, w, 0, 1)
        assert c.n == (1,) and c.v == (2,) and c.t == 2

    def test_single_unpaired_colour2_link(self):
        g = single_edge()
        w = wr.WireConfig(m=(1,), colours=((2,),), pairings=((), ()))
        for x in (0, 1):
            c = wr.local_counts(g, w, x, 2)
            assert c.u == (0, 1) and c.n == (0, 1)

    def test_identity_n_v_u(self):
        g = lat.cycle_graph(4)
        for w in wr.enumerate_wires(g, 2, edge_cap=1):
            for x in range(4):
                c = wr.local_counts(g, w, x, 2)
                for i in range(2):
                    assert c.v[i] % 2 == 0
                    assert c.n[i] == c.v[i] // 2 + c.u[i]


class TestValidation:
    def test_rejects_self_pairing(self):
        g = single_edge()
        w = wr.WireConfig(m=(1,), colours=((1,),),
                          pairings=((((0, 0), (0, 0)),), ()))
        with pytest.raises(wr.WireError):
            wr.validate(g, w)

    def test_rejects_colour_mismatch(self):
        g = lat.path_graph(3)
        # two links meeting at vertex 1 with different colours, paired there
        w = wr.WireConfig(m=(1, 1), colours=((1,), (2,)),
                          pairings=((), (((0, 0), (1, 0)),), ()))
        with pytest.raises(wr.WireError, match="colour"):
            wr.validate(g, w)

    def test_rejects_double_use(self):
        g = lat.path_graph(3)
        w = wr.WireConfig(m=(2, 1), colours=((1, 1), (1,)),
                          pairings=((), (((0, 0), (0, 1)), ((0, 0), (1, 0))), ()))
        with pytest.raises(wr.WireError, match="twice"):
            wr.validate(g, w)


class TestEnumeration:
    def test_single_edge_no_walk_sector(self):
        g = single_edge()
        configs = list(wr.enumerate_wires(g, 1, edge_cap=1, constraint={}))
        assert len(configs) == 1
        assert configs[0] == wr.empty_config(g)

    def test_single_edge_walk_sector(self):
        g = single_edge()
        configs = list(wr.enumerate_wires(g, 1, edge_cap=2, constraint={0: 1, 1: 1}))
        by_m = {}
        for w in configs:
            by_m.setdefault(w.total_links(), []).append(w)
        # one link, unpaired at both ends: the unique m=1 configuration
        assert len(by_m.get(1, [])) == 1

    def test_odd_constraint_empty(self):
        g = lat.path_graph(3)
        assert list(wr.enumerate_wires(g, 1, edge_cap=1, constraint={0: 1})) == []

    def test_exactly_once(self):
        g = lat.cycle_graph(3)
        configs = list(wr.enumerate_wires(g, 2, edge_cap=1))
        assert len(configs) == len(set(configs))

    def test_requires_cap(self):
        with pytest.raises(wr.WireError):
            next(wr.enumerate_wires(single_edge(), 1, edge_cap=None))

    def test_pruning_sound(self):
        g = lat.cycle_graph(4)
        u = wt.loop_weight(2)
        beta = Fraction(1, 3)
        pruned = sum(wt.measure(g, w, beta, u)
                     for w in wr.enumerate_wires(g, 2, edge_cap=1, constraint={},
                                                 weight=u, prune=True))
        full = sum(wt.measure(g, w, beta, u)
                   for w in wr.enumerate_wires(g, 2, edge_cap=1, constraint={},
                                               weight=u, prune=False))
        assert pruned == full

    def test_walk_count_matches_unpaired_endpoints(self):
        g = lat.cycle_graph(4)
        for w in wr.enumerate_wires(g, 2, edge_cap=1):
            comps = wr.decompose(g, w)
            for i in (1, 2):
                walks = sum(1 for c in comps if not c["closed"] and c["colour"] == i)
                endpoints = sum(
                    wr.local_counts(g, w, x, 2).u[i - 1] for x in range(4))
                assert endpoints == 2 * walks


class TestRestrictProjectReflect:
    def setup_method(self):
        self.g = lat.build_torus(1, 4)
        self.plane = lat.edge_plane(0, 0.5)
        self.plus, self.minus, self.bnd = lat.torus_halves(self.g, self.plane)

    def all_configs(self):
        return list(wr.enumerate_wires(self.g, 1, edge_cap=1))

    def test_restrict_full_and_empty(self):
        for w in self.all_configs()[:50]:
            assert wr.restrict(self.g, w, range(4)) == w
            assert wr.restrict(self.g, w, ()) == wr.empty_config(self.g)

    def test_loop_restricts_to_open_chain(self):
        g = self.g
        m = (1, 1, 1, 1)
        colours = ((1,),) * 4
        pairings = []
        for x in range(4):
            slots = wr.incident_slots(g, m, x)
            pairings.append((tuple(sorted(slots)),))
        w = wr.WireConfig(m, colours, tuple(pairings))
        w_half = wr.restrict(g, w, self.plus)
        comps = wr.decompose(g, w_half)
        assert len(comps) == 1 and not comps[0]["closed"]
        for x in self.minus:
            c = wr.local_counts(g, w_half, x, 1)
            if c.n[0]:
                assert c.u == (1,)

    def test_projection_idempotent(self):
        for w in self.all_configs()[:80]:
            p = wr.project_boundary(self.g, w, self.bnd)
            assert wr.project_boundary(self.g, p, self.bnd) == p

    def test_reflection_involution_and_counts(self):
        perm = lat.reflect_index_map(self.g, self.plane)
        for w in self.all_configs()[:80]:
            rw = wr.reflect_wire(self.g, w, self.plane)
            assert wr.reflect_wire(self.g, rw, self.plane) == w
            for x in range(4):
                assert wr.local_counts(self.g, rw, perm[x], 1) == \
                    wr.local_counts(self.g, w, x, 1)

    def test_measure_reflection_invariant(self):
        u = wt.loop_weight(1)
        beta = Fraction(2, 5)
        for w in self.all_configs():
            rw = wr.reflect_wire(self.g, w, self.plane)
            assert wt.measure(self.g, w, beta, u) == wt.measure(self.g, rw, beta, u)

    def test_concatenate_round_trip(self):
        for w in self.all_configs():
            w1 = wr.restrict(self.g, w, self.plus)
            w2 = wr.restrict(self.g, w, self.minus)
            wp = wr.project_boundary(self.g, w, self.bnd)
            rebuilt = wr.concatenate(self.g, w1, w2, wp, self.plus, self.minus, self.bnd)
            assert rebuilt == w

    def test_concatenate_mismatch_raises(self):
        w_empty = wr.empty_config(self.g)
        m = [0] * 4
        eidx = self.g.edge_index()
        k = eidx[sorted(self.bnd)[0]]
        m[k] = 1
        colours = [()] * 4
        colours[k] = (1,)
        w_link = wr.WireConfig(tuple(m), tuple(colours), ((),) * 4)
        with pytest.raises(wr.WireError, match="mismatch"):
            wr.concatenate(self.g, w_link, w_empty, w_empty,
                           self.plus, self.minus, self.bnd)

    def test_factorization_count_identity(self):
        """sum_{w'} #{w1: P_R(w1)=w'}^2 equals the unconstrained total."""
        g = self.g
        all_w = self.all_configs()
        halves = {}
        for w in all_w:
            w1 = wr.restrict(g, w, self.plus)
            halves[w1] = wr.project_boundary(g, w1, self.bnd)
        from collections import Counter
        counts = Counter(halves.values())
        assert sum(c * c for c in counts.values()) == len(all_w)


class TestSerialization:
    def test_text_round_stability(self):
        g, w = loop_on_cycle4()
        text = wr.to_text(g, w)
        assert "edge" in text and "vertex" in text
        assert wr.to_text(g, w) == text

    def test_empty(self):
        g = single_edge()
        assert wr.to_text(g, wr.empty_config(g)) == "empty"
