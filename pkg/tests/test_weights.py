import math
from fractions import Fraction

import pytest

from randpath import lattice as lat
from randpath import wires as wr
from randpath import weights as wt


def counts(n, u, t=0):
    N = len(n)
    v = tuple(2 * (n[i] - u[i]) for i in range(N))
    return wr.LocalCounts(n=tuple(n), u=tuple(u), v=v, t=t)


class TestSpinWeight:
    def test_empty_vertex(self):
        u = wt.spin_weight(3)
        assert u.value(counts((0, 0, 0), (0, 0, 0))).coeff == 1

    @pytest.mark.parametrize("N,n", [(1, 1), (1, 3), (2, 2), (3, 4)])
    def test_gamma_ratio_against_math_gamma(self, N, n):
        u = wt.spin_weight(N)
        nvec = [0] * N
        nvec[0] = n
        uvec = [0] * N
        got = u.value(counts(nvec, uvec)).coeff
        expect = math.gamma(N / 2) / (2 ** n * math.gamma(n + N / 2))
        assert abs(float(got) - expect) < 1e-12

    def test_N1_single_visit_is_one(self):
        assert wt.spin_weight(1).value(counts((1,), (1,))).coeff == 1

    def test_colour2_walk_forbidden(self):
        u = wt.spin_weight(2)
        assert u.value(counts((0, 1), (0, 1))).is_zero()

    def test_no_t_dependence(self):
        u = wt.spin_weight(2)
        a = u.value(counts((2, 0), (0, 0), t=0))
        b = u.value(counts((2, 0), (0, 0), t=2))
        assert a == b


class TestLoopWeight:
    def test_cases(self):
        u = wt.loop_weight(2)
        assert u.value(counts((0, 0), (0, 0))).coeff == 1
        assert u.value(counts((1, 0), (0, 0))).coeff == 1
        assert u.value(counts((2, 0), (0, 0))).is_zero()
        assert u.value(counts((1, 0), (0, 0), t=2)).is_zero()
        assert u.value(counts((0, 1), (0, 1))).is_zero()
        assert u.value(counts((1, 0), (1, 0))).coeff == 1


class TestPermutationWeight:
    def test_cases(self):
        u = wt.permutation_weight(Fraction(1, 4))
        assert u.value(counts((0, 0, 0), (0, 0, 0))).coeff == 1
        v = u.value(counts((0, 0, 1), (0, 0, 1)))
        assert v.coeff == 1 and v.half_powers == 1
        assert u.value(counts((2, 0, 0), (0, 0, 0))).is_zero()
        assert u.value(counts((0, 0, 1), (0, 0, 0))).is_zero()  # n3=1 without u3

    def test_colour3_dimer_total_weight(self):
        g = lat.path_graph(2)
        beta = Fraction(1, 4)
        u = wt.permutation_weight(beta)
        w = wr.WireConfig(m=(1,), colours=((3,),), pairings=((), ()))
        assert wt.measure(g, w, beta, u) == beta ** 2


class TestDoubleDimerWeight:
    def test_cases(self):
        u = wt.double_dimer_weight()
        assert u.value(counts((0, 0, 0), (0, 0, 0))).is_zero()  # n=0 not allowed
        assert u.value(counts((0, 0, 1), (0, 0, 1))).coeff == 1
        assert u.value(counts((1, 0, 0), (0, 0, 0))).coeff == 1
        assert u.value(counts((0, 1, 0), (0, 1, 0))).is_zero()


class TestMeasure:
    def test_empty_config(self):
        g = lat.cycle_graph(4)
        for u in [wt.loop_weight(2), wt.spin_weight(1), wt.permutation_weight(1)]:
            assert wt.measure(g, wr.empty_config(g), Fraction(1), u) == 1

    def test_doubled_edge_factorial(self):
        g = lat.path_graph(2)
        beta = Fraction(1, 2)
        u = wt.spin_weight(1)
        pair = (((0, 0), (0, 1)),)
        w = wr.WireConfig(m=(2,), colours=((1, 1),), pairings=(pair, pair))
        # beta^2/2! times U(n=1)^2 = (1/8) * (1/1)^2 at N=1
        assert wt.measure(g, w, beta, u) == beta ** 2 / 2

    def test_beta_mismatch_rejected(self):
        g = lat.path_graph(2)
        u = wt.permutation_weight(Fraction(1, 4))
        with pytest.raises(ValueError, match="beta"):
            wt.measure(g, wr.empty_config(g), Fraction(1, 2), u)


class TestModelResult:
    def test_ratio_exact(self):
        a = wt.exact_result(Fraction(3, 4))
        b = wt.exact_result(Fraction(1, 2))
        r = wt.ratio(a, b)
        assert r.exact and r.value == Fraction(3, 2) and r.error == 0

    def test_ratio_float_error(self):
        a = wt.float_result(1.0, 1e-9)
        b = wt.float_result(2.0, 1e-9)
        r = wt.ratio(a, b)
        assert not r.exact
        assert abs(r.value - 0.5) < 1e-15
        assert r.error > 0

    def test_make_weight_registry(self):
        assert wt.make_weight("loop", N=2).n_colours == 2
        assert wt.make_weight("ddimer").beta == 1
        with pytest.raises(ValueError):
            wt.make_weight("nope")
        with pytest.raises(ValueError):
            wt.make_weight("perm")
