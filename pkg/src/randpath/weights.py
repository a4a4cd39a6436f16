"""Weight functions and the path-ensemble measure.

A weight function U maps the local counts (n, u, t) at a vertex to a
non-negative value.  The measure of a configuration is
prod_e beta^{m_e}/m_e! * prod_x U(counts at x).  Four built-in choices
reproduce the classical models:

  spin   — Gamma(N/2) / (2^n Gamma(n + N/2)) when no walks of colour >= 2
           touch the vertex; infinite edge support.
  loop   — indicator of at most one visit, no parallel pairings, no walks of
           colour >= 2.
  perm   — N = 3; empty or singly-visited vertices, with colour-3 walk
           endpoints carrying sqrt(beta).
  ddimer — N = 3, beta = 1; every vertex visited exactly once.

Vertex values are exact rationals except for the sqrt(beta) factors of the
permutation model, which are tracked symbolically as half-powers of beta and
always combine in pairs in any valid configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .wires import LocalCounts, local_counts


@dataclass(frozen=True)
class WeightValue:
    """Exact vertex weight: coeff * beta^(half_powers/2)."""

    coeff: Fraction
    half_powers: int = 0

    def is_zero(self):
        return self.coeff == 0


ZERO = WeightValue(Fraction(0))
ONE = WeightValue(Fraction(1))


@dataclass(frozen=True)
class WeightFunction:
    """U together with its support metadata.

    edge_cap: finite per-edge multiplicity cap forced by the support
              (None = infinite support, truncation required for sums).
    vertex_link_cap: max number of incident links with nonzero weight,
              used for sound pruning (None when unbounded).
    """

    name: str
    n_colours: int
    edge_cap: int | None
    vertex_link_cap: int | None
    beta: Fraction | None = None  # only the permutation weight carries beta
    params: dict = field(default_factory=dict, compare=False)

    def value(self, counts: LocalCounts) -> WeightValue:
        raise NotImplementedError

    def is_zero(self, counts):
        return self.value(counts).is_zero()


def _gamma_ratio(n, N):
    """Gamma(N/2) / (2^n Gamma(n + N/2)) = 1 / prod_{j=0}^{n-1} (2j + N)."""
    denom = 1
    for j in range(n):
        denom *= 2 * j + N
    return Fraction(1, denom)


class SpinWeight(WeightFunction):
    def value(self, counts):
        if any(counts.u[i] != 0 for i in range(1, self.n_colours)):
            return ZERO
        return WeightValue(_gamma_ratio(counts.n_total, self.n_colours))


class LoopWeight(WeightFunction):
    def value(self, counts):
        if counts.n_total not in (0, 1) or counts.t != 0:
            return ZERO
        if any(counts.u[i] != 0 for i in range(1, self.n_colours)):
            return ZERO
        return ONE


class PermutationWeight(WeightFunction):
    def value(self, counts):
        n = counts.n_total
        if n == 1 and counts.u[2] == 1:
            return WeightValue(Fraction(1), half_powers=1)
        if n in (0, 1) and counts.t == 0 and counts.u[1] == 0 \
                and counts.u[2] == 0 and counts.n[2] == 0:
            return ONE
        return ZERO


class DoubleDimerWeight(WeightFunction):
    def value(self, counts):
        n = counts.n_total
        if n != 1:
            return ZERO
        if counts.u[2] == 1:
            return ONE
        if counts.t == 0 and counts.u[1] == 0 and counts.u[2] == 0 \
                and counts.n[2] == 0:
            return ONE
        return ZERO


def spin_weight(N):
    if N < 1:
        raise ValueError("N must be >= 1")
    return SpinWeight(name="spin", n_colours=N, edge_cap=None, vertex_link_cap=None)


def loop_weight(N):
    if N < 1:
        raise ValueError("N must be >= 1")
    # n <= 1 kills any edge with two links (they would pair in parallel or
    # push a visit count to 2), so support is capped at one link per edge
    return LoopWeight(name="loop", n_colours=N, edge_cap=1, vertex_link_cap=2)


def permutation_weight(beta):
    beta = Fraction(beta)
    if beta < 0:
        raise ValueError("beta must be >= 0")
    return PermutationWeight(name="perm", n_colours=3, edge_cap=1,
                             vertex_link_cap=2, beta=beta)


def double_dimer_weight():
    return DoubleDimerWeight(name="ddimer", n_colours=3, edge_cap=1,
                             vertex_link_cap=2, beta=Fraction(1))


BUILTIN_MODELS = ("spin", "loop", "perm", "ddimer")


def make_weight(model, N=None, beta=None):
    """Weight function from a model tag; the perm/ddimer colour counts are fixed."""
    if model == "spin":
        return spin_weight(N if N is not None else 1)
    if model == "loop":
        return loop_weight(N if N is not None else 1)
    if model == "perm":
        if beta is None:
            raise ValueError("perm model requires beta")
        return permutation_weight(beta)
    if model == "ddimer":
        return double_dimer_weight()
    raise ValueError(f"unknown model {model!r}; expected one of {BUILTIN_MODELS}")


# -- the measure ---------------------------------------------------------


def measure(graph, w, beta, weight_fn):
    """mu(w) = prod_e beta^{m_e}/m_e! * prod_x U_x(w), as an exact Fraction.

    Any configuration with an odd number of pending sqrt(beta) factors has a
    colour-3 walk endpoint imbalance and cannot be structurally valid; this
    is asserted rather than silently truncated.
    """
    beta = Fraction(beta)
    if weight_fn.beta is not None and weight_fn.beta != beta:
        raise ValueError("beta disagrees with the weight function's parameter")
    coeff = Fraction(1)
    halves = 0
    for k in range(graph.n_edges):
        mk = w.m[k]
        if mk:
            coeff *= beta ** mk / factorial(mk)
    for x in range(graph.n_vertices):
        val = weight_fn.value(local_counts(graph, w, x, weight_fn.n_colours))
        if val.is_zero():
            return Fraction(0)
        coeff *= val.coeff
        halves += val.half_powers
    if halves % 2 != 0:
        raise ValueError("odd number of sqrt(beta) factors in a configuration")
    return coeff * beta ** (halves // 2)


# -- results --------------------------------------------------------------


@dataclass(frozen=True)
class ModelResult:
    """Exact or float-mode value with an explicit error bound.

    exact results carry error 0; float-mode results carry a rigorous
    accumulated bound.  convention_fired records that Z(empty) fell back to
    the defined value 1 because no configuration contributed.
    """

    value: object  # Fraction (exact) or float
    exact: bool
    error: float = 0.0
    convention_fired: bool = False
    truncation_cap: int | None = None

    def as_float(self):
        return float(self.value)

    def __repr__(self):
        tag = "exact" if self.exact else f"float±{self.error:g}"
        return f"ModelResult({self.value}, {tag})"


def exact_result(value, convention_fired=False, truncation_cap=None):
    return ModelResult(value=Fraction(value), exact=True,
                       convention_fired=convention_fired,
                       truncation_cap=truncation_cap)


def float_result(value, error, convention_fired=False, truncation_cap=None):
    return ModelResult(value=float(value), exact=False, error=float(error),
                       convention_fired=convention_fired,
                       truncation_cap=truncation_cap)


def ratio(num: ModelResult, den: ModelResult) -> ModelResult:
    """num/den with error propagation; exact iff both sides are exact."""
    if den.value == 0:
        raise ZeroDivisionError("denominator partition function is zero")
    if num.exact and den.exact:
        return exact_result(Fraction(num.value) / Fraction(den.value))
    nv, dv = float(num.value), float(den.value)
    val = nv / dv
    err = (num.error + abs(val) * den.error) / abs(dv)
    return float_result(val, err)
