"""Ergodic optimization for locally constant functions on subshifts of finite
type, via mean cycles of the de Bruijn graph."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import networkx as nx

from .averaging import birkhoff_limit_periodic
from .functions import LocallyConstantFn
from .measure import PeriodicOrbit
from .space import SFT, format_word


class DeBruijnGraph:
    """Nodes: allowed (m-1)-words.  Edges: allowed m-words, weighted by f."""

    def __init__(self, f: LocallyConstantFn, sft: SFT | None = None):
        sft = sft if sft is not None else SFT.full(f.A)
        if sft.A != f.A:
            raise ValueError("function and subshift use different alphabets")
        g = f.lift(max(f.depth, 2))
        self.f, self.g, self.sft = f, g, sft
        m = g.depth
        self.nodes = [w for w in product(range(sft.A), repeat=m - 1) if sft.admissible(w)]
        index = {w: i for i, w in enumerate(self.nodes)}
        self.index = index
        self.edges = []  # (u, v, weight, m-word)
        for u in self.nodes:
            for a in sft.successors(u[-1]):
                w = u + (a,)
                self.edges.append((index[u], index[w[1:]], g.on_word(w), w))
        self.incoming = [[] for _ in self.nodes]
        for u, v, wt, _ in self.edges:
            self.incoming[v].append((u, wt))

    def __len__(self):
        return len(self.nodes)

    def is_strongly_connected(self):
        n = len(self.nodes)
        if n == 0:
            return False
        fwd = [[] for _ in range(n)]
        bwd = [[] for _ in range(n)]
        for u, v, _, _ in self.edges:
            fwd[u].append(v)
            bwd[v].append(u)
        for adj in (fwd, bwd):
            seen, stack = {0}, [0]
            while stack:
                for v in adj[stack.pop()]:
                    if v not in seen:
                        seen.add(v)
                        stack.append(v)
            if len(seen) != n:
                return False
        return True

    def cycle_word(self, cycle):
        """Periodic word read along a node cycle, in least rotation."""
        w = tuple(self.nodes[v][0] for v in cycle)
        return min(w[i:] + w[:i] for i in range(len(w)))

    def to_networkx(self, weights=None):
        G = nx.DiGraph()
        G.add_nodes_from(range(len(self.nodes)))
        for u, v, wt, _ in self.edges:
            if weights is None or weights(u, v, wt):
                G.add_edge(u, v, weight=wt)
        return G


def _karp(graph: DeBruijnGraph, sign):
    n = len(graph)
    NEG = None
    D = [[Fraction(0)] * n]
    for _ in range(n):
        prev = D[-1]
        row = []
        for v in range(n):
            best = NEG
            for u, wt in graph.incoming[v]:
                if prev[u] is NEG:
                    continue
                cand = prev[u] + sign * wt
                if best is NEG or cand > best:
                    best = cand
            row.append(best)
        D.append(row)
    lam = None
    for v in range(n):
        if D[n][v] is NEG:
            continue
        worst = None
        for k in range(n):
            if D[k][v] is NEG:
                continue
            val = (D[n][v] - D[k][v]) / (n - k)
            if worst is None or val < worst:
                worst = val
        if worst is not None and (lam is None or worst > lam):
            lam = worst
    return lam


def _optimal_cycle(graph: DeBruijnGraph, sign, lam):
    """Least-rotation-minimal word among cycles of mean exactly lam."""
    n = len(graph)
    pot = [Fraction(0)] * n
    for _ in range(n + 1):
        changed = False
        for u, v, wt, _ in graph.edges:
            cand = pot[u] + sign * wt - lam
            if cand > pot[v]:
                pot[v] = cand
                changed = True
        if not changed:
            break
    tight = graph.to_networkx(lambda u, v, wt: pot[u] + sign * wt - lam == pot[v])
    best = None
    for cyc in nx.simple_cycles(tight):
        w = graph.cycle_word(cyc)
        if best is None or w < best:
            best = w
    return best


def _mean_cycle(f, sft, sign):
    graph = DeBruijnGraph(f, sft)
    if not graph.is_strongly_connected():
        raise ValueError("de Bruijn graph is not strongly connected")
    lam = _karp(graph, sign)
    word = _optimal_cycle(graph, sign, lam)
    return sign * lam, word


def max_mean_cycle(f, sft=None):
    """(abar, cycle word): the largest orbit average over periodic orbits."""
    return _mean_cycle(f, sft, 1)


def min_mean_cycle(f, sft=None):
    return _mean_cycle(f, sft, -1)


def _path_series(f, K, sft, sign):
    graph = DeBruijnGraph(f, sft)
    n = len(graph)
    val = [Fraction(0)] * n
    out = []
    for k in range(1, K + 1):
        new = []
        for v in range(n):
            new.append(max(val[u] + sign * wt for u, wt in graph.incoming[v]))
        val = new
        out.append(sign * max(val) / k)
    return out


def finite_sup_avg(f, k, sft=None) -> Fraction:
    """dbar_k: largest k-window average over allowed words of length k+m-1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return _path_series(f, k, sft, 1)[-1]


def finite_inf_avg(f, k, sft=None) -> Fraction:
    if k < 1:
        raise ValueError("k must be >= 1")
    return _path_series(f, k, sft, -1)[-1]


def sandwich_slack(f, sft=None):
    """Numerator of the finite-horizon gap bound, A^{m-1} (max f - min f).

    On a proper subshift a depth-1 function can need up to (#nodes - 1)
    steps of excursion, so the larger of the two counts is used there.
    """
    A = sft.A if sft is not None else f.A
    count = A ** (f.depth - 1)
    if sft is not None and not sft.is_full():
        count = max(count, len(DeBruijnGraph(f, sft)) - 1)
    return count * (f.max - f.min)


@dataclass
class ErgOptReport:
    abar: Fraction
    aunder: Fraction
    witness_max: tuple
    witness_min: tuple
    dbar_series: list
    dunder_series: list
    bbar_observed: Fraction | None
    bunder_observed: Fraction | None
    checks: dict = field(default_factory=dict)

    @property
    def cbar(self):
        # recorded from the proved identity, never computed independently
        return self.abar

    @property
    def cunder(self):
        return self.aunder

    @property
    def ok(self):
        return all(self.checks.values())

    def to_json(self):
        from .io import frac_str

        return {
            "abar": frac_str(self.abar),
            "aunder": frac_str(self.aunder),
            "witness": format_word(self.witness_max),
            "witness_min": format_word(self.witness_min),
            "bbar_observed": None if self.bbar_observed is None else frac_str(self.bbar_observed),
            "bunder_observed": None if self.bunder_observed is None else frac_str(self.bunder_observed),
            "dbar": [[str(k), frac_str(v)] for k, v in enumerate(self.dbar_series, 1)],
            "dunder": [[str(k), frac_str(v)] for k, v in enumerate(self.dunder_series, 1)],
            "checks": dict(sorted(self.checks.items())),
        }


def jenkinson_check(f, sft=None, K=64, typical_points=()) -> ErgOptReport:
    abar, wmax = max_mean_cycle(f, sft)
    aunder, wmin = min_mean_cycle(f, sft)
    dbar = _path_series(f, K, sft, 1)
    dunder = _path_series(f, K, sft, -1)
    limits = [birkhoff_limit_periodic(f, x) for x in typical_points]
    bbar = max(limits) if limits else None
    bunder = min(limits) if limits else None
    slack = sandwich_slack(f, sft)
    checks = {
        "witness_max_average": PeriodicOrbit(wmax, A=f.A).integrate(f) == abar,
        "witness_min_average": PeriodicOrbit(wmin, A=f.A).integrate(f) == aunder,
        "dbar_above_abar": all(d >= abar for d in dbar),
        "dunder_below_aunder": all(d <= aunder for d in dunder),
        "dbar_sandwich": all(d - abar <= slack / k for k, d in enumerate(dbar, 1)),
        "dunder_sandwich": all(aunder - d <= slack / k for k, d in enumerate(dunder, 1)),
        "dbar_converged_at_K": dbar[-1] - abar <= slack / K,
    }
    if limits:
        checks["bbar_below_abar"] = bbar <= abar
        checks["bunder_above_aunder"] = bunder >= aunder
    return ErgOptReport(abar, aunder, wmax, wmin, dbar, dunder, bbar, bunder, checks)
