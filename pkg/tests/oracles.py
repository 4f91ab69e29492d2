"""Slow, independent reference computations used by the tests.

Nothing here calls the fast paths of the library: words are enumerated,
arcs are split at every preimage of a breakpoint, cycles are found by plain
depth-first search.
"""

from fractions import Fraction
from itertools import product

from ergolab.space import CirclePoint, ShiftPoint


def seq(x: ShiftPoint, n):
    return [x[i] for i in range(n)]


def rho_brute(x: ShiftPoint, y: ShiftPoint, n=200):
    for i in range(n):
        if x[i] != y[i]:
            return Fraction(1, 2 ** (i + 1))
    return Fraction(0)


def word_measure(p, w):
    m = Fraction(1)
    for a in w:
        m *= p[a]
    return m


def markov_word_measure(pi0, P, w):
    if not w:
        return Fraction(1)
    m = Fraction(pi0[w[0]])
    for a, b in zip(w, w[1:]):
        m *= P[a][b]
    return m


def shift_ts_brute(weights, cylinders, f, k, A=2):
    """alpha over a union of disjoint cylinders, Bernoulli(weights), by
    enumerating every word long enough to fix all sampled windows."""
    depth = max(len(w) for w in cylinders)
    L = max(depth, k + f.depth - 1)
    num = Fraction(0)
    den = Fraction(0)
    for w in cylinders:
        for tail in product(range(A), repeat=L - len(w)):
            z = tuple(w) + tail
            m = word_measure(weights, z)
            den += m
            num += m * sum(f.on_word(z[j:j + f.depth]) for j in range(k)) / k
    return num / den


def birkhoff_brute(f, x: ShiftPoint, k):
    z = seq(x, k + f.depth)
    return Fraction(sum(f.on_word(tuple(z[j:j + f.depth])) for j in range(k)), k)


def pwl_mean_brute(f, lo, hi, j, b):
    """Mean of f(b^j t) over t in (lo, hi) by splitting at every preimage of
    a breakpoint and integrating each linear piece with the trapezoid rule."""
    scale = b ** j
    cuts = {lo, hi}
    s_lo, s_hi = lo * scale, hi * scale
    n0 = int(s_lo) - 1
    n1 = int(s_hi) + 1
    for n in range(n0, n1 + 1):
        for bp in f.breakpoints:
            s = n + bp
            if s_lo < s < s_hi:
                cuts.add(Fraction(s) / scale)
    pts = sorted(cuts)
    total = Fraction(0)
    for a, c in zip(pts, pts[1:]):
        total += (f.value(a * scale) + f.value(c * scale)) * (c - a) / 2
    return total / (hi - lo)


def circle_ts_brute(f, balls, k, b=2):
    """alpha over disjoint arcs (c - r, c + r)."""
    num = Fraction(0)
    den = Fraction(0)
    for c, r in balls:
        c = c.value if isinstance(c, CirclePoint) else Fraction(c)
        for j in range(k):
            num += 2 * r * pwl_mean_brute(f, c - r, c + r, j, b) / k
        den += 2 * r
    return num / den


def de_bruijn(A, m, allowed=None):
    """Nodes: (m-1)-words; edges: m-words (filtered by `allowed`)."""
    nodes = [w for w in product(range(A), repeat=m - 1)
             if allowed is None or all(allowed[a][b] for a, b in zip(w, w[1:]))]
    idx = {w: i for i, w in enumerate(nodes)}
    adj = {i: [] for i in range(len(nodes))}
    for u in nodes:
        for a in range(A):
            if allowed is not None and not allowed[u[-1]][a]:
                continue
            w = u + (a,)
            adj[idx[u]].append((idx[w[1:]], w))
    return nodes, adj


def simple_cycles_brute(adj):
    """Every simple cycle once, rooted at its smallest node."""
    out = []
    n = len(adj)
    for s in range(n):
        stack = [(s, [s], [])]
        while stack:
            v, path, words = stack.pop()
            for u, w in adj[v]:
                if u == s:
                    out.append(words + [w])
                elif u > s and u not in path:
                    stack.append((u, path + [u], words + [w]))
    return out


def cycle_means(f, A, m_graph, allowed=None):
    g = f.lift(m_graph) if f.depth < m_graph else f
    _, adj = de_bruijn(A, m_graph, allowed)
    return [sum(g.on_word(w) for w in ws) / len(ws) for ws in simple_cycles_brute(adj)]


def dbar_brute(f, k, A=2):
    L = k + f.depth - 1
    best = None
    for z in product(range(A), repeat=L):
        v = Fraction(sum(f.on_word(z[j:j + f.depth]) for j in range(k)), k)
        best = v if best is None or v > best else best
    return best


def agrees_on_window(y: ShiftPoint, x: ShiftPoint, a, b, depth):
    """Coordinates x[i .. i+depth-1] = y[a+i .. a+i+depth-1] for 0 <= i <= b-a."""
    return all(x[i + t] == y[a + i + t] for i in range(b - a + 1) for t in range(depth))


def stern_brocot_brute(depth):
    """Level-order mediants inside (0, 1)."""
    levels = [[Fraction(1, 2)]]
    bounds = {Fraction(1, 2): (Fraction(0), Fraction(1))}
    for _ in range(depth - 1):
        nxt = []
        for m in levels[-1]:
            lo, hi = bounds[m]
            for a, c in ((lo, m), (m, hi)):
                med = Fraction(a.numerator + c.numerator, a.denominator + c.denominator)
                bounds[med] = (a, c)
                nxt.append(med)
        levels.append(nxt)
    return [q for lvl in levels for q in lvl][: 2 ** depth - 1]
