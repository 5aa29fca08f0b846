"""Brute-force ground truth on small instances, independent of the closed forms.

For n <= 4 every graph can be enumerated (at most 2^6 = 64), so the exact
single-walker and walker-pair transition kernels are computable by direct
summation, the stationary pair law by a dense linear solve, and every
pair quantity — including the lag-1 covariance for any number of walkers —
to machine precision.  Nothing here reuses the scenario shortcuts of
:mod:`edgewalk.moment_kernel`; the two walkers are coupled only through the
shared graph, which is exactly how the pair kernel is assembled.

:func:`exact_pair_same_prob` additionally gives a closed-form stationary
same-vertex probability valid for every n, obtained by lumping the pair
chain to the two states {same vertex, different vertices} and conditioning
on the one edge the walkers' locations share.  It agrees with the
enumeration chain to machine precision and serves as the cross-check for
instances too large to enumerate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .moment_kernel import binom_pmf, stay_prob
from .simulator import GraphSample

__all__ = [
    "MAX_ORACLE_N",
    "PairChain",
    "enumerate_graphs",
    "single_walker_kernel",
    "build_pair_chain",
    "exact_scenarios",
    "exact_lag1_cov",
    "exact_pair_same_prob",
]

MAX_ORACLE_N = 4


def _check_oracle_n(n: int) -> None:
    if n < 2:
        raise ValueError(f"vertex count must be >= 2, got {n}")
    if n > MAX_ORACLE_N:
        raise ValueError(
            f"enumeration oracle is limited to n <= {MAX_ORACLE_N} "
            f"(2^(n(n-1)/2) graphs), got n={n}"
        )


def enumerate_graphs(n: int, p: float) -> list[tuple[GraphSample, float]]:
    """All 2^(n(n-1)/2) graphs with their probability weights (summing to 1)."""
    _check_oracle_n(n)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p!r}")
    pairs = list(itertools.combinations(range(n), 2))
    out = []
    for bits in range(2 ** len(pairs)):
        adj = np.zeros((n, n), dtype=bool)
        edges = 0
        for b, (i, j) in enumerate(pairs):
            if bits >> b & 1:
                adj[i, j] = adj[j, i] = True
                edges += 1
        weight = p**edges * (1.0 - p) ** (len(pairs) - edges)
        out.append((GraphSample(n, adj), weight))
    return out


def _walker_kernel(g: GraphSample) -> np.ndarray:
    """Single-walker transition matrix on a fixed graph.

    Row i puts mass 1/(deg_i + 1) on i itself and on each neighbor of i.
    """
    n = g.n
    deg = g.degrees
    k = np.zeros((n, n))
    for i in range(n):
        w = 1.0 / (deg[i] + 1)
        k[i, i] = w
        k[i, g.adj[i]] = w
    return k


def single_walker_kernel(n: int, p: float) -> np.ndarray:
    """Graph-averaged one-step kernel of a single walker.

    The diagonal equals the stay probability and every off-diagonal entry
    equals the per-target move probability, so the matrix is symmetric and
    doubly stochastic: the uniform law is stationary.
    """
    kernel = np.zeros((n, n))
    for g, w in enumerate_graphs(n, p):
        kernel += w * _walker_kernel(g)
    return kernel


@dataclass(frozen=True, eq=False)
class PairChain:
    """Exact Markov chain of an ordered walker pair on one instance.

    States are ordered position pairs (x1, x2), indexed x1 * n + x2.  The
    kernel averages, over the enumerated graph law, the product of the two
    walkers' per-graph transition probabilities — given the graph the
    walkers move independently; all of their dependence comes from sharing
    it.
    """

    n: int
    p: float
    kernel: np.ndarray  # (n^2, n^2), row-stochastic
    stationary: np.ndarray  # (n^2,)

    def pi_eq(self) -> float:
        """Stationary probability that both walkers sit at one specified vertex."""
        diag = [i * self.n + i for i in range(self.n)]
        return float(self.stationary[diag].mean())

    def pi_neq(self) -> float:
        """Stationary probability of one specified ordered distinct pair."""
        off = [
            i * self.n + j
            for i in range(self.n)
            for j in range(self.n)
            if i != j
        ]
        return float(self.stationary[off].mean())

    def kappa_implied(self) -> float:
        return self.pi_eq() / self.pi_neq()


def build_pair_chain(n: int, p: float) -> PairChain:
    """Assemble the pair kernel and solve for its stationary law.

    The stationary vector comes from a dense solve with one balance
    equation replaced by the normalization constraint — exact regardless of
    the spectral gap.  At p = 0 the kernel is the identity, the system is
    singular, and the solve fails loudly.
    """
    _check_oracle_n(n)
    kernel = np.zeros((n * n, n * n))
    for g, w in enumerate_graphs(n, p):
        single = _walker_kernel(g)
        kernel += w * np.kron(single, single)
    a = kernel.T - np.eye(n * n)
    a[-1, :] = 1.0
    rhs = np.zeros(n * n)
    rhs[-1] = 1.0
    try:
        stationary = np.linalg.solve(a, rhs)
    except np.linalg.LinAlgError as exc:
        raise ValueError(
            f"stationary solve failed for n={n}, p={p!r} (reducible chain)"
        ) from exc
    return PairChain(n=n, p=p, kernel=kernel, stationary=stationary)


def exact_scenarios(n: int, p: float) -> tuple[float, float, float, float]:
    """The four one-step pair probabilities by direct graph enumeration.

    Events (vertex labels are interchangeable by symmetry):

    * pi1 — both walkers at vertex 0, both stay there;
    * pi2 — walkers at (0, 1): the one at 0 stays, the one at 1 moves to 0;
    * pi3 — both walkers at vertex 1, both move to vertex 0;
    * pi4 — walkers at (1, 2), both move to vertex 0.

    For n = 2 the pi4 event needs a third vertex and is vacuous; its value
    is fixed to p * pi2 for continuity (every use multiplies it by n - 2,
    which is zero there).
    """
    _check_oracle_n(n)
    graphs = enumerate_graphs(n, p)
    pi1 = pi2 = pi3 = pi4 = 0.0
    for g, w in graphs:
        deg = g.degrees
        inv = 1.0 / (deg + 1.0)
        pi1 += w * inv[0] * inv[0]
        if g.adj[1, 0]:
            pi2 += w * inv[0] * inv[1]
            pi3 += w * inv[1] * inv[1]
            if n >= 3 and g.adj[2, 0]:
                pi4 += w * inv[1] * inv[2]
    if n == 2:
        pi4 = p * pi2
    return float(pi1), float(pi2), float(pi3), float(pi4)


def exact_lag1_cov(n: int, m: int, p: float) -> float:
    """Exact stationary lag-1 autocovariance of one vertex count, any m.

    Walkers are exchangeable and the count is a sum of indicators, so the
    covariance reduces to two pair-chain quantities read off the
    stationary-start two-step law: the probability that one walker sits at
    a vertex twice in a row, and the probability that one walker sits there
    now and a different walker sits there next step.
    """
    if m < 1:
        raise ValueError(f"walker count must be >= 1, got {m}")
    if not 0.0 < p <= 1.0:
        raise ValueError(f"edge probability must lie in (0, 1], got {p!r}")
    chain = build_pair_chain(n, p)
    kernel, stationary = chain.kernel, chain.stationary
    rows = [b for b in range(n)]  # states (0, b)
    stay_cols = list(range(n))  # states (0, b'): walker 1 still at vertex 0
    arrive_cols = [a * n for a in range(n)]  # states (a', 0): walker 2 now at 0
    keep = 0.0
    cross = 0.0
    for b in rows:
        s = stationary[b]  # state (0, b) has index 0 * n + b
        keep += s * kernel[b, stay_cols].sum()
        cross += s * kernel[b, arrive_cols].sum()
    return float(m * keep + m * (m - 1) * cross - (m / n) ** 2)


def _inv_moment(n_extra: int, shift: int, p: float) -> float:
    """E[1/(A + shift)] for A ~ Bin(n_extra, p)."""
    return sum(binom_pmf(n_extra, k, p) / (k + shift) for k in range(n_extra + 1))


def exact_pair_same_prob(n: int, p: float) -> float:
    """Closed-form stationary same-vertex probability, exact for every n >= 2.

    Lump the pair chain to {same vertex, different vertices}.  From "same",
    the pair stays lumped-same with probability equal to the single-walker
    stay probability (both stay, or both jump across the same edge — the
    per-target terms telescope).  From "different" at (j, j'), the pair
    lands together at: j or j' (one stays, the other crosses the shared
    edge), or at one of the n - 2 third vertices i, which requires both
    edges (j, i) and (j', i).  The two walkers' leftover degrees are
    independent binomials only after conditioning on the one edge their
    locations share, (j, j'); that conditioning is done exactly here.
    Solving the two-state balance gives the lumped-same mass x, and by
    vertex symmetry the per-vertex probability is x / n.
    """
    if n < 2:
        raise ValueError(f"vertex count must be >= 2, got {n}")
    if not 0.0 < p <= 1.0:
        raise ValueError(f"edge probability must lie in (0, 1], got {p!r}")
    f = stay_prob(n, p)
    pi2 = p * _inv_moment(n - 2, 2, p) ** 2
    if n >= 3:
        t2 = _inv_moment(n - 3, 2, p)
        t3 = _inv_moment(n - 3, 3, p)
        gather = p * p * ((1.0 - p) * t2 * t2 + p * t3 * t3)
    else:
        gather = 0.0
    q = 2.0 * pi2 + (n - 2) * gather
    x = q / (1.0 - f + q)
    return x / n
