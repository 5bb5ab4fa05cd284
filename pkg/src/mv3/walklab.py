"""Random walks on small regular graphs: constructions, exact spectra,
mixing times and visit-count tails.

Graphs are stored as neighbour tables (``adj[v]`` lists the k endpoints of
v's edges, repeats allowed), which keeps multigraphs and self-loops exact
and makes vectorised walk simulation a single gather per step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_CAP = 4096


class NonConvergenceError(RuntimeError):
    """Walk distribution failed to approach uniform within the step budget."""


@dataclass
class WalkGraph:
    n: int
    degree: int
    adj: np.ndarray
    directed: bool = False
    # eigenvalues known in closed form (including the trivial one), if any
    explicit: tuple[float, ...] = ()
    name: str = ""

    def __post_init__(self):
        self.adj = np.asarray(self.adj, dtype=np.int64)
        if self.adj.shape != (self.n, self.degree):
            raise ValueError(f"adjacency table shape {self.adj.shape} != ({self.n}, {self.degree})")

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        rows = np.repeat(np.arange(self.n), self.degree)
        np.add.at(a, (rows, self.adj.ravel()), 1.0)
        return a

    def transition_matrix(self, lazy: bool = False) -> np.ndarray:
        p = self.adjacency_matrix() / self.degree
        if lazy:
            p = 0.5 * (p + np.eye(self.n))
        return p

    def is_symmetric(self) -> bool:
        a = self.adjacency_matrix()
        return bool(np.array_equal(a, a.T))

    def self_loops(self) -> int:
        return int(np.sum(self.adj == np.arange(self.n)[:, None]))


def build_nonlinear_graph(n: int, r: int) -> WalkGraph:
    """4-valent graph on Z/nZ joining x to r(x+1), r(x-1), r'x+1 and r'x-1,
    where r r' = 1 mod n.

    The r-edges and r'-edges are mutual inverses, so the multigraph is
    symmetric. Eigenvalues 4cos(2 pi k/n) for every k with rk = k mod n are
    attached as ``explicit``.
    """
    if n <= 1 or r <= 1:
        raise ValueError(f"need n > 1 and r > 1, got n={n}, r={r}")
    if math.gcd(r, n) != 1:
        raise ValueError(f"r={r} is not invertible mod n={n}")
    rbar = pow(r, -1, n)
    x = np.arange(n, dtype=np.int64)
    adj = np.stack(
        [(r * (x + 1)) % n, (r * (x - 1)) % n, (rbar * x + 1) % n, (rbar * x - 1) % n], axis=1
    )
    return WalkGraph(n, 4, adj, explicit=tuple(explicit_eigenvalues(n, r)), name=f"nonlinear(n={n},r={r})")


def explicit_eigenvalues(n: int, r: int) -> list[float]:
    """Closed-form eigenvalues 4cos(2 pi k/n) over all k with rk = k (mod n)."""
    return sorted((4.0 * math.cos(2.0 * math.pi * k / n) for k in range(n) if ((r - 1) * k) % n == 0),
                  reverse=True)


def build_cayley_graph(n: int, generators) -> WalkGraph:
    """Undirected Cayley graph on Z/nZ: x joined to x+s and x-s for every generator s."""
    gens = [int(s) % n for s in generators]
    if not gens:
        raise ValueError("need at least one generator")
    x = np.arange(n, dtype=np.int64)[:, None]
    g = np.array(gens, dtype=np.int64)[None, :]
    adj = np.concatenate([(x + g) % n, (x - g) % n], axis=1)
    return WalkGraph(n, 2 * len(gens), adj, name=f"cayley(n={n},|S|={len(gens)})")


def random_cayley_graph(n: int, size: int, rng: np.random.Generator) -> WalkGraph:
    gens = rng.choice(n, size=size, replace=False)
    return build_cayley_graph(n, gens)


def complete_graph(n: int) -> WalkGraph:
    adj = np.array([[y for y in range(n) if y != v] for v in range(n)], dtype=np.int64)
    return WalkGraph(n, n - 1, adj, name=f"K{n}")


def build_power_graph(n: int, exponent: int = 3) -> WalkGraph:
    """Model of the squaring/cubing multiplier walk (no bound is claimed).

    Same shape as the nonlinear graph with multiplication by r replaced by
    the power map p(x) = x**exponent mod n: x is joined to p(x+1), p(x-1),
    p^-1(x)+1 and p^-1(x)-1. Requires p to permute Z/nZ.
    """
    x = np.arange(n, dtype=np.int64)
    p = np.array([pow(int(v), exponent, n) for v in x], dtype=np.int64)
    if len(np.unique(p)) != n:
        raise ValueError(f"x -> x^{exponent} is not a permutation of Z/{n}Z")
    pinv = np.empty(n, dtype=np.int64)
    pinv[p] = x
    adj = np.stack([p[(x + 1) % n], p[(x - 1) % n], (pinv + 1) % n, (pinv - 1) % n], axis=1)
    return WalkGraph(n, 4, adj, name=f"power(n={n},e={exponent})")


def additive_reversal(m: np.ndarray) -> np.ndarray:
    """Adjacency M + M^T of a directed graph's additive reversalization."""
    return m + m.T


def multiplicative_reversal(m: np.ndarray) -> np.ndarray:
    """Adjacency M M^T of a directed graph's multiplicative reversalization."""
    return m @ m.T


@dataclass
class Spectrum:
    """Adjacency eigenvalues sorted by decreasing magnitude (ties: larger first)."""

    eigenvalues: np.ndarray
    trivial: float
    explicit: tuple[float, ...] = ()
    tol: float = 1e-9
    _residual: np.ndarray | None = field(default=None, repr=False)

    def signed_second(self) -> float:
        """Second-largest eigenvalue in signed order (one copy of the trivial one removed)."""
        ev = np.sort(self.eigenvalues)[::-1]
        return float(ev[1])

    def residual(self) -> np.ndarray:
        """Eigenvalues left after removing the explicit ones (or just the trivial one).

        Each explicit value removes one matching eigenvalue within ``tol``.
        """
        if self._residual is None:
            rest = list(self.eigenvalues)
            known = self.explicit or (self.trivial,)
            for e in known:
                i = int(np.argmin(np.abs(np.asarray(rest) - e)))
                if abs(rest[i] - e) > self.tol:
                    raise ValueError(f"explicit eigenvalue {e} not found within {self.tol}")
                rest.pop(i)
            self._residual = np.asarray(rest)
        return self._residual

    def max_residual(self) -> float:
        res = self.residual()
        return float(np.max(np.abs(res))) if res.size else 0.0

    def contains(self, value: float, tol: float | None = None) -> bool:
        tol = self.tol if tol is None else tol
        return bool(np.any(np.abs(self.eigenvalues - value) <= tol))


def spectrum(g: WalkGraph, cap: int = DEFAULT_CAP) -> Spectrum:
    """Exact eigenvalues of a symmetric adjacency matrix by dense solve."""
    if g.n > cap:
        raise ValueError(f"n={g.n} exceeds the dense eigensolver cap {cap}; use estimate_lambda2")
    if g.directed:
        raise ValueError("directed graph: symmetrize first (additive_reversal / multiplicative_reversal)")
    a = g.adjacency_matrix()
    if not np.array_equal(a, a.T):
        raise ValueError("adjacency matrix is not symmetric")
    ev = np.linalg.eigvalsh(a)
    order = np.lexsort((-ev, -np.abs(ev)))
    return Spectrum(ev[order], float(g.degree), tuple(g.explicit))


def estimate_lambda2(g: WalkGraph, iters: int = 2000, seed: int = 0) -> float:
    """Power-iteration estimate of the largest |eigenvalue| orthogonal to constants.

    For graphs beyond the dense cap. Returns a magnitude; bipartite graphs
    report k.
    """
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(g.n)
    v -= v.mean()
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = v[g.adj].sum(axis=1)
        w -= w.mean()
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            return 0.0
        v = w / lam
    return lam


def check_gap_bound(spec: Spectrum, n: int, c: float) -> bool:
    """True iff every non-explicit eigenvalue satisfies |lambda| <= k - c / (ln n)^2."""
    return spec.max_residual() <= spec.trivial - c / math.log(n) ** 2 + 1e-12


def gap_constant(spec: Spectrum, n: int) -> float:
    """Largest c for which ``check_gap_bound`` holds at this n."""
    return (spec.trivial - spec.max_residual()) * math.log(n) ** 2


@dataclass
class GapSweep:
    rows: list[tuple[int, int, float, float]]  # (n, r, max residual |lambda|, c_n)

    @property
    def fitted_c(self) -> float:
        return min(row[3] for row in self.rows)


def sweep_gap(ns, rs, cap: int = DEFAULT_CAP) -> GapSweep:
    rows = []
    for r in rs:
        for n in ns:
            spec = spectrum(build_nonlinear_graph(n, r), cap)
            rows.append((n, r, spec.max_residual(), gap_constant(spec, n)))
    return GapSweep(rows)


def tv_distance(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(p - q).sum())


def tv_curve(g: WalkGraph, start: int, steps: int, lazy: bool = False) -> np.ndarray:
    """TV distance to uniform after 0..steps steps from ``start``."""
    dist = np.zeros(g.n)
    dist[start] = 1.0
    uniform = 1.0 / g.n
    out = np.empty(steps + 1)
    out[0] = 0.5 * np.abs(dist - uniform).sum()
    for t in range(1, steps + 1):
        dist = _push(g, dist, lazy)
        out[t] = 0.5 * np.abs(dist - uniform).sum()
    return out


def _push(g: WalkGraph, dist: np.ndarray, lazy: bool) -> np.ndarray:
    nxt = np.bincount(g.adj.ravel(), weights=np.repeat(dist / g.degree, g.degree), minlength=g.n)
    if lazy:
        nxt = 0.5 * (nxt + dist)
    return nxt


def mixing_time(g: WalkGraph, start: int, eps: float, lazy: bool = False, max_steps: int = 100_000) -> int:
    """Smallest t with TV(walk_t, uniform) < eps, by exact distribution iteration."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    dist = np.zeros(g.n)
    dist[start] = 1.0
    uniform = 1.0 / g.n
    for t in range(max_steps + 1):
        if 0.5 * np.abs(dist - uniform).sum() < eps:
            return t
        dist = _push(g, dist, lazy)
    raise NonConvergenceError(
        f"TV distance still >= {eps} after {max_steps} steps"
        + ("" if lazy else " (graph may be bipartite or disconnected; try lazy=True)")
    )


def hitting_bound(n: int, k: float, sigma: float, s_size: int) -> float:
    """Walk length after which a walk lands in a set of size s_size with
    probability at least s_size / (2n), given nontrivial |lambda| <= sigma."""
    return math.log(2 * n / math.sqrt(s_size)) / math.log(k / sigma)


def gillman_bound(x: float, eps: float, steps: int) -> float:
    """Upper bound on P(|t_n - n|S|/N| >= x) for a walk with spectral gap fraction eps."""
    return (1.0 + x * eps / (10.0 * steps)) * math.exp(-x * x * eps / (20.0 * steps))


@dataclass
class WalkExperiment:
    graph: WalkGraph
    target: np.ndarray
    steps: int
    trials: int
    start: int | None = None  # None: uniform random start per trial
    seed: int = 0
    counts: np.ndarray | None = None

    def run(self) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        g = self.graph
        in_s = np.zeros(g.n, dtype=bool)
        in_s[np.asarray(self.target)] = True
        if self.start is None:
            pos = rng.integers(0, g.n, self.trials)
        else:
            pos = np.full(self.trials, self.start, dtype=np.int64)
        counts = np.zeros(self.trials, dtype=np.int64)
        for _ in range(self.steps):
            pos = g.adj[pos, rng.integers(0, g.degree, self.trials)]
            counts += in_s[pos]
        self.counts = counts
        return counts


@dataclass
class VisitReport:
    eps: float
    expected: float
    rows: list[tuple[float, float, float]]  # (x, empirical tail, bound)

    @property
    def holds(self) -> bool:
        return all(emp <= bound for _, emp, bound in self.rows)


def visit_count_experiment(exp: WalkExperiment, xs, eps: float | None = None) -> VisitReport:
    """Compare empirical visit-count tails with the Chernoff-type walk bound.

    ``eps`` defaults to (k - lambda_2)/k from the exact spectrum, lambda_2
    being the second-largest eigenvalue in signed order.
    """
    if exp.trials < 1000:
        raise ValueError(f"need at least 1000 trials, got {exp.trials}")
    g = exp.graph
    if eps is None:
        eps = (g.degree - spectrum(g).signed_second()) / g.degree
    counts = exp.counts if exp.counts is not None else exp.run()
    expected = exp.steps * len(np.unique(exp.target)) / g.n
    dev = np.abs(counts - expected)
    rows = [(float(x), float(np.mean(dev >= x)), gillman_bound(x, eps, exp.steps)) for x in xs]
    return VisitReport(eps, expected, rows)
