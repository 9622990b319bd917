"""Scattered-data geometry and moving least squares on the torus.

Fill and separation distances use the periodic metric. Pruning is the greedy
disjoint-ball selection that turns an arbitrary point cloud into a
quasi-uniform subset; reconstruction runs weighted local polynomial fits with
a compactly supported bump weight.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree

from .hamiltonians import TWO_PI, torus_distance, wrap_centered, wrap_torus


class StencilError(RuntimeError):
    """A query point has too few weighted neighbours to fit the polynomial."""

    def __init__(self, query, have: int, need: int):
        self.query = np.asarray(query, dtype=float)
        self.have = have
        self.need = need
        super().__init__(
            f"insufficient stencil at query {self.query}: {have} points with positive "
            f"weight, need {need}; increase gamma or refine the point set"
        )


@dataclass
class PointSet:
    """A finite set of torus points, stored wrapped, as an (N, d) array."""

    points: np.ndarray
    d: int

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.size == 0:
            pts = pts.reshape(0, self.d)
        if pts.shape[1] != self.d:
            raise ValueError(f"points have dimension {pts.shape[1]}, expected {self.d}")
        self.points = wrap_torus(pts)

    def __len__(self):
        return len(self.points)

    @classmethod
    def from_list(cls, points, d=None):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return cls(points=pts, d=d if d is not None else pts.shape[1])


def fill_distance(q: PointSet, resolution: int = 256) -> float:
    """Largest periodic distance from any domain point to its nearest sample.

    Exact in d=1 (half the largest circular gap). In d >= 2 it is estimated on
    a probe lattice with `resolution` points per axis and is therefore a lower
    bound, tight up to half the probe-cell diagonal.
    """
    if len(q) == 0:
        raise ValueError("fill distance of an empty point set is undefined")
    if q.d == 1:
        x = np.sort(q.points[:, 0])
        gaps = np.diff(x, append=x[0] + TWO_PI)
        return float(np.max(gaps) / 2.0)
    tree = cKDTree(q.points, boxsize=TWO_PI)
    axes = [np.arange(resolution) * (TWO_PI / resolution)] * q.d
    probes = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, q.d)
    dmin, _ = tree.query(probes)
    return float(np.max(dmin))


def separation_distance(q: PointSet) -> float:
    """Half the minimal pairwise periodic distance."""
    if len(q) < 2:
        raise ValueError("separation distance needs at least 2 points")
    tree = cKDTree(q.points, boxsize=TWO_PI)
    dist, _ = tree.query(q.points, k=2)
    return float(np.min(dist[:, 1]) / 2.0)


def prune(q: PointSet, h: float):
    """Greedy disjoint-ball thinning of a point cloud.

    Walks the points in input order, keeping a point iff its open ball of
    radius h does not meet the ball of any point kept so far (centre distance
    >= 2h). With h equal to the fill distance of q, the kept subset Q'
    satisfies rho_Q' >= h, fill(Q') <= 3h, and fill(Q') <= 3 rho_Q'.

    Returns (kept indices, ascending, 0-based; pruned PointSet).
    """
    if h <= 0:
        raise ValueError("pruning radius must be positive")
    if len(q) == 0:
        raise ValueError("cannot prune an empty point set")
    kept = [0]
    kept_pts = q.points[0][None]
    for i in range(1, len(q)):
        dist = torus_distance(q.points[i][None], kept_pts)
        if np.all(dist >= 2.0 * h):
            kept.append(i)
            kept_pts = np.vstack([kept_pts, q.points[i]])
    return kept, PointSet(points=kept_pts, d=q.d)


def bump_weight(s):
    """Smooth bump exp(1 - 1/(1 - s^2)) for |s| < 1, zero outside."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    si = s[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - si * si))
    return out


@dataclass
class MlsConfig:
    """Degree and support-scale multiplier of the local fits (delta = gamma * h)."""

    degree: int
    gamma: float

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("degree must be >= 0")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")


def default_gamma(degree: int) -> float:
    """Support multiplier n+2: the smallest integer scale that keeps at least
    n+1 nodes strictly inside the support on quasi-uniform sets, including
    queries that coincide with data points. Larger multipliers inflate the
    error constant and wash out the coarse-grid rows of rate measurements."""
    return float(degree + 2)


@lru_cache(maxsize=None)
def _monomial_exponents(d: int, degree: int):
    """Exponent tuples of all monomials in d variables with total degree <= degree.

    Graded order with the constant term first, so the fitted value at the
    chart centre is the leading coefficient.
    """
    exps = [e for e in itertools.product(range(degree + 1), repeat=d) if sum(e) <= degree]
    exps.sort(key=lambda e: (sum(e), e))
    return tuple(exps)


def polynomial_space_dim(d: int, degree: int) -> int:
    return math.comb(degree + d, d)


def _basis_matrix(x, exps):
    """Monomial design matrix for local coordinates x of shape (m, d)."""
    cols = [np.prod(x ** np.asarray(e, dtype=float), axis=1) for e in exps]
    return np.stack(cols, axis=1)


_EIG_CUTOFF = 1e-10


def _truncated_solve(a, rhs):
    """Symmetric solve with eigenvalue truncation at a relative cutoff."""
    vals, vecs = np.linalg.eigh(a)
    top = np.max(np.abs(vals))
    inv = np.zeros_like(vals)
    keep = np.abs(vals) > _EIG_CUTOFF * top
    inv[keep] = 1.0 / vals[keep]
    return vecs @ (inv * (vecs.T @ rhs))


def mls_evaluate(qp: PointSet, values, query, cfg: MlsConfig, delta: float) -> float:
    """Weighted local polynomial fit evaluated at one query point.

    Minimizes sum_j w_j (z_j - P(x_j))^2 over polynomials P of the configured
    degree, where x_j is the smallest periodic representative of q_j - query
    and w_j the bump weight at |x_j| / delta. Returns P(0). Raises
    StencilError when fewer than dim(pi_n) points carry positive weight.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    values = np.asarray(values, dtype=float)
    if len(values) != len(qp):
        raise ValueError(f"{len(values)} values for {len(qp)} points")
    query = wrap_torus(np.asarray(query, dtype=float))
    x = wrap_centered(qp.points - query)
    s = np.linalg.norm(x, axis=1) / delta
    inside = s < 1.0
    exps = _monomial_exponents(qp.d, cfg.degree)
    need = len(exps)
    have = int(np.count_nonzero(inside))
    if have < need:
        raise StencilError(query, have, need)
    w = bump_weight(s[inside])
    basis = _basis_matrix(x[inside] / delta, exps)  # scaled chart for conditioning
    wb = basis * w[:, None]
    coeffs = _truncated_solve(basis.T @ wb, wb.T @ values[inside])
    return float(coeffs[0])


class MlsReconstruction:
    """Immutable evaluator built from pruned interpolation data.

    Callable at a single torus point; `eval_many` maps over an (m, d) array.
    """

    def __init__(self, pruned: PointSet, values, degree: int, gamma: float, delta: float,
                 kept_indices, source_fill: float):
        self.pruned = pruned
        self.values = np.asarray(values, dtype=float)
        self.config = MlsConfig(degree=degree, gamma=gamma)
        self.delta = float(delta)
        self.kept_indices = list(kept_indices)
        self.source_fill = float(source_fill)

    def __call__(self, query) -> float:
        return mls_evaluate(self.pruned, self.values, query, self.config, self.delta)

    def eval_many(self, queries) -> np.ndarray:
        queries = np.atleast_2d(np.asarray(queries, dtype=float))
        return np.array([self(row) for row in queries])


def reconstruct(q: PointSet, values, r: int, gamma: float) -> MlsReconstruction:
    """Pruned moving-least-squares reconstruction of smoothness order r.

    Prunes at the fill distance of q, fits degree n = r - 1 with support
    radius delta = gamma * fill(Q'), and keeps only the pruned subset's data.
    """
    if r < 2:
        raise ValueError("smoothness order r must be >= 2")
    values = np.asarray(values, dtype=float)
    if len(values) != len(q):
        raise ValueError(f"{len(values)} values for {len(q)} points")
    h = fill_distance(q)
    kept, pruned = prune(q, h)
    pruned_fill = fill_distance(pruned)
    delta = gamma * pruned_fill
    return MlsReconstruction(pruned=pruned, values=values[kept], degree=r - 1, gamma=gamma,
                             delta=delta, kept_indices=kept, source_fill=h)


def save_point_values_csv(path, q: PointSet, values):
    """One row per point: q coordinates then the value."""
    values = np.asarray(values, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"q{i}" for i in range(q.d)] + ["value"])
        for row, v in zip(q.points, values):
            writer.writerow([repr(float(c)) for c in row] + [repr(float(v))])


def load_point_values_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        d = len(header) - 1
        pts, vals = [], []
        for row in reader:
            pts.append([float(c) for c in row[:d]])
            vals.append(float(row[d]))
    return PointSet.from_list(pts, d=d), np.array(vals)
