"""Closed-form periodic Hamiltonians, their gradients, and periodic initial data.

Everything on the spatial side lives on the torus [0, 2*pi)^d. Hamiltonians and
initial conditions are restricted to trigonometric polynomials so that values
and gradients are available analytically; no differencing happens here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

TWO_PI = 2.0 * np.pi

FREE_PARTICLE = "free_particle"
KINETIC_PLUS_POTENTIAL = "kinetic_plus_potential"
ADVECTION = "advection"
HAMILTONIAN_KINDS = (FREE_PARTICLE, KINETIC_PLUS_POTENTIAL, ADVECTION)


def wrap_torus(q):
    """Wrap coordinates into [0, 2*pi) by floored modulo.

    Guards against the floating-point edge case where ``np.mod`` of a tiny
    negative number rounds up to exactly 2*pi.
    """
    out = np.mod(np.asarray(q, dtype=float), TWO_PI)
    return np.where(out >= TWO_PI, 0.0, out)


def wrap_centered(v):
    """Smallest periodic representative of a coordinate difference, in [-pi, pi)."""
    out = np.mod(np.asarray(v, dtype=float) + np.pi, TWO_PI) - np.pi
    return np.where(out >= np.pi, -np.pi, out)


def torus_distance(a, b):
    """Euclidean distance between torus points, coordinates wrapped first.

    Accepts broadcasting batches of shape (..., d); reduces over the last axis.
    """
    diff = wrap_centered(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    return np.sqrt(np.sum(diff * diff, axis=-1))


def _as_coeff_arrays(d: int, coeffs):
    """Convert [(k, cos_amp, sin_amp), ...] triples to dense arrays."""
    triples = list(coeffs)
    if not triples:
        return np.zeros((0, d)), np.zeros(0), np.zeros(0)
    wave = np.array([np.atleast_1d(k) for k, _, _ in triples], dtype=float)
    if wave.shape != (len(triples), d):
        raise ValueError(f"wavevectors must have dimension {d}, got shape {wave.shape}")
    if not np.all(wave == np.round(wave)):
        raise ValueError("wavevectors must be integer for 2*pi-periodicity")
    cos_amps = np.array([c for _, c, _ in triples], dtype=float)
    sin_amps = np.array([s for _, _, s in triples], dtype=float)
    return wave, cos_amps, sin_amps


class TrigPoly:
    """Real trigonometric polynomial sum_k [a_k cos(k.q) + b_k sin(k.q)] on the torus."""

    def __init__(self, d: int, coeffs):
        self.d = int(d)
        self.wave, self.cos_amps, self.sin_amps = _as_coeff_arrays(self.d, coeffs)

    def value(self, q):
        q = np.asarray(q, dtype=float)
        phase = q @ self.wave.T  # (..., m)
        return np.cos(phase) @ self.cos_amps + np.sin(phase) @ self.sin_amps

    def gradient(self, q):
        q = np.asarray(q, dtype=float)
        phase = q @ self.wave.T
        # d/dq_j = k_j * (-a sin(k.q) + b cos(k.q))
        radial = -np.sin(phase) * self.cos_amps + np.cos(phase) * self.sin_amps
        return radial @ self.wave

    def coeff_triples(self):
        return [
            (tuple(int(k) for k in row), float(c), float(s))
            for row, c, s in zip(self.wave, self.cos_amps, self.sin_amps)
        ]

    def __len__(self):
        return len(self.cos_amps)


@dataclass
class HamiltonianSpec:
    """One member of the closed-form Hamiltonian family.

    kind selects the formula:
      free_particle            H = |p|^2 / 2
      kinetic_plus_potential   H = |p|^2 / 2 + V(q)
      advection                H = v(q) . p
    V and the components of v are trigonometric polynomials given as
    (wavevector, cos_amp, sin_amp) triples, so H is 2*pi-periodic in q by
    construction. growth_constant is the user-supplied L_H of the
    no-blowup bound sup_q { -p . grad_q H } <= L_H (1 + |p|^2).
    """

    kind: str
    d: int
    potential_coeffs: tuple = ()
    velocity_coeffs: tuple = ()
    growth_constant: float = 0.0

    def __post_init__(self):
        if self.kind not in HAMILTONIAN_KINDS:
            raise ValueError(f"unknown Hamiltonian kind {self.kind!r}")
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if self.growth_constant < 0:
            raise ValueError("growth_constant must be >= 0")
        self.potential = TrigPoly(self.d, self.potential_coeffs)
        if self.kind == ADVECTION:
            comps = list(self.velocity_coeffs)
            if len(comps) != self.d:
                raise ValueError(f"advection needs {self.d} velocity components, got {len(comps)}")
            self.velocity = [TrigPoly(self.d, c) for c in comps]
        else:
            self.velocity = []
        if self.kind != KINETIC_PLUS_POTENTIAL and len(self.potential):
            raise ValueError(f"potential_coeffs only make sense for {KINETIC_PLUS_POTENTIAL}")

    def velocity_value(self, q):
        """v(q) with shape (..., d), advection only."""
        q = np.asarray(q, dtype=float)
        return np.stack([v.value(q) for v in self.velocity], axis=-1)


def free_particle(d: int = 1) -> HamiltonianSpec:
    return HamiltonianSpec(FREE_PARTICLE, d, growth_constant=0.0)


def kinetic_plus_potential(potential_coeffs, d: int = 1, growth_constant=None) -> HamiltonianSpec:
    spec = HamiltonianSpec(KINETIC_PLUS_POTENTIAL, d, potential_coeffs=tuple(potential_coeffs),
                           growth_constant=0.0)
    if growth_constant is None:
        # |p . grad V| <= |grad V|_sup |p| <= |grad V|_sup (1+|p|^2)/2
        growth_constant = 0.5 * _sup_gradient_norm(spec.potential)
    spec.growth_constant = float(growth_constant)
    return spec


def advection(velocity_coeffs, d: int = 1, growth_constant=None) -> HamiltonianSpec:
    spec = HamiltonianSpec(ADVECTION, d, velocity_coeffs=tuple(velocity_coeffs),
                           growth_constant=0.0)
    if growth_constant is None:
        # -p . (Dv)^T p <= |Dv|_sup |p|^2; coefficient-sum bound on |Dv|
        total = 0.0
        for comp in spec.velocity:
            if len(comp):
                total += float(np.sum(np.linalg.norm(comp.wave, axis=1)
                                      * np.hypot(comp.cos_amps, comp.sin_amps)))
        growth_constant = total
    spec.growth_constant = float(growth_constant)
    return spec


def pendulum(amplitude: float = 1.0) -> HamiltonianSpec:
    """H = p^2/2 + amplitude*cos(q) in d=1."""
    return kinetic_plus_potential([((1,), amplitude, 0.0)], d=1,
                                  growth_constant=0.5 * abs(amplitude))


def _sup_gradient_norm(poly: TrigPoly) -> float:
    if not len(poly):
        return 0.0
    return float(np.sum(np.linalg.norm(poly.wave, axis=1)
                        * np.hypot(poly.cos_amps, poly.sin_amps)))


@dataclass
class InitialData:
    """Trigonometric-polynomial initial condition u0 with analytic gradient.

    regularity_r is the smoothness order the reconstruction stage should
    assume downstream; trig polynomials are C^inf so any r >= 2 is valid.
    """

    d: int
    fourier_coeffs: tuple
    regularity_r: int = 2

    def __post_init__(self):
        if self.regularity_r < 2:
            raise ValueError("regularity_r must be >= 2")
        self.fourier_coeffs = tuple(
            (tuple(np.atleast_1d(k).astype(int).tolist()), float(c), float(s))
            for k, c, s in self.fourier_coeffs
        )
        self.poly = TrigPoly(self.d, self.fourier_coeffs)


def sine_initial_data(d: int = 1, regularity_r: int = 4) -> InitialData:
    """u0(q) = sin(q_1), the workhorse test datum."""
    k = tuple([1] + [0] * (d - 1))
    return InitialData(d=d, fourier_coeffs=((k, 0.0, 1.0),), regularity_r=regularity_r)


def _check_pq(spec: HamiltonianSpec, q, p):
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if q.shape[-1:] != (spec.d,) or p.shape[-1:] != (spec.d,):
        raise ValueError(f"expected trailing dimension {spec.d}, got q{q.shape} p{p.shape}")
    if q.shape != p.shape:
        raise ValueError(f"q and p shapes differ: {q.shape} vs {p.shape}")
    return q, p


def eval_h(spec: HamiltonianSpec, q, p):
    """H(q, p); accepts (..., d) batches and returns shape (...)."""
    q, p = _check_pq(spec, q, p)
    kinetic = 0.5 * np.sum(p * p, axis=-1)
    if spec.kind == FREE_PARTICLE:
        return kinetic
    if spec.kind == KINETIC_PLUS_POTENTIAL:
        return kinetic + spec.potential.value(q)
    return np.sum(spec.velocity_value(q) * p, axis=-1)


def grad_h(spec: HamiltonianSpec, q, p):
    """Analytic (grad_q H, grad_p H), each of shape (..., d)."""
    q, p = _check_pq(spec, q, p)
    if spec.kind == FREE_PARTICLE:
        return np.zeros_like(q), p.copy()
    if spec.kind == KINETIC_PLUS_POTENTIAL:
        return spec.potential.gradient(q), p.copy()
    dq = np.zeros_like(q)
    for i, comp in enumerate(spec.velocity):
        dq += comp.gradient(q) * p[..., i : i + 1]
    return dq, spec.velocity_value(q)


def lagrangian(spec: HamiltonianSpec, q, p):
    """L(q, p) = p . grad_p H - H, the action integrand along characteristics."""
    q, p = _check_pq(spec, q, p)
    if spec.kind == FREE_PARTICLE:
        return 0.5 * np.sum(p * p, axis=-1)
    if spec.kind == KINETIC_PLUS_POTENTIAL:
        return 0.5 * np.sum(p * p, axis=-1) - spec.potential.value(q)
    # p.v - v.p vanishes identically for Hamiltonians linear in p
    return np.zeros(q.shape[:-1])


def eval_u0(u0: InitialData, q):
    """(u0(q), grad u0(q)) from the Fourier coefficients; batched over (..., d)."""
    q = np.asarray(q, dtype=float)
    return u0.poly.value(q), u0.poly.gradient(q)


@dataclass
class GrowthReport:
    max_ratio: float
    holds: bool
    sample_count: int
    p_radius: float


def check_growth_bound(spec: HamiltonianSpec, sample_count: int, p_radius: float) -> GrowthReport:
    """Empirically probe the no-blowup bound on quasi-random (q, p) samples.

    Samples q Halton-uniformly on the torus and p in the Euclidean ball of
    radius p_radius, then reports max (-p . grad_q H) / (1 + |p|^2) and
    whether it stays below the stored growth constant. Diagnostic only.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    d = spec.d
    sampler = qmc.Halton(d=2 * d, scramble=False)
    raw = sampler.random(4 * sample_count)  # oversample, then keep in-ball points
    q = TWO_PI * raw[:, :d]
    p = (2.0 * raw[:, d:] - 1.0) * p_radius
    inside = np.sum(p * p, axis=1) <= p_radius * p_radius
    q, p = q[inside][:sample_count], p[inside][:sample_count]
    if len(q) == 0:  # tiny sample_count with unlucky leading Halton points
        q = np.zeros((1, d))
        p = np.zeros((1, d))
    dq, _ = grad_h(spec, q, p)
    ratio = -np.sum(p * dq, axis=1) / (1.0 + np.sum(p * p, axis=1))
    max_ratio = float(np.max(ratio))
    return GrowthReport(max_ratio=max_ratio,
                        holds=bool(max_ratio <= spec.growth_constant + 1e-12),
                        sample_count=len(q), p_radius=float(p_radius))


def hessian_sup_norm(spec: HamiltonianSpec, p_radius: float, n_q: int = 24, n_p: int = 24,
                     step: float = 1e-5) -> float:
    """Dense-sampling estimate of sup |D^2 H| (spectral norm) over torus x p-ball.

    Central differences of the analytic gradient; used by the fill-distance
    propagation diagnostics.
    """
    d = spec.d
    axes = [np.linspace(0.0, TWO_PI, n_q, endpoint=False)] * d
    q_grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    rng = np.random.default_rng(0)
    p_grid = rng.uniform(-p_radius, p_radius, size=(n_p, d))
    best = 0.0
    for p in p_grid:
        pq = np.broadcast_to(p, q_grid.shape)
        hess = np.zeros((len(q_grid), 2 * d, 2 * d))
        for j in range(d):
            eq = np.zeros(d)
            eq[j] = step
            gq_p, gp_p = grad_h(spec, q_grid + eq, pq)
            gq_m, gp_m = grad_h(spec, q_grid - eq, pq)
            hess[:, :d, j] = (gq_p - gq_m) / (2 * step)
            hess[:, d:, j] = (gp_p - gp_m) / (2 * step)
            gq_p, gp_p = grad_h(spec, q_grid, pq + eq)
            gq_m, gp_m = grad_h(spec, q_grid, pq - eq)
            hess[:, :d, d + j] = (gq_p - gq_m) / (2 * step)
            hess[:, d:, d + j] = (gp_p - gp_m) / (2 * step)
        best = max(best, float(np.max(np.linalg.norm(hess, ord=2, axis=(1, 2)))))
    return best
