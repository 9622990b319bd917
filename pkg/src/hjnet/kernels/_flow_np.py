"""NumPy implementation of the RK4 characteristic-flow kernel.

Vectorized over the batch axis; the coefficient accumulation loops run in a
fixed order so that a state's arithmetic is identical whether it is integrated
alone or inside a batch.
"""

import numpy as np

KIND_FREE = 0
KIND_POTENTIAL = 1
KIND_ADVECTION = 2


def _rhs(kind, wave, cos_amps, sin_amps, comp, q, p):
    """Time derivatives (dq, dp, dz) of the characteristic system at (q, p)."""
    n, d = q.shape
    if kind == KIND_FREE:
        return p, np.zeros_like(p), 0.5 * np.einsum("ij,ij->i", p, p)
    if kind == KIND_POTENTIAL:
        dp = np.zeros_like(p)
        pot = np.zeros(n)
        for m in range(len(cos_amps)):
            phase = q @ wave[m]
            c, s = np.cos(phase), np.sin(phase)
            pot += cos_amps[m] * c + sin_amps[m] * s
            radial = -cos_amps[m] * s + sin_amps[m] * c
            dp -= radial[:, None] * wave[m]
        return p, dp, 0.5 * np.einsum("ij,ij->i", p, p) - pot
    # advection: dq = v(q), dp_j = -sum_i p_i d_j v_i, dz = 0
    dq = np.zeros_like(q)
    dp = np.zeros_like(p)
    for m in range(len(cos_amps)):
        phase = q @ wave[m]
        c, s = np.cos(phase), np.sin(phase)
        i = comp[m]
        dq[:, i] += cos_amps[m] * c + sin_amps[m] * s
        radial = -cos_amps[m] * s + sin_amps[m] * c
        dp -= (p[:, i] * radial)[:, None] * wave[m]
    return dq, dp, np.zeros(n)


def rk4_flow(kind, wave, cos_amps, sin_amps, comp, q0, p0, z0, dt, n_steps, last_dt):
    """Integrate (q, p, z) with classical RK4: n_steps - 1 steps of dt, one of last_dt.

    Returns fresh unwrapped arrays (q, p, z); the caller wraps q onto the torus.
    """
    q = np.array(q0, dtype=float)
    p = np.array(p0, dtype=float)
    z = np.array(z0, dtype=float)
    for step in range(n_steps):
        h = dt if step < n_steps - 1 else last_dt
        k1q, k1p, k1z = _rhs(kind, wave, cos_amps, sin_amps, comp, q, p)
        k2q, k2p, k2z = _rhs(kind, wave, cos_amps, sin_amps, comp,
                             q + 0.5 * h * k1q, p + 0.5 * h * k1p)
        k3q, k3p, k3z = _rhs(kind, wave, cos_amps, sin_amps, comp,
                             q + 0.5 * h * k2q, p + 0.5 * h * k2p)
        k4q, k4p, k4z = _rhs(kind, wave, cos_amps, sin_amps, comp,
                             q + h * k3q, p + h * k3p)
        sixth = h / 6.0
        q = q + sixth * (k1q + 2.0 * (k2q + k3q) + k4q)
        p = p + sixth * (k1p + 2.0 * (k2p + k3p) + k4p)
        z = z + sixth * (k1z + 2.0 * (k2z + k3z) + k4z)
    return q, p, z
