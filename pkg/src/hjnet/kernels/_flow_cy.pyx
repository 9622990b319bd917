# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython implementation of the RK4 characteristic-flow kernel."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

cdef int KIND_FREE = 0
cdef int KIND_POTENTIAL = 1
cdef int KIND_ADVECTION = 2


cdef inline void _rhs_one(int kind, double[:, ::1] wave, double[::1] cos_amps,
                          double[::1] sin_amps, long[::1] comp,
                          double* q, double* p, int d, int m,
                          double* dq, double* dp, double* dz) noexcept nogil:
    cdef int i, j, k
    cdef double phase, c, s, radial, pot, kin
    kin = 0.0
    for j in range(d):
        kin += p[j] * p[j]
    if kind == KIND_FREE:
        for j in range(d):
            dq[j] = p[j]
            dp[j] = 0.0
        dz[0] = 0.5 * kin
        return
    if kind == KIND_POTENTIAL:
        pot = 0.0
        for j in range(d):
            dq[j] = p[j]
            dp[j] = 0.0
        for k in range(m):
            phase = 0.0
            for j in range(d):
                phase += q[j] * wave[k, j]
            c = cos(phase)
            s = sin(phase)
            pot += cos_amps[k] * c + sin_amps[k] * s
            radial = -cos_amps[k] * s + sin_amps[k] * c
            for j in range(d):
                dp[j] -= radial * wave[k, j]
        dz[0] = 0.5 * kin - pot
        return
    # advection
    for j in range(d):
        dq[j] = 0.0
        dp[j] = 0.0
    for k in range(m):
        phase = 0.0
        for j in range(d):
            phase += q[j] * wave[k, j]
        c = cos(phase)
        s = sin(phase)
        i = <int>comp[k]
        dq[i] += cos_amps[k] * c + sin_amps[k] * s
        radial = -cos_amps[k] * s + sin_amps[k] * c
        for j in range(d):
            dp[j] -= p[i] * radial * wave[k, j]
    dz[0] = 0.0


def rk4_flow(int kind, double[:, ::1] wave, double[::1] cos_amps,
             double[::1] sin_amps, long[::1] comp,
             double[:, ::1] q0, double[:, ::1] p0, double[::1] z0,
             double dt, int n_steps, double last_dt):
    """Same contract as the NumPy kernel; loops over states, then steps."""
    cdef Py_ssize_t n = q0.shape[0]
    cdef int d = <int>q0.shape[1]
    cdef int m = <int>cos_amps.shape[0]
    if d > 16:
        raise ValueError("compiled kernel supports d <= 16")
    out_q = np.empty((n, d), dtype=np.float64)
    out_p = np.empty((n, d), dtype=np.float64)
    out_z = np.empty(n, dtype=np.float64)
    cdef double[:, ::1] oq = out_q
    cdef double[:, ::1] op = out_p
    cdef double[::1] oz = out_z

    cdef double q[16]
    cdef double p[16]
    cdef double tq[16]
    cdef double tp[16]
    cdef double k1q[16]
    cdef double k1p[16]
    cdef double k2q[16]
    cdef double k2p[16]
    cdef double k3q[16]
    cdef double k3p[16]
    cdef double k4q[16]
    cdef double k4p[16]
    cdef double z, k1z, k2z, k3z, k4z, h, sixth
    cdef Py_ssize_t idx
    cdef int step, j

    with nogil:
        for idx in range(n):
            for j in range(d):
                q[j] = q0[idx, j]
                p[j] = p0[idx, j]
            z = z0[idx]
            for step in range(n_steps):
                h = dt if step < n_steps - 1 else last_dt
                _rhs_one(kind, wave, cos_amps, sin_amps, comp, q, p, d, m, k1q, k1p, &k1z)
                for j in range(d):
                    tq[j] = q[j] + 0.5 * h * k1q[j]
                    tp[j] = p[j] + 0.5 * h * k1p[j]
                _rhs_one(kind, wave, cos_amps, sin_amps, comp, tq, tp, d, m, k2q, k2p, &k2z)
                for j in range(d):
                    tq[j] = q[j] + 0.5 * h * k2q[j]
                    tp[j] = p[j] + 0.5 * h * k2p[j]
                _rhs_one(kind, wave, cos_amps, sin_amps, comp, tq, tp, d, m, k3q, k3p, &k3z)
                for j in range(d):
                    tq[j] = q[j] + h * k3q[j]
                    tp[j] = p[j] + h * k3p[j]
                _rhs_one(kind, wave, cos_amps, sin_amps, comp, tq, tp, d, m, k4q, k4p, &k4z)
                sixth = h / 6.0
                for j in range(d):
                    q[j] = q[j] + sixth * (k1q[j] + 2.0 * (k2q[j] + k3q[j]) + k4q[j])
                    p[j] = p[j] + sixth * (k1p[j] + 2.0 * (k2p[j] + k3p[j]) + k4p[j])
                z = z + sixth * (k1z + 2.0 * (k2z + k3z) + k4z)
            for j in range(d):
                oq[idx, j] = q[j]
                op[idx, j] = p[j]
            oz[idx] = z
    return out_q, out_p, out_z
