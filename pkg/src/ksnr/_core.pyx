# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: fused rollout and feature loops.

Mirrors the kernel surface documented in ``_core_py.py``.  Loops are fused
per step so single or small-batch rollouts avoid per-call array overhead.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, fmod, M_PI

cnp.import_array()


cdef inline double _clip(double x, double lo, double hi) nogil:
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


cdef inline double _wrap(double th) nogil:
    cdef double m = fmod(M_PI - th, 2.0 * M_PI)
    if m < 0.0:
        m += 2.0 * M_PI
    return M_PI - m


cdef void _features(const double[::1] obs, const double[:, ::1] freqs,
                    const double[::1] offsets, double scale,
                    bint linear_prefix, double[::1] out) nogil:
    cdef Py_ssize_t n_in = obs.shape[0]
    cdef Py_ssize_t D = freqs.shape[0]
    cdef Py_ssize_t base = n_in if linear_prefix else 0
    cdef Py_ssize_t k, j
    cdef double z
    if linear_prefix:
        for j in range(n_in):
            out[j] = obs[j]
    for k in range(D):
        z = offsets[k]
        for j in range(n_in):
            z += freqs[k, j] * obs[j]
        out[base + k] = scale * cos(z)


def rff_block(x, freqs, offsets, double scale, bint linear_prefix):
    x = np.ascontiguousarray(np.atleast_2d(x), dtype=np.float64)
    cdef double[:, ::1] xv = x
    cdef double[:, ::1] fv = freqs
    cdef double[::1] ov = offsets
    cdef Py_ssize_t B = xv.shape[0]
    cdef Py_ssize_t n_in = xv.shape[1]
    cdef Py_ssize_t n_out = fv.shape[0] + (n_in if linear_prefix else 0)
    out = np.empty((B, n_out))
    cdef double[:, ::1] outv = out
    cdef Py_ssize_t b
    with nogil:
        for b in range(B):
            _features(xv[b], fv, ov, scale, linear_prefix, outv[b])
    return out


def limit_cycle_step(states, actions, double dt):
    cdef double[:, ::1] sv = states
    cdef double[:, ::1] av = actions
    cdef Py_ssize_t B = sv.shape[0]
    out = np.empty((B, 2))
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t b
    cdef double r
    with nogil:
        for b in range(B):
            r = sv[b, 0] + av[b, 0] * dt
            ov[b, 0] = r if r > 0.0 else 0.0
            ov[b, 1] = sv[b, 1] + av[b, 1] * dt
    return out


cdef void _cartpole_one(const double[::1] s, double force, double g,
                        double mc, double mp, double hl, double dt,
                        double rail, double[::1] out) nogil:
    cdef double total = mc + mp
    cdef double pml = mp * hl
    cdef double sin_th = sin(s[2])
    cdef double cos_th = cos(s[2])
    cdef double temp = (force + pml * s[3] * s[3] * sin_th) / total
    cdef double th_acc = (g * sin_th - cos_th * temp) / (
        hl * (4.0 / 3.0 - mp * cos_th * cos_th / total))
    cdef double x_acc = temp - pml * th_acc * cos_th / total
    out[1] = s[1] + dt * x_acc
    out[0] = _clip(s[0] + dt * out[1], -rail, rail)
    out[3] = s[3] + dt * th_acc
    out[2] = _wrap(s[2] + dt * out[3])


def cartpole_step(states, forces, double g, double masscart, double masspole,
                  double half_length, double dt, double rail):
    cdef double[:, ::1] sv = states
    cdef double[::1] fv = forces
    cdef Py_ssize_t B = sv.shape[0]
    out = np.empty((B, 4))
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t b
    with nogil:
        for b in range(B):
            _cartpole_one(sv[b], fv[b], g, masscart, masspole, half_length,
                          dt, rail, ov[b])
    return out


def rollout_rff_limit_cycle(x0, W, freqs, offsets, double scale,
                            bint linear_prefix, lo, hi, Py_ssize_t H,
                            double dt):
    cdef double[::1] x0v = x0
    cdef double[:, :, ::1] Wv = W
    cdef double[:, ::1] fv = freqs
    cdef double[::1] offv = offsets
    cdef double[::1] lov = lo
    cdef double[::1] hiv = hi
    cdef Py_ssize_t B = Wv.shape[0]
    cdef Py_ssize_t F = Wv.shape[2]
    states = np.empty((B, H + 1, 2))
    actions = np.empty((B, H, 2))
    cdef double[:, :, ::1] stv = states
    cdef double[:, :, ::1] acv = actions
    feat_buf = np.empty(F)
    obs_buf = np.empty(3)
    cdef double[::1] feat = feat_buf
    cdef double[::1] obs = obs_buf
    cdef Py_ssize_t b, h, i, f
    cdef double r, th, a0, a1
    with nogil:
        for b in range(B):
            r = x0v[0]
            th = x0v[1]
            stv[b, 0, 0] = r
            stv[b, 0, 1] = th
            for h in range(H):
                obs[0] = r
                obs[1] = cos(th)
                obs[2] = sin(th)
                _features(obs, fv, offv, scale, linear_prefix, feat)
                a0 = 0.0
                a1 = 0.0
                for f in range(F):
                    a0 += Wv[b, 0, f] * feat[f]
                    a1 += Wv[b, 1, f] * feat[f]
                a0 = _clip(a0, lov[0], hiv[0])
                a1 = _clip(a1, lov[1], hiv[1])
                acv[b, h, 0] = a0
                acv[b, h, 1] = a1
                r = r + a0 * dt
                if r < 0.0:
                    r = 0.0
                th = th + a1 * dt
                stv[b, h + 1, 0] = r
                stv[b, h + 1, 1] = th
    return states, actions


def rollout_rff_cartpole(x0, W, freqs, offsets, double scale,
                         bint linear_prefix, lo, hi, Py_ssize_t H,
                         double force_mag, double g, double masscart,
                         double masspole, double half_length, double dt,
                         double rail):
    cdef double[::1] x0v = x0
    cdef double[:, :, ::1] Wv = W
    cdef double[:, ::1] fv = freqs
    cdef double[::1] offv = offsets
    cdef double[::1] lov = lo
    cdef double[::1] hiv = hi
    cdef Py_ssize_t B = Wv.shape[0]
    cdef Py_ssize_t F = Wv.shape[2]
    states = np.empty((B, H + 1, 4))
    actions = np.empty((B, H, 1))
    cdef double[:, :, ::1] stv = states
    cdef double[:, :, ::1] acv = actions
    feat_buf = np.empty(F)
    s_buf = np.empty(4)
    s_next_buf = np.empty(4)
    cdef double[::1] feat = feat_buf
    cdef double[::1] s = s_buf
    cdef double[::1] s_next = s_next_buf
    cdef Py_ssize_t b, h, f, i
    cdef double a
    with nogil:
        for b in range(B):
            for i in range(4):
                s[i] = x0v[i]
                stv[b, 0, i] = s[i]
            for h in range(H):
                _features(s, fv, offv, scale, linear_prefix, feat)
                a = 0.0
                for f in range(F):
                    a += Wv[b, 0, f] * feat[f]
                a = _clip(a, lov[0], hiv[0])
                acv[b, h, 0] = a
                _cartpole_one(s, force_mag * a, g, masscart, masspole,
                              half_length, dt, rail, s_next)
                for i in range(4):
                    s[i] = s_next[i]
                    stv[b, h + 1, i] = s[i]
    return states, actions


def linear_rollout_obs(K, phi0, Py_ssize_t H, Py_ssize_t n_obs):
    cdef double[:, :, ::1] Kv = K
    cdef double[::1] p0 = phi0
    cdef Py_ssize_t B = Kv.shape[0]
    cdef Py_ssize_t d = Kv.shape[1]
    out = np.empty((B, H, n_obs))
    cdef double[:, :, ::1] ov = out
    cur_buf = np.empty(d)
    nxt_buf = np.empty(d)
    cdef double[::1] cur = cur_buf
    cdef double[::1] nxt = nxt_buf
    cdef Py_ssize_t b, h, i, j
    cdef double acc
    with nogil:
        for b in range(B):
            for i in range(d):
                cur[i] = p0[i]
            for h in range(H):
                for i in range(n_obs):
                    ov[b, h, i] = cur[i]
                if h + 1 < H:
                    for i in range(d):
                        acc = 0.0
                        for j in range(d):
                            acc += Kv[b, i, j] * cur[j]
                        nxt[i] = acc
                    for i in range(d):
                        cur[i] = nxt[i]
    return out
