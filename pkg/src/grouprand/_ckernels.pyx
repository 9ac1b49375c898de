# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; a line-by-line mirror of ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, floor, cos, sin, log, pow, fabs
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

BACKEND = "cython"

cdef enum:
    EV_DONE = 0
    EV_BOUNDARY = 1
    EV_CAP = 2

EVENT_DONE = EV_DONE
EVENT_BOUNDARY = EV_BOUNDARY
EVENT_CAP = EV_CAP

cdef double TWO_PI = 6.283185307179586
cdef double TWO_NEG_53 = 1.0 / 9007199254740992.0
cdef double ERR_UNIT = 1.0 / 562949953421312.0  # 2**-49

cdef extern from *:
    """
    #include <stdint.h>
    static inline uint64_t gr_mul128(uint64_t a, uint64_t b, uint64_t *lo) {
        __uint128_t m = (__uint128_t)a * (__uint128_t)b;
        *lo = (uint64_t)m;
        return (uint64_t)(m >> 64);
    }
    """
    uint64_t gr_mul128(uint64_t a, uint64_t b, uint64_t *lo) nogil


ctypedef struct Xoshiro:
    uint64_t s0, s1, s2, s3


cdef inline uint64_t rotl(uint64_t x, int k) noexcept nogil:
    return (x << k) | (x >> (64 - k))


cdef inline uint64_t next_u64(Xoshiro *r) noexcept nogil:
    cdef uint64_t result = rotl(r.s1 * 5, 7) * 9
    cdef uint64_t t = r.s1 << 17
    r.s2 ^= r.s0
    r.s3 ^= r.s1
    r.s1 ^= r.s2
    r.s0 ^= r.s3
    r.s2 ^= t
    r.s3 = rotl(r.s3, 45)
    return result


cdef inline double uniform(Xoshiro *r) noexcept nogil:
    return <double>(next_u64(r) >> 11) * TWO_NEG_53


cdef inline uint64_t randbelow(Xoshiro *r, uint64_t n) noexcept nogil:
    cdef uint64_t low
    cdef uint64_t hi = gr_mul128(next_u64(r), n, &low)
    cdef uint64_t threshold
    if low < n:
        threshold = (0 - n) % n
        while low < threshold:
            hi = gr_mul128(next_u64(r), n, &low)
    return hi


cdef inline void gaussian_pair(Xoshiro *r, double *g0, double *g1) noexcept nogil:
    cdef double u1 = uniform(r)
    while u1 == 0.0:
        u1 = uniform(r)
    cdef double u2 = uniform(r)
    cdef double rad = sqrt(-2.0 * log(u1))
    cdef double ang = TWO_PI * u2
    g0[0] = rad * cos(ang)
    g1[0] = rad * sin(ang)


cdef inline void gaussians(Xoshiro *r, double *out, int n) noexcept nogil:
    cdef int k = 0
    cdef double a, b
    while k < n:
        gaussian_pair(r, &a, &b)
        out[k] = a
        if k + 1 < n:
            out[k + 1] = b
        k += 2


cdef Xoshiro load(state):
    cdef Xoshiro r
    r.s0 = <uint64_t>state[0]
    r.s1 = <uint64_t>state[1]
    r.s2 = <uint64_t>state[2]
    r.s3 = <uint64_t>state[3]
    return r


cdef tuple dump(Xoshiro *r):
    return (int(r.s0), int(r.s1), int(r.s2), int(r.s3))


cdef inline int64_t round_half_away(double v) noexcept nogil:
    cdef double av = fabs(v)
    cdef double rr = floor(av)
    if av - rr >= 0.5:
        rr += 1.0
    if v >= 0:
        return <int64_t>rr
    return -(<int64_t>rr)


cdef inline void halfplane_point(double x, double theta, double *zx, double *zy) noexcept nogil:
    cdef double t = 1.0 + x + sqrt(x * (x + 2.0))
    cdef double phi = 0.5 * theta
    cdef double c = cos(phi)
    cdef double s = sin(phi)
    cdef double den = c * c + t * t * s * s
    zx[0] = (1.0 - t * t) * s * c / den
    zy[0] = t / den


cdef inline int reduce_double(double x, double y, int64_t max_steps, int64_t *m,
                              double *x0, double *y0, int64_t *steps_out) noexcept nogil:
    """Returns 1 when the step cap is hit."""
    cdef int64_t a = 1, b = 0, c = 0, d = 1, qi, ta, tb
    cdef int64_t steps = 0
    cdef double q, r2 = 0.0
    while True:
        if steps >= max_steps:
            m[0] = a; m[1] = b; m[2] = c; m[3] = d
            x0[0] = x; y0[0] = y; steps_out[0] = steps
            return 1
        steps += 1
        q = floor(x + 0.5)
        x -= q
        if x >= 0.5:
            x -= 1.0
            q += 1.0
        elif x < -0.5:
            x += 1.0
            q -= 1.0
        qi = <int64_t>q
        a -= qi * c
        b -= qi * d
        r2 = x * x + y * y
        if r2 < 1.0:
            x = -x / r2
            y = y / r2
            ta = a
            tb = b
            a = -c
            b = -d
            c = ta
            d = tb
        else:
            break
    if r2 == 1.0 and x > 0.0:
        x = -x
        ta = a
        tb = b
        a = -c
        b = -d
        c = ta
        d = tb
    m[0] = a; m[1] = b; m[2] = c; m[3] = d
    x0[0] = x; y0[0] = y; steps_out[0] = steps
    return 0


def reduce_double_py(double x, double y, int64_t max_steps):
    cdef int64_t m[4]
    cdef double x0, y0
    cdef int64_t steps
    cdef int capped = reduce_double(x, y, max_steps, m, &x0, &y0, &steps)
    return m[0], m[1], m[2], m[3], x0, y0, steps, bool(capped)


def fancy_fill(state, int64_t norm_sq_bound, double x_max, int64_t max_steps,
               Py_ssize_t count, int64_t carry):
    cdef Xoshiro r = load(state)
    cdef cnp.ndarray[int64_t, ndim=2] mats = np.empty((count, 4), dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] iters = np.empty(count, dtype=np.int64)
    cdef int64_t[:, ::1] mv = mats
    cdef int64_t[::1] iv = iters
    cdef Py_ssize_t k = 0
    cdef int64_t it = carry, steps
    cdef int64_t m[4]
    cdef double u1, u2, zx = 0.0, zy = 0.0, x0, y0, tol
    cdef int capped, event = EV_DONE
    with nogil:
        while k < count:
            it += 1
            u1 = uniform(&r)
            u2 = uniform(&r)
            halfplane_point(x_max * u1, TWO_PI * u2, &zx, &zy)
            capped = reduce_double(zx, zy, max_steps, m, &x0, &y0, &steps)
            if capped:
                event = EV_CAP
                break
            tol = 4.0 * (<double>steps * ERR_UNIT * (y0 / zy) + ERR_UNIT)
            if fabs(x0 + 0.5) < tol or fabs(x0 - 0.5) < tol or fabs(x0 * x0 + y0 * y0 - 1.0) < 4.0 * tol:
                event = EV_BOUNDARY
                break
            if m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[3] * m[3] <= norm_sq_bound:
                if next_u64(&r) >> 63:
                    mv[k, 0] = m[0]; mv[k, 1] = m[1]; mv[k, 2] = m[2]; mv[k, 3] = m[3]
                else:
                    mv[k, 0] = -m[0]; mv[k, 1] = -m[1]; mv[k, 2] = -m[2]; mv[k, 3] = -m[3]
                iv[k] = it
                it = 0
                k += 1
    if event == EV_DONE:
        return dump(&r), mats[:k], iters[:k], EVENT_DONE, 0.0, 0.0, 0
    return dump(&r), mats[:k], iters[:k], event, zx, zy, it


cdef inline void ball_draw(Xoshiro *r, int n, double radius, double *out) noexcept nogil:
    cdef double ss, u, scale
    cdef int i
    while True:
        gaussians(r, out, n)
        ss = 0.0
        for i in range(n):
            ss += out[i] * out[i]
        if ss > 0.0:
            break
    u = uniform(r)
    scale = radius * pow(u, 1.0 / n) / sqrt(ss)
    for i in range(n):
        out[i] = out[i] * scale


def ball_fill(state, int n, double radius, Py_ssize_t count):
    cdef Xoshiro r = load(state)
    cdef cnp.ndarray[double, ndim=2] out = np.empty((count, n), dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t k
    with nogil:
        for k in range(count):
            ball_draw(&r, n, radius, &ov[k, 0])
    return dump(&r), out


def lattice_fill(state, int n, int64_t norm_sq_bound, double radius, Py_ssize_t count, bint det_one):
    cdef Xoshiro r = load(state)
    cdef cnp.ndarray[int64_t, ndim=2] out = np.empty((count, n), dtype=np.int64)
    cdef int64_t[:, ::1] ov = out
    cdef cnp.ndarray[double, ndim=1] buf = np.empty(n, dtype=np.float64)
    cdef double[::1] bv = buf
    cdef Py_ssize_t k = 0
    cdef int i
    cdef int64_t ss, e
    cdef int64_t ball_draws = 0, lattice_draws = 0
    with nogil:
        while k < count:
            ball_draws += 1
            ball_draw(&r, n, radius, &bv[0])
            ss = 0
            for i in range(n):
                e = round_half_away(bv[i])
                ov[k, i] = e
                ss += e * e
            if ss > norm_sq_bound:
                continue
            lattice_draws += 1
            if det_one and ov[k, 0] * ov[k, 3] - ov[k, 1] * ov[k, 2] != 1:
                continue
            k += 1
    return dump(&r), out, ball_draws, lattice_draws


def walk_fill(state, int n, int64_t p, Py_ssize_t length, Py_ssize_t count):
    cdef Xoshiro r = load(state)
    cdef int npairs = n * (n - 1)
    cdef uint64_t ngen = 2 * npairs
    cdef cnp.ndarray[int64_t, ndim=2] out = np.empty((count, n * n), dtype=np.int64)
    cdef int64_t[:, ::1] ov = out
    cdef cnp.ndarray[int, ndim=2] pairs = np.array(
        [(i, j) for i in range(n) for j in range(n) if i != j], dtype=np.intc).reshape(npairs, 2)
    cdef int[:, ::1] pv = pairs
    cdef Py_ssize_t w, step
    cdef uint64_t k
    cdef int i, j, col
    cdef int64_t v
    with nogil:
        for w in range(count):
            for i in range(n):
                for j in range(n):
                    ov[w, i * n + j] = 1 if i == j else 0
            for step in range(length):
                k = randbelow(&r, 2 * ngen)
                if k >= ngen:
                    continue
                i = pv[k >> 1, 0]
                j = pv[k >> 1, 1]
                if k & 1:
                    for col in range(n):
                        v = ov[w, i * n + col] - ov[w, j * n + col]
                        if v < 0:
                            v += p
                        ov[w, i * n + col] = v
                else:
                    for col in range(n):
                        v = ov[w, i * n + col] + ov[w, j * n + col]
                        if v >= p:
                            v -= p
                        ov[w, i * n + col] = v
    return dump(&r), out


cdef inline int64_t powmod(int64_t base, int64_t e, int64_t p) noexcept nogil:
    cdef int64_t result = 1
    base %= p
    while e > 0:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


cdef int64_t det_mod_c(int64_t *a, int n, int64_t p) noexcept nogil:
    """Determinant mod p; destroys ``a`` (row-major n x n, entries in [0, p))."""
    cdef int64_t det = 1, pv, inv, f, tmp
    cdef int col, r, k, piv
    for col in range(n):
        piv = -1
        for r in range(col, n):
            if a[r * n + col] != 0:
                piv = r
                break
        if piv < 0:
            return 0
        if piv != col:
            for k in range(n):
                tmp = a[col * n + k]
                a[col * n + k] = a[piv * n + k]
                a[piv * n + k] = tmp
            det = p - det if det != 0 else 0
        pv = a[col * n + col]
        det = det * pv % p
        inv = powmod(pv, p - 2, p)
        for r in range(col + 1, n):
            f = a[r * n + col] * inv % p
            if f != 0:
                for k in range(col, n):
                    a[r * n + k] = (a[r * n + k] - f * a[col * n + k] % p + p) % p
    return det % p


def det_mod(m, int64_t p):
    n = len(m)
    cdef cnp.ndarray[int64_t, ndim=1] buf = np.array([e % p for row in m for e in row], dtype=np.int64)
    return int(det_mod_c(&buf[0], n, p))


def rand_sl_fill(state, int n, int64_t p, Py_ssize_t count):
    cdef Xoshiro r = load(state)
    cdef cnp.ndarray[int64_t, ndim=2] out = np.empty((count, n * n), dtype=np.int64)
    cdef int64_t[:, ::1] ov = out
    cdef cnp.ndarray[int64_t, ndim=1] work = np.empty(n * n, dtype=np.int64)
    cdef int64_t[::1] wv = work
    cdef Py_ssize_t k
    cdef int i, row
    cdef int64_t det, inv, rejections = 0
    with nogil:
        for k in range(count):
            while True:
                for i in range(n * n):
                    ov[k, i] = <int64_t>randbelow(&r, <uint64_t>p)
                    wv[i] = ov[k, i]
                det = det_mod_c(&wv[0], n, p)
                if det != 0:
                    break
                rejections += 1
            inv = powmod(det, p - 2, p)
            for row in range(n):
                ov[k, row * n] = ov[k, row * n] * inv % p
    return dump(&r), out, rejections


cdef inline int64_t pairing(int64_t *u, int64_t *v, int n, int64_t p) noexcept nogil:
    cdef int64_t s = 0
    cdef int k
    for k in range(n):
        s = (s + u[k] * v[n + k] - u[n + k] * v[k]) % p
    if s < 0:
        s += p
    return s


cdef inline void residual(int64_t *v, int64_t *basis, int npairs, int n, int64_t p) noexcept nogil:
    """In place: v -= sum_j (<v, y_j> x_j - <v, x_j> y_j).

    ``basis`` holds x_0, y_0, x_1, y_1, ... each of length 2n. The pairings
    are taken against the original v, as in the reference kernel.
    """
    cdef int dim = 2 * n
    cdef int j, k
    cdef int64_t cy, cx
    cdef int64_t *xj
    cdef int64_t *yj
    cdef int64_t orig[64]
    for k in range(dim):
        orig[k] = v[k]
    for j in range(npairs):
        xj = basis + (2 * j) * dim
        yj = basis + (2 * j + 1) * dim
        cy = pairing(orig, yj, n, p)
        cx = pairing(orig, xj, n, p)
        for k in range(dim):
            v[k] = ((v[k] - cy * xj[k] + cx * yj[k]) % p + p) % p


def rand_sp_fill(state, int n, int64_t p, Py_ssize_t count):
    if 2 * n > 64:
        raise ValueError("compiled symplectic kernel supports 2n <= 64")
    cdef Xoshiro r = load(state)
    cdef int dim = 2 * n
    cdef cnp.ndarray[int64_t, ndim=2] out = np.empty((count, dim * dim), dtype=np.int64)
    cdef int64_t[:, ::1] ov = out
    cdef cnp.ndarray[int64_t, ndim=1] basis = np.empty(2 * n * dim, dtype=np.int64)
    cdef int64_t[::1] bv = basis
    cdef Py_ssize_t k
    cdef int i, e, col
    cdef int64_t c, cinv, retries = 0
    cdef int64_t *x
    cdef int64_t *y
    with nogil:
        for k in range(count):
            for i in range(n):
                x = &bv[(2 * i) * dim]
                y = &bv[(2 * i + 1) * dim]
                while True:
                    for e in range(dim):
                        x[e] = <int64_t>randbelow(&r, <uint64_t>p)
                    for e in range(dim):
                        y[e] = <int64_t>randbelow(&r, <uint64_t>p)
                    residual(x, &bv[0], i, n, p)
                    residual(y, &bv[0], i, n, p)
                    c = pairing(x, y, n, p)
                    if c != 0:
                        break
                    retries += 1
                cinv = powmod(c, p - 2, p)
                for e in range(dim):
                    y[e] = y[e] * cinv % p
            for i in range(n):
                for e in range(dim):
                    ov[k, e * dim + i] = bv[(2 * i) * dim + e]
                    ov[k, e * dim + n + i] = bv[(2 * i + 1) * dim + e]
    return dump(&r), out, retries


def perm_fill(state, int n, Py_ssize_t count):
    cdef Xoshiro r = load(state)
    cdef cnp.ndarray[int64_t, ndim=2] out = np.empty((count, n), dtype=np.int64)
    cdef int64_t[:, ::1] ov = out
    cdef Py_ssize_t k
    cdef int i
    cdef int64_t j, tmp
    with nogil:
        for k in range(count):
            for i in range(n):
                ov[k, i] = i + 1
            for i in range(n, 1, -1):
                j = <int64_t>randbelow(&r, <uint64_t>i)
                tmp = ov[k, i - 1]
                ov[k, i - 1] = ov[k, j]
                ov[k, j] = tmp
    return dump(&r), out
