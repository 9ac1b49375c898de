"""Pure-Python kernels.

Reference implementation of the hot loops; ``_ckernels.pyx`` mirrors every
function here operation for operation so both backends produce identical
output for identical RNG state. Every kernel takes the four xoshiro256**
state words and returns the advanced state alongside its results.
"""

from __future__ import annotations

import math

import numpy as np

from .rng import TWO_PI, RandomStream

BACKEND = "python"

EVENT_DONE = 0
EVENT_BOUNDARY = 1
EVENT_CAP = 2

_ERR_UNIT = 2.0 ** -49


def _stream(state) -> RandomStream:
    rs = RandomStream.__new__(RandomStream)
    rs.seed = None
    rs._s = [int(v) for v in state]
    return rs


def _round_half_away(v: float) -> int:
    av = abs(v)
    r = math.floor(av)
    if av - r >= 0.5:
        r += 1
    return int(r) if v >= 0 else -int(r)


def halfplane_point(x: float, theta: float) -> tuple[float, float]:
    """Point at distance acosh(1 + x) from i, in direction theta."""
    t = 1.0 + x + math.sqrt(x * (x + 2.0))
    phi = 0.5 * theta
    c = math.cos(phi)
    s = math.sin(phi)
    den = c * c + t * t * s * s
    return (1.0 - t * t) * s * c / den, t / den


def reduce_double(x: float, y: float, max_steps: int):
    """Gauss reduction in double precision with exact integer bookkeeping.

    Returns ``(a, b, c, d, x0, y0, steps, capped)`` where the integer matrix
    maps the input point to ``x0 + i y0``.
    """
    a, b, c, d = 1, 0, 0, 1
    steps = 0
    r2 = 0.0
    while True:
        if steps >= max_steps:
            return a, b, c, d, x, y, steps, True
        steps += 1
        q = math.floor(x + 0.5)
        x -= q
        if x >= 0.5:
            x -= 1.0
            q += 1.0
        elif x < -0.5:
            x += 1.0
            q -= 1.0
        qi = int(q)
        a -= qi * c
        b -= qi * d
        r2 = x * x + y * y
        if r2 < 1.0:
            x = -x / r2
            y = y / r2
            a, b, c, d = -c, -d, a, b
        else:
            break
    if r2 == 1.0 and x > 0.0:
        x = -x
        a, b, c, d = -c, -d, a, b
    return a, b, c, d, x, y, steps, False


def fancy_fill(state, norm_sq_bound, x_max, max_steps, count, carry):
    """Run the disk-sample-and-reduce loop until ``count`` acceptances or an event.

    ``carry`` is the number of draws already spent on the current sample.
    Returns ``(state, mats, iters, event, pend_x, pend_y, pend_iters)``;
    on an event the pending point must be resolved by the caller.
    """
    rs = _stream(state)
    mats = []
    iters = []
    it = carry
    while len(iters) < count:
        it += 1
        u1 = rs.uniform()
        u2 = rs.uniform()
        zx, zy = halfplane_point(x_max * u1, TWO_PI * u2)
        a, b, c, d, x0, y0, steps, capped = reduce_double(zx, zy, max_steps)
        if capped:
            return rs.getstate(), _mat_array(mats, 4), _int_array(iters), EVENT_CAP, zx, zy, it
        # forward error of the reduced point, amplified by Im z0 / Im z
        tol = 4.0 * (steps * _ERR_UNIT * (y0 / zy) + _ERR_UNIT)
        if abs(x0 + 0.5) < tol or abs(x0 - 0.5) < tol or abs(x0 * x0 + y0 * y0 - 1.0) < 4.0 * tol:
            return rs.getstate(), _mat_array(mats, 4), _int_array(iters), EVENT_BOUNDARY, zx, zy, it
        if a * a + b * b + c * c + d * d <= norm_sq_bound:
            if rs.next_u64() >> 63:
                mats.append((a, b, c, d))
            else:
                mats.append((-a, -b, -c, -d))
            iters.append(it)
            it = 0
    return rs.getstate(), _mat_array(mats, 4), _int_array(iters), EVENT_DONE, 0.0, 0.0, 0


def _ball_draw(rs: RandomStream, n: int, radius: float) -> list[float]:
    while True:
        g = rs.gaussians(n)
        ss = 0.0
        for v in g:
            ss += v * v
        if ss > 0.0:
            break
    u = rs.uniform()
    scale = radius * u ** (1.0 / n) / math.sqrt(ss)
    return [v * scale for v in g]


def ball_fill(state, n, radius, count):
    rs = _stream(state)
    out = np.empty((count, n), dtype=np.float64)
    for k in range(count):
        out[k] = _ball_draw(rs, n, radius)
    return rs.getstate(), out


def lattice_fill(state, n, norm_sq_bound, radius, count, det_one):
    """Uniform lattice points of squared norm <= ``norm_sq_bound`` by padded-ball rounding.

    With ``det_one`` (n == 4) a vector is kept only if, read as a 2x2 matrix
    row-major, it has determinant 1. Returns
    ``(state, vectors, ball_draws, lattice_draws)``.
    """
    rs = _stream(state)
    out = []
    ball_draws = 0
    lattice_draws = 0
    while len(out) < count:
        ball_draws += 1
        v = [_round_half_away(p) for p in _ball_draw(rs, n, radius)]
        ss = 0
        for e in v:
            ss += e * e
        if ss > norm_sq_bound:
            continue
        lattice_draws += 1
        if det_one and v[0] * v[3] - v[1] * v[2] != 1:
            continue
        out.append(v)
    return rs.getstate(), _mat_array(out, n), ball_draws, lattice_draws


def walk_fill(state, n, p, length, count):
    """Endpoints of lazy walks on the Cayley graph of SL(n, p) w.r.t. elementary transvections.

    Generator ``k`` of ``2 n (n - 1)`` is the row operation
    ``row_i += s row_j`` with ``(i, j)`` the ``k // 2``-th ordered pair and
    ``s = +1`` for even k, ``-1`` for odd k. Half of the moves stay put.
    """
    rs = _stream(state)
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    ngen = 2 * len(pairs)
    out = np.empty((count, n * n), dtype=np.int64)
    for w in range(count):
        m = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        for _ in range(length):
            k = rs.randbelow(2 * ngen)
            if k >= ngen:
                continue
            i, j = pairs[k >> 1]
            ri, rj = m[i], m[j]
            if k & 1:
                for col in range(n):
                    ri[col] = (ri[col] - rj[col]) % p
            else:
                for col in range(n):
                    ri[col] = (ri[col] + rj[col]) % p
        out[w] = [e for row in m for e in row]
    return rs.getstate(), out


def det_mod(m: list[list[int]], p: int) -> int:
    """Determinant modulo a prime by Gaussian elimination (input not modified)."""
    n = len(m)
    a = [row[:] for row in m]
    det = 1
    for col in range(n):
        piv = -1
        for r in range(col, n):
            if a[r][col] % p:
                piv = r
                break
        if piv < 0:
            return 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        pv = a[col][col] % p
        det = det * pv % p
        inv = pow(pv, p - 2, p)
        for r in range(col + 1, n):
            f = a[r][col] * inv % p
            if f:
                ar, ac = a[r], a[col]
                for k in range(col, n):
                    ar[k] = (ar[k] - f * ac[k]) % p
    return det % p


def rand_sl_fill(state, n, p, count):
    """Uniform SL(n, p): uniform matrix, reject singular, scale first column by det^-1."""
    rs = _stream(state)
    out = np.empty((count, n * n), dtype=np.int64)
    rejections = 0
    for k in range(count):
        while True:
            m = [[rs.randbelow(p) for _ in range(n)] for _ in range(n)]
            det = det_mod(m, p)
            if det:
                break
            rejections += 1
        inv = pow(det, p - 2, p)
        for r in range(n):
            m[r][0] = m[r][0] * inv % p
        out[k] = [e for row in m for e in row]
    return rs.getstate(), out, rejections


def symplectic_pairing(u, v, n: int, p: int) -> int:
    """<u, v> = u^T J v with J = [[0, I], [-I, 0]]."""
    s = 0
    for k in range(n):
        s += u[k] * v[n + k] - u[n + k] * v[k]
    return s % p


def _residual(v, xs, ys, n, p):
    out = list(v)
    for xj, yj in zip(xs, ys):
        cy = symplectic_pairing(v, yj, n, p)
        cx = symplectic_pairing(v, xj, n, p)
        for k in range(2 * n):
            out[k] = (out[k] - cy * xj[k] + cx * yj[k]) % p
    return out


def rand_sp_fill(state, n, p, count):
    """Uniform Sp(2n, p) by building a random symplectic basis pair by pair."""
    rs = _stream(state)
    dim = 2 * n
    out = np.empty((count, dim * dim), dtype=np.int64)
    retries = 0
    for k in range(count):
        xs: list[list[int]] = []
        ys: list[list[int]] = []
        for _ in range(n):
            while True:
                x = [rs.randbelow(p) for _ in range(dim)]
                y = [rs.randbelow(p) for _ in range(dim)]
                x2 = _residual(x, xs, ys, n, p)
                y2 = _residual(y, xs, ys, n, p)
                c = symplectic_pairing(x2, y2, n, p)
                if c:
                    break
                retries += 1
            cinv = pow(c, p - 2, p)
            xs.append(x2)
            ys.append([e * cinv % p for e in y2])
        cols = xs + ys
        out[k] = [cols[j][i] for i in range(dim) for j in range(dim)]
    return rs.getstate(), out, retries


def perm_fill(state, n, count):
    """Fisher-Yates shuffles of ``[1..n]``."""
    rs = _stream(state)
    out = np.empty((count, n), dtype=np.int64)
    for k in range(count):
        a = list(range(1, n + 1))
        for i in range(n, 1, -1):
            j = rs.randbelow(i)
            a[i - 1], a[j] = a[j], a[i - 1]
        out[k] = a
    return rs.getstate(), out


def _mat_array(rows, width):
    if not rows:
        return np.empty((0, width), dtype=np.int64)
    return np.array(rows, dtype=np.int64)


def _int_array(vals):
    return np.array(vals, dtype=np.int64)
