"""Uniform sampling in SL(n, p), Sp(2n, p) and S_n, plus tiny-group enumeration."""

from __future__ import annotations

import itertools
import struct
from dataclasses import dataclass

import numpy as np

from . import _backend, _pykernels
from .rng import RandomStream

MAX_PRIME = 2**31


class DomainError(ValueError):
    pass


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e9."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not 2 <= self.p < MAX_PRIME or not is_prime(self.p):
            raise DomainError("p must be prime")

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.p - 2, self.p)


@dataclass(frozen=True)
class FpMatrix:
    """Square matrix over F_p, entries row-major in [0, p)."""

    n: int
    p: int
    entries: tuple[int, ...]

    def __post_init__(self):
        e = tuple(int(v) % self.p for v in self.entries)
        if len(e) != self.n * self.n:
            raise ValueError("wrong number of entries")
        object.__setattr__(self, "entries", e)

    @classmethod
    def from_rows(cls, rows, p: int) -> "FpMatrix":
        return cls(len(rows), p, tuple(v for row in rows for v in row))

    @classmethod
    def identity(cls, n: int, p: int) -> "FpMatrix":
        return cls(n, p, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    def rows(self) -> list[list[int]]:
        n = self.n
        return [list(self.entries[i * n:(i + 1) * n]) for i in range(n)]

    def det(self) -> int:
        return _pykernels.det_mod(self.rows(), self.p)

    def __matmul__(self, o: "FpMatrix") -> "FpMatrix":
        a, b = self.rows(), o.rows()
        n, p = self.n, self.p
        return FpMatrix(n, p, tuple(sum(a[i][k] * b[k][j] for k in range(n)) % p for i in range(n) for j in range(n)))

    def transpose(self) -> "FpMatrix":
        r = self.rows()
        return FpMatrix.from_rows([list(col) for col in zip(*r)], self.p)

    def key(self) -> bytes:
        """Canonical serialization: n, p, then the entries row-major, all big-endian u32."""
        return struct.pack(f">II{len(self.entries)}I", self.n, self.p, *self.entries)


def _check(n: int, p: int):
    if n < 1:
        raise DomainError("n must be >= 1")
    PrimeField(p)


def sl_order(n: int, p: int) -> int:
    out = p ** (n * (n - 1) // 2)
    for k in range(2, n + 1):
        out *= p**k - 1
    return out


def sp_order(n: int, p: int) -> int:
    out = p ** (n * n)
    for k in range(1, n + 1):
        out *= p ** (2 * k) - 1
    return out


def gen_rand_sl_batch(n: int, p: int, count: int, stream: RandomStream) -> np.ndarray:
    """``count`` uniform elements of SL(n, p), one flattened matrix per row."""
    _check(n, p)
    state, out, _ = _backend.kernels.rand_sl_fill(stream.getstate(), n, p, count)
    stream.setstate(state)
    return out


def gen_rand_sl(n: int, p: int, stream: RandomStream) -> FpMatrix:
    """Uniform element of SL(n, p).

    A uniform matrix is redrawn until invertible, then its first column is
    divided by the determinant; each element of SL(n, p) has exactly p - 1
    invertible preimages, so the result is uniform.
    """
    return FpMatrix(n, p, tuple(gen_rand_sl_batch(n, p, 1, stream)[0]))


def symplectic_form(n: int) -> np.ndarray:
    """J = [[0, I], [-I, 0]] (as integers; reduce mod p where needed)."""
    J = np.zeros((2 * n, 2 * n), dtype=np.int64)
    J[:n, n:] = np.eye(n, dtype=np.int64)
    J[n:, :n] = -np.eye(n, dtype=np.int64)
    return J


def pairing(u, v, p: int) -> int:
    n = len(u) // 2
    return _pykernels.symplectic_pairing(list(u), list(v), n, p)


def symplectic_project(v, pairs, p: int) -> list[int]:
    """Projection of ``v`` onto the span of symplectic pairs (x_j, y_j).

    Returns sum_j (<v, y_j> x_j - <v, x_j> y_j); the residual ``v - v'``
    pairs to zero with every x_j and y_j.
    """
    v = [int(e) % p for e in v]
    pairs = [([int(e) % p for e in x], [int(e) % p for e in y]) for x, y in pairs]
    for j, (xj, yj) in enumerate(pairs):
        if len(xj) != len(v) or len(yj) != len(v):
            raise ValueError("dimension mismatch")
        if pairing(xj, yj, p) != 1:
            raise ValueError(f"pair {j} does not satisfy <x, y> = 1")
        for k, (xk, yk) in enumerate(pairs):
            if k != j and (pairing(xj, xk, p) or pairing(xj, yk, p) or pairing(yj, yk, p)):
                raise ValueError(f"pairs {j} and {k} are not orthogonal")
    out = [0] * len(v)
    for xj, yj in pairs:
        cy = pairing(v, yj, p)
        cx = pairing(v, xj, p)
        for k in range(len(v)):
            out[k] = (out[k] + cy * xj[k] - cx * yj[k]) % p
    return out


def gen_rand_sp_batch(n: int, p: int, count: int, stream: RandomStream) -> np.ndarray:
    """``count`` uniform elements of Sp(2n, p), flattened row-major."""
    _check(n, p)
    state, out, _ = _backend.kernels.rand_sp_fill(stream.getstate(), n, p, count)
    stream.setstate(state)
    return out


def gen_rand_sp(n: int, p: int, stream: RandomStream) -> FpMatrix:
    """Uniform element of Sp(2n, p) via a random symplectic basis.

    Pairs are built one at a time: random x, y have their projections onto
    the span W of the earlier pairs removed, and are kept once
    c = <x'', y''> is non-zero, giving the pair (x'', y''/c). The columns
    of the result are x_1..x_n, y_1..y_n.
    """
    return FpMatrix(2 * n, p, tuple(gen_rand_sp_batch(n, p, 1, stream)[0]))


def is_symplectic(M: FpMatrix) -> bool:
    if M.n % 2:
        return False
    n = M.n // 2
    # object dtype: exact Python ints, entries up to 2^31 would overflow int64 products
    A = np.array(M.rows(), dtype=object)
    J = (symplectic_form(n) % M.p).astype(object)
    return bool(np.array_equal((A.T @ J @ A) % M.p, J))


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise ValueError("not a permutation of 1..n")

    def __len__(self):
        return len(self.images)

    def matrix(self) -> np.ndarray:
        n = len(self.images)
        P = np.zeros((n, n), dtype=np.int64)
        for i, j in enumerate(self.images):
            P[i, j - 1] = 1
        return P


def gen_perm_batch(n: int, count: int, stream: RandomStream) -> np.ndarray:
    if n < 1:
        raise DomainError("n must be >= 1")
    state, out = _backend.kernels.perm_fill(stream.getstate(), n, count)
    stream.setstate(state)
    return out


def gen_perm(n: int, stream: RandomStream) -> Permutation:
    """Uniform permutation of 1..n (Fisher-Yates)."""
    return Permutation(tuple(int(v) for v in gen_perm_batch(n, 1, stream)[0]))


def transvection_generators(n: int, p: int) -> list[FpMatrix]:
    """Elementary transvections I +- E_ij in the order the walk kernel indexes them."""
    gens = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for s in (1, -1):
                e = [[int(r == c) for c in range(n)] for r in range(n)]
                e[i][j] = s % p
                gens.append(FpMatrix.from_rows(e, p))
    return gens


def expander_walk_batch(n: int, p: int, length: int, count: int, stream: RandomStream) -> np.ndarray:
    """Endpoints of ``count`` lazy walks of ``length`` steps from the identity."""
    _check(n, p)
    if n < 2:
        raise DomainError("the walk needs n >= 2")
    if length < 0:
        raise ValueError("length must be >= 0")
    state, out = _backend.kernels.walk_fill(stream.getstate(), n, p, length, count)
    stream.setstate(state)
    return out


def expander_walk_sample(n: int, p: int, length: int, stream: RandomStream) -> FpMatrix:
    """Approximately uniform element of SL(n, p) by a lazy random walk.

    Each step stays put with probability 1/2 and otherwise multiplies on the
    left by a uniformly chosen transvection I +- E_ij.
    """
    return FpMatrix(n, p, tuple(expander_walk_batch(n, p, length, 1, stream)[0]))


def enumerate_matrices(n: int, p: int):
    """Every n x n matrix over F_p as an array of flattened rows (p**(n*n) of them)."""
    total = p ** (n * n)
    if total > 5_000_000:
        raise ValueError("too many matrices to enumerate")
    return np.array(list(itertools.product(range(p), repeat=n * n)), dtype=np.int64)


def _dets(flat: np.ndarray, n: int, p: int) -> np.ndarray:
    rows = flat.tolist()
    return np.array([_pykernels.det_mod([r[i * n:(i + 1) * n] for i in range(n)], p) for r in rows])


def enumerate_gl(n: int, p: int) -> np.ndarray:
    flat = enumerate_matrices(n, p)
    return flat[_dets(flat, n, p) != 0]


def enumerate_sl(n: int, p: int) -> np.ndarray:
    flat = enumerate_matrices(n, p)
    return flat[_dets(flat, n, p) == 1]


def enumerate_sp(n: int, p: int) -> np.ndarray:
    """Sp(2n, p) by filtering all 2n x 2n matrices over F_p on M^T J M = J."""
    dim = 2 * n
    flat = enumerate_matrices(dim, p)
    M = flat.reshape(-1, dim, dim)
    J = symplectic_form(n) % p
    prod = np.einsum("kji,jl,klm->kim", M, J, M) % p
    return flat[np.all(prod == J, axis=(1, 2))]


def matrix_keys(flat: np.ndarray, n: int, p: int) -> list[bytes]:
    return [FpMatrix(n, p, tuple(r)).key() for r in flat]
