"""Multimodular kernel computation with an exact certificate.

The kernel is computed in reduced row echelon form modulo several word-sized
primes, lifted by Chinese remaindering and rational reconstruction, and then
checked against the original matrix in exact integer arithmetic.  A lifted
basis that annihilates M exactly and has nc - rank_p(M) vectors in echelon
form is the rational kernel: rank over Q is at least rank mod p, so the
kernel over Q cannot be larger.  Any failure falls back to Fraction
elimination.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt, lcm

import numpy as np

_MAX_PRIMES = 80


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # Deterministic for n < 3.4e14.
    for a in (2, 3, 5, 7, 11, 13, 17):
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


def _primes():
    n = (1 << 31) - 1
    while True:
        if _is_prime(n):
            yield n
        n -= 2


def _rref_mod(A: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    A = A.copy()
    nrows, ncols = A.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = pow(int(A[r, c]), p - 2, p)
        A[r] = (A[r] * inv) % p
        col = A[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            A[hit] = (A[hit] - (col[hit, None] * A[r][None, :]) % p) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots


def _kernel_mod(A: np.ndarray, p: int, nc: int) -> tuple[np.ndarray, list[int], int]:
    R, piv = _rref_mod(A, p)
    pivset = set(piv)
    free = [j for j in range(nc) if j not in pivset]
    N = np.zeros((len(free), nc), dtype=np.int64)
    for k, f in enumerate(free):
        N[k, f] = 1
        for row, pc in zip(R, piv):
            N[k, pc] = (-int(row[f])) % p
    if not free:
        return N, [], len(piv)
    K, kpiv = _rref_mod(N, p)
    return K, kpiv, len(piv)


def _ratrecon(a: int, m: int) -> Fraction | None:
    bound = isqrt(m // 2)
    r0, r1 = m, a % m
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def _integer_rows(rows) -> list[list[int]]:
    out = []
    for r in rows:
        if not any(r):
            continue
        d = lcm(*(x.denominator for x in r))
        out.append([int(x * d) for x in r])
    return out


def _verify(int_rows: list[list[int]], basis: list[tuple[Fraction, ...]]) -> bool:
    for v in basis:
        d = lcm(*(x.denominator for x in v))
        w = [(x.numerator * (d // x.denominator), j) for j, x in enumerate(v) if x]
        for r in int_rows:
            if sum(r[j] * c for c, j in w):
                return False
    return True


def kernel_multimodular(rows, nc: int) -> list[tuple[Fraction, ...]]:
    from .matrix import kernel_fraction

    int_rows = _integer_rows(rows)
    if not int_rows:
        return [tuple(Fraction(int(i == j)) for j in range(nc)) for i in range(nc)]
    best_rank = -1
    signature = None
    residues: list[list[int]] | None = None
    modulus = 1
    previous = None
    for count, p in enumerate(_primes()):
        if count >= _MAX_PRIMES:
            break
        A = np.array([[x % p for x in r] for r in int_rows], dtype=np.int64)
        K, kpiv, rk = _kernel_mod(A, p, nc)
        if rk < best_rank:
            continue
        if rk > best_rank or kpiv != signature:
            if rk == best_rank and signature is not None:
                continue
            best_rank, signature = rk, kpiv
            residues = [[int(x) for x in row] for row in K]
            modulus = p
            previous = None
            if not residues:
                return []
            continue
        # Chinese remaindering onto the running residues.
        inv = pow(modulus, -1, p)
        for i, row in enumerate(K):
            acc = residues[i]
            for j in range(nc):
                a = acc[j]
                t = ((int(row[j]) - a) * inv) % p
                acc[j] = a + modulus * t
        modulus *= p
        lifted = []
        ok = True
        for row in residues:
            vec = []
            for a in row:
                q = _ratrecon(a, modulus)
                if q is None:
                    ok = False
                    break
                vec.append(q)
            if not ok:
                break
            lifted.append(tuple(vec))
        if not ok:
            previous = None
            continue
        if lifted == previous and _verify(int_rows, lifted):
            return lifted
        previous = lifted
    return kernel_fraction(rows)
