# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled U-scan kernel. Same contract as _kernels_py.scan_u_chunk; the caller
guarantees every intermediate fits in a signed 64-bit integer."""

from libc.stdint cimport int64_t


cdef inline int64_t _gcd(int64_t a, int64_t b) nogil:
    cdef int64_t t
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        t = a % b
        a = b
        b = t
    return a


def scan_u_chunk(coeffs, L, s_primes, long long q_lo, long long q_hi, long long B):
    cdef int d = len(coeffs) - 1
    cdef int ns = len(s_primes)
    cdef int64_t a[64]
    cdef int64_t sp[64]
    cdef int64_t qpow[64]
    cdef int64_t LL = L
    cdef int64_t q, p, n, num, den, den0, g, s
    cdef int i, j
    if d + 1 > 64 or ns > 64:
        raise ValueError("kernel supports degree < 64 and |S| <= 64")
    for i in range(d + 1):
        a[i] = coeffs[i]
    for i in range(ns):
        sp[i] = s_primes[i]
    out = []
    for q in range(q_lo, q_hi):
        qpow[0] = 1
        for i in range(1, d + 1):
            qpow[i] = qpow[i - 1] * q
        den0 = LL * qpow[d]
        for p in range(-B, B + 1):
            if q != 1 and _gcd(p, q) != 1:
                continue
            n = a[d]
            for i in range(d - 1, -1, -1):
                n = n * p + a[i] * qpow[d - i]
            if n == 0:
                out.append((p, q))
                continue
            if n < 0:
                n = -n
            g = _gcd(n, den0)
            num = n // g
            den = den0 // g
            for j in range(ns):
                s = sp[j]
                while num % s == 0:
                    num //= s
                while den % s == 0:
                    den //= s
            if num == 1 or den == 1:
                out.append((p, q))
    return out
