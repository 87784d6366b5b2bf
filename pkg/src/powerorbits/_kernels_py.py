"""Pure-Python U-scan kernel. Reference semantics for the compiled twin in _kernels.pyx."""
from math import gcd


def scan_u_chunk(coeffs, L, s_primes, q_lo, q_hi, B):
    """Pairs (p, q) with q_lo <= q < q_hi, |p| <= B, gcd(p, q) = 1, whose value
    f(p/q) = F(p, q) / (L q^d) could be an S-integral power: it is zero, or its
    reduced numerator or denominator is an S-unit.

    ``coeffs`` are the integers a_i = L*c_i, lowest degree first.
    """
    d = len(coeffs) - 1
    out = []
    for q in range(q_lo, q_hi):
        qpow = [1] * (d + 1)
        for i in range(1, d + 1):
            qpow[i] = qpow[i - 1] * q
        den0 = L * qpow[d]
        for p in range(-B, B + 1):
            if q == 1:
                pass
            elif gcd(p, q) != 1:
                continue
            n = coeffs[d]
            for i in range(d - 1, -1, -1):
                n = n * p + coeffs[i] * qpow[d - i]
            if n == 0:
                out.append((p, q))
                continue
            if n < 0:
                n = -n
            g = gcd(n, den0)
            num = n // g
            den = den0 // g
            for s in s_primes:
                while num % s == 0:
                    num //= s
                while den % s == 0:
                    den //= s
            if num == 1 or den == 1:
                out.append((p, q))
    return out
