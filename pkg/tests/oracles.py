"""Independent reference computations used by the tests.

Everything here is deliberately naive: plain Fractions, brute-force
products and classical closed forms, with no code shared with the package.
"""
from fractions import Fraction
from math import factorial


def mul(a, b, n):
    out = [Fraction(0)] * (n + 1)
    for i, x in enumerate(a[: n + 1]):
        if x:
            for j, y in enumerate(b[: n + 1 - i]):
                out[i + j] += x * y
    return out


def euler_power(power, n):
    """Coefficients of prod_{k>=1} (1 - q^k)^power up to q^n, by brute force."""
    out = [Fraction(1)] + [Fraction(0)] * n
    for k in range(1, n + 1):
        factor = [Fraction(0)] * (n + 1)
        factor[0] = Fraction(1)
        factor[k] = Fraction(-1)
        if power < 0:
            # 1/(1-q^k) = 1 + q^k + q^2k + ...
            factor = [Fraction(1) if i % k == 0 else Fraction(0) for i in range(n + 1)]
        for _ in range(abs(power)):
            out = mul(out, factor, n)
    return out


def partition_numbers(n):
    p = [1] + [0] * n
    for part in range(1, n + 1):
        for m in range(part, n + 1):
            p[m] += p[m - part]
    return p


def theta_constants(tcap):
    """Jacobi-sum forms of theta1(0), theta2(0), theta3(0) and theta'(0) in t = q^(1/8)."""
    th1 = [0] * (tcap + 1)
    th2 = [0] * (tcap + 1)
    th3 = [0] * (tcap + 1)
    dth = [0] * (tcap + 1)
    for m in range(-20, 21):
        e = (2 * m + 1) ** 2  # q^((2m+1)^2/8)
        if e <= tcap:
            th1[e] += 1
        e = 4 * m * m  # q^(m^2/2)
        if e <= tcap:
            th2[e] += (-1) ** (m % 2)
            th3[e] += 1
    for m in range(0, 20):
        e = 1 + 4 * m * (m + 1)  # t * q^(m(m+1)/2)
        if e <= tcap:
            dth[e] += (-1) ** m * (2 * m + 1)
    return th1, th2, th3, dth


def ahat_coefficients(n):
    """Taylor coefficients of (x/2)/sinh(x/2) up to x^n."""
    s = [Fraction(0)] * (n + 1)
    for k in range(0, n + 1, 2):
        s[k] = Fraction(1, 2 ** k * factorial(k + 1))  # sinh(x/2)/(x/2)
    inv = [Fraction(0)] * (n + 1)
    inv[0] = Fraction(1)
    for m in range(1, n + 1):
        inv[m] = -sum(s[i] * inv[m - i] for i in range(1, m + 1))
    return inv


def sigma(n, k):
    return sum(d ** k for d in range(1, n + 1) if n % d == 0)


def eisenstein(weight, n):
    scale, k = {4: (240, 3), 6: (-504, 5)}[weight]
    return [Fraction(1)] + [Fraction(scale * sigma(m, k)) for m in range(1, n + 1)]


def cramer2(a, b, c, d, r1, r2):
    """Solve [[a, b], [c, d]] (x, y) = (r1, r2)."""
    det = Fraction(a * d - b * c)
    return (r1 * d - b * r2) / det, (a * r2 - r1 * c) / det
