"""The modular lambda function for Gamma(2), normalised so that lambda(inf) = 0,
lambda(0) = inf and lambda(1) = lambda(-1) = 1.

With q = exp(i pi tau), the classical function l(tau) = 16 q prod((1+q^2n)/(1+q^(2n-1)))^8
takes the values 0, 1, inf at inf, 0, 1.  Here lambda(z) = l(z + 1).  Evaluation carries
the pair (l, 1 - l) through the reduction to the standard domain, so 1 - lambda never
suffers cancellation near the cusps over 1.
"""

from __future__ import annotations

import warnings

import mpmath as mp


def _product_pair(tau):
    q = mp.exp(1j * mp.pi * tau)
    tiny = mp.mpf(2) ** (-mp.mp.prec - 10)
    p = mp.mpf(1)
    n = 1
    q2 = q * q
    odd = q  # q^(2n-1)
    even = q2  # q^(2n)
    while True:
        p *= ((1 + even) / (1 + odd)) ** 8
        if abs(odd) < tiny:
            break
        odd *= q2
        even *= q2
        n += 1
    val = 16 * q * p
    return val, 1 - val


def _pair(tau, depth: int = 0):
    if depth > 10_000:
        raise RuntimeError("reduction to the standard domain did not terminate")
    re = mp.re(tau)
    if abs(re) > 0.5:
        n = int(mp.nint(re))
        p, q = _pair(tau - n, depth + 1)
        # l(tau + 1) = l/(l - 1), 1 - l(tau + 1) = 1/(1 - l)
        return (-p / q, 1 / q) if n % 2 else (p, q)
    if abs(tau) < 1:
        # l(-1/tau) = 1 - l(tau)
        q, p = _pair(-1 / tau, depth + 1)
        return p, q
    return _product_pair(tau)


def lambda_pair(z, prec: int | None = None):
    """(lambda(z), 1 - lambda(z)) for Im z > 0."""
    z = mp.mpc(z)
    if mp.im(z) <= 0:
        raise ValueError("lambda needs Im z > 0")
    if prec is None:
        return _pair(z + 1)
    with mp.workprec(prec):
        return _pair(z + 1)


def modular_lambda(z, prec: int | None = None):
    z = mp.mpc(z)
    if 0 < mp.im(z) < 0.05:
        warnings.warn(f"lambda evaluated close to the real axis (Im z = {mp.nstr(mp.im(z), 3)})", stacklevel=2)
    return lambda_pair(z, prec)[0]


def lambda_theta(z):
    """Independent evaluation through Jacobi theta constants: -theta2^4/theta4^4 at nome e^(i pi z)."""
    q = mp.exp(1j * mp.pi * mp.mpc(z))
    return -(mp.jtheta(2, 0, q) ** 4) / mp.jtheta(4, 0, q) ** 4
