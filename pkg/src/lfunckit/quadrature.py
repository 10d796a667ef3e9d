"""Rigorous adaptive Gauss-Legendre quadrature over ball arithmetic.

Error model per panel [a,b]: if f is analytic and |f| <= M on the Bernstein
ellipse E_rho of the panel, its Chebyshev coefficients satisfy |c_k| <= 2M/rho^k,
and n-point Gauss-Legendre (exact on degree 2n-1) obeys

    |I(f) - Q_n(f)| <= 4 ||f - p_{2n-1}|| * (b-a)/2
                    <= 8 M rho^(1-2n)/(rho-1) * (b-a)/2.

M is obtained by evaluating f on a complex box enclosing E_rho; a sentinel
result (f not evaluable there) triggers bisection.  Nodes and weights are
certified once per (n, precision) by an interval Newton step on the Legendre
recurrence.
"""

from __future__ import annotations

import math

import gmpy2
from gmpy2 import mpfr
import numpy as np

from .rigor import RealBall, ComplexBall, get_precision, _RUP

__all__ = ["integrate", "gl_rule", "QuadratureError"]


class QuadratureError(Exception):
    pass


_rule_cache = {}


def _legendre_ball(n, x):
    """(P_n(x), P_{n-1}(x)) in ball arithmetic."""
    p0 = RealBall.exact(1)
    p1 = x
    for k in range(1, n):
        p2 = (x * p1 * RealBall(2 * k + 1) - p0 * RealBall(k)) / RealBall(k + 1)
        p0, p1 = p1, p2
    return p1, p0


def gl_rule(n):
    """Certified Gauss-Legendre nodes/weights on [-1,1] as RealBalls."""
    key = (n, get_precision())
    rule = _rule_cache.get(key)
    if rule is not None:
        return rule
    # The three-term recurrence amplifies interval radii by ~2.4 per step, so
    # build the rule with generous extra precision.
    from .rigor import local_precision
    with local_precision(get_precision() + 96 + 3 * n):
        rule = _build_rule(n)
    _rule_cache[key] = rule
    return rule


def _build_rule(n):
    xs64, _ = np.polynomial.legendre.leggauss(n)
    nodes, weights = [], []
    for x0 in xs64:
        x = mpfr(float(x0))
        # Newton polishing at full precision (plain floating point)
        for _ in range(8 + int(math.log2(get_precision() / 26 + 1))):
            pn, pn1 = _legendre_point(n, x)
            dp = (n * (pn1 - x * pn)) / (1 - x * x)
            step = pn / dp
            x = x - step
            if abs(step) < abs(x) * mpfr(2) ** (4 - get_precision()):
                break
        # interval Newton certification around the polished point
        r = mpfr(2) ** (-min(40, get_precision() // 2)) * (abs(x) + mpfr('0.1'))
        X = RealBall(x, r)
        pnb, pn1b = _legendre_ball(n, X)
        dpb = (pn1b - X * pnb) * RealBall(n) / (RealBall.exact(1) - X * X)
        pm, _ = _legendre_ball(n, RealBall(x))
        NX = RealBall(x) - pm / dpb
        if not (NX.lower() > X.lower() and NX.upper() < X.upper()):
            raise QuadratureError(f"node certification failed for n={n}")
        xb = NX
        pn1_at = _legendre_ball(n, xb)[1]
        dp_at = (pn1_at - xb * _legendre_ball(n, xb)[0]) * RealBall(n) / (RealBall.exact(1) - xb * xb)
        w = RealBall(2) / ((RealBall.exact(1) - xb * xb) * dp_at * dp_at)
        nodes.append(xb)
        weights.append(w)
    # sanity: weights must sum to 2
    total = RealBall.exact(0)
    for w in weights:
        total = total + w
    if not total.contains(2):
        raise QuadratureError("weight-sum sanity check failed")
    return (nodes, weights)


def _legendre_point(n, x):
    p0 = mpfr(1)
    p1 = x
    for k in range(1, n):
        p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
        p0, p1 = p1, p2
    return p1, p0


def integrate(f, a, b, tol, n=24, rho=4.0, max_panels=4000):
    """Certified enclosure of the integral of f over the real segment [a, b].

    f maps a ComplexBall to a ComplexBall and must be analytic on any box
    (around a subsegment, half-width ~1.06x the subsegment) where it returns a
    finite result; returning a sentinel makes the panel split instead.
    """
    a = RealBall(a) if not isinstance(a, RealBall) else a
    b = RealBall(b) if not isinstance(b, RealBall) else b
    nodes, weights = gl_rule(n)
    total = ComplexBall(RealBall.exact(0), RealBall.exact(0))
    length = float((b - a).mid)
    if length == 0:
        return total
    if length < 0:
        raise QuadratureError("reversed interval")
    work = [(a, b)]
    panels = 0
    ell_factor = RealBall((rho + 1.0 / rho) / 2)
    decay = 8.0 * rho ** (1 - 2 * n) / (rho - 1.0)
    while work:
        pa, pb = work.pop()
        panels += 1
        if panels > max_panels:
            raise QuadratureError("panel budget exhausted")
        mid = (pa + pb) * RealBall(0.5)
        half = (pb - pa) * RealBall(0.5)
        # sup bound on the enclosing box
        rbox = (half * ell_factor).upper()
        box = ComplexBall(RealBall(mid.mid, _RUP.add(mid.rad, rbox)),
                          RealBall(0, rbox))
        fM = f(box)
        plen = float(half.mid) * 2
        ptol = tol * plen / length
        if not fM.is_sentinel:
            M = fM.abs_upper()
            err = float(_RUP.mul(M, mpfr(decay * plen / 2)))
            if err <= ptol or plen < 1e-14 * length:
                acc = ComplexBall(RealBall.exact(0), RealBall.exact(0))
                for x, w in zip(nodes, weights):
                    val = f(ComplexBall(mid + half * x, RealBall.exact(0)))
                    if val.is_sentinel:
                        raise QuadratureError("integrand sentinel at node")
                    acc = acc + val * w
                total = total + (acc * half).add_error(err)
                continue
        if plen < 1e-15 * length:
            raise QuadratureError("cannot certify panel (singularity?)")
        work.append((pa, mid))
        work.append((mid, pb))
    return total
