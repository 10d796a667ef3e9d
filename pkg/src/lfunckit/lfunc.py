"""L-function data model and archimedean machinery.

A FunctionalDatum packages the functional-equation data (degree, conductor,
root number, gamma shifts, pole data, Ramanujan exponent).  On top of it this
module provides the gamma factor, analytic conductor, functional-equation
ratio chi(s), the zero-counting phase Phi(t) with a globally consistent
branch, and a certified integral of Phi over short windows.

Manifest files are JSON with exact rationals (or decimal strings) for all
numeric fields; see data/zeta.json for the schema in use.
"""

from __future__ import annotations

import json
import hashlib
from dataclasses import dataclass, field
from fractions import Fraction

from gmpy2 import mpfr

from .rigor import (RealBall, ComplexBall, Sign3, pi_ball, log_gamma,
                    get_precision)
from .quadrature import integrate

__all__ = [
    "FunctionalDatum", "PolePolynomial", "PhiBranch", "load_manifest",
    "gamma_r", "gamma_factor", "gamma_factor_bar", "analytic_conductor",
    "chi_factor", "phi", "phi_integral", "abs_gamma_half_line",
    "pole_polynomial_abs",
]


def _frac(s):
    if isinstance(s, Fraction):
        return s
    if isinstance(s, int):
        return Fraction(s)
    return Fraction(str(s))


@dataclass(frozen=True)
class FunctionalDatum:
    """Functional-equation data for one L-function."""
    label: str
    degree_r: int
    conductor_N: int
    epsilon_arg_pi: Fraction          # arg(epsilon) = epsilon_arg_pi * pi
    mu: tuple                         # tuple of (Fraction re, Fraction im)
    poles: tuple                      # tuple of (Fraction lambda_im, (re, im) residue of Lambda at 1+lambda)
    theta: Fraction
    coefficients: dict = field(default_factory=dict, hash=False)

    def __post_init__(self):
        r = self.degree_r
        if r < 1 or self.conductor_N < 1:
            raise ValueError("degree and conductor must be positive")
        if len(self.mu) != r:
            raise ValueError("need exactly r gamma shifts")
        if not (-Fraction(1, 2) < self.epsilon_arg_pi <= Fraction(1, 2)):
            raise ValueError("epsilon argument must lie in (-pi/2, pi/2]")
        if not (0 <= self.theta < Fraction(1, 2)):
            raise ValueError("theta must lie in [0, 1/2)")
        for re, im in self.mu:
            if re <= Fraction(-1, 2):
                raise ValueError("Re(mu_j) must exceed -1/2 (and -1/2 itself is rejected)")
            if re < -self.theta:
                raise ValueError("Re(mu_j) >= -theta violated")
        if len(self.poles) > r:
            raise ValueError("more poles than degree")
        mus = list(self.mu)
        for lam_im, _res in self.poles:
            # each lambda_k (purely imaginary) must equal -mu_j for some j
            target = (Fraction(0), -lam_im)
            if target not in mus:
                raise ValueError(f"pole lambda={lam_im}i has no matching -mu_j")
            mus.remove(target)

    # -- ball views -----------------------------------------------------------
    def mu_balls(self):
        return [ComplexBall(RealBall(re), RealBall(im)) for re, im in self.mu]

    def epsilon_ball(self):
        a = RealBall(self.epsilon_arg_pi) * pi_ball()
        return ComplexBall(a.cos(), a.sin())

    def pole_list(self):
        """[(lambda as ComplexBall, residue as ComplexBall)]"""
        out = []
        for lam_im, (rre, rim) in self.poles:
            out.append((ComplexBall(RealBall.exact(0), RealBall(lam_im)),
                        ComplexBall(RealBall(rre), RealBall(rim))))
        return out

    @property
    def m_poles(self):
        return len(self.poles)

    def max_abs_im_mu(self):
        return max((abs(im) for _re, im in self.mu), default=Fraction(0))

    def digest(self):
        payload = json.dumps({
            "label": self.label, "r": self.degree_r, "N": self.conductor_N,
            "eps": str(self.epsilon_arg_pi),
            "mu": [[str(a), str(b)] for a, b in self.mu],
            "poles": [[str(l), str(a), str(b)] for l, (a, b) in self.poles],
            "theta": str(self.theta)}, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


class PolePolynomial:
    """P(s) = prod_k (s - lambda_k); P(s) P(s-1) Lambda(s) is entire."""

    def __init__(self, datum):
        self.lambdas = [lam for lam, _ in datum.pole_list()]

    def eval(self, s):
        out = ComplexBall(RealBall.exact(1))
        for lam in self.lambdas:
            out = out * (s - lam)
        return out

    @property
    def degree(self):
        return len(self.lambdas)


@dataclass
class PhiBranch:
    """Value of the phase Phi at ordinate t, with branch bookkeeping.

    The branch is fixed by the principal (analytic on the right half-plane)
    log Gamma; since every lgamma argument here has positive real part, no
    continuation walking is ever needed, which the anchor field records.
    """
    t: object
    phi: RealBall
    winding_anchor: str = "analytic-right-half-plane"


def load_manifest(path_or_dict):
    if isinstance(path_or_dict, dict):
        d = path_or_dict
    else:
        with open(path_or_dict) as f:
            d = json.load(f)
    eps = d.get("epsilon", {"arg_pi": "0"})
    return FunctionalDatum(
        label=d.get("label", "L"),
        degree_r=int(d["degree"]),
        conductor_N=int(d["conductor"]),
        epsilon_arg_pi=_frac(eps["arg_pi"]),
        mu=tuple((_frac(m[0]), _frac(m[1])) for m in d["mu"]),
        poles=tuple((_frac(p["lambda_im"]),
                     (_frac(p["residue"][0]), _frac(p["residue"][1])))
                    for p in d.get("poles", [])),
        theta=_frac(d.get("theta", 0)),
        coefficients=d.get("coefficients", {}),
    )


# -- gamma machinery ---------------------------------------------------------------

def gamma_r(z):
    """Gamma_R(z) = pi^(-z/2) Gamma(z/2), certified, poles -> sentinel.

    For Re(z) <= 0 the recurrence Gamma(w) = Gamma(w+k)/prod(w+j) shifts into
    the right half-plane; an enclosure containing a pole yields the sentinel.
    """
    z = z if isinstance(z, ComplexBall) else ComplexBall(RealBall(z))
    w = z * RealBall(Fraction(1, 2))
    shift = 0
    wl = float(w.re.lower())
    if wl <= 0.25:
        shift = int(1.25 - wl) + 1
    denom = ComplexBall(RealBall.exact(1))
    for j in range(shift):
        f = w + RealBall(j)
        if f.abs2().contains_zero():
            return ComplexBall.sentinel()
        denom = denom * f
    lg = log_gamma(w + RealBall(shift))
    if lg.is_sentinel:
        return ComplexBall.sentinel()
    pref = (-(w * pi_ball().log())).exp()
    return pref * lg.exp() / denom


def gamma_factor(datum, s):
    """gamma(s) = epsilon N^((s-1/2)/2) prod_j Gamma_R(s + mu_j)."""
    s = s if isinstance(s, ComplexBall) else ComplexBall(RealBall(s))
    half = RealBall(Fraction(1, 2))
    out = datum.epsilon_ball()
    if datum.conductor_N > 1:
        lnN = RealBall(datum.conductor_N).log()
        out = out * ((s - ComplexBall(half)) * (lnN * half)).exp()
    for mu in datum.mu_balls():
        g = gamma_r(s + mu)
        if g.is_sentinel:
            return ComplexBall.sentinel()
        out = out * g
    return out


def gamma_factor_bar(datum, s):
    """gamma-bar(s) = conj(gamma(conj(s)))."""
    return gamma_factor(datum, s.conj()).conj()


def analytic_conductor(datum, s):
    """Q(s) = N prod_j (s + mu_j) / (2 pi);  gamma(s+2) = Q(s) gamma(s)."""
    s = s if isinstance(s, ComplexBall) else ComplexBall(RealBall(s))
    two_pi = pi_ball() * RealBall(2)
    out = ComplexBall(RealBall(datum.conductor_N))
    for mu in datum.mu_balls():
        out = out * ((s + mu) / ComplexBall(two_pi))
    return out


def chi_factor(datum, s):
    """chi(s) = gamma-bar(1-s)/gamma(s), so that L(s) = chi(s) L-bar(1-s)."""
    s = s if isinstance(s, ComplexBall) else ComplexBall(RealBall(s))
    g = gamma_factor(datum, s)
    if g.is_sentinel or g.abs2().contains_zero():
        return ComplexBall.sentinel()
    gb = gamma_factor_bar(datum, ComplexBall(RealBall.exact(1)) - s)
    if gb.is_sentinel:
        return ComplexBall.sentinel()
    return gb / g


def pole_polynomial_abs(datum, s):
    """|P(s+1)^2 P(s-2) / (P(s)^2 P(s-1))| as a RealBall (1 if entire)."""
    P = PolePolynomial(datum)
    if P.degree == 0:
        return RealBall.exact(1)
    one = ComplexBall(RealBall.exact(1))
    num = P.eval(s + one) ** 2 * P.eval(s - one - one)
    den = P.eval(s) ** 2 * P.eval(s - one)
    out = num / den
    if out.is_sentinel:
        return RealBall.sentinel()
    return abs(out)


# -- the phase Phi -----------------------------------------------------------------

def _lgamma_halfarg(datum, t):
    """[lgamma((1/2 + i t + mu_j)/2) for j], t a RealBall or ComplexBall."""
    half = RealBall(Fraction(1, 2))
    quarter = RealBall(Fraction(1, 4))
    out = []
    tb = t if isinstance(t, ComplexBall) else ComplexBall(t)
    it_half = tb.mul_i() * half
    for mu in datum.mu_balls():
        z = ComplexBall(quarter) + mu * half + it_half
        out.append(log_gamma(z))
    return out


def phi(datum, t):
    """Certified Phi(t): the archimedean phase fixed by the principal branch.

    Phi(t) = (1/pi) [arg eps + (log N / 2) t - (log pi / 2)(r t + Im sum mu_j)
                      + sum_j Im log Gamma((1/2 + i t + mu_j)/2)].
    """
    t = t if isinstance(t, RealBall) else RealBall(t)
    pi = pi_ball()
    acc = RealBall(datum.epsilon_arg_pi) * pi
    if datum.conductor_N > 1:
        acc = acc + RealBall(datum.conductor_N).log() * t * RealBall(Fraction(1, 2))
    im_mu_sum = RealBall(sum((im for _re, im in datum.mu), Fraction(0)))
    acc = acc - pi.log() * RealBall(Fraction(1, 2)) * (RealBall(datum.degree_r) * t + im_mu_sum)
    for lg in _lgamma_halfarg(datum, t):
        if lg.is_sentinel:
            return PhiBranch(t, RealBall.sentinel())
        acc = acc + lg.im
    return PhiBranch(t, acc / pi)


def phi_integral(datum, t0, h, side="right", tol=None):
    """Certified enclosure of the integral of Phi over [t0, t0+h] (right)
    or [t0-h, t0] (left), h > 0.

    Elementary terms integrate in closed form.  Each lgamma term is split as
    lgamma(z) = lgamma(z + K) - sum_{j<K} log(z + j); the log parts have
    elementary antiderivatives and lgamma(z+K) is integrated by certified
    Gauss-Legendre on wide panels (the +K shift keeps the integrand analytic
    on the panel boxes).
    """
    t0 = t0 if isinstance(t0, RealBall) else RealBall(t0)
    h = h if isinstance(h, RealBall) else RealBall(h)
    if not h.lower() > 0:
        return RealBall.sentinel() if float(h.mid) != 0 else RealBall.exact(0)
    if side == "right":
        a, b = t0, t0 + h
    elif side == "left":
        a, b = t0 - h, t0
    else:
        raise ValueError("side must be left or right")
    if tol is None:
        tol = float(mpfr(2) ** (-int(0.7 * get_precision())))
    pi = pi_ball()
    half = RealBall(Fraction(1, 2))
    # elementary parts: integral of (arg eps) + (logN/2) t - (logpi/2)(r t + Im sum mu)
    acc = RealBall(datum.epsilon_arg_pi) * pi * h
    tsq = (b * b - a * a) * half
    if datum.conductor_N > 1:
        acc = acc + RealBall(datum.conductor_N).log() * tsq * half
    im_mu_sum = RealBall(sum((im for _re, im in datum.mu), Fraction(0)))
    acc = acc - pi.log() * half * (RealBall(datum.degree_r) * tsq + im_mu_sum * h)
    # lgamma terms
    K = int(float(h.upper())) + 2
    quarter = RealBall(Fraction(1, 4))
    for mu in datum.mu_balls():
        c = ComplexBall(quarter) + mu * half          # z(t) = c + i t / 2
        # closed-form: integral of log(c + j + i t/2) dt = -2i [u log u - u]
        for j in range(K):
            cj = c + RealBall(j)
            Fb = _log_antideriv(cj, b)
            Fa = _log_antideriv(cj, a)
            if Fb is None or Fa is None:
                return RealBall.sentinel()
            acc = acc - (Fb - Fa).im
        cK = c + RealBall(K)

        def integrand(tz, cK=cK):
            return log_gamma(cK + tz.mul_i() * half)

        val = integrate(integrand, a, b, tol)
        acc = acc + val.im
    return acc / pi


def _log_antideriv(c, t):
    """Antiderivative of t -> log(c + i t/2): returns -2i (u log u - u), u = c + it/2."""
    u = c + ComplexBall(RealBall.exact(0), t * RealBall(Fraction(1, 2)))
    lg = u.log()
    if lg.is_sentinel:
        return None
    return (u * lg - u).mul_i() * RealBall(-2)


def abs_gamma_half_line(datum, t):
    """|gamma(1/2 + i t)| as a RealBall (N^(it/2) and epsilon are unimodular)."""
    t = t if isinstance(t, RealBall) else RealBall(t)
    acc = RealBall.exact(0)
    for lg in _lgamma_halfarg(datum, t):
        if lg.is_sentinel:
            return RealBall.sentinel()
        acc = acc + lg.re
    quarter = RealBall(Fraction(1, 4))
    re_mu_sum = RealBall(sum((re for re, _im in datum.mu), Fraction(0)))
    # subtract Re((1/2 + it + mu)/2) log pi summed over j
    acc = acc - pi_ball().log() * (RealBall(datum.degree_r) * quarter +
                                   re_mu_sum * RealBall(Fraction(1, 2)))
    return acc.exp()
