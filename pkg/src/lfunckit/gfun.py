"""The G-function engine.

G(u; eta, {mu_j}) is the inverse-Mellin kernel

    G(u) = (1/2 pi i) int_{Re s = 2} e^{(u + i pi r eta/4)(1/2 - s)}
                                       prod_j Gamma_R(s + mu_j) ds.

Shifting the contour left turns G into a sum of residues over the poles of the
integrand, organized into "ladders": one ladder per parity class of the mu_j,
with rungs rho, rho-2, rho-4, ...  Writing w = u + i pi r eta / 4, the polar
part of g at rung rho is  e^{w(1/2-rho)} sum_i C_i(w) s^{-i}  where the C_i
are polynomials in w of degree < order; crucially the C_i do not depend on u,
so a single ladder serves every evaluation point and yields all u-derivatives
in closed form.  Rung-to-rung the C_i obey an exact finite convolution
recurrence; once the contraction hypothesis

    (2 pi)^r e^{2u} < (1/2) prod_j (|2 - rho - mu_j| - 1)

holds, the residue tail below the current rung is bounded by the rung's own
largest polar coefficient, which certifies truncation.

Evaluation precision is escalated automatically: for large u the residue sum
cancels catastrophically (by roughly exp(max-term/result) ~ e^{2X}), and the
ladder must be carried with correspondingly more bits.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import struct
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .rigor import (RealBall, ComplexBall, pi_ball, euler_ball, zeta_real,
                    log_gamma, get_precision, local_precision, _RUP)

__all__ = [
    "GParams", "PolarPart", "TaylorCache", "ContractionNotReached",
    "ToleranceUnreachable", "HypothesisFailed", "gamma_r_series",
    "gamma_r_series_at", "polar_shift", "g_eval", "g_derivative",
    "derivative_combination_eval", "build_taylor_cache", "g_asymptotic_bound",
    "derivative_tail_bound", "save_cache", "load_cache", "cache_path",
]


class ContractionNotReached(Exception):
    pass


class ToleranceUnreachable(Exception):
    pass


class HypothesisFailed(Exception):
    pass


@dataclass(frozen=True)
class GParams:
    """Parameters of G(u; eta, {mu_j}).  mu entries are exact (Fraction re, im)."""
    mu: tuple
    eta: Fraction

    def __post_init__(self):
        if not (abs(self.eta) < 1):
            raise ValueError("eta must lie in (-1, 1)")
        for re, im in self.mu:
            if im != 0 or re != int(re):
                raise NotImplementedError(
                    "residue ladders are implemented for integer gamma shifts")

    @property
    def r(self):
        return len(self.mu)

    def mu_ints(self):
        return [int(re) for re, _ in self.mu]

    # -- derived quantities of the asymptotic lemma --------------------------
    def delta(self):
        return pi_ball() * RealBall(Fraction(1, 2)) * RealBall(1 - abs(self.eta))

    def mu_bar(self):
        s = sum(Fraction(re) for re, _ in self.mu)
        return Fraction(-1, 2) + Fraction(1, self.r) * (1 + s)

    def nu(self):
        return [Fraction(re - 1, 2) + Fraction(1, 2 * self.r) for re, _ in self.mu]

    def k_const(self):
        r = self.r
        d = self.delta()
        inner = RealBall(Fraction(2 ** (r + 1), r)) * (d * RealBall(r - 1)).exp() / d
        return RealBall(2) * inner.sqrt()

    def x_of(self, u):
        u = u if isinstance(u, RealBall) else RealBall(u)
        r = self.r
        d = self.delta()
        return pi_ball() * RealBall(r) * d * (-d).exp() * (u * RealBall(Fraction(2, r))).exp()

    def w_of(self, u):
        """w = u + i pi r eta / 4 as a ComplexBall (u may be complex)."""
        shift = pi_ball() * RealBall(Fraction(self.r, 4) * self.eta)
        ub = u if isinstance(u, ComplexBall) else ComplexBall(RealBall(u))
        return ub + ComplexBall(RealBall.exact(0), shift)

    def digest(self):
        payload = json.dumps({"mu": [[str(a), str(b)] for a, b in self.mu],
                              "eta": str(self.eta)}, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass
class PolarPart:
    """Concrete polar data of g at a pole: g(s+rho) ~ sum c_i s^-i."""
    rho: complex
    coeffs: list          # c_1 .. c_n as ComplexBall
    order: int


# -- power series helpers (coefficient lists, ascending) ---------------------------

def _series_mul(a, b, L):
    out = [RealBall.exact(0)] * L
    for i, ai in enumerate(a[:L]):
        for j, bj in enumerate(b[:L - i]):
            out[i + j] = out[i + j] + ai * bj
    return out


def _series_exp(a, L):
    """exp of a series with a[0] = 0."""
    out = [RealBall.exact(1)] + [RealBall.exact(0)] * (L - 1)
    for m in range(1, L):
        s = RealBall.exact(0)
        for j in range(1, m + 1):
            if j < len(a):
                s = s + RealBall(j) * a[j] * out[m - j]
        out[m] = s / RealBall(m)
    return out


def _series_inv(a, L):
    assert not a[0].contains_zero()
    out = [RealBall.exact(1) / a[0]] + [RealBall.exact(0)] * (L - 1)
    for m in range(1, L):
        s = RealBall.exact(0)
        for j in range(1, m + 1):
            if j < len(a):
                s = s + a[j] * out[m - j]
        out[m] = -s / a[0]
    return out


def _loggamma_1plus_series(L):
    """log Gamma(1+z) = -gamma z + sum_{j>=2} (-1)^j zeta(j) z^j / j."""
    out = [RealBall.exact(0), -euler_ball()]
    for j in range(2, L):
        zj = zeta_real(RealBall.exact(j))
        out.append(zj * RealBall(Fraction((-1) ** j, j)))
    return out[:L] + [RealBall.exact(0)] * max(0, L - len(out))


def _gamma_1plus_series(L):
    return _series_exp(_loggamma_1plus_series(L), L)


def _gamma_half_plus_series(L):
    """Gamma(1/2+z) via duplication: sqrt(pi) 2^(-2z) Gamma(1+2z)/Gamma(1+z)."""
    g1 = _gamma_1plus_series(L)
    g2 = [c * RealBall(2 ** i) for i, c in enumerate(g1)]   # Gamma(1+2z)
    ln2 = RealBall(2).log()
    two_pow = _series_exp([RealBall.exact(0)] + [-ln2 * RealBall(2)] + [RealBall.exact(0)] * (L - 2), L)
    num = _series_mul(g2, two_pow, L)
    out = _series_mul(num, _series_inv(g1, L), L)
    sq = pi_ball().sqrt()
    return [c * sq for c in out]


def gamma_r_series_at(n0, order):
    """Series of Gamma_R(s) = pi^(-s/2) Gamma(s/2) about the integer s = n0.

    Returns (is_pole, coeffs): for even n0 <= 0 a simple pole, with coeffs
    [c_-1, c_0, ..., c_{order-1}] of the Laurent expansion in sigma = s - n0;
    otherwise the Taylor coefficients [c_0, ..., c_{order-1}].
    """
    L = order + 1
    half = Fraction(1, 2)
    # Gamma(n0/2 + z) with z = sigma/2: build series in z first, then rescale.
    if n0 % 2 == 0:
        m = n0 // 2
        base = _gamma_1plus_series(L)      # Gamma(1+z)
        is_pole = m <= 0
        # Gamma(m+z) = Gamma(1+z) * prod or / prod
        num = base
        if m >= 2:
            for i in range(1, m):
                num = _series_mul(num, [RealBall(i), RealBall.exact(1)], L)
        denom_roots = list(range(m, 1))    # i = m..0 for m <= 0
        if m <= 0:
            # Gamma(m+z) = Gamma(1+z) / [ (m+z)(m+1+z)...(z) ]
            for i in range(m, 1):
                if i == 0:
                    continue               # the z factor is the pole; divide later
                num = _series_mul(num, _series_inv([RealBall(i), RealBall.exact(1)], L), L)
            # now num = z * Gamma(m+z) series (analytic, nonzero at 0)
    else:
        m = (n0 - 1) // 2
        base = _gamma_half_plus_series(L)  # Gamma(1/2+z)
        is_pole = False
        num = base
        if m >= 1:
            for i in range(1, m + 1):
                num = _series_mul(num, [RealBall(Fraction(2 * i - 1, 2)), RealBall.exact(1)], L)
        elif m <= -1:
            for i in range(m + 1, 1):
                num = _series_mul(num, _series_inv([RealBall(Fraction(2 * i - 1, 2)), RealBall.exact(1)], L), L)
    # rescale z -> sigma/2
    num = [c * RealBall(Fraction(1, 2 ** i)) for i, c in enumerate(num)]
    # pi^(-s/2) = pi^(-n0/2) exp(-sigma log(pi)/2)
    lnpi = pi_ball().log()
    pref = _series_exp([RealBall.exact(0), -lnpi * RealBall(half)] + [RealBall.exact(0)] * (L - 2), L)
    if n0 % 2 == 0:
        pi_pow = pi_ball() ** (-n0 // 2) if n0 <= 0 else RealBall.exact(1) / pi_ball() ** (n0 // 2)
    else:
        pi_pow = (lnpi * RealBall(Fraction(-n0, 2))).exp()
    out = _series_mul(num, pref, L)
    out = [c * pi_pow for c in out]
    if is_pole:
        # out currently holds series of sigma * Gamma_R(n0 + sigma) after the
        # z -> sigma/2 rescale... the pole factor was z = sigma/2, so multiply
        # by the leftover factor 2 (1/z = 2/sigma).
        out = [c * RealBall(2) for c in out]
        return True, out[:order + 1]
    return False, out[:order]


def gamma_r_series(k, parity, order=8):
    """The tabulated expansions of Gamma_R about s = -2k (parity "even",
    simple pole) or s = 1-2k (parity "odd", regular).

    Returns the same layout as gamma_r_series_at.
    """
    if parity == "even":
        return gamma_r_series_at(-2 * k, order)
    if parity == "odd":
        return gamma_r_series_at(1 - 2 * k, order)
    raise ValueError("parity must be 'even' or 'odd'")


# -- the residue ladder -------------------------------------------------------------

class _Rung:
    __slots__ = ("rho", "order", "cpolys", "join")

    def __init__(self, rho, order, cpolys, join):
        self.rho = rho              # exact int
        self.order = order
        self.cpolys = cpolys        # list of `order` w-polynomials (coeff lists)
        self.join = join


class _Ladder:
    """All rungs of one parity class, coefficients as polynomials in w."""

    def __init__(self, params, parity_members, prec):
        self.params = params
        self.members = sorted(parity_members)    # integer mu values in the class
        self.others = [m for m in params.mu_ints() if (m - parity_members[0]) % 2 != 0]
        self.prec = prec
        self.rungs = []
        self.max_order = len(self.members)

    def rho_at(self, t):
        return -self.members[0] - 2 * t

    def order_at(self, rho):
        return sum(1 for m in self.members if m + rho <= 0)

    def extend(self, depth):
        with local_precision(self.prec):
            while len(self.rungs) < depth:
                t = len(self.rungs)
                rho = self.rho_at(t)
                n = self.order_at(rho)
                prev = self.rungs[-1] if self.rungs else None
                if prev is None or n > prev.order:
                    self.rungs.append(self._direct_rung(rho, n))
                else:
                    self.rungs.append(self._recurrence_rung(prev, rho))

    def _direct_rung(self, rho, n):
        """Assemble the polar data at a join rung by series multiplication."""
        L = n
        # product over all r factors of the sigma-series of Gamma_R(s + mu_j)
        # about s = rho, with each pole contributing its analytic part
        prod = [RealBall.exact(1)] + [RealBall.exact(0)] * (L - 1)
        npoles = 0
        for m in self.members + self.others:
            pt = rho + m
            is_pole, ser = gamma_r_series_at(pt, L)
            if is_pole:
                npoles += 1
                prod = _series_mul(prod, ser, L)
            else:
                prod = _series_mul(prod, ser, L)
        assert npoles == n, (npoles, n)
        # multiply by e^{-w sigma}: coefficients (-w)^b / b! are w-polynomials
        # result coefficient of sigma^t: sum_{a+b=t} prod_a * (-1)^b w^b / b!
        cpolys = []
        zero = ComplexBall(RealBall.exact(0))
        for i in range(1, n + 1):
            t_idx = n - i
            poly = [zero] * (t_idx + 1)
            for b in range(t_idx + 1):
                a = t_idx - b
                coef = prod[a] * RealBall(Fraction((-1) ** b, math.factorial(b)))
                poly[b] = ComplexBall(coef)
            cpolys.append(poly)
        return _Rung(rho, n, cpolys, True)

    def _recurrence_rung(self, prev, rho):
        """Exact polar-shift: data at rho = prev.rho - 2 from data at prev.rho."""
        n = prev.order
        params = self.params
        r = params.r
        # scalar (-2 pi)^r / prod(2 - prev.rho - mu_j), the e^{2w} being
        # absorbed into the factored exponential
        mus = params.mu_ints()
        denom = RealBall.exact(1)
        for m in mus:
            denom = denom * RealBall(2 - prev.rho - m)
        scal = (-(pi_ball() * RealBall(2))) ** r / denom
        polys = [list(p) for p in prev.cpolys]
        # apply r sequential convolutions with x_j = 1/(2 - prev.rho - mu_j)
        for m in mus:
            x = RealBall.exact(1) / RealBall(2 - prev.rho - m)
            newpolys = []
            for i in range(n):
                acc = None
                xp = RealBall.exact(1)
                for k in range(n - 1 - i + 1):
                    term = [c * xp for c in polys[i + k]]
                    acc = term if acc is None else _wpoly_add(acc, term)
                    xp = xp * x
                newpolys.append(acc)
            polys = newpolys
        polys = [[c * scal for c in p] for p in polys]
        return _Rung(rho, n, polys, False)


def _wpoly_add(a, b):
    L = max(len(a), len(b))
    zero = ComplexBall(RealBall.exact(0))
    out = []
    for i in range(L):
        x = a[i] if i < len(a) else zero
        y = b[i] if i < len(b) else zero
        out.append(x + y)
    return out


def _wpoly_eval(poly, w):
    acc = ComplexBall(RealBall.exact(0))
    for c in reversed(poly):
        acc = acc * w + c
    return acc


def _wpoly_abs_upper(poly, wabs):
    """Upper bound for |poly| on |w| <= wabs (mpfr, rounded up)."""
    acc = mpfr(0, 32)
    wp = mpfr(1, 32)
    for c in poly:
        acc = _RUP.add(acc, _RUP.mul(c.abs_upper(), wp))
        wp = _RUP.mul(wp, wabs)
    return acc


class _LadderSet:
    """Ladders for all parity classes of a GParams, at a given precision."""

    def __init__(self, params, prec):
        self.params = params
        self.prec = prec
        classes = {}
        for m in params.mu_ints():
            classes.setdefault(m % 2, []).append(m)
        self.ladders = [_Ladder(params, v, prec) for v in classes.values()]

    def contraction_ok(self, rho, u_upper):
        """(2 pi)^r e^{2u} < 1/2 prod(|2 - rho - mu_j| - 1), directed."""
        lhs = _RUP.mul(_RUP.exp(_RUP.mul(mpfr(2), mpfr(u_upper))),
                       _RUP.exp(_RUP.mul(mpfr(self.params.r),
                                         mpfr('1.8378770664093456'))))  # > log(2pi)
        rhs = mpfr(0.5, 32)
        for m in self.params.mu_ints():
            f = abs(2 - rho - m) - 1
            if f <= 0:
                return False
            rhs = gmpy2.context(precision=32, round=gmpy2.RoundDown).mul(rhs, mpfr(f))
        return lhs < rhs


_ladder_cache = {}


def _get_ladders(params, prec):
    tier = 64 * ((prec + 63) // 64)
    key = (params.digest(), tier)
    ls = _ladder_cache.get(key)
    if ls is None:
        ls = _LadderSet(params, tier)
        _ladder_cache[key] = ls
    return ls


def _extra_bits(params, u_float):
    """Cancellation allowance for the residue sum at u."""
    d = math.pi / 2 * (1 - abs(float(params.eta)))
    X = math.pi * params.r * d * math.exp(-d) * math.exp(2 * u_float / params.r)
    return int(1.5 * 1.443 * X * math.exp(d) / d) + 64


def g_eval(u, params, tol=None, _derivs=None, u_pi_mult=None):
    """Certified enclosure of G(u; eta, {mu_j}) by the residue ladder.

    With `_derivs=K`, returns the list [G(u), G'(u)/1!, ..., G^(K-1)(u)/(K-1)!]
    (truncation tail folded into every entry's radius).  When u is an exact
    rational multiple of pi, pass it as `u_pi_mult` so the enclosure of u can
    be reconstructed at the (escalated) working precision.
    """
    if not isinstance(params, GParams):
        raise TypeError("params must be GParams")
    if u_pi_mult is not None:
        uf = math.pi * float(u_pi_mult)
    else:
        uf = float(u.mid) if isinstance(u, RealBall) else float(u)
    if tol is None:
        tol = float(mpfr(2) ** (-int(0.8 * get_precision())))
    base_prec = get_precision()
    work = base_prec + _extra_bits(params, uf)
    K = _derivs or 1
    for attempt in range(4):
        try:
            vals, ok = _g_eval_at(u, params, tol, K, work, u_pi_mult)
        except ToleranceUnreachable:
            raise
        if ok:
            return vals if _derivs else vals[0]
        work = int(work * 1.6) + 64
    raise ToleranceUnreachable(f"could not certify G({uf}) to {tol}")


def _g_eval_at(u, params, tol, K, work_prec, u_pi_mult=None):
    ladders = _get_ladders(params, work_prec)
    with local_precision(work_prec):
        if u_pi_mult is not None:
            ub = pi_ball() * RealBall(Fraction(u_pi_mult))
        else:
            ub = u if isinstance(u, RealBall) else RealBall(u)
        w = params.w_of(ub)
        u_up = float(ub.upper())
        wabs1 = _RUP.add(_RUP.add(abs(w.re.mid), _RUP.add(abs(w.im.mid), w.rad_upper())),
                         mpfr(1))
        out = [ComplexBall(RealBall.exact(0)) for _ in range(K)]
        for lad in ladders.ladders:
            t = 0
            tail_done = False
            while not tail_done:
                if t >= 6000:
                    raise ToleranceUnreachable("ladder depth exhausted")
                lad.extend(t + 1)
                rung = lad.rungs[t]
                c = RealBall(Fraction(1, 2)) - RealBall(rung.rho)
                E = (w * c).exp()
                poly = rung.cpolys[0]
                deg = len(poly) - 1
                dls = []
                for l in range(min(deg, K - 1) + 1):
                    dls.append(_wpoly_eval([poly[j] * RealBall(math.comb(j, l))
                                            for j in range(l, len(poly))], w))
                cpow = [ComplexBall(RealBall.exact(1))]
                for _ in range(K - 1):
                    cpow.append(cpow[-1] * c)
                for k in range(K):
                    acc = ComplexBall(RealBall.exact(0))
                    for l in range(min(deg, k) + 1):
                        acc = acc + dls[l] * cpow[k - l] * RealBall(Fraction(1, math.factorial(k - l)))
                    out[k] = out[k] + E * acc
                # stopping: tail below this rung bounded (for all derivative
                # orders) by the rung's polar sup on the radius-1 circle
                # around u, via Cauchy; needs the contraction hypothesis at
                # Re u + 1.
                if ladders.contraction_ok(rung.rho, u_up + 1.0):
                    eshift = ((ub + RealBall.exact(1)) * c).exp()
                    Mj = mpfr(0, 32)
                    for p in rung.cpolys:
                        Mj = max(Mj, _wpoly_abs_upper(p, wabs1))
                    Mj = _RUP.mul(Mj, eshift.upper())
                    if Mj < tol:
                        out = [v.add_error(Mj) for v in out]
                        tail_done = True
                t += 1
        ok = all(float(v.rad_upper()) <= tol * 16 for v in out)
    return out, ok


def polar_shift(part, u, params, require_contraction=True):
    """Map polar data at rho to polar data at rho - 2 (exact convolution).

    With require_contraction, raises ContractionNotReached unless
    |2 - rho - mu_j| > 1 for all j (the tail lemma's regime).
    """
    rho = part.rho
    mus = params.mu_ints()
    for m in mus:
        if abs(2 - rho - m) == 0:
            raise ContractionNotReached("new pole joins at the target rung")
        if require_contraction and abs(2 - rho - m) <= 1:
            raise ContractionNotReached(f"|2 - rho - mu| <= 1 at mu={m}")
    r = params.r
    denom = RealBall.exact(1)
    for m in mus:
        denom = denom * RealBall(2 - rho - m)
    w2 = params.w_of(RealBall(u)) * RealBall(2)
    scal = ComplexBall((-(pi_ball() * RealBall(2))) ** r / denom) * w2.exp()
    coeffs = list(part.coeffs)
    n = part.order
    for m in mus:
        x = RealBall.exact(1) / RealBall(2 - rho - m)
        newc = []
        for i in range(n):
            acc = ComplexBall(RealBall.exact(0))
            xp = RealBall.exact(1)
            for k in range(n - i):
                acc = acc + coeffs[i + k] * xp
                xp = xp * x
            newc.append(acc)
        coeffs = newc
    coeffs = [c * scal for c in coeffs]
    return PolarPart(rho - 2, coeffs, n)


def g_derivative(params, order=1):
    """G^(order) as an exact combination of G with shifted mu-multisets.

    Returns [(coeff_fraction, pi_power, mu_tuple)] meaning
    G^(order)(u) = sum coeff * pi^pi_power * G(u; eta, mu_tuple).
    """
    if order < 0:
        raise ValueError("order >= 0")
    terms = {(params.mu): (Fraction(1), 0)}
    for _ in range(order):
        new = {}
        for mu, (cf, pp) in terms.items():
            m0 = mu[0]
            # G'(u; mu) = (mu_1 + 1/2) G(u; mu) - 2 pi G(u; mu with mu_1 + 2)
            key1 = mu
            c1 = cf * (Fraction(m0[0]) + Fraction(1, 2))
            _acc(new, key1, c1, pp)
            mu2 = ((m0[0] + 2, m0[1]),) + mu[1:]
            _acc(new, tuple(sorted(mu2)), cf * Fraction(-2), pp + 1)
        terms = new
    return [(cf, pp, mu) for mu, (cf, pp) in terms.items()]


def _acc(d, key, cf, pp):
    if key in d:
        c0, p0 = d[key]
        if p0 != pp:
            # same mu multiset reached with different pi powers: keep separate
            # by rational-in-pi bookkeeping; fold via distinct dict key
            d[(key, pp)] = (d.get((key, pp), (Fraction(0), pp))[0] + cf, pp)
            return
        d[key] = (c0 + cf, pp)
    else:
        d[key] = (cf, pp)


def derivative_combination_eval(params, order, u, tol=None):
    """Evaluate G^(order)(u) via the shifted-multiset combination."""
    total = ComplexBall(RealBall.exact(0))
    for cf, pp, mu in g_derivative(params, order):
        sub = GParams(tuple((Fraction(a), Fraction(b)) for a, b in mu), params.eta)
        val = g_eval(u, sub, tol=tol)
        total = total + val * (RealBall(cf) * pi_ball() ** pp)
    return total


# -- asymptotic bound ----------------------------------------------------------------

def g_asymptotic_bound(u, params):
    """Certified upper bound for |G(u)| (the contour-shift lemma); requires
    X = pi r delta e^-delta e^(2u/r) >= r."""
    u = u if isinstance(u, RealBall) else RealBall(u)
    X = params.x_of(u)
    if not (X.lower() >= params.r):
        raise HypothesisFailed(f"X = {float(X.mid):.3g} < r = {params.r}")
    out = params.k_const() * (u * RealBall(params.mu_bar())).exp() * (-X).exp()
    for nu in params.nu():
        base = RealBall.exact(1) + RealBall(params.r) * RealBall(nu) / X
        out = out * (base.log() * RealBall(nu)).exp()
    return out


# -- uniform derivative bound (for Taylor remainders) --------------------------------

def _log_gamma_abs_upper_halfline(params, t_iv):
    """Upper bound of log prod_j |Gamma_R(1/2 + i t + mu_j)| for t in a ball."""
    acc = RealBall.exact(0)
    half = RealBall(Fraction(1, 2))
    quarter = RealBall(Fraction(1, 4))
    for m in params.mu_ints():
        z = ComplexBall(quarter + RealBall(Fraction(m, 2)), t_iv * half)
        lg = log_gamma(z)
        if lg.is_sentinel:
            return None
        acc = acc + lg.re - (quarter + RealBall(Fraction(m, 2))) * pi_ball().log()
    return acc


def _log_integrand_parts(params, K, t_point, t_iv):
    """(L(t0) upper, |L'| upper over t_iv) for the combined log-integrand
    L(t) = K log t + (pi r eta/4) t + log prod |Gamma_R(1/2+it+mu_j)|."""
    from .rigor import digamma
    half = RealBall(Fraction(1, 2))
    quarter = RealBall(Fraction(1, 4))
    tilt = pi_ball() * RealBall(Fraction(params.r, 4) * params.eta)
    t0b = RealBall(t_point)
    L0 = abs(t0b).log() * RealBall(K) + tilt * t0b
    for m in params.mu_ints():
        z0 = ComplexBall(quarter + RealBall(Fraction(m, 2)), t0b * half)
        lg = log_gamma(z0)
        if lg.is_sentinel:
            return None, None
        L0 = L0 + lg.re - (quarter + RealBall(Fraction(m, 2))) * pi_ball().log()
    Lp = RealBall(K) / t_iv + tilt
    for m in params.mu_ints():
        z = ComplexBall(quarter + RealBall(Fraction(m, 2)), t_iv * half)
        ps = digamma(z)
        if ps.is_sentinel:
            return None, None
        Lp = Lp - ps.im * half
    return L0, abs(Lp)


def derivative_tail_bound(params, K):
    """D_K with |G^(K)(u)| / K! <= D_K for all u, via the contour at Re s = 1/2:

        D_K = (1/2pi) int |t|^K/K! e^{pi r eta t / 4} prod |Gamma_R(1/2+it+mu_j)| dt.

    On each side the integrand is bounded by exp of a first-order (mean-value)
    enclosure of its logarithm on unit panels, plus a certified exponential
    tail from |Gamma(a+iy)| <= sqrt(2pi)(b+|y|)^p e^{-pi |y|/2}.
    """
    r = params.r
    if any(m < 0 for m in params.mu_ints()):
        raise NotImplementedError("tail bound assumes nonnegative shifts")
    Ptot, bmax = 0.0, 1.0
    for m in params.mu_ints():
        a = 0.25 + m / 2
        if a >= 0.5:
            Ptot += a - 0.5
            bmax = max(bmax, a)
        else:
            Ptot += a + 0.5
            bmax = max(bmax, a + 1)
    KP0 = K + Ptot
    acc = RealBall.exact(0)
    tail_total = RealBall.exact(0)
    for side in (1, -1):
        lam = math.pi * r * (1 - side * float(params.eta)) / 4
        T = max(8.0, 2 * bmax, (KP0 + 4) / lam * 1.25)
        for _ in range(6):
            T = max(T, (KP0 * math.log(T) + 45 + KP0) / lam)
        # [0, 2]: coarse interval bounds (log t blows up at 0; integrand small)
        nfine = 8
        for i in range(nfine):
            lo, hi = 2.0 * i / nfine, 2.0 * (i + 1) / nfine
            t_iv = RealBall.from_interval(mpfr(side * hi if side < 0 else lo),
                                          mpfr(hi if side > 0 else -lo))
            lg = _log_gamma_abs_upper_halfline(params, t_iv)
            if lg is None:
                raise ToleranceUnreachable("gamma bound failed near 0")
            tilt_up = (pi_ball() * RealBall(Fraction(r, 4) * params.eta) *
                       RealBall(side * (hi if side * float(params.eta) >= 0 else lo))).exp()
            acc = acc + (RealBall(hi - lo) * (RealBall(hi) ** K) * tilt_up *
                         RealBall(0, float(_RUP.exp(mpfr(lg.upper(), 32)))))
        # [2, T]: unit panels with mean-value bound on the log-integrand
        t = 2.0
        while t < T:
            w = min(1.0, T - t)
            mid = t + w / 2
            t_iv = RealBall.from_interval(mpfr(side * (t + w) if side < 0 else t),
                                          mpfr(t + w if side > 0 else -t))
            L0, Lp = _log_integrand_parts(params, K, mpfr(side * mid), t_iv)
            if L0 is None:
                raise ToleranceUnreachable("gamma bound failed on panel")
            upper = _RUP.add(mpfr(L0.upper(), 32),
                             _RUP.mul(mpfr(Lp.upper(), 32), mpfr(w / 2)))
            acc = acc + RealBall(w) * RealBall(0, float(_RUP.exp(upper)))
            t += w
        # tail beyond T
        if lam * T <= KP0 + 1:
            raise ToleranceUnreachable("tail cutoff too small")
        log_tail = (0.5 * r * math.log(2 * math.pi) + Ptot * math.log(1 + bmax / T)
                    + KP0 * math.log(T) - lam * T - math.log(lam - KP0 / T))
        tail_total = tail_total + RealBall(0, math.exp(min(log_tail, 600.0)) * 1.01)
    fac = RealBall(Fraction(1, math.factorial(K)))
    return (acc + tail_total) * fac / (pi_ball() * RealBall(2))


# -- Taylor caches ----------------------------------------------------------------------

class TaylorCache:
    """Per-cell Taylor models of G on a 2*eps lattice anchored at u = 0.

    Cells m in [m_lo, m_hi] have centers u_m = 2 eps m and half-width eps;
    coefficients are G^(k)(u_m)/k! for k < K, and the remainder bound
    rem = D_K eps^K dominates the K-th Taylor term on every cell.
    """

    def __init__(self, params, eps_pi_mult, m_lo, m_hi, K, prec, coeffs, rem):
        self.params = params
        self.eps_pi_mult = eps_pi_mult      # eps = pi * eps_pi_mult (Fraction)
        self.m_lo = m_lo
        self.m_hi = m_hi
        self.K = K
        self.prec = prec
        self.coeffs = coeffs                # dict m -> list of K ComplexBalls
        self.rem = rem                      # RealBall upper bound

    def eps_ball(self):
        return pi_ball() * RealBall(self.eps_pi_mult)

    def center(self, m):
        return self.eps_ball() * RealBall(2 * m)

    def cell_of(self, u_float):
        e = math.pi * float(self.eps_pi_mult)
        m = int(round(u_float / (2 * e)))
        return min(max(m, self.m_lo), self.m_hi)

    def eval(self, u, m=None):
        """Enclosure of G(u) for u in (or near) cell m."""
        u = u if isinstance(u, RealBall) else RealBall(u)
        if m is None:
            m = self.cell_of(float(u.mid))
        v = u - self.center(m)
        eps_up = float(self.eps_ball().upper())
        if not float(abs(v.mid)) <= eps_up * (1 + 1e-9) + float(v.rad):
            raise ValueError("u outside cache cell")
        acc = ComplexBall(RealBall.exact(0))
        for c in reversed(self.coeffs[m]):
            acc = acc * v + c
        return acc.add_error(self.rem.upper())

    def coeff_arrays(self):
        return self.coeffs


def build_taylor_cache(params, m_lo, m_hi, eps_pi_mult, K, tol=None,
                       progress=None):
    """Build the cache for cells m_lo..m_hi (centers 2*eps*m, eps = pi*mult).

    Raises ToleranceUnreachable if the certified remainder D_K eps^K exceeds
    tol (when given).
    """
    prec = get_precision()
    DK = derivative_tail_bound(params, K)
    eps = pi_ball() * RealBall(eps_pi_mult)
    rem = DK * eps ** K
    if tol is not None and not float(rem.upper()) <= tol:
        raise ToleranceUnreachable(
            f"cache remainder {float(rem.upper()):.3g} exceeds tol {tol}")
    coeffs = {}
    for m in range(m_lo, m_hi + 1):
        vals = g_eval(None, params, _derivs=K,
                      u_pi_mult=Fraction(eps_pi_mult) * 2 * m)
        coeffs[m] = vals
        if progress and (m - m_lo) % 50 == 0:
            progress(m - m_lo, m_hi - m_lo + 1)
    return TaylorCache(params, Fraction(eps_pi_mult), m_lo, m_hi, K, prec,
                       coeffs, rem)


# -- cache persistence ---------------------------------------------------------------

_CACHE_MAGIC = b"LFGC"
_CACHE_VERSION = 2


def cache_path(directory, params, eps_pi_mult, m_lo, m_hi, K, prec):
    name = hashlib.sha256(json.dumps({
        "g": params.digest(), "eps": str(Fraction(eps_pi_mult)),
        "m": [m_lo, m_hi], "K": K, "prec": prec,
    }, sort_keys=True).encode()).hexdigest()[:24]
    return os.path.join(directory, f"gcache_{name}.bin")


def _write_ball(f, b):
    mid = gmpy2.to_binary(b.mid)
    rad = gmpy2.to_binary(b.rad)
    f.write(struct.pack("<II", len(mid), len(rad)))
    f.write(mid)
    f.write(rad)


def _read_ball(f):
    lm, lr = struct.unpack("<II", f.read(8))
    mid = gmpy2.from_binary(f.read(lm))
    rad = gmpy2.from_binary(f.read(lr))
    return RealBall._raw(mid, rad)


def save_cache(path, cache):
    header = json.dumps({
        "mu": [[str(a), str(b)] for a, b in cache.params.mu],
        "eta": str(cache.params.eta),
        "eps_pi_mult": str(cache.eps_pi_mult),
        "m_lo": cache.m_lo, "m_hi": cache.m_hi,
        "K": cache.K, "prec": cache.prec,
    }).encode()
    with open(str(path) + ".tmp", "wb") as f:
        f.write(_CACHE_MAGIC)
        f.write(struct.pack("<HI", _CACHE_VERSION, len(header)))
        f.write(header)
        _write_ball(f, cache.rem)
        for m in range(cache.m_lo, cache.m_hi + 1):
            for c in cache.coeffs[m]:
                _write_ball(f, c.re)
                _write_ball(f, c.im)
    os.replace(str(path) + ".tmp", path)


def load_cache(path):
    with open(path, "rb") as f:
        if f.read(4) != _CACHE_MAGIC:
            raise ValueError("bad cache magic")
        version, hlen = struct.unpack("<HI", f.read(6))
        if version != _CACHE_VERSION:
            raise ValueError("bad cache version")
        h = json.loads(f.read(hlen).decode())
        params = GParams(tuple((Fraction(a), Fraction(b)) for a, b in h["mu"]),
                         Fraction(h["eta"]))
        rem = _read_ball(f)
        coeffs = {}
        for m in range(h["m_lo"], h["m_hi"] + 1):
            row = []
            for _ in range(h["K"]):
                re = _read_ball(f)
                im = _read_ball(f)
                row.append(ComplexBall(re, im))
            coeffs[m] = row
    return TaylorCache(params, Fraction(h["eps_pi_mult"]), h["m_lo"], h["m_hi"],
                       h["K"], h["prec"], coeffs, rem)
