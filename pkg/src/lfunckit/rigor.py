"""Certified midpoint-radius (ball) arithmetic on top of gmpy2/MPFR.

Every quantity downstream of this module is a RealBall or ComplexBall whose
radius dominates all rounding and truncation error.  Midpoints are mpfr values
at the ambient working precision (set with `precision`); radii are 32-bit mpfr
values combined with upward rounding, so they only ever overestimate.
Interval endpoints, where needed, are computed with full-precision directed
rounding.

Conventions:
  - A ball whose radius is +inf (or whose midpoint is nan) is the failure
    sentinel; it propagates through all operations.
  - Midpoint operations use round-to-nearest at the ambient precision; the
    rounding error is absorbed into the radius via a safe 2^(1-p)|m| bound.
  - ComplexBall is rectangular: independent real and imaginary RealBalls.
"""

from __future__ import annotations

from fractions import Fraction
import math

import gmpy2
from gmpy2 import mpfr, mpz

__all__ = [
    "RealBall", "ComplexBall", "Sign3", "precision", "get_precision",
    "local_precision", "pi_ball", "euler_ball", "log_ball", "zeta_real",
    "zeta_em", "log_gamma", "digamma", "log_gamma_stirling_imag", "bernoulli",
]

# Radius arithmetic: low precision, always rounding up.
_RUP = gmpy2.context(precision=32, round=gmpy2.RoundUp)
_RDN32 = gmpy2.context(precision=32, round=gmpy2.RoundDown)
_INF = mpfr('inf')
_ZERO_R = mpfr(0, 32)


def precision(bits):
    """Set the ambient working precision (bits); returns the previous value."""
    ctx = gmpy2.get_context()
    old = ctx.precision
    ctx.precision = int(bits)
    return old


def get_precision():
    return gmpy2.get_context().precision


class _PrecCtx:
    def __init__(self, bits):
        self.bits = bits

    def __enter__(self):
        self.old = precision(self.bits)
        return self

    def __exit__(self, *a):
        precision(self.old)


def local_precision(bits):
    """Context manager temporarily changing the working precision."""
    return _PrecCtx(bits)


_ulp_factors = {}


def _ulp(m):
    """Upper bound for the round-to-nearest error of midpoint m."""
    if m == 0:
        return _ZERO_R
    p = gmpy2.get_context().precision
    f = _ulp_factors.get(p)
    if f is None:
        f = _ulp_factors[p] = mpfr(2, 32) ** (1 - p)
    return _RUP.mul(abs(m), f)


def _up(*vals):
    s = _ZERO_R
    for v in vals:
        s = _RUP.add(s, v)
    return s


def _dn_ctx():
    return gmpy2.context(precision=get_precision() + 2, round=gmpy2.RoundDown)


def _up_ctx():
    return gmpy2.context(precision=get_precision() + 2, round=gmpy2.RoundUp)


class Sign3:
    """Three-valued sign: definite only when the enclosure excludes 0."""
    NEGATIVE = -1
    POSITIVE = 1
    INDETERMINATE = 0


class RealBall:
    __slots__ = ("mid", "rad")

    def __init__(self, mid=0, rad=0):
        if isinstance(mid, RealBall):
            m, r = mid.mid, mid.rad
        elif isinstance(mid, (int, mpz)):
            m = mpfr(mid)
            r = _ulp(m) if abs(int(mid)).bit_length() > get_precision() else _ZERO_R
        elif isinstance(mid, Fraction):
            m = mpfr(gmpy2.mpq(mid.numerator, mid.denominator))
            r = _ulp(m)
        elif isinstance(mid, (float, mpfr)):
            m = mpfr(mid)
            r = _ZERO_R
        elif isinstance(mid, str):
            m = mpfr(mid)
            r = _ulp(m)
        else:
            raise TypeError(f"cannot make RealBall from {type(mid)}")
        if rad:
            r = _up(r, abs(mpfr(rad, 32)))
        self.mid = m
        self.rad = r
        if gmpy2.is_nan(m) or gmpy2.is_infinite(m):
            self.mid = mpfr(0)
            self.rad = _INF

    # -- construction helpers -------------------------------------------------
    @classmethod
    def exact(cls, value):
        b = cls.__new__(cls)
        b.mid = mpfr(value)
        b.rad = _ZERO_R
        if isinstance(value, (int, mpz)) and abs(int(value)).bit_length() > get_precision():
            b.rad = _ulp(b.mid)
        return b

    @classmethod
    def _raw(cls, mid, rad):
        b = cls.__new__(cls)
        b.mid = mid
        b.rad = rad
        return b

    @classmethod
    def sentinel(cls):
        return cls._raw(mpfr(0), _INF)

    @classmethod
    def from_interval(cls, lo, hi):
        lo, hi = mpfr(lo), mpfr(hi)
        if gmpy2.is_nan(lo) or gmpy2.is_nan(hi) or not lo <= hi:
            return cls.sentinel()
        mid = (lo + hi) / 2
        rad = _up(max(_RUP.sub(hi, mid), _RUP.sub(mid, lo)), _ulp(mid))
        return cls._raw(mid, rad)

    # -- predicates -------------------------------------------------------------
    @property
    def is_sentinel(self):
        return gmpy2.is_infinite(self.rad) or gmpy2.is_nan(self.mid)

    def lower(self):
        p = max(get_precision(), self.mid.precision) + 2
        return gmpy2.context(precision=p, round=gmpy2.RoundDown).sub(self.mid, self.rad)

    def upper(self):
        p = max(get_precision(), self.mid.precision) + 2
        return gmpy2.context(precision=p, round=gmpy2.RoundUp).add(self.mid, self.rad)

    def contains_zero(self):
        return self.is_sentinel or (self.lower() <= 0 <= self.upper())

    def contains(self, value):
        """Exact containment test (strings are parsed with 64 guard bits)."""
        if self.is_sentinel:
            return True
        if isinstance(value, str):
            value = mpfr(value, max(get_precision(), self.mid.precision) + 64)
        elif isinstance(value, Fraction):
            value = gmpy2.mpq(value.numerator, value.denominator)
        return self.lower() <= value <= self.upper()

    def sign3(self):
        if self.is_sentinel:
            return Sign3.INDETERMINATE
        if self.lower() > 0:
            return Sign3.POSITIVE
        if self.upper() < 0:
            return Sign3.NEGATIVE
        return Sign3.INDETERMINATE

    def __repr__(self):
        if self.is_sentinel:
            return "RealBall(<sentinel>)"
        return f"[{self.mid} +/- {float(self.rad):.3g}]"

    def __float__(self):
        return float(self.mid)

    # -- arithmetic ---------------------------------------------------------------
    def __neg__(self):
        return RealBall._raw(-self.mid, self.rad)

    def __abs__(self):
        return RealBall._raw(abs(self.mid), self.rad)

    def __add__(self, other):
        other = _coerce(other)
        m = self.mid + other.mid
        return RealBall._raw(m, _up(self.rad, other.rad, _ulp(m)))

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        m = self.mid - other.mid
        return RealBall._raw(m, _up(self.rad, other.rad, _ulp(m)))

    def __rsub__(self, other):
        return _coerce(other).__sub__(self)

    def __mul__(self, other):
        other = _coerce(other)
        m = self.mid * other.mid
        return RealBall._raw(m, _up(_RUP.mul(self.rad, abs(other.mid)),
                                    _RUP.mul(other.rad, abs(self.mid)),
                                    _RUP.mul(self.rad, other.rad),
                                    _ulp(m)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other.is_sentinel or self.is_sentinel or other.contains_zero():
            return RealBall.sentinel()
        m = self.mid / other.mid
        denom_lo = _RDN32.sub(abs(other.mid), other.rad)
        num = _up(_RUP.mul(self.rad, abs(other.mid)),
                  _RUP.mul(other.rad, abs(self.mid)))
        rad = _up(_RUP.div(num, _RDN32.mul(abs(other.mid), denom_lo)), _ulp(m))
        return RealBall._raw(m, rad)

    def __rtruediv__(self, other):
        return _coerce(other).__truediv__(self)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("integer powers >= 0 only")
        result = RealBall.exact(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def sq(self):
        """Square with a nonnegative enclosure (re-centered when wide)."""
        if self.is_sentinel:
            return RealBall.sentinel()
        am = abs(self.mid)
        hi = _up_ctx().mul(_up_ctx().add(am, self.rad), _up_ctx().add(am, self.rad))
        if self.contains_zero():
            return RealBall.from_interval(mpfr(0), hi)
        if self.rad > _RUP.mul(am, mpfr(0.25)):
            lo = _dn_ctx().mul(_dn_ctx().sub(am, self.rad), _dn_ctx().sub(am, self.rad))
            return RealBall.from_interval(lo, hi)
        m = self.mid * self.mid
        dn = _dn_ctx()
        lo = dn.mul(dn.sub(am, self.rad), dn.sub(am, self.rad))
        rad = _up(max(_RUP.sub(hi, m), _RUP.sub(m, lo)), _ulp(m))
        return RealBall._raw(m, rad)

    # -- elementary functions ----------------------------------------------------
    def exp(self):
        if self.is_sentinel:
            return RealBall.sentinel()
        m = gmpy2.exp(self.mid)
        if gmpy2.is_infinite(m):
            return RealBall.sentinel()
        return RealBall._raw(m, _up(_RUP.mul(abs(m), _RUP.expm1(self.rad)), _ulp(m)))

    def log(self):
        if self.is_sentinel or self.lower() <= 0:
            return RealBall.sentinel()
        m = gmpy2.log(self.mid)
        t = _RUP.div(self.rad, _RDN32.sub(self.mid, self.rad))
        if not t < gmpy2.mpfr(0.5):
            # wide ball: directed endpoint logs
            lo = _dn_ctx().log(self.lower())
            hi = _up_ctx().log(self.upper())
            return RealBall.from_interval(lo, hi)
        return RealBall._raw(m, _up(-_RDN32.log1p(-t), _ulp(m)))

    def sqrt(self):
        if self.is_sentinel or self.lower() < 0:
            return RealBall.sentinel()
        m = gmpy2.sqrt(self.mid)
        hi = _up_ctx().sqrt(self.upper())
        lo = _dn_ctx().sqrt(max(self.lower(), mpfr(0)))
        rad = _up(max(_RUP.sub(hi, m), _RUP.sub(m, lo)), _ulp(m))
        return RealBall._raw(m, rad)

    def sin(self):
        return self._lipschitz1(gmpy2.sin)

    def cos(self):
        return self._lipschitz1(gmpy2.cos)

    def atan(self):
        if self.is_sentinel:
            return RealBall.sentinel()
        m = gmpy2.atan(self.mid)
        lo = _RDN32.sub(abs(self.mid), self.rad)
        if lo > 0:
            slope = _RUP.div(mpfr(1), _RDN32.add(mpfr(1), _RDN32.mul(lo, lo)))
        else:
            slope = mpfr(1)
        return RealBall._raw(m, _up(_RUP.mul(self.rad, slope), _ulp(m)))

    def sinh(self):
        if self.is_sentinel:
            return RealBall.sentinel()
        m = gmpy2.sinh(self.mid)
        slope = _RUP.cosh(_RUP.add(abs(self.mid), self.rad))
        return RealBall._raw(m, _up(_RUP.mul(self.rad, slope), _ulp(m)))

    def _lipschitz1(self, fn):
        if self.is_sentinel:
            return RealBall.sentinel()
        m = fn(self.mid)
        return RealBall._raw(m, _up(self.rad, _ulp(m)))

    # -- set operations ----------------------------------------------------------
    def union(self, other):
        other = _coerce(other)
        if self.is_sentinel or other.is_sentinel:
            return RealBall.sentinel()
        return RealBall.from_interval(min(self.lower(), other.lower()),
                                      max(self.upper(), other.upper()))

    def add_error(self, extra):
        if isinstance(extra, RealBall):
            extra = extra.upper()
        return RealBall._raw(self.mid, _up(self.rad, abs(mpfr(extra, 32))))


def _coerce(v):
    if isinstance(v, RealBall):
        return v
    if isinstance(v, ComplexBall):
        raise TypeError("complex ball in real context")
    return RealBall(v)


def _mpfr_to_fraction(x):
    if x == 0:
        return Fraction(0)
    man, exp = x.as_mantissa_exp()
    return Fraction(int(man)) * Fraction(2) ** int(exp)


class ComplexBall:
    """Rectangular complex enclosure (independent real/imaginary balls)."""
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, RealBall) else RealBall(re)
        self.im = im if isinstance(im, RealBall) else RealBall(im)

    @classmethod
    def from_complex(cls, z):
        return cls(RealBall(z.real), RealBall(z.imag))

    @classmethod
    def sentinel(cls):
        return cls(RealBall.sentinel(), RealBall.sentinel())

    @property
    def is_sentinel(self):
        return self.re.is_sentinel or self.im.is_sentinel

    def __repr__(self):
        return f"({self.re!r} + {self.im!r}*I)"

    def __add__(self, other):
        other = _ccoerce(other)
        return ComplexBall(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _ccoerce(other)
        return ComplexBall(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _ccoerce(other).__sub__(self)

    def __neg__(self):
        return ComplexBall(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, RealBall):
            return ComplexBall(self.re * other, self.im * other)
        other = _ccoerce(other)
        return ComplexBall(self.re * other.re - self.im * other.im,
                           self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, RealBall):
            return ComplexBall(self.re / other, self.im / other)
        other = _ccoerce(other)
        nrm = other.abs2()
        if nrm.contains_zero():
            return ComplexBall.sentinel()
        num = self * other.conj()
        return ComplexBall(num.re / nrm, num.im / nrm)

    def __rtruediv__(self, other):
        return _ccoerce(other).__truediv__(self)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("integer powers >= 0 only")
        result = ComplexBall(RealBall.exact(1), RealBall.exact(0))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self):
        return ComplexBall(self.re, -self.im)

    def mul_i(self):
        return ComplexBall(-self.im, self.re)

    def abs2(self):
        return self.re.sq() + self.im.sq()

    def __abs__(self):
        return self.abs2().sqrt()

    def exp(self):
        if self.is_sentinel:
            return ComplexBall.sentinel()
        ex = self.re.exp()
        return ComplexBall(ex * self.im.cos(), ex * self.im.sin())

    def log(self):
        """Principal log; sentinel if 0 or the branch cut cannot be excluded."""
        if self.is_sentinel:
            return ComplexBall.sentinel()
        mag2 = self.abs2()
        if mag2.contains_zero():
            return ComplexBall.sentinel()
        arg = self.arg()
        if arg.is_sentinel:
            return ComplexBall.sentinel()
        half = RealBall(Fraction(1, 2))
        return ComplexBall(mag2.log() * half, arg)

    def arg(self):
        """Principal argument; sentinel if the quadrant is ambiguous around the cut."""
        re, im = self.re, self.im
        if re.sign3() == Sign3.POSITIVE:
            return (im / re).atan()
        pi = pi_ball()
        if im.sign3() == Sign3.POSITIVE:
            return pi / RealBall(2) - (re / im).atan()
        if im.sign3() == Sign3.NEGATIVE:
            return -(pi / RealBall(2)) - (re / im).atan()
        return RealBall.sentinel()

    def contains(self, z):
        return self.re.contains(z.real) and self.im.contains(z.imag)

    def add_error(self, extra):
        """Enlarge both component radii by `extra` (covers any |err| <= extra)."""
        return ComplexBall(self.re.add_error(extra), self.im.add_error(extra))

    def mid_complex(self):
        return complex(float(self.re.mid), float(self.im.mid))

    def rad_upper(self):
        """Upper bound on |error|: component radii combined as a rectangle."""
        return _RUP.sqrt(_up(_RUP.mul(self.re.rad, self.re.rad),
                             _RUP.mul(self.im.rad, self.im.rad)))

    def abs_upper(self):
        return _up_ctx().add(_up_ctx().sqrt(_up_ctx().add(
            _up_ctx().mul(abs(self.re.mid), abs(self.re.mid)),
            _up_ctx().mul(abs(self.im.mid), abs(self.im.mid)))), self.rad_upper())

    def abs_lower(self):
        lo = _dn_ctx().sub(_dn_ctx().sqrt(_dn_ctx().add(
            _dn_ctx().mul(self.re.mid, self.re.mid),
            _dn_ctx().mul(self.im.mid, self.im.mid))), self.rad_upper())
        return max(lo, mpfr(0))


def _ccoerce(v):
    if isinstance(v, ComplexBall):
        return v
    if isinstance(v, RealBall):
        return ComplexBall(v, RealBall.exact(0))
    if isinstance(v, complex):
        return ComplexBall.from_complex(v)
    return ComplexBall(RealBall(v), RealBall.exact(0))


# -- constants ------------------------------------------------------------------

def pi_ball():
    m = gmpy2.const_pi()
    return RealBall._raw(m, _ulp(m))


def euler_ball():
    m = gmpy2.const_euler()
    return RealBall._raw(m, _ulp(m))


def log_ball(x):
    return (x if isinstance(x, RealBall) else RealBall(x)).log()


# -- Bernoulli numbers -------------------------------------------------------------

_bernoulli_cache = [Fraction(1), Fraction(-1, 2)]


def bernoulli(n):
    """Exact Bernoulli number B_n (convention B_1 = -1/2)."""
    while len(_bernoulli_cache) <= n:
        m = len(_bernoulli_cache)
        s = Fraction(0)
        for k in range(m):
            s += Fraction(math.comb(m + 1, k)) * _bernoulli_cache[k]
        _bernoulli_cache.append(-s / (m + 1))
    return _bernoulli_cache[n]


# -- certified special functions ------------------------------------------------------

def zeta_real(sigma):
    """Enclosure of zeta(sigma) for a real ball sigma with sigma > 1 strictly.

    MPFR's zeta is correctly rounded and zeta is decreasing on (1, oo), so
    directed evaluations at the endpoints give a certified enclosure.
    """
    sigma = _coerce(sigma)
    if sigma.is_sentinel or sigma.lower() <= 1:
        return RealBall.sentinel()
    hi = _up_ctx().zeta(sigma.lower())
    lo = _dn_ctx().zeta(sigma.upper())
    return RealBall.from_interval(lo, hi)


def zeta_em(s, derivative=0, M=64, k=8):
    """Euler-Maclaurin enclosure of zeta or zeta' at a real ball s > 1.

    Remainder after the B_2k correction term:
      R = -(s)_{2k+1}/(2k+1)! * int_M^inf ~B_{2k+1}(t) t^(-s-2k-1) dt,
    with |~B_m(t)| <= 4 m!/(2pi)^m, giving
      |R(s)| <= 4 (2pi)^(-2k-1) |(s)_{2k+1}| M^(-sigma-2k) / (sigma+2k),
    valid for complex s; the zeta' remainder uses Cauchy's bound on a
    radius-1/2 disk.
    """
    s = _coerce(s)
    if s.is_sentinel or s.lower() <= 1:
        return RealBall.sentinel()
    one = RealBall.exact(1)
    total = RealBall.exact(0)
    for n in range(1, M + 1):
        if n == 1:
            if derivative == 0:
                total = total + one
            continue
        ln = RealBall(n).log()
        npow = (-(s * ln)).exp()
        total = total + (npow if derivative == 0 else -(ln * npow))
    lnM = RealBall(M).log()
    Mpow = (-(s * lnM)).exp()          # M^-s
    sm1 = s - one
    if derivative == 0:
        total = total + Mpow * RealBall(M) / sm1 - Mpow / RealBall(2)
    else:
        M1s = Mpow * RealBall(M)       # M^(1-s)
        total = total - M1s * lnM / sm1 - M1s / (sm1 * sm1) + Mpow * lnM / RealBall(2)
    for r in range(1, k + 1):
        poch = one
        for j in range(2 * r - 1):
            poch = poch * (s + RealBall(j))
        B = RealBall(Fraction(bernoulli(2 * r), math.factorial(2 * r)))
        Mp = (-((s + RealBall(2 * r - 1)) * lnM)).exp()   # M^(-s-2r+1)
        if derivative == 0:
            total = total + B * poch * Mp
        else:
            dpoch = RealBall.exact(0)
            for j in range(2 * r - 1):
                pp = one
                for j2 in range(2 * r - 1):
                    if j2 != j:
                        pp = pp * (s + RealBall(j2))
                dpoch = dpoch + pp
            total = total + B * (dpoch - poch * lnM) * Mp

    def rem_bound(sig_low):
        # 4 (2pi)^-(2k+1) * prod_{j<=2k}(|s|+j) * M^-(sig_low+2k) / (sig_low+2k)
        tw = 2 * k + 1
        s_abs_hi = _RUP.add(abs(s.mid), s.rad)
        poch_hi = mpfr(1, 32)
        for j in range(tw):
            poch_hi = _RUP.mul(poch_hi, _RUP.add(s_abs_hi, mpfr(j)))
        twopi_lo = mpfr('6.2831853', 32)      # < 2 pi
        pref = _RUP.div(mpfr(4), _RDN32.exp(_RDN32.mul(mpfr(tw), _RDN32.log(twopi_lo))))
        expo = _RDN32.mul(_RDN32.add(mpfr(sig_low), mpfr(2 * k)), _RDN32.log(mpfr(M)))
        denom = _RDN32.mul(_RDN32.exp(expo), _RDN32.add(mpfr(sig_low), mpfr(2 * k)))
        return _RUP.div(_RUP.mul(pref, poch_hi), denom)

    sig_low = float(s.lower())
    if derivative == 0:
        return total.add_error(rem_bound(sig_low))
    return total.add_error(_RUP.mul(mpfr(2), rem_bound(sig_low - 0.5)))


# -- complex log-gamma ------------------------------------------------------------

def log_gamma(z):
    """Principal-branch log Gamma(z) for Re(z) > 0, certified.

    Stirling series with the classical Binet remainder bound
      |R_N(z)| <= |B_2N| / ((2N-1)(2N)|z|^(2N-1)) * sec(arg(z)/2)^(2N)
    (sec(arg/2)^2 <= 2 on Re(z) > 0), after recurrence shifts
    log Gamma(z) = log Gamma(z+n) - sum log(z+k) into the regime Re(z) >= R0.
    Returns the sentinel if the enclosure touches Re(z) <= 0.
    """
    z = _ccoerce(z)
    if z.is_sentinel or not z.re.lower() > 0:
        return ComplexBall.sentinel()
    p = get_precision()
    N = max(8, int(0.36 * p))
    R0 = max(8.0, 0.115 * p + 3)
    zl = float(z.re.lower())
    im_lo = float(_RDN32.sub(abs(z.im.mid), z.im.rad))
    shift = 0
    if zl * zl + max(im_lo, 0.0) ** 2 < R0 * R0:
        shift = int(math.ceil(math.sqrt(max(R0 * R0 - max(im_lo, 0.0) ** 2, 0.0)) - zl)) + 1
    logsum = ComplexBall(RealBall.exact(0), RealBall.exact(0))
    w = z
    for _ in range(shift):
        lg = w.log()
        if lg.is_sentinel:
            return ComplexBall.sentinel()
        logsum = logsum + lg
        w = w + RealBall.exact(1)
    lw = w.log()
    if lw.is_sentinel:
        return ComplexBall.sentinel()
    half = RealBall(Fraction(1, 2))
    res = (w - ComplexBall(half)) * lw - w + ComplexBall((pi_ball() * RealBall(2)).log() * half)
    w2inv = ComplexBall(RealBall.exact(1)) / (w * w)
    term = ComplexBall(RealBall.exact(1)) / w
    cutoff = mpfr(2, 32) ** (-p - 8)
    for n in range(1, N):
        c = RealBall(Fraction(bernoulli(2 * n), (2 * n) * (2 * n - 1)))
        res = res + term * c
        if _RUP.mul(_RUP.add(abs(term.re.mid), abs(term.im.mid)), abs(c.mid)) < cutoff:
            N = n + 1
            break
        term = term * w2inv
    wabs_low = _abs_lower(w)
    if not wabs_low > 0:
        return ComplexBall.sentinel()
    B = abs(Fraction(bernoulli(2 * N), (2 * N) * (2 * N - 1)))
    logbound = (math.log(B.numerator) - math.log(B.denominator)
                + N * math.log(2.0)
                - (2 * N - 1) * float(_RDN32.log(wabs_low)))
    rem = _RUP.exp(mpfr(min(logbound, 700.0)))
    return res.add_error(rem) - logsum


def _abs_lower(z):
    lo_re = max(mpfr(0), _RDN32.sub(abs(z.re.mid), z.re.rad))
    lo_im = max(mpfr(0), _RDN32.sub(abs(z.im.mid), z.im.rad))
    return _RDN32.sqrt(_RDN32.add(_RDN32.mul(lo_re, lo_re), _RDN32.mul(lo_im, lo_im)))


def digamma(z):
    """Certified psi(z) for Re(z) > 0: Stirling series with Binet-type
    remainder |R_N| <= |B_2N|/(2N |z|^2N) * 2^(N+1), after recurrence shifts."""
    z = _ccoerce(z)
    if z.is_sentinel or not z.re.lower() > 0:
        return ComplexBall.sentinel()
    p = get_precision()
    N = max(8, int(0.36 * p))
    R0 = max(8.0, 0.115 * p + 3)
    zl = float(z.re.lower())
    im_lo = float(_RDN32.sub(abs(z.im.mid), z.im.rad))
    shift = 0
    if zl * zl + max(im_lo, 0.0) ** 2 < R0 * R0:
        shift = int(math.ceil(math.sqrt(max(R0 * R0 - max(im_lo, 0.0) ** 2, 0.0)) - zl)) + 1
    corr = ComplexBall(RealBall.exact(0))
    w = z
    one = ComplexBall(RealBall.exact(1))
    for _ in range(shift):
        corr = corr + one / w
        w = w + RealBall.exact(1)
    lw = w.log()
    if lw.is_sentinel:
        return ComplexBall.sentinel()
    w2inv = one / (w * w)
    res = lw - one / (w * RealBall(2))
    term = w2inv
    cutoff = mpfr(2, 32) ** (-p - 8)
    for n in range(1, N):
        c = RealBall(Fraction(bernoulli(2 * n), 2 * n))
        res = res - term * c
        if _RUP.mul(_RUP.add(abs(term.re.mid), abs(term.im.mid)), abs(c.mid)) < cutoff:
            N = n + 1
            break
        term = term * w2inv
    wabs_low = _abs_lower(w)
    if not wabs_low > 0:
        return ComplexBall.sentinel()
    B = abs(Fraction(bernoulli(2 * N), 2 * N))
    logbound = (math.log(B.numerator) - math.log(B.denominator)
                + (N + 1) * math.log(2.0)
                - (2 * N) * float(_RDN32.log(wabs_low)))
    rem = _RUP.exp(mpfr(min(logbound, 700.0)))
    return res.add_error(rem) - corr


def log_gamma_stirling_imag(z):
    """Quick effective-Stirling bound for Im log Gamma(z):
    Im[(z-1/2) log(z/e)] with error radius 1/(8|Im z|).  Independent
    cross-check for the series implementation; valid off the real axis."""
    z = _ccoerce(z)
    if z.im.contains_zero():
        return RealBall.sentinel()
    lw = z.log()
    if lw.is_sentinel:
        return RealBall.sentinel()
    main = (z - ComplexBall(RealBall(Fraction(1, 2)))) * (lw - ComplexBall(RealBall.exact(1)))
    im_lo = _RDN32.sub(abs(z.im.mid), z.im.rad)
    return main.im.add_error(_RUP.div(mpfr(1), _RDN32.mul(mpfr(8), im_lo)))
