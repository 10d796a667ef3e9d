"""Certified critical-line evaluation by discretized Fourier inversion.

Pipeline (per L-function datum):
  F(t) = Lambda(1/2 + i t) e^{pi r eta t / 4} and its Fourier transform
  F-hat are discretized by Poisson summation into a DFT pair of length
  q = A B.  F-hat samples at x_n = 2 pi n / B are assembled from
  coefficient blocks S^(k)_m against cached Taylor models of the G kernel
  (cells and samples share one lattice of spacing 2 eps with
  pi/(eps B) = j integral), minus the pole residue terms.  Four certified
  error sources are tracked per point:

    truncation   - coefficients beyond the per-sample cutoff (series tail)
    alias_x      - frequency-side aliases (residue part exact, rest bounded)
    dft          - inverse-DFT on ball midpoints: accumulated input radii
                   plus a worst-case float64 rounding model
    alias_t      - time-side aliases (exponentially small in B)

  plus the 'series' radii of the exact ball convolution (includes the cache
  remainder).  Radii are assembled so the final radius is by construction
  the sum of the recorded sources.

Evaluating on a grid offset by c (the same F-hat samples, rephased) gives
F(m/A + c); bracket refinement re-runs only this cheap stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import gmpy2
from gmpy2 import mpfr

from .rigor import (RealBall, ComplexBall, Sign3, pi_ball, get_precision,
                    local_precision, zeta_real, zeta_em, _RUP)
from .lfunc import abs_gamma_half_line, analytic_conductor, pole_polynomial_abs
from .gfun import (GParams, TaylorCache, build_taylor_cache,
                   g_asymptotic_bound, HypothesisFailed, cache_path,
                   save_cache, load_cache)

__all__ = [
    "GridSpec", "SkmBlocks", "ZGrid", "AlignmentError", "CacheCoverage",
    "plan_grid", "compute_skm", "hatf_samples", "ftail_bound",
    "alias_correct_hatf", "invert_to_zgrid", "evaluate_grid", "HatF",
]


class AlignmentError(Exception):
    pass


class CacheCoverage(Exception):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Sampling parameters; all lattice quantities are exact.

    B: Fraction (period in t); q: DFT length (power of two); j: positive
    integer with pi/(eps B) = j, so eps = pi/(j B) and the x-samples
    2 pi n / B land on even multiples of eps.  A = q / B.
    """
    B: Fraction
    q: int
    j: int
    K: int
    M: int
    eta: Fraction

    def __post_init__(self):
        if self.q & (self.q - 1):
            raise ValueError("q must be a power of two")
        if self.j < 1 or self.B <= 0:
            raise ValueError("bad lattice parameters")

    @property
    def A(self):
        return Fraction(self.q) / self.B

    @property
    def eps_pi_mult(self):
        return Fraction(1) / (self.j * self.B)

    @property
    def t_step(self):
        return self.B / self.q

    def t_of(self, m):
        return Fraction(m) * self.t_step

    def x_pi_mult(self, n):
        """x_n = 2 pi n / B as a multiple of pi."""
        return Fraction(2 * n) / self.B


@dataclass
class SkmBlocks:
    s_lo: int
    s_hi: int
    K: int
    S: dict                    # m -> [RealBall] * K
    nmax_in_cell: dict         # m -> largest n contributing
    abs0: dict = field(default_factory=dict)   # m -> sum |a_n|/sqrt(n) upper


@dataclass
class HatF:
    """F-hat samples at x_n (0 <= n <= q/2) with radius components."""
    mids: np.ndarray           # complex128 midpoints
    ball_rad: np.ndarray       # series radii (ball conv + cache remainder)
    trunc_rad: np.ndarray      # per-sample truncation bound
    alias_rad: np.ndarray      # alias-in-x bound (after correction)
    resid_mid: np.ndarray      # residue corrections included in mids
    corrected: bool = False


def plan_grid(datum, eta, t_max, digits=None):
    """Report the trade-off for candidate eta: required working digits and
    coefficient demand at height t_max (the planning helper).

    The function-size scale is e^{-delta r t / 2} (with delta = pi(1-|eta|)/2)
    while the series truncation at x = 0 is ~ exp(-pi r delta e^-delta
    (M/sqrt N)^(2/r)); the required precision is the ratio's digit count.
    """
    r = datum.degree_r
    N = datum.conductor_N
    eta = float(eta)
    delta = math.pi / 2 * (1 - abs(eta))
    f_scale = math.exp(-delta * r * t_max / 2)
    # choose M so that the x=0 tail is ~1e-9 * f_scale
    target = f_scale * 1e-9
    Xc = math.pi * r * delta * math.exp(-delta) * (1.0 / math.sqrt(N)) ** (2 / r)
    M = (max(-math.log(target), 1.0) / Xc) ** (r / 2)
    digits_needed = max(10.0, -math.log10(target) + 4)
    return {"eta": eta, "t_max": t_max, "function_scale": f_scale,
            "tail_target": target, "M_estimate": M,
            "digits": digits_needed}


def compute_skm(stream, datum, grid, s_lo=None, s_hi=None):
    """Exact block sums S^(k)_m = sum a_n n^(-1/2) (log(n/sqrt N) - u_m)^k
    over the cells of the 2*eps lattice, for n <= grid.M.
    """
    M = min(grid.M, stream.limit)
    N = datum.conductor_N
    eps = pi_ball() * RealBall(grid.eps_pi_mult)
    two_eps = float(eps.mid) * 2
    half_logN = RealBall(N).log() * RealBall(Fraction(1, 2))
    K = grid.K
    S = {}
    nmax = {}
    abs0 = {}
    eps_up = float(eps.upper())
    for n in range(1, M + 1):
        a_n = stream.a[n]
        if a_n == 0:
            continue
        u = (RealBall(n).log() - half_logN) if n > 1 else -half_logN
        m = int(round(float(u.mid) / two_eps))
        w = u - eps * RealBall(2 * m)
        if not float(abs(w.mid)) <= eps_up * (1 + 1e-9):
            raise AlignmentError(f"cell assignment failed at n={n}")
        inv_sqrt = RealBall.exact(1) / RealBall(n).sqrt() if n > 1 else RealBall.exact(1)
        base = RealBall(a_n) * inv_sqrt
        row = S.get(m)
        if row is None:
            row = S[m] = [RealBall.exact(0) for _ in range(K)]
            abs0[m] = 0.0
        wp = RealBall.exact(1)
        for k in range(K):
            row[k] = row[k] + base * wp
            wp = wp * w
        nmax[m] = max(nmax.get(m, 0), n)
        abs0[m] += abs(float(base.mid)) * (1 + 1e-12) + float(base.rad)
    if not S:
        raise AlignmentError("empty coefficient stream")
    lo = min(S) if s_lo is None else s_lo
    hi = max(S) if s_hi is None else s_hi
    return SkmBlocks(lo, hi, K, S, nmax, abs0)


def _tail_constants(datum, eta, C, alpha):
    r = datum.degree_r
    delta = math.pi / 2 * (1 - abs(float(eta)))
    mu_bar = -0.5 + (1 + sum(float(re) for re, _ in datum.mu)) / r
    nus = [(float(re) - 1) / 2 + 1 / (2 * r) for re, _ in datum.mu]
    Kc = 2 * math.sqrt(2 ** (r + 1) / r * math.exp(delta * (r - 1)) / delta)
    c = mu_bar + 0.5 + alpha
    cp = max(c * r / 2 - 1, 0.0)
    return r, delta, mu_bar, nus, Kc, c, cp


def ftail_bound(x, datum, eta, M, C, alpha):
    """The series-truncation bound: certified upper bound for
    |sum_{n>M} a_n n^(-1/2) G(x + log(n/sqrt N))| given |a_n| <= C n^alpha.

    Requires X M^(2/r) > max(c', r) with X = pi r delta e^-delta
    (e^x/sqrt N)^(2/r); raises HypothesisFailed below that threshold.
    """
    r, delta, mu_bar, nus, Kc, c, cp = _tail_constants(datum, eta, C, alpha)
    N = datum.conductor_N
    logX = (math.log(math.pi * r * delta) - delta + 2 * x / r
            - math.log(N) / r)
    logXM = logX + (2 / r) * math.log(M)
    if logXM > 300:
        return 1e-280      # bound is astronomically small
    XM = math.exp(logXM)
    if not XM > max(cp, r):
        raise HypothesisFailed(f"ftail: X M^(2/r) = {XM:.3g} <= max(c', r)")
    logv = (math.log(Kc * r / 2 * C) + mu_bar * (x - 0.5 * math.log(N))
            + c * math.log(M) - XM - math.log(XM - cp))
    for nu in nus:
        base = 1 + r * nu / XM
        if base <= 0:
            raise HypothesisFailed("ftail: negative power base")
        logv += nu * math.log(base)
    return math.exp(min(logv, 500.0)) * (1 + 1e-9)


def _residue_terms(datum, x_pi_mult, grid, shift_c=0.0):
    """-sum_rho Res_s Lambda(s) e^{(x + i pi r eta/4)(1/2 - s)} e^{i x c}
    at the sample x = pi * x_pi_mult (the contour-shift residues)."""
    poles = datum.pole_list()
    if not poles:
        return ComplexBall(RealBall.exact(0))
    r = datum.degree_r
    out = ComplexBall(RealBall.exact(0))
    x = pi_ball() * RealBall(Fraction(x_pi_mult))
    theta = pi_ball() * RealBall(Fraction(r, 4) * grid.eta)
    for lam, res in poles:
        s = ComplexBall(RealBall.exact(1)) + lam
        half_minus_s = ComplexBall(RealBall(Fraction(1, 2))) - s
        w = ComplexBall(x, theta)
        out = out + res * (w * half_minus_s).exp()
    if shift_c:
        out = out * ComplexBall(RealBall.exact(0), x * RealBall(shift_c)).exp()
    return -out


def hatf_samples(blocks, cache, datum, grid, C, alpha, progress=None):
    """F-hat at x_n = 2 pi n/B for 0 <= n <= q/2 (exact ball convolution of
    cache coefficients against S^(k) blocks, epsilon-factor applied, pole
    residues subtracted; per-sample truncation bounds recorded)."""
    if cache.K < grid.K:
        raise AlignmentError("cache holds fewer Taylor terms than grid.K")
    if Fraction(cache.eps_pi_mult) != grid.eps_pi_mult:
        raise AlignmentError("cache lattice does not match the grid")
    if cache.m_lo > blocks.s_lo:
        raise CacheCoverage("cache does not cover the lowest coefficient cell")
    nq = grid.q // 2
    mids = np.zeros(nq + 1, dtype=np.complex128)
    ball_rad = np.zeros(nq + 1)
    trunc_rad = np.zeros(nq + 1)
    resid_mid = np.zeros(nq + 1, dtype=np.complex128)
    eps_ball = datum.epsilon_ball()
    N = datum.conductor_N
    sqrtN = math.sqrt(N)
    two_eps = 2 * math.pi * float(grid.eps_pi_mult)
    M = min(grid.M, max(blocks.nmax_in_cell.values()))
    rem = float(cache.rem.upper())
    for n in range(nq + 1):
        base_idx = grid.j * n
        acc = ComplexBall(RealBall.exact(0))
        cut_n = None       # largest coefficient index summed for this sample
        abs_summed = 0.0   # sum |a_n|/sqrt(n) over summed cells
        if base_idx + blocks.s_lo <= cache.m_hi:
            for m in range(blocks.s_lo, blocks.s_hi + 1):
                row = blocks.S.get(m)
                if row is None:
                    continue
                idx = base_idx + m
                if idx > cache.m_hi:
                    continue
                coeffs = cache.coeffs[idx]
                for k in range(grid.K):
                    acc = acc + coeffs[k] * row[k]
                cut_n = max(cut_n or 0, blocks.nmax_in_cell[m])
                abs_summed += blocks.abs0[m]
        acc = acc * eps_ball
        x_float = 2 * math.pi * n / float(grid.B)
        # truncation beyond the last summed coefficient
        if cut_n is None:
            # no terms at all: bound the n=1 term via the asymptotic bound
            u1 = x_float - math.log(sqrtN)
            try:
                t1 = float(g_asymptotic_bound(mpfr(u1), cache.params).upper())
            except HypothesisFailed:
                raise CacheCoverage(f"sample {n}: no cells and no asymptotic regime")
            trunc_rad[n] += t1 * C        # |a_1| = 1 <= C
            eff_M = 1
        else:
            eff_M = cut_n
        trunc_rad[n] += ftail_bound(x_float, datum, grid.eta, eff_M, C, alpha)
        res = _residue_terms(datum, grid.x_pi_mult(n), grid)
        if res.is_sentinel:
            raise CacheCoverage("residue term sentinel")
        acc = acc + res
        resid_mid[n] = res.mid_complex()
        mids[n] = acc.mid_complex()
        # per-sample series radius: ball radii + cache remainder for the
        # coefficients actually summed
        ball_rad[n] = float(acc.rad_upper()) + rem * abs_summed
        if progress and n % 512 == 0:
            progress(n, nq + 1)
    return HatF(mids, ball_rad, trunc_rad, np.zeros(nq + 1), resid_mid)


def alias_correct_hatf(hatf, datum, grid, C, alpha, shift_c=0.0):
    """Add the frequency-side alias sums: residue parts exactly, the rest as
    the asymptotic-range bound at x' = 2 pi A -+ x_n (conjugate side via
    F-hat(-x) = conj F-hat(x)); requires A >= 1/(2 pi)."""
    if float(grid.A) < 1 / (2 * math.pi):
        raise HypothesisFailed("A < 1/(2 pi)")
    nq = grid.q // 2
    out_m = hatf.mids.copy()
    alias = hatf.alias_rad.copy()
    r, delta, mu_bar, nus, Kc, c, cp = _tail_constants(datum, grid.eta, C, alpha)
    N = datum.conductor_N
    A_f = float(grid.A)
    B_f = float(grid.B)

    def theta_bound(xv):
        logX = (math.log(math.pi * r * delta) - delta + 2 * xv / r
                - math.log(N) / r)
        if logX > 300:
            return 1e-280
        X = math.exp(logX)
        if not X > max(cp, r):
            raise HypothesisFailed("alias_x: below asymptotic range")
        logv = (math.log(Kc) + mu_bar * (xv - 0.5 * math.log(N)) - X
                + math.log(1 + (C * r / 2) / (X - cp))
                - math.log(max(1 - math.exp(-math.pi * A_f), 1e-300)))
        for nu in nus:
            logv += nu * math.log(1 + r * nu / X)
        return math.exp(min(logv, 500.0)) * (1 + 1e-9)

    for n in range(nq + 1):
        x = 2 * math.pi * n / B_f
        alias[n] += theta_bound(x + 2 * math.pi * A_f)
        alias[n] += theta_bound(2 * math.pi * A_f - x)
    # exact alias residue corrections (only when poles exist)
    if datum.poles:
        for n in range(nq + 1):
            ra = _alias_residue(datum, grid, n, shift_c, conj_side=False)
            rb = _alias_residue(datum, grid, n, shift_c, conj_side=True)
            if ra.is_sentinel or rb.is_sentinel:
                raise HypothesisFailed("alias residue sentinel")
            out_m[n] += ra.mid_complex() + np.conj(rb.mid_complex())
            alias[n] += float(ra.rad_upper()) + float(rb.rad_upper())
    return HatF(out_m, hatf.ball_rad, hatf.trunc_rad, alias, hatf.resid_mid,
                corrected=True)


def _alias_residue(datum, grid, n, shift_c, conj_side):
    """Residue part of sum_{k>=1} F-hat(+-x_n + 2 pi k A) (phases for grid
    shift c included; `conj_side` selects the -x_n branch, to be conjugated
    by the caller)."""
    poles = datum.pole_list()
    r = datum.degree_r
    out = ComplexBall(RealBall.exact(0))
    sign = -1 if conj_side else +1
    x = pi_ball() * RealBall(Fraction(2 * sign * n) / grid.B)
    theta = pi_ball() * RealBall(Fraction(r, 4) * grid.eta)
    A2pi = pi_ball() * RealBall(2 * Fraction(grid.A))
    for lam, res in poles:
        s = ComplexBall(RealBall.exact(1)) + lam
        hms = ComplexBall(RealBall(Fraction(1, 2))) - s
        w = ComplexBall(x, theta)
        base = res * (w * hms).exp()
        if shift_c:
            base = base * ComplexBall(RealBall.exact(0), x * RealBall(shift_c)).exp()
        g_exp = ComplexBall(A2pi) * hms
        if shift_c:
            g_exp = g_exp + ComplexBall(RealBall.exact(0), A2pi * RealBall(shift_c))
        g = g_exp.exp()
        denom = ComplexBall(RealBall.exact(1)) - g
        if denom.abs2().contains_zero():
            return ComplexBall.sentinel()
        out = out + base * g / denom
    return -out


@dataclass
class ZGrid:
    """Certified grid of Lambda(1/2 + i t) values (t = m/A + c)."""
    datum: object
    grid: GridSpec
    shift_c: float
    lam_mid: np.ndarray         # complex midpoints of Lambda(1/2 + i t_m)
    lam_rad: np.ndarray         # total radius (all sources)
    ledger: dict                # per-source radius arrays / scalars
    t_used_max: float           # ordinates beyond this are not certified

    def t_float(self, m):
        return m * float(self.grid.B) / self.grid.q + self.shift_c

    def t_exact(self, m):
        return Fraction(m) * self.grid.t_step + Fraction(self.shift_c) if self.shift_c else Fraction(m) * self.grid.t_step

    @property
    def n_used(self):
        return int(self.t_used_max / float(self.grid.t_step)) + 1

    def lam_ball(self, m):
        re = RealBall(mpfr(self.lam_mid[m].real), self.lam_rad[m])
        im = RealBall(mpfr(self.lam_mid[m].imag), self.lam_rad[m])
        return ComplexBall(re, im)

    def reality_ok(self, m):
        return abs(self.lam_mid[m].imag) <= self.lam_rad[m]

    def sign3(self, m):
        """Sign of Lambda (equivalently of Z) at grid point m."""
        v = self.lam_mid[m].real
        r = self.lam_rad[m] + abs(self.lam_mid[m].imag)
        if v - r > 0:
            return Sign3.POSITIVE
        if v + r < 0:
            return Sign3.NEGATIVE
        return Sign3.INDETERMINATE

    def z_value(self, m):
        """Z(t) = Lambda(1/2+it)/|gamma(1/2+it)| as a RealBall (lazy)."""
        t = RealBall(mpfr(self.t_float(m)))
        g = abs_gamma_half_line(self.datum, t)
        lam_re = RealBall(mpfr(self.lam_mid[m].real),
                          self.lam_rad[m] + abs(self.lam_mid[m].imag))
        return lam_re / g

    def export_rows(self):
        rows = []
        for m in range(self.n_used):
            z = self.z_value(m)
            rows.append({
                "t": self.t_float(m),
                "z_mid": float(z.mid), "z_rad": float(z.rad),
                "lambda_re": self.lam_mid[m].real,
                "lambda_im": self.lam_mid[m].imag,
                "rad_total": self.lam_rad[m],
                "rad_series": self.ledger["series"],
                "rad_trunc": self.ledger["trunc"],
                "rad_alias_x": self.ledger["alias_x"],
                "rad_dft": self.ledger["dft"],
                "rad_alias_t": self.ledger["alias_t"],
            })
        return rows


def _lambdasum_bound(datum, grid, t_ref, side):
    """lem-Lambdasum: bound for |sum_{k>=0} F(t_ref + k * side * B)|."""
    r = datum.degree_r
    theta = datum.theta
    eta = float(grid.eta)
    s = ComplexBall(RealBall(Fraction(1, 2)), RealBall(mpfr(t_ref)))
    beta = pi_ball() * RealBall(Fraction(r, 4))
    for mu in datum.mu_balls():
        zz = s + mu
        im = zz.im
        re = zz.re
        if side > 0 and not im.lower() > 0:
            raise HypothesisFailed("Im(s+mu) not positive")
        if side < 0 and not im.upper() < 0:
            raise HypothesisFailed("Im(s+mu) not negative")
        beta = beta - (re / abs(im)).atan() * RealBall(Fraction(1, 2))
        denom = abs(im.sq() - re.sq())
        if denom.contains_zero():
            raise HypothesisFailed("Im^2 = Re^2 degenerate")
        beta = beta - (RealBall(4) / (pi_ball() * pi_ball())) / denom
    tilt = pi_ball() * RealBall(Fraction(r, 4) * grid.eta)
    rate = beta - tilt if side > 0 else beta + tilt
    if not rate.lower() > 0:
        raise HypothesisFailed(f"beta -+ pi r eta/4 = {float(rate.mid):.3g} <= 0")
    if datum.theta:
        zt = (zeta_em(RealBall(Fraction(3, 2)) + RealBall(datum.theta)) *
              zeta_em(RealBall(Fraction(3, 2)) - RealBall(datum.theta))).sqrt()
    else:
        zt = zeta_real(RealBall(Fraction(3, 2)))
    E = zt ** r
    E = E * abs_gamma_half_line(datum, RealBall(mpfr(t_ref)))
    E = E * (tilt * RealBall(mpfr(t_ref))).exp()
    Q = analytic_conductor(datum, s)
    P = pole_polynomial_abs(datum, s)
    E = E * (abs(Q) * P).sqrt()
    geom = RealBall.exact(1) - (-(rate * RealBall(Fraction(grid.B)))).exp()
    return (E / geom).upper()



def invert_to_zgrid(hatf, datum, grid, shift_c=0.0, t_used_max=None):
    """Inverse DFT of the corrected F-hat samples -> certified Lambda grid.

    Time-side aliases are bounded by lem-Lambdasum at the window edges (one
    uniform bound for all used points); the DFT runs on midpoints with input
    radii and a worst-case float64 rounding model accumulated into the
    ledger.
    """
    if not hatf.corrected:
        raise ValueError("alias-correct the samples first")
    q = grid.q
    nq = q // 2
    B_f = float(grid.B)
    if t_used_max is None:
        t_used_max = 0.45 * B_f
    if t_used_max >= B_f / 2:
        raise ValueError("t_used_max must stay below B/2")
    H = np.zeros(q, dtype=np.complex128)
    H[:nq + 1] = hatf.mids
    if shift_c:
        x = 2 * np.pi * np.arange(nq + 1) / B_f
        H[:nq + 1] = H[:nq + 1] * np.exp(1j * x * shift_c)
    H[q - 1:nq:-1] = np.conj(H[1:nq])
    # per-sample radii count once for n and once (conjugate) for q-n
    vals = np.fft.ifft(H) * q * (2 * np.pi / B_f)
    absH = np.abs(H).sum()
    dft_round = 8 * math.log2(q) * 2.0 ** -52 * absH * (2 * np.pi / B_f)
    scale = 2 * np.pi / B_f
    ledger = {
        "series": float((hatf.ball_rad[0] + hatf.ball_rad[nq]
                         + 2 * hatf.ball_rad[1:nq].sum()) * scale),
        "trunc": float((hatf.trunc_rad[0] + hatf.trunc_rad[nq]
                        + 2 * hatf.trunc_rad[1:nq].sum()) * scale),
        "alias_x": float((hatf.alias_rad[0] + hatf.alias_rad[nq]
                          + 2 * hatf.alias_rad[1:nq].sum()) * scale),
        "dft": dft_round,
    }
    # time-side aliases: k >= 1 at t + B (worst at smallest ordinate) and
    # k <= -1 at t - B (worst at largest used ordinate)
    up = _lambdasum_bound(datum, grid, shift_c + B_f, +1)
    dn = _lambdasum_bound(datum, grid, t_used_max + shift_c - B_f, -1)
    alias_t = float(up) + float(dn)
    ledger["alias_t"] = alias_t
    total = ledger["series"] + ledger["trunc"] + ledger["alias_x"] + dft_round + alias_t
    # Lambda = F(t) e^{-pi r eta t /4}
    mgrid = np.arange(q)
    tgrid = mgrid * B_f / q + shift_c
    tilt = np.exp(-math.pi * datum.degree_r * float(grid.eta) * tgrid / 4)
    lam_mid = vals * tilt
    lam_rad = total * tilt
    return ZGrid(datum, grid, shift_c, lam_mid, lam_rad, ledger, t_used_max)


def evaluate_grid(datum, stream, grid, cache, C, alpha, shift_c=0.0,
                  t_used_max=None, _hatf_memo=None):
    """Full pipeline for one grid offset; returns the certified ZGrid."""
    if _hatf_memo is not None and "hatf" in _hatf_memo:
        hatf = _hatf_memo["hatf"]
    else:
        blocks = compute_skm(stream, datum, grid)
        hatf = hatf_samples(blocks, cache, datum, grid, C, alpha)
        if _hatf_memo is not None:
            _hatf_memo["hatf"] = hatf
    corrected = alias_correct_hatf(hatf, datum, grid, C, alpha, shift_c=shift_c)
    return invert_to_zgrid(corrected, datum, grid, shift_c=shift_c,
                           t_used_max=t_used_max)
