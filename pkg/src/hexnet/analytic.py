"""Analytical pipeline: association probabilities, serving-distance laws,
interference Laplace transforms, coverage, and average rate.

Everything is driven by one distance density ``f_Z`` (module geometry), the
LOS/NLOS marking probabilities (module propagation), and the six exclusion
boundaries (module exclusion).  The three association events condition the
remaining APs to truncated i.i.d. distance laws, which turns every metric
into nested 1-D integrals; derivatives of the interference Laplace transforms
are carried through the quadrature as jets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from .antenna import desired_gain_pmf, interferer_gain_pmf, mean_desired_gain
from .errors import DegenerateEvent, NumericalInconsistency
from .exclusion import ExclusionRegions
from .geometry import distance_pdf, support
from .numerics.jets import Jet, affine_power
from .numerics.quadrature import (
    Quadrature,
    TailIntegral,
    integrate,
    integrate_semiinfinite,
)
from .params import NetworkConfig, derived_constants
from .propagation import kappa_los, kappa_nlos

EVENTS = ("L", "N", "R")

#: association probability below which conditional laws are undefined
DEGENERATE_EVENT_TOL = 1e-12

#: tolerated numerical spill of a probability outside [0, 1]
PROBABILITY_SPILL_TOL = 1e-6


@dataclass(frozen=True)
class TierMetrics:
    """One scalar per association event (LOS THz, NLOS THz, RF)."""

    los: float
    nlos: float
    rf: float

    def get(self, event: str):
        return {"L": self.los, "N": self.nlos, "R": self.rf}[event]

    @property
    def total(self):
        return self.los + self.nlos + self.rf


@dataclass(frozen=True)
class CoverageReport:
    assoc: TierMetrics
    cond_coverage: TierMetrics
    total_coverage: float
    cond_rate: TierMetrics      # bits/s
    total_rate: float           # bits/s


class AnalyticEngine:
    """Per-config caches and the quadrature pipeline.

    The outer expectations over the serving distance run at ``rel_tol``; the
    inner interference integrals run 10x tighter, and the tail caches another
    three decades tighter so they are effectively exact for the outer loops.
    """

    def __init__(self, cfg: NetworkConfig, rel_tol: float = 1e-7):
        if cfg.radio.B_T <= 0.0:
            raise ValueError(
                "the analytic pipeline needs B_T > 0; B_T = 0 association "
                "semantics are only defined for the Monte-Carlo engine"
            )
        self.cfg = cfg
        g, r = cfg.geometry, cfg.radio
        self.sup = support(cfg)
        self.der = derived_constants(cfg)
        self.n_thz = g.n_thz
        self.n_rf = g.n_rf
        self.mean_gain = mean_desired_gain(cfg.antenna)
        self.pmf_desired = desired_gain_pmf(cfg.antenna)
        self.pmf_interf = interferer_gain_pmf(cfg.antenna)
        self.excl = ExclusionRegions(self.sup.z_l, self.sup.z_p, r, self.mean_gain)

        self.q_outer = Quadrature(rel_tol=rel_tol, abs_tol=1e-11)
        # pre-split the inner interval: the MGF kernels turn over close to the
        # lower limit, and seeding panels there saves refinement sweeps
        zl, zp = self.sup.z_l, self.sup.z_p
        seeds = tuple(zl + (zp - zl) * f for f in (0.03, 0.12, 0.3, 0.6))
        self.q_inner = Quadrature(rel_tol=rel_tol * 0.1, abs_tol=1e-13,
                                  breakpoints=tuple(sorted({self.sup.z_m, *seeds})))
        self.q_rate_t = Quadrature(rel_tol=max(10 * rel_tol, 1e-6), abs_tol=1e-9)
        q_tail = Quadrature(rel_tol=1e-11, abs_tol=1e-15,
                            breakpoints=(self.sup.z_m,))

        self._fz = lambda z: distance_pdf(z, self.sup, g.v_0, g.r_d)
        self._kl = lambda z: kappa_los(z, self.der.beta, self.der.delta_h)
        self._kn = lambda z: kappa_nlos(z, self.der.beta, self.der.delta_h)
        self.S1 = TailIntegral(self._fz, self.sup.z_l, self.sup.z_p, q_tail)
        self.SL = TailIntegral(lambda z: self._fz(z) * self._kl(z),
                               self.sup.z_l, self.sup.z_p, q_tail)
        self.SN = TailIntegral(lambda z: self._fz(z) * self._kn(z),
                               self.sup.z_l, self.sup.z_p, q_tail)

        amp_thz = r.P_T * r.gamma_T
        amp_rf = r.P_R * r.gamma_R
        # gain atoms of probability zero contribute nothing to the outer sums
        des_g = np.asarray(self.pmf_desired.gains)
        des_p = np.asarray(self.pmf_desired.probs)
        des_g, des_p = des_g[des_p > 0], des_p[des_p > 0]
        int_g = np.asarray(self.pmf_interf.gains)
        int_p = np.asarray(self.pmf_interf.probs)
        int_g, int_p = int_g[int_p > 0], int_p[int_p > 0]
        # per-event tables: serving-side quantities and the interferer mixture
        # segments (lower-limit fn, kappa fn, amplitude, absorption, alpha, m)
        seg_los = (self._kl, amp_thz, r.k_a, r.alpha_L, r.m_L)
        seg_nlos = (self._kn, amp_thz, r.k_a, r.alpha_N, r.m_N)
        seg_rf = (None, amp_rf, 0.0, r.alpha_R, 1)
        self._ev = {
            "L": dict(m=r.m_L, alpha=r.alpha_L, amp=amp_thz, k_a=r.k_a,
                      sigma2=r.sigma2_T, bw=r.W_T,
                      gains=des_g, probs=des_p,
                      int_gains=int_g, int_probs=int_p,
                      bracket_exp=self.n_thz - 1,
                      segments=((lambda x: x, seg_los),
                                (self.excl.e_ln, seg_nlos))),
            "N": dict(m=r.m_N, alpha=r.alpha_N, amp=amp_thz, k_a=r.k_a,
                      sigma2=r.sigma2_T, bw=r.W_T,
                      gains=des_g, probs=des_p,
                      int_gains=int_g, int_probs=int_p,
                      bracket_exp=self.n_thz - 1,
                      segments=((lambda x: x, seg_nlos),
                                (self.excl.e_nl, seg_los))),
            "R": dict(m=1, alpha=r.alpha_R, amp=amp_rf, k_a=0.0,
                      sigma2=r.sigma2_R, bw=r.W_R,
                      gains=np.asarray([1.0]), probs=np.asarray([1.0]),
                      int_gains=np.asarray([1.0]), int_probs=np.asarray([1.0]),
                      bracket_exp=self.n_rf - 1,
                      segments=((lambda x: x, seg_rf),)),
        }
        self._assoc: Optional[TierMetrics] = None
        self._breaks: dict[str, tuple] = {}

    # -- serving-distance machinery --------------------------------------------

    def _event_breakpoints(self, event: str) -> tuple:
        """Panel breakpoints: density kink, piecewise thresholds, and the radii
        where an exclusion boundary crosses z_m or z_p."""
        if event in self._breaks:
            return self._breaks[event]
        ex, sup = self.excl, self.sup
        zm, zp = sup.z_m, sup.z_p
        if event == "L":
            cands = [zm, ex.h_lr, ex.h_ln, ex.e_rl(zm), ex.e_rl(zp),
                     ex.e_nl(zm), ex.e_nl(zp)]
        elif event == "N":
            cands = [zm, ex.h_nr, ex.h_nl, ex.e_rn(zm), ex.e_rn(zp),
                     ex.e_ln(zm), ex.e_ln(zp)]
        else:
            cands = [zm, ex.h_rl, ex.h_rn, ex.e_lr(zm), ex.e_lr(zp),
                     ex.e_nr(zm), ex.e_nr(zp)]
        out = tuple(sorted({float(c) for c in cands
                            if math.isfinite(c) and sup.z_l < c < zp}))
        self._breaks[event] = out
        return out

    def _weight(self, event: str, x):
        """Unnormalized serving-distance density of one association event."""
        x = np.asarray(x, dtype=float)
        fz = self._fz(x)
        ex = self.excl
        if event == "L":
            out = self.n_thz * fz * self._kl(x)
            if self.n_rf > 0:
                out = out * self.S1(ex.e_lr(x)) ** self.n_rf
            if self.n_thz > 1:
                out = out * (self.SL(x) + self.SN(ex.e_ln(x))) ** (self.n_thz - 1)
        elif event == "N":
            out = self.n_thz * fz * self._kn(x)
            if self.n_rf > 0:
                out = out * self.S1(ex.e_nr(x)) ** self.n_rf
            if self.n_thz > 1:
                out = out * (self.SN(x) + self.SL(ex.e_nl(x))) ** (self.n_thz - 1)
        else:
            out = self.n_rf * fz
            if self.n_rf > 1:
                out = out * self.S1(x) ** (self.n_rf - 1)
            if self.n_thz > 0:
                out = out * (self.SL(ex.e_rl(x)) + self.SN(ex.e_rn(x))) ** self.n_thz
        return out

    def assoc_probabilities(self) -> TierMetrics:
        if self._assoc is not None:
            return self._assoc
        sup = self.sup
        if self.n_thz == 0:
            self._assoc = TierMetrics(0.0, 0.0, 1.0)
            return self._assoc
        vals = {}
        for event in EVENTS:
            if event == "R" and self.n_rf == 0:
                vals["R"] = 0.0
                continue
            q = Quadrature(rel_tol=self.q_outer.rel_tol, abs_tol=self.q_outer.abs_tol,
                           breakpoints=self._event_breakpoints(event))
            vals[event] = integrate(lambda x, e=event: self._weight(e, x),
                                    sup.z_l, sup.z_p, q).value
        self._assoc = TierMetrics(vals["L"], vals["N"], vals["R"])
        return self._assoc

    def serving_distance_pdf(self, event: str, x):
        a = self.assoc_probabilities().get(event)
        if a <= DEGENERATE_EVENT_TOL:
            raise DegenerateEvent(
                f"association probability for event {event} is {a!r}"
            )
        return self._weight(event, x) / a

    # -- interference Laplace transforms ----------------------------------------

    def _laplace_coeffs(self, event: str, nu0, order: int, x_serv: float):
        """Taylor coefficients (order+1, M) of L_I at M expansion points.

        The normalizing denominator is integrated on the same panels as the
        MGF kernels (an extra constant component), so L(0) = 1 holds to
        machine precision by construction.
        """
        ev = self._ev[event]
        nu0 = np.atleast_1d(np.asarray(nu0, dtype=float))
        m_pts = nu0.size
        k1 = order + 1
        n_exp = ev["bracket_exp"]
        if n_exp == 0:
            out = np.zeros((k1, m_pts))
            out[0] = 1.0
            return out

        gains = ev["int_gains"]
        probs = ev["int_probs"]
        n_g = gains.size
        zp = self.sup.z_p
        num = np.zeros((m_pts, n_g, k1))
        den = 0.0
        nu_col = nu0.reshape(1, m_pts, 1)
        for lower_fn, (kap, amp, k_abs, alpha, m_seg) in ev["segments"]:
            lo = float(lower_fn(x_serv))
            if not math.isfinite(lo) or lo >= zp:
                continue
            lo = max(lo, self.sup.z_l)

            def seg_integrand(y, kap=kap, amp=amp, k_abs=k_abs, alpha=alpha,
                              m_seg=m_seg):
                w = self._fz(y)
                if kap is not None:
                    w = w * kap(y)
                c = amp * np.exp(-k_abs * y) * y ** (-alpha)
                ctil = (c[:, None, None] / m_seg) * gains.reshape(1, 1, n_g)
                # the kernel is affine in the Laplace argument
                ker = affine_power(1.0 + nu_col * ctil, ctil, -float(m_seg),
                                   order)
                kc = np.moveaxis(ker.coeffs, 0, -1)    # (n, M, J, K+1)
                kc = kc * w[:, None, None, None]
                return np.concatenate(
                    [kc.reshape(y.size, -1), w[:, None]], axis=1)

            res = integrate(seg_integrand, lo, zp, self.q_inner).value
            num += res[:-1].reshape(m_pts, n_g, k1)
            den += float(res[-1])

        if den <= 0.0 or not math.isfinite(den):
            out = np.zeros((k1, m_pts))
            out[0] = 1.0
            return out
        bracket = np.tensordot(num, probs, axes=([1], [0])) / den  # (M, K+1)
        bracket_jet = Jet(np.moveaxis(bracket, -1, 0))
        return (bracket_jet ** float(n_exp)).coeffs

    def laplace_interference(self, event: str, s, x_serv: float):
        """Laplace transform of the conditional interference at s.

        Scalar s returns a float; a Jet argument returns the composed Jet,
        i.e. derivatives with respect to the jet's variable.
        """
        if isinstance(s, Jet):
            if np.any(s.value < 0):
                raise ValueError("laplace_interference requires s >= 0")
            coeffs = self._laplace_coeffs(event, np.atleast_1d(s.value).ravel(),
                                          s.order, x_serv)
            own = Jet(coeffs.reshape((s.order + 1,) + np.shape(s.value)))
            return own.compose_into(s)
        if s < 0:
            raise ValueError("laplace_interference requires s >= 0")
        coeffs = self._laplace_coeffs(event, [float(s)], 0, x_serv)
        return float(coeffs[0, 0])

    # -- coverage and rate -------------------------------------------------------

    def _s_factor(self, event: str, x: float) -> float:
        """s(x) at unit threshold; multiply by theta (or by t) to finish."""
        ev = self._ev[event]
        if event == "R":
            return x ** ev["alpha"] / ev["amp"]
        return ev["m"] * math.exp(ev["k_a"] * x) * x ** ev["alpha"] / ev["amp"]

    def _assemble_ccdf(self, event: str, s_vals, l_coeffs):
        """Combine Laplace derivatives into the conditional SINR tail.

        ``s_vals`` has shape () or (T,), ``l_coeffs`` (K+1, [T,] n_gains).
        All series terms are positive (the gamma-tail structure), so the sum
        is numerically benign.
        """
        ev = self._ev[event]
        m = ev["m"]
        gains = ev["gains"]
        probs = ev["probs"]
        s_arr = np.atleast_1d(np.asarray(s_vals, dtype=float))
        nu = s_arr[:, None] / gains            # (T, Kk)
        lam = s_arr[:, None] * (ev["sigma2"] / gains)
        lc = l_coeffs.reshape(m, s_arr.size, gains.size)

        pois = np.empty((m, s_arr.size, gains.size))
        pois[0] = np.exp(-lam)
        for j in range(1, m):
            pois[j] = pois[j - 1] * lam / j
        cum = np.cumsum(pois, axis=0)

        total = np.zeros((s_arr.size, gains.size))
        for u in range(m):
            total += (-1.0) ** u * nu**u * lc[u] * cum[m - 1 - u]
        out = total @ probs
        return out if np.ndim(s_vals) else float(out[0])

    def _coverage_kernel(self, event: str, x: float, thresholds) -> np.ndarray:
        """P[SINR > t | serving event, serving distance x] on a grid of t."""
        ev = self._ev[event]
        t_arr = np.atleast_1d(np.asarray(thresholds, dtype=float))
        s_vals = self._s_factor(event, x) * t_arr
        nu0 = (s_vals[:, None] / ev["gains"]).ravel()
        lc = self._laplace_coeffs(event, nu0, ev["m"] - 1, x)
        return self._assemble_ccdf(event, s_vals, lc)

    def _expect_over_serving(self, event: str, point_fn) -> float:
        """(1/A) * int w(x) point_fn(x) dx over the serving support."""
        a = self.assoc_probabilities().get(event)
        if a <= DEGENERATE_EVENT_TOL:
            raise DegenerateEvent(
                f"association probability for event {event} is {a!r}"
            )
        q = Quadrature(rel_tol=self.q_outer.rel_tol, abs_tol=self.q_outer.abs_tol,
                       breakpoints=self._event_breakpoints(event))

        def outer(xs):
            w = self._weight(event, xs)
            out = np.zeros_like(xs)
            for i, x in enumerate(xs):
                if w[i] > 0.0:
                    out[i] = w[i] * point_fn(float(x))
            return out

        return integrate(outer, self.sup.z_l, self.sup.z_p, q).value / a

    def conditional_coverage(self, event: str) -> float:
        theta = self.cfg.radio.theta
        val = self._expect_over_serving(
            event, lambda x: float(self._coverage_kernel(event, x, theta)[0]))
        if not -PROBABILITY_SPILL_TOL <= val <= 1.0 + PROBABILITY_SPILL_TOL:
            raise NumericalInconsistency(
                f"conditional coverage for event {event} is {val!r}"
            )
        return min(max(val, 0.0), 1.0)

    def conditional_rate(self, event: str) -> float:
        ev = self._ev[event]

        def mean_log(x):
            f_t = lambda ts: self._coverage_kernel(event, x, ts)
            return integrate_semiinfinite(f_t, self.q_rate_t).value

        val = self._expect_over_serving(event, mean_log)
        return ev["bw"] / math.log(2.0) * max(val, 0.0)

    def _per_event(self, fn) -> tuple[TierMetrics, float]:
        assoc = self.assoc_probabilities()
        vals = {}
        for event in EVENTS:
            if assoc.get(event) > DEGENERATE_EVENT_TOL:
                vals[event] = fn(event)
            else:
                vals[event] = math.nan
        total = sum(assoc.get(e) * vals[e] for e in EVENTS
                    if not math.isnan(vals[e]))
        return TierMetrics(vals["L"], vals["N"], vals["R"]), total

    def coverage(self) -> CoverageReport:
        cond, total = self._per_event(self.conditional_coverage)
        nan3 = TierMetrics(math.nan, math.nan, math.nan)
        return CoverageReport(self.assoc_probabilities(), cond, total,
                              nan3, math.nan)

    def rate(self) -> CoverageReport:
        cond, total = self._per_event(self.conditional_rate)
        nan3 = TierMetrics(math.nan, math.nan, math.nan)
        return CoverageReport(self.assoc_probabilities(), nan3, math.nan,
                              cond, total)

    def report(self) -> CoverageReport:
        cond_cov, total_cov = self._per_event(self.conditional_coverage)
        cond_rate, total_rate = self._per_event(self.conditional_rate)
        return CoverageReport(self.assoc_probabilities(), cond_cov, total_cov,
                              cond_rate, total_rate)


@lru_cache(maxsize=16)
def _engine(cfg: NetworkConfig) -> AnalyticEngine:
    return AnalyticEngine(cfg)


def assoc_probabilities(cfg: NetworkConfig) -> TierMetrics:
    return _engine(cfg).assoc_probabilities()


def serving_distance_pdf(event: str, x, cfg: NetworkConfig):
    return _engine(cfg).serving_distance_pdf(event, x)


def laplace_interference(event: str, s, x_serv: float, cfg: NetworkConfig):
    return _engine(cfg).laplace_interference(event, s, x_serv)


def conditional_coverage(event: str, cfg: NetworkConfig) -> float:
    return _engine(cfg).conditional_coverage(event)


def coverage(cfg: NetworkConfig) -> CoverageReport:
    return _engine(cfg).coverage()


def conditional_rate(event: str, cfg: NetworkConfig) -> float:
    return _engine(cfg).conditional_rate(event)


def rate(cfg: NetworkConfig) -> CoverageReport:
    return _engine(cfg).rate()


def full_report(cfg: NetworkConfig) -> CoverageReport:
    return _engine(cfg).report()
