"""Magnetostatic kernel functions for a rectangular film cross-section.

The central object is the single-integral kernel

    I(l, d, x) = 2*pi*l*d * int_0^inf sinc^2(t) * g(2*(d/l)*sqrt(t^2 + l^2 x^2)) dt,

with g(u) = (1 - exp(-u))/u, together with its aspect-ratio specialisations

    a_c = int_0^inf sinc^2(t) * g(2 t / c) dt,        b_c = a_{1/c},

and the explicit two-sided closed-form bounds on I(d, l, x).  The kernel
weights the transverse magnetization spectra in the surface-charge energy.

Every function here is pure and reentrant; sweep drivers may call them
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .quad import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    QuadratureResult,
    integrate_finite,
    integrate_semi_infinite,
)

__all__ = [
    "CrossSection",
    "KernelBoundTriple",
    "Lemma32Sample",
    "Lemma32Report",
    "a_c",
    "b_c",
    "i_kernel",
    "lemma32_bounds",
    "verify_lemma32",
    "a_c_scaling_ratio",
]

# Below this aspect ratio the integrand has a boundary layer at t ~ c that a
# plain adaptive pass over [0, split] can miss; a log-variable pass resolves it.
_LAYER_THRESHOLD = 0.05
# exp(-_LOG_SPAN) bounds the relative weight of the skipped [0, t_min] sliver.
_LOG_SPAN = 40.0
# 1 - exp(-u) is exactly 1.0 in double precision beyond 40*ln(10).
_EXP_CUTOFF = 40.0 * math.log(10.0)


@dataclass(frozen=True)
class CrossSection:
    """Half-width l and half-thickness d of the film cross-section.

    The standing assumption 0 < d <= l holds throughout, so the aspect ratio
    c = d/l lies in (0, 1].
    """

    l: float
    d: float
    c: float = field(init=False)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.l) and math.isfinite(self.d)):
            raise ValueError("cross-section dimensions must be finite")
        if not (0.0 < self.d <= self.l):
            raise ValueError(f"require 0 < d <= l, got l={self.l!r}, d={self.d!r}")
        object.__setattr__(self, "c", self.d / self.l)


@dataclass(frozen=True)
class KernelBoundTriple:
    """Closed-form bounds on I(d, l, x) for one cross-section.

    upper_i   = 2*pi*l*d*a_c          (valid for all x)
    upper_ii  = pi*l*d*c*(3 - ln c)   (valid for all x)
    lower_iii = pi*l*d*c*|ln c|*(1 - 5/sqrt(|ln c|))   (valid for |x| <= 1/l)

    lower_iii is reported as-is even when it is negative; `vacuous` flags that
    case rather than clamping the formula.
    """

    upper_i: float
    upper_ii: float
    lower_iii: float
    vacuous: bool


def _sinc_sq(t: float) -> float:
    # sin^2(t)/t^2 with the removable singularity at t = 0 filled by series
    if abs(t) < 1e-4:
        t2 = t * t
        return 1.0 - t2 / 3.0 + 2.0 * t2 * t2 / 45.0
    s = math.sin(t) / t
    return s * s


def _em1_over(u: float) -> float:
    # (1 - exp(-u))/u for u >= 0; expm1 keeps full precision near 0
    if u == 0.0:
        return 1.0
    if u > _EXP_CUTOFF:
        return 1.0 / u
    return -math.expm1(-u) / u


def _scaled_config(cfg: QuadratureConfig, scale: float) -> QuadratureConfig:
    """Tighten abs_tol so a result of magnitude `scale` keeps relative accuracy."""
    abs_tol = min(cfg.abs_tol, cfg.rel_tol * scale) if cfg.rel_tol > 0 else cfg.abs_tol
    return QuadratureConfig(
        abs_tol=abs_tol,
        rel_tol=cfg.rel_tol,
        max_subdivisions=cfg.max_subdivisions,
        semi_infinite_split=cfg.semi_infinite_split,
    )


def _kernel_profile_integral(r: float, sx: float, cfg: QuadratureConfig) -> QuadratureResult:
    """int_0^inf sinc^2(t) * g(2*r*sqrt(t^2 + sx^2)) dt for r > 0.

    The a_c family is the special case sx = 0.  For small 1/r the integrand
    has a layer at t ~ 1/r resolved in the log variable; the oscillatory part
    beyond t = 1 goes through the semi-infinite integrator.
    """
    c_eff = 1.0 / r

    def f(t: float) -> float:
        return _sinc_sq(t) * _em1_over(2.0 * r * math.hypot(t, sx))

    if c_eff < 1.0:
        scale = 0.5 * c_eff * (3.0 + abs(math.log(c_eff)))
    else:
        scale = math.pi / 2.0
    scfg = _scaled_config(cfg, scale)

    if c_eff >= _LAYER_THRESHOLD:
        return integrate_semi_infinite(f, 0.0, scfg)

    piece_cfg = QuadratureConfig(
        abs_tol=scfg.abs_tol / 3.0,
        rel_tol=scfg.rel_tol / 3.0,
        max_subdivisions=scfg.max_subdivisions,
        semi_infinite_split=scfg.semi_infinite_split,
    )
    t_min = c_eff * math.exp(-_LOG_SPAN)

    def f_log(u: float) -> float:
        t = math.exp(u)
        return f(t) * t

    head = integrate_finite(f_log, math.log(t_min), 0.0, piece_cfg)
    tail = integrate_semi_infinite(f, 1.0, piece_cfg)
    # the skipped [0, t_min] sliver is below t_min since the integrand is <= 1
    return QuadratureResult(
        value=head.value + tail.value + 0.5 * t_min,
        error_estimate=head.error_estimate + tail.error_estimate + t_min,
        subdivisions_used=head.subdivisions_used + tail.subdivisions_used,
    )


def _a_c_result(c: float, cfg: QuadratureConfig) -> QuadratureResult:
    if not (math.isfinite(c) and c > 0.0):
        raise ValueError(f"aspect ratio must be positive and finite, got {c!r}")
    return _kernel_profile_integral(1.0 / c, 0.0, cfg)


def a_c(c: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Surface-charge kernel coefficient (c/2) int sinc^2(t) (1-e^{-2t/c})/t dt.

    Strictly increasing in c, with range (0, pi/2).  For c < 1 the value is
    bracketed by (c|ln c|/2)(1 - 5/sqrt(|ln c|)) and (c/2)(3 - ln c).
    """
    return _a_c_result(c, cfg).value


def b_c(c: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Complementary kernel coefficient, by definition a_{1/c}."""
    if not (math.isfinite(c) and c > 0.0):
        raise ValueError(f"aspect ratio must be positive and finite, got {c!r}")
    return a_c(1.0 / c, cfg)


def _i_kernel_result(
    cs: CrossSection, swap: bool, x: float, cfg: QuadratureConfig
) -> QuadratureResult:
    if not math.isfinite(x):
        raise ValueError(f"frequency must be finite, got {x!r}")
    prefactor = 2.0 * math.pi * cs.l * cs.d
    if x == 0.0:
        # the radical reduces to t, so I(d,l,0) = 2*pi*l*d*a_c exactly
        # (and I(l,d,0) = 2*pi*l*d*b_c)
        inner = _a_c_result(cs.c if swap else 1.0 / cs.c, cfg)
    else:
        if swap:
            r, s = cs.l / cs.d, cs.d
        else:
            r, s = cs.c, cs.l
        inner = _kernel_profile_integral(r, s * abs(x), cfg)
    return QuadratureResult(
        value=prefactor * inner.value,
        error_estimate=prefactor * inner.error_estimate,
        subdivisions_used=inner.subdivisions_used,
    )


def i_kernel(
    cs: CrossSection, swap: bool, x: float, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> float:
    """Surface-charge kernel I at frequency x.

    swap=False computes I(l, d, x) (weights the third magnetization
    component); swap=True computes I(d, l, x) (weights the second).  The
    kernel is even in x, nonnegative, and finite for all x including 0.
    """
    return _i_kernel_result(cs, swap, x, cfg).value


def lemma32_bounds(cs: CrossSection, cfg: QuadratureConfig = DEFAULT_CONFIG) -> KernelBoundTriple:
    """Evaluate the three closed-form bound expressions on I(d, l, x).

    The (ii) and (iii) expressions are pure arithmetic; the (i) expression is
    2*pi*l*d*a_c and needs the one-dimensional a_c quadrature (but never the
    kernel integral itself).
    """
    pld = math.pi * cs.l * cs.d
    c = cs.c
    upper_i = 2.0 * pld * a_c(c, cfg)
    upper_ii = pld * c * (3.0 - math.log(c))
    ln_abs = abs(math.log(c))
    if ln_abs == 0.0:
        lower_iii = 0.0
    else:
        lower_iii = pld * c * ln_abs * (1.0 - 5.0 / math.sqrt(ln_abs))
    return KernelBoundTriple(
        upper_i=upper_i,
        upper_ii=upper_ii,
        lower_iii=lower_iii,
        vacuous=lower_iii <= 0.0,
    )


@dataclass(frozen=True)
class Lemma32Sample:
    """Margins of the kernel bounds at one frequency sample.

    Margins are `bound - value` for the upper bounds and `value - bound` for
    the lower one, so a nonnegative margin means the inequality holds.
    lower_margin is None outside |x| <= 1/l where the lower bound is not
    claimed.
    """

    x: float
    kernel_value: float
    upper_i_margin: float
    upper_ii_margin: float
    lower_margin: float | None
    budget: float
    passed: bool


@dataclass(frozen=True)
class Lemma32Report:
    cross_section: CrossSection
    bounds: KernelBoundTriple
    samples: tuple[Lemma32Sample, ...]
    passed: bool

    def failures(self) -> list[Lemma32Sample]:
        return [s for s in self.samples if not s.passed]


def verify_lemma32(
    cs: CrossSection,
    x_samples: list[float],
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> Lemma32Report:
    """Check the two-sided kernel bounds against quadrature at given samples.

    Each sample must satisfy I(d,l,x) <= upper_i and <= upper_ii; samples with
    |x| <= 1/l must additionally satisfy I(d,l,x) >= lower_iii.  Violations
    beyond the quadrature error budget mark the sample (and the report) as
    failed.
    """
    if len(x_samples) == 0:
        raise ValueError("x_samples must be nonempty")
    bounds = lemma32_bounds(cs, cfg)
    bound_err = _a_c_result(cs.c, cfg).error_estimate * 2.0 * math.pi * cs.l * cs.d
    samples = []
    all_ok = True
    for x in x_samples:
        res = _i_kernel_result(cs, True, x, cfg)
        budget = 10.0 * (res.error_estimate + bound_err) + 1e-14 * bounds.upper_ii
        m_i = bounds.upper_i - res.value
        m_ii = bounds.upper_ii - res.value
        ok = m_i >= -budget and m_ii >= -budget
        m_lo: float | None = None
        if abs(x) <= 1.0 / cs.l:
            m_lo = res.value - bounds.lower_iii
            ok = ok and m_lo >= -budget
        all_ok = all_ok and ok
        samples.append(
            Lemma32Sample(
                x=x,
                kernel_value=res.value,
                upper_i_margin=m_i,
                upper_ii_margin=m_ii,
                lower_margin=m_lo,
                budget=budget,
                passed=ok,
            )
        )
    return Lemma32Report(
        cross_section=cs, bounds=bounds, samples=tuple(samples), passed=all_ok
    )


def a_c_scaling_ratio(c: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """a_c / (c |ln c|), which tends to 1/2 as c -> 0."""
    if not (0.0 < c < 1.0):
        raise ValueError(f"require 0 < c < 1, got {c!r}")
    return a_c(c, cfg) / (c * abs(math.log(c)))
