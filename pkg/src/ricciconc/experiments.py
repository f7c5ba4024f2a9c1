"""Monte Carlo tail estimation for Lipschitz observables.

Draws exact samples from a space's invariant law (direct samplers, no
burn-in), rescales the observable by its Lipschitz constant so the
concentration guarantee applies with constant 1, and compares empirical
two-sided tails (with Wilson 99% confidence intervals) against the
analytic bound in each exponent variant.  The bound is evaluated at the
space's claimed curvature lower bound, mirroring how the guarantee is
applied; an exact curvature can be supplied for side-by-side columns.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bounds import VARIANTS, TailBoundSpec, solve_lambda0, tail_bound
from .errors import BadParams, MissingKappa, TooLarge
from .numeric import Number, to_fraction

#: Two-sided 99% normal quantile for Wilson intervals.
Z99 = 2.5758293035489004

#: Samples are drawn in chunks with independently derived substreams, so
#: partitioning across workers cannot change the aggregate.
CHUNK = 10_000


def wilson_interval(successes: int, trials: int, z: float = Z99) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise BadParams("trials must be positive")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def exact_expectation(space, f) -> Number:
    """E_nu[f] by full enumeration against the claimed invariant law.

    Exact (Fraction) when f is integer-valued; raises TooLarge past the
    enumeration cap, in which case callers fall back to a sample mean.
    """
    space.require_enumerable()
    total = Fraction(0)
    exact = True
    for cfg in space.iter_configs():
        v = f(cfg)
        if isinstance(v, float):
            exact = False
        total += to_fraction(v) * space.claimed_nu_config(cfg)
    return total if exact else float(total)


@dataclass
class TailReport:
    model: str
    params: dict
    observable: str
    normalization: float
    expectation: float
    expectation_exact: bool
    kappa: float
    kappa_is_exact_fallback: bool
    lambda0: float
    samples: int
    seed: int
    t: list = field(default_factory=list)
    empirical: list = field(default_factory=list)
    ci_lo: list = field(default_factory=list)
    ci_hi: list = field(default_factory=list)
    bound_seven: list = field(default_factory=list)
    bound_five: list = field(default_factory=list)
    bound_exact: list = field(default_factory=list)
    bound_exact_kappa: list | None = None

    def rows(self):
        for i in range(len(self.t)):
            yield {"t": self.t[i], "empirical": self.empirical[i],
                   "ci_lo": self.ci_lo[i], "ci_hi": self.ci_hi[i],
                   "bound_seven": self.bound_seven[i],
                   "bound_five": self.bound_five[i],
                   "bound_exact": self.bound_exact[i]}


def estimate_tail(space, f, lipschitz_c, t_grid, samples: int, seed: int,
                  *, observable: str = "f", exact_kappa=None,
                  min_samples: int = 10_000) -> TailReport:
    """Empirical two-sided tails of f / lipschitz_c versus the analytic bounds.

    Samples are exact draws from the invariant law; the expectation is the
    enumerated exact value when the space allows it and the sample mean
    (flagged) otherwise.  Bounds use kappa = claimed curvature lower bound;
    spaces without one (the transposition model) must supply `exact_kappa`,
    which is then used and flagged.
    """
    if samples < min_samples:
        raise BadParams(f"need at least {min_samples} samples, got {samples}")
    c = float(lipschitz_c)
    if c <= 0:
        raise BadParams("lipschitz_c must be positive")
    kappa_fallback = False
    if space.claimed_kappa_lb is not None:
        kappa = float(space.claimed_kappa_lb)
    elif exact_kappa is not None:
        kappa = float(exact_kappa)
        kappa_fallback = True
    else:
        raise MissingKappa(f"model {space.model} has no claimed curvature bound; "
                           "pass exact_kappa")
    t_values = [float(t) for t in t_grid]
    if any(b <= a for a, b in zip(t_values, t_values[1:])):
        raise BadParams("t grid must be strictly increasing")

    children = np.random.SeedSequence(seed).spawn(math.ceil(samples / CHUNK))
    values = np.empty(samples)
    pos = 0
    for child in children:
        rng = np.random.default_rng(child)
        take = min(CHUNK, samples - pos)
        for i in range(take):
            values[pos + i] = float(f(space.sample_config(rng))) / c
        pos += take

    try:
        mean = float(exact_expectation(space, f)) / c
        mean_exact = True
    except TooLarge:
        mean = float(values.mean())
        mean_exact = False

    dev = np.abs(values - mean)
    report = TailReport(model=space.model, params=space.params, observable=observable,
                        normalization=c, expectation=mean, expectation_exact=mean_exact,
                        kappa=kappa, kappa_is_exact_fallback=kappa_fallback,
                        lambda0=solve_lambda0(kappa), samples=samples, seed=seed)
    if exact_kappa is not None and not kappa_fallback:
        report.bound_exact_kappa = []
    prev = None
    for t in t_values:
        hits = int((dev >= t).sum())
        p = hits / samples
        lo, hi = wilson_interval(hits, samples)
        report.t.append(t)
        report.empirical.append(p)
        report.ci_lo.append(lo)
        report.ci_hi.append(hi)
        report.bound_seven.append(tail_bound(TailBoundSpec(kappa, t, "seven", True)).value)
        report.bound_five.append(tail_bound(TailBoundSpec(kappa, t, "five", True)).value)
        report.bound_exact.append(tail_bound(TailBoundSpec(kappa, t, "exact", True)).value)
        if report.bound_exact_kappa is not None:
            report.bound_exact_kappa.append(
                tail_bound(TailBoundSpec(float(exact_kappa), t, "seven", True)).value)
        if prev is not None and p > prev:
            raise AssertionError("empirical tail increased along the grid")
        prev = p
    return report


def envelope_holds(report: TailReport, variant: str = "seven",
                   t_min: float = 1.0) -> bool:
    """True when every Wilson upper bound sits below the chosen variant's
    bound at grid points with t >= t_min."""
    col = getattr(report, f"bound_{variant}")
    return all(hi <= b for t, hi, b in zip(report.t, report.ci_hi, col) if t >= t_min)


def compare_bound_regimes(kappa: float, t_grid) -> list[dict]:
    """Per-t values of the three exponent variants, plus one row past the
    2/kappa cutoff where every bound collapses to zero."""
    if not 0 < float(kappa) <= 1:
        raise BadParams("kappa must lie in (0, 1]")
    kappa = float(kappa)
    rows = []
    for t in list(t_grid) + [2.0 / kappa * (1 + 1e-9)]:
        row = {"t": float(t)}
        for variant in VARIANTS:
            row[variant] = tail_bound(TailBoundSpec(kappa, float(t), variant)).value
        rows.append(row)
    return rows
