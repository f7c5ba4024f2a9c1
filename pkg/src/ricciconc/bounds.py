"""Analytic tail bounds for Lipschitz observables under positive curvature.

For curvature kappa and deviation t >= 1 the one-sided tail of a
1-Lipschitz observable is at most exp(-t^2 kappa lambda0(kappa) / 4),
where lambda0 is the positive root of x e^{2x} = 2 (2 - kappa).  Two fixed
exponent constants are exposed alongside the exact root: 1/7 (valid for
all kappa in (0, 1]) and 1/5 (the small-kappa regime).  Deviations beyond
2 / kappa are impossible outright, so the bound collapses to zero there.
"""

import math
from dataclasses import dataclass

from .errors import InequalityViolation, InputNotLipschitz, OutOfRange
from .numeric import Number
from .state_space import (StateFunction, StateGraph, WalkKernel, apply_averaging,
                          edge_lipschitz_constant)

VARIANTS = ("exact", "seven", "five")

#: Residual target for the lambda0 root.
_ROOT_TOL = 1e-12


def solve_lambda0(kappa: float) -> float:
    """Positive root of x e^{2x} = 2 (2 - kappa), kappa in [0, 1].

    Bisection on [0, 1]: the left side is strictly increasing and the root
    stays below 0.8030 on the whole domain, so the bracket never fails.
    """
    if not 0 <= kappa <= 1:
        raise OutOfRange("kappa must lie in [0, 1]")
    target = 2.0 * (2.0 - float(kappa))

    def h(x):
        return x * math.exp(2.0 * x) - target

    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = h(mid)
        if abs(val) <= _ROOT_TOL:
            return mid
        if val < 0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    if abs(h(root)) > _ROOT_TOL:
        raise ArithmeticError(f"bisection residual {h(root):.3e} above {_ROOT_TOL}")
    return root


@dataclass(frozen=True)
class TailBoundSpec:
    """One evaluation request: curvature, deviation, exponent variant."""

    kappa: float
    t: float
    variant: str = "seven"
    two_sided: bool = False


@dataclass(frozen=True)
class TailBoundResult:
    value: float
    lambda0: float
    outside_theorem_hypothesis: bool
    cutoff: bool


def tail_bound(spec: TailBoundSpec) -> TailBoundResult:
    """Evaluate the tail bound for the requested variant.

    exact  -> exp(-t^2 kappa lambda0(kappa) / 4)
    seven  -> exp(-t^2 kappa / 7)
    five   -> exp(-t^2 kappa / 5)     (small-kappa regime)

    Two-sided doubles the bound and caps at 1.  For t > 2/kappa the
    deviation is impossible (it would exceed the diameter), so the bound
    is 0.  Values of t below 1 fall outside the guarantee's hypothesis;
    the formula is still evaluated but the result is flagged.
    """
    kappa = float(spec.kappa)
    t = float(spec.t)
    if not 0 < kappa <= 1:
        raise OutOfRange("kappa must lie in (0, 1]")
    if t <= 0:
        raise OutOfRange("t must be positive")
    if spec.variant not in VARIANTS:
        raise OutOfRange(f"unknown variant {spec.variant!r}")
    lam0 = solve_lambda0(kappa)
    outside = t < 1.0
    if t > 2.0 / kappa:
        return TailBoundResult(0.0, lam0, outside, True)
    if spec.variant == "exact":
        exponent = -t * t * kappa * lam0 / 4.0
    elif spec.variant == "seven":
        exponent = -t * t * kappa / 7.0
    else:
        exponent = -t * t * kappa / 5.0
    value = math.exp(exponent)
    if spec.two_sided:
        value = min(1.0, 2.0 * value)
    return TailBoundResult(value, lam0, outside, False)


def _kernel_lipschitz_constant(m: WalkKernel, f: StateFunction) -> float:
    """Largest |f(y)-f(x)| over support arcs of the kernel (x != y)."""
    worst = 0.0
    for x, row in enumerate(m.rows):
        fx = float(f.values[x])
        for y, _ in row.items():
            if y != x:
                worst = max(worst, abs(float(f.values[y]) - fx))
    return worst


def mgf_inequality_check(g: StateGraph, m: WalkKernel, phi: StateFunction,
                         lam: float, alpha: float = 1.0,
                         rel_tol: float = 1e-12) -> dict:
    """One averaging step of e^{lam phi} against its Taylor majorant.

    For alpha-Lipschitz phi and every state x:
        (M e^{lam phi})(x) <= exp(lam (M phi)(x) + lam^2 alpha^2 e^{2 lam alpha} / 2).
    Raises InequalityViolation on failure (a bug signal, the inequality is
    a theorem); returns the worst observed ratio otherwise.
    """
    if lam <= 0:
        raise OutOfRange("lam must be positive")
    if alpha > 1:
        raise OutOfRange("alpha must be at most 1")
    observed = edge_lipschitz_constant(g, phi)
    if float(observed) > float(alpha) + 1e-12:
        raise InputNotLipschitz(f"phi varies by {float(observed)} > alpha = {alpha}")
    mphi = apply_averaging(m, phi)
    slack = 0.5 * lam * lam * alpha * alpha * math.exp(2.0 * lam * alpha)
    worst_ratio = 0.0
    for x, row in enumerate(m.rows):
        lhs = sum(float(w) * math.exp(lam * float(phi.values[y])) for y, w in row.items())
        rhs = math.exp(lam * float(mphi.values[x]) + slack)
        if lhs > rhs * (1.0 + rel_tol):
            raise InequalityViolation(
                f"averaged exponential at state {x}: {lhs} > bound {rhs}")
        worst_ratio = max(worst_ratio, lhs / rhs)
    return {"worst_ratio": worst_ratio, "slack_exponent": slack}


def variance_bound_check(m: WalkKernel, f: StateFunction, alpha: float,
                         tol: float = 1e-12) -> dict:
    """Var_{m_x}(f) <= alpha^2 for alpha-Lipschitz f, via the centered chain
    Var <= E[(f - f(x))^2] <= alpha^2 at every state."""
    observed = _kernel_lipschitz_constant(m, f)
    if observed > float(alpha) + 1e-12:
        raise InputNotLipschitz(f"f varies by {observed} > alpha = {alpha} on kernel support")
    worst = 0.0
    for x, row in enumerate(m.rows):
        mean = sum(float(w) * float(f.values[y]) for y, w in row.items())
        var = sum(float(w) * (float(f.values[y]) - mean) ** 2 for y, w in row.items())
        centered = sum(float(w) * (float(f.values[y]) - float(f.values[x])) ** 2
                       for y, w in row.items())
        if var > centered + tol:
            raise InequalityViolation(f"variance {var} above centered moment {centered} at {x}")
        if centered > float(alpha) ** 2 + tol:
            raise InequalityViolation(
                f"centered second moment {centered} above alpha^2 at state {x}")
        worst = max(worst, var)
    return {"worst_variance": worst, "alpha_squared": float(alpha) ** 2}


def mgf_chain_bound(kappa: float, lam: float) -> float:
    """Stationary MGF majorant exp(lam E f + lam^2 e^{2 lam} / (2 kappa (2-kappa)))
    without the mean term: returns lam^2 e^{2 lam} / (2 kappa (2 - kappa)).

    This is the geometric series sum_j (1-kappa)^{2j} folded into the
    per-step slack; iterating the averaging inequality under contraction
    telescopes to exactly this exponent.
    """
    if not 0 < kappa <= 1:
        raise OutOfRange("kappa must lie in (0, 1]")
    return lam * lam * math.exp(2.0 * lam) / (2.0 * kappa * (2.0 - kappa))
