"""Scalar inequalities and closed-form extrema used throughout the solver.

Everything here is elementary real/complex analysis: power-mean splittings,
the maximum of -t^a + a*t, the two-point inner-product maximization, and the
expansion of iterates of an affine-linear map.  These are the building blocks
for the envelope bounds and the convergence ratio test, and they are the
targets of the randomized inequality suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PowerSplitConstants",
    "power_split_constants",
    "conjugate_exponent",
    "catalan_sequence",
    "r_alpha",
    "polyalpha_max",
    "inner_split_max",
    "powerlinear_expand",
    "run_inequality_checks",
]

#: Distinguished value for the exponent p = infinity.  Code that consumes
#: exponents must branch on `is_infinite_exponent` rather than doing
#: arithmetic with this value blindly.
INF_EXPONENT = math.inf


def is_infinite_exponent(p: float) -> bool:
    return math.isinf(p)


@dataclass(frozen=True)
class PowerSplitConstants:
    """Sharp constants c_lo, c_hi with

        c_lo * (s^a + t^a) <= (s+t)^a <= c_hi * (s^a + t^a),  s, t >= 0.

    For a >= 1 the lower factor is 1 and the upper is 2^(a-1); for
    0 < a < 1 the roles swap.
    """

    alpha: float
    lower_factor: float
    upper_factor: float


def power_split_constants(alpha: float) -> PowerSplitConstants:
    if alpha <= 0:
        raise ValueError(f"exponent must be positive, got {alpha}")
    edge = 2.0 ** (alpha - 1.0)
    if alpha >= 1.0:
        return PowerSplitConstants(alpha, 1.0, edge)
    return PowerSplitConstants(alpha, edge, 1.0)


def conjugate_exponent(p: float) -> float:
    """Return p' = p/(p-1), with 1 <-> infinity as the limit cases."""
    if is_infinite_exponent(p):
        return 1.0
    if p < 1.0:
        raise ValueError(f"exponent must satisfy p >= 1, got {p}")
    if p == 1.0:
        return INF_EXPONENT
    return p / (p - 1.0)


def catalan_sequence(K: int) -> list[int]:
    """First K+1 terms of c_0 = 1, c_k = sum_{j<k} c_j c_{k-1-j}.

    Evaluated in exact integer arithmetic (Python integers are unbounded,
    so overflow cannot silently wrap; a guard still rejects absurd K to
    keep the quadratic-time loop bounded).
    """
    if K < 0:
        raise ValueError("K must be nonnegative")
    if K > 100_000:
        raise OverflowError(f"refusing to build {K + 1} Catalan terms")
    c = [1]
    for k in range(1, K + 1):
        c.append(sum(c[j] * c[k - 1 - j] for j in range(k)))
    return c


def r_alpha(alpha: float) -> float:
    """The split-decay factor 1 / max(2^(alpha-1), 1), in (0, 1]."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return 1.0 / max(2.0 ** (alpha - 1.0), 1.0)


def polyalpha_max(alpha: float, a: float) -> float:
    """Exact maximum of g(t) = -t^alpha + a*t over t >= 0, alpha > 1.

    The critical point is t* = (a/alpha)^(1/(alpha-1)) and the value is
    (alpha-1) * (a/alpha)^alpha', with alpha' the conjugate exponent.
    """
    if alpha <= 1.0:
        raise ValueError(f"alpha must exceed 1, got {alpha}")
    if a <= 0.0:
        raise ValueError(f"a must be positive, got {a}")
    return (alpha - 1.0) * (a / alpha) ** conjugate_exponent(alpha)


def inner_split_max(z: np.ndarray) -> float:
    """max of <x, y> over all splittings x + y = z, which is |z|^2 / 4."""
    z = np.asarray(z, dtype=float)
    return float(np.dot(z, z)) / 4.0


def powerlinear_expand(alpha, n: int, apply_L, x, y):
    """Expand L^n x for a linear map satisfying L x = alpha*x + y.

    Returns alpha^n x + sum_{j=0}^{n-1} alpha^j L^(n-1-j) y, which equals
    the n-fold application of L to x whenever the caller's premise holds.
    n = 0 returns x unchanged.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    x = np.asarray(x)
    y = np.asarray(y)
    if n == 0:
        return x.copy()
    acc = (alpha ** n) * x.astype(complex)
    power_of_y = y.astype(complex)  # L^0 y upward
    # Precompute L^m y for m = 0..n-1, then combine with alpha^(n-1-m).
    iterates = [power_of_y]
    for _ in range(n - 1):
        iterates.append(np.asarray(apply_L(iterates[-1])))
    for j in range(n):
        acc = acc + (alpha ** j) * iterates[n - 1 - j]
    return acc


# ---------------------------------------------------------------------------
# Randomized verification suite (also exposed through the CLI).
# ---------------------------------------------------------------------------

def run_inequality_checks(seed: int = 0, cases: int = 10_000,
                          rel_slack: float = 1e-12) -> dict:
    """Run the randomized scalar-inequality suite.

    Returns a dict mapping check name to the worst signed violation found
    (negative or ~0 means the inequality held), plus a global "passed" flag.
    All inequalities are tested with a relative slack of `rel_slack` against
    the scale of the quantities involved.
    """
    rng = np.random.default_rng(seed)
    out: dict = {}

    # Power splitting, alpha >= 1:  s^a + t^a <= (s+t)^a <= 2^(a-1)(s^a+t^a)
    s = rng.uniform(0.0, 10.0, cases)
    t = rng.uniform(0.0, 10.0, cases)
    al = rng.uniform(1.0, 8.0, cases)
    lo = s ** al + t ** al
    mid = (s + t) ** al
    hi = 2.0 ** (al - 1.0) * lo
    scale = np.maximum(np.maximum(lo, mid), 1.0)
    out["power_split_lower"] = float(np.max((lo - mid) / scale))
    out["power_split_upper"] = float(np.max((mid - hi) / np.maximum(hi, 1.0)))

    # Reversed splitting for 0 < alpha < 1.
    al_small = rng.uniform(0.05, 1.0, cases)
    lo2 = 2.0 ** (al_small - 1.0) * (s ** al_small + t ** al_small)
    mid2 = (s + t) ** al_small
    hi2 = s ** al_small + t ** al_small
    sc2 = np.maximum(hi2, 1.0)
    out["power_split_lower_small"] = float(np.max((lo2 - mid2) / sc2))
    out["power_split_upper_small"] = float(np.max((mid2 - hi2) / sc2))

    # Split-decay: -|xi-eta|^a - |eta|^a <= -r_alpha(a) |xi|^a.
    d = 3
    xi = rng.normal(size=(cases, d)) * 3.0
    eta = rng.normal(size=(cases, d)) * 3.0
    al3 = rng.uniform(0.2, 6.0, cases)
    ra = 1.0 / np.maximum(2.0 ** (al3 - 1.0), 1.0)
    lhs = -np.linalg.norm(xi - eta, axis=1) ** al3 \
        - np.linalg.norm(eta, axis=1) ** al3
    rhs = -ra * np.linalg.norm(xi, axis=1) ** al3
    out["split_decay"] = float(np.max((lhs - rhs)
                                      / np.maximum(np.abs(rhs), 1.0)))

    # Young-type bound: -|x|^a + c x.y <= (a-1)(c/a)^{a'} |y|^{a'}.
    x = rng.normal(size=(cases, d)) * 2.0
    y = rng.normal(size=(cases, d)) * 2.0
    al4 = rng.uniform(1.01, 5.0, cases)
    c = rng.uniform(0.1, 5.0, cases)
    ap = al4 / (al4 - 1.0)
    lhs4 = -np.linalg.norm(x, axis=1) ** al4 + c * np.sum(x * y, axis=1)
    rhs4 = (al4 - 1.0) * (c / al4) ** ap * np.linalg.norm(y, axis=1) ** ap
    out["young_split"] = float(np.max((lhs4 - rhs4)
                                      / np.maximum(np.abs(rhs4), 1.0)))

    # polyalpha_max dominates g on a dense t-grid.
    worst = -np.inf
    tt = np.linspace(0.0, 20.0, 2001)
    for _ in range(200):
        a5 = rng.uniform(1.01, 5.0)
        coef = rng.uniform(0.1, 5.0)
        g = -tt ** a5 + coef * tt
        m = polyalpha_max(a5, coef)
        worst = max(worst, float(np.max(g) - m) / max(abs(m), 1.0))
    out["polyalpha_max_dominates"] = worst

    # Two-point maximization: <x, z-x> <= |z|^2/4, equality at x = z/2.
    z = rng.normal(size=(cases, d)) * 2.0
    xs = rng.normal(size=(cases, d)) * 2.0
    lhs6 = np.sum(xs * (z - xs), axis=1)
    rhs6 = np.sum(z * z, axis=1) / 4.0
    out["inner_split"] = float(np.max((lhs6 - rhs6)
                                      / np.maximum(rhs6, 1.0)))

    # Linear-iterate expansion vs direct repeated application, using a
    # linear map built to satisfy L x = alpha*x + y on the sampled pair.
    worst7 = 0.0
    for _ in range(200):
        m = 4
        alpha = complex(rng.normal(), rng.normal())
        yv = rng.normal(size=m) + 1j * rng.normal(size=m)
        xv = rng.normal(size=m) + 1j * rng.normal(size=m)

        def L(w, alpha=alpha, yv=yv, xv=xv):
            return alpha * w + yv * (np.vdot(xv, w) / np.vdot(xv, xv))

        direct = xv.astype(complex)
        for _ in range(5):
            direct = L(direct)
        expanded = powerlinear_expand(alpha, 5, L, xv, yv)
        err = np.linalg.norm(direct - expanded) / max(
            np.linalg.norm(direct), 1.0)
        worst7 = max(worst7, float(err))
    out["affine_iterate"] = worst7

    # Catalan recurrence re-evaluated independently.
    cseq = catalan_sequence(12)
    ok = cseq[0] == 1 and all(
        cseq[k] == sum(cseq[j] * cseq[k - 1 - j] for j in range(k))
        for k in range(1, 13))
    out["catalan_recurrence"] = 0.0 if ok else 1.0

    out["passed"] = all(v <= rel_slack for k, v in out.items()
                        if k != "passed")
    return out
