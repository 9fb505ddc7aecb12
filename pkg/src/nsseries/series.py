"""The series construction: caloric seed, quadratic recursion, summation.

The solution candidate is v = sum_k v_k with

    v_0(xi, t) = e^{-4 pi^2 nu t |xi|^2} u0_hat(xi),
    v_k = sum_{j=0}^{k-1} v_j (.) v_{k-1-j},   k >= 1,

whose term count is governed by the Catalan recursion.  This module also
builds the per-term dominance envelopes (Catalan constant, halved decay
exponent per level, monomial profile) and certifies the fixed-point
equation v = v_0 + v (.) v a posteriori.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .convolve import MonomialTree, all_bracketings, monomial_eval
from .fields import (SpectralField, SpectralTrajectory, TimeGrid,
                     envelope_weight, norm_1p2, trajectory_norm_1p2_sup)
from .grid import FrequencyGrid
from .heatprod import CaloricEnvelope, odot_product
from .scalar_bounds import catalan_sequence

__all__ = [
    "SeriesExpansion",
    "build_v0",
    "recurse_terms",
    "envelope_profile",
    "catalan_envelope_rhs",
    "truncation_order",
    "sum_series",
    "fixed_point_residual",
    "DivergencePredicted",
]

#: Memory guard for the stored term list (bytes).
DEFAULT_SERIES_BUDGET = 4_000_000_000


class DivergencePredicted(RuntimeError):
    """Raised when the tail rule cannot certify a convergent truncation."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(eq=False)
class SeriesExpansion:
    terms: list            # SpectralTrajectory v_k, k = 0..K
    exponents: list        # per-term decay exponents lambda / 2^k
    term_norms: list       # sup-time L1+L2 norm per term
    K: int

    def ratios(self) -> list:
        """Empirical successive-term norm ratios ||v_{k+1}|| / ||v_k||."""
        out = []
        for a, b in zip(self.term_norms, self.term_norms[1:]):
            out.append(b / a if a > 0 else 0.0)
        return out


def build_v0(u0: SpectralField, nu: float,
             time_grid: TimeGrid) -> SpectralTrajectory:
    """Caloric seed: exact per-mode heat decay of the initial data."""
    lam = 4.0 * np.pi ** 2 * nu
    decay = np.exp(-lam * np.outer(time_grid.times, u0.grid.xi_sq))
    vals = decay[:, :, None] * u0.values[None, :, :]
    return SpectralTrajectory(u0.grid, time_grid, vals)


def recurse_terms(v0: SpectralTrajectory, K: int, nu: float,
                  method: str = "fft",
                  max_bytes: int = DEFAULT_SERIES_BUDGET) -> SeriesExpansion:
    """Run the quadratic recursion up to order K, storing every term."""
    if K < 0:
        raise ValueError("K must be nonnegative")
    lam = 4.0 * np.pi ** 2 * nu
    terms = [v0]
    norms = [trajectory_norm_1p2_sup(v0)]
    per_term = v0.nbytes()
    for k in range(1, K + 1):
        if (k + 1) * per_term > max_bytes:
            raise MemoryError(
                f"series term v_{k} would exceed the {max_bytes}-byte budget")
        acc = np.zeros_like(v0.values)
        for j in range(k):
            acc += odot_product(terms[j], terms[k - 1 - j], nu,
                                method).values
        vk = SpectralTrajectory(v0.grid, v0.time_grid, acc)
        terms.append(vk)
        norms.append(trajectory_norm_1p2_sup(vk))
    exponents = [lam / 2.0 ** k for k in range(K + 1)]
    return SeriesExpansion(terms=terms, exponents=exponents,
                           term_norms=norms, K=K)


# ---------------------------------------------------------------------------
# Envelope profiles and the printed per-term bound
# ---------------------------------------------------------------------------

def _weight_splits(total_budget: int, slots: int):
    """All nonnegative integer tuples (l_1..l_slots) with sum <= budget."""
    if slots == 1:
        for l in range(total_budget + 1):
            yield (l,)
        return
    for head in range(total_budget + 1):
        for rest in _weight_splits(total_budget - head, slots - 1):
            yield (head,) + rest


def envelope_profile(u0: SpectralField, k: int, m: int = 0, n: int = 0,
                     method: str = "fft") -> SpectralField:
    """Monomial-built profile dominating the k-th term: the pointwise max of

        w^{*1}(p_{l_1}, ..., p_{l_{k+1}}),   p_l = max(1,|xi|)^l |u0_hat|,

    over all bracketings w of k+1 leaves and all weight splits with
    sum l_j <= m + 2n.  Cost grows with the Catalan number of k, so only
    small k are intended (k <= 3 in the verification suite).
    """
    if k < 0 or m < 0 or n < 0:
        raise ValueError("k, m, n must be nonnegative")
    g = u0.grid
    mag = u0.magnitude()
    budget = m + 2 * n
    leaf_cache = {
        l: SpectralField(g, envelope_weight(g, float(l)) * mag)
        for l in range(budget + 1)
    }
    if k == 0:
        # Degree-1 monomial: the leaf with the full weight budget.
        return SpectralField(
            g, envelope_weight(g, float(budget)) * mag)
    best = np.zeros(g.n_modes)
    shapes = all_bracketings([None] * (k + 1))
    for split in _weight_splits(budget, k + 1):
        leaves = [leaf_cache[l] for l in split]
        for shape in shapes:
            tree = _fill_tree(shape, iter(leaves))
            val = monomial_eval(tree, 1.0, method).values.real
            best = np.maximum(best, val)
    return SpectralField(g, best)


def _fill_tree(shape: MonomialTree, leaf_iter) -> MonomialTree:
    if shape.left is None and shape.right is None:
        return MonomialTree.leaf(next(leaf_iter))
    return MonomialTree.node(_fill_tree(shape.left, leaf_iter),
                             _fill_tree(shape.right, leaf_iter))


def catalan_envelope_rhs(k: int, m: int, n: int, nu: float,
                         grid: FrequencyGrid,
                         envelope_profile: SpectralField) -> CaloricEnvelope:
    """The printed per-term bound as a testable envelope:

        |(lam^{1/2}|xi|)^m d^n v_k / dt^n|
            <= c_k (lam (k+1)^2)^{m/2+n} / (2 pi nu)^k
               * e^{-lam t / 2^k |xi|^2} * profile(xi).

    The constant is folded into the profile; dominance is checked at
    m = n = 0 in the verification suite (see the recorded open question on
    the (2 pi nu)^k constant).
    """
    lam = 4.0 * np.pi ** 2 * nu
    c_k = catalan_sequence(k)[k]
    scale = c_k * (lam * (k + 1) ** 2) ** (m / 2.0 + n) \
        / (2.0 * np.pi * nu) ** k
    prof = SpectralField(grid, scale * envelope_profile.values.real)
    return CaloricEnvelope(lambda_exp=lam / 2.0 ** k, poly_degree=0,
                           profile=prof)


# ---------------------------------------------------------------------------
# Truncation, summation, fixed point
# ---------------------------------------------------------------------------

def truncation_order(expansion: SeriesExpansion, rho: float,
                     tail_tol: float) -> int:
    """Smallest K with ||v_K|| * rho / (1 - rho) < tail_tol, treating rho
    as the geometric tail ratio.  Raises DivergencePredicted when rho >= 1
    or when the measured term norms never satisfy the rule."""
    diagnostics = {"rho": rho, "term_norms": list(expansion.term_norms),
                   "ratios": expansion.ratios()}
    if rho >= 1.0:
        raise DivergencePredicted(
            f"smallness ratio {rho:.3g} >= 1: series predicted divergent",
            diagnostics)
    factor = rho / (1.0 - rho)
    for k, nk in enumerate(expansion.term_norms):
        if nk * factor < tail_tol:
            return k
    raise DivergencePredicted(
        "no truncation order within the computed terms satisfies the "
        f"tail rule (tail_tol={tail_tol:g})", diagnostics)


def sum_series(expansion: SeriesExpansion,
               K: int | None = None) -> SpectralTrajectory:
    """Pointwise sum of the terms in fixed order k = 0..K."""
    K = expansion.K if K is None else K
    if not 0 <= K <= expansion.K:
        raise ValueError("K out of range for this expansion")
    base = expansion.terms[0]
    acc = np.zeros_like(base.values)
    for k in range(K + 1):
        acc += expansion.terms[k].values
    return SpectralTrajectory(base.grid, base.time_grid, acc)


def fixed_point_residual(v: SpectralTrajectory, v0: SpectralTrajectory,
                         nu: float, method: str = "fft") -> float:
    """sup-time L1+L2 norm of v - v0 - v (.) v."""
    quad = odot_product(v, v, nu, method)
    resid = SpectralTrajectory(v.grid, v.time_grid,
                               v.values - v0.values - quad.values)
    return trajectory_norm_1p2_sup(resid)
