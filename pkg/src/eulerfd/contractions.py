"""Difference-based Jacobian/Hessian/third-derivative contractions of a flux.

Everything here needs only point evaluations of the flux function. The basic
operator is a central difference along a direction vector V with a per-cell
step eps_v; applying it recursively yields higher derivative contractions:

    F_U . V           -> 2-point stencil, 2 flux calls
    F_UU . V . W      -> 4-point stencil, 4 flux calls
    F_UUU . V . W . X -> 8-point stencil, 8 flux calls

The non-recursive variants build the same contractions from same-vector
stencils combined by polarization; they cost more calls (28 for the third
derivative with three distinct vectors) and serve as an independent oracle.

Inputs are arrays of shape (..., 5); the step eps is chosen per cell from the
5-vector 2-norm of the direction, capped by the current time step.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

# optimal base perturbation for second-order difference approximations in
# 64-bit arithmetic; eps_v = min(dt, sqrt(EPS_OP)/||V||)
EPS_OP_DEFAULT = 4.8062e-06


@dataclass(frozen=True)
class EpsilonPolicy:
    """Perturbation-size policy: machine constant plus the dt cap."""

    eps_op: float = EPS_OP_DEFAULT
    dt_cap: float = 1.0

    def __post_init__(self):
        if not self.eps_op > 0.0:
            raise ValueError("eps_op must be positive")
        if not self.dt_cap > 0.0:
            raise ValueError("dt_cap must be positive")


class CountingFlux:
    """Flux evaluator with an exact, thread-safe call counter.

    One call = one evaluation of the wrapped function, whatever the batch
    shape. The counter total is exact under concurrent use.
    """

    def __init__(self, fn, name: str = "flux"):
        self._fn = fn
        self.name = name
        self._calls = 0
        self._lock = threading.Lock()

    @property
    def calls(self) -> int:
        return self._calls

    def reset(self):
        with self._lock:
            self._calls = 0

    def __call__(self, U):
        with self._lock:
            self._calls += 1
        return self._fn(U)


def epsilon_for(V, policy: EpsilonPolicy):
    """Per-cell perturbation size for direction V.

    eps = min(dt, sqrt(eps_op)/||V||_2); cells with ||V|| = 0 fall back to dt
    so the step never divides by zero.
    """
    V = np.asarray(V, dtype=np.float64)
    norm = np.sqrt(np.sum(V * V, axis=-1))
    with np.errstate(divide="ignore"):
        bar = np.where(norm > 0.0, np.sqrt(policy.eps_op) / norm, policy.dt_cap)
    return np.minimum(policy.dt_cap, bar)


def _is_zero(V) -> bool:
    return not np.any(np.asarray(V))


def d_u(flux, U, V, policy: EpsilonPolicy):
    """Jacobian action F_U . V by a two-point central difference.

    Exact on linear fluxes; O(eps^2) otherwise. Exactly 2 flux calls, or none
    when V is identically zero.
    """
    U = np.asarray(U, dtype=np.float64)
    V = np.asarray(V, dtype=np.float64)
    if _is_zero(V):
        return np.zeros_like(U)
    ev = epsilon_for(V, policy)[..., None]
    return (flux(U + ev * V) - flux(U - ev * V)) / (2.0 * ev)


def contract2(flux, U, V, W, policy: EpsilonPolicy):
    """Hessian contraction F_UU . V . W by nesting the directional difference.

    Expands to a four-point stencil over U +/- eps_v V +/- eps_w W; works the
    same for identical and distinct vectors. Exactly 4 flux calls.
    """
    U = np.asarray(U, dtype=np.float64)
    V = np.asarray(V, dtype=np.float64)
    W = np.asarray(W, dtype=np.float64)
    if _is_zero(V) or _is_zero(W):
        return np.zeros_like(U)
    ev = epsilon_for(V, policy)[..., None]
    ew = epsilon_for(W, policy)[..., None]
    pv, pw = ev * V, ew * W
    s = (flux(U + pv + pw) - flux(U - pv + pw)
         - flux(U + pv - pw) + flux(U - pv - pw))
    return s / (4.0 * ev * ew)


def contract3(flux, U, V, W, X, policy: EpsilonPolicy):
    """Third-derivative contraction F_UUU . V . W . X, triple-nested.

    Eight-point stencil over U +/- eps_v V +/- eps_w W +/- eps_x X; exactly 8
    flux calls regardless of whether the vectors coincide.
    """
    U = np.asarray(U, dtype=np.float64)
    V = np.asarray(V, dtype=np.float64)
    W = np.asarray(W, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if _is_zero(V) or _is_zero(W) or _is_zero(X):
        return np.zeros_like(U)
    ev = epsilon_for(V, policy)[..., None]
    ew = epsilon_for(W, policy)[..., None]
    ex = epsilon_for(X, policy)[..., None]
    pv, pw, px = ev * V, ew * W, ex * X
    s = (flux(U + pv + pw + px) - flux(U - pv + pw + px)
         - flux(U + pv - pw + px) + flux(U - pv - pw + px)
         - flux(U + pv + pw - px) + flux(U - pv + pw - px)
         + flux(U + pv - pw - px) - flux(U - pv - pw - px))
    return s / (8.0 * ev * ew * ex)


def _same_vector_hessian(flux, U, A, F0, policy):
    """F_UU . A . A from the three-point stencil (2 new flux calls)."""
    ea = epsilon_for(A, policy)[..., None]
    pa = ea * A
    return (flux(U + pa) - 2.0 * F0 + flux(U - pa)) / (ea * ea)


def contract2_nonrecursive(flux, U, V, W, policy: EpsilonPolicy):
    """Hessian contraction from same-vector stencils plus polarization.

    With V = W this is the plain three-point stencil (3 flux calls including
    the unperturbed evaluation). Distinct vectors combine stencils for V+W, V,
    and W: F_UU.V.W = [S(V+W) - S(V) - S(W)] / 2.
    """
    U = np.asarray(U, dtype=np.float64)
    V = np.asarray(V, dtype=np.float64)
    W = np.asarray(W, dtype=np.float64)
    if _is_zero(V) or _is_zero(W):
        return np.zeros_like(U)
    F0 = flux(U)
    if np.array_equal(V, W):
        return _same_vector_hessian(flux, U, V, F0, policy)
    svw = _same_vector_hessian(flux, U, V + W, F0, policy)
    sv = _same_vector_hessian(flux, U, V, F0, policy)
    sw = _same_vector_hessian(flux, U, W, F0, policy)
    return 0.5 * (svw - (sv + sw))


def _same_vector_third(flux, U, A, policy):
    """F_UUU . A . A . A from the four-point wide stencil (4 flux calls)."""
    ea = epsilon_for(A, policy)[..., None]
    pa = ea * A
    s = (-flux(U - 2.0 * pa) + 2.0 * flux(U - pa)
         - 2.0 * flux(U + pa) + flux(U + 2.0 * pa))
    return s / (2.0 * ea * ea * ea)


def contract3_nonrecursive(flux, U, V, W, X, policy: EpsilonPolicy):
    """Third-derivative contraction by polarization over same-vector stencils.

    Distinct vectors expand into seven same-vector terms (V+W+X, the three
    pair sums, and the three singles), 4 flux calls each: 28 calls total.
    Identical vectors collapse to the single four-point stencil.
    """
    U = np.asarray(U, dtype=np.float64)
    V = np.asarray(V, dtype=np.float64)
    W = np.asarray(W, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if _is_zero(V) or _is_zero(W) or _is_zero(X):
        return np.zeros_like(U)
    if np.array_equal(V, W) and np.array_equal(W, X):
        return _same_vector_third(flux, U, V, policy)
    t = _same_vector_third
    s = (t(flux, U, V + W + X, policy)
         - t(flux, U, V + W, policy)
         - t(flux, U, V + X, policy)
         - t(flux, U, W + X, policy)
         + t(flux, U, V, policy)
         + t(flux, U, W, policy)
         + t(flux, U, X, policy))
    return s / 6.0
