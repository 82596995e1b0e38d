"""Geometry of weighted l^r spaces on R^d.

Provides the norm, the duality mapping with gauge ``t -> t**(p-1)``, its
inverse (the duality mapping of the dual space), Bregman distances, and
sampling-based certification of the two norm comparison constants ``Cp``
and ``Gq``.

All operations are pure and accept batches: arrays of shape ``(..., dim)``
are mapped elementwise over the leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch

__all__ = [
    "SpaceGeometry",
    "lp_space",
    "norm",
    "dual_norm",
    "duality_map",
    "inverse_duality_map",
    "bregman_distance",
    "certify_constants",
]


#: Sampling-certified norm comparison constants for unweighted l^r with the
#: default gauge p = max(r, 2).  The values carry a safety margin below
#: (resp. above) the empirical infimum (resp. supremum) of the two Bregman
#: vs. norm ratios over a large adversarial sample; see tests.
DEFAULT_CONSTANTS: dict[tuple[float, float], tuple[float, float]] = {
    (2.0, 2.0): (1.0, 1.0),
    (1.5, 2.0): (0.45, 2.2),
    (3.0, 3.0): (0.50, 1.4),
    (4.0, 4.0): (0.30, 1.6),
}


@dataclass(frozen=True, eq=False)
class SpaceGeometry:
    """A weighted l^r space on R^d together with its gauge exponent.

    Parameters
    ----------
    dim : int
        Dimension of the space.
    r : float
        Norm exponent, in (1, inf).
    p : float
        Gauge exponent of the duality mapping, > 1. The conjugate ``q``
        is always derived from ``p``.
    weights : array or None
        Positive weight per coordinate; defaults to all ones.
    Cp : float
        Constant of the lower Bregman-to-norm comparison.
    Gq : float
        Constant of the upper (dual) Bregman-to-norm comparison.
    """

    dim: int
    r: float = 2.0
    p: float = 2.0
    weights: np.ndarray | None = None
    Cp: float = 1.0
    Gq: float = 1.0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")
        if not self.r > 1:
            raise ValueError("norm exponent r must lie in (1, inf)")
        if not self.p > 1:
            raise ValueError("gauge exponent p must be > 1")
        if self.Cp <= 0 or self.Gq <= 0:
            raise ValueError("Cp and Gq must be positive")
        w = self.weights
        w = np.ones(self.dim) if w is None else np.asarray(w, dtype=float)
        if w.shape != (self.dim,):
            raise DimensionMismatch(
                f"weights have shape {w.shape}, expected ({self.dim},)")
        if np.any(w <= 0):
            raise ValueError("all weights must be positive")
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        if self.is_hilbert and (self.Cp != 1.0 or self.Gq != 1.0):
            raise ValueError(
                "the Hilbert configuration (r=2, p=2, unit weights) "
                "forces Cp = Gq = 1")

    @property
    def q(self) -> float:
        """Conjugate exponent of the gauge, 1/p + 1/q = 1."""
        return self.p / (self.p - 1.0)

    @property
    def is_hilbert(self) -> bool:
        return self.r == 2.0 and self.p == 2.0 and bool(
            np.all(self.weights == 1.0))

    def dual(self) -> "SpaceGeometry":
        """The dual space: exponent r/(r-1), reciprocal-type weights,
        and the conjugate gauge."""
        rp = self.r / (self.r - 1.0)
        return SpaceGeometry(
            dim=self.dim,
            r=rp,
            p=self.q,
            weights=self.weights ** (1.0 - rp),
            Cp=self.Gq,
            Gq=self.Cp,
        )

    def check_dim(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.dim,):
            raise DimensionMismatch(
                f"vector has shape {x.shape}, last axis must be {self.dim}")
        return x


def lp_space(dim, r=2.0, p=None, weights=None, Cp=None, Gq=None):
    """Construct a weighted l^r geometry with sane defaults.

    The gauge defaults to ``p = max(r, 2)`` so that the space is p-convex
    and its dual q-smooth.  For the unweighted exponents shipped in
    ``DEFAULT_CONSTANTS`` the comparison constants are filled in
    automatically; any other configuration must supply them explicitly.
    """
    if p is None:
        p = max(float(r), 2.0)
    unweighted = weights is None
    if Cp is None or Gq is None:
        key = (float(r), float(p))
        if not unweighted or key not in DEFAULT_CONSTANTS:
            raise ValueError(
                "no certified default constants for this configuration; "
                "pass Cp and Gq explicitly")
        cp_d, gq_d = DEFAULT_CONSTANTS[key]
        Cp = cp_d if Cp is None else Cp
        Gq = gq_d if Gq is None else Gq
    return SpaceGeometry(dim=dim, r=float(r), p=float(p), weights=weights,
                         Cp=float(Cp), Gq=float(Gq))


def norm(space: SpaceGeometry, x: np.ndarray):
    """Weighted l^r norm, ``(sum_i w_i |x_i|**r) ** (1/r)``."""
    x = space.check_dim(x)
    s = np.sum(space.weights * np.abs(x) ** space.r, axis=-1)
    return s ** (1.0 / space.r)


def dual_norm(space: SpaceGeometry, xstar: np.ndarray):
    """Norm of the dual space of `space`."""
    return norm(space.dual(), xstar)


def duality_map(space: SpaceGeometry, x: np.ndarray):
    """Duality mapping with gauge ``t -> t**(p-1)``.

    Maps x to the unique ``x*`` with ``<x, x*> = ||x|| ||x*||`` and
    ``||x*|| = ||x||**(p-1)``; in coordinates
    ``x*_i = ||x||**(p-r) w_i |x_i|**(r-1) sign(x_i)``, with 0 mapped to 0.
    """
    x = space.check_dim(x)
    nrm = norm(space, x)
    # 0**(p-r) is an indeterminate 0*inf shape when p < r; the only
    # norm-consistent value at the origin is 0.
    scale = np.where(nrm > 0.0, nrm, 1.0) ** (space.p - space.r)
    scale = np.where(nrm > 0.0, scale, 0.0)
    phi = space.weights * np.abs(x) ** (space.r - 1.0) * np.sign(x)
    return scale[..., np.newaxis] * phi


def inverse_duality_map(space: SpaceGeometry, xstar: np.ndarray):
    """Inverse of the duality mapping, realized as the duality mapping of
    the dual space with the conjugate gauge."""
    return duality_map(space.dual(), xstar)


def bregman_distance(space: SpaceGeometry, x: np.ndarray, xt: np.ndarray):
    """Bregman distance of the functional ``(1/p) ||.||**p``.

    The duality mapping is evaluated at the *first* argument:
    ``(1/p)||xt||**p + (1/q)||x||**p - <J_p(x), xt>``.  Nonnegative, zero
    exactly at ``x == xt``; tiny negative round-off is clipped to 0.
    """
    x = space.check_dim(x)
    xt = space.check_dim(xt)
    p = space.p
    np_x = norm(space, x) ** p
    np_xt = norm(space, xt) ** p
    val = np_xt / p + np_x / space.q - np.sum(duality_map(space, x) * xt,
                                              axis=-1)
    floor = -1e-9 * (1.0 + np_x + np_xt)
    return np.where((val < 0.0) & (val > floor), 0.0, val)


def certify_constants(space: SpaceGeometry, n_samples: int = 10_000,
                      seed: int = 0):
    """Empirically certify the configured ``Cp`` and ``Gq`` by sampling.

    Returns ``(cp_bound, gq_bound)`` where ``cp_bound`` is the sampled
    infimum of ``p * breg / ||x - xt||**p`` (a configured ``Cp`` must not
    exceed it) and ``gq_bound`` the sampled supremum of the dual ratio
    ``q * breg* / ||x* - xt*||**q`` (a configured ``Gq`` must not fall
    below it).  Both ratios are scale invariant, so unit-scale samples
    suffice.
    """
    rng = np.random.default_rng(seed)
    d = space.dim

    x = rng.standard_normal((n_samples, d))
    xt = rng.standard_normal((n_samples, d))
    # Near-parallel pairs probe the flattest directions of the ball.
    half = n_samples // 2
    xt[:half] = x[:half] * rng.uniform(-2.0, 2.0, (half, 1))

    breg = bregman_distance(space, x, xt)
    gap = norm(space, x - xt)
    keep = gap > 1e-12
    cp_bound = float(np.min(space.p * breg[keep] / gap[keep] ** space.p))

    dual = space.dual()
    xs = rng.standard_normal((n_samples, d))
    xts = rng.standard_normal((n_samples, d))
    xts[:half] = xs[:half] * rng.uniform(-2.0, 2.0, (half, 1))
    breg_d = bregman_distance(dual, xs, xts)
    gap_d = norm(dual, xs - xts)
    keep = gap_d > 1e-12
    gq_bound = float(np.max(dual.p * breg_d[keep] / gap_d[keep] ** dual.p))
    return cp_bound, gq_bound
