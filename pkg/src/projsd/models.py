"""Nonlinear forward operators with analytically known constants.

Ships a linear model, a diagonal linear model with closed-form best
approximations, and a componentwise-quadratic model, plus the
certification helpers (finite-difference derivative check, adjoint check,
sampling-based stability-constant estimation) used to falsify claimed
constants.

Evaluation is batch friendly: all maps act on the last axis of their
input arrays.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateSet
from .geometry import SpaceGeometry, bregman_distance, norm
from .sets import Ball, Box, ConvexSet, CoordinateSubspace, WholeSpace

__all__ = [
    "ForwardModel",
    "LinearModel",
    "DiagonalLinearModel",
    "QuadraticModel",
    "NoisyData",
    "data_norm",
    "fd_derivative_check",
    "adjoint_check",
    "estimate_stability_constant",
]


class ForwardModel:
    """Interface of the forward operator F.

    Subclasses provide the evaluation, the derivative action
    ``DF(x) h`` and the adjoint action ``DF(x)* y*``, together with the
    constants entering the convergence analysis:

    - ``lhat``: bound on the operator norm of DF over the domain ball,
    - ``lip``: Lipschitz constant of ``x -> DF(x)``,
    - ``cstab``: conditional stability constant on the working set,
    - ``s``: the data-space norm exponent (data live in l^s).

    ``cstab`` may be None for models where no stability certificate is
    available; runs then treat it as asserted by the user.
    """

    out_dim: int
    s: float = 2.0
    lip: float = 0.0
    lhat: float = 0.0
    cstab: float | None = None
    domain_radius: float | None = None
    domain_center: np.ndarray | None = None

    def eval(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def apply_derivative(self, x: np.ndarray, h: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def apply_adjoint(self, x: np.ndarray, ystar: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x):
        return self.eval(x)

    def with_constants(self, lip=None, lhat=None, cstab=None):
        """Shallow copy with overridden analysis constants.

        Used by the multi-level driver, where each level carries its own
        certified constants for the restricted operator.
        """
        import copy
        m = copy.copy(self)
        if lip is not None:
            m.lip = float(lip)
        if lhat is not None:
            m.lhat = float(lhat)
        if cstab is not None:
            m.cstab = float(cstab)
        return m


class LinearModel(ForwardModel):
    """F(x) = A x.  The derivative is constant, so lip = 0."""

    def __init__(self, matrix, s=2.0, cstab=None):
        self.matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        self.out_dim = self.matrix.shape[0]
        self.in_dim = self.matrix.shape[1]
        self.s = float(s)
        self.lip = 0.0
        self.lhat = float(np.linalg.norm(self.matrix, 2))
        self.cstab = cstab

    def eval(self, x):
        return np.asarray(x, dtype=float) @ self.matrix.T

    def apply_derivative(self, x, h):
        return np.asarray(h, dtype=float) @ self.matrix.T

    def apply_adjoint(self, x, ystar):
        return np.asarray(ystar, dtype=float) @ self.matrix


class DiagonalLinearModel(LinearModel):
    """F(x) = diag(sigma) x with closed-form inverse-problem quantities.

    In the Hilbert configuration with Z a coordinate subspace, the best
    approximating solution, the approximation error and the stability
    constant are all available exactly, which makes every convergence
    guarantee checkable without trusting a sampler.
    """

    def __init__(self, sigma, s=2.0, cstab=None):
        sigma = np.asarray(sigma, dtype=float)
        super().__init__(np.diag(sigma), s=s, cstab=cstab)
        self.sigma = sigma

    def best_subspace_solution(self, ydelta, support):
        """Minimizer of ||F(z) - ydelta|| over the coordinate subspace and
        the attained distance (the exact approximation error eta)."""
        ydelta = np.asarray(ydelta, dtype=float)
        mask = np.zeros(self.in_dim, dtype=bool)
        mask[np.asarray(list(support), dtype=int)] = True
        zdag = np.where(mask, ydelta / self.sigma, 0.0)
        eta = float(np.linalg.norm(np.where(mask, 0.0, ydelta)))
        return zdag, eta

    def subspace_stability_constant(self, support):
        """Exact constant of the stability inequality on the subspace,
        ``2**(-1/2) / min sigma_i`` over the supported coordinates."""
        idx = np.asarray(list(support), dtype=int)
        return float(2.0 ** -0.5 / np.min(np.abs(self.sigma[idx])))


class QuadraticModel(ForwardModel):
    """F_i(x) = (A x)_i + eps * x_i**2.

    The minimal model with a nonzero derivative Lipschitz constant:
    lip = 2 eps in the Hilbert configuration.  The derivative bound on a
    Bregman ball of radius rho is ``||A|| + 2 eps R`` with
    ``R = (p rho / Cp)**(1/p)``; pass ``lhat`` to override when the ball
    is not centered at the origin.
    """

    def __init__(self, matrix, eps, s=2.0, cstab=None, space=None,
                 rho_domain=None, lhat=None):
        self.matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        if self.matrix.shape[0] != self.matrix.shape[1]:
            raise ValueError("quadratic model needs a square matrix")
        self.out_dim = self.matrix.shape[0]
        self.in_dim = self.matrix.shape[1]
        if eps < 0:
            raise ValueError("nonlinearity weight must be nonnegative")
        self.eps = float(eps)
        self.s = float(s)
        self.lip = 2.0 * self.eps
        self.cstab = cstab
        self.domain_radius = rho_domain
        if lhat is not None:
            self.lhat = float(lhat)
        else:
            anorm = float(np.linalg.norm(self.matrix, 2))
            if rho_domain is not None:
                if space is None:
                    raise ValueError("rho_domain needs the space geometry")
                radius = (space.p * rho_domain / space.Cp) ** (1.0 / space.p)
                self.lhat = anorm + 2.0 * self.eps * radius
            else:
                self.lhat = anorm

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        return x @ self.matrix.T + self.eps * x ** 2

    def apply_derivative(self, x, h):
        x = np.asarray(x, dtype=float)
        h = np.asarray(h, dtype=float)
        return h @ self.matrix.T + 2.0 * self.eps * x * h

    def apply_adjoint(self, x, ystar):
        x = np.asarray(x, dtype=float)
        ystar = np.asarray(ystar, dtype=float)
        return ystar @ self.matrix + 2.0 * self.eps * x * ystar


class NoisyData:
    """Observed data together with its approximation-error level."""

    def __init__(self, ydelta, eta):
        if eta < 0:
            raise ValueError("eta must be nonnegative")
        self.ydelta = np.asarray(ydelta, dtype=float)
        self.eta = float(eta)

    def __repr__(self):
        return f"NoisyData(eta={self.eta})"


def data_norm(model: ForwardModel, v):
    """Norm of the data space l^s attached to the model."""
    return np.sum(np.abs(v) ** model.s, axis=-1) ** (1.0 / model.s)


def fd_derivative_check(model: ForwardModel, x, h, step: float = 1e-3):
    """Relative gap between a central difference of F and DF(x) h.

    Exact (up to round-off) for linear and quadratic models since the
    central difference of a quadratic has no truncation error.
    """
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)
    fd = (model.eval(x + step * h) - model.eval(x - step * h)) / (2.0 * step)
    dfh = model.apply_derivative(x, h)
    return float(data_norm(model, fd - dfh)
                 / max(1.0, float(data_norm(model, dfh))))


def adjoint_check(model: ForwardModel, x, h, ystar):
    """Absolute gap ``|<DF(x) h, y*> - <h, DF(x)* y*>|``."""
    lhs = float(np.dot(model.apply_derivative(x, h), ystar))
    rhs = float(np.dot(h, model.apply_adjoint(x, ystar)))
    return abs(lhs - rhs)


def _sample_in_set(cset: ConvexSet, space: SpaceGeometry, rng, n,
                   radius, center):
    d = space.dim
    base = center + radius * rng.uniform(-1.0, 1.0, (n, d))
    if isinstance(cset, WholeSpace):
        return base
    if isinstance(cset, Box):
        lo = np.maximum(cset.lower, center - radius)
        hi = np.minimum(cset.upper, center + radius)
        hi = np.maximum(hi, lo)
        return lo + (hi - lo) * rng.uniform(0.0, 1.0, (n, d))
    if isinstance(cset, Ball):
        dy = base - cset.center
        dist = norm(space, dy)
        scale = np.where(dist > cset.radius, cset.radius / np.maximum(
            dist, 1e-300), 1.0)
        return cset.center + scale[:, None] * dy
    if isinstance(cset, CoordinateSubspace):
        return np.where(cset.mask(d), base, 0.0)
    raise NotImplementedError(f"no sampler for {type(cset).__name__}")


def estimate_stability_constant(model: ForwardModel, cset: ConvexSet,
                                space: SpaceGeometry, n_samples: int = 1000,
                                seed: int = 0, radius: float = 1.0,
                                center=None):
    """Sampled lower bound for the conditional stability constant.

    Draws pairs in the set (restricted to a sampling ball for unbounded
    sets) and returns the maximum of ``breg(x, xt)**(1/p) / ||F(x)-F(xt)||``.
    Any claimed constant below this value is falsified.

    Raises
    ------
    DegenerateSet
        If every sampled pair has numerically identical images.
    """
    if center is None:
        center = np.zeros(space.dim)
    rng = np.random.default_rng(seed)
    x = _sample_in_set(cset, space, rng, n_samples, radius, center)
    xt = _sample_in_set(cset, space, rng, n_samples, radius, center)
    gap = data_norm(model, model.eval(x) - model.eval(xt))
    keep = gap > 1e-14
    if not np.any(keep):
        raise DegenerateSet("all sampled pairs map to the same image")
    breg = bregman_distance(space, x[keep], xt[keep])
    ratios = breg ** (1.0 / space.p) / gap[keep]
    return float(np.max(ratios))
