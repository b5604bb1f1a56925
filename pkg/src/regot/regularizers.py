"""Convex regularizers for transport plans.

Each regularizer is described by four maps on the ambient space of
nonnegative matrices: a potential (the regularized objective), its
gradient, the inverse of the gradient restricted to rank-one dual
variables (plan reconstruction from potentials), and the convex
conjugate of the potential.  Three regularizers are built in:

``entropic``
    negative Shannon entropy times a strength ``lam``; gradient
    ``C + lam*log(A)``, plans are exponentials of the duals.
``quadratic``
    half squared Frobenius norm times ``lam``; gradient ``C + lam*A``,
    plans are positive parts of the duals, so exact zeros occur.
``tsallis``
    negative Tsallis entropy of order ``q`` times ``lam``, extended
    1-homogeneously so that its gradient is scale invariant.

The module is deliberately closed: a fourth regularizer only needs a new
``_Impl`` subclass registered in ``_IMPLS``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._common import ZERO_FLOOR, as_matrix, as_vector

__all__ = [
    "Regularizer",
    "DualPotentials",
    "entropic",
    "quadratic",
    "tsallis",
    "potential",
    "gradient",
    "plan_from_potentials",
    "conjugate",
    "theta_residual",
]


@dataclass(frozen=True)
class Regularizer:
    """Tagged choice of regularizer.

    Attributes
    ----------
    kind : str
        One of ``"entropic"``, ``"quadratic"``, ``"tsallis"``.
    strength : float
        The positive weight multiplying the regularizing term.
    tsallis_q : float or None
        Order of the Tsallis entropy; required iff ``kind == "tsallis"``,
        must be positive and different from 1.
    """

    kind: str
    strength: float
    tsallis_q: float | None = None

    def __post_init__(self):
        if self.kind not in _IMPLS:
            raise ValueError(f"unknown regularizer kind {self.kind!r}")
        if not (self.strength > 0 and math.isfinite(self.strength)):
            raise ValueError("regularizer strength must be positive and finite")
        if self.kind == "tsallis":
            q = self.tsallis_q
            if q is None or not math.isfinite(q) or q <= 0 or q == 1:
                raise ValueError("tsallis order must be positive and != 1")
        elif self.tsallis_q is not None:
            raise ValueError(f"tsallis_q is meaningless for kind {self.kind!r}")


def entropic(strength):
    """Shannon-entropy regularizer of the given strength."""
    return Regularizer("entropic", float(strength))


def quadratic(strength):
    """Squared-norm regularizer of the given strength."""
    return Regularizer("quadratic", float(strength))


def tsallis(strength, q):
    """Tsallis-entropy regularizer of order ``q`` and the given strength."""
    return Regularizer("tsallis", float(strength), float(q))


@dataclass(frozen=True)
class DualPotentials:
    """Dual variables ``(alpha, beta)`` of a transport solve.

    The optimal plan satisfies ``S(P)_ij = alpha_i + beta_j`` where ``S``
    is the regularizer gradient.  The pair is only defined up to a shift
    ``(alpha + c, beta - c)``; :meth:`canonicalized` fixes the gauge by
    forcing the last beta entry to zero.

    Entries of ``-inf`` are permitted: they mark rows or columns that
    carry no mass (the reconstructed plan is zero there).  ``+inf`` and
    NaN are rejected.
    """

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        a = as_vector(self.alpha)
        b = as_vector(self.beta)
        for name, v in (("alpha", a), ("beta", b)):
            if np.isnan(v).any() or (v == np.inf).any():
                raise ValueError(f"{name} contains NaN or +inf")
        a = a.copy()
        b = b.copy()
        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    def canonicalized(self):
        """Return the gauge-fixed pair with ``beta[-1] == 0``."""
        c = self.beta[-1]
        if not np.isfinite(c):
            return self
        return DualPotentials(self.alpha + c, self.beta - c)


def _pot_arrays(pot):
    if isinstance(pot, DualPotentials):
        return pot.alpha, pot.beta
    a, b = pot
    return as_vector(a), as_vector(b)


# ---------------------------------------------------------------------------
# per-kind implementations
# ---------------------------------------------------------------------------


def _xlogx(a):
    out = np.zeros_like(a)
    mask = a > ZERO_FLOOR
    out[mask] = a[mask] * np.log(a[mask])
    return out


def _require_nonnegative(a, what):
    if (a < 0).any():
        raise ValueError(f"{what} must be nonnegative")


def _require_positive(a, what):
    if not (a > 0).all():
        raise ValueError(f"{what} must be strictly positive")


class _Entropic:
    boundary_gradient = False  # gradient blows up at zero entries

    @staticmethod
    def potential(reg, cost, a):
        # continuous extension: zero entries contribute 0 to a*log(a)
        _require_nonnegative(a, "entropic potential argument")
        lam = reg.strength
        return float((cost * a).sum() + lam * (_xlogx(a).sum() - a.sum() + 1.0))

    @staticmethod
    def gradient(reg, cost, a):
        _require_positive(a, "entropic gradient argument")
        return cost + reg.strength * np.log(a)

    @staticmethod
    def plan(reg, cost, alpha, beta):
        with np.errstate(over="ignore"):
            return np.exp((alpha[:, None] + beta[None, :] - cost) / reg.strength)

    @staticmethod
    def conjugate(reg, cost, u):
        lam = reg.strength
        with np.errstate(over="ignore"):
            return float(lam * (np.exp((u - cost) / lam).sum() - 1.0))


class _Quadratic:
    boundary_gradient = True

    @staticmethod
    def potential(reg, cost, a):
        _require_nonnegative(a, "quadratic potential argument")
        return float((cost * a).sum() + 0.5 * reg.strength * (a * a).sum())

    @staticmethod
    def gradient(reg, cost, a):
        _require_nonnegative(a, "quadratic gradient argument")
        return cost + reg.strength * a

    @staticmethod
    def plan(reg, cost, alpha, beta):
        return np.maximum(alpha[:, None] + beta[None, :] - cost, 0.0) / reg.strength

    @staticmethod
    def conjugate(reg, cost, u):
        pos = np.maximum(u - cost, 0.0)
        return float((pos * pos).sum() / (2.0 * reg.strength))


class _Tsallis:
    # for q > 1 the gradient extends continuously to the boundary
    @staticmethod
    def _boundary_ok(reg):
        return reg.tsallis_q > 1

    @staticmethod
    def potential(reg, cost, a):
        _require_nonnegative(a, "tsallis potential argument")
        q = reg.tsallis_q
        total = a.sum()
        if total <= 0:
            raise ValueError("tsallis potential argument must have positive mass")
        # 1-homogeneous extension of the Tsallis entropy
        ent = (a.sum() - total ** (1.0 - q) * (a**q).sum()) / (q - 1.0)
        return float((cost * a).sum() - reg.strength * ent)

    @staticmethod
    def gradient(reg, cost, a):
        q = reg.tsallis_q
        if q > 1:
            _require_nonnegative(a, "tsallis gradient argument")
        else:
            _require_positive(a, "tsallis gradient argument")
        p = a / a.sum()  # scale invariant
        power_sum = (p**q).sum()
        return cost + (reg.strength / (q - 1.0)) * (
            q * p ** (q - 1.0) + (1.0 - q) * power_sum - 1.0
        )

    @staticmethod
    def plan(reg, cost, alpha, beta):
        q = reg.tsallis_q
        base = ((q - 1.0) / (reg.strength * q)) * (
            alpha[:, None] + beta[None, :] - cost
        )
        if q > 1:
            return np.maximum(base, 0.0) ** (1.0 / (q - 1.0))
        if (base <= 0).any():
            raise ValueError(
                "tsallis plan with q < 1 requires alpha_i + beta_j < C_ij everywhere"
            )
        return base ** (1.0 / (q - 1.0))

    @staticmethod
    def conjugate(reg, cost, u):
        # The 1-homogeneous part has a {0, +inf} indicator as conjugate;
        # evaluating feasibility exactly is not supported.
        return None


_IMPLS = {"entropic": _Entropic, "quadratic": _Quadratic, "tsallis": _Tsallis}


def _impl(reg):
    return _IMPLS[reg.kind]


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def potential(reg, cost, a):
    """Evaluate the regularized objective at a nonnegative matrix ``a``.

    For the entropic and Tsallis kinds this is the continuous extension of
    the smooth potential; zero entries are handled by their limits.
    """
    cost = as_matrix(cost)
    a = as_matrix(a)
    if cost.shape != a.shape:
        raise ValueError(f"shape mismatch: cost {cost.shape} vs plan {a.shape}")
    return _impl(reg).potential(reg, cost, a)


def gradient(reg, cost, a):
    """Gradient of :func:`potential` at ``a``, an array of the same shape.

    The entropic gradient (and the Tsallis one for ``q < 1``) requires a
    strictly positive argument; the others accept boundary points.
    """
    cost = as_matrix(cost)
    a = as_matrix(a)
    if cost.shape != a.shape:
        raise ValueError(f"shape mismatch: cost {cost.shape} vs plan {a.shape}")
    return _impl(reg).gradient(reg, cost, a)


def plan_from_potentials(reg, cost, pot):
    """Reconstruct the plan whose gradient equals ``alpha_i + beta_j``.

    Quadratic and Tsallis (``q > 1``) reconstructions clamp negative
    bases to zero, so the result is always defined; Tsallis with
    ``q < 1`` requires all bases strictly positive.
    """
    cost = as_matrix(cost)
    alpha, beta = _pot_arrays(pot)
    if alpha.shape[0] != cost.shape[0] or beta.shape[0] != cost.shape[1]:
        raise ValueError("potential lengths do not match the cost matrix")
    return _impl(reg).plan(reg, cost, alpha, beta)


def conjugate(reg, cost, u):
    """Convex conjugate of :func:`potential`, evaluated at a matrix ``u``.

    Returns
    -------
    float or None
        The conjugate value, or None for the Tsallis kind, whose
        conjugate is an indicator function we do not evaluate; callers
        should treat None as "dual diagnostics unavailable".
    """
    cost = as_matrix(cost)
    u = as_matrix(u)
    if cost.shape != u.shape:
        raise ValueError(f"shape mismatch: cost {cost.shape} vs argument {u.shape}")
    return _impl(reg).conjugate(reg, cost, u)


def theta_residual(reg, cost, plan):
    """Optimality residual of a plan, zero when the gradient is rank-one.

    Measures ``max |S_ij - S_im - S_nj + S_nm|`` over cells, anchored at
    the last row and column.  At an optimum the gradient has the form
    ``alpha_i + beta_j`` and the alternating sum vanishes.

    For regularizers whose plans can touch the boundary (quadratic, and
    Tsallis with ``q > 1``) only cells whose four anchor entries are all
    positive enter the maximum; zero entries obey an inequality instead
    of an equality and are checked elsewhere.  Returns 0.0 when no cell
    is admissible.
    """
    cost = as_matrix(cost)
    plan = as_matrix(plan)
    if cost.shape != plan.shape:
        raise ValueError(f"shape mismatch: cost {cost.shape} vs plan {plan.shape}")
    s = gradient(reg, cost, plan)
    res = np.abs(s[:-1, :-1] - s[:-1, -1:] - s[-1:, :-1] + s[-1, -1])
    boundary = reg.kind == "quadratic" or (
        reg.kind == "tsallis" and reg.tsallis_q > 1
    )
    if boundary:
        active = plan > ZERO_FLOOR
        admissible = (
            active[:-1, :-1]
            & active[:-1, -1:]
            & active[-1:, :-1]
            & active[-1, -1]
        )
        if not admissible.any():
            return 0.0
        return float(res[admissible].max())
    return float(res.max()) if res.size else 0.0
