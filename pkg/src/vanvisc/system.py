"""Hyperbolic system definitions: flux, Jacobian and normalized eigenframes.

Ships two genuinely nonlinear presets: the scalar Burgers law f(u) = u^2/2
and the 2x2 p-system (v, w) with f(v, w) = (-w, p(v)), p(v) = k v^(-gamma).
Right eigenvectors are scaled so that grad(lambda_i) . r_i = 1; the left
basis is the dual one (l_i . r_j = delta_ij).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import BadParameter, GNLViolation, NonHyperbolic, OutOfDomain

_EIG_TOL = 1e-12
_FD_STEP = 1e-6


@dataclass(frozen=True)
class SystemModel:
    n: int
    flux: Callable
    jacobian: Callable
    domain_box: tuple  # ((lo_1, hi_1), ..., (lo_n, hi_n))
    name: str = "custom"
    params: dict = field(default_factory=dict)
    # optional closed-form gradient of the eigenvalues, rows = grad lambda_i;
    # presets ship one, the finite-difference fallback remains the oracle
    grad_lambda_fn: Callable = None

    def in_domain(self, u, slack=0.0):
        u = np.asarray(u, dtype=float)
        for ui, (lo, hi) in zip(u, self.domain_box):
            if ui < lo - slack or ui > hi + slack:
                return False
        return True

    def check_domain(self, u):
        if not self.in_domain(u):
            raise OutOfDomain(f"state {np.asarray(u)} outside domain_box {self.domain_box}")

    def max_speed(self, samples=5):
        """Largest |lambda_i| over a sample grid of the domain box."""
        worst = 0.0
        for u in _domain_grid(self.domain_box, samples):
            lam = np.linalg.eigvals(self.jacobian(u)).real
            worst = max(worst, float(np.max(np.abs(lam))))
        return worst


@dataclass(frozen=True)
class EigenFrame:
    lambdas: np.ndarray  # sorted ascending, shape (n,)
    r: np.ndarray        # r[i] = i-th right eigenvector, shape (n, n)
    l: np.ndarray        # l[i] . r[j] = delta_ij


def _domain_grid(box, samples):
    axes = [np.linspace(lo, hi, samples) for lo, hi in box]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def _eig_sorted(A):
    """Real sorted eigen-decomposition; closed form for n <= 2."""
    n = A.shape[0]
    if n == 1:
        return np.array([A[0, 0]]), np.array([[1.0]])
    if n == 2:
        tr = A[0, 0] + A[1, 1]
        det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
        disc = tr * tr / 4.0 - det
        if disc < 0:
            raise NonHyperbolic("complex eigenvalues")
        rt = np.sqrt(disc)
        lams = np.array([tr / 2.0 - rt, tr / 2.0 + rt])
        vecs = []
        for lam in lams:
            if abs(A[0, 1]) >= abs(A[1, 0]):
                v = np.array([A[0, 1], lam - A[0, 0]])
            else:
                v = np.array([lam - A[1, 1], A[1, 0]])
            nv = np.linalg.norm(v)
            if nv == 0.0:
                v = np.array([1.0, 0.0]) if abs(A[0, 0] - lam) < abs(A[1, 1] - lam) else np.array([0.0, 1.0])
                nv = 1.0
            vecs.append(v / nv)
        return lams, np.array(vecs)
    lam, V = np.linalg.eig(A)
    order = np.argsort(lam.real)
    return lam.real[order], V.real[:, order].T


def grad_lambda_fd(model, u, i, step=_FD_STEP):
    """Central finite difference of lambda_i at u (i is 0-based here)."""
    u = np.asarray(u, dtype=float)
    g = np.zeros(model.n)
    for k in range(model.n):
        e = np.zeros(model.n)
        e[k] = step
        lp, _ = _eig_sorted(model.jacobian(u + e))
        lm, _ = _eig_sorted(model.jacobian(u - e))
        g[k] = (lp[i] - lm[i]) / (2 * step)
    return g


def grad_lambda(model, u, i, step=_FD_STEP):
    if model.grad_lambda_fn is not None:
        return model.grad_lambda_fn(np.asarray(u, dtype=float))[i]
    return grad_lambda_fd(model, u, i, step)


def eigen_frame(model, u):
    """Normalized eigenframe at u (grad lambda_i . r_i = 1, l_i . r_j = delta)."""
    u = np.asarray(u, dtype=float)
    model.check_domain(u)
    lams, V = _eig_sorted(model.jacobian(u))
    if model.n > 1 and np.min(np.diff(lams)) < _EIG_TOL:
        raise NonHyperbolic(f"eigenvalue gap below {_EIG_TOL} at {u}")
    R = np.empty((model.n, model.n))
    for i in range(model.n):
        g = grad_lambda(model, u, i)
        scale = float(g @ V[i])
        if abs(scale) < 1e-14:
            raise GNLViolation(f"grad lambda_{i+1} . r_{i+1} vanishes at {u}")
        R[i] = V[i] / scale
    L = np.linalg.inv(R.T)  # rows of L are dual to rows of R
    return EigenFrame(lambdas=lams, r=R, l=L)


def preset_model(name, gamma=None, k=None):
    """Named genuinely nonlinear presets: "burgers" or "p_system"."""
    if name == "burgers":
        return SystemModel(
            n=1,
            flux=lambda u: np.array([0.5 * u[0] * u[0]]),
            jacobian=lambda u: np.array([[u[0]]]),
            domain_box=((-4.0, 4.0),),
            name="burgers",
            grad_lambda_fn=lambda u: np.array([[1.0]]),
        )
    if name == "p_system":
        gamma = 2.0 if gamma is None else float(gamma)
        k = 1.0 if k is None else float(k)
        if gamma <= 1.0:
            raise BadParameter(f"p_system needs gamma > 1, got {gamma}")
        if k <= 0.0:
            raise BadParameter(f"p_system needs k > 0, got {k}")

        def flux(u):
            v, w = u
            return np.array([-w, k * v ** (-gamma)])

        def jac(u):
            v, _ = u
            return np.array([[0.0, -1.0], [-gamma * k * v ** (-gamma - 1.0), 0.0]])

        root_gk = np.sqrt(gamma * k)

        def grad_lam(u):
            # lambda_{1,2} = -/+ sqrt(gamma k) v^(-(gamma+1)/2)
            v, _ = u
            d = root_gk * 0.5 * (gamma + 1.0) * v ** (-(gamma + 3.0) / 2.0)
            return np.array([[d, 0.0], [-d, 0.0]])

        return SystemModel(
            n=2,
            flux=flux,
            jacobian=jac,
            domain_box=((0.5, 2.0), (-2.0, 2.0)),
            name="p_system",
            params={"gamma": gamma, "k": k},
            grad_lambda_fn=grad_lam,
        )
    raise BadParameter(f"unknown preset {name!r}")


def model_from_config(system, gamma=None, k=None):
    """Preset lookup used by config files: system = "burgers" | "p_system"."""
    return preset_model(system, gamma=gamma, k=k)


def check_genuine_nonlinearity(model, samples=100, rng=None):
    """Sample grad(lambda_i) . r_i with unit eigenvectors over the domain box.

    The eigenvector sign is fixed so the product is >= 0 (r is only defined
    up to sign before GNL normalization).  Returns a dict with per-family
    minima of the product, the minimum eigenvalue gap, and the sample count.
    Raises GNLViolation if any family degenerates on the sample set.
    """
    if samples < 1:
        raise BadParameter("samples must be >= 1")
    per_side = max(2, int(round(samples ** (1.0 / model.n))))
    pts = _domain_grid(model.domain_box, per_side)
    if rng is not None:
        lo = np.array([b[0] for b in model.domain_box])
        hi = np.array([b[1] for b in model.domain_box])
        extra = lo + (hi - lo) * rng.random((samples, model.n))
        pts = np.vstack([pts, extra])
    gnl_min = np.full(model.n, np.inf)
    argmin = [None] * model.n
    gap_min = np.inf
    for u in pts:
        lams, V = _eig_sorted(model.jacobian(u))
        if model.n > 1:
            gap_min = min(gap_min, float(np.min(np.diff(lams))))
        for i in range(model.n):
            val = abs(float(grad_lambda_fd(model, u, i) @ V[i]))
            if val < gnl_min[i]:
                gnl_min[i] = val
                argmin[i] = u.copy()
    for i in range(model.n):
        if gnl_min[i] < 1e-8:
            raise GNLViolation(
                f"family {i+1} degenerates: grad lambda . r = {gnl_min[i]:.3e} at {argmin[i]}"
            )
    return {
        "gnl_min": gnl_min,
        "gnl_argmin": argmin,
        "min_gap": (gap_min if model.n > 1 else np.inf),
        "n_samples": pts.shape[0],
    }
