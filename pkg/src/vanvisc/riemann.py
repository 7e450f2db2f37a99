"""Exact Riemann solver: Lax curves, admissible shocks, signed strengths.

Wave strength follows the lambda-difference convention: an i-wave joining
u_left to u_right has sigma = lambda_i(u_right) - lambda_i(u_left), so
shocks carry sigma < 0 and rarefactions sigma > 0 under genuine
nonlinearity.  The i-shock branch of the wave curve is parametrized by that
same sigma (root-finding on the Hugoniot locus), which keeps strengths
additive in every functional downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CurveEscape, NoRoot, NoSolution, NotOnLocus
from .system import eigen_frame

RH_TOL = 1e-8
_NEWTON_TOL = 1e-11
ZERO_WAVE = 1e-12


@dataclass(frozen=True)
class ElementaryWave:
    family: int            # 1-based
    kind: str              # "shock" | "rarefaction"
    strength: float
    speed: object          # float for shocks, (lambda_left, lambda_right) for fans
    left_state: np.ndarray
    right_state: np.ndarray


@dataclass(frozen=True)
class WaveFan:
    waves: list
    intermediate_states: list  # omega_0 = u_minus, ..., omega_n = u_plus

    def strengths(self, n):
        out = np.zeros(n)
        for w in self.waves:
            out[w.family - 1] += w.strength
        return out


def _rk4_curve(model, i, u0, s, nmax=None):
    """Integrate d(omega)/ds = r_i(omega) with classic RK4, fixed step."""
    steps = max(8, int(np.ceil(abs(s) / 0.01)))
    if nmax:
        steps = min(steps, nmax)
    h = s / steps
    u = np.array(u0, dtype=float)

    def rhs(w):
        return eigen_frame(model, w).r[i - 1]

    for _ in range(steps):
        k1 = rhs(u)
        k2 = rhs(u + 0.5 * h * k1)
        k3 = rhs(u + 0.5 * h * k2)
        k4 = rhs(u + h * k3)
        u = u + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return u


def lax_curve(model, i, u0, s, max_param=1.0):
    """Point at parameter s on the i-th Lax wave curve through u0.

    s > 0 follows the rarefaction curve (integral curve of r_i, so that
    lambda_i increases by exactly s); s < 0 lands on the Hugoniot locus with
    lambda_i(result) - lambda_i(u0) = s.
    """
    u0 = np.asarray(u0, dtype=float)
    model.check_domain(u0)
    if abs(s) > max_param:
        raise ValueError(f"|s|={abs(s)} exceeds max_param={max_param}")
    if s == 0.0:
        return u0.copy()
    if s > 0:
        u = _rk4_curve(model, i, u0, s)
        if not model.in_domain(u, slack=1e-12):
            raise CurveEscape(f"rarefaction curve left domain at {u}")
        return u
    return _hugoniot_point(model, i, u0, s)


def _hugoniot_point(model, i, u0, s):
    """Solve f(u)-f(u0) = speed (u-u0), lambda_i(u)-lambda_i(u0) = s."""
    lam0 = eigen_frame(model, u0).lambdas[i - 1]
    r0 = eigen_frame(model, u0).r[i - 1]
    n = model.n
    z = np.empty(n + 1)
    z[:n] = u0 + s * r0
    z[n] = lam0 + 0.5 * s

    def res(z):
        u, sp = z[:n], z[n]
        out = np.empty(n + 1)
        out[:n] = model.flux(u) - model.flux(u0) - sp * (u - u0)
        out[n] = eigen_frame(model, u).lambdas[i - 1] - lam0 - s
        return out

    f = res(z)
    for _ in range(60):
        if np.max(np.abs(f)) < _NEWTON_TOL:
            u = z[:n]
            if not model.in_domain(u, slack=1e-12):
                raise CurveEscape(f"Hugoniot locus left domain at {u}")
            return u
        J = np.empty((n + 1, n + 1))
        for k in range(n + 1):
            dz = np.zeros(n + 1)
            dz[k] = 1e-7 * max(1.0, abs(z[k]))
            J[:, k] = (res(z + dz) - f) / dz[k]
        try:
            step = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError:
            raise NoRoot("singular Jacobian in Hugoniot parametrization")
        lam_damp = 1.0
        for _ in range(40):
            z_new = z + lam_damp * step
            try:
                f_new = res(z_new)
            except Exception:
                f_new = None
            if f_new is not None and np.max(np.abs(f_new)) < np.max(np.abs(f)):
                z, f = z_new, f_new
                break
            lam_damp *= 0.5
        else:
            raise NoRoot("Hugoniot Newton stalled")
    raise NoRoot("Hugoniot Newton did not converge in 60 iterations")


def shock_speed(model, u_minus, u_plus, tol=RH_TOL):
    """Least-squares Rankine-Hugoniot speed; NotOnLocus if the pair is not
    (numerically) on a single Hugoniot locus."""
    um = np.asarray(u_minus, dtype=float)
    up = np.asarray(u_plus, dtype=float)
    du = up - um
    nd = float(du @ du)
    if nd == 0.0:
        raise NotOnLocus("states coincide")
    df = model.flux(up) - model.flux(um)
    speed = float(df @ du) / nd
    resid = float(np.linalg.norm(df - speed * du))
    if resid > tol:
        raise NotOnLocus(f"RH residual {resid:.3e} exceeds {tol:.1e}")
    return speed


def _compose(model, u_minus, s, max_param):
    u = np.asarray(u_minus, dtype=float)
    states = [u]
    for i in range(1, model.n + 1):
        u = lax_curve(model, i, u, float(s[i - 1]), max_param=max_param)
        states.append(u)
    return states


def solve_riemann(model, u_minus, u_plus, max_strength=4.0, max_iter=100):
    """Classical Lax solution of the Riemann problem (small data).

    Returns a WaveFan whose strengths, composed through lax_curve, map
    u_minus to u_plus with residual below 1e-10.
    """
    um = np.asarray(u_minus, dtype=float)
    up = np.asarray(u_plus, dtype=float)
    model.check_domain(um)
    model.check_domain(up)
    n = model.n
    scale = max(1.0, float(np.max(np.abs(up))), float(np.max(np.abs(um))))

    if np.max(np.abs(up - um)) < ZERO_WAVE * scale:
        return WaveFan(waves=[], intermediate_states=[um, up])

    mid = 0.5 * (um + up)
    fr = eigen_frame(model, mid)
    s = fr.l @ (up - um)
    s = np.clip(s, -max_strength, max_strength)
    slack = 1.5 * max_strength + 0.1  # Newton probes may step past the data size

    def residual(s):
        states = _compose(model, um, s, max_param=slack)
        return states[-1] - up, states

    f, states = residual(s)
    it = 0
    while np.max(np.abs(f)) > _NEWTON_TOL * scale:
        it += 1
        if it > max_iter:
            raise NoSolution(f"Riemann iteration stalled at residual {np.max(np.abs(f)):.3e}")
        J = np.empty((n, n))
        h = 1e-7
        for k in range(n):
            ds = np.zeros(n)
            ds[k] = h
            fk, _ = residual(s + ds)
            J[:, k] = (fk - f) / h
        try:
            step = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError:
            raise NoSolution("singular Jacobian in Riemann iteration")
        lam = 1.0
        for _ in range(40):
            try:
                f_new, states_new = residual(s + lam * step)
            except Exception:
                f_new = None
            if f_new is not None and np.max(np.abs(f_new)) < np.max(np.abs(f)):
                s, f, states = s + lam * step, f_new, states_new
                break
            lam *= 0.5
        else:
            raise NoSolution("Riemann damping failed")

    waves = []
    for i in range(1, n + 1):
        si = float(s[i - 1])
        ul, ur = states[i - 1], states[i]
        if abs(si) <= ZERO_WAVE:
            continue
        if si < 0:
            sp = shock_speed(model, ul, ur)
            waves.append(ElementaryWave(i, "shock", si, sp, ul, ur))
        else:
            lam_l = eigen_frame(model, ul).lambdas[i - 1]
            lam_r = eigen_frame(model, ur).lambdas[i - 1]
            waves.append(ElementaryWave(i, "rarefaction", si, (lam_l, lam_r), ul, ur))
    return WaveFan(waves=waves, intermediate_states=states)


def lax_admissible(model, wave, tol=1e-9):
    """Lax inequalities lambda_i(u+) < speed < lambda_i(u-) for a shock."""
    if wave.kind != "shock":
        return True
    i = wave.family - 1
    lam_l = eigen_frame(model, wave.left_state).lambdas[i]
    lam_r = eigen_frame(model, wave.right_state).lambdas[i]
    return lam_r < wave.speed + tol and wave.speed < lam_l + tol
