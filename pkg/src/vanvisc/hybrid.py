"""Hybrid approximation: mollified front tracking plus inserted shock layers.

v(t) = u(t) * phi_delta + sum over big shocks of (profile insertion minus
mollified step).  The correction is supported on J_alpha = (x_alpha - delta,
x_alpha + delta); inside, the rescaled travelling profile is composed with
the squeeze map that compresses the line onto a width-2 sqrt(eps) window.
All x- and t-derivatives are closed forms (the only time dependence inside a
strip is the linear motion of fronts), so the residual integrand
|v_t + A(v) v_x - eps v_xx| is evaluated without numerical differentiation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (MissingProfile, OutOfRange, OverlappingTracks,
                     ResolutionTooCoarse, UnclassifiableEvent)
from .viscous import shock_profile

KERNEL_C = 76545.0 / 4096.0   # unit mass for (4/9 - s^2)^3 on |s| <= 2/3
KERNEL_SUPPORT = 2.0 / 3.0


class Mollifier:
    """Polynomial bump phi(s) = c (4/9 - s^2)^3 on |s| <= 2/3, rescaled by
    phi_delta(s) = phi(s/delta)/delta.  Even, unit mass, s phi'(s) <= 0."""

    def __init__(self, delta):
        assert delta > 0
        self.delta = float(delta)

    def phi(self, s):
        t = np.asarray(s, dtype=float) / self.delta
        inside = np.abs(t) < KERNEL_SUPPORT
        q = np.where(inside, 4.0 / 9.0 - t * t, 0.0)
        return KERNEL_C * q ** 3 / self.delta

    def dphi(self, s):
        t = np.asarray(s, dtype=float) / self.delta
        inside = np.abs(t) < KERNEL_SUPPORT
        q = np.where(inside, 4.0 / 9.0 - t * t, 0.0)
        return KERNEL_C * 3.0 * q ** 2 * (-2.0 * t) / self.delta ** 2

    def cdf(self, s):
        """Phi(s) = integral of phi_delta up to s (0 at -inf, 1 at +inf)."""
        t = np.clip(np.asarray(s, dtype=float) / self.delta, -KERNEL_SUPPORT, KERNEL_SUPPORT)
        a = KERNEL_SUPPORT
        # antiderivative of (4/9 - t^2)^3
        P = (64.0 / 729.0) * t - (16.0 / 81.0) * t ** 3 + (12.0 / 45.0) * t ** 5 - t ** 7 / 7.0
        Pa = (64.0 / 729.0) * a - (16.0 / 81.0) * a ** 3 + (12.0 / 45.0) * a ** 5 - a ** 7 / 7.0
        return KERNEL_C * (P + Pa)


def mollify(u, delta):
    """Mollified evaluator for a PiecewiseConstant u (exact convolution)."""
    mol = Mollifier(delta)
    xs = np.asarray(u.xs, dtype=float)
    jumps = u.jumps() if xs.size else np.zeros((0, u.n))
    u0 = u.values[0]

    def value(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.tile(u0, (x.size, 1))
        if xs.size:
            out = out + mol.cdf(x[:, None] - xs[None, :]) @ jumps
        return out

    return value


def mollification_l1_error(u, delta, n_sub=8, n_gauss=10):
    """Integral of |u * phi_delta - u| (dense Gauss between kernel edges)."""
    mol = Mollifier(delta)
    xs = np.asarray(u.xs, dtype=float)
    if xs.size == 0:
        return 0.0
    jumps = u.jumps()
    edges = np.unique(np.concatenate([
        xs, xs - KERNEL_SUPPORT * delta, xs + KERNEL_SUPPORT * delta]))
    gx, gw = np.polynomial.legendre.leggauss(n_gauss)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        sub = np.linspace(a, b, n_sub + 1)
        for s0, s1 in zip(sub[:-1], sub[1:]):
            h = 0.5 * (s1 - s0)
            pts = 0.5 * (s0 + s1) + h * gx
            diff = mol.cdf(pts[:, None] - xs[None, :]) @ jumps - (u(pts) - u.values[0])
            total += h * float(gw @ np.linalg.norm(diff, axis=1))
    return total


def oscillation_weighted_tv(u, delta):
    """Sum over jumps of Osc{u; [x_j - delta, x_j + delta]} |jump_j|."""
    total = 0.0
    for x, du in zip(u.xs, u.jumps()):
        total += u.oscillation(x - delta, x + delta) * float(np.linalg.norm(du))
    return total


# ---------------------------------------------------------------------------
# squeeze map (C^1 compression of the line onto |xi| < sqrt(eps))

def squeeze_map(xi, epsilon):
    r = np.sqrt(epsilon)
    x = np.asarray(xi, dtype=float)
    if np.any(np.abs(x) >= r):
        raise OutOfRange(f"|xi| must be < sqrt(eps) = {r}")
    return _squeeze(x, epsilon)[0] if x.ndim == 0 else _squeeze(x, epsilon)


def _squeeze(x, epsilon):
    r = np.sqrt(epsilon)
    x = np.atleast_1d(x)
    out = x.copy()
    hi = x > 0.5 * r
    lo = x < -0.5 * r
    out[hi] = epsilon / (4.0 * (r - x[hi]))
    out[lo] = -epsilon / (4.0 * (r + x[lo]))
    return out


def _squeeze_d1(x, epsilon):
    r = np.sqrt(epsilon)
    x = np.atleast_1d(x)
    out = np.ones_like(x)
    hi = x > 0.5 * r
    lo = x < -0.5 * r
    out[hi] = epsilon / (4.0 * (r - x[hi]) ** 2)
    out[lo] = epsilon / (4.0 * (r + x[lo]) ** 2)
    return out


def _squeeze_d2(x, epsilon):
    r = np.sqrt(epsilon)
    x = np.atleast_1d(x)
    out = np.zeros_like(x)
    hi = x > 0.5 * r
    lo = x < -0.5 * r
    out[hi] = epsilon / (2.0 * (r - x[hi]) ** 3)
    out[lo] = -epsilon / (2.0 * (r + x[lo]) ** 3)
    return out


# ---------------------------------------------------------------------------
# big-shock selection

@dataclass
class TrackSegment:
    t0: float
    t1: float
    uid: int
    x0: float
    speed: float
    left_state: np.ndarray
    right_state: np.ndarray
    sigma: float


@dataclass
class BigShockTrack:
    id: int
    family: int
    rho: float
    t_minus: float
    t_plus: float
    segments: list = field(default_factory=list)

    def alive(self, t, side="+"):
        if side == "+":
            return self.t_minus <= t < self.t_plus
        return self.t_minus < t <= self.t_plus

    def segment_at(self, t, side="+"):
        for seg in self.segments:
            if (seg.t0 <= t < seg.t1) if side == "+" else (seg.t0 < t <= seg.t1):
                return seg
        if side == "+" and self.segments and abs(t - self.segments[-1].t1) < 1e-14:
            return self.segments[-1]
        return None

    def x(self, t, side="+"):
        seg = self.segment_at(t, side)
        return None if seg is None else seg.x0 + (t - seg.t0) * seg.speed

    def sigma(self, t, side="+"):
        seg = self.segment_at(t, side)
        return None if seg is None else seg.sigma

    def uid_at(self, t, side="+"):
        seg = self.segment_at(t, side)
        return None if seg is None else seg.uid

    def max_strength(self):
        return max(abs(s.sigma) for s in self.segments)


def _shock_chains(run):
    """Lineage chains of shock fronts: lists of (config_index, uid, merged)
    where merged marks links created by a same-family shock-shock merge."""
    chains = []
    owner = {}         # uid -> chain index
    for f in run.configs[0].fronts:
        if f.kind == "shock":
            owner[f.uid] = len(chains)
            chains.append([(0, f.uid, [])])
    for k, ev in enumerate(run.events):
        incoming = [f for f in ev.incoming if f.kind == "shock"]
        outgoing = [f for f in ev.outgoing if f.kind == "shock"]
        by_family_in = {}
        for f in incoming:
            by_family_in.setdefault(f.family, []).append(f)
        for g in outgoing:
            parents = by_family_in.pop(g.family, [])
            if parents:
                main = max(parents, key=lambda f: abs(f.strength))
                ci = owner.pop(main.uid)
                chains[ci].append((k + 1, g.uid, [abs(f.strength) for f in parents]))
                owner[g.uid] = ci
                for other in parents:
                    owner.pop(other.uid, None)
            else:
                owner[g.uid] = len(chains)
                chains.append([(k + 1, g.uid, [])])
        for fam, parents in by_family_in.items():
            for f in parents:
                owner.pop(f.uid, None)
    return chains


def select_big_shocks(run, rho):
    """Tracks of shocks that reach strength rho and stay above rho/2.

    A track opens when the chain's strength first reaches rho/2 provided it
    later attains rho within the same stretch, follows merges through the
    strongest same-family parent, and closes when the strength drops below
    rho/2 (or the chain ends).  A merge of two shocks that are each already
    above rho/2 but below rho starts the track at the merge itself: the
    parents alone never qualify as large.
    """
    t_edges = [0.0] + list(run.times) + [run.tau]
    uid_lookup = [{f.uid: f for f in cfg.fronts} for cfg in run.configs]
    tracks = []
    for chain in _shock_chains(run):
        segs = []
        big_merge = []   # parallel flags: segment began at a >=rho/2 + >=rho/2 merge
        for cfg_idx, uid, parents in chain:
            f = uid_lookup[cfg_idx].get(uid)
            if f is None:
                continue
            t0, t1 = t_edges[cfg_idx], t_edges[cfg_idx + 1]
            k = cfg_idx
            # a front can persist through events it does not participate in
            while k + 1 < len(run.configs) and uid in uid_lookup[k + 1]:
                k += 1
                t1 = t_edges[k + 1]
            if t1 <= t0:
                continue
            if segs and t0 < segs[-1].t1 - 1e-14:
                continue
            segs.append(TrackSegment(t0=t0, t1=t1, uid=uid, x0=f.pos, speed=f.speed,
                                     left_state=f.left_state, right_state=f.right_state,
                                     sigma=f.strength))
            big_merge.append(sum(1 for p in parents if p >= rho / 2.0) >= 2)
        if not segs:
            continue
        family = None
        for cfg_idx, uid, _ in chain:
            f = uid_lookup[cfg_idx].get(uid)
            if f is not None:
                family = f.family
                break
        # stretches with |sigma| >= rho/2 that attain rho
        j = 0
        while j < len(segs):
            if abs(segs[j].sigma) < rho / 2.0:
                j += 1
                continue
            k = j
            while k + 1 < len(segs) and abs(segs[k + 1].sigma) >= rho / 2.0:
                k += 1
            stretch = segs[j : k + 1]
            flags = big_merge[j : k + 1]
            first_rho = next(
                (m for m, s in enumerate(stretch) if abs(s.sigma) >= rho), None
            )
            if first_rho is not None:
                open_idx = 0
                for m in range(first_rho + 1):
                    # the qualification must not ride on swallowing another
                    # would-be-large shock before rho was ever attained
                    if flags[m] and abs(stretch[m - 1].sigma if m else 0.0) < rho:
                        open_idx = m
                stretch = stretch[open_idx:]
                tracks.append(BigShockTrack(
                    id=len(tracks), family=family, rho=rho,
                    t_minus=stretch[0].t0, t_plus=stretch[-1].t1,
                    segments=stretch,
                ))
            j = k + 1
    tracks.sort(key=lambda tr: (tr.t_minus, tr.segments[0].x0))
    for i, tr in enumerate(tracks):
        tr.id = i
    return tracks


# ---------------------------------------------------------------------------
# hybrid approximation per strip

class ProfileCache:
    def __init__(self, model):
        self.model = model
        self._cache = {}

    def __call__(self, u_minus, u_plus):
        key = (tuple(np.round(u_minus, 13)), tuple(np.round(u_plus, 13)))
        if key not in self._cache:
            self._cache[key] = shock_profile(self.model, u_minus, u_plus)
        return self._cache[key]


@dataclass
class _TrackSlice:
    track_id: int
    family: int
    x0: float
    speed: float
    left_state: np.ndarray
    right_state: np.ndarray
    sigma: float
    profile: object

    def x(self, t, t0):
        return self.x0 + (t - t0) * self.speed


class HybridStrip:
    """The approximation v on one strip [t0, t1) between interaction times."""

    def __init__(self, model, config, t0, t1, track_slices, epsilon, delta):
        self.model = model
        self.t0, self.t1 = t0, t1
        self.epsilon = epsilon
        self.delta = delta
        self.mol = Mollifier(delta)
        self.u_left = config.left_state
        self.xs0 = np.array([f.pos for f in config.fronts])
        self.speeds = np.array([f.speed for f in config.fronts])
        prof = config.profile()
        self.jumps = prof.jumps() if self.xs0.size else np.zeros((0, model.n))
        self.tracks = track_slices

    def front_positions(self, t):
        return self.xs0 + (t - self.t0) * self.speeds

    def _mollified(self, t, x):
        xs = self.front_positions(t)
        d = x[:, None] - xs[None, :]
        v = np.tile(self.u_left, (x.size, 1))
        if xs.size:
            K = self.mol.cdf(d)
            v = v + K @ self.jumps
            phi = self.mol.phi(d)
            vx = phi @ self.jumps
            vxx = self.mol.dphi(d) @ self.jumps
            vt = -(phi * self.speeds[None, :]) @ self.jumps
        else:
            vx = np.zeros_like(v)
            vxx = np.zeros_like(v)
            vt = np.zeros_like(v)
        return v, vx, vxx, vt

    def _insertion(self, ts, t, x):
        """omega-tilde minus rho for one track slice, with derivatives."""
        eps = self.epsilon
        r = np.sqrt(eps)
        xa = ts.x(t, self.t0)
        xi = x - xa
        du = ts.right_state - ts.left_state
        n = self.model.n
        v = np.zeros((x.size, n))
        vx = np.zeros_like(v)
        vxx = np.zeros_like(v)

        # squeezed profile inside |xi| < sqrt(eps), endpoint states beyond
        inner = np.abs(xi) < r * (1.0 - 1e-12)
        if np.any(inner):
            z = xi[inner]
            s_arg = _squeeze(z, eps) / eps
            p1 = _squeeze_d1(z, eps)
            p2 = _squeeze_d2(z, eps)
            w = np.atleast_2d(ts.profile.value(s_arg))
            w1 = np.atleast_2d(ts.profile.deriv(s_arg))
            w2 = np.atleast_2d(ts.profile.second(s_arg))
            v[inner] = w
            vx[inner] = w1 * (p1 / eps)[:, None]
            vxx[inner] = w2 * (p1 ** 2 / eps ** 2)[:, None] + w1 * (p2 / eps)[:, None]
        v[~inner & (xi <= 0)] = ts.left_state
        v[~inner & (xi > 0)] = ts.right_state

        # subtract the mollified single step
        K = self.mol.cdf(xi)
        v -= ts.left_state[None, :] + K[:, None] * du[None, :]
        phi = self.mol.phi(xi)
        vx -= phi[:, None] * du[None, :]
        vxx -= self.mol.dphi(xi)[:, None] * du[None, :]
        vt = -ts.speed * vx
        return v, vx, vxx, vt

    def evaluate(self, t, x, parts=False):
        """v and its derivatives at (t, x); x is a 1-D array."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        v, vx, vxx, vt = self._mollified(t, x)
        for ts in self.tracks:
            dv, dvx, dvxx, dvt = self._insertion(ts, t, x)
            v = v + dv
            vx = vx + dvx
            vxx = vxx + dvxx
            vt = vt + dvt
        if parts:
            return v, vx, vxx, vt
        return v

    def value(self, t, x):
        return self.evaluate(t, x)

    def residual_pointwise(self, t, x):
        v, vx, vxx, vt = self.evaluate(t, x, parts=True)
        Av_x = _a_times(self.model, v, vx)
        return np.linalg.norm(vt + Av_x - self.epsilon * vxx, axis=1)


def _a_times(model, v, vx):
    if model.name == "burgers":
        return v * vx
    if model.name == "p_system":
        gamma = model.params["gamma"]
        k = model.params["k"]
        out = np.empty_like(vx)
        out[:, 0] = -vx[:, 1]
        out[:, 1] = -gamma * k * v[:, 0] ** (-gamma - 1.0) * vx[:, 0]
        return out
    out = np.empty_like(vx)
    for j in range(v.shape[0]):
        out[j] = model.jacobian(v[j]) @ vx[j]
    return out


class HybridApprox:
    """All strips of the construction over [0, tau]."""

    def __init__(self, model, strips, tau, epsilon, delta, rho):
        self.model = model
        self.strips = strips
        self.tau = tau
        self.epsilon = epsilon
        self.delta = delta
        self.rho = rho

    def strip_at(self, t):
        if t < 0 or t > self.tau + 1e-14:
            raise OutOfRange(f"t={t} outside [0, {self.tau}]")
        for st in self.strips:
            if st.t0 <= t < st.t1 or (st is self.strips[-1] and t <= st.t1 + 1e-14):
                return st
        raise OutOfRange(f"no strip covers t={t}")

    def value(self, t, x):
        return self.strip_at(t).value(t, np.atleast_1d(x))


def build_hybrid(run, tracks, epsilon, delta=None, profiles=None):
    """Assemble the per-strip hybrid approximation of a front-tracking run."""
    if delta is None:
        delta = np.sqrt(epsilon)
    if profiles is None:
        profiles = ProfileCache(run.model)
    t_edges = [0.0] + list(run.times) + [run.tau]
    strips = []
    for k, cfg in enumerate(run.configs):
        t0, t1 = t_edges[k], t_edges[k + 1]
        if t1 <= t0 + 1e-15:
            continue
        slices = []
        for tr in tracks:
            seg = tr.segment_at(0.5 * (t0 + t1))
            if seg is None or not tr.alive(0.5 * (t0 + t1)):
                continue
            prof = profiles(seg.left_state, seg.right_state)
            if prof is None:
                raise MissingProfile(f"no profile for track {tr.id} on [{t0}, {t1})")
            fr = {f.uid: f for f in cfg.fronts}.get(seg.uid)
            if fr is None:
                raise UnclassifiableEvent(f"track {tr.id} uid {seg.uid} missing from strip config")
            slices.append(_TrackSlice(track_id=tr.id, family=tr.family, x0=fr.pos,
                                      speed=fr.speed, left_state=seg.left_state,
                                      right_state=seg.right_state, sigma=seg.sigma,
                                      profile=prof))
        for i in range(len(slices)):
            for j in range(i + 1, len(slices)):
                a, b = slices[i], slices[j]
                gap0 = abs(a.x(t0, t0) - b.x(t0, t0))
                gap1 = abs(a.x(t1, t0) - b.x(t1, t0))
                if min(gap0, gap1) < 2 * delta and a.family != b.family:
                    raise OverlappingTracks(
                        f"tracks {a.track_id}, {b.track_id} of different families overlap"
                    )
        strips.append(HybridStrip(run.model, cfg, t0, t1, slices, epsilon, delta))
    return HybridApprox(run.model, strips, run.tau, epsilon, delta,
                        rho=tracks[0].rho if tracks else None)


# ---------------------------------------------------------------------------
# residual and jump diagnostics

@dataclass
class ResidualQuadrature:
    dx_far: float = None       # default delta / 6
    dx_near: float = None      # default eps / 8 within |x - x_alpha| <= 1.1 sqrt(eps)
    t_step: float = None       # default sqrt(eps) / 6
    nt_min: int = 2
    pad: float = None          # default delta


def _strip_grid(strip, t, quad):
    delta = strip.delta
    eps = strip.epsilon
    dx_far = quad.dx_far or delta / 6.0
    dx_near = quad.dx_near or eps / 8.0
    pad = quad.pad if quad.pad is not None else delta
    xs = strip.front_positions(t)
    if xs.size == 0:
        return None
    lo, hi = xs.min() - pad, xs.max() + pad
    edges = [np.arange(lo, hi + dx_far, dx_far)]
    r = np.sqrt(eps)
    for ts in strip.tracks:
        xa = ts.x(t, strip.t0)
        edges.append(np.arange(xa - 1.1 * r, xa + 1.1 * r + dx_near, dx_near))
    e = np.unique(np.concatenate(edges))
    e = e[(e >= lo) & (e <= hi)]
    return e


def residual(hyb, model=None, epsilon=None, strips=None, quadrature=None, check=False):
    """Space-time integral of |v_t + A(v)v_x - eps v_xx| plus per-track parts.

    Returns a dict with the strip-summed total, the per-track window
    integrals E_alpha (window |x - x_alpha| <= sqrt(eps)), and the far-field
    remainder.  With check=True the x-steps are halved once and
    ResolutionTooCoarse is raised if the total moves by more than 2%.
    """
    quad = quadrature or ResidualQuadrature()
    model = model or hyb.model
    epsilon = epsilon or hyb.epsilon

    def run_once(q):
        total = 0.0
        per_track = {}
        far = 0.0
        t_step = q.t_step or np.sqrt(epsilon) / 6.0
        todo = strips if strips is not None else hyb.strips
        for st in todo:
            L = st.t1 - st.t0
            nt = max(q.nt_min, int(np.ceil(L / t_step)))
            tmids = st.t0 + (np.arange(nt) + 0.5) * (L / nt)
            wt = L / nt
            for t in tmids:
                e = _strip_grid(st, t, q)
                if e is None:
                    continue
                mid = 0.5 * (e[:-1] + e[1:])
                h = np.diff(e)
                r = st.residual_pointwise(t, mid)
                total += wt * float(r @ h)
                near_any = np.zeros(mid.size, dtype=bool)
                for ts in st.tracks:
                    xa = ts.x(t, st.t0)
                    near = np.abs(mid - xa) <= np.sqrt(epsilon)
                    near_any |= near
                    per_track[ts.track_id] = per_track.get(ts.track_id, 0.0) + wt * float(
                        r[near] @ h[near]
                    )
                far += wt * float(r[~near_any] @ h[~near_any])
        return {"total": total, "per_track": per_track, "far_field": far}

    out = run_once(quad)
    if check:
        fine = ResidualQuadrature(
            dx_far=(quad.dx_far or hyb.delta / 6.0) / 2.0,
            dx_near=(quad.dx_near or epsilon / 8.0) / 2.0,
            t_step=quad.t_step, nt_min=quad.nt_min, pad=quad.pad,
        )
        out2 = run_once(fine)
        denom = max(abs(out2["total"]), 1e-300)
        if abs(out2["total"] - out["total"]) / denom > 0.02:
            raise ResolutionTooCoarse(
                f"residual moved {out['total']:.6g} -> {out2['total']:.6g} on refinement"
            )
        out = out2
    return out


_CASE_ORDER = ["merge", "creation", "termination", "transversal", "absorption", "small"]


def classify_event(ev, tracks):
    """Section-3 cases: creation, termination, transversal crossing,
    same-family absorption, big-big merge; 'small' when no track is touched."""
    t = ev.time
    incoming_uids = {f.uid for f in ev.incoming}
    in_tracks = []
    for tr in tracks:
        seg = tr.segment_at(t, side="-")
        if seg is not None and seg.uid in incoming_uids and tr.alive(t, side="-"):
            in_tracks.append(tr)
    born = [tr for tr in tracks if abs(tr.t_minus - t) < 1e-14]
    died = [tr for tr in tracks if abs(tr.t_plus - t) < 1e-14]
    flags = set()
    fams = [tr.family for tr in in_tracks]
    if len(in_tracks) >= 2 and len(set(fams)) < len(fams):
        flags.add("merge")
    if born:
        flags.add("creation")
    if died and not flags & {"merge"}:
        flags.add("termination")
    if in_tracks:
        others = [f for f in ev.incoming if f.uid not in
                  {tr.segment_at(t, side='-').uid for tr in in_tracks}]
        if any(f.physical and f.family != in_tracks[0].family for f in others):
            flags.add("transversal")
        if any(f.physical and f.family == in_tracks[0].family for f in others):
            flags.add("absorption")
    if not flags:
        flags.add("small")
    for c in _CASE_ORDER:
        if c in flags:
            return c, flags
    raise UnclassifiableEvent(f"event at t={t} defies classification")


def jump_sum(run, tracks, epsilon, delta=None, profiles=None, dx=None):
    """Sum over interaction times of the L1 jump of v, with per-case totals."""
    if delta is None:
        delta = np.sqrt(epsilon)
    if profiles is None:
        profiles = ProfileCache(run.model)
    hyb = build_hybrid(run, tracks, epsilon, delta=delta, profiles=profiles)
    if dx is None:
        dx = min(epsilon / 8.0, delta / 40.0)
    t_edges = [0.0] + list(run.times) + [run.tau]
    strip_of = {}
    for st in hyb.strips:
        strip_of[st.t0] = st
    per_case = {c: 0.0 for c in _CASE_ORDER}
    per_event = []
    total = 0.0
    for k, ev in enumerate(run.events):
        before = None
        for st in hyb.strips:
            if st.t0 < ev.time <= st.t1 + 1e-14:
                before = st
                break
        after = strip_of.get(ev.time)
        if before is None or after is None:
            continue
        # the jump is supported near the event and near any touched track
        centers = [ev.x]
        for tr in tracks:
            for side in ("-", "+"):
                if tr.alive(ev.time, side=side):
                    xv = tr.x(ev.time, side=side)
                    if xv is not None:
                        centers.append(xv)
        lo = min(centers) - 2.0 * delta
        hi = max(centers) + 2.0 * delta
        grid = np.arange(lo, hi + dx, dx)
        mid = 0.5 * (grid[:-1] + grid[1:])
        dv = after.value(ev.time, mid) - before.value(ev.time, mid)
        contrib = float(np.sum(np.linalg.norm(dv, axis=1) * np.diff(grid)))
        case, flags = classify_event(ev, tracks)
        per_case[case] += contrib
        per_event.append({"t": ev.time, "x": ev.x, "case": case,
                          "flags": sorted(flags), "l1": contrib})
        total += contrib
    return {"total": total, "per_case": per_case, "events": per_event}
