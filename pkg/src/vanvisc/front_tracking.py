"""Event-driven front tracking with the simplified/accurate Riemann solver.

Fronts move at constant speed between pairwise interactions.  At each
interaction the incoming fronts are replaced either by the full Riemann fan
of the outer states (rarefactions split into steps of at most the
configured cap, each step travelling at the characteristic speed of its
right state) or, when the product of incoming strengths falls below the
simplified-solver threshold, by outgoing waves of unchanged strength plus a
non-physical front that carries the residual at a speed strictly above
every characteristic speed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .errors import EventBudgetExceeded, OutOfRange
from .piecewise import PiecewiseConstant
from .riemann import solve_riemann, shock_speed, lax_curve
from .system import eigen_frame

GLIMM_C0 = 4.0
TIME_TOL = 1e-12
POS_TOL = 1e-12
# waves below this strength are Riemann-iteration noise, not physics; they
# are dropped (the state defect is glued into the neighbouring wave)
WAVE_FLOOR = 1e-10
NP_FLOOR = 1e-13


@dataclass(frozen=True)
class Front:
    uid: int
    pos: float
    family: int          # 1..n physical, n+1 for non-physical fronts
    kind: str            # "shock" | "rarefaction_step" | "non_physical"
    strength: float      # signed sigma; |u+ - u-| for non-physical
    speed: float
    left_state: np.ndarray
    right_state: np.ndarray

    @property
    def physical(self):
        return self.kind != "non_physical"


@dataclass
class FrontConfiguration:
    time: float
    fronts: list
    left_state: np.ndarray

    def advanced(self, t):
        """Same fronts moved linearly to time t (no interaction may occur
        strictly inside (self.time, t))."""
        dt = t - self.time
        moved = [replace(f, pos=f.pos + dt * f.speed) for f in self.fronts]
        return FrontConfiguration(time=t, fronts=moved, left_state=self.left_state)

    def profile(self):
        xs = np.array([f.pos for f in self.fronts])
        vals = [self.left_state] + [f.right_state for f in self.fronts]
        return PiecewiseConstant(xs, np.array(vals))

    def total_np_strength(self):
        return sum(f.strength for f in self.fronts if not f.physical)

    def validate(self, atol=1e-9):
        prev = self.left_state
        prev_x = -np.inf
        for f in self.fronts:
            assert f.pos >= prev_x - POS_TOL, "positions out of order"
            assert np.allclose(f.left_state, prev, atol=atol), "inconsistent adjacent states"
            prev, prev_x = f.right_state, f.pos
        return True


@dataclass(frozen=True)
class Event:
    time: float
    x: float
    indices: tuple


@dataclass(frozen=True)
class EventRecord:
    index: int
    time: float
    x: float
    incoming: tuple
    outgoing: tuple
    solver: str
    dV: float
    dQ: float


@dataclass
class FTRun:
    model: object
    configs: list          # configs[0] at t=0, configs[i] just after t_i
    times: list            # interaction times t_1 < ... < t_N
    events: list           # EventRecord per interaction
    tau: float
    epsilon_prime: float
    rarefaction_cap: float
    glimm_history: list    # (t, V, Q, Upsilon) at t=0 and after each event

    def config_at(self, t, merge_pairs=False):
        """Post-interaction configuration advanced to t (right-continuous)."""
        if t < -TIME_TOL or t > self.tau + TIME_TOL:
            raise OutOfRange(f"t={t} outside [0, {self.tau}]")
        i = int(np.searchsorted(np.asarray(self.times), t, side="right"))
        cfg = self.configs[i].advanced(t)
        if merge_pairs:
            cfg = merge_cancelling_pairs(cfg)
        return cfg


def lambda_hat(model):
    """Speed of non-physical fronts: above every characteristic speed."""
    return model.max_speed() + 1.0


def _np_front(uid, x, model, u_l, u_r):
    return Front(
        uid=uid,
        pos=x,
        family=model.n + 1,
        kind="non_physical",
        strength=float(np.linalg.norm(u_r - u_l)),
        speed=lambda_hat(model),
        left_state=u_l,
        right_state=u_r,
    )


def _fronts_from_fan(model, fan, x, cap, uid_iter):
    """Fan waves to fronts; rarefactions split into steps of strength <= cap."""
    out = []
    for w in fan.waves:
        if abs(w.strength) < WAVE_FLOOR:
            continue
        if w.kind == "shock":
            out.append(
                Front(next(uid_iter), x, w.family, "shock", w.strength, w.speed,
                      w.left_state, w.right_state)
            )
        else:
            m = max(1, int(np.ceil(w.strength / cap - 1e-12)))
            s_step = w.strength / m
            u = w.left_state
            for _ in range(m):
                u_next = lax_curve(model, w.family, u, s_step)
                sp = float(eigen_frame(model, u_next).lambdas[w.family - 1])
                out.append(
                    Front(next(uid_iter), x, w.family, "rarefaction_step", s_step, sp, u, u_next)
                )
                u = u_next
    return out


def init_front_tracking(model, initial, epsilon_prime, rarefaction_cap):
    """Resolve every jump of the piecewise-constant data into its wave fan."""
    if not isinstance(initial, PiecewiseConstant):
        initial = PiecewiseConstant(*initial)
    uid_iter = iter(range(10 ** 9))
    fronts = []
    u = initial.values[0]
    for x, u_next in zip(initial.xs, initial.values[1:]):
        fan = solve_riemann(model, u, u_next)
        fronts.extend(_fronts_from_fan(model, fan, float(x), rarefaction_cap, uid_iter))
        if fronts:
            # re-anchor so consecutive fans chain exactly
            fronts[-1] = replace(fronts[-1], right_state=u_next)
        u = u_next
    cfg = FrontConfiguration(time=0.0, fronts=fronts, left_state=initial.values[0])
    cfg.validate(atol=1e-7)
    return cfg


def next_interaction(config):
    """Earliest future pairwise crossing (ties grouped; leftmost first)."""
    fronts = config.fronts
    cands = []
    for i in range(len(fronts) - 1):
        a, b = fronts[i], fronts[i + 1]
        dv = a.speed - b.speed
        if dv <= 1e-14:
            continue
        dt = max(0.0, (b.pos - a.pos)) / dv
        cands.append((config.time + dt, a.pos + a.speed * dt, i))
    if not cands:
        return None
    tmin = min(c[0] for c in cands)
    near = sorted([c for c in cands if c[0] <= tmin + TIME_TOL], key=lambda c: (c[1], c[2]))
    t_ev, x_ev, _ = near[0]
    idx = set()
    for t, x, i in near:
        if abs(x - x_ev) <= POS_TOL:
            idx.update((i, i + 1))
    i0, i1 = min(idx), max(idx)
    # swallow same-position neighbours that would re-collide immediately
    while i0 > 0:
        f = fronts[i0 - 1]
        if abs(f.pos + f.speed * (t_ev - config.time) - x_ev) <= POS_TOL and f.speed > fronts[i0].speed - 1e-14:
            i0 -= 1
        else:
            break
    while i1 < len(fronts) - 1:
        f = fronts[i1 + 1]
        if abs(f.pos + f.speed * (t_ev - config.time) - x_ev) <= POS_TOL and f.speed < fronts[i1].speed + 1e-14:
            i1 += 1
        else:
            break
    return Event(time=t_ev, x=x_ev, indices=tuple(range(i0, i1 + 1)))


def _simplified_outgoing(model, incoming, u_l, u_r, x, cap, uid_iter):
    """Pass-through solver: physical strengths preserved, residual goes NP."""
    phys = [f for f in incoming if f.physical]
    order = sorted(phys, key=lambda f: f.family)  # outgoing by family
    out = []
    u = u_l
    if len({f.family for f in phys}) < len(phys):
        # same-family pair: single outgoing wave with summed strength
        fam = phys[0].family
        s = sum(f.strength for f in phys)
        order = []
        if abs(s) > WAVE_FLOOR:
            order = [replace(phys[0], strength=s)]
    for f in order:
        u_next = lax_curve(model, f.family, u, f.strength)
        if f.strength < 0:
            sp = shock_speed(model, u, u_next)
            out.append(Front(next(uid_iter), x, f.family, "shock", f.strength, sp, u, u_next))
        else:
            m = max(1, int(np.ceil(f.strength / cap - 1e-12)))
            ss = f.strength / m
            for _ in range(m):
                u2 = lax_curve(model, f.family, u, ss)
                sp = float(eigen_frame(model, u2).lambdas[f.family - 1])
                out.append(Front(next(uid_iter), x, f.family, "rarefaction_step", ss, sp, u, u2))
                u = u2
            u_next = u
        u = u_next
    if float(np.linalg.norm(u_r - u)) > NP_FLOOR:
        out.append(_np_front(next(uid_iter), x, model, u, u_r))
    return out


def resolve_interaction(model, config, event, epsilon_prime, rarefaction_cap,
                        simplified_threshold=None, uid_iter=None):
    """Replace the interacting fronts by the outgoing pattern at event time."""
    if simplified_threshold is None:
        simplified_threshold = epsilon_prime
    if uid_iter is None:
        top = max((f.uid for f in config.fronts), default=-1)
        uid_iter = iter(range(top + 1, top + 10 ** 6))
    adv = config.advanced(event.time)
    fronts = adv.fronts
    i0, i1 = event.indices[0], event.indices[-1]
    incoming = fronts[i0 : i1 + 1]
    u_l, u_r = incoming[0].left_state, incoming[-1].right_state
    x = event.x

    has_np = any(not f.physical for f in incoming)
    small = (
        len(incoming) == 2
        and all(f.physical for f in incoming)
        and abs(incoming[0].strength * incoming[1].strength) < simplified_threshold
    )
    if has_np or small:
        outgoing = _simplified_outgoing(model, incoming, u_l, u_r, x, rarefaction_cap, uid_iter)
        solver = "simplified"
    else:
        fan = solve_riemann(model, u_l, u_r)
        outgoing = _fronts_from_fan(model, fan, x, rarefaction_cap, uid_iter)
        if outgoing:
            outgoing[-1] = replace(outgoing[-1], right_state=u_r)
        solver = "accurate"

    new_fronts = fronts[:i0] + outgoing + fronts[i1 + 1 :]
    new_cfg = FrontConfiguration(time=event.time, fronts=new_fronts, left_state=adv.left_state)
    return new_cfg, tuple(incoming), tuple(outgoing), solver


def glimm_functionals(config):
    """Total wave strength V and interaction potential Q.

    Approaching pairs: different families with the faster family on the
    left, or a same-family (genuinely nonlinear) pair containing at least
    one shock.  Same-position ties keep list order.  Non-physical fronts
    count as a fastest, linearly degenerate family.
    """
    fronts = config.fronts
    V = sum(abs(f.strength) for f in fronts)
    Q = 0.0
    for i in range(len(fronts)):
        fi = fronts[i]
        for j in range(i + 1, len(fronts)):
            fj = fronts[j]
            if fi.family != fj.family:
                if fi.family > fj.family:
                    Q += abs(fi.strength * fj.strength)
            elif fi.physical and (fi.kind == "shock" or fj.kind == "shock"):
                Q += abs(fi.strength * fj.strength)
    return V, Q


def run_until(model, config, tau, epsilon_prime=None, rarefaction_cap=None,
              simplified_threshold=None, max_events=100000):
    """Evolve a configuration to time tau, recording every interaction."""
    if epsilon_prime is None:
        epsilon_prime = 1e-9
    if rarefaction_cap is None:
        rarefaction_cap = 0.05
    top = max((f.uid for f in config.fronts), default=-1)
    uid_iter = iter(range(top + 1, top + 10 ** 9))

    configs = [config]
    times, events = [], []
    V, Q = glimm_functionals(config)
    history = [(config.time, V, Q, V + GLIMM_C0 * Q)]
    cur = config
    n_ev = 0
    while True:
        ev = next_interaction(cur)
        if ev is None or ev.time > tau + TIME_TOL:
            break
        n_ev += 1
        if n_ev > max_events:
            raise EventBudgetExceeded(f"more than {max_events} interactions before t={tau}")
        V0, Q0 = glimm_functionals(cur)
        cur, incoming, outgoing, solver = resolve_interaction(
            model, cur, ev, epsilon_prime, rarefaction_cap,
            simplified_threshold=simplified_threshold, uid_iter=uid_iter,
        )
        V1, Q1 = glimm_functionals(cur)
        events.append(
            EventRecord(index=n_ev - 1, time=ev.time, x=ev.x, incoming=incoming,
                        outgoing=outgoing, solver=solver, dV=V1 - V0, dQ=Q1 - Q0)
        )
        times.append(ev.time)
        configs.append(cur)
        history.append((ev.time, V1, Q1, V1 + GLIMM_C0 * Q1))
    return FTRun(model=model, configs=configs, times=times, events=events, tau=tau,
                 epsilon_prime=epsilon_prime, rarefaction_cap=rarefaction_cap,
                 glimm_history=history)


def sample_profile(run_or_config, t=None, merge_pairs=False):
    """Piecewise-constant u(t, .) with the right-continuous convention."""
    if isinstance(run_or_config, FTRun):
        return run_or_config.config_at(t, merge_pairs=merge_pairs).profile()
    cfg = run_or_config if t is None else run_or_config.advanced(t)
    if merge_pairs:
        cfg = merge_cancelling_pairs(cfg)
    return cfg.profile()


def merge_cancelling_pairs(config, gap_tol=POS_TOL):
    """Remark-3 cleanup: adjacent same-family fronts of opposite sign closer
    than gap_tol are merged into a single jump (used before measure
    extraction, never for evolution)."""
    fronts = list(config.fronts)
    changed = True
    while changed:
        changed = False
        for i in range(len(fronts) - 1):
            a, b = fronts[i], fronts[i + 1]
            if (
                a.physical and b.physical
                and a.family == b.family
                and a.strength * b.strength < 0
                and abs(b.pos - a.pos) < gap_tol
            ):
                s = a.strength + b.strength
                kind = "shock" if s < 0 else "rarefaction_step"
                merged = Front(a.uid, a.pos, a.family, kind, s,
                               0.5 * (a.speed + b.speed), a.left_state, b.right_state)
                fronts[i : i + 2] = [] if abs(s) < 1e-14 and np.allclose(
                    a.left_state, b.right_state, atol=1e-12
                ) else [merged]
                changed = True
                break
    return FrontConfiguration(time=config.time, fronts=fronts, left_state=config.left_state)


def front_birth_times(run):
    """uid -> creation time (0 for initial fronts, event time otherwise)."""
    births = {f.uid: 0.0 for f in run.configs[0].fronts}
    for ev in run.events:
        for f in ev.outgoing:
            births[f.uid] = ev.time
    return births


def write_run_log(run, path):
    """JSON-lines event log: time, solver type, dV, dQ."""
    with open(path, "w") as fh:
        for ev in run.events:
            fh.write(json.dumps({
                "t": round(ev.time, 15), "x": round(ev.x, 15), "solver": ev.solver,
                "dV": round(ev.dV, 15), "dQ": round(ev.dQ, 15),
                "n_in": len(ev.incoming), "n_out": len(ev.outgoing),
            }, sort_keys=True) + "\n")
