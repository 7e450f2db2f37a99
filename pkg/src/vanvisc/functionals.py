"""Distance-weighted interaction functionals and the interaction audit.

Three weighted potentials supplement the Glimm pair (V, Q):
  * q_flat: pairs of different families, weight ramping linearly over a
    4 sqrt(eps) window around the crossing order;
  * q_natural: big shocks against same-family rarefactions, counted through
    a cumulative rarefaction profile cut off at |sigma_alpha|/4;
  * q_sharp: all shocks against same-family shocks, weighted by the
    reciprocal of the enveloped shock content between them (rarefactions
    count negatively with a factor 3).
The composite functional combines them so that it decreases at every
interaction except when a new big shock appears.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import MonotonicityViolation
from .front_tracking import glimm_functionals
from .hybrid import classify_event

SQRT = np.sqrt


@dataclass(frozen=True)
class FunctionalConstants:
    c0: float = 4.0
    c1: float = 1e5
    c2: float = 1e3
    c3: float = 10.0


@dataclass(frozen=True)
class FunctionalSnapshot:
    t: float
    V: float
    Q: float
    upsilon: float
    q_flat: float
    q_natural: float
    q_sharp: float
    q_hat: float
    constants: FunctionalConstants
    epsilon: float
    rho: float = None

    def recompose(self):
        c = self.constants
        r = SQRT(self.epsilon)
        ln = abs(np.log(self.epsilon))
        return r * ln * (c.c1 * self.upsilon + c.c2 * self.q_flat + c.c3 * self.q_natural) \
            + r * self.q_sharp


def w_flat(x_alpha, fam_alpha, x_beta, fam_beta, epsilon):
    """Transversal pair weight, piecewise linear over +-2 sqrt(eps)."""
    r = SQRT(epsilon)
    d = x_beta - x_alpha
    if fam_beta < fam_alpha:
        if d < -2 * r:
            return 0.0
        if d > 2 * r:
            return 1.0
        return 0.5 + d / (4 * r)
    if d < -2 * r:
        return 1.0
    if d > 2 * r:
        return 0.0
    return 0.5 - d / (4 * r)


def w_natural(x, x_alpha, epsilon):
    return min(0.5 + abs(x - x_alpha) / (4 * SQRT(epsilon)), 1.0)


def q_flat(config, epsilon):
    """Sum over ordered pairs of different families of W_flat |sigma sigma'|."""
    fronts = [f for f in config.fronts if f.physical]
    total = 0.0
    for a in fronts:
        for b in fronts:
            if a is b or a.family == b.family:
                continue
            total += w_flat(a.pos, a.family, b.pos, b.family, epsilon) * abs(
                a.strength * b.strength
            )
    return total


def _natural_alpha(fronts, ai, epsilon):
    """Integral of W_natural against the cut-off rarefaction accumulator of
    the shock fronts[ai]; ties in position are resolved by list order."""
    alpha = fronts[ai]
    cap = abs(alpha.strength) / 4.0
    total = 0.0
    # right side: cumulative rarefaction mass, clipped at +cap
    cum = 0.0
    for b in fronts[ai + 1 :]:
        if not b.physical or b.family != alpha.family or b.kind != "rarefaction_step":
            continue
        new = cum + b.strength
        mass = min(new, cap) - min(cum, cap)
        if mass > 0:
            total += w_natural(b.pos, alpha.pos, epsilon) * mass
        cum = new
    # left side: accumulates negatively, clipped at -cap
    cum = 0.0
    for b in reversed(fronts[:ai]):
        if not b.physical or b.family != alpha.family or b.kind != "rarefaction_step":
            continue
        new = cum - b.strength
        mass = max(cum, -cap) - max(new, -cap)
        if mass > 0:
            total += w_natural(b.pos, alpha.pos, epsilon) * mass
        cum = new
    return total


def q_natural(config, bs_uids, epsilon):
    """Sum of the cut-off rarefaction potentials over the big shocks."""
    fronts = list(config.fronts)
    total = 0.0
    for i, f in enumerate(fronts):
        if f.kind == "shock" and f.uid in bs_uids:
            total += _natural_alpha(fronts, i, epsilon)
    return total


def _sharp_alpha(fronts, ai, epsilon):
    """|sigma_alpha| int W_nat W_sharp dz-tilde for the shock fronts[ai].

    z accumulates |sigma| for same-family shocks and -3 sigma for
    same-family rarefactions moving away from x_alpha; the monotone envelope
    keeps running extrema, so a partner shock screened by rarefactions
    contributes nothing.  W_sharp at a surviving atom uses the envelope
    value on the alpha side of the jump; the envelope's own jump at x_alpha
    is not counted.
    """
    alpha = fronts[ai]
    base = abs(alpha.strength) / 2.0
    total = 0.0
    # right side: z starts at +base, envelope is the running max
    z = base
    runmax = base
    for b in fronts[ai + 1 :]:
        if not b.physical or b.family != alpha.family:
            continue
        if b.kind == "shock":
            z_new = z + abs(b.strength)
            mass = max(0.0, z_new - runmax)
            if mass > 0:
                total += w_natural(b.pos, alpha.pos, epsilon) * mass / (epsilon + runmax)
            z = z_new
            runmax = max(runmax, z_new)
        else:
            z = z - 3.0 * b.strength
    # left side: z starts at -base, envelope is the running min
    z = -base
    runmin = -base
    for b in reversed(fronts[:ai]):
        if not b.physical or b.family != alpha.family:
            continue
        if b.kind == "shock":
            z_new = z - abs(b.strength)
            mass = max(0.0, runmin - z_new)
            if mass > 0:
                total += w_natural(b.pos, alpha.pos, epsilon) * mass / (epsilon - runmin)
            z = z_new
            runmin = min(runmin, z_new)
        else:
            z = z + 3.0 * b.strength
    return abs(alpha.strength) * total


def q_sharp(config, epsilon):
    """Same-family shock interaction potential (all shocks, big or small)."""
    fronts = list(config.fronts)
    total = 0.0
    for i, f in enumerate(fronts):
        if f.kind == "shock":
            total += _sharp_alpha(fronts, i, epsilon)
    return total


def big_shock_uids(tracks, t, side="+"):
    uids = set()
    for tr in tracks:
        if tr.alive(t, side=side):
            uid = tr.uid_at(t, side=side)
            if uid is not None:
                uids.add(uid)
    return uids


def q_hat(config, tracks, epsilon, constants=FunctionalConstants(), side="+", rho=None):
    """Composite functional snapshot at the configuration's time."""
    if isinstance(tracks, (set, frozenset)):
        bs = tracks
    else:
        bs = big_shock_uids(tracks, config.time, side=side)
    V, Q = glimm_functionals(config)
    ups = V + constants.c0 * Q
    qf = q_flat(config, epsilon)
    qn = q_natural(config, bs, epsilon)
    qs = q_sharp(config, epsilon)
    r = SQRT(epsilon)
    ln = abs(np.log(epsilon))
    qh = r * ln * (constants.c1 * ups + constants.c2 * qf + constants.c3 * qn) + r * qs
    return FunctionalSnapshot(t=config.time, V=V, Q=Q, upsilon=ups, q_flat=qf,
                              q_natural=qn, q_sharp=qs, q_hat=qh,
                              constants=constants, epsilon=epsilon, rho=rho)


# ---------------------------------------------------------------------------
# event audit

@dataclass
class AuditReport:
    epsilon: float
    rho: float
    constants: FunctionalConstants
    events: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    creation_ratios: list = field(default_factory=list)
    merge_records: list = field(default_factory=list)

    def ok(self):
        return not self.violations

    def raise_if_violated(self):
        if self.violations:
            ev = self.violations[0]
            raise MonotonicityViolation(
                f"q_hat increased by {ev['dq_hat']:.3e} at t={ev['t']} (case {ev['case']})",
                event=ev,
            )

    def to_json(self, path=None):
        payload = {
            "epsilon": self.epsilon,
            "rho": self.rho,
            "constants": vars(self.constants),
            "events": self.events,
            "violations": self.violations,
            "creation_ratios": self.creation_ratios,
            "merge_records": self.merge_records,
        }
        text = json.dumps(payload, sort_keys=True, indent=1, default=float)
        if path:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


def audit_events(run, tracks, epsilon, constants=FunctionalConstants(), rho=None,
                 tol=1e-10):
    """Classify every interaction and check the composite-functional law:
    decrease (within tol) unless a new big shock is created; at creations,
    record the increase ratio against sqrt(eps) |ln eps| |sigma_alpha|."""
    r = SQRT(epsilon)
    ln = abs(np.log(epsilon))
    report = AuditReport(epsilon=epsilon, rho=rho, constants=constants)
    for k, ev in enumerate(run.events):
        before = run.configs[k].advanced(ev.time)
        after = run.configs[k + 1]
        bs_b = big_shock_uids(tracks, ev.time, side="-")
        bs_a = big_shock_uids(tracks, ev.time, side="+")
        sb = q_hat(before, bs_b, epsilon, constants, rho=rho)
        sa = q_hat(after, bs_a, epsilon, constants, rho=rho)
        d_qhat = sa.q_hat - sb.q_hat
        case, flags = classify_event(ev, tracks)
        born = [tr for tr in tracks if abs(tr.t_minus - ev.time) < 1e-14]
        record = {
            "t": ev.time, "x": ev.x, "case": case, "flags": sorted(flags),
            "dV": sa.V - sb.V, "dQ": sa.Q - sb.Q, "dUpsilon": sa.upsilon - sb.upsilon,
            "dq_flat": sa.q_flat - sb.q_flat, "dq_natural": sa.q_natural - sb.q_natural,
            "dq_sharp": sa.q_sharp - sb.q_sharp, "dq_hat": d_qhat,
            "participants": [
                {"family": f.family, "kind": f.kind, "sigma": f.strength}
                for f in ev.incoming
            ],
        }
        report.events.append(record)
        if born:
            sigma = max(abs(tr.segments[0].sigma) for tr in born)
            record["creation_sigma"] = sigma
            # increase attributable to the creation itself: the only part of
            # the composite functional that depends on the big-shock set is
            # the shock-rarefaction potential
            born_uids = {tr.uid_at(ev.time, side="+") for tr in born}
            qn_without = q_natural(after, bs_a - born_uids, epsilon)
            surcharge = r * ln * constants.c3 * (sa.q_natural - qn_without)
            report.creation_ratios.append(
                {"t": ev.time, "sigma": sigma,
                 "ratio": d_qhat / (r * ln * sigma),
                 "surcharge_ratio": surcharge / (r * ln * sigma)}
            )
        else:
            if d_qhat > tol:
                report.violations.append(record)
        if case == "merge":
            in_tracks = [
                tr for tr in tracks
                if tr.alive(ev.time, side="-")
                and tr.uid_at(ev.time, side="-") in {f.uid for f in ev.incoming}
            ]
            if len(in_tracks) >= 2:
                s1, s2 = (abs(tr.sigma(ev.time, side="-")) for tr in in_tracks[:2])
                bound = r * s1 * s2 / (s1 + s2 + epsilon)
                report.merge_records.append(
                    {"t": ev.time, "sigma1": s1, "sigma2": s2,
                     "loss_bound": bound, "dq_hat": d_qhat,
                     "loss_ratio": -d_qhat / bound if bound > 0 else None}
                )
    return report


# ---------------------------------------------------------------------------
# inter-event decay rates

def flat_decay_rate(config, epsilon):
    """Exact dQ_flat/dt for the configuration's current motion: minus the sum
    over ordered different-family pairs within 2 sqrt(eps) of
    |sigma sigma'| |dx/dt difference| / (4 sqrt(eps))."""
    r = SQRT(epsilon)
    fronts = [f for f in config.fronts if f.physical]
    rate = 0.0
    pair_sum = 0.0
    for i, a in enumerate(fronts):
        for b in fronts[i + 1 :]:
            if a.family == b.family:
                continue
            if abs(b.pos - a.pos) >= 2 * r:
                continue
            rate -= 2.0 * abs(a.strength * b.strength) * abs(a.speed - b.speed) / (4 * r)
            pair_sum += 2.0 * abs(a.strength * b.strength)
    return rate, pair_sum


def interaction_decay_rates(run, tracks, epsilon, constants=FunctionalConstants(),
                            fd_frac=1.0 / 64.0):
    """Per-interval report of the decay rates of the weighted functionals.

    q_flat decays at an exactly computable rate; q_natural and q_sharp rates
    are sampled by centered differences inside the interval (the envelopes
    are frozen between events, so the only time dependence is the linear
    front motion).  The pair sums entering the right-hand sides of the decay
    estimates are itemized per interval.
    """
    t_edges = [0.0] + list(run.times) + [run.tau]
    rows = []
    r = SQRT(epsilon)
    for k, cfg in enumerate(run.configs):
        t0, t1 = t_edges[k], t_edges[k + 1]
        if t1 - t0 <= 1e-14:
            continue
        tm = 0.5 * (t0 + t1)
        h = max((t1 - t0) * fd_frac, 1e-12)
        bs = big_shock_uids(tracks, tm)
        c_m = cfg.advanced(tm)
        c_p = cfg.advanced(tm + h)
        c_q = cfg.advanced(tm - h)
        rate_flat, flat_pairs = flat_decay_rate(c_m, epsilon)
        fd_flat = (q_flat(c_p, epsilon) - q_flat(c_q, epsilon)) / (2 * h)
        fd_nat = (q_natural(c_p, bs, epsilon) - q_natural(c_q, bs, epsilon)) / (2 * h)
        fd_sharp = (q_sharp(c_p, epsilon) - q_sharp(c_q, epsilon)) / (2 * h)
        # itemized proximity sums (right-hand sides of the decay estimates)
        nat_pairs = 0.0
        sharp_pairs = 0.0
        cross_pairs = 0.0
        fronts = [f for f in c_m.fronts if f.physical]
        for i, a in enumerate(fronts):
            for j, b in enumerate(fronts):
                if i == j or abs(b.pos - a.pos) > 2 * r:
                    continue
                if a.family != b.family:
                    cross_pairs += abs(a.strength * b.strength)
                    continue
                if a.kind == "shock" and a.uid in bs and b.kind == "rarefaction_step":
                    nat_pairs += abs(a.strength * b.strength)
                if a.kind == "shock" and b.kind == "shock" and i < j:
                    sharp_pairs += abs(a.strength * b.strength)
        rows.append({
            "t0": t0, "t1": t1, "t_mid": tm,
            "rate_flat_exact": rate_flat, "rate_flat_fd": fd_flat,
            "rate_natural_fd": fd_nat, "rate_sharp_fd": fd_sharp,
            "flat_pair_sum": flat_pairs, "natural_pair_sum": nat_pairs,
            "sharp_pair_sum": sharp_pairs, "cross_pair_sum": cross_pairs,
        })
    return rows
