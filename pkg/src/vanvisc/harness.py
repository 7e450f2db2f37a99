"""Experiment orchestration: convergence sweeps, audits, decay studies.

Configs are flat key = value text files; outputs are CSV/JSON written under
an output directory.  Exit codes: 0 ok, 2 monotonicity violation, 3 numeric
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import MonotonicityViolation, VanviscError
from .front_tracking import init_front_tracking, run_until, sample_profile
from .functionals import FunctionalConstants, audit_events, interaction_decay_rates
from .hybrid import ResidualQuadrature, build_hybrid, jump_sum, residual, select_big_shocks
from .measures import pair_interaction_integral
from .piecewise import PiecewiseConstant, l1_distance_to_grid
from .riemann import lax_curve
from .system import eigen_frame, preset_model
from .viscous import solve_viscous


@dataclass
class ExperimentConfig:
    system: str = "burgers"
    gamma: float = 2.0
    k: float = 1.0
    scenario: str = "merge_cancellation"
    seed: int = 0
    n_jumps: int = 10
    tv: float = 0.3
    tau: float = 1.0
    epsilon_list: tuple = (4e-3, 2e-3, 1e-3, 5e-4, 2.5e-4)
    delta_rule: str = "sqrt_eps"
    rho_rule: str = "4*sqrt_eps*abs_ln_eps"
    dx_rule: str = "eps/8"
    # rarefaction steps at the maximal small-wave scale (half the rho scale)
    cap_rule: str = "sqrt_eps*abs_ln_eps/2"
    kappa: float = 10.0
    simplified_threshold: float = None   # default: epsilon_prime
    workers: int = 1
    delta_list: tuple = (0.1, 0.05, 0.02, 0.01, 0.005)
    c0: float = 4.0
    c1: float = 1e5
    c2: float = 1e3
    c3: float = 10.0
    max_events: int = 100000

    def __post_init__(self):
        eps = list(self.epsilon_list)
        if any(e <= 0 for e in eps):
            raise ValueError("epsilon values must be positive")
        if eps != sorted(eps, reverse=True):
            raise ValueError("epsilon_list must be decreasing")
        if self.tau <= 0:
            raise ValueError("tau must be positive")

    def constants(self):
        return FunctionalConstants(c0=self.c0, c1=self.c1, c2=self.c2, c3=self.c3)

    def model(self):
        if self.system == "burgers":
            return preset_model("burgers")
        return preset_model("p_system", gamma=self.gamma, k=self.k)


def eval_rule(rule, eps):
    """Evaluate a sizing rule like "sqrt_eps", "4*sqrt_eps*abs_ln_eps",
    "eps/8" or a plain number, in terms of the current epsilon."""
    if isinstance(rule, (int, float)):
        return float(rule)
    env = {
        "eps": eps,
        "sqrt_eps": math.sqrt(eps),
        "abs_ln_eps": abs(math.log(eps)),
        "min": min, "max": max, "sqrt": math.sqrt, "log": math.log,
    }
    return float(eval(rule, {"__builtins__": {}}, env))


def parse_config_file(path):
    """Flat key = value parser; values may be numbers, comma lists, strings."""
    kwargs = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            kwargs[key] = _parse_value(val)
    for k in ("epsilon_list", "delta_list"):
        if k in kwargs and not isinstance(kwargs[k], tuple):
            kwargs[k] = (kwargs[k],)
    for k in ("seed", "n_jumps", "workers", "max_events"):
        if k in kwargs:
            kwargs[k] = int(kwargs[k])
    return ExperimentConfig(**kwargs)


def _parse_value(val):
    val = val.strip().strip('"').strip("'")
    if "," in val:
        return tuple(_parse_value(v) for v in val.split(",") if v.strip())
    for cast in (int, float):
        try:
            return cast(val)
        except ValueError:
            pass
    return val


# ---------------------------------------------------------------------------
# named scenarios

def scenario_data(model, name, seed=0, n_jumps=10, tv=0.3):
    """Initial piecewise-constant data for the named scenario."""
    if model.name == "burgers":
        table = {
            "lone_shock": ([0.0], [[1.0], [0.0]]),
            "lone_rarefaction": ([0.0], [[0.0], [0.5]]),
            "merge": ([-0.6, 0.2], [[2.0], [1.0], [0.0]]),
            "cancellation": ([-0.3, 0.1], [[0.0], [0.5], [-0.5]]),
            "merge_cancellation": ([-0.25, -0.05, 0.15, 0.6],
                                   [[1.0], [0.0], [0.5], [-0.5], [0.1]]),
        }
        if name in table:
            return PiecewiseConstant(*table[name])
        if name in ("random_bv", "random"):
            rng = np.random.default_rng(seed)
            xs = np.sort(rng.uniform(-1.0, 1.0, n_jumps))
            jumps = rng.normal(size=n_jumps)
            jumps *= tv / np.sum(np.abs(jumps))
            vals = np.concatenate([[0.0], np.cumsum(jumps)])
            return PiecewiseConstant(xs, vals[:, None])
        raise ValueError(f"unknown scenario {name!r} for burgers")
    # p-system scenarios are generated through the wave curves so all the
    # intermediate states stay inside the domain box
    base = np.array([1.0, 0.0])
    if name == "lone_shock":
        return PiecewiseConstant([0.0], [base, lax_curve(model, 1, base, -0.3)])
    if name == "lone_rarefaction":
        return PiecewiseConstant([0.0], [base, lax_curve(model, 1, base, 0.3)])
    if name in ("random_bv", "random"):
        rng = np.random.default_rng(seed)
        xs = np.sort(rng.uniform(-1.0, 1.0, n_jumps))
        strengths = rng.normal(size=n_jumps)
        strengths *= tv / np.sum(np.abs(strengths))
        fams = rng.integers(1, model.n + 1, size=n_jumps)
        vals = [base]
        for s, f in zip(strengths, fams):
            vals.append(lax_curve(model, int(f), vals[-1], float(s)))
        return PiecewiseConstant(xs, np.array(vals))
    raise ValueError(f"unknown scenario {name!r} for p_system")


def data_max_speed(model, data, margin=0.1):
    """Largest |lambda_i| over the states present in the data (plus margin)."""
    worst = 0.0
    for u in data.values:
        lam = eigen_frame(model, u).lambdas
        worst = max(worst, float(np.max(np.abs(lam))))
    return worst * 1.2 + margin


# ---------------------------------------------------------------------------
# converge

@dataclass
class ConvergenceTable:
    rows: list
    fit_p: float = None
    fit_c: float = None
    ratio_spread: float = None
    columns: tuple = (
        "epsilon", "rate_var", "l1_error", "residual", "jump_sum",
        "endpoint_0", "endpoint_tau", "n_events", "n_tracks", "tv0",
    )

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write(",".join(self.columns) + "\n")
            for row in self.rows:
                fh.write(",".join("%.17g" % row[c] if isinstance(row[c], float)
                                  else str(row[c]) for c in self.columns) + "\n")

    def fit(self):
        ok = [r for r in self.rows if r.get("l1_error") is not None]
        x = np.log([r["rate_var"] for r in ok])
        y = np.log([r["l1_error"] for r in ok])
        A = np.stack([x, np.ones_like(x)], axis=1)
        sol, *_ = np.linalg.lstsq(A, y, rcond=None)
        self.fit_p = float(sol[0])
        self.fit_c = float(np.exp(sol[1]))
        ratios = [r["l1_error"] / r["rate_var"] for r in ok]
        self.ratio_spread = float(max(ratios) / min(ratios))
        return self.fit_p, self.fit_c


def hybrid_vs_profile_l1(hyb, run, t, pad=None):
    """L1 distance between the hybrid v(t) and the front-tracking u(t)."""
    st = hyb.strip_at(min(t, hyb.tau * (1 - 1e-15)))
    prof = sample_profile(run, t)
    delta = hyb.delta
    eps = hyb.epsilon
    if pad is None:
        pad = delta
    xs = st.front_positions(t)
    if xs.size == 0:
        return 0.0
    lo, hi = xs.min() - pad, xs.max() + pad
    edges = [np.arange(lo, hi + delta / 40.0, delta / 40.0), prof.xs]
    r = np.sqrt(eps)
    for ts in st.tracks:
        xa = ts.x(t, st.t0)
        edges.append(np.arange(xa - 1.2 * r, xa + 1.2 * r, eps / 8.0))
    e = np.unique(np.concatenate(edges))
    e = e[(e >= lo) & (e <= hi)]
    mid = 0.5 * (e[:-1] + e[1:])
    dv = st.value(t, mid) - prof(mid)
    return float(np.sum(np.linalg.norm(dv, axis=1) * np.diff(e)))


def converge_row(cfg, eps):
    """One epsilon row of the convergence experiment."""
    model = cfg.model()
    data = scenario_data(model, cfg.scenario, cfg.seed, cfg.n_jumps, cfg.tv)
    delta = eval_rule(cfg.delta_rule, eps)
    rho = eval_rule(cfg.rho_rule, eps)
    dx = eval_rule(cfg.dx_rule, eps)
    cap = eval_rule(cfg.cap_rule, eps)
    eps_prime = min(1e-9, eps ** 3)
    ln_eps = abs(math.log(eps))
    rate_var = math.sqrt(eps) * ln_eps

    run = run_until(model, init_front_tracking(model, data, eps_prime, cap),
                    cfg.tau, epsilon_prime=eps_prime, rarefaction_cap=cap,
                    simplified_threshold=cfg.simplified_threshold,
                    max_events=cfg.max_events)
    u_tau = sample_profile(run, cfg.tau)
    tv0 = data.total_variation()

    vmax = data_max_speed(model, data)
    sol = solve_viscous(model, eps, data, cfg.tau, dx, vmax=vmax)
    l1_err = l1_distance_to_grid(u_tau, sol.x, sol.final())

    tracks = select_big_shocks(run, rho)
    hyb = build_hybrid(run, tracks, eps, delta=delta)
    res = residual(hyb)
    js = jump_sum(run, tracks, eps, delta=delta)
    e0 = hybrid_vs_profile_l1(hyb, run, 0.0)
    etau = hybrid_vs_profile_l1(hyb, run, cfg.tau)
    return {
        "epsilon": eps, "rate_var": rate_var, "l1_error": l1_err,
        "residual": res["total"], "jump_sum": js["total"],
        "endpoint_0": e0, "endpoint_tau": etau,
        "n_events": len(run.events), "n_tracks": len(tracks), "tv0": tv0,
    }


def converge_cmd(cfg, out_dir=None):
    rows = []
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futs = [pool.submit(converge_row, cfg, eps) for eps in cfg.epsilon_list]
            rows = [f.result() for f in futs]
    else:
        for eps in cfg.epsilon_list:
            rows.append(converge_row(cfg, eps))
    table = ConvergenceTable(rows=rows)
    table.fit()
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        table.to_csv(os.path.join(out_dir, "table.csv"))
        fit = {
            "fit_p": table.fit_p, "fit_c": table.fit_c,
            "ratio_spread": table.ratio_spread,
            "decomposition_ratio": [
                r["l1_error"] / max(r["endpoint_0"] + r["residual"] + r["jump_sum"]
                                    + r["endpoint_tau"], 1e-300)
                for r in rows
            ],
        }
        with open(os.path.join(out_dir, "fit.json"), "w") as fh:
            fh.write(json.dumps(fit, sort_keys=True, indent=1) + "\n")
    return table


# ---------------------------------------------------------------------------
# functionals

def functional_report_cmd(cfg, out_dir=None):
    model = cfg.model()
    data = scenario_data(model, cfg.scenario, cfg.seed, cfg.n_jumps, cfg.tv)
    reports = {}
    any_violation = False
    for eps in cfg.epsilon_list:
        rho = eval_rule(cfg.rho_rule, eps)
        cap = eval_rule(cfg.cap_rule, eps)
        eps_prime = min(1e-9, eps ** 3)
        run = run_until(model, init_front_tracking(model, data, eps_prime, cap),
                        cfg.tau, epsilon_prime=eps_prime, rarefaction_cap=cap,
                        simplified_threshold=cfg.simplified_threshold,
                        max_events=cfg.max_events)
        tracks = select_big_shocks(run, rho)
        rep = audit_events(run, tracks, eps, cfg.constants(), rho=rho)
        rates = interaction_decay_rates(run, tracks, eps, cfg.constants())
        any_violation = any_violation or not rep.ok()
        reports["%.6g" % eps] = {
            "audit": json.loads(rep.to_json()),
            "rates": rates,
        }
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "audit.json"), "w") as fh:
            fh.write(json.dumps(reports, sort_keys=True, indent=1, default=float) + "\n")
    return reports, any_violation


# ---------------------------------------------------------------------------
# decay

def decay_report_cmd(cfg, out_dir=None, mode="rarefactions_only"):
    model = cfg.model()
    data = scenario_data(model, cfg.scenario, cfg.seed, cfg.n_jumps, cfg.tv)
    cap = eval_rule(cfg.cap_rule, min(cfg.delta_list))
    eps_prime = 1e-9
    run = run_until(model, init_front_tracking(model, data, eps_prime, cap),
                    cfg.tau, epsilon_prime=eps_prime, rarefaction_cap=cap,
                    max_events=cfg.max_events)
    tv = data.total_variation()
    rows = []
    for delta in sorted(cfg.delta_list, reverse=True):
        E = pair_interaction_integral(run, delta, cfg.tau, mode=mode)
        scale = delta * (math.log(2.0 + cfg.tau) + abs(math.log(delta))) * max(tv, 1e-300)
        rows.append({"delta": delta, "integral": E, "scale": scale,
                     "ratio": E / scale})
    x = np.log([r["scale"] for r in rows if r["integral"] > 0])
    y = np.log([r["integral"] for r in rows if r["integral"] > 0])
    if x.size >= 2:
        A = np.stack([x, np.ones_like(x)], axis=1)
        solv, *_ = np.linalg.lstsq(A, y, rcond=None)
        fit_p, fit_c = float(solv[0]), float(np.exp(solv[1]))
    else:
        fit_p, fit_c = None, None
    ratios = [r["ratio"] for r in rows if r["integral"] > 0]
    stability = (max(ratios) / min(ratios)) if ratios else None
    out = {"rows": rows, "fit_p": fit_p, "fit_c": fit_c, "ratio_stability": stability}
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "decay.csv"), "w") as fh:
            fh.write("delta,integral,scale,ratio\n")
            for r in rows:
                fh.write(",".join("%.17g" % r[c] for c in ("delta", "integral", "scale", "ratio")) + "\n")
        with open(os.path.join(out_dir, "decay_fit.json"), "w") as fh:
            fh.write(json.dumps({k: v for k, v in out.items() if k != "rows"},
                                sort_keys=True, indent=1) + "\n")
    return out


# ---------------------------------------------------------------------------
# CLI

def main(argv=None):
    parser = argparse.ArgumentParser(prog="vanvisc",
                                     description="front tracking / vanishing viscosity laboratory")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("converge", "functionals", "decay"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True)
    args = parser.parse_args(argv)
    try:
        cfg = parse_config_file(args.config)
        if args.command == "converge":
            converge_cmd(cfg, args.out)
            return 0
        if args.command == "functionals":
            _, violated = functional_report_cmd(cfg, args.out)
            return 2 if violated else 0
        decay_report_cmd(cfg, args.out)
        return 0
    except MonotonicityViolation:
        traceback.print_exc()
        return 2
    except (VanviscError, ValueError, FloatingPointError, np.linalg.LinAlgError):
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
