"""Command-line front end: ``lattice-bec <command> [options]``.

Options may come from a JSON file (``--config``); flags on the command line
override it.  Every command writes its outputs into ``--out`` and prints a
JSON summary.  Exit codes: 0 success, 2 invalid configuration, 3 numerical
failure.
"""
from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import asymptotics, dnls, gp1d, gp2d, regimes, spectral, wannier
from .errors import InvalidParameterError, LatticeBECError, NumericalFailureError
from .potential import PeriodicPotential, agmon_action

COMMANDS = ("bands", "wannier", "tunneling", "minimize-a", "minimize-b", "tf", "dnls",
            "classify", "bounds", "sweep")


def _fmt(v):
    if isinstance(v, (bool, str)) or v is None:
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return float(f"{v:.15g}") if math.isfinite(v) else str(v)
    if isinstance(v, dict):
        return {k: _fmt(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_fmt(x) for x in v]
    return str(v)


def _dump(payload, path):
    with open(path, "w") as fh:
        json.dump(_fmt(payload), fh, indent=2, sort_keys=True)
    return path


def _float_list(s):
    if isinstance(s, list):
        return [float(x) for x in s]
    return [float(x) for x in str(s).split(",") if x.strip()]


def _potential(cfg):
    spec = {"kind": cfg.get("potential", "sin2"), "T": cfg.get("T", 1.0),
            "epsilon": cfg.get("epsilon", 0.05)}
    if "coeffs" in cfg:
        spec["coeffs"] = _float_list(cfg["coeffs"])
    return PeriodicPotential.from_config(spec)


def _require(cond, msg):
    if not cond:
        raise InvalidParameterError(msg)


# command handlers: (cfg, out, write) -> payload ------------------------------

def cmd_bands(cfg, out, write=True):
    w = _potential(cfg)
    bs = spectral.band_structure(w, k_count=int(cfg.get("kpoints", 64)),
                                 n_bands=int(cfg.get("nbands", 3)), M=int(cfg.get("M", spectral.DEFAULT_M)))
    if write:
        spectral.write_bands_csv(bs, os.path.join(out, "bands.csv"))
    return {"lambda1_0": bs.bands[0, 0], "gap": bs.gap(), "width1": bs.width(0),
            "m_convergence": bs.m_convergence}


def cmd_wannier(cfg, out, write=True):
    w = _potential(cfg)
    N = int(cfg.get("N", 8))
    _require(N >= 3, "wannier needs N >= 3")
    dps = cfg.get("dps")
    basis = wannier.build_wannier(w, None, N, int(cfg.get("M", 64)), int(cfg.get("P", 256)),
                                  int(dps) if dps else None)
    summary = wannier.tunneling_summary(w, basis)
    if write:
        wannier.write_wannier_csv(basis, os.path.join(out, "wannier.csv"))
        wannier.write_hopping_json(summary, os.path.join(out, "hopping.json"))
    return summary


def cmd_tunneling(cfg, out, write=True):
    w = _potential(cfg)
    eps_list = _float_list(cfg.get("eps_list", "0.05,0.04,0.03,0.025,0.02"))
    _require(len(eps_list) >= 2, "eps_list needs at least two values")
    dps = int(cfg.get("dps", 40))
    taus = []
    for e in eps_list:
        bs = spectral.band_structure(w, e, k_count=int(cfg.get("kpoints", 16)), n_bands=1,
                                     M=int(cfg.get("M", 64)), dps=dps, check_convergence=False)
        taus.append(wannier.hopping_from_band(bs))
    eps = np.array(eps_list)
    S_fit = fit_tunneling_exponent(eps, np.array(taus))
    asym = [asymptotics.tau_asymptotic(w, e) for e in eps_list]
    asym2 = [asymptotics.tau_asymptotic(w, e, "rederived") for e in eps_list]
    payload = {"epsilon": eps_list, "tau": taus, "tau_asymptotic": asym,
               "ratio": [t / a for t, a in zip(taus, asym)],
               "ratio_rederived": [t / a for t, a in zip(taus, asym2)],
               "S_fit": S_fit, "S": agmon_action(w)}
    if write:
        _dump(payload, os.path.join(out, "tunneling.json"))
    return payload


def fit_tunneling_exponent(eps, tau):
    """Least-squares line ``-eps ln(tau eps^{3/2}) = S - eps ln c``; returns ``S``."""
    y = -eps * np.log(tau * eps ** 1.5)
    slope, intercept = np.polyfit(eps, y, 1)
    return float(intercept)


def _g_hat(cfg):
    if cfg.get("g_hat") is not None:
        return float(cfg["g_hat"])
    return gp1d.hatg(float(cfg.get("g", 0.0)), float(cfg.get("omega_perp", 1.0)))


def cmd_minimize_a(cfg, out, write=True):
    w = _potential(cfg)
    st = gp1d.minimize_a(w, None, _g_hat(cfg), int(cfg.get("N", 1)),
                         tol=float(cfg.get("tol", 1e-9)), P=int(cfg.get("P", gp1d.DEFAULT_P)))
    payload = st.summary()
    payload["period"] = gp1d.measured_period(st, w.T)
    if write:
        gp1d.write_profile_csv(st, os.path.join(out, "gp1d_profile.csv"))
        _dump(payload, os.path.join(out, "gp1d.json"))
    return payload


def cmd_minimize_b(cfg, out, write=True):
    st = gp2d.minimize_b(float(cfg.get("omega_perp", 1.0)), float(cfg.get("g_tilde", 0.0)),
                         float(cfg.get("Omega", 0.0)), tol=float(cfg.get("tol", 1e-9)),
                         n=int(cfg.get("points", gp2d.DEFAULT_POINTS)))
    payload = st.summary()
    if write:
        gp2d.write_profile_csv(st, os.path.join(out, "gp2d_profile.csv"))
        _dump(payload, os.path.join(out, "gp2d.json"))
    return payload


def cmd_tf(cfg, out, write=True):
    w = _potential(cfg)
    g = _g_hat(cfg)
    report = asymptotics.constants_report(w, None, g if g > 0 else None)
    if cfg.get("g_tilde") is not None:
        tf = asymptotics.tf2d(float(cfg["g_tilde"]), float(cfg.get("omega_perp", 1.0)),
                              float(cfg.get("Omega", 0.0)))
        report.update(tf2d_upper=tf.upper, tf2d_lower_rotation=tf.lower_rotation)
    if write:
        _dump(report, os.path.join(out, "asymptotics.json"))
    return report


def _dnls_problem(cfg):
    return dnls.DNLSProblem(float(cfg.get("tau", 1.0)), float(cfg.get("I", 0.0)),
                            float(cfg.get("nu", 1.0)), int(cfg.get("N", 1)), float(cfg.get("k", 0.0)))


def cmd_dnls(cfg, out, write=True):
    prob = _dnls_problem(cfg)
    rng = np.random.default_rng(int(cfg.get("seed", 0)))
    st = dnls.minimize_dnls(prob, int(cfg.get("restarts", dnls.DEFAULT_RESTARTS)), rng=rng)
    payload = {"tau": prob.tau, "I": prob.I, "nu": prob.nu, "N": prob.N, "k": prob.k, "E": st.E,
               "mu": st.mu, "branch": st.restart, "degenerate": st.degenerate}
    if prob.N <= 2:
        payload["branches"] = [{"label": b[0], "mu": b[2], "E": b[3]} for b in dnls.closed_branches(prob)]
    if write:
        _dump(payload, os.path.join(out, "dnls.json"))
    return payload


def _params(cfg):
    return regimes.PhysicalParams(float(cfg.get("g", 0.0)), float(cfg.get("omega_perp", 1.0)),
                                  float(cfg.get("epsilon", 0.05)), float(cfg.get("Omega", 0.0)),
                                  float(cfg.get("T", 1.0)), int(cfg.get("N", 1)))


def cmd_classify(cfg, out, write=True):
    rep = regimes.classify(_params(cfg), float(cfg.get("rho", regimes.DEFAULT_RHO)),
                           float(cfg.get("c", regimes.DEFAULT_C)))
    payload = rep.to_dict()
    if write:
        regimes.write_report_json(rep, os.path.join(out, "regime_report.json"))
    return payload


def cmd_bounds(cfg, out, write=True):
    p = _params(cfg)
    w = _potential(cfg)
    lam, z, phi = spectral.ground_state(w, None, int(cfg.get("P", 256)), int(cfg.get("M", 64)))
    l4 = float(np.sum(phi ** 4) * w.T / len(phi))
    payload = {"lambda1z": lam, "phi1_l4": l4, **regimes.universal_bounds(p, lam, l4)}
    if write:
        _dump(payload, os.path.join(out, "bounds.json"))
    return payload


HANDLERS = {"bands": cmd_bands, "wannier": cmd_wannier, "tunneling": cmd_tunneling,
            "minimize-a": cmd_minimize_a, "minimize-b": cmd_minimize_b, "tf": cmd_tf,
            "dnls": cmd_dnls, "classify": cmd_classify, "bounds": cmd_bounds}


def cmd_sweep(cfg, out, write=True):
    """Run ``cfg["command"]`` over the Cartesian product of ``cfg["grid"]``."""
    target = cfg.get("command")
    _require(target in HANDLERS, f"sweep needs command in {sorted(HANDLERS)}")
    grid = cfg.get("grid")
    _require(isinstance(grid, dict) and grid, "sweep needs a non-empty grid {name: [values]}")
    names = sorted(grid)
    points = sorted(itertools.product(*[list(grid[n]) for n in names]))
    base = {k: v for k, v in cfg.items() if k not in ("grid", "command")}

    def run(pt):
        local = dict(base, **dict(zip(names, pt)))
        return {"params": dict(zip(names, pt)), "result": HANDLERS[target](local, out, write=False)}

    workers = spectral.default_workers()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(run, points))
    else:
        rows = [run(p) for p in points]
    if write:
        _dump(rows, os.path.join(out, "sweep.json"))
    return {"command": target, "rows": rows}


HANDLERS["sweep"] = cmd_sweep


def build_parser():
    ap = argparse.ArgumentParser(prog="lattice-bec", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON file with default options")
    ap.add_argument("--out", default=None, help="output directory (default .)")
    ap.add_argument("--seed", type=int, default=None)
    f = lambda *names, **kw: ap.add_argument(*names, default=None, **kw)
    f("--potential", choices=("sin2", "fourier"))
    f("--coeffs", help="comma-separated cosine coefficients a_0,a_1,...")
    for name in ("T", "epsilon", "g", "g-hat", "g-tilde", "omega-perp", "Omega", "tau", "I", "nu",
                 "k", "tol", "rho", "c"):
        f(f"--{name}", type=float)
    for name in ("N", "M", "P", "kpoints", "nbands", "restarts", "dps", "points"):
        f(f"--{name}", type=int)
    f("--eps-list", help="comma-separated eps values")
    f("--sweep-command", dest="sweep_command", choices=sorted(HANDLERS))
    f("--grid", help='JSON object {"name": [values]} for sweep')
    return ap


def _merge(args):
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidParameterError(f"cannot read config: {exc}") from exc
        if not isinstance(cfg, dict):
            raise InvalidParameterError("config must be a JSON object")
    for key, val in vars(args).items():
        if key in ("command", "config") or val is None:
            continue
        cfg[key] = val
    if "sweep_command" in cfg:
        cfg["command"] = cfg.pop("sweep_command")
    elif args.command != "sweep" or "command" not in cfg:
        cfg["command"] = args.command if args.command != "sweep" else cfg.get("command")
    if isinstance(cfg.get("grid"), str):
        try:
            cfg["grid"] = json.loads(cfg["grid"])
        except json.JSONDecodeError as exc:
            raise InvalidParameterError(f"grid is not valid JSON: {exc}") from exc
    return cfg


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _merge(args)
        out = cfg.get("out") or "."
        os.makedirs(out, exist_ok=True)
        payload = HANDLERS[args.command](cfg, out)
    except InvalidParameterError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    except NumericalFailureError as exc:
        print(f"numerical failure: {exc} (residual {getattr(exc, 'residual', None)})", file=sys.stderr)
        return 3
    except LatticeBECError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(json.dumps(_fmt(payload), sort_keys=True))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
