"""Command-line orchestration: sweeps, figure datasets, verification reports.

Subcommands: phase, stationary, expansions, kappa, table, decay, figures,
verify-all.  Every command writes CSV with a fixed header (and, for the
figure/report paths, a PNG rendered next to the CSV); verify-all emits a
JSON report with one record per check.  Exit codes: 0 success, 1
verification failure, 2 usage error, 3 numerical non-convergence.

All outputs are deterministic: reruns with identical flags produce
byte-identical CSV/JSON.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import phase as ph
from . import regions as rg
from .multiscale import (SERIES_REMAINDER_ORDER, fit_remainder_order,
                         rescaled_critical, rescaled_limits, theta_star)
from .initial_data import gaussian_data, bump_data, cone_data
from .oscillatory import QuadConfig, decay_sweep, eval_profile_gradients
from .regions import NonConvergenceError

_FMT = "%.17g"


def _fmt(x) -> str:
    return _FMT % float(x)


def _write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([c if isinstance(c, str) else _fmt(c) for c in row])


def _maybe_png(path_csv: Path, draw, no_png: bool):
    if no_png:
        return None
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=160)
    draw(ax)
    out = path_csv.with_suffix(".png")
    fig.tight_layout()
    fig.savefig(out, metadata={"Software": None})
    plt.close(fig)
    return out


def _parse_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _grid_spec(text: str) -> np.ndarray:
    """t-grid spec 'lo:hi:n[:geometric|linear]'."""
    parts = text.split(":")
    if len(parts) < 3:
        raise argparse.ArgumentTypeError("grid spec must be lo:hi:n[:kind]")
    lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    kind = parts[3] if len(parts) > 3 else "geometric"
    if kind.startswith("geo"):
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


# -- subcommands ----------------------------------------------------------------

def cmd_phase(args) -> int:
    rows = []
    for t in _parse_floats(args.t):
        thetas = np.linspace(args.theta_min, args.theta_max, args.n)
        hs = ph.h_eval(t, thetas)
        ms = ph.multipliers(t, thetas)
        gs = ph.gamma_derivs(t, thetas)
        for i, th in enumerate(thetas):
            rows.append((t, th, hs.h[i], hs.h1[i], hs.h2[i], ms.mz[i], ms.my[i],
                         ms.dmz[i], ms.dmy[i], gs.g1[i].real, gs.g1[i].imag,
                         gs.g2[i].real, gs.g2[i].imag, gs.curv[i], gs.w[i], gs.wp[i]))
    _write_csv(Path(args.out), ["t", "theta", "h", "h1", "h2", "mz", "my",
                                "dmz", "dmy", "re_g1", "im_g1", "re_g2",
                                "im_g2", "curv", "w", "wp"], rows)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def cmd_stationary(args) -> int:
    from .stationary import stationary_points

    rows = []
    for t in _parse_floats(args.t):
        for rho in _parse_floats(args.rho):
            for alpha in _parse_floats(args.alpha):
                p1, p2 = stationary_points(t, rho, alpha)
                rows.append((t, rho, alpha, p1.theta, p1.r, p1.grad_norm,
                             p2.theta, p2.grad_norm))
    _write_csv(Path(args.out), ["t", "rho", "alpha", "theta", "r", "grad_norm",
                                "theta_antipode", "grad_norm_antipode"], rows)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def cmd_expansions(args) -> int:
    scales = tuple(_parse_floats(args.scales))
    rows = []
    for (side, name), order in SERIES_REMAINDER_ORDER.items():
        fitted = fit_remainder_order(side, name, scales=scales)
        rows.append((side, name, order, fitted))
    _write_csv(Path(args.out), ["side", "name", "printed_order", "fitted_order"], rows)
    print(f"wrote {args.out}")
    return 0


def cmd_kappa(args) -> int:
    rows = []
    for t in _parse_floats(args.t_list):
        for which in args.which.split(","):
            rep = rg.kappa_report(t, args.delta, which, args.beta)
            row = [t, which, rep.k_inf, rep.k_one, rep.k_dollar]
            for name in rg.REGION_NAMES:
                row += [rep.per_region[name]["k_inf"], rep.per_region[name]["k_one"]]
            rows.append(tuple(row))
    header = ["t", "which", "k_inf", "k_one", "k_dollar"]
    for name in rg.REGION_NAMES:
        header += [f"k_inf_{name}", f"k_one_{name}"]
    _write_csv(Path(args.out), header, rows)
    print(f"wrote {args.out}")
    return 0


def cmd_table(args) -> int:
    rows = []
    for t in _parse_floats(args.t_list):
        rep = rg.table_check(t, args.delta)
        for c in rep.cells:
            rows.append((t, c.quantity, c.region, c.sup_ratio,
                         "" if c.inf_ratio is None else _fmt(c.inf_ratio),
                         "" if c.printed_sup_ratio is None else _fmt(c.printed_sup_ratio)))
        rows.append((t, "int_inv_g1", "critical_right", rep.integral_ratio_corrected,
                     "", _fmt(rep.integral_ratio_printed)))
    _write_csv(Path(args.out), ["t", "quantity", "region", "sup_ratio",
                                "inf_ratio", "printed_sup_ratio"], rows)
    print(f"wrote {args.out}")
    return 0


_DATASETS = {"gaussian": gaussian_data, "bump": bump_data, "cone": cone_data}


def cmd_decay(args) -> int:
    data = _DATASETS[args.data]()
    cfg = QuadConfig(rel_tol=args.rel_tol)
    points = []
    for tok in args.points.split(";"):
        rho, alpha = (float(x) for x in tok.split(":"))
        points.append((rho, alpha))
    t_grid = _grid_spec(args.t_grid)
    fits = decay_sweep(points, t_grid, data, cfg)
    rows = []
    for fit in fits:
        rho, alpha = fit.point
        for i, t in enumerate(fit.t_grid):
            rows.append((t, rho, alpha, fit.values_z[i].real, fit.values_z[i].imag,
                         fit.values_y[i].real, fit.values_y[i].imag,
                         max(fit.errors_z[i], fit.errors_y[i])))
    out = Path(args.out)
    _write_csv(out, ["t", "rho", "alpha", "re_phi_z", "im_phi_z", "re_phi_y",
                     "im_phi_y", "err_est"], rows)
    summary = [{
        "point": list(fit.point),
        "exponent_z": fit.exponent_z, "exponent_y": fit.exponent_y,
        "constant_z": fit.constant_z, "constant_y": fit.constant_y,
        "residual_z": fit.residual_z, "residual_y": fit.residual_y,
    } for fit in fits]
    with open(out.with_suffix(".json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")

    def draw(ax):
        for fit in fits:
            ax.loglog(fit.t_grid, np.abs(fit.values_z), "o-",
                      label=f"|phi_z| rho={fit.point[0]:g}, alpha={fit.point[1]:.2f}")
            ax.loglog(fit.t_grid, np.abs(fit.values_y), "s--",
                      label=f"|phi_y| rho={fit.point[0]:g}, alpha={fit.point[1]:.2f}")
        ax.set_xlabel("t")
        ax.set_ylabel("profile gradient magnitude")
        ax.legend(fontsize=7)

    _maybe_png(out, draw, args.no_png)
    print(f"wrote {args.out} and fit summary")
    return 0


def cmd_figures(args) -> int:
    out = Path(args.out)
    which = args.which
    if which == "ht":
        ts = _parse_floats(args.t)
        thetas = np.linspace(1e-4, math.pi - 1e-4, args.n)
        rows = []
        for t in ts:
            h = ph.h_eval(t, thetas).h
            rows.extend((t, th, hv) for th, hv in zip(thetas, h))
        _write_csv(out, ["t", "theta", "h"], rows)

        def draw(ax):
            for t in ts:
                ax.plot(thetas, ph.h_eval(t, thetas).h, label=f"t={t:g}")
            ax.set_xlabel("theta")
            ax.set_ylabel("h_t(theta)")
            ax.legend()

        _maybe_png(out, draw, args.no_png)
    elif which == "gamma-prime":
        ts = _parse_floats(args.t)
        thetas = np.linspace(0.0, math.pi, args.n)
        rows = []
        for t in ts:
            g1 = ph.gamma_derivs(t, thetas).g1
            rows.extend((t, th, g.real, g.imag) for th, g in zip(thetas, g1))
        _write_csv(out, ["t", "theta", "re_g1", "im_g1"], rows)

        def draw(ax):
            for t in ts:
                g1 = ph.gamma_derivs(t, thetas).g1
                ax.plot(g1.real, g1.imag, label=f"t={t:g}")
            ax.set_xlabel("Re gamma'")
            ax.set_ylabel("Im gamma'")
            ax.legend()

        _maybe_png(out, draw, args.no_png)
    elif which == "gamma-critical":
        ts = _parse_floats(args.t_list)
        qs = np.linspace(args.q_min, args.q_max, args.n)
        rows = []
        for t in ts:
            th = 1.0 / t + qs / t**1.5
            g = ph.gamma_derivs(t, th)
            vals = t / np.abs(g.g1)
            rows.extend((t, q, v) for q, v in zip(qs, vals))
        _write_csv(out, ["t", "q", "t_over_abs_g1"], rows)

        def draw(ax):
            for t in ts:
                th = 1.0 / t + qs / t**1.5
                ax.plot(qs, t / np.abs(ph.gamma_derivs(t, th).g1), label=f"t={t:g}")
            ax.axvline(1.0 / math.sqrt(math.pi), ls=":", c="k")
            ax.set_xlabel("q")
            ax.set_ylabel("t / |gamma'(1/t + q t^-3/2)|")
            ax.legend()

        _maybe_png(out, draw, args.no_png)
    else:
        raise SystemExit(2)
    print(f"wrote {out}")
    return 0


# -- verify-all -----------------------------------------------------------------

def _verify_checks(fast: bool):
    """Condensed verification battery; yields report records."""
    recs = []

    def add(check_id, ref, measured, threshold, ok):
        recs.append({"check_id": check_id, "ref": ref,
                     "measured": float(measured), "threshold": float(threshold),
                     "pass": bool(ok)})

    # analytic structure
    for t in (1.0, 100.0, 1e4):
        th = np.linspace(-math.pi / 2, math.pi / 2, 4001)
        th = th[np.abs(th) > 1e-9]
        g = ph.gamma_derivs(t, th)
        add(f"curvature-negative-t{t:g}", "Im[conj(g')g''] < 0 everywhere",
            float(np.max(g.curv)), 0.0, bool(np.max(g.curv) < 0.0))
        z = np.linspace(-5 * t, 5 * t, 2001)
        psi, p1, p2 = ph.psi_eval(t, z)
        add(f"reciprocal-convexity-t{t:g}", "2 psi'^2 - psi psi'' > 0",
            float(np.min(2 * p1**2 - psi * p2)), 0.0,
            bool(np.min(2 * p1**2 - psi * p2) > 0.0))
    # winding
    g0 = ph.gamma_derivs(2.0, 0.0)
    g1 = ph.gamma_derivs(2.0, math.pi)
    add("lift-increment", "w(pi) - w(0) = -2 pi",
        g1.w - g0.w, -2 * math.pi, abs(g1.w - g0.w + 2 * math.pi) < 1e-10)
    # stationary roundtrip
    from .stationary import stationary_points, invert_w, lift_residual
    rng = np.random.default_rng(20240817)
    worst = 0.0
    n_draws = 50 if fast else 200
    for _ in range(n_draws):
        t = float(10 ** rng.uniform(0, 3))
        rho = float(10 ** rng.uniform(-1, 1))
        alpha = float(rng.uniform(-8, 8))
        p1, p2 = stationary_points(t, rho, alpha)
        gg = ph.gamma_derivs(t, p1.theta)
        tol = 1e-9 * (1 + rho) * max(1.0, abs(gg.g1))
        worst = max(worst, max(p1.grad_norm, p2.grad_norm) / tol)
    add("stationary-gradients", "grad Psi vanishes at constructed points",
        worst, 1.0, worst < 1.0)
    # expansions
    for (side, name), order in SERIES_REMAINDER_ORDER.items():
        fitted = fit_remainder_order(side, name)
        if (side, name) == ("plus", "K"):
            ok = fitted > 2.5
            add("series-order-plus-K", "weak remainder bound, measured order recorded",
                fitted, 2.5, ok)
        else:
            expected = {"H1": 4, "H2": 7, "G": 8, "K": 8}.get(name, 3) \
                if side == "minus" else {"H2": 6, "G": 5}.get(name, 3)
            ok = abs(fitted - expected) < 0.5 and fitted > order - 0.5
            add(f"series-order-{side}-{name}", "scale-halving remainder order",
                fitted, expected, ok)
    # theta_star
    ts_t = np.geomspace(1e2, 1e4 if fast else 1e5, 7)
    vals = [(t, theta_star(t) - 1.0 / t) for t in ts_t]
    fit = rg.scaling_fit(vals)
    add("theta-star-exponent", "theta* - 1/t ~ t^-3/2", fit.exponent, -1.5,
        abs(fit.exponent + 1.5) < 0.05)
    add("theta-star-constant", "coefficient 1/sqrt(pi)", fit.constant,
        1.0 / math.sqrt(math.pi),
        abs(fit.constant * math.sqrt(math.pi) - 1.0) < 0.2)
    # kappa scalings
    t_list = (2e3, 8e3, 3.2e4) if fast else tuple(np.geomspace(2e3, 6.4e4, 6))
    kz = [rg.kappa_report(t, 0.5, "z") for t in t_list]
    ky = [rg.kappa_report(t, 0.5, "y") for t in t_list]
    fz = rg.scaling_fit([(t, r.k_inf) for t, r in zip(t_list, kz)])
    fy = rg.scaling_fit([(t, r.k_inf) for t, r in zip(t_list, ky)])
    add("kappa-z-inf-exponent", "k_inf(z) ~ t^-3/2", fz.exponent, -1.5,
        -1.65 < fz.exponent < -1.35)
    add("kappa-y-inf-exponent", "k_inf(y) ~ t^-1", fy.exponent, -1.0,
        -1.15 < fy.exponent < -0.85)
    stat_z = [r.k_one * t**1.5 / math.log(t + 2) for t, r in zip(t_list, kz)]
    add("kappa-z-one-stat", "k_one(z) t^1.5/ln(t+2) max/min < 5",
        max(stat_z) / min(stat_z), 5.0, max(stat_z) / min(stat_z) < 5.0)
    stat_y = [r.k_one * t / math.log(t + 2) for t, r in zip(t_list, ky)]
    add("kappa-y-one-stat",
        "k_one(y) t/ln(t+2) max/min < 5 [known-defect: k_one(y) -> pi]",
        max(stat_y) / min(stat_y), 5.0, max(stat_y) / min(stat_y) < 5.0)
    return recs


def cmd_verify_all(args) -> int:
    recs = _verify_checks(args.fast)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as fh:
        json.dump(recs, fh, indent=2, sort_keys=True)
        fh.write("\n")
    n_fail = sum(1 for r in recs if not r["pass"])
    for r in recs:
        status = "PASS" if r["pass"] else "FAIL"
        print(f"[{status}] {r['check_id']}: measured={r['measured']:.6g} "
              f"threshold={r['threshold']:.6g}")
    print(f"{len(recs) - n_fail}/{len(recs)} checks passed; report at {out}")
    if n_fail:
        known = all("known-defect" in r["ref"] for r in recs if not r["pass"])
        return 1 if not (args.allow_known_defects and known) else 0
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="betaplane",
                                description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("phase", help="sample phase functions on a theta grid")
    q.add_argument("--t", required=True, help="comma-separated shear times")
    q.add_argument("--theta-min", type=float, default=1e-3)
    q.add_argument("--theta-max", type=float, default=math.pi - 1e-3)
    q.add_argument("--n", type=int, default=512)
    q.add_argument("--out", default="phase.csv")
    q.set_defaults(func=cmd_phase)

    q = sub.add_parser("stationary", help="stationary points for given (t, rho, alpha)")
    q.add_argument("--t", required=True)
    q.add_argument("--rho", default="1.0")
    q.add_argument("--alpha", default="0.0")
    q.add_argument("--out", default="stationary.csv")
    q.set_defaults(func=cmd_stationary)

    q = sub.add_parser("expansions", help="series remainder-order fits")
    q.add_argument("--scales", default="0.1,0.05,0.025")
    q.add_argument("--out", default="expansions.csv")
    q.set_defaults(func=cmd_expansions)

    q = sub.add_parser("kappa", help="kappa functionals over a t sweep")
    q.add_argument("--t-list", required=True)
    q.add_argument("--delta", type=float, default=0.5)
    q.add_argument("--which", default="z,y")
    q.add_argument("--beta", type=float, default=2.0)
    q.add_argument("--out", default="kappa.csv")
    q.set_defaults(func=cmd_kappa)

    q = sub.add_parser("table", help="per-region benchmark ratios")
    q.add_argument("--t-list", required=True)
    q.add_argument("--delta", type=float, default=0.5)
    q.add_argument("--out", default="table.csv")
    q.set_defaults(func=cmd_table)

    q = sub.add_parser("decay", help="profile-gradient decay sweep")
    q.add_argument("--points", default="1.0:0.0", help="rho:alpha;rho:alpha;...")
    q.add_argument("--t-grid", default="4:256:7:geometric")
    q.add_argument("--data", choices=sorted(_DATASETS), default="gaussian")
    q.add_argument("--rel-tol", type=float, default=1e-4)
    q.add_argument("--out", default="decay.csv")
    q.add_argument("--no-png", action="store_true")
    q.set_defaults(func=cmd_decay)

    q = sub.add_parser("figures", help="figure datasets (CSV + PNG)")
    q.add_argument("--which", choices=("ht", "gamma-prime", "gamma-critical"),
                   required=True)
    q.add_argument("--t", default="1,2,3,4")
    q.add_argument("--t-list", default="100,400,1600")
    q.add_argument("--q-min", type=float, default=0.05)
    q.add_argument("--q-max", type=float, default=2.5)
    q.add_argument("--n", type=int, default=400)
    q.add_argument("--out", default="figure.csv")
    q.add_argument("--no-png", action="store_true")
    q.set_defaults(func=cmd_figures)

    q = sub.add_parser("verify-all", help="condensed verification battery")
    q.add_argument("--out", default="verify.json")
    q.add_argument("--fast", action="store_true")
    q.add_argument("--allow-known-defects", action="store_true",
                   help="exit 0 when only the documented defect checks fail")
    q.set_defaults(func=cmd_verify_all)
    return p


def main(argv=None) -> int:
    workers = os.environ.get("BETAPLANE_WORKERS")
    if workers is not None:
        os.environ.setdefault("OMP_NUM_THREADS", workers)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NonConvergenceError as exc:
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
