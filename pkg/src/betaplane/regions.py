"""Six-interval decomposition of the angle domain and the kappa functionals.

The half-circle ``[-pi/2, pi/2]`` (one period of every quantity of interest)
splits around the critical ray ``theta = 1/t`` into

    bulk           [-pi/2, -delta] u [delta, pi/2]
    left           [-delta, 1/t - 1/(delta t^2)]
    critical       [1/t - 1/(delta t^2), 1/t + 1/(delta t^2)]
    inner_right    [1/t + 1/(delta t^2), 1/t + delta^2 t^{-3/2}]
    critical_right width 2/(delta t^{3/2}) adjacent on the right, containing
                   the interior critical point theta_star ~ 1/t + 0.564 t^{-3/2}
    outer_right    [.., delta]

Per region the benchmark table bounds the eight quantities

    m_z, m_z', m_y, m_y', 1/|gamma'|, |gamma''|/|gamma'|, 1/|W'|,
    and (critical_right only) integral of 1/|gamma'|.

Two of the printed cells and the printed integral rate are inconsistent
with directly measured values (and with other statements nearby); those
cells carry both the printed and a corrected bound here, and the reports
expose the ratios against each.  See the README's verification notes.

``kappa_report`` computes the three multiplier/phase functionals

    k_inf    = sup  (1/|g'|^beta) (1 + |g''|/|g'|) |m / W'|
    k_one    = int  (1/|g'|) [ (1 + |g''|/|g'|) |m| + |m'| ]
    k_dollar = int |m'|  +  sup |g'|

on feature-resolving grids (the integrand of k_one has a genuine spike of
width ~ t^{-5/2} at theta_star which the grids resolve; an under-resolved
grid misses it and reports a smaller k_one).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import minimize_scalar

from .phase import h_eval, multipliers, _check_time
from .multiscale import theta_star

REGION_NAMES = ("bulk", "left", "critical", "inner_right", "critical_right", "outer_right")
QUANTITY_NAMES = ("mz", "dmz", "my", "dmy", "inv_g1", "g2_over_g1", "inv_wp")
TWO_SIDED_CELLS = (("inv_g1", "left"), ("inv_g1", "critical"))
# cells whose printed bound disagrees with measurement (and with the source's
# own neighbouring statements); reports carry both bounds
ERRATUM_CELLS = (("dmz", "inner_right"), ("g2_over_g1", "critical_right"))


@dataclass(frozen=True)
class RegionPartition:
    t: float
    delta: float
    intervals: dict[str, tuple[tuple[float, float], ...]]

    def arcs(self, name: str) -> tuple[tuple[float, float], ...]:
        return self.intervals[name]

    def coverage_gap(self) -> float:
        """Largest gap left by the union of intervals inside [-pi/2, pi/2]."""
        spans = sorted(a for arcs in self.intervals.values() for a in arcs)
        gap = abs(spans[0][0] + math.pi / 2.0)
        hi = spans[0][1]
        for lo, h in spans[1:]:
            gap = max(gap, lo - hi)
            hi = max(hi, h)
        return max(gap, abs(math.pi / 2.0 - hi))


def partition(t: float, delta: float = 0.5) -> RegionPartition:
    """Build the six-interval decomposition; rejects overlapping intervals."""
    t = _check_time(t)
    delta = float(delta)
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    inv_t = 1.0 / t
    d_crit = 1.0 / (delta * t * t)
    d_cr_lo = delta**2 * t**-1.5
    d_cr_hi = d_cr_lo + 2.0 / (delta * t**1.5)
    cuts = [
        -math.pi / 2.0, -delta,
        inv_t - d_crit, inv_t + d_crit,
        inv_t + d_cr_lo, inv_t + d_cr_hi,
        delta, math.pi / 2.0,
    ]
    if any(b <= a for a, b in zip(cuts, cuts[1:])):
        raise ValueError(f"region endpoints overlap for t={t}, delta={delta}")
    intervals = {
        "bulk": ((-math.pi / 2.0, -delta), (delta, math.pi / 2.0)),
        "left": ((-delta, inv_t - d_crit),),
        "critical": ((inv_t - d_crit, inv_t + d_crit),),
        "inner_right": ((inv_t + d_crit, inv_t + d_cr_lo),),
        "critical_right": ((inv_t + d_cr_lo, inv_t + d_cr_hi),),
        "outer_right": ((inv_t + d_cr_hi, delta),),
    }
    return RegionPartition(t, delta, intervals)


# -- pointwise quantities -----------------------------------------------------

@dataclass(frozen=True)
class QuantitySamples:
    theta: np.ndarray
    mz: np.ndarray
    dmz: np.ndarray
    my: np.ndarray
    dmy: np.ndarray
    g1_abs: np.ndarray
    inv_g1: np.ndarray
    g2_over_g1: np.ndarray
    inv_wp: np.ndarray
    wp: np.ndarray


def quantity_samples(t: float, theta: np.ndarray) -> QuantitySamples:
    th = np.asarray(theta, dtype=float)
    hs = h_eval(t, th)
    ms = multipliers(t, th)
    h, h1, h2 = np.atleast_1d(hs.h), np.atleast_1d(hs.h1), np.atleast_1d(hs.h2)
    g1_abs = np.hypot(h, h1)
    g2_abs = np.hypot(h - h2, 2.0 * h1)
    curv = h * h2 - 2.0 * h1 * h1 - h * h
    wp = curv / (g1_abs * g1_abs)
    return QuantitySamples(
        theta=th,
        mz=np.atleast_1d(ms.mz), dmz=np.atleast_1d(ms.dmz),
        my=np.atleast_1d(ms.my), dmy=np.atleast_1d(ms.dmy),
        g1_abs=g1_abs, inv_g1=1.0 / g1_abs,
        g2_over_g1=g2_abs / g1_abs,
        inv_wp=np.abs(g1_abs * g1_abs / curv),
        wp=wp,
    )


# -- table bounds -------------------------------------------------------------

def _bounds_left_like(q, t, th, d):
    ad = np.abs(d)
    if q == "mz":
        return np.abs(th) / (t**2 * d * d)
    if q == "dmz":
        return (1.0 + t * np.abs(th)) / (t**3 * ad**3)
    if q == "my":
        return 1.0 / (t**2 * d * d)
    if q == "dmy":
        return 1.0 / (t**2 * ad**3)
    raise KeyError(q)


def table_bound(q: str, region: str, t: float, th: np.ndarray, g1_abs: np.ndarray,
                *, printed: bool = False) -> np.ndarray:
    """Pointwise benchmark bound for quantity q on a region.

    printed=True returns the bound exactly as printed even for the erratum
    cells; default uses the corrected bounds there.
    """
    th = np.asarray(th, dtype=float)
    d = th - 1.0 / t
    ad = np.abs(d)
    one = np.ones_like(th)
    if region == "bulk":
        return one / t**2 if q in ("mz", "dmz", "my", "dmy") else one
    if q in ("mz", "dmz", "my", "dmy"):
        if region == "critical":
            return one * t ** {"mz": 1, "dmz": 3, "my": 2, "dmy": 4}[q]
        if region == "critical_right":
            return one * t ** {"mz": 0, "dmz": 1.5, "my": 1, "dmy": 2.5}[q]
        if region == "inner_right":
            if q == "mz":
                return 1.0 / (t**3 * d * d)
            if q == "dmz":
                if printed:
                    return 1.0 / (t**2 * d * d)
                return (1.0 + t * np.abs(th)) / (t**3 * ad**3)
            return _bounds_left_like(q, t, th, d)
        return _bounds_left_like(q, t, th, d)  # left, outer_right
    if q == "inv_g1":
        return {
            "left": t * d * d / (1.0 + t * th * th),
            "critical": one * t**-3,
            "inner_right": t * d * d,
            "critical_right": one / t,
            "outer_right": th * th,
        }[region]
    if q == "g2_over_g1":
        if region == "left":
            return (1.0 + t * np.abs(th) ** 3) / (ad * (1.0 + t * th * th))
        if region == "critical":
            return one * t**2
        if region == "inner_right":
            return 1.0 / ad
        if region == "critical_right":
            return one * (t if printed else t**2.5)
        return 1.0 / th  # outer_right
    if q == "inv_wp":
        if region == "left":
            return (1.0 + t * th * th) ** 2 / (t * ad * (1.0 + t * np.abs(th) ** 3))
        if region == "critical":
            return one
        if region == "inner_right":
            return 1.0 / (t**2 * d)
        if region == "critical_right":
            return g1_abs * g1_abs / t**4.5
        return d**3 * t**2 / (th * th * (t**2 * th * th + 1.0))  # outer_right
    raise KeyError(q)


# -- feature-resolving grids --------------------------------------------------

def _geom(lo: float, hi: float, n: int) -> np.ndarray:
    return np.geomspace(lo, hi, n)


def region_grids(part: RegionPartition, name: str, density: float = 1.0) -> list[np.ndarray]:
    """Graded grids, one per arc of the region: >= 32 nodes per critical
    width 1/(delta t^2) in the critical zone, >= 32 per 1/(delta t^{3/2})
    around theta_star, log-uniform elsewhere, plus clusters at theta = 0
    and theta_star."""
    t, delta = part.t, part.delta
    n = lambda k: max(8, int(k * density))
    if name == "bulk":
        pos = _geom(delta, math.pi / 2.0, n(512))
        return [-pos[::-1], pos]
    return [_one_arc_grid(part, name, density)]


def region_grid(part: RegionPartition, name: str, density: float = 1.0) -> np.ndarray:
    """All grid nodes of a region in one sorted array (pointwise use only;
    for integration use region_grids, whose arcs do not bridge gaps)."""
    return np.unique(np.concatenate(region_grids(part, name, density)))


def _one_arc_grid(part: RegionPartition, name: str, density: float = 1.0) -> np.ndarray:
    t, delta = part.t, part.delta
    inv_t = 1.0 / t
    n = lambda k: max(8, int(k * density))
    pieces = []
    if name == "left":
        (lo, hi), = part.arcs("left")
        s = inv_t - np.concatenate([
            _geom(inv_t - hi, inv_t + delta, n(2048)),
            inv_t + _geom(1e-12, delta * 0.999, n(256)),      # cluster at theta ~ 0-
            inv_t - _geom(1e-12, inv_t * 0.999, n(256)),      # cluster at theta ~ 0+
        ])
        pieces.append(np.clip(s, lo, hi))
        pieces.append(np.array([lo, hi, 0.0]))
    elif name == "critical":
        (lo, hi), = part.arcs("critical")
        sig = np.linspace(-1.0 / delta, 1.0 / delta, n(513))
        pieces.append(inv_t + sig / t**2)
    elif name in ("inner_right", "critical_right", "outer_right"):
        (lo, hi), = part.arcs(name)
        pieces.append(inv_t + _geom(lo - inv_t, hi - inv_t, n(1024)))
        if name == "critical_right":
            ts = theta_star(t) if t >= 100 else None
            if ts is not None and lo < ts < hi:
                # the 1/|gamma'| dip (and the |gamma''|/|gamma'| spike) at
                # theta_star has width ~ t^{-5/2}; resolve three decades below
                w = _geom(min(1e-10, 1e-3 * t**-2.5), (hi - lo), n(128))
                pieces.append(np.clip(ts + w, lo, hi))
                pieces.append(np.clip(ts - w, lo, hi))
                pieces.append(np.array([ts]))
        pieces.append(np.array([lo, hi]))
    else:
        raise KeyError(name)
    grid = np.unique(np.concatenate(pieces))
    (lo0, hi0) = part.arcs(name)[0]
    return grid[(grid >= lo0) & (grid <= hi0)]


def _panel_gauss(grid: np.ndarray, npts: int):
    x, w = leggauss(npts)
    lo = grid[:-1]
    hi = grid[1:]
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (hi + lo)[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    return nodes, wts


def _integrate_on_grid(f, grid: np.ndarray, *, rel_tol: float = 1e-6,
                       max_passes: int = 4):
    """Composite Gauss on the graded grid with an internal order check.

    Panels where 4-point and 8-point Gauss disagree are midpoint-split until
    the total discrepancy certifies rel_tol (or max_passes is exhausted)."""
    err = math.inf
    i8 = 0.0
    for _ in range(max_passes + 1):
        n4, w4 = _panel_gauss(grid, 4)
        n8, w8 = _panel_gauss(grid, 8)
        p4 = (f(n4) * w4).reshape(len(grid) - 1, 4).sum(axis=1)
        p8 = (f(n8) * w8).reshape(len(grid) - 1, 8).sum(axis=1)
        i8 = float(p8.sum())
        perr = np.abs(p8 - p4)
        err = float(perr.sum())
        if err <= rel_tol * max(abs(i8), 1e-300):
            break
        bad = perr > 0.125 * rel_tol * max(abs(i8), 1e-300) / len(perr) ** 0.5
        mids = 0.5 * (grid[:-1][bad] + grid[1:][bad])
        if len(mids) == 0:
            break
        grid = np.unique(np.concatenate([grid, mids]))
    return i8, err


class NonConvergenceError(RuntimeError):
    """Raised when a quadrature cannot certify its requested tolerance."""


# -- kappa functionals --------------------------------------------------------

@dataclass
class KappaReport:
    which: str
    t: float
    delta: float
    beta: float
    k_inf: float
    k_one: float
    k_dollar: float
    per_region: dict[str, dict[str, float]] = field(default_factory=dict)
    k_one_err: float = 0.0


def _kappa_integrands(t: float, which: str, beta: float):
    def f_inf(th):
        qs = quantity_samples(t, th)
        m = qs.mz if which == "z" else qs.my
        return qs.inv_g1**beta * (1.0 + qs.g2_over_g1) * np.abs(m) * qs.inv_wp

    def f_one(th):
        qs = quantity_samples(t, th)
        m, dm = (qs.mz, qs.dmz) if which == "z" else (qs.my, qs.dmy)
        return qs.inv_g1 * ((1.0 + qs.g2_over_g1) * np.abs(m) + np.abs(dm))

    def f_dm(th):
        qs = quantity_samples(t, th)
        return np.abs(qs.dmz if which == "z" else qs.dmy)

    return f_inf, f_one, f_dm


def kappa_report(t: float, delta: float = 0.5, which: str = "z", beta: float = 2.0,
                 *, density: float = 1.0, rel_tol: float = 1e-6) -> KappaReport:
    """Compute the three kappa functionals with per-region breakdown."""
    if which not in ("z", "y"):
        raise ValueError("which must be 'z' or 'y'")
    part = partition(t, delta)
    f_inf, f_one, f_dm = _kappa_integrands(t, which, beta)

    per_region: dict[str, dict[str, float]] = {}
    k_inf = 0.0
    k_one = 0.0
    k_one_err = 0.0
    int_dm = 0.0
    sup_g1 = 0.0
    for name in REGION_NAMES:
        peak = 0.0
        one_val = 0.0
        one_err = 0.0
        dm_val = 0.0
        g1_max = 0.0
        for grid in region_grids(part, name, density):
            vals = f_inf(grid)
            i = int(np.argmax(vals))
            arc_peak = float(vals[i])
            lo = grid[max(i - 1, 0)]
            hi = grid[min(i + 1, len(grid) - 1)]
            if hi > lo:
                res = minimize_scalar(lambda x: -float(f_inf(np.array([x]))[0]),
                                      bounds=(lo, hi), method="bounded",
                                      options={"xatol": 1e-14 * max(1.0, hi)})
                arc_peak = max(arc_peak, -float(res.fun))
            v, e = _integrate_on_grid(f_one, grid, rel_tol=rel_tol)
            one_val += v
            one_err += e
            dm_val += _integrate_on_grid(f_dm, grid, rel_tol=rel_tol)[0]
            g1_max = max(g1_max, float(np.max(quantity_samples(t, grid).g1_abs)))
            peak = max(peak, arc_peak)
        per_region[name] = {"k_inf": peak, "k_one": one_val, "int_dm": dm_val,
                            "sup_g1": g1_max}
        k_inf = max(k_inf, peak)
        k_one += one_val
        k_one_err += one_err
        int_dm += dm_val
        sup_g1 = max(sup_g1, g1_max)

    if k_one_err > rel_tol * max(abs(k_one), 1e-300):
        raise NonConvergenceError(
            f"k_one quadrature error {k_one_err:.2e} exceeds {rel_tol:.1e} "
            f"relative at t={t}, which={which}"
        )
    return KappaReport(which, t, delta, beta, k_inf, k_one, int_dm + sup_g1,
                       per_region, k_one_err)


# -- table verification -------------------------------------------------------

@dataclass
class CellReport:
    quantity: str
    region: str
    sup_ratio: float
    inf_ratio: float | None = None
    printed_sup_ratio: float | None = None


@dataclass
class TableReport:
    t: float
    delta: float
    cells: list[CellReport]
    integral_value: float
    integral_ratio_printed: float
    integral_ratio_corrected: float

    def cell(self, quantity: str, region: str) -> CellReport:
        for c in self.cells:
            if c.quantity == quantity and c.region == region:
                return c
        raise KeyError((quantity, region))


def table_check(t: float, delta: float = 0.5, *, density: float = 1.0) -> TableReport:
    """Sup (and, for two-sided cells, inf) of |quantity| / bound per cell,
    plus the integrated 1/|gamma'| over the theta_star region against both
    the printed t^{-9/2} log(t+2) rate and the corrected t^{-7/2} log(t+2)."""
    t = _check_time(t)
    if t <= 100.0 * delta**-4:
        raise ValueError(f"table asymptotics need t > 100 delta^-4 = {100*delta**-4:.0f}")
    part = partition(t, delta)
    cells: list[CellReport] = []
    for region in REGION_NAMES:
        grid = region_grid(part, region, density)
        qs = quantity_samples(t, grid)
        values = {
            "mz": np.abs(qs.mz), "dmz": np.abs(qs.dmz),
            "my": np.abs(qs.my), "dmy": np.abs(qs.dmy),
            "inv_g1": qs.inv_g1, "g2_over_g1": qs.g2_over_g1,
            "inv_wp": qs.inv_wp,
        }
        nz = np.abs(grid) > 1e-300
        for q in QUANTITY_NAMES:
            bound = table_bound(q, region, t, grid, qs.g1_abs)
            ratio = values[q][nz] / bound[nz]
            cell = CellReport(q, region, float(np.max(ratio)))
            if (q, region) in TWO_SIDED_CELLS:
                cell.inf_ratio = float(np.min(ratio))
            if (q, region) in ERRATUM_CELLS:
                pb = table_bound(q, region, t, grid, qs.g1_abs, printed=True)
                cell.printed_sup_ratio = float(np.max(values[q][nz] / pb[nz]))
            cells.append(cell)

    cr_grid = region_grid(part, "critical_right", density * 2.0)
    integral, _ = _integrate_on_grid(lambda th: quantity_samples(t, th).inv_g1, cr_grid)
    log_t = math.log(t + 2.0)
    return TableReport(
        t, delta, cells, integral,
        integral_ratio_printed=integral * t**4.5 / log_t,
        integral_ratio_corrected=integral * t**3.5 / log_t,
    )


# -- scaling fits -------------------------------------------------------------

@dataclass(frozen=True)
class ScalingFit:
    exponent: float
    constant: float
    residual: float


def scaling_fit(samples, log_correction: str = "none") -> ScalingFit:
    """Least-squares fit log(value) = c + p log(t) [+ log log(t+2)].

    samples: iterable of (t, value) with positive values, >= 4 points
    spanning at least 1.5 decades in t.  Returns p, e^c and the rms residual.
    """
    if log_correction not in ("none", "log"):
        raise ValueError("log_correction must be 'none' or 'log'")
    pts = [(float(t), float(v)) for t, v in samples]
    if len(pts) < 4:
        raise ValueError("need at least 4 samples")
    ts = np.array([p[0] for p in pts])
    vs = np.array([p[1] for p in pts])
    if np.any(vs <= 0.0):
        raise ValueError("values must be positive")
    if np.max(ts) / np.min(ts) < 10.0**1.5:
        raise ValueError("t values must span at least 1.5 decades")
    y = np.log(vs)
    if log_correction == "log":
        y = y - np.log(np.log(ts + 2.0))
    A = np.vstack([np.ones_like(ts), np.log(ts)]).T
    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((A @ sol - y) ** 2)))
    return ScalingFit(float(sol[1]), float(math.exp(sol[0])), resid)
