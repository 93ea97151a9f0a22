"""Command-line front end.

Subcommands reproduce the standard experiment set (``fig``), evaluate single
analytic bounds (``bound``), run Monte-Carlo validations (``simulate``,
``if-sim``, ``validate``), and replay any previous run from its manifest
(``rerun``).  Every data-producing run writes a CSV (curve, x, y, stderr) and
a JSON manifest carrying the full parameter set, the seed and the library
version; replaying a manifest reproduces the CSV byte for byte.

Exit codes: 0 success, 1 usage or parameter error, 2 numerical-domain error.
"""

import argparse
import csv
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .bounds import (
    ScenarioDims,
    atom_probability,
    mimo_p_out_k,
    mimo_union_bound,
    p_out_k,
    regularized_incomplete_beta,
    scalar_bounds,
    two_user_cdf,
    two_user_simo_bound,
)
from .dmt import single_user_dmt, symmetric_mac_dmt, symmetric_mac_dmt_curve
from .errors import InvalidParameterError, NumericalDomainError
from .integer_forcing import (
    EffectiveChannel,
    brute_force_search,
    conditioned_rate_samples,
    fraction_of_capacity,
    if_rate,
    if_rate_cdf_conditioned,
    lll_search,
    ml_mean_rate_fraction,
)
from .linalg import RngStream, sample_complex_gaussian
from .montecarlo import (
    SimConfig,
    averaged_bound_vs_snr,
    binomial_stderr,
    conditional_cdf_cardinality,
    conditional_cdf_mimo_frobenius,
    conditional_cdf_scalar,
    default_rate_grid,
    outage_vs_snr,
)

_LN2 = math.log(2.0)

_PRECODER_NAMES = {"none": "none", "haar": "haar", "bb": "badr_belfiore"}

BOUND_KINDS = ("two-user", "atom", "scalar-bracket", "frobenius-union", "simo", "dmt")
VALIDATE_SUITES = ("analytic", "montecarlo", "if", "all")


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


# ---------------------------------------------------------------------------
# output plumbing

def _fmt(value):
    if value is None:
        return ""
    return repr(float(value))


def _write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["curve", "x", "y", "stderr"])
        for curve, x, y, err in rows:
            writer.writerow([curve, _fmt(x), _fmt(y), _fmt(err)])


def _write_manifest(path, command, params, wall_time_s, csv_path, extra=None):
    doc = {
        "command": command,
        "params": params,
        "seed": params.get("seed", 0),
        "version": __version__,
        "wall_time_s": wall_time_s,
        "csv": csv_path,
    }
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _out_paths(out, default_stem):
    base = out if out else default_stem
    if base.endswith(".csv"):
        return base, base[:-4] + ".json"
    if base.endswith(".json"):
        return base[:-5] + ".csv", base
    return base + ".csv", base + ".json"


def _cdf_rows(curve_name, cdf, atom_name=None):
    rows = [(curve_name, r, p, e)
            for r, p, e in zip(cdf.rates, cdf.probs, cdf.stderr)]
    if atom_name is not None and cdf.atom_mass is not None:
        rows.append((atom_name, cdf.rates[-1], cdf.atom_mass, cdf.atom_stderr))
    return rows


def _estimate_rows(curve_name, estimates):
    return [(curve_name, e.point, e.p_hat, e.stderr) for e in estimates]


def _require(params, *names):
    for name in names:
        if params.get(name) is None:
            flag = "--" + name.replace("_", "-")
            raise InvalidParameterError(f"{flag} is required for this command")


def _parse_snr_list(text):
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise InvalidParameterError(
            "--snr-db-list must be comma-separated numbers") from exc
    if not values:
        raise InvalidParameterError("--snr-db-list must be non-empty")
    return values


# ---------------------------------------------------------------------------
# figure handlers: each takes the resolved parameter dict and returns rows

_FIG_DEFAULTS = {
    1: {"users": 2, "nt": 1, "nr": 1},
    2: {"sum_cap": 2.0},
    3: {"users": 4, "sum_cap": 8.0, "trials": 100000},
    4: {"users": 4, "sum_cap": 8.0, "trials": 100000},
    5: {"users": 2, "nt": 2, "nr": 3, "rate": 3.0, "trials": 10000,
        "snr_db_list": [float(s) for s in range(-10, 21, 2)],
        "rate_convention": "total"},
    6: {"users": 2, "nt": 1, "nr": 6, "rate": 3.0, "trials": 10000,
        "snr_db_list": [float(s) for s in range(-10, 21, 2)],
        "rate_convention": "total"},
    7: {"users": 2, "sum_cap": 10.0, "trials": 10000, "rate_convention": "total"},
    8: {"users": 2, "sum_cap": 10.0, "trials": 10000},
    9: {"trials": 2000},
    10: {"users": 2, "trials": 2000},
}


def _fig_1(params):
    users, nt, nr = params["users"], params["nt"], params["nr"]
    rows = []
    for r, d in symmetric_mac_dmt_curve(users, nt, nr).breakpoints:
        rows.append(("mac-symmetric", r, d, None))
    for k in range(min(nt, nr) + 1):
        rows.append(("single-user", float(k), single_user_dmt(nt, nr, float(k)), None))
    return rows


def _fig_2(params):
    cap = params["sum_cap"]
    gain_total = math.expm1(cap * _LN2)
    rows = []
    for u in (0.1, 0.5, 0.8):
        c1 = math.log1p(u * gain_total) / _LN2
        c2 = math.log1p((1.0 - u) * gain_total) / _LN2
        verts = [(0.0, 0.0), (c1, 0.0), (c1, cap - c1), (cap - c2, c2),
                 (0.0, c2), (0.0, 0.0)]
        rows.extend((f"region-u{u:g}", x, y, None) for x, y in verts)
    for r in default_rate_grid(cap):
        density = _LN2 * 2.0 ** (r / 2.0) / gain_total
        rows.append(("density", r, density, None))
    rows.append(("atom", cap, atom_probability(cap), None))
    return rows


def _fig_3(params):
    users, cap = params["users"], params["sum_cap"]
    cfg = SimConfig(trials=params["trials"], seed=params["seed"])
    grid = default_rate_grid(cap)
    rows = []
    for k in range(1, users):
        cdf = conditional_cdf_cardinality(k, users, cap, cfg)
        rows.extend(_cdf_rows(f"empirical-k{k}", cdf))
        rows.extend((f"analytic-k{k}", r, p_out_k(k, users, float(r), cap), None)
                    for r in grid)
    return rows


def _fig_4(params):
    users, cap = params["users"], params["sum_cap"]
    cfg = SimConfig(trials=params["trials"], seed=params["seed"])
    cdf = conditional_cdf_scalar(users, cap, cfg)
    rows = _cdf_rows("empirical", cdf, atom_name="empirical-atom")
    for r in cdf.rates:
        pair = scalar_bounds(users, float(r), cap)
        rows.append(("lower", r, pair.lower, None))
        rows.append(("upper", r, pair.upper, None))
    return rows


def _snr_sweep_rows(params, with_simo):
    dims = ScenarioDims(params["users"], params["nt"], params["nr"])
    cfg = SimConfig(trials=params["trials"], seed=params["seed"],
                    snr_grid_db=np.asarray(params["snr_db_list"], dtype=float),
                    per_user_target=params.get("rate_convention") == "per-user")
    target = params["rate"]
    rows = _estimate_rows("empirical", outage_vs_snr(dims, target, cfg))
    rows += _estimate_rows("union-avg",
                           averaged_bound_vs_snr(dims, target, "union", cfg))
    if with_simo:
        rows += _estimate_rows("simo-avg",
                               averaged_bound_vs_snr(dims, target, "simo", cfg))
    return rows


def _fig_5(params):
    return _snr_sweep_rows(params, with_simo=False)


def _fig_6(params):
    return _snr_sweep_rows(params, with_simo=True)


_IF_SCHEMES_FULL = (("if", "none"), ("if-sic", "none"), ("if", "bb"),
                    ("if-sic", "bb"), ("if", "haar"), ("if-sic", "haar"))
_IF_SCHEMES_NO_HAAR = _IF_SCHEMES_FULL[:4]


def _ml_cdf_rows(users, cap, grid, convention):
    scale = users if convention == "per-user" else 1
    rows = []
    for r in grid:
        total = min(float(r) * scale, cap)
        if users == 2:
            rows.append(("ml", r, two_user_cdf(total, cap), None))
        else:
            pair = scalar_bounds(users, total, cap)
            rows.append(("ml-lower", r, pair.lower, None))
            rows.append(("ml-upper", r, pair.upper, None))
    return rows


def _fig_7(params):
    users, cap = params["users"], params["sum_cap"]
    convention = params["rate_convention"]
    cfg = SimConfig(trials=params["trials"], seed=params["seed"])
    top = cap if convention == "total" else cap / users
    grid = default_rate_grid(top)
    rows = _ml_cdf_rows(users, cap, grid, convention)
    for mode, pre in _IF_SCHEMES_FULL:
        cdf = if_rate_cdf_conditioned(users, cap, _PRECODER_NAMES[pre], mode,
                                      cfg, rate_convention=convention)
        rows.extend(_cdf_rows(f"{mode}-{pre}", cdf))
    return rows


def _histogram_rows(curve_name, samples, edges, trials):
    counts, _ = np.histogram(samples, bins=edges)
    widths = np.diff(edges)
    centers = (edges[:-1] + edges[1:]) / 2.0
    rows = []
    for c, x, w in zip(counts, centers, widths):
        rows.append((curve_name, float(x), c / (trials * w),
                     math.sqrt(c) / (trials * w)))
    return rows


def _fig_8(params):
    users, cap = params["users"], params["sum_cap"]
    cfg = SimConfig(trials=params["trials"], seed=params["seed"])
    edges = np.linspace(0.0, cap, 51)
    centers = (edges[:-1] + edges[1:]) / 2.0
    rows = []
    if users == 2:
        gain_total = math.expm1(cap * _LN2)
        rows.extend(("ml-density", float(r), _LN2 * 2.0 ** (r / 2.0) / gain_total, None)
                    for r in centers)
        rows.append(("ml-atom", cap, atom_probability(cap), None))
    for mode, pre in _IF_SCHEMES_NO_HAAR:
        samples = conditioned_rate_samples(users, cap, _PRECODER_NAMES[pre],
                                           mode, cfg)
        rows.extend(_histogram_rows(f"{mode}-{pre}", samples, edges, cfg.trials))
    return rows


def _fig_9(params):
    outage_level = 0.01
    per_user_caps = [float(v) for v in range(1, 11)]
    rows = []
    for users in (2, 4, 6):
        caps = [users * puc for puc in per_user_caps]
        pairs = fraction_of_capacity(users, caps, outage_level, "ml")
        rows.extend((f"ml-n{users}", cap / users, frac, None)
                    for cap, frac in pairs)
    cfg = SimConfig(trials=params["trials"], seed=params["seed"])
    caps2 = [2 * puc for puc in per_user_caps]
    pairs = fraction_of_capacity(2, caps2, outage_level, "if-sic", cfg,
                                 precoder_kind="badr_belfiore")
    rows.extend(("if-sic-bb-n2", cap / 2, frac, None) for cap, frac in pairs)
    return rows


def _fig_10(params):
    users = params["users"]
    cfg = SimConfig(trials=params["trials"], seed=params["seed"])
    caps = [float(c) for c in range(2, 17, 2)]
    rows = []
    if users == 2:
        rows.extend(("ml", c, ml_mean_rate_fraction(c), None) for c in caps)
    for mode, pre in _IF_SCHEMES_NO_HAAR:
        for c in caps:
            samples = conditioned_rate_samples(users, c, _PRECODER_NAMES[pre],
                                               mode, cfg)
            frac = float(samples.mean()) / c
            err = float(samples.std(ddof=1)) / (math.sqrt(cfg.trials) * c)
            rows.append((f"{mode}-{pre}", c, frac, err))
    return rows


_FIG_HANDLERS = {1: _fig_1, 2: _fig_2, 3: _fig_3, 4: _fig_4, 5: _fig_5,
                 6: _fig_6, 7: _fig_7, 8: _fig_8, 9: _fig_9, 10: _fig_10}


def _rows_fig(params):
    return _FIG_HANDLERS[params["figure"]](params)


# ---------------------------------------------------------------------------
# bound, simulate, if-sim handlers

def _bound_values(params):
    which = params["which"]
    if which == "two-user":
        _require(params, "rate", "sum_cap")
        return {"value": two_user_cdf(params["rate"], params["sum_cap"])}
    if which == "atom":
        _require(params, "sum_cap")
        return {"value": atom_probability(params["sum_cap"])}
    if which == "scalar-bracket":
        _require(params, "users", "rate", "sum_cap")
        pair = scalar_bounds(params["users"], params["rate"], params["sum_cap"])
        return {"lower": pair.lower, "upper": pair.upper,
                "upper_raw": pair.upper_raw}
    if which == "frobenius-union":
        _require(params, "users", "nt", "nr", "rate", "sum_cap")
        dims = ScenarioDims(params["users"], params["nt"], params["nr"])
        return {"value": mimo_union_bound(dims, params["rate"], params["sum_cap"])}
    if which == "simo":
        _require(params, "rate", "sum_cap")
        return {"value": two_user_simo_bound(params["rate"], params["sum_cap"])}
    if which == "dmt":
        _require(params, "users", "nt", "nr", "mux")
        return {"value": symmetric_mac_dmt(params["users"], params["nt"],
                                           params["nr"], params["mux"])}
    raise InvalidParameterError(f"unknown bound kind {which!r}")


def _rows_simulate(params):
    users = params["users"]
    cfg_kwargs = {"trials": params["trials"], "seed": params["seed"]}
    if params.get("snr_db_list") is not None:
        _require(params, "rate", "nt", "nr")
        local = dict(params)
        return _snr_sweep_rows(local, with_simo=(users == 2 and params["nt"] == 1))
    _require(params, "sum_cap")
    cap = params["sum_cap"]
    cfg = SimConfig(**cfg_kwargs)
    if params.get("cardinality") is not None:
        k = params["cardinality"]
        cdf = conditional_cdf_cardinality(k, users, cap, cfg)
        rows = _cdf_rows(f"empirical-k{k}", cdf)
        rows.extend((f"analytic-k{k}", float(r), p_out_k(k, users, float(r), cap), None)
                    for r in cdf.rates)
        return rows
    nt = params.get("nt") or 1
    nr = params.get("nr") or 1
    if nt > 1 or nr > 1:
        dims = ScenarioDims(users, nt, nr)
        cdf = conditional_cdf_mimo_frobenius(dims, cap, cfg)
        rows = _cdf_rows("empirical", cdf, atom_name="empirical-atom")
        for r in cdf.rates:
            rows.append(("upper", r, mimo_union_bound(dims, float(r), cap), None))
            rows.append(("lower", r,
                         max(mimo_p_out_k(k, dims, float(r), cap)
                             for k in range(1, users + 1)), None))
        return rows
    cdf = conditional_cdf_scalar(users, cap, cfg)
    rows = _cdf_rows("empirical", cdf, atom_name="empirical-atom")
    for r in cdf.rates:
        pair = scalar_bounds(users, float(r), cap)
        rows.append(("lower", r, pair.lower, None))
        rows.append(("upper", r, pair.upper, None))
    if users == 2:
        rows.append(("analytic-atom", cap, atom_probability(cap), None))
    return rows


def _rows_ifsim(params):
    _require(params, "sum_cap")
    users, cap = params["users"], params["sum_cap"]
    convention = params["rate_convention"]
    cfg = SimConfig(trials=params["trials"], seed=params["seed"])
    cdf = if_rate_cdf_conditioned(users, cap, _PRECODER_NAMES[params["precoder"]],
                                  params["mode"], cfg, rate_convention=convention)
    rows = _ml_cdf_rows(users, cap, cdf.rates, convention)
    rows.extend(_cdf_rows(f"{params['mode']}-{params['precoder']}", cdf))
    return rows


_ROW_HANDLERS = {"fig": _rows_fig, "simulate": _rows_simulate, "if-sim": _rows_ifsim}


# ---------------------------------------------------------------------------
# validation suites

def _suite_analytic():
    checks = []
    checks.append(("two-user cdf at R=C=2",
                   abs(two_user_cdf(2.0, 2.0) - 2.0 / 3.0), 1e-12))
    checks.append(("atom mass at C=2",
                   abs(atom_probability(2.0) - 1.0 / 3.0), 1e-12))
    dev = 0.0
    for cap in (2.0, 10.0):
        for r in np.linspace(0.1 * cap, cap, 9):
            pair = scalar_bounds(2, float(r), cap)
            dev = max(dev, abs(pair.upper_raw - two_user_cdf(float(r), cap)))
    checks.append(("two-user union equals exact cdf", dev, 1e-12))
    dev = 0.0
    for users in (2, 3, 4):
        dims = ScenarioDims(users, 1, 1)
        for k in range(1, users + 1):
            for r in (1.0, 3.0, 5.0):
                dev = max(dev, abs(mimo_p_out_k(k, dims, r, 6.0)
                                   - p_out_k(k, users, r, 6.0)))
    checks.append(("per-antenna law collapses to scalar at 1x1", dev, 1e-12))
    dev = 0.0
    for a in range(1, 7):
        for b in range(1, 7):
            for x in (0.0, 0.2, 0.5, 0.9, 1.0):
                total = (regularized_incomplete_beta(x, a, b)
                         + regularized_incomplete_beta(1.0 - x, b, a))
                dev = max(dev, abs(total - 1.0))
    checks.append(("beta tail symmetry", dev, 1e-12))
    dev = 0.0
    for users in range(2, 7):
        for nt in range(1, 5):
            for nr in range(1, 5):
                thr = min(nt, nr / (users + 1))
                rmax = min(users * nt, nr) / users
                if thr <= 0 or thr >= rmax:
                    continue
                lo = single_user_dmt(nt, nr, thr)
                hi = single_user_dmt(users * nt, nr, users * thr)
                dev = max(dev, abs(lo - hi))
    checks.append(("tradeoff continuity at branch point", dev, 1e-12))
    checks.append(("receive-array bound reaches one at R=C",
                   abs(two_user_simo_bound(3.0, 3.0) - 1.0), 1e-15))
    return checks


def _suite_montecarlo(trials, seed):
    checks = []
    cfg = SimConfig(trials=trials, seed=seed,
                    rate_grid=np.linspace(0.0, 2.0, 20))
    cdf = conditional_cdf_scalar(2, 2.0, cfg)
    worst = 0.0
    for r, p in zip(cdf.rates, cdf.probs):
        exact = two_user_cdf(float(r), 2.0)
        sigma = binomial_stderr(exact, trials)
        dev = abs(p - exact) / sigma if sigma > 0 else (0.0 if p == exact else math.inf)
        worst = max(worst, dev)
    checks.append(("two-user cdf deviation (sigmas)", worst, 4.0))
    sigma = binomial_stderr(1.0 / 3.0, trials)
    checks.append(("atom mass deviation (sigmas)",
                   abs(cdf.atom_mass - 1.0 / 3.0) / sigma, 4.0))
    cfg = SimConfig(trials=trials, seed=seed,
                    rate_grid=np.linspace(0.0, 8.0, 10))
    cdf = conditional_cdf_cardinality(2, 4, 8.0, cfg)
    worst = 0.0
    for r, p in zip(cdf.rates, cdf.probs):
        exact = p_out_k(2, 4, float(r), 8.0)
        sigma = binomial_stderr(exact, trials)
        dev = abs(p - exact) / sigma if sigma > 0 else (0.0 if p == exact else math.inf)
        worst = max(worst, dev)
    checks.append(("fixed-pair cdf deviation (sigmas)", worst, 4.0))
    return checks


def _random_gram(n, rng):
    h = sample_complex_gaussian(n, n, 1.0, rng)
    k = np.linalg.inv(np.eye(n) + h.conj().T @ h)
    return (k + k.conj().T) / 2.0


def _min_rate(gram, a):
    forms = np.einsum("mi,ij,mj->m", a.conj(), gram, a).real
    return float(np.min(-np.log(forms) / _LN2))


def _suite_if(instances, seed):
    checks = []
    agree = 0
    better = 0
    for t in range(instances):
        rng = RngStream(seed, t).generator()
        gram = _random_gram(2, rng)
        r_lll = _min_rate(gram, lll_search(gram))
        r_opt = _min_rate(gram, brute_force_search(gram, 3))
        if r_lll > r_opt + 1e-9:
            better += 1
        if abs(r_lll - r_opt) <= 1e-9:
            agree += 1
    checks.append(("reduction beats oracle (count)", float(better), 0.0))
    checks.append(("reduction-oracle disagreement rate",
                   1.0 - agree / instances, 0.05))
    worst = 0.0
    for t in range(2 * instances):
        rng = RngStream(seed + 1, t).generator()
        h = sample_complex_gaussian(3, 3, 1.0, rng)
        eff = EffectiveChannel(matrix=h, n_users=3, streams_per_user=1,
                               time_extension=1)
        plain = if_rate(eff, mode="if")
        sic = if_rate(eff, mode="if-sic", a=plain.a_matrix)
        gap = float(np.max(plain.per_stream_rate_bits - sic.per_stream_rate_bits))
        worst = max(worst, gap)
    checks.append(("successive worse than parallel (max bits)", worst, 1e-9))
    gain = 3.0
    eff = EffectiveChannel(matrix=math.sqrt(gain) * np.eye(2, dtype=complex),
                           n_users=2, streams_per_user=1, time_extension=1)
    res = if_rate(eff, mode="if")
    cap = 2.0 * math.log1p(gain) / _LN2
    checks.append(("orthogonal channel rate gap (bits)",
                   abs(2.0 * res.symmetric_rate_bits - cap), 1e-9))
    return checks


def _run_validate(params):
    suite = params["suite"]
    trials = params["trials"]
    seed = params["seed"]
    checks = []
    if suite in ("analytic", "all"):
        checks.extend(_suite_analytic())
    if suite in ("montecarlo", "all"):
        checks.extend(_suite_montecarlo(trials if trials else 20000, seed))
    if suite in ("if", "all"):
        checks.extend(_suite_if(trials if trials else 100, seed))
    failures = 0
    for name, measured, threshold in checks:
        ok = measured <= threshold
        failures += 0 if ok else 1
        status = "PASS" if ok else "FAIL"
        print(f"{status} {name}: measured {measured:.6g} vs threshold {threshold:.6g}")
    print(f"{len(checks) - failures}/{len(checks)} checks passed")
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# argument parsing and dispatch

def _add_flags(p, *names):
    flags = {
        "trials": lambda: p.add_argument("--trials", type=int, default=None,
                                         help="Monte-Carlo trial count"),
        "seed": lambda: p.add_argument("--seed", type=int, default=0,
                                       help="base seed (default 0)"),
        "out": lambda: p.add_argument("--out", default=None,
                                      help="output path stem or .csv/.json path"),
        "users": lambda: p.add_argument("--users", type=int, default=None,
                                        help="number of users"),
        "nr": lambda: p.add_argument("--nr", type=int, default=None,
                                     help="receive antennas"),
        "nt": lambda: p.add_argument("--nt", type=int, default=None,
                                     help="transmit antennas per user"),
        "sum-cap": lambda: p.add_argument("--sum-cap", type=float, default=None,
                                          dest="sum_cap",
                                          help="conditioning sum rate in bits"),
        "rate": lambda: p.add_argument("--rate", type=float, default=None,
                                       help="target rate in bits"),
        "snr-db-list": lambda: p.add_argument("--snr-db-list", default=None,
                                              dest="snr_db_list",
                                              help="comma-separated SNR grid in dB"),
        "precoder": lambda: p.add_argument("--precoder", default="none",
                                           choices=sorted(_PRECODER_NAMES),
                                           help="space-time precoder"),
        "mode": lambda: p.add_argument("--mode", default="if",
                                       choices=["if", "if-sic"],
                                       help="receiver variant"),
        "rate-convention": lambda: p.add_argument(
            "--rate-convention", default=None, dest="rate_convention",
            choices=["total", "per-user"],
            help="rate axis and outage-target convention"),
        "mux": lambda: p.add_argument("--mux", type=float, default=None,
                                      help="multiplexing gain"),
        "cardinality": lambda: p.add_argument(
            "--cardinality", type=int, default=None,
            help="subset size for the per-cardinality law"),
    }
    for name in names:
        flags[name]()


def build_parser():
    parser = _Parser(prog="fadingmac",
                     description="Bounds, simulations and integer-forcing rates "
                                 "for the Rayleigh-fading multiple access channel.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("fig", help="emit the data behind a standard figure",
                       description="Write one figure's curves as CSV plus a "
                                   "JSON manifest.")
    p.add_argument("figure", type=int, choices=sorted(_FIG_HANDLERS),
                   help="figure id")
    _add_flags(p, "trials", "seed", "out", "users", "nr", "nt", "sum-cap",
               "rate", "snr-db-list", "rate-convention")

    p = sub.add_parser("bound", help="evaluate one analytic quantity",
                       description="Print a single bound value; with --out, "
                                   "also record it in a JSON manifest.")
    p.add_argument("which", choices=list(BOUND_KINDS), help="which quantity")
    _add_flags(p, "users", "nr", "nt", "rate", "sum-cap", "mux", "seed", "out")

    p = sub.add_parser("simulate", help="Monte-Carlo conditional CDFs and outage sweeps")
    _add_flags(p, "trials", "seed", "out", "users", "nr", "nt", "sum-cap",
               "rate", "snr-db-list", "rate-convention", "cardinality")

    p = sub.add_parser("if-sim", help="conditioned integer-forcing rate CDF")
    _add_flags(p, "trials", "seed", "out", "users", "sum-cap", "precoder",
               "mode", "rate-convention")

    p = sub.add_parser("validate", help="run a self-check suite")
    p.add_argument("suite", choices=list(VALIDATE_SUITES), help="which suite")
    _add_flags(p, "trials", "seed")

    p = sub.add_parser("rerun", help="replay a run from its manifest")
    p.add_argument("--manifest", required=True, help="path to a JSON manifest")
    p.add_argument("--out", default=None,
                   help="override the output path recorded in the manifest")
    return parser


def _fig_params(args):
    defaults = dict(_FIG_DEFAULTS[args.figure])
    params = {"figure": args.figure, "seed": args.seed,
              "users": defaults.get("users", 2),
              "nt": defaults.get("nt", 1), "nr": defaults.get("nr", 1),
              "sum_cap": defaults.get("sum_cap"),
              "rate": defaults.get("rate"),
              "trials": defaults.get("trials", 10000),
              "snr_db_list": defaults.get("snr_db_list"),
              "rate_convention": defaults.get("rate_convention", "total")}
    for name in ("trials", "users", "nt", "nr", "sum_cap", "rate",
                 "rate_convention"):
        val = getattr(args, name)
        if val is not None:
            params[name] = val
    if args.snr_db_list is not None:
        params["snr_db_list"] = _parse_snr_list(args.snr_db_list)
    return params


def _run_and_write(command, params, default_stem, out):
    start = time.perf_counter()
    rows = _ROW_HANDLERS[command](params)
    wall = time.perf_counter() - start
    csv_path, manifest_path = _out_paths(out, default_stem)
    _write_csv(csv_path, rows)
    _write_manifest(manifest_path, command, params, wall, csv_path)
    print(f"wrote {csv_path} and {manifest_path}")
    return 0


def _run_bound(args):
    params = {"which": args.which, "users": args.users, "nt": args.nt,
              "nr": args.nr, "rate": args.rate, "sum_cap": args.sum_cap,
              "mux": args.mux, "seed": args.seed}
    start = time.perf_counter()
    values = _bound_values(params)
    wall = time.perf_counter() - start
    if set(values) == {"value"}:
        print(f"{values['value']:.6g}")
    else:
        print(" ".join(f"{k}={v:.6g}" for k, v in values.items()))
    if args.out:
        path = args.out if args.out.endswith(".json") else args.out + ".json"
        _write_manifest(path, "bound", params, wall, None, extra={"result": values})
        print(f"wrote {path}")
    return 0


def _run_rerun(args):
    try:
        with open(args.manifest) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidParameterError(f"cannot read manifest: {exc}") from exc
    command = doc.get("command")
    if command not in _ROW_HANDLERS:
        raise InvalidParameterError(
            f"manifest command {command!r} does not produce a CSV")
    params = doc.get("params")
    if not isinstance(params, dict):
        raise InvalidParameterError("manifest is missing its parameter set")
    out = args.out if args.out else doc.get("csv")
    if not out:
        raise InvalidParameterError("manifest records no CSV path; pass --out")
    start = time.perf_counter()
    rows = _ROW_HANDLERS[command](params)
    wall = time.perf_counter() - start
    csv_path, manifest_path = _out_paths(out, out)
    _write_csv(csv_path, rows)
    _write_manifest(manifest_path, command, params, wall, csv_path)
    print(f"wrote {csv_path} and {manifest_path}")
    return 0


def _dispatch(args):
    if args.command == "fig":
        params = _fig_params(args)
        return _run_and_write("fig", params, f"fig{args.figure}", args.out)
    if args.command == "bound":
        return _run_bound(args)
    if args.command == "simulate":
        params = {"users": args.users if args.users else 2,
                  "sum_cap": args.sum_cap, "rate": args.rate,
                  "trials": args.trials if args.trials else 10000,
                  "seed": args.seed, "nt": args.nt, "nr": args.nr,
                  "cardinality": args.cardinality,
                  "snr_db_list": (_parse_snr_list(args.snr_db_list)
                                  if args.snr_db_list else None),
                  "rate_convention": args.rate_convention or "total"}
        return _run_and_write("simulate", params, "simulate", args.out)
    if args.command == "if-sim":
        params = {"users": args.users if args.users else 2,
                  "sum_cap": args.sum_cap,
                  "trials": args.trials if args.trials else 10000,
                  "seed": args.seed, "precoder": args.precoder,
                  "mode": args.mode,
                  "rate_convention": args.rate_convention or "total"}
        return _run_and_write("if-sim", params, "if-sim", args.out)
    if args.command == "validate":
        return _run_validate({"suite": args.suite, "trials": args.trials,
                              "seed": args.seed})
    if args.command == "rerun":
        return _run_rerun(args)
    raise InvalidParameterError(f"unknown command {args.command!r}")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except InvalidParameterError as exc:
        print(f"fadingmac: error: {exc}", file=sys.stderr)
        return 1
    except NumericalDomainError as exc:
        print(f"fadingmac: numerical error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
