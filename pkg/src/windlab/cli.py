"""Config-driven experiment harness.

Every experiment is a subcommand that reads parameters from an optional flat
key=value config file, lets command-line flags override it, runs one
deterministic computation, and writes a CSV or JSON artifact next to a JSON
manifest echoing the exact configuration. Identical config and seed give
byte-identical CSV output in serial mode.

Exit codes: 0 success, 1 validation error, 2 capacity error.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .amplitude import born, superpose
from .classical import (
    MediumProfile,
    fermat_minimize,
    phase_concentration,
    snell_ratio,
    speed_bound_check,
)
from .errors import CapacityError, InvalidInputError
from .paths import (
    SpaceGrid,
    TimeGrid,
    free_particle,
    harmonic_oscillator,
    path_winding,
)
from .propagator import (
    analytic_free_particle,
    enumerate_paths,
    propagator_bruteforce,
    propagator_transfer,
)
from .randmap import MappingDistribution, empirical_density, sample_image, LabelledPoint

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CAPACITY = 2

EXPERIMENTS = (
    "sample",
    "interfere",
    "pathsum",
    "propagate",
    "converge",
    "concentrate",
    "fermat",
    "speedbound",
)


def read_config_file(path: str) -> dict:
    """Flat key=value lines; '#' starts a comment; values parsed as numbers
    when possible."""
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInputError(f"bad config line: {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key] = val
    return out


def _num(cfg: dict, key: str, default=None, cast=float):
    if key in cfg and cfg[key] != "":
        try:
            return cast(float(cfg[key])) if cast is int else cast(cfg[key])
        except (TypeError, ValueError):
            raise InvalidInputError(f"config field {key!r} is not a number: {cfg[key]!r}")
    if default is None:
        raise InvalidInputError(f"missing required config field {key!r}")
    return default


def _lagrangian(cfg: dict):
    name = str(cfg.get("lagrangian", "free"))
    mass = _num(cfg, "mass", 1.0)
    if mass <= 0:
        raise InvalidInputError(f"mass must be > 0, got {mass}")
    if name == "free":
        return free_particle(mass)
    if name == "harmonic":
        return harmonic_oscillator(mass, _num(cfg, "omega", 1.0))
    raise InvalidInputError(f"unknown lagrangian {name!r}")


def _grids(cfg: dict) -> tuple[TimeGrid, SpaceGrid]:
    tg = TimeGrid(_num(cfg, "t_a", 0.0), _num(cfg, "t_b"), _num(cfg, "k", cast=int))
    sg = SpaceGrid(_num(cfg, "r_min"), _num(cfg, "r_max"), _num(cfg, "m_sites", cast=int))
    return tg, sg


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_rows(out_path: Path, header: list[str], rows: list[list], fmt: str) -> None:
    if fmt == "csv":
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(_fmt(c) if isinstance(c, float) else str(c) for c in row))
        out_path.write_text("\n".join(lines) + "\n")
    elif fmt == "json":
        payload = [dict(zip(header, row)) for row in rows]
        out_path.write_text(json.dumps(payload, indent=2) + "\n")
    else:
        raise InvalidInputError(f"unknown output format {fmt!r}")


def write_manifest(out_path: Path, experiment: str, cfg: dict, elapsed: float) -> None:
    manifest = {
        "experiment": experiment,
        "config": {k: str(v) for k, v in sorted(cfg.items())},
        "windlab_version": __version__,
        "elapsed_seconds": elapsed,
    }
    out_path.with_suffix(out_path.suffix + ".manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n"
    )


# ---------------------------------------------------------------------------
# experiment bodies: each returns (header, rows)


def run_sample(cfg: dict):
    seed = _num(cfg, "seed", cast=int)
    count = _num(cfg, "count", 1000, cast=int)
    dist = MappingDistribution(_num(cfg, "r_lo", 0.0), _num(cfg, "r_hi", 1.0))
    point = LabelledPoint(_num(cfg, "unit_index", 0, cast=int))
    draws = sample_image(point, dist, seed, count)
    bins = _num(cfg, "bins", 0, cast=int)
    if bins > 0:
        edges, freq = empirical_density(draws, bins, (dist.r_lo, dist.r_hi))
        return (
            ["bin_lo", "bin_hi", "frequency"],
            [[float(edges[i]), float(edges[i + 1]), float(freq[i])] for i in range(bins)],
        )
    return ["index", "r"], [[i, float(r)] for i, r in enumerate(draws)]


def run_interfere(cfg: dict):
    if "table_points" in cfg:
        from .amplitude import Envelope, eval_psi

        lo = _num(cfg, "table_r_lo", 0.0)
        hi = _num(cfg, "table_r_hi", 1.0)
        npts = _num(cfg, "table_points", cast=int)
        n = _num(cfg, "n", 0.0)
        A = Envelope(lambda r: 1.0, lo, hi)
        rows = []
        for r in np.linspace(lo, hi, npts):
            psi = eval_psi(A, n, float(r))
            rows.append([float(r), psi.real, psi.imag, born(psi)])
        return ["r", "re", "im", "prob"], rows
    re = _num(cfg, "re", 1.0)
    im = _num(cfg, "im", 0.0)
    psi = complex(re, im)
    single = born(psi)
    union = born(superpose([psi, psi]))
    return (
        ["p_single", "p_union", "p_additive"],
        [[single, union, 2.0 * single]],
    )


def run_pathsum(cfg: dict):
    tg, sg = _grids(cfg)
    L = _lagrangian(cfg)
    h = _num(cfg, "h", 1.0)
    i_a = _num(cfg, "i_a", cast=int)
    i_b = _num(cfg, "i_b", cast=int)
    budget = _num(cfg, "max_paths", 2_000_000, cast=int)
    dump_id = _num(cfg, "dump_path_id", -1, cast=int)
    rows = []
    for pid, path in enumerate(enumerate_paths(sg, tg.k, i_a, i_b, budget)):
        if dump_id >= 0:
            if pid == dump_id:
                nodes = tg.nodes
                return (
                    ["step", "t", "r"],
                    [[i, float(nodes[i]), float(sg.position(j))] for i, j in enumerate(path)],
                )
            continue
        m = path_winding(path, L, h, tg, sg)
        rows.append([pid, m, m * h])
    if dump_id >= 0:
        raise InvalidInputError(f"dump_path_id {dump_id} out of range")
    return ["path_id", "m", "action"], rows


def run_propagate(cfg: dict):
    tg, sg = _grids(cfg)
    L = _lagrangian(cfg)
    h = _num(cfg, "h", 1.0)
    i_a = _num(cfg, "i_a", cast=int)
    i_b = _num(cfg, "i_b", cast=int)
    method = str(cfg.get("method", "transfer"))
    _warn_boundary(sg, i_a, i_b)
    if method == "bruteforce":
        res = propagator_bruteforce(i_a, i_b, tg, sg, L, h)
    elif method == "transfer":
        res = propagator_transfer(i_a, i_b, tg, sg, L, h)
    elif method == "both":
        res = propagator_transfer(i_a, i_b, tg, sg, L, h)
        res_bf = propagator_bruteforce(i_a, i_b, tg, sg, L, h)
        if abs(res.kernel - res_bf.kernel) > 1e-10 * max(1.0, abs(res.kernel)):
            raise InvalidInputError("brute-force and transfer kernels disagree beyond 1e-10")
    else:
        raise InvalidInputError(f"unknown method {method!r}")
    K = res.kernel
    hbar = h / (2.0 * math.pi)
    oracle = (
        analytic_free_particle(
            sg.position(i_a), sg.position(i_b), tg.t_b - tg.t_a, L.mass, hbar
        )
        if L.name == "free"
        else None
    )
    abs_err = abs(abs(K) - abs(oracle)) if oracle is not None else float("nan")
    ph_err = abs(cmath.phase(K / oracle)) if oracle is not None else float("nan")
    return (
        ["k", "m_sites", "epsilon", "re_K", "im_K", "abs_K", "phase_K",
         "abs_err_vs_oracle", "phase_err_vs_oracle"],
        [[tg.k, sg.m_sites, tg.epsilon, K.real, K.imag, abs(K), cmath.phase(K),
          abs_err, ph_err]],
    )


def _warn_boundary(sg: SpaceGrid, i_a: int, i_b: int) -> None:
    width = sg.r_max - sg.r_min
    for j in (i_a, i_b):
        r = sg.position(j)
        if min(r - sg.r_min, sg.r_max - r) < 0.1 * width:
            print(
                f"warning: endpoint r={r} within 10% of the box boundary; "
                "boundary contributions may not be negligible",
                file=sys.stderr,
            )


def run_converge(cfg: dict):
    mass = _num(cfg, "mass", 1.0)
    hbar = _num(cfg, "hbar", 1.0)
    h = 2.0 * math.pi * hbar
    a = _num(cfg, "a", 0.0)
    b = _num(cfg, "b", 1.0)
    T = _num(cfg, "T", 1.0)
    r_min = _num(cfg, "r_min", -8.0)
    r_max = _num(cfg, "r_max", 9.0)
    ks = [int(s) for s in str(cfg.get("ks", "8,16,32,64,128")).split(",")]
    sites_floor = _num(cfg, "m_sites", 401, cast=int)
    L = free_particle(mass)
    width = r_max - r_min
    rows = []
    for k in ks:
        # keep the one-step phase table alias-free: grid spacing below
        # pi*hbar*epsilon/(mass*width), floored at the configured site count
        eps = T / k
        anti_alias = int(math.ceil(width * width * mass / (math.pi * hbar * eps))) + 1
        m_sites = max(sites_floor, anti_alias)
        sg = SpaceGrid(r_min, r_max, m_sites)
        tg = TimeGrid(0.0, T, k)
        i_a = sg.nearest_site(a)
        i_b = sg.nearest_site(b)
        K = propagator_transfer(i_a, i_b, tg, sg, L, h).kernel
        oracle = analytic_free_particle(sg.position(i_a), sg.position(i_b), T, mass, hbar)
        rows.append(
            [k, m_sites, tg.epsilon, K.real, K.imag, abs(K), cmath.phase(K),
             abs(abs(K) - abs(oracle)) / abs(oracle), abs(cmath.phase(K / oracle))]
        )
    return (
        ["k", "m_sites", "epsilon", "re_K", "im_K", "abs_K", "phase_K",
         "abs_err_vs_oracle", "phase_err_vs_oracle"],
        rows,
    )


def run_concentrate(cfg: dict):
    tg, sg = _grids(cfg)
    L = _lagrangian(cfg)
    i_a = _num(cfg, "i_a", cast=int)
    i_b = _num(cfg, "i_b", cast=int)
    delta = _num(cfg, "delta", 0.5)
    h_values = [float(s) for s in str(cfg.get("h_values", "4,2,1,0.5,0.25")).split(",")]
    budget = _num(cfg, "max_paths", 2_000_000, cast=int)
    rows = phase_concentration(L, tg, sg, i_a, i_b, h_values, delta, budget)
    return (
        ["h", "rho", "m_min", "paths_in_window", "total_paths"],
        [[r["h"], r["rho"], r["m_min"], r["paths_in_window"], r["total_paths"]] for r in rows],
    )


def _fermat_geometry(cfg: dict):
    profile = MediumProfile(_num(cfg, "v1"), _num(cfg, "v2"))
    a = (_num(cfg, "ax", 0.0), _num(cfg, "ay", 1.0))
    b = (_num(cfg, "bx", 1.0), _num(cfg, "by", -1.0))
    if a[1] <= 0 or b[1] >= 0:
        raise InvalidInputError("need ay > 0 and by < 0 for the two-media geometry")
    return profile, a, b


def run_fermat(cfg: dict):
    profile, a, b = _fermat_geometry(cfg)
    x_star, t_star = fermat_minimize(profile, a, b)
    ratio = snell_ratio(a, b, x_star)
    speed_ratio = profile.v_upper / profile.v_lower
    return (
        ["v1", "v2", "crossing", "time", "sin_ratio", "speed_ratio", "residual"],
        [[profile.v_upper, profile.v_lower, x_star, t_star, ratio, speed_ratio,
          abs(ratio - speed_ratio)]],
    )


def run_speedbound(cfg: dict):
    profile, a, b = _fermat_geometry(cfg)
    seed = _num(cfg, "seed", cast=int)
    n_paths = _num(cfg, "n_paths", 1000, cast=int)
    rep = speed_bound_check(profile, a, b, n_paths, seed)
    return (
        ["crossing", "time", "bound_speed", "n_paths", "violations", "worst_margin"],
        [[rep["crossing"], rep["time"], rep["bound_speed"], rep["n_paths"],
          rep["violations"], rep["worst_margin"]]],
    )


RUNNERS = {
    "sample": run_sample,
    "interfere": run_interfere,
    "pathsum": run_pathsum,
    "propagate": run_propagate,
    "converge": run_converge,
    "concentrate": run_concentrate,
    "fermat": run_fermat,
    "speedbound": run_speedbound,
}

_REQUIRED = {
    "sample": ["seed"],
    "interfere": [],
    "pathsum": ["t_b", "k", "r_min", "r_max", "m_sites", "i_a", "i_b", "mass"],
    "propagate": ["t_b", "k", "r_min", "r_max", "m_sites", "i_a", "i_b", "mass"],
    "converge": [],
    "concentrate": ["t_b", "k", "r_min", "r_max", "m_sites", "i_a", "i_b", "mass"],
    "fermat": ["v1", "v2"],
    "speedbound": ["v1", "v2", "seed"],
}


def validate(experiment: str, cfg: dict) -> list[str]:
    """Diagnostics that would make run() fail; empty list means runnable."""
    diags = []
    if experiment not in EXPERIMENTS:
        return [f"unknown experiment {experiment!r}"]
    for key in _REQUIRED[experiment]:
        if key not in cfg or cfg[key] == "":
            diags.append(f"missing required config field {key!r}")
    if diags:
        return diags
    try:
        if experiment in ("pathsum", "propagate", "concentrate"):
            tg, sg = _grids(cfg)
            _lagrangian(cfg)
            budget = _num(cfg, "max_paths", 2_000_000, cast=int)
            method = str(cfg.get("method", "transfer"))
            if experiment != "propagate" or method != "transfer":
                if sg.m_sites ** (tg.k - 1) > budget:
                    diags.append(
                        f"capacity: {sg.m_sites}^{tg.k - 1} paths exceed budget {budget}; "
                        "use the transfer method"
                    )
        elif experiment in ("fermat", "speedbound"):
            _fermat_geometry(cfg)
        elif experiment == "sample":
            MappingDistribution(_num(cfg, "r_lo", 0.0), _num(cfg, "r_hi", 1.0))
    except InvalidInputError as exc:
        diags.append(str(exc))
    return diags


def run(experiment: str, cfg: dict, out_path: Path, fmt: str) -> int:
    diags = validate(experiment, cfg)
    capacity = [d for d in diags if d.startswith("capacity")]
    if capacity:
        for d in capacity:
            print(f"error: {d}", file=sys.stderr)
        return EXIT_CAPACITY
    if diags:
        for d in diags:
            print(f"error: {d}", file=sys.stderr)
        return EXIT_VALIDATION
    t0 = time.perf_counter()
    try:
        header, rows = RUNNERS[experiment](cfg)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (InvalidInputError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    elapsed = time.perf_counter() - t0
    write_rows(out_path, header, rows, fmt)
    write_manifest(out_path, experiment, cfg, elapsed)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="windlab", description="lattice path-sum experiment harness"
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--seed", type=int, help="RNG seed (overrides config)")
    parser.add_argument("--out", default="out.csv", help="artifact path")
    parser.add_argument("--format", choices=["csv", "json"], default="csv")
    parser.add_argument("--threads", type=int, default=1, help="reserved; serial is canonical")
    parser.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override any config field (repeatable)",
    )
    parser.add_argument("--validate-only", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = {}
    try:
        if args.config:
            cfg.update(read_config_file(args.config))
        for item in args.set:
            if "=" not in item:
                raise InvalidInputError(f"bad --set item {item!r}")
            key, val = item.split("=", 1)
            cfg[key.strip()] = val.strip()
        if args.seed is not None:
            cfg["seed"] = str(args.seed)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.validate_only:
        diags = validate(args.experiment, cfg)
        for d in diags:
            print(d)
        return EXIT_OK if not diags else (
            EXIT_CAPACITY if any(d.startswith("capacity") for d in diags) else EXIT_VALIDATION
        )
    return run(args.experiment, cfg, Path(args.out), args.format)


if __name__ == "__main__":
    sys.exit(main())
