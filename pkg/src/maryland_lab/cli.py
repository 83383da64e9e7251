"""Command-line front end: model runs, scans, and oracle verification.

Subcommands
    qklr    stroboscopic kicked-rotator run: propagator block, per-kick
            trajectory, energy and tail-mass series, JSON summary
    dunlap  driven-lattice run: MSD series, J0 scan, propagator block
    scan    dynamic-localization scan over the field amplitude
    verify  closed-form vs oracle comparison suite; exit 0 iff all pass

Configuration is flat ``key=value`` text (# comments allowed); command
line flags override file values.  CSV columns are printed with 17
significant digits so round-trips are lossless, and identical configs
produce byte-identical outputs.  MARYLAND_LAB_THREADS caps the number of
verification checks run concurrently.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import zlib
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .bessel import bessel_j, bessel_j0_zero
from .bloch import DunlapParams, dunlap_propagator, localization_scan, msd, msd_closed_form
from .laurent import (
    LaurentOperator,
    WaveState,
    commutator_norm,
    exp_bidiagonal,
    exp_symbol,
)
from .oracle import (
    DimensionTooSmallError,
    compare_center_block,
    converged_trotter,
    trotter_evolve,
)
from .qklr import QklrParams, gamma_delta, mean_square_momentum, period_check, qklr_propagator
from .solver import evolve_state

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def _max_workers() -> int:
    env = os.environ.get("MARYLAND_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(4, os.cpu_count() or 1)


def read_config(path: str) -> dict[str, str]:
    """Parse flat key=value text; later keys win, # starts a comment."""
    out: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {raw!r}")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


# Value types for config-file parsing (tol_* keys are floats).
_CONFIG_TYPES = {
    "k": float, "tau": float, "p": int, "q": int, "kicks": int,
    "window": int, "dim": int, "T": float, "E": float, "periods": int,
    "emin": float, "emax": float, "tol": float, "seed": int,
    "out": str, "format": str,
}


def _coerce(key: str, val: str):
    typ = float if key.startswith("tol_") else _CONFIG_TYPES.get(key, str)
    return typ(val)


def resolve_config(args: argparse.Namespace, defaults: dict) -> dict:
    """defaults < config file < explicit CLI flags."""
    cfg = dict(defaults)
    if getattr(args, "config", None):
        file_cfg = read_config(args.config)
        for key, val in file_cfg.items():
            if key not in cfg:
                raise ValueError(f"unknown config key {key!r}")
            cfg[key] = _coerce(key, val)
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def write_table(out_dir: Path, name: str, fmt: str,
                header: list[str], rows: list[list[float]]) -> Path:
    if fmt == "json":
        path = out_dir / f"{name}.json"
        payload = {"columns": header,
                   "rows": [[_fmt(v) for v in row] for row in rows]}
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        path = out_dir / f"{name}.csv"
        lines = [",".join(header)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        path.write_text("\n".join(lines) + "\n")
    return path


def write_summary(out_dir: Path, summary: dict) -> Path:
    path = out_dir / "summary.json"
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return path


def _block_rows(block) -> list[list[float]]:
    rows = []
    for i, n in enumerate(block.sites):
        for j, m in enumerate(block.sites):
            e = block.entries[i, j]
            rows.append([float(n), float(m), e.real, e.imag])
    return rows


def _qklr_params(cfg: dict) -> QklrParams:
    if cfg["p"] is not None or cfg["q"] is not None:
        if cfg["p"] is None or cfg["q"] is None:
            raise ValueError("p and q must be given together")
        return QklrParams.rational(float(cfg["k"]), int(cfg["p"]),
                                   int(cfg["q"]))
    if cfg["tau"] is None:
        raise ValueError("either tau or p/q is required")
    return QklrParams(float(cfg["k"]), float(cfg["tau"]))


def cmd_qklr(args: argparse.Namespace) -> int:
    defaults = {"k": None, "tau": None, "p": None, "q": None, "kicks": 10,
                "window": 40, "dim": 256, "out": "qklr_out", "format": "csv"}
    cfg = resolve_config(args, defaults)
    if cfg["k"] is None:
        raise ValueError("kick strength --k is required")
    params = _qklr_params(cfg)
    n_kicks = int(cfg["kicks"])
    w = int(cfg["window"])
    out_dir = Path(cfg["out"])
    out_dir.mkdir(parents=True, exist_ok=True)

    block = qklr_propagator(params, n_kicks, (-w, w), picture="schrodinger")
    write_table(out_dir, "propagator", cfg["format"],
                ["n", "m", "re", "im"], _block_rows(block))

    s = math.sin(0.5 * params.tau)
    if abs(s) > 1e-9:
        d_star = int(math.ceil(params.k / abs(s))) + 40
    else:
        d_star = int(math.ceil(n_kicks * params.k)) + 40

    psi0 = WaveState.delta(0)
    traj_rows: list[list[float]] = []
    energy_rows: list[list[float]] = []
    tail_rows: list[list[float]] = []
    per_kick = []
    drive = params.drive()
    big = 4 * (w + d_star)
    for n in range(n_kicks + 1):
        if n == 0:
            psi = psi0
            tail = 0.0
        else:
            psi = evolve_state(drive, psi0, n * params.tau, window=(-big, big))
            g, d = gamma_delta(params, n)
            tail = exp_bidiagonal(g, d).tail_mass(d_star)
            per_kick.append({"kicks": n, "gamma": g, "delta": d})
        for site, amp in zip(psi.sites, psi.amplitudes):
            if abs(amp) > 1e-300:
                traj_rows.append([float(n), float(site), amp.real, amp.imag])
        energy_rows.append([float(n), psi.mean_square_site()])
        tail_rows.append([float(n), float(tail)])
    write_table(out_dir, "trajectory", cfg["format"],
                ["kick", "site", "re_amplitude", "im_amplitude"], traj_rows)
    write_table(out_dir, "energy", cfg["format"],
                ["kick", "p_squared"], energy_rows)
    write_table(out_dir, "tailmass", cfg["format"],
                ["kick", f"mass_beyond_offset_{d_star}"], tail_rows)

    psi_final = evolve_state(drive, psi0, n_kicks * params.tau,
                             window=(-big, big))
    summary = {
        "model": "qklr",
        "version": __version__,
        "config": {k: cfg[k] for k in sorted(cfg) if k != "out"},
        "tail_offset": d_star,
        "per_kick": per_kick,
        "final_fidelity_vs_initial": psi0.fidelity(psi_final),
    }
    if params.q is not None:
        summary["period_kicks"] = params.q
        summary["fidelity_after_q_kicks"] = period_check(
            params.p, params.q, params.k)
    write_summary(out_dir, summary)
    return EXIT_OK


def cmd_dunlap(args: argparse.Namespace) -> int:
    defaults = {"T": None, "E": None, "periods": 5, "window": 40,
                "dim": 256, "emin": 0.0, "emax": 10.0, "tol": 1e-8,
                "out": "dunlap_out", "format": "csv"}
    cfg = resolve_config(args, defaults)
    if cfg["T"] is None or cfg["E"] is None:
        raise ValueError("both --T and --E are required")
    params = DunlapParams(float(cfg["T"]), float(cfg["E"]))
    n_periods = int(cfg["periods"])
    w = int(cfg["window"])
    out_dir = Path(cfg["out"])
    out_dir.mkdir(parents=True, exist_ok=True)

    block = dunlap_propagator(params, n_periods, (-w, w))
    write_table(out_dir, "propagator", cfg["format"],
                ["n", "m", "re", "im"], _block_rows(block))

    msd_rows = [[float(n), msd(params, n), msd_closed_form(params, n)]
                for n in range(1, n_periods + 1)]
    write_table(out_dir, "msd", cfg["format"],
                ["periods", "msd_bessel_sum", "msd_closed_form"], msd_rows)

    e_grid = np.linspace(float(cfg["emin"]), float(cfg["emax"]), 401)
    scan_rows = [[float(e), bessel_j(0, float(e))] for e in e_grid]
    write_table(out_dir, "scan", cfg["format"], ["E", "j0"], scan_rows)
    roots = localization_scan(float(cfg["emin"]), float(cfg["emax"]),
                              float(cfg["tol"]))

    summary = {
        "model": "dunlap",
        "version": __version__,
        "config": {k: cfg[k] for k in sorted(cfg) if k != "out"},
        "bessel_argument": 4.0 * math.pi * n_periods * params.coupling
        * bessel_j(0, params.field),
        "localization_fields": roots,
    }
    write_summary(out_dir, summary)
    return EXIT_OK


def cmd_scan(args: argparse.Namespace) -> int:
    defaults = {"emin": 0.0, "emax": 10.0, "tol": 1e-8,
                "out": "scan_out", "format": "csv"}
    cfg = resolve_config(args, defaults)
    out_dir = Path(cfg["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    e_grid = np.linspace(float(cfg["emin"]), float(cfg["emax"]), 801)
    chunks = np.array_split(e_grid, _max_workers())
    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        parts = list(pool.map(
            lambda c: [[float(e), bessel_j(0, float(e))] for e in c], chunks))
    rows = [row for part in parts for row in part]
    write_table(out_dir, "scan", cfg["format"], ["E", "j0"], rows)
    roots = localization_scan(float(cfg["emin"]), float(cfg["emax"]),
                              float(cfg["tol"]))
    write_table(out_dir, "roots", cfg["format"], ["index", "E_root", "j0_at_root"],
                [[float(i + 1), r, bessel_j(0, r)] for i, r in enumerate(roots)])
    write_summary(out_dir, {
        "model": "scan",
        "version": __version__,
        "config": {k: cfg[k] for k in sorted(cfg) if k != "out"},
        "localization_fields": roots,
    })
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def _random_hermitian(rng, bandwidth: int) -> LaurentOperator:
    coeffs = {0: complex(rng.normal())}
    for k in range(1, bandwidth + 1):
        c = complex(rng.normal(), rng.normal())
        coeffs[k] = c
        coeffs[-k] = np.conj(c)
    return LaurentOperator(coeffs)


def _check_commutativity(cfg, rng):
    worst = 0.0
    for _ in range(50):
        a = _random_hermitian(rng, int(rng.integers(1, 5)))
        b = _random_hermitian(rng, int(rng.integers(1, 5)))
        worst = max(worst, commutator_norm(a, b))
    return worst


def _check_bessel_exponential(cfg, rng):
    from scipy.linalg import expm

    dim = int(cfg["dim"])
    worst = 0.0
    for _ in range(6):
        gamma = float(rng.uniform(0.0, 20.0))
        delta = float(rng.uniform(0.0, 2.0 * math.pi))
        u = exp_bidiagonal(gamma, delta)
        g = gamma * np.exp(1j * delta)
        md = np.zeros((dim, dim), dtype=complex)
        idx = np.arange(dim - 1)
        md[idx + 1, idx] = g
        md[idx, idx + 1] = np.conj(g)
        dense = expm(-1j * md)
        w = dim // 2 - 60
        blk = u.dense_block((-w, w - 1))
        c = dim // 2
        worst = max(worst, float(np.abs(
            blk - dense[c - w: c + w, c - w: c + w]).max()))
        other = exp_symbol(LaurentOperator({1: g, -1: np.conj(g)}))
        bmax = max(u.bandwidth, other.bandwidth)
        worst_pair = max(abs(u.coeff(k) - other.coeff(k))
                         for k in range(-bmax, bmax + 1))
        worst = max(worst, float(worst_pair) * 1e2)  # 1e-10 budget vs 1e-8
    return worst


def _check_qklr_oracle(cfg, rng):
    dim = int(cfg["dim"])
    worst = 0.0
    for _ in range(5):
        k = float(rng.uniform(0.2, 3.0))
        tau = float(rng.uniform(0.3, 2.0 * math.pi - 0.3))
        n_kicks = int(rng.integers(1, 21))
        params = QklrParams(k, tau)
        w = dim // 2 - 61
        block = qklr_propagator(params, n_kicks, (-w, w))
        orc = trotter_evolve(params.drive(), n_kicks * tau, 1, dim=dim)
        worst = max(worst, compare_center_block(block, orc, margin=60))
    return worst


def _check_periodicity(cfg, rng):
    worst = 0.0
    for p, q in ((1, 2), (2, 5)):
        worst = max(worst, abs(1.0 - period_check(p, q, 1.5)))
    return worst


def _check_dunlap_oracle(cfg, rng):
    dim = int(cfg["dim"])
    worst = 0.0
    for coupling, field, n in ((1.0, 1.0, 2), (0.7, 3.5, 3)):
        params = DunlapParams(coupling, field)
        block = dunlap_propagator(params, n, (-30, 30))
        orc = converged_trotter(params.drive(), 2.0 * math.pi * n, dim=dim,
                                start_steps=128, tol=4e-6, method="split4",
                                columns=(-30, 30))
        worst = max(worst, compare_center_block(block, orc, margin=60))
    return worst


def _check_dynamic_localization(cfg, rng):
    field = bessel_j0_zero(1)
    psi0 = WaveState.delta(0)
    psi = evolve_state(DunlapParams(1.0, field).drive(), psi0,
                       2.0 * math.pi * 20, window=(-200, 200))
    return abs(1.0 - psi0.fidelity(psi))


def _check_msd_identity(cfg, rng):
    worst = 0.0
    for _ in range(5):
        params = DunlapParams(float(rng.uniform(0.1, 2.0)),
                              float(rng.uniform(0.0, 8.0)))
        n = int(rng.integers(1, 8))
        closed = msd_closed_form(params, n)
        if closed < 1e-12:
            continue
        worst = max(worst, abs(msd(params, n) - closed) / closed)
    return worst


def _check_resonance_growth(cfg, rng):
    params = QklrParams.rational(1.0, 1, 1)
    worst = 0.0
    for n in (1, 10, 50):
        exact = 0.5 * (n * params.k) ** 2
        worst = max(worst, abs(mean_square_momentum(params, n) - exact) / exact)
    return worst


_VERIFY_CHECKS = [
    ("laurent_commutativity", _check_commutativity, 1e-13),
    ("bessel_exponential", _check_bessel_exponential, 1e-8),
    ("qklr_oracle", _check_qklr_oracle, 1e-6),
    ("qklr_periodicity", _check_periodicity, 1e-9),
    ("dunlap_oracle", _check_dunlap_oracle, 1e-5),
    ("dynamic_localization", _check_dynamic_localization, 1e-9),
    ("msd_identity", _check_msd_identity, 1e-8),
    ("resonance_growth", _check_resonance_growth, 1e-8),
]


def cmd_verify(args: argparse.Namespace) -> int:
    defaults = {"dim": 256, "seed": 12345, "out": "verify_out",
                "format": "csv"}
    defaults.update({f"tol_{name}": tol for name, _, tol in _VERIFY_CHECKS})
    cfg = resolve_config(args, defaults)
    out_dir = Path(cfg["out"])
    out_dir.mkdir(parents=True, exist_ok=True)

    def run_one(item):
        name, func, _ = item
        rng = np.random.default_rng([int(cfg["seed"]),
                                     zlib.crc32(name.encode())])
        tol = float(cfg[f"tol_{name}"])
        try:
            err = float(func(cfg, rng))
            return {"check": name, "max_error": err, "tolerance": tol,
                    "passed": err < tol}
        except (DimensionTooSmallError, ValueError) as exc:
            return {"check": name, "error": f"{type(exc).__name__}: {exc}",
                    "tolerance": tol, "passed": False}

    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        results = list(pool.map(run_one, _VERIFY_CHECKS))

    all_passed = all(r["passed"] for r in results)
    report = {
        "version": __version__,
        "config": {k: cfg[k] for k in sorted(cfg) if k != "out"},
        "checks": results,
        "all_passed": all_passed,
    }
    (out_dir / "report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n")
    for r in results:
        status = "PASS" if r["passed"] else "FAIL"
        detail = (f"max_error={_fmt(r['max_error'])}" if "max_error" in r
                  else r["error"])
        print(f"{status} {r['check']}: {detail} (tol={r['tolerance']:g})")
    return EXIT_OK if all_passed else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maryland-lab",
        description="Exact propagators for linear Toeplitz Hamiltonians, "
                    "with a brute-force verification oracle.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--format", choices=("csv", "json"),
                       help="data file format (default csv)")

    p = sub.add_parser("qklr", help="kicked linear rotator run")
    common(p)
    p.add_argument("--k", type=float, help="kick strength")
    p.add_argument("--tau", type=float, help="kick period")
    p.add_argument("--p", type=int, help="numerator of tau/2pi")
    p.add_argument("--q", type=int, help="denominator of tau/2pi")
    p.add_argument("--kicks", type=int, help="number of kicks")
    p.add_argument("--window", type=int, help="half-width of the site window")
    p.add_argument("--dim", type=int, help="oracle truncation dimension")
    p.set_defaults(func=cmd_qklr)

    p = sub.add_parser("dunlap", help="driven Bloch lattice run")
    common(p)
    p.add_argument("--T", type=float, help="nearest-neighbor coupling")
    p.add_argument("--E", type=float, help="field amplitude")
    p.add_argument("--periods", type=int, help="number of drive periods")
    p.add_argument("--window", type=int, help="half-width of the site window")
    p.add_argument("--dim", type=int, help="oracle truncation dimension")
    p.add_argument("--emin", type=float, help="scan range lower bound")
    p.add_argument("--emax", type=float, help="scan range upper bound")
    p.add_argument("--tol", type=float, help="|J0| threshold for roots")
    p.set_defaults(func=cmd_dunlap)

    p = sub.add_parser("scan", help="dynamic-localization scan over E")
    common(p)
    p.add_argument("--emin", type=float, help="scan range lower bound")
    p.add_argument("--emax", type=float, help="scan range upper bound")
    p.add_argument("--tol", type=float, help="|J0| threshold for roots")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("verify", help="closed-form vs oracle check suite")
    common(p)
    p.add_argument("--dim", type=int, help="oracle truncation dimension")
    p.add_argument("--seed", type=int, help="RNG seed for random draws")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
