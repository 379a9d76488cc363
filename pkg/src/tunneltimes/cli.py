"""Command-line interface: single, profile, figures, check.

Exit codes: 0 success, 2 config error, 3 numerical non-convergence,
4 invariant failure (check).  All CSV output uses 9-significant-digit
scientific notation with unit-suffixed column names; identical configs
produce byte-identical files.
"""

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import checks, sweeps
from .config import ScenarioConfig, parse_config_file
from .errors import ConfigError, TunnelTimesError
from .packet import PacketSpec
from .scatter import ELECTRON, BarrierSpec

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NOT_CONVERGED = 3
EXIT_INVARIANT = 4


def quantize(x: float) -> float:
    """Round to the 9 significant digits the CSV carries."""
    return float(f"{x:.8e}")


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.8e}"
    return str(value)


def write_rows_text(rows) -> str:
    header = list(rows[0].keys())
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format(row[key]) for key in header))
    return "\n".join(lines) + "\n"


def _parse_cell(cell: str):
    if cell == "true":
        return True
    if cell == "false":
        return False
    try:
        return int(cell)
    except ValueError:
        pass
    return float(cell)


def parse_rows(text: str):
    lines = [line for line in text.splitlines() if line]
    header = lines[0].split(",")
    return [dict(zip(header, (_parse_cell(c) for c in line.split(","))))
            for line in lines[1:]]


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _single_row(cfg: ScenarioConfig, res: sweeps.SingleResult) -> dict:
    return {
        "v0_ev": quantize(cfg.v0_ev),
        "a_angstrom": quantize(cfg.a_angstrom),
        "ebar_ev": quantize(cfg.ebar_ev),
        "dk_inv_angstrom": quantize(cfg.dk_inv_angstrom),
        "tau_tun_s": quantize(res.tau_tun),
        "dtau_tun_s2": quantize(res.dtau_tun),
        "tau_r00_s": quantize(res.tau_r00),
        "dtau_r00_s2": quantize(res.dtau_r00),
        "dwell_flux_s": quantize(res.dwell_flux),
        "dwell_density_s": quantize(res.dwell_density),
        "phase_time_s": quantize(res.phase_time),
        "transmission_prob": quantize(res.transmission),
        "truncated_spectral_mass": quantize(res.truncated_mass),
        "refinement_level": res.level,
        "converged": res.converged,
    }


def _profile_rows(result: sweeps.ProfileResult):
    return [{
        "x_angstrom": quantize(p.x),
        "tau_pen_s": quantize(p.tau_pen),
        "dtau_pen_s2": quantize(p.dtau_pen),
        "tau_ret_s": quantize(p.tau_ret),
        "dtau_ret_s2": quantize(p.dtau_ret),
        "reliable_ret": p.reliable_ret,
        "refinement_level": p.level,
    } for p in result.points]


def cmd_single(cfg: ScenarioConfig, out_dir: Path, tol: float, max_levels: int) -> int:
    res = sweeps.single_scenario(cfg.barrier(), cfg.packet(), tol=tol,
                                 max_levels=max_levels, window=cfg.t_window_s)
    row = _single_row(cfg, res)
    text = write_rows_text([row])
    _write(out_dir / (cfg.output_path or "single.csv"), text)
    sys.stdout.write(text)
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def cmd_profile(cfg: ScenarioConfig, out_dir: Path, tol: float, max_levels: int) -> int:
    res = sweeps.profile_scenario(cfg.barrier(), cfg.packet(), n_x=cfg.n_x,
                                  tol=tol, max_levels=max_levels,
                                  window=cfg.t_window_s)
    text = write_rows_text(_profile_rows(res))
    _write(out_dir / (cfg.output_path or "profile.csv"), text)
    sys.stdout.write(text)
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def _run_curve(args):
    curve, tol, max_levels, n_x = args
    barrier = BarrierSpec(sweeps.PAPER_V0_EV, curve.a)
    pkt = PacketSpec(k_bar=float(ELECTRON.wavenumber(curve.ebar)), dk=curve.dk)
    return sweeps.profile_scenario(barrier, pkt, n_x=n_x, tol=tol,
                                   max_levels=max_levels)


def cmd_figures(out_dir: Path, tol: float, max_levels: int, jobs: int,
                n_x: int = 11) -> int:
    curve_list = [curve for fig in sweeps.ALL_FIGURES
                  for curve in sweeps.figure_curves(fig)]
    tasks = [(curve, tol, max_levels, n_x) for curve in curve_list]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_curve, tasks))
    else:
        results = [_run_curve(task) for task in tasks]
    by_curve = dict(zip(curve_list, results))

    all_converged = True
    manifest = []
    for fig in sweeps.ALL_FIGURES:
        curves = sweeps.figure_curves(fig)
        rows = []
        for i in range(n_x):
            row = {}
            for curve in curves:
                res = by_curve[curve]
                all_converged = all_converged and res.converged
                p = res.points[i]
                tag = f"c{curve.curve}"
                row[f"x_angstrom_{tag}"] = quantize(p.x)
                if curve.kind == "penetration":
                    row[f"tau_pen_s_{tag}"] = quantize(p.tau_pen)
                    row[f"dtau_pen_s2_{tag}"] = quantize(p.dtau_pen)
                else:
                    row[f"tau_ret_s_{tag}"] = quantize(p.tau_ret)
                    row[f"dtau_ret_s2_{tag}"] = quantize(p.dtau_ret)
                    row[f"reliable_ret_{tag}"] = p.reliable_ret
                row[f"refinement_level_{tag}"] = p.level
            rows.append(row)
        _write(out_dir / f"fig{fig}.csv", write_rows_text(rows))
        for curve in curves:
            manifest.append({
                "figure": fig, "curve": curve.curve, "kind": curve.kind,
                "v0_ev": quantize(sweeps.PAPER_V0_EV),
                "a_angstrom": quantize(curve.a),
                "ebar_ev": quantize(curve.ebar),
                "dk_inv_angstrom": quantize(curve.dk),
            })
    _write(out_dir / "figures_manifest.csv", write_rows_text(manifest))
    sys.stdout.write(f"wrote fig1..fig5 + manifest to {out_dir}\n")
    return EXIT_OK if all_converged else EXIT_NOT_CONVERGED


def cmd_check(out_dir: Path, tol: float, max_levels: int) -> int:
    results = checks.run_all(tol=tol, max_levels=max_levels)
    failed = 0
    for res in results:
        label = {"pass": "PASS", "fail": "FAIL", "not-converged": "SKIP"}[res.status]
        sys.stdout.write(f"[{label}] {res.module}/{res.invariant}: "
                         f"measured={res.measured:.3e} bound={res.bound:.3e}"
                         f"{'  ' + res.detail if res.detail else ''}\n")
        failed += res.status == "fail"
    _write(out_dir / "check_report.json",
           json.dumps([r.as_dict() for r in results], indent=2) + "\n")
    sys.stdout.write(f"{len(results) - failed}/{len(results)} invariants passed\n")
    return EXIT_OK if failed == 0 else EXIT_INVARIANT


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tunneltimes",
        description="Tunnelling-time statistics of Gaussian packets on a "
                    "rectangular barrier",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=False):
        if config:
            p.add_argument("--config", required=True, help="scenario config file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--tol", type=float, default=None,
                       help="refinement tolerance (default from config or 1e-3)")
        p.add_argument("--max-levels", type=int, default=8)
        p.add_argument("--jobs", type=int, default=1)

    common(sub.add_parser("single", help="summary durations for one scenario"),
           config=True)
    common(sub.add_parser("profile", help="penetration/return profile over [0, a]"),
           config=True)
    common(sub.add_parser("figures", help="CSV bundle for the reproduction lattice"))
    common(sub.add_parser("check", help="run the invariant suite"))
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    out_dir = Path(args.out)
    try:
        if args.command in ("single", "profile"):
            cfg = parse_config_file(args.config)
            tol = args.tol if args.tol is not None else cfg.tol
            if args.command == "single":
                return cmd_single(cfg, out_dir, tol, args.max_levels)
            return cmd_profile(cfg, out_dir, tol, args.max_levels)
        tol = args.tol if args.tol is not None else 1e-3
        if args.command == "figures":
            return cmd_figures(out_dir, tol, args.max_levels, args.jobs)
        return cmd_check(out_dir, tol, args.max_levels)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except TunnelTimesError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NOT_CONVERGED


if __name__ == "__main__":
    sys.exit(main())
