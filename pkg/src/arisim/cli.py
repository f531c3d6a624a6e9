"""Command-line front end: single runs, parameter sweeps, oracle comparison.

Configuration is flat ``key=value`` text mirroring the reference parameter
table; every key has a default, unknown keys warn and are skipped, and a
malformed line aborts with a file:line message. All outputs embed the seed
so any artifact can be regenerated byte-for-byte.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .channel import AntennaPattern
from .geometry import Vec2
from .plotting import plot_sweep
from .scenario import (
    BENCHMARK_KINDS,
    SWEEP_AXES,
    ScenarioConfig,
    SweepSpec,
    _derive_seed,
    exhaustive_oracle,
    generate_scenario,
    monte_carlo,
    run_proposed,
)
from .units import watts_to_dbm

SWEEP_CSV_HEADER = "axis,value,method,mean_dbm,median_dbm,fullarray_rate,feasible_rate,trials,seed"
ALL_METHODS = ("proposed",) + BENCHMARK_KINDS

_INT_KEYS = {"n_elements", "n_antennas", "l_max", "m0", "n_users", "trials", "seed"}
_FLOAT_KEYS = {
    "region_side", "center_x", "center_y", "element_spacing_norm",
    "antenna_spacing_norm", "altitude", "backhaul_bandwidth",
    "fronthaul_bandwidth", "backhaul_frequency", "fronthaul_frequency",
    "p_max", "g_max", "sla_v", "a_max", "theta_hpbw", "phi_hpbw", "delta",
    "hotspot_std", "hotspot_offset_min", "hotspot_offset_max",
    "hotspot_along_band", "uav_altitude_min", "uav_altitude_max",
    "uav_altitude_jitter", "fronthaul_tx_power_dbm", "nlos_exponent",
    "nlos_excess_db",
}


class ConfigError(Exception):
    pass


def parse_config_text(text: str, origin: str = "<config>") -> dict:
    """Flat key=value parser; '#' comments and blank lines are skipped."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: malformed line (expected key=value): {raw.strip()!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _INT_KEYS and key not in _FLOAT_KEYS:
            print(f"warning: {origin}:{lineno}: unknown key {key!r} ignored", file=sys.stderr)
            continue
        try:
            values[key] = int(value) if key in _INT_KEYS else float(value)
        except ValueError:
            raise ConfigError(f"{origin}:{lineno}: cannot parse value for {key!r}: {value!r}") from None
    return values


def build_config(values: dict) -> tuple[ScenarioConfig, int, int]:
    """Scenario config plus (trials, seed) from parsed key=value pairs."""
    trials = int(values.get("trials", 100))
    seed = int(values.get("seed", 1))
    defaults = ScenarioConfig()
    pattern = AntennaPattern(
        g_max_db=values.get("g_max", 8.0),
        sla_v_db=values.get("sla_v", 30.0),
        a_max_db=values.get("a_max", 30.0),
        theta_hpbw_deg=values.get("theta_hpbw", 65.0),
        phi_hpbw_deg=values.get("phi_hpbw", 65.0),
    )
    cfg = ScenarioConfig(
        region_side=values.get("region_side", defaults.region_side),
        center=Vec2(
            values.get("center_x", defaults.center.x),
            values.get("center_y", defaults.center.y),
        ),
        n_elements=values.get("n_elements", defaults.n_elements),
        element_spacing_norm=values.get("element_spacing_norm", defaults.element_spacing_norm),
        n_antennas=values.get("n_antennas", defaults.n_antennas),
        antenna_spacing_norm=values.get("antenna_spacing_norm", defaults.antenna_spacing_norm),
        ris_altitude=values.get("altitude", defaults.ris_altitude),
        backhaul_bandwidth_hz=values.get("backhaul_bandwidth", defaults.backhaul_bandwidth_hz),
        fronthaul_bandwidth_hz=values.get("fronthaul_bandwidth", defaults.fronthaul_bandwidth_hz),
        backhaul_frequency_ghz=values.get("backhaul_frequency", defaults.backhaul_frequency_ghz),
        fronthaul_frequency_ghz=values.get("fronthaul_frequency", defaults.fronthaul_frequency_ghz),
        p_max_dbw=values.get("p_max", defaults.p_max_dbw),
        pattern=pattern,
        l_max=values.get("l_max", defaults.l_max),
        delta=values.get("delta", defaults.delta),
        m0=values.get("m0", defaults.m0),
        n_users=values.get("n_users", defaults.n_users),
        hotspot_std=values.get("hotspot_std", defaults.hotspot_std),
        hotspot_offset=(
            values.get("hotspot_offset_min", defaults.hotspot_offset[0]),
            values.get("hotspot_offset_max", defaults.hotspot_offset[1]),
        ),
        hotspot_along_band=values.get("hotspot_along_band", defaults.hotspot_along_band),
        uav_altitude_band=(
            values.get("uav_altitude_min", defaults.uav_altitude_band[0]),
            values.get("uav_altitude_max", defaults.uav_altitude_band[1]),
        ),
        uav_altitude_jitter=values.get("uav_altitude_jitter", defaults.uav_altitude_jitter),
        fronthaul_tx_power_dbm=values.get("fronthaul_tx_power_dbm", defaults.fronthaul_tx_power_dbm),
        nlos_exponent=values.get("nlos_exponent", defaults.nlos_exponent),
        nlos_excess_db=values.get("nlos_excess_db", defaults.nlos_excess_db),
    )
    return cfg, trials, seed


def load_config(path: str | None) -> tuple[ScenarioConfig, int, int]:
    if path is None:
        return build_config({})
    text = Path(path).read_text(encoding="utf-8")
    return build_config(parse_config_text(text, origin=str(path)))


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def cmd_run(cfg: ScenarioConfig, seed: int, out_dir: Path) -> int:
    scenario = generate_scenario(cfg, seed)
    setup, plan, solution = run_proposed(scenario)

    record = {
        "seed": seed,
        "config": dataclasses.asdict(cfg),
        "placement": {
            "q": [setup.position.x, setup.position.y],
            "altitude": setup.position.z,
            "per_uav_points": [[p.x, p.y] for p in setup.placement_points],
        },
        "plan": {
            "mode": plan.mode,
            "dev_max": plan.dev_max,
            "n_partitions": plan.n_partitions if not plan.is_full else 1,
            "sizes": plan.sizes_integer if not plan.is_full else [plan.n_elements],
            "subsets": plan.subsets() if not plan.is_full else [list(range(len(scenario.uavs)))],
            "align_points": (
                [[a.x, a.y, a.z] for a in plan.align_points]
                if not plan.is_full
                else [[plan.align_point.x, plan.align_point.y, plan.align_point.z]]
            ),
        },
        "phases_rad": [float(p) for p in setup.profile.phases],
        "per_uav": [
            {
                "position": [u.position.x, u.position.y, u.position.z],
                "throughput_bps": u.throughput_bps,
                "power_w": float(solution.per_uav_power_w[m]),
                "power_dbm": watts_to_dbm(float(solution.per_uav_power_w[m])),
                "deviation": float(solution.final_deviations[m]),
            }
            for m, u in enumerate(scenario.uavs)
        ],
        "total_w": solution.total_w,
        "total_dbm": watts_to_dbm(solution.total_w),
        "feasible": solution.feasible,
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"run_seed{seed}.json"
    out_path.write_text(json.dumps(record, indent=2) + "\n", encoding="utf-8")

    print(f"seed {seed}: {len(scenario.uavs)} UAVs, array mode {plan.mode}")
    print(f"  placement q* = ({setup.position.x:.2f}, {setup.position.y:.2f}) m at H = {setup.position.z:.0f} m")
    print(f"  total power  = {record['total_dbm']:.2f} dBm ({record['total_w']:.4g} W), feasible: {solution.feasible}")
    print(f"  record written to {out_path}")
    return 0


def sweep_rows_to_csv(rows: list[dict]) -> str:
    lines = [SWEEP_CSV_HEADER]
    for r in sorted(rows, key=lambda r: (r["value"], r["method"])):
        full = "" if r["fullarray_rate"] is None else f"{r['fullarray_rate']:.4f}"
        lines.append(
            ",".join(
                [
                    r["axis"],
                    _fmt(r["value"]),
                    r["method"],
                    f"{r['mean_dbm']:.4f}",
                    f"{r['median_dbm']:.4f}",
                    full,
                    f"{r['feasible_rate']:.4f}",
                    str(r["trials"]),
                    str(r["seed"]),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def cmd_sweep(
    cfg: ScenarioConfig, seed: int, trials: int, axis: str, values: list[float],
    methods: list[str], out_dir: Path,
) -> int:
    spec = SweepSpec(
        swept_parameter=axis, values=tuple(values), trials=trials, seed=seed, config=cfg
    )
    rows = monte_carlo(spec, methods=methods)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"sweep_{axis}.csv"
    csv_path.write_text(sweep_rows_to_csv(rows), encoding="utf-8")
    fig_path = plot_sweep(rows, out_dir / f"sweep_{axis}.svg")
    print(f"sweep over {axis}: {len(values)} values x {trials} trials, methods: {', '.join(methods)}")
    print(f"  CSV:    {csv_path}")
    print(f"  figure: {fig_path}")
    return 0


def cmd_oracle(cfg: ScenarioConfig, seed: int, trials: int, resolution: int, out_dir: Path) -> int:
    if cfg.m0 > 8:
        print(
            f"error: oracle comparison needs a small fleet (m0 <= 8, got {cfg.m0}); "
            "set m0 in the config",
            file=sys.stderr,
        )
        return 2
    lines = ["seed,proposed_dbm,oracle_dbm,gap_pct"]
    gaps = []
    for trial in range(trials):
        sub_seed = _derive_seed(seed, trial)
        scenario = generate_scenario(cfg, sub_seed)
        _, _, proposed = run_proposed(scenario)
        oracle = exhaustive_oracle(scenario, grid_resolution=resolution)
        gap = (proposed.total_w - oracle.total_w) / oracle.total_w * 100.0
        gaps.append(gap)
        lines.append(
            f"{sub_seed},{watts_to_dbm(proposed.total_w):.4f},"
            f"{watts_to_dbm(oracle.total_w):.4f},{gap:.4f}"
        )
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "oracle.csv"
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"oracle comparison over {trials} scenarios (grid {resolution} per axis)")
    print(f"  median gap: {np.median(gaps):+.3f}%  (negative means the grid lost)")
    print(f"  CSV: {out_path}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arisim",
        description="Aerial reflecting-surface backhaul setup simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", nargs="?", default=None, help="key=value config file")
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--trials", type=int, default=None, help="trial count override")
        p.add_argument("--out", default="arisim_out", help="output directory")

    p_run = sub.add_parser("run", help="solve one seeded scenario")
    common(p_run)

    p_sweep = sub.add_parser("sweep", help="parameter sweep to CSV + figure")
    common(p_sweep)
    p_sweep.add_argument("--axis", required=True, choices=SWEEP_AXES)
    p_sweep.add_argument("--values", required=True, help="comma-separated sweep values")
    p_sweep.add_argument(
        "--methods",
        default=",".join(ALL_METHODS),
        help="comma-separated subset of: " + ", ".join(ALL_METHODS),
    )

    p_oracle = sub.add_parser("oracle", help="proposed vs exhaustive grid search")
    common(p_oracle)
    p_oracle.add_argument("--resolution", type=int, default=21, help="grid points per axis")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg, trials, seed = load_config(args.config)
    except FileNotFoundError as exc:
        print(f"error: config file not found: {exc.filename}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        seed = args.seed
    if args.trials is not None:
        trials = args.trials
    out_dir = Path(args.out)

    try:
        if args.command == "run":
            return cmd_run(cfg, seed, out_dir)
        if args.command == "sweep":
            values = [float(v) for v in args.values.split(",") if v.strip()]
            if not values:
                print("error: --values must list at least one number", file=sys.stderr)
                return 2
            methods = [m.strip() for m in args.methods.split(",") if m.strip()]
            unknown = [m for m in methods if m not in ALL_METHODS]
            if unknown:
                print(f"error: unknown methods {unknown}; choose from {ALL_METHODS}", file=sys.stderr)
                return 2
            return cmd_sweep(cfg, seed, trials, args.axis, values, methods, out_dir)
        if args.command == "oracle":
            return cmd_oracle(cfg, seed, trials, args.resolution, out_dir)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
