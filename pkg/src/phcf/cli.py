"""Command-line front end: presets, runs, ensembles, spectra, stability maps.

Every output is deterministic: CSV floats use shortest round-trip
formatting, the manifest records every parameter a run consumed, and a
manifest replayed as a scenario reproduces the run byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InvalidInputError, NumericalBlowupError, UnsupportedOperationError
from .model import ClosedLoop, build_matrices
from .scenario import (
    Scenario,
    format_manifest,
    load_scenario,
    preset,
    format_scenario,
    with_seed,
    with_svg,
)
from .sde import TimeSeries, run_ensemble, simulate
from .spectral import (
    dense_eigen_oracle,
    eigenvalues,
    match_distances,
    spectral_abscissa_nonzero,
    stability_report,
)
from .stats import observables
from .svgplot import observables_svg, spectrum_svg, stability_map_svg, trajectory_svg

_SWEEPABLE = ("alpha", "beta", "gamma", "t_gap")


def _num(x) -> str:
    return repr(float(x))


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _trajectory_rows(ts: TimeSeries, wrap: bool):
    q = ts.positions()
    if wrap:
        q = np.mod(q, ts.params.ring_length)
    p = ts.speeds()
    for i, t in enumerate(ts.times):
        yield [_num(t)] + [_num(v) for v in q[i]] + [_num(v) for v in p[i]]


def _observable_rows(obs):
    for i, t in enumerate(obs.times):
        yield [
            _num(t),
            _num(obs.mean_speed[i]),
            _num(obs.speed_variance[i]),
            _num(obs.single_vehicle_speed[i]),
            _num(obs.hamiltonian[i]),
        ]


def _stability_info(scenario: Scenario) -> dict:
    """Spectral metadata recorded in every manifest; the gap-feedback
    regime additionally gets a stability verdict."""
    params = scenario.params
    spectrum = eigenvalues(params)
    b = build_matrices(params).b_drift
    abscissa = spectral_abscissa_nonzero(spectrum.values, float(np.linalg.norm(b)))
    info = {"spectral_abscissa": abscissa}
    if isinstance(params.regime, ClosedLoop):
        report = stability_report(
            params.n_vehicles, params.alpha, params.beta, params.gamma, params.regime.t_gap
        )
        if report.marginal:
            verdict = "marginal"
        else:
            verdict = "stable" if report.exact_stable else "unstable"
        info["exact_stable"] = report.exact_stable
        info["sufficient_lhs"] = report.sufficient_lhs
        info["stability_verdict"] = verdict
    return info


# ---------------------------------------------------------------------------
# commands


def cmd_simulate(scenario: Scenario, out_dir) -> int:
    """Run one trajectory; write trajectory.csv, observables.csv,
    run_manifest.txt and (optionally) the two SVG panels.

    Returns 0, or 3 when the run blew up (partial output is still
    written and the manifest carries the blowup flag).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    blowup = None
    try:
        ts = simulate(scenario.params, scenario.potential, scenario.config)
    except NumericalBlowupError as exc:
        ts = exc.partial
        blowup = exc

    wrap = scenario.output.wrap_positions
    n = scenario.params.n_vehicles
    header = ["t"] + [f"q{i+1}" for i in range(n)] + [f"p{i+1}" for i in range(n)]
    _write_csv(out / "trajectory.csv", header, _trajectory_rows(ts, wrap))
    obs = observables(ts)
    _write_csv(
        out / "observables.csv",
        ["t", "mean_speed", "speed_variance", "p1", "hamiltonian"],
        _observable_rows(obs),
    )
    if scenario.output.svg and len(ts.times) > 1:
        _write_text(
            out / "trajectory.svg",
            trajectory_svg(ts.times, ts.positions(), scenario.params.ring_length, wrap=wrap),
        )
        _write_text(
            out / "observables.svg",
            observables_svg(obs.times, obs.mean_speed, obs.speed_variance, obs.single_vehicle_speed),
        )

    info = {
        "tool_version": __version__,
        "command": "simulate",
        "overtake": ts.overtake_flag,
        "blowup": blowup is not None,
    }
    if blowup is not None:
        info["blowup_time"] = blowup.time
    info.update(_stability_info(scenario))
    _write_text(out / "run_manifest.txt", format_manifest(scenario, info))
    return 0 if blowup is None else 3


def cmd_ensemble(scenario: Scenario, out_dir, n_runs: int) -> int:
    """Run an ensemble; write per-run observables CSVs, a cross-run
    summary (time, moments of the mean speed, mean variance) and the
    manifest.  Returns 0, or 3 if any member blew up."""
    if n_runs < 1:
        raise InvalidInputError(f"n_runs must be >= 1, got {n_runs}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    runs = run_ensemble(scenario.params, scenario.potential, scenario.config, n_runs)
    all_obs = [observables(ts) for ts in runs]
    for r, obs in enumerate(all_obs):
        _write_csv(
            out / f"observables_run{r:03d}.csv",
            ["t", "mean_speed", "speed_variance", "p1", "hamiltonian"],
            _observable_rows(obs),
        )
    common = min(len(obs.times) for obs in all_obs)
    mean_speeds = np.stack([obs.mean_speed[:common] for obs in all_obs])
    variances = np.stack([obs.speed_variance[:common] for obs in all_obs])
    times = all_obs[0].times[:common]
    rows = (
        [
            _num(times[i]),
            _num(mean_speeds[:, i].mean()),
            _num(mean_speeds[:, i].var(ddof=1) if n_runs > 1 else 0.0),
            _num(variances[:, i].mean()),
        ]
        for i in range(common)
    )
    _write_csv(
        out / "ensemble_summary.csv",
        ["t", "mean_of_mean_speed", "var_of_mean_speed", "mean_speed_variance"],
        rows,
    )
    blown = [r for r, ts in enumerate(runs) if ts.blowup_step is not None]
    scenario = replace(scenario, n_runs=n_runs)
    info = {
        "tool_version": __version__,
        "command": "ensemble",
        "blowup": bool(blown),
    }
    if blown:
        info["blown_runs"] = ",".join(str(r) for r in blown)
    info.update(_stability_info(scenario))
    _write_text(out / "run_manifest.txt", format_manifest(scenario, info))
    return 3 if blown else 0


def cmd_spectrum(scenario: Scenario, out_dir) -> int:
    """Write the closed-form spectrum with its dense-oracle deviation per
    eigenvalue, plus a complex-plane scatter."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    spectrum = eigenvalues(scenario.params)
    oracle = dense_eigen_oracle(build_matrices(scenario.params).b_drift)
    diffs = match_distances(spectrum.values, oracle)
    rows = [
        [str(mode.j), str(mode.k), _num(lam.real), _num(lam.imag), _num(diffs[i])]
        for i, (mode, lam) in enumerate(spectrum.entries)
    ]
    _write_csv(out / "spectrum.csv", ["j", "k", "re_lambda", "im_lambda", "oracle_abs_diff"], rows)
    if scenario.output.svg:
        _write_text(out / "spectrum.svg", spectrum_svg(spectrum.values))
    info = {"tool_version": __version__, "command": "spectrum"}
    info.update(_stability_info(scenario))
    _write_text(out / "run_manifest.txt", format_manifest(scenario, info))
    return 0


def parse_vary(spec: str):
    """Parse a sweep axis 'name=start:stop:count'."""
    try:
        name, rng = spec.split("=", 1)
        start, stop, count = rng.split(":")
        name = name.strip()
        values = np.linspace(float(start), float(stop), int(count))
    except ValueError as exc:
        raise InvalidInputError(f"bad sweep spec {spec!r}; expected name=start:stop:count") from exc
    if name not in _SWEEPABLE:
        raise InvalidInputError(f"cannot sweep {name!r}; choose from {', '.join(_SWEEPABLE)}")
    if len(values) < 1:
        raise InvalidInputError("sweep needs at least one value")
    return name, values


def cmd_stability_map(scenario: Scenario, vary, out_dir) -> int:
    """Evaluate exact and sufficient stability over a 2-parameter grid.

    The base point comes from the scenario, which must use gap feedback.
    Any grid cell with sufficient_stable and not exact_stable aborts with
    diagnostics (the sufficient region must sit inside the exact one).
    """
    params = scenario.params
    if not isinstance(params.regime, ClosedLoop):
        raise InvalidInputError("stability maps need a closed_loop scenario")
    if len(vary) != 2:
        raise InvalidInputError("exactly two --vary axes are required")
    (name1, values1), (name2, values2) = vary
    if name1 == name2:
        raise InvalidInputError("the two sweep axes must differ")

    base = {
        "alpha": params.alpha,
        "beta": params.beta,
        "gamma": params.gamma,
        "t_gap": params.regime.t_gap,
    }
    n = params.n_vehicles
    rows = []
    exact = np.zeros((len(values1), len(values2)), dtype=bool)
    suff = np.zeros_like(exact)
    violations = []
    for i, v1 in enumerate(values1):
        for j, v2 in enumerate(values2):
            point = dict(base)
            point[name1] = float(v1)
            point[name2] = float(v2)
            report = stability_report(n, point["alpha"], point["beta"], point["gamma"], point["t_gap"])
            exact[i, j] = report.exact_stable
            suff[i, j] = report.sufficient_stable
            if report.sufficient_stable and not report.exact_stable:
                violations.append((v1, v2))
            rows.append(
                [
                    _num(v1),
                    _num(v2),
                    str(int(report.exact_stable)),
                    str(int(report.sufficient_stable)),
                    _num(report.spectral_abscissa_nonzero),
                ]
            )
    if violations:
        print(
            f"containment violated: sufficient-but-not-exact at {len(violations)} cells, "
            f"first at {name1}={violations[0][0]:g}, {name2}={violations[0][1]:g}",
            file=sys.stderr,
        )
        return 4

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "stability.csv",
        ["param1", "param2", "exact_stable", "sufficient_stable", "spectral_abscissa"],
        rows,
    )
    if scenario.output.svg:
        _write_text(
            out / "stability_map.svg",
            stability_map_svg(values1, values2, exact, suff, name1, name2),
        )
    info = {
        "tool_version": __version__,
        "command": "stability-map",
        "sweep_param1": name1,
        "sweep_param2": name2,
        "sweep_values1": f"{values1[0]:g}:{values1[-1]:g}:{len(values1)}",
        "sweep_values2": f"{values2[0]:g}:{values2[-1]:g}:{len(values2)}",
    }
    _write_text(out / "run_manifest.txt", format_manifest(scenario, info))
    return 0


def cmd_preset(name: str, out_path=None) -> int:
    """Emit one of the bundled scenarios (to stdout without a path)."""
    text = format_scenario(preset(name))
    if out_path is None:
        sys.stdout.write(text)
    else:
        _write_text(out_path, text)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _load(args) -> Scenario:
    scenario = load_scenario(args.scenario)
    scenario = with_seed(scenario, args.seed)
    svg = None if args.svg is None else args.svg == "on"
    return with_svg(scenario, svg)


def _add_common(sub):
    sub.add_argument("--scenario", required=True, help="scenario or manifest file")
    sub.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    sub.add_argument("--out", default=".", help="output directory")
    sub.add_argument("--svg", choices=("on", "off"), default=None, help="override SVG emission")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phcf",
        description="Stochastic car-following on a ring: simulation, spectra and stability.",
    )
    parser.add_argument("--version", action="version", version=f"phcf {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one trajectory and export CSV/SVG")
    _add_common(p)
    p.set_defaults(func=lambda a: cmd_simulate(_load(a), a.out))

    p = sub.add_parser("ensemble", help="integrate independent runs and export summaries")
    _add_common(p)
    p.add_argument("--runs", type=int, default=None, help="number of runs (defaults to the manifest's)")
    p.set_defaults(func=_run_ensemble_args)

    p = sub.add_parser("spectrum", help="closed-form eigenvalues with dense-oracle deviations")
    _add_common(p)
    p.set_defaults(func=lambda a: cmd_spectrum(_load(a), a.out))

    p = sub.add_parser("stability-map", help="exact/sufficient stability over a 2-parameter grid")
    _add_common(p)
    p.add_argument(
        "--vary",
        action="append",
        required=True,
        metavar="NAME=START:STOP:COUNT",
        help="sweep axis; give exactly twice",
    )
    p.set_defaults(func=lambda a: cmd_stability_map(_load(a), [parse_vary(v) for v in a.vary], a.out))

    p = sub.add_parser("preset", help="emit a bundled scenario")
    p.add_argument("name", choices=("fig1", "fig2", "fig3"))
    p.add_argument("--out", default=None, help="write to a file instead of stdout")
    p.set_defaults(func=lambda a: cmd_preset(a.name, a.out))
    return parser


def _run_ensemble_args(args) -> int:
    scenario = _load(args)
    n_runs = args.runs if args.runs is not None else scenario.n_runs
    if n_runs is None:
        raise InvalidInputError("--runs is required (no n_runs recorded in the scenario)")
    return cmd_ensemble(scenario, args.out, n_runs)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInputError, UnsupportedOperationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
