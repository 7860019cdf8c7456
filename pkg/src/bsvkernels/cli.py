"""Command-line entry point.

Every verb reads an INI configuration, writes CSV tables and a JSON summary
into the output directory, and exits with 0 on success, 2 on a configuration
error and 3 when a numerical self-check fails.
"""

from __future__ import annotations

import argparse
from concurrent.futures import ProcessPoolExecutor
import csv
import json
import logging
from pathlib import Path
import sys

import numpy as np

from . import __version__
from .analysis import (calibrate_gain, covariance_analytic, empirical_covariance, fwhm,
                       half_max_width, intensity, sample_intensity_profiles, schmidt_from_state,
                       visibility)
from .analysis.interference import fringe_frequency, fringe_period
from .config import RunConfig, load_config
from .dispersion import air_mismatch
from .errors import ConfigError, NumericalDiagnosticError
from .propagator import propagate_single_crystal, propagate_two_crystal, symplectic_defect
from .reference_models import plane_wave_intensity
from .workflows import calibrate_coupling

log = logging.getLogger("bsvkernels")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
SYMPLECTIC_TOL = 1e-6


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(path: Path, header, rows, cfg: RunConfig, verb: str, notes=()):
    with open(path, "w", newline="") as fh:
        fh.write(f"# bsvkernels {__version__}\n")
        fh.write(f"# command {verb}\n")
        fh.write(f"# config_sha256 {cfg.digest()}\n")
        for note in notes:
            fh.write(f"# {note}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_json(path: Path, data: dict, cfg: RunConfig, verb: str):
    payload = {"version": __version__, "command": verb, "config_sha256": cfg.digest()}
    payload.update(data)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_csv(path):
    with open(path) as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#"))]
    header, body = rows[0], rows[1:]
    return {h: np.array([float(r[i]) for r in body]) for i, h in enumerate(header)}


class Runner:
    """Shared state of one invocation: configuration, grid and gain mapping."""

    def __init__(self, cfg: RunConfig, out: Path):
        self.cfg = cfg
        self.out = out
        self.spec = cfg.crystal()
        self.pump = cfg.pump()
        self.grid = cfg.grid()
        self.opts = cfg.integrator()
        self._per_gain = cfg["gain.coupling_per_gain"]

    def coupling(self, gain):
        """Gamma for gain G, calibrating on first use unless configured."""
        if self._per_gain is None:
            log.info("calibrating gain on %d collinear points", len(self.cfg["gain.calibration_gains"]))
            cal, _, _ = calibrate_coupling(self.spec, self.pump, self.grid,
                                           self.cfg["gain.calibration_gains"], self.opts)
            self._per_gain = 1.0 / cal.A
        return float(gain) * self._per_gain

    def single(self, gain):
        st = propagate_single_crystal(self.spec, self.pump, self.grid, self.coupling(gain), self.opts)
        self.check(st)
        return st

    def check(self, st):
        defect = symplectic_defect(st)
        if not defect <= SYMPLECTIC_TOL:
            raise NumericalDiagnosticError(f"symplectic defect {defect:.3e} exceeds {SYMPLECTIC_TOL}")
        return defect

    def map(self, fn, items):
        workers = self.cfg["run.workers"]
        if workers <= 1 or len(items) <= 1:
            return [fn(x) for x in items]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))


def _profile_rows(prof):
    return zip(prof.q, prof.theta, prof.values)


def cmd_single(r: Runner):
    G = r.cfg["gain.value"]
    st = r.single(G)
    prof = intensity(st)
    write_csv(r.out / "profile.csv", ["q_per_m", "theta_rad", "N"], _profile_rows(prof), r.cfg, "single")
    write_json(r.out / "summary.json", {
        "G": G, "gamma": st.gamma, "FWHM_per_m": fwhm(prof), "FWHM_rad": fwhm(prof, angle=True),
        "total_photons": prof.total, "N_collinear": prof.collinear(),
        "symplectic_defect": symplectic_defect(st), "steps": st.steps}, r.cfg, "single")


def _sweep_point(args):
    r, G = args
    st = r.single(G)
    prof = intensity(st)
    pw = plane_wave_intensity(r.spec, G, r.grid)
    return (G, fwhm(prof, angle=True), half_max_width(prof.theta, pw), st.gamma, prof.collinear(),
            prof.total)


def cmd_sweep_gain(r: Runner):
    gains = r.cfg["gain.values"]
    r.coupling(1.0)
    rows = r.map(_sweep_point, [(r, G) for G in gains])
    write_csv(r.out / "sweep_gain.csv",
              ["G", "FWHM_solver", "FWHM_planewave", "gamma", "N_collinear", "total_photons"], rows,
              r.cfg, "sweep-gain", notes=["FWHM in rad of external emission angle"])
    write_json(r.out / "summary.json", {"gains": list(gains), "coupling_per_gain": r._per_gain},
               r.cfg, "sweep-gain")


def cmd_two_crystal(r: Runner):
    G = r.cfg["gain.value"]
    st = propagate_two_crystal(r.spec, r.pump, r.cfg.gap(), r.grid, r.coupling(G), r.opts)
    r.check(st)
    prof = intensity(st)
    write_csv(r.out / "profile.csv", ["q_per_m", "theta_rad", "N"], _profile_rows(prof), r.cfg,
              "two-crystal")
    write_json(r.out / "summary.json", {
        "G": G, "gap_m": r.cfg["gap.distance_m"], "envelope_FWHM_rad": fwhm(prof, angle=True),
        "N_collinear": prof.collinear(), "total_photons": prof.total,
        "fringe_frequency_per_rad": fringe_frequency(prof) * prof.k_ref,
        "symplectic_defect": symplectic_defect(st)}, r.cfg, "two-crystal")


def cmd_sweep_distance(r: Runner):
    gains = r.cfg["gain.values"]
    dists = r.cfg["sweep.distances_m"]
    if not dists:
        raise ConfigError("sweep.distances_m is empty")
    period = fringe_period(air_mismatch(r.cfg.gap(), r.spec))
    profile_rows, summary_rows, vis = [], [], {}
    for G in gains:
        single = r.single(G)
        coll = []
        for d in dists:
            st = propagate_two_crystal(r.spec, r.pump, r.cfg.gap(d), r.grid, single=single)
            r.check(st)
            prof = intensity(st)
            coll.append(prof.collinear())
            profile_rows += [(G, d, q, t, n) for q, t, n in _profile_rows(prof)]
            summary_rows.append((G, d, prof.collinear(), fwhm(prof, angle=True),
                                 fringe_frequency(prof) * prof.k_ref))
        try:
            vis[str(G)] = visibility(dists, coll, period)
        except ValueError:
            vis[str(G)] = None
    write_csv(r.out / "profiles.csv", ["G", "d_m", "q_per_m", "theta_rad", "N"], profile_rows, r.cfg,
              "sweep-distance")
    write_csv(r.out / "sweep_distance.csv",
              ["G", "d_m", "N_collinear", "envelope_FWHM_rad", "fringe_frequency_per_rad"],
              summary_rows, r.cfg, "sweep-distance")
    write_json(r.out / "summary.json", {"fringe_period_m": period, "visibility": vis}, r.cfg,
               "sweep-distance")


def cmd_schmidt(r: Runner):
    G = r.cfg["gain.value"]
    st = r.single(G)
    dec = schmidt_from_state(st)
    k = min(r.cfg["schmidt.modes"], st.n)
    rows = [(n, dec.weights[n], dec.weights_tilde[n], dec.normalized_weights[n]) for n in range(st.n)]
    write_csv(r.out / "weights.csv", ["n", "Lambda", "Lambda_tilde", "normalized"], rows, r.cfg, "schmidt")
    theta = st.grid.nodes / st.meta["k_ref"]
    mode_rows = [(q, t, *np.abs(dec.modes_u[j, :k]) ** 2)
                 for j, (q, t) in enumerate(zip(st.grid.nodes, theta))]
    write_csv(r.out / "modes.csv", ["q_per_m", "theta_rad"] + [f"u{n}_sq" for n in range(k)],
              mode_rows, r.cfg, "schmidt")
    write_json(r.out / "summary.json", {
        "G": G, "schmidt_number": dec.schmidt_number, "total_photons": dec.total_photons},
        r.cfg, "schmidt")


def cmd_covariance(r: Runner):
    G = r.cfg["gain.value"]
    st = r.single(G)
    cov = covariance_analytic(st)
    samples = sample_intensity_profiles(st, r.cfg["covariance.shots"], r.cfg["covariance.seed"])
    emp = empirical_covariance(samples)
    q = st.grid.nodes
    rows = [(q[j], q[k], cov.values[j, k], emp.values[j, k])
            for j in range(q.size) for k in range(q.size)]
    write_csv(r.out / "covariance.csv", ["q1_per_m", "q2_per_m", "cov_analytic", "cov_sampled"], rows,
              r.cfg, "covariance")
    dist = np.linalg.norm(emp.values - cov.values) / np.linalg.norm(cov.values)
    write_json(r.out / "summary.json", {
        "G": G, "shots": samples.shots, "seed": r.cfg["covariance.seed"],
        "relative_frobenius_distance": float(dist)}, r.cfg, "covariance")


def cmd_calibrate(r: Runner, source: Path | None):
    if source is not None:
        table = read_csv(source)
        try:
            gammas, y = table["gamma"], table["N_collinear"]
        except KeyError as exc:
            raise ConfigError(f"{source} lacks column {exc}") from exc
        cal = calibrate_gain(gammas, y)
    else:
        cal, gammas, y = calibrate_coupling(r.spec, r.pump, r.grid, r.cfg["gain.calibration_gains"],
                                            r.opts)
    rows = zip(gammas, y, cal.gain(gammas), cal.gain_from_signal(y))
    write_csv(r.out / "calibration.csv", ["gamma", "N_collinear", "G_fit", "G_inverted"], rows, r.cfg,
              "calibrate")
    write_json(r.out / "summary.json", {
        "A": cal.A, "B": cal.B, "coupling_per_gain": 1.0 / cal.A,
        "relative_residual": cal.relative_residual}, r.cfg, "calibrate")


VERBS = {
    "single": cmd_single,
    "sweep-gain": cmd_sweep_gain,
    "two-crystal": cmd_two_crystal,
    "sweep-distance": cmd_sweep_distance,
    "schmidt": cmd_schmidt,
    "covariance": cmd_covariance,
    "calibrate": None,
}


def build_parser():
    p = argparse.ArgumentParser(prog="bsvkernels", description=__doc__.splitlines()[0])
    p.add_argument("verb", choices=sorted(VERBS))
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--out", type=Path, default=Path("out"))
    p.add_argument("--seed", type=int)
    p.add_argument("--shots", type=int)
    p.add_argument("--grid-n", type=int)
    p.add_argument("--input", type=Path, help="calibrate: fit a sweep-gain CSV instead of recomputing")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    overrides = {"covariance.seed": args.seed, "covariance.shots": args.shots,
                 "grid.n": args.grid_n}
    try:
        cfg = load_config(args.config, overrides)
        args.out.mkdir(parents=True, exist_ok=True)
        runner = Runner(cfg, args.out)
        if args.verb == "calibrate":
            cmd_calibrate(runner, args.input)
        else:
            VERBS[args.verb](runner)
    except NumericalDiagnosticError as exc:
        print(f"numerical diagnostic failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        # ConfigError and invalid physical parameters alike
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
