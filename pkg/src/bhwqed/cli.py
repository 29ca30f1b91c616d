"""Command line driver: one JSON config in, one table (CSV or JSON) out.

Exit codes: 0 success, 1 configuration error, 2 physics or regime error,
3 validation failure.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import subprocess
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import (__version__, bath_oracle, dynamics, mi_bath, sf_bath, superradiance,
               validation)
from .core import (EmitterArray, LatticeParams, MiParams, OutOfBandError, PhysicsError,
                   SfParams)

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS, EXIT_VALIDATION = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


REQUIRED = object()


# ---------------------------------------------------------------- schema

_NUM = (int, float)
_LATTICE = {"omega_c": (_NUM + (list,), REQUIRED), "U": (_NUM + (list,), 0.0),
            "J": (_NUM, 1.0), "N_p": (int, 64)}
_EMITTERS = {"positions": (list, REQUIRED), "omega_e": (_NUM + (dict,), REQUIRED),
             "g": (_NUM, 0.1), "gamma_prime": (_NUM, 0.0)}
_COMMON = {"phase": (str, REQUIRED), "lattice": (dict, REQUIRED), "n0": (_NUM, 1.0),
           "n_bar": (int, 1)}

SCHEMAS: Dict[str, Dict[str, tuple]] = {
    "dispersion": {**_COMMON, "n_k": (int, 201)},
    "dos": {**_COMMON, "n_omega": (int, 401), "omega_range": (list, None), "g": (_NUM, 0.1)},
    "decay": {**_COMMON, "g": (_NUM, 0.1), "omega": (_NUM + (list, dict), REQUIRED),
              "separations": (list, [0, 1, 3]), "oracle": (bool, True)},
    "coupling": {**_COMMON, "g": (_NUM, 0.1), "omega": (_NUM + (list, dict), REQUIRED),
                 "separations": (list, list(range(11))), "oracle": (bool, True),
                 "oracle_dispersion": (str, "approximated"), "sign": (int, 1)},
    "burst-map": {"phase": (str, REQUIRED), "omega_e": (_NUM, REQUIRED), "omega_c": (_NUM, REQUIRED),
                  "g": (_NUM, 0.1), "gamma_prime": (_NUM, 0.0), "n0": (_NUM, 1.0),
                  "n_bar": (int, 1), "J": (_NUM, 1.0), "u_grid": ((list, dict), REQUIRED),
                  "ne_grid": (list, list(range(2, 13))), "branch": (int, 1)},
    "dynamics": {**_COMMON, "lattice": (dict, {}), "phase": (str, "cosine"),
                 "emitters": (dict, {}), "t_final": (_NUM, REQUIRED), "n_out": (int, 201),
                 "initial": ((str, list), "excited"), "cosine": (dict, {}),
                 "include_counter_rotating": (bool, True), "margin": (_NUM, 1e-6),
                 "channel": (str, "waveguide")},
    "validate": {"suites": (list, list(validation.SUITES)), "seed": (int, 0)},
}
_COSINE = {"n": (int, REQUIRED), "k1d_d": (_NUM, REQUIRED), "gamma_1d": (_NUM, 1.0),
           "gamma_prime": (_NUM, 0.0)}


def _check_block(block: dict, schema: dict, where: str) -> dict:
    if not isinstance(block, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = sorted(set(block) - set(schema))
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")
    out = {}
    for key, (types, default) in schema.items():
        if key in block:
            val = block[key]
            if isinstance(val, bool) and types is not bool and bool not in (
                    types if isinstance(types, tuple) else (types,)):
                raise ConfigError(f"{where}.{key}: boolean not allowed")
            if not isinstance(val, types):
                raise ConfigError(f"{where}.{key}: unexpected type {type(val).__name__}")
            out[key] = val
        elif default is REQUIRED:
            raise ConfigError(f"{where}: missing required key {key!r}")
        else:
            out[key] = default
    return out


def load_config(command: str, text: Optional[str]) -> dict:
    """Parse and schema-check a config; ``None`` means an empty object."""
    if text is None or not text.strip():
        raw = {}
    else:
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    cfg = _check_block(raw, SCHEMAS[command], command)
    if "lattice" in cfg and (command != "dynamics" or cfg["phase"] != "cosine"):
        cfg["lattice"] = _check_block(cfg["lattice"], _LATTICE, f"{command}.lattice")
    if command == "dynamics":
        if cfg["phase"] == "cosine":
            cfg["cosine"] = _check_block(cfg["cosine"], _COSINE, "dynamics.cosine")
        else:
            cfg["emitters"] = _check_block(cfg["emitters"], _EMITTERS, "dynamics.emitters")
    if "phase" in cfg and cfg["phase"] not in ("sf", "mi", "cosine"):
        raise ConfigError(f"{command}.phase must be 'sf' or 'mi'")
    if cfg.get("phase") == "cosine" and command != "dynamics":
        raise ConfigError(f"{command}.phase must be 'sf' or 'mi'")
    return cfg


# ---------------------------------------------------------------- helpers

def _grid(spec, name):
    if isinstance(spec, (int, float)):
        return [float(spec)]
    if isinstance(spec, list):
        return [float(x) for x in spec]
    if isinstance(spec, dict):
        keys = set(spec)
        if keys == {"start", "stop", "num"}:
            return [float(x) for x in np.linspace(spec["start"], spec["stop"], int(spec["num"]))]
        raise ConfigError(f"{name}: grid objects need start, stop and num")
    raise ConfigError(f"{name}: cannot build a grid from {spec!r}")


def _lattices(lat_cfg) -> List[LatticeParams]:
    out = []
    for wc in _grid(lat_cfg["omega_c"], "lattice.omega_c"):
        for U in _grid(lat_cfg["U"], "lattice.U"):
            out.append(LatticeParams(omega_c=wc, U=U, J=float(lat_cfg["J"]),
                                     N_p=int(lat_cfg["N_p"])))
    return out


def _params(cfg):
    return SfParams(float(cfg["n0"])) if cfg["phase"] == "sf" else MiParams(int(cfg["n_bar"]))


def reference_frequency(name: str, phase: str, lp: LatticeParams, params) -> float:
    """Named band landmarks used by ``{"ref": ..., "offset": ...}`` frequencies."""
    if phase == "sf":
        w0, wpi = sf_bath.band_edges_sf(lp, params)
        table = {"omega_0": w0, "omega_pi": wpi, "band_bottom": w0, "band_top": wpi}
    else:
        table = {}
        for tag, fn in (("E_plus", mi_bath.e_plus), ("E_minus", mi_bath.e_minus)):
            table[f"{tag}_0"] = float(fn(0.0, lp, params))
            table[f"{tag}_pi"] = float(fn(np.pi, lp, params))
        for tag, s in (("eps_plus", 1), ("eps_minus", -1)):
            table[f"{tag}_0"] = float(mi_bath.dispersion_mi(0.0, s, lp, params))
            table[f"{tag}_pi"] = float(mi_bath.dispersion_mi(np.pi, s, lp, params))
        table["band_top"] = max(table.values())
        table["band_bottom"] = min(table.values())
    if name not in table:
        raise ConfigError(f"unknown frequency reference {name!r}; choose from {sorted(table)}")
    return float(table[name])


def _frequencies(spec, phase, lp, params, name="omega"):
    if isinstance(spec, dict) and "ref" in spec:
        unknown = set(spec) - {"ref", "offset"}
        if unknown:
            raise ConfigError(f"{name}: unknown keys {sorted(unknown)}")
        return [reference_frequency(spec["ref"], phase, lp, params) + float(spec.get("offset", 0.0))]
    return _grid(spec, name)


def _version() -> str:
    try:
        root = os.path.dirname(os.path.abspath(__file__))
        rev = subprocess.run(["git", "rev-parse", "--short", "HEAD"], cwd=root,
                             capture_output=True, text=True, timeout=5)
        if rev.returncode == 0:
            return rev.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return "unknown"


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x) + 0.0)
    return "" if x is None else str(x)


class Table:
    """Columns named ``name[unit]`` plus rows of plain values."""

    def __init__(self, name: str, columns: Sequence[str]):
        self.name = name
        self.columns = list(columns)
        self.rows: List[list] = []

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError("row length does not match header")
        self.rows.append(list(values))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(x) for x in r])
        return buf.getvalue()

    def to_json(self, meta: dict) -> str:
        def conv(x):
            if isinstance(x, (np.floating, float)):
                x = float(x)
                return x if np.isfinite(x) else None
            if isinstance(x, (np.integer,)):
                return int(x)
            if isinstance(x, np.bool_):
                return bool(x)
            return x
        body = {"meta": meta, "columns": self.columns,
                "rows": [[conv(x) for x in r] for r in self.rows]}
        return json.dumps(body, indent=1, sort_keys=True) + "\n"


# ---------------------------------------------------------------- commands

def cmd_dispersion(cfg, threads=1) -> List[Table]:
    phase, prm = cfg["phase"], _params(cfg)
    k = np.linspace(0.0, np.pi, cfg["n_k"])
    if phase == "sf":
        t = Table("dispersion", ["omega_c[J]", "U[J]", "k[1/a]", "f_k[J]", "omega_k[J]"])
        for lp in _lattices(cfg["lattice"]):
            f = sf_bath.f_sf(k, lp, prm)
            w = sf_bath.dispersion_sf(k, lp, prm)
            for a in range(k.size):
                t.add(lp.omega_c, lp.U, k[a], f[a], w[a])
    else:
        t = Table("dispersion", ["omega_c[J]", "U[J]", "k[1/a]", "eps_plus[J]", "eps_minus[J]",
                                 "E_plus[J]", "E_minus[J]"])
        for lp in _lattices(cfg["lattice"]):
            ep = mi_bath.dispersion_mi(k, 1, lp, prm)
            em = mi_bath.dispersion_mi(k, -1, lp, prm)
            Ep, Em = mi_bath.e_plus(k, lp, prm), mi_bath.e_minus(k, lp, prm)
            for a in range(k.size):
                t.add(lp.omega_c, lp.U, k[a], ep[a], em[a], Ep[a], Em[a])
    return [t]


def _dos_rows(phase, lp, prm, omegas, g):
    """``rho(w) = (1/pi) / |dw/dk|`` per branch; zero outside, edge cells flagged."""
    rows = []
    if phase == "sf":
        w0, wpi = sf_bath.band_edges_sf(lp, prm)
        step = omegas[1] - omegas[0] if len(omegas) > 1 else 0.0
        for w in omegas:
            rho, edge = 0.0, abs(w - w0) <= step / 2 or abs(w - wpi) <= step / 2
            if w0 < w < wpi:
                k = sf_bath.k1d_sf(w, lp, prm)
                vel = sf_bath.f_sf(k, lp, prm) * 2 * lp.J * np.sin(k) / w
                rho = 1.0 / (np.pi * vel) if vel > 0 else np.inf
            rows.append((w, rho, sf_bath.gamma_sf(0, 0, w, lp, prm, g), edge))
        return rows
    edges = [mi_bath.band_edges_mi(s, lp, prm) for s in (1, -1)]
    step = omegas[1] - omegas[0] if len(omegas) > 1 else 0.0
    for w in omegas:
        vals = []
        edge = any(abs(w - e) <= step / 2 for pair in edges for e in pair)
        for s, (lo, hi) in zip((1, -1), edges):
            rho = 0.0
            if lo < w < hi:
                k = mi_bath.k1d_mi(w, s, lp, prm)
                vel = abs(mi_bath.group_velocity_mi(k, s, lp, prm))
                rho = 1.0 / (np.pi * vel) if vel > 0 else np.inf
            vals.append(rho)
        rows.append((w, vals[0], vals[1], mi_bath.gamma_mi(0, 0, w, lp, prm, g).gamma, edge))
    return rows


def cmd_dos(cfg, threads=1) -> List[Table]:
    phase, prm = cfg["phase"], _params(cfg)
    if phase == "sf":
        t = Table("dos", ["omega_c[J]", "U[J]", "omega[J]", "dos[1/J]", "gamma_ii[J]", "band_edge[-]"])
    else:
        t = Table("dos", ["omega_c[J]", "U[J]", "omega[J]", "dos_plus[1/J]", "dos_minus[1/J]",
                          "gamma_ii[J]", "band_edge[-]"])
    for lp in _lattices(cfg["lattice"]):
        if cfg["omega_range"] is not None:
            if len(cfg["omega_range"]) != 2:
                raise ConfigError("dos.omega_range must be [min, max]")
            lo, hi = (float(x) for x in cfg["omega_range"])
        else:
            lo = reference_frequency("band_bottom", phase, lp, prm) - 0.5 * lp.J
            hi = reference_frequency("band_top", phase, lp, prm) + 0.5 * lp.J
        omegas = list(np.linspace(lo, hi, cfg["n_omega"]))
        if phase == "sf":
            omegas = [w for w in omegas if w > 0]
        for row in _dos_rows(phase, lp, prm, omegas, float(cfg["g"])):
            t.add(lp.omega_c, lp.U, *row)
    return [t]


def _rel_err(a, b):
    if a is None or b is None or not np.isfinite(a) or not np.isfinite(b):
        return float("nan")
    return abs(a - b) / abs(b) if b != 0 else abs(a - b)


def cmd_decay(cfg, threads=1) -> List[Table]:
    phase, prm, g = cfg["phase"], _params(cfg), float(cfg["g"])
    t = Table("decay", ["omega_c[J]", "U[J]", "omega[J]", "separation[a]", "gamma_closed[J]",
                        "gamma_oracle[J]", "rel_err[-]", "gamma_ii[J]", "note[-]"])
    for lp in _lattices(cfg["lattice"]):
        for w in _frequencies(cfg["omega"], phase, lp, prm):
            if phase == "sf":
                gii = sf_bath.gamma_sf(0, 0, w, lp, prm, g)
            else:
                gii = mi_bath.gamma_mi(0, 0, w, lp, prm, g).gamma
            note = "" if gii > 0 else "outside band"
            for m in cfg["separations"]:
                m = int(m)
                if phase == "sf":
                    cf = sf_bath.gamma_sf(m, 0, w, lp, prm, g)
                else:
                    cf = mi_bath.gamma_mi(m, 0, w, lp, prm, g).gamma
                orc = None
                if cfg["oracle"]:
                    spec = bath_oracle.CorrelatorSpec(phase, lp, prm, i=m, j=0)
                    orc = bath_oracle.response_quadrature(spec, w, g).gamma
                err = _rel_err(cf, orc) if orc is not None else float("nan")
                if orc is not None and gii > 0:
                    # near nodes of cos(k m) compare against the on-site scale
                    err = abs(cf - orc) / abs(gii)
                t.add(lp.omega_c, lp.U, w, m, cf, orc, err, gii, note)
    return [t]


def cmd_coupling(cfg, threads=1) -> List[Table]:
    phase, prm, g = cfg["phase"], _params(cfg), float(cfg["g"])
    if cfg["oracle_dispersion"] not in ("approximated", "exact"):
        raise ConfigError("coupling.oracle_dispersion must be 'approximated' or 'exact'")
    if cfg["sign"] not in (1, -1):
        raise ConfigError("coupling.sign must be +1 or -1")
    t = Table("coupling", ["omega_c[J]", "U[J]", "omega[J]", "separation[a]", "delta_closed[J]",
                           "delta_oracle[J]", "rel_err[-]", "note[-]"])
    for lp in _lattices(cfg["lattice"]):
        for w in _frequencies(cfg["omega"], phase, lp, prm):
            w = cfg["sign"] * w
            for m in cfg["separations"]:
                m = int(m)
                note = ""
                try:
                    if phase == "sf":
                        cf = sf_bath.delta_sf(m, 0, w, lp, prm, g).delta
                    else:
                        cf = mi_bath.delta_mi(m, 0, w, lp, prm, g).delta
                except OutOfBandError as exc:
                    cf, note = None, str(exc).split(";")[0]
                orc = None
                if cfg["oracle"]:
                    spec = bath_oracle.CorrelatorSpec(phase, lp, prm, i=m, j=0,
                                                      dispersion_mode=cfg["oracle_dispersion"])
                    orc = bath_oracle.response_quadrature(spec, w, g).delta
                t.add(lp.omega_c, lp.U, w, m, cf, orc,
                      _rel_err(cf, orc) if (cf is not None and orc is not None) else float("nan"),
                      note)
    return [t]


def cmd_burst_map(cfg, threads=1) -> List[Table]:
    if cfg["phase"] not in ("sf", "mi"):
        raise ConfigError("burst-map.phase must be 'sf' or 'mi'")
    ug = _grid(cfg["u_grid"], "u_grid")
    ne = [int(x) for x in cfg["ne_grid"]]
    kw = dict(omega_e=float(cfg["omega_e"]), omega_c=float(cfg["omega_c"]), g=float(cfg["g"]),
              gamma_prime=float(cfg["gamma_prime"]), n0=float(cfg["n0"]),
              n_bar=int(cfg["n_bar"]), J=float(cfg["J"]), branch=int(cfg["branch"]))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                bm = superradiance.burst_phase_map(cfg["phase"], ug, ne, executor=ex, **kw)
        else:
            bm = superradiance.burst_phase_map(cfg["phase"], ug, ne, **kw)
    t = Table("burst_map", ["U[J]", "N_e[-]", "state[-]", "k_1d[1/a]", "gamma_1d[J]",
                            "lhs[-]", "rhs[-]"])
    for r in bm.rows():
        t.add(r["U"], r["N_e"], r["state"], r["k_1d"], r["gamma_1d"], r["lhs"], r["rhs"])
    return [t]


def _liouvillian_from_cfg(cfg):
    if cfg["phase"] == "cosine":
        c = cfg["cosine"]
        gam = dynamics.cosine_decay_matrix(int(c["n"]), float(c["k1d_d"]), float(c["gamma_1d"]))
        return dynamics.EmitterLiouvillian.from_matrices(gam, gamma_prime=float(c["gamma_prime"]))
    lp = _lattices(cfg["lattice"])
    if len(lp) != 1:
        raise ConfigError("dynamics needs a single lattice, not a sweep")
    lp, prm = lp[0], _params(cfg)
    e = cfg["emitters"]
    we = _frequencies(e["omega_e"], cfg["phase"], lp, prm, "emitters.omega_e")[0]
    em = EmitterArray(positions=tuple(int(p) for p in e["positions"]), omega_e=we,
                      g=float(e["g"]), gamma_prime=float(e["gamma_prime"]))
    return dynamics.build_liouvillian(cfg["phase"], lp, prm, em,
                                      include_counter_rotating=cfg["include_counter_rotating"])


def cmd_dynamics(cfg, threads=1) -> List[Table]:
    liou = _liouvillian_from_cfg(cfg)
    if cfg["initial"] == "excited":
        rho0 = dynamics.excited_state(liou.n)
    elif isinstance(cfg["initial"], list):
        rho0 = dynamics.basis_state(liou.n, [int(i) for i in cfg["initial"]])
    else:
        raise ConfigError("dynamics.initial must be 'excited' or a list of excited emitters")
    traj = dynamics.evolve(liou, rho0, float(cfg["t_final"]), n_out=int(cfg["n_out"]))
    res = dynamics.detect_burst(traj, margin=float(cfg["margin"]), channel=cfg["channel"])
    t = Table("trajectory", ["t[1/J]", "population[-]", "power[J]", "waveguide_power[J]",
                             "trace_drift[-]", "min_eig[-]", "purity[-]"])
    for a in range(traj.times.size):
        t.add(traj.times[a], traj.population[a], traj.power[a], traj.waveguide_power[a],
              traj.trace_drift[a], traj.min_eig[a], traj.purity[a])
    b = Table("burst", ["burst[-]", "peak_time[1/J]", "peak_power[J]", "initial_slope[J^2]",
                        "channel[-]", "n_emitters[-]"])
    b.add(res.burst, res.peak_time, res.peak_power, res.initial_slope, cfg["channel"], liou.n)
    return [t, b]


def cmd_validate(cfg, threads=1) -> List[Table]:
    t = Table("validate", ["suite[-]", "check[-]", "error[-]", "tolerance[-]", "passed[-]"])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for r in validation.run_suites([str(s) for s in cfg["suites"]], seed=int(cfg["seed"])):
            t.add(r.suite, r.name, r.error, r.tolerance, r.passed)
    return [t]


COMMANDS = {"dispersion": cmd_dispersion, "dos": cmd_dos, "decay": cmd_decay,
            "coupling": cmd_coupling, "burst-map": cmd_burst_map, "dynamics": cmd_dynamics,
            "validate": cmd_validate}


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bhwqed",
                                description="Emitters coupled to a Bose-Hubbard waveguide.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="JSON config file (defaults apply when omitted)")
        s.add_argument("--out", default=".", help="output directory")
        s.add_argument("--format", choices=("csv", "json"), default="csv")
        s.add_argument("--threads", type=int, default=1)
    return p


def run(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        text = None
        if args.config:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc}") from None
        cfg = load_config(args.command, text)
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        tables = COMMANDS[args.command](cfg, threads=args.threads)
    except (ConfigError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PhysicsError, dynamics.IntegrationError) as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    canon = json.dumps(cfg, sort_keys=True, default=str)
    meta = {"command": args.command, "version": __version__, "git_revision": _version(),
            "config_sha256": hashlib.sha256(canon.encode()).hexdigest(), "config": cfg}
    os.makedirs(args.out, exist_ok=True)
    for t in tables:
        path = os.path.join(args.out, f"{t.name}.{args.format}")
        body = t.to_csv() if args.format == "csv" else t.to_json(meta)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(body)
        print(path, file=stdout)
    if args.command == "validate":
        failed = [r for r in tables[0].rows if not r[4]]
        for r in tables[0].rows:
            print(f"{'PASS' if r[4] else 'FAIL'} {r[0]}: {r[1]} (error {r[2]:.3e}, tol {r[3]:.1e})",
                  file=stdout)
        if failed:
            return EXIT_VALIDATION
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
