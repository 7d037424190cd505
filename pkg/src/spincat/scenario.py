"""Scenario configs, built-in presets, and artifact emission.

A scenario is a JSON document (``schema: 1``) describing one complete
simulation: the bath spectrum, the ensemble, the initial preparation,
which artifacts to write, and where.  The full shape::

    {
      "schema": 1,
      "name": "my-run",
      "units": "omega_c",              # or "hz"; labels the number scale
      "spectrum": {
        "kind": "ohmic",               # ohmic | lorentzian | tabulated
        "alpha": 2.5e-05,
        "omega_c": 1.0,
        "omega_0": 10.0,               # lorentzian only: center frequency
        "beta": null,                  # null = zero temperature
        "table": [[0.0, 0.0], ...]     # tabulated only: [omega, g] knots
      },
      "n_particles": 50,
      "theta": 0.785398,               # preparation polar angle
      "phi": 0.0,                      # preparation azimuth
      "time_grid": {                   # kernel tabulation grid
        "kind": "log",                 # log | linear
        "start": 0.01, "stop": 1e6, "count": 121
      },
      "snapshot_times": {
        "kind": "tau-fractions",       # tau-fractions | absolute
        "values": [0.3, 1.0]
      },
      "basis": "Lx",                   # basis for emitted snapshots
      "conventions": {"thermal": "coth-full", "mqs": "twist"},
      "solver": {"horizon_factor": 1e6},
      "outputs": ["kernels", "snapshots", "report"],
      "output_dir": "fig1-out"         # optional; CLI flag overrides
    }

``time_grid`` is required only when "kernels" is requested, and
``snapshot_times`` only when "snapshots" is.  All frequencies are in
units of ``omega_c`` unless ``units`` is "hz" (then frequencies are in
Hz and times in seconds); the choice only labels the numbers, the math
is scale-free.  Files are written atomically (temp file + rename), all
floats in the shortest decimal form that round-trips, so identical
configs produce byte-identical artifacts.
"""

from __future__ import annotations

import copy
import csv
import io
import json
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bath import SpectralDensity, SpectrumKind, ThermalConvention, lorentzian, ohmic, tabulated
from .dicke import Basis, SectorLabel, coherent_state
from .errors import ConfigError, SpinCatError
from .evolve import EvolutionParams, MqsConvention, assess_mqs, snapshot_series, solve_tau_mqs
from .kernels import markov_limits, tabulate_kernels

__all__ = [
    "Scenario",
    "validate_config",
    "build_scenario",
    "preset_names",
    "preset_config",
    "run_scenario",
    "sweep",
    "SWEEP_AXES",
]

_OUTPUT_KINDS = ("kernels", "snapshots", "report")
SWEEP_AXES = ("N", "beta", "alpha", "omega_0")


# ---------------------------------------------------------------------------
# validation


def _fail(path: str, msg: str):
    raise ConfigError(msg, field=path)


def _get(d: dict, key: str, path: str, required: bool, default=None):
    if key in d:
        return d[key]
    if required:
        _fail(f"{path}.{key}" if path else key, "required field is missing")
    return default


def _number(value, path: str, positive=False, nonnegative=False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {type(value).__name__}")
    v = float(value)
    if not math.isfinite(v):
        _fail(path, "must be finite")
    if positive and not v > 0.0:
        _fail(path, f"must be > 0, got {v!r}")
    if nonnegative and v < 0.0:
        _fail(path, f"must be >= 0, got {v!r}")
    return v


def _integer(value, path: str, minimum=None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {type(value).__name__}")
    if minimum is not None and value < minimum:
        _fail(path, f"must be >= {minimum}, got {value}")
    return value


def _string(value, path: str, choices=None) -> str:
    if not isinstance(value, str):
        _fail(path, f"expected a string, got {type(value).__name__}")
    if choices is not None and value not in choices:
        _fail(path, f"must be one of {sorted(choices)}, got {value!r}")
    return value


def _check_unknown(d: dict, allowed, path: str):
    for key in d:
        if key not in allowed:
            _fail(f"{path}.{key}" if path else key, "unknown field")


def _validate_spectrum(raw, path: str) -> dict:
    if not isinstance(raw, dict):
        _fail(path, f"expected an object, got {type(raw).__name__}")
    _check_unknown(raw, {"kind", "alpha", "omega_c", "omega_0", "beta", "table"}, path)
    kind = _string(_get(raw, "kind", path, True), f"{path}.kind",
                   {k.value for k in SpectrumKind})
    out = {"kind": kind}
    out["omega_c"] = _number(_get(raw, "omega_c", path, False, 1.0),
                             f"{path}.omega_c", positive=True)
    beta = _get(raw, "beta", path, False, None)
    if beta is not None:
        beta = _number(beta, f"{path}.beta", positive=True)
    out["beta"] = beta
    if kind == SpectrumKind.TABULATED.value:
        table = _get(raw, "table", path, True)
        if not isinstance(table, list) or not table:
            _fail(f"{path}.table", "expected a nonempty list of [omega, g] pairs")
        pairs = []
        for i, row in enumerate(table):
            if not isinstance(row, list) or len(row) != 2:
                _fail(f"{path}.table[{i}]", "expected an [omega, g] pair")
            w = _number(row[0], f"{path}.table[{i}][0]", nonnegative=True)
            g = _number(row[1], f"{path}.table[{i}][1]", nonnegative=True)
            pairs.append([w, g])
        out["table"] = pairs
        for key in ("alpha", "omega_0"):
            if key in raw:
                _fail(f"{path}.{key}", "not applicable to tabulated spectra")
    else:
        out["alpha"] = _number(_get(raw, "alpha", path, True),
                               f"{path}.alpha", nonnegative=True)
        if kind == SpectrumKind.LORENTZIAN.value:
            out["omega_0"] = _number(_get(raw, "omega_0", path, True),
                                     f"{path}.omega_0", positive=True)
        elif "omega_0" in raw:
            _fail(f"{path}.omega_0", "only applicable to lorentzian spectra")
        if "table" in raw:
            _fail(f"{path}.table", "only applicable to tabulated spectra")
    return out


def _validate_time_grid(raw, path: str) -> dict:
    if not isinstance(raw, dict):
        _fail(path, f"expected an object, got {type(raw).__name__}")
    _check_unknown(raw, {"kind", "start", "stop", "count"}, path)
    kind = _string(_get(raw, "kind", path, True), f"{path}.kind", {"log", "linear"})
    start = _number(_get(raw, "start", path, True), f"{path}.start", positive=True)
    stop = _number(_get(raw, "stop", path, True), f"{path}.stop", positive=True)
    if not stop > start:
        _fail(f"{path}.stop", f"must exceed start={start!r}, got {stop!r}")
    count = _integer(_get(raw, "count", path, True), f"{path}.count", minimum=2)
    return {"kind": kind, "start": start, "stop": stop, "count": count}


def _validate_snapshot_times(raw, path: str) -> dict:
    if not isinstance(raw, dict):
        _fail(path, f"expected an object, got {type(raw).__name__}")
    _check_unknown(raw, {"kind", "values"}, path)
    kind = _string(_get(raw, "kind", path, True), f"{path}.kind",
                   {"tau-fractions", "absolute"})
    values = _get(raw, "values", path, True)
    if not isinstance(values, list) or not values:
        _fail(f"{path}.values", "expected a nonempty list of times")
    vals = [_number(v, f"{path}.values[{i}]", nonnegative=True)
            for i, v in enumerate(values)]
    return {"kind": kind, "values": vals}


def validate_config(raw: dict) -> dict:
    """Validate a scenario document and return it with defaults filled in.

    Raises :class:`ConfigError` naming the offending field path.
    """
    if not isinstance(raw, dict):
        _fail("", f"config root must be an object, got {type(raw).__name__}")
    allowed = {"schema", "name", "units", "spectrum", "n_particles", "theta",
               "phi", "time_grid", "snapshot_times", "basis", "conventions",
               "solver", "outputs", "output_dir"}
    _check_unknown(raw, allowed, "")
    schema = _integer(_get(raw, "schema", "", True), "schema")
    if schema != 1:
        _fail("schema", f"unsupported schema version {schema}")
    name = _string(_get(raw, "name", "", True), "name")
    if not name:
        _fail("name", "must be nonempty")
    units = _string(_get(raw, "units", "", False, "omega_c"), "units",
                    {"omega_c", "hz"})
    spectrum = _validate_spectrum(_get(raw, "spectrum", "", True), "spectrum")
    n = _integer(_get(raw, "n_particles", "", True), "n_particles", minimum=1)
    theta = _number(_get(raw, "theta", "", True), "theta")
    phi = _number(_get(raw, "phi", "", True), "phi")

    outputs = _get(raw, "outputs", "", False, ["report"])
    if not isinstance(outputs, list) or not outputs:
        _fail("outputs", "expected a nonempty list")
    seen = []
    for i, o in enumerate(outputs):
        o = _string(o, f"outputs[{i}]", set(_OUTPUT_KINDS))
        if o in seen:
            _fail(f"outputs[{i}]", f"duplicate output kind {o!r}")
        seen.append(o)
    outputs = [o for o in _OUTPUT_KINDS if o in seen]

    time_grid = None
    if "time_grid" in raw:
        time_grid = _validate_time_grid(raw["time_grid"], "time_grid")
    elif "kernels" in outputs:
        _fail("time_grid", 'required when "kernels" is in outputs')
    snapshot_times = None
    if "snapshot_times" in raw:
        snapshot_times = _validate_snapshot_times(raw["snapshot_times"],
                                                  "snapshot_times")
    elif "snapshots" in outputs:
        _fail("snapshot_times", 'required when "snapshots" is in outputs')

    basis = _string(_get(raw, "basis", "", False, "Lz"), "basis",
                    {b.value for b in Basis})
    conv = _get(raw, "conventions", "", False, {})
    if not isinstance(conv, dict):
        _fail("conventions", f"expected an object, got {type(conv).__name__}")
    _check_unknown(conv, {"thermal", "mqs"}, "conventions")
    thermal = _string(_get(conv, "thermal", "conventions", False, "coth-full"),
                      "conventions.thermal", {c.value for c in ThermalConvention})
    mqs = _string(_get(conv, "mqs", "conventions", False, "twist"),
                  "conventions.mqs", {c.value for c in MqsConvention})
    solver = _get(raw, "solver", "", False, {})
    if not isinstance(solver, dict):
        _fail("solver", f"expected an object, got {type(solver).__name__}")
    _check_unknown(solver, {"horizon_factor"}, "solver")
    horizon = _number(_get(solver, "horizon_factor", "solver", False, 1e6),
                      "solver.horizon_factor", positive=True)
    if not horizon > 1.0:
        _fail("solver.horizon_factor", f"must exceed 1, got {horizon!r}")
    out_dir = _get(raw, "output_dir", "", False, None)
    if out_dir is not None:
        out_dir = _string(out_dir, "output_dir")
        if not out_dir:
            _fail("output_dir", "must be nonempty when present")

    normalized = {
        "schema": 1,
        "name": name,
        "units": units,
        "spectrum": spectrum,
        "n_particles": n,
        "theta": theta,
        "phi": phi,
        "basis": basis,
        "conventions": {"thermal": thermal, "mqs": mqs},
        "solver": {"horizon_factor": horizon},
        "outputs": outputs,
    }
    if time_grid is not None:
        normalized["time_grid"] = time_grid
    if snapshot_times is not None:
        normalized["snapshot_times"] = snapshot_times
    if out_dir is not None:
        normalized["output_dir"] = out_dir
    return normalized


# ---------------------------------------------------------------------------
# scenario objects


@dataclass(frozen=True)
class Scenario:
    """A validated scenario with its physics objects constructed."""

    name: str
    units: str
    spectrum: SpectralDensity
    n_particles: int
    theta: float
    phi: float
    basis: Basis
    mqs_convention: MqsConvention
    horizon_factor: float
    outputs: tuple
    time_grid: dict | None
    snapshot_times: dict | None
    output_dir: str | None
    config: dict

    @property
    def sector(self) -> SectorLabel:
        return SectorLabel(self.n_particles)


def _build_spectrum(sp: dict) -> SpectralDensity:
    beta = sp["beta"] if sp["beta"] is not None else math.inf
    thermal = ThermalConvention(sp["thermal_convention"])
    kind = sp["kind"]
    if kind == SpectrumKind.OHMIC.value:
        return ohmic(sp["alpha"], sp["omega_c"], beta=beta,
                     thermal_convention=thermal)
    if kind == SpectrumKind.LORENTZIAN.value:
        return lorentzian(sp["alpha"], sp["omega_c"], sp["omega_0"],
                          beta=beta, thermal_convention=thermal)
    return tabulated(sp["table"], omega_c=sp["omega_c"], beta=beta,
                     thermal_convention=thermal)


def build_scenario(normalized: dict) -> Scenario:
    """Construct the physics objects for a validated config."""
    sp = dict(normalized["spectrum"])
    sp["thermal_convention"] = normalized["conventions"]["thermal"]
    return Scenario(
        name=normalized["name"],
        units=normalized["units"],
        spectrum=_build_spectrum(sp),
        n_particles=normalized["n_particles"],
        theta=normalized["theta"],
        phi=normalized["phi"],
        basis=Basis(normalized["basis"]),
        mqs_convention=MqsConvention(normalized["conventions"]["mqs"]),
        horizon_factor=normalized["solver"]["horizon_factor"],
        outputs=tuple(normalized["outputs"]),
        time_grid=normalized.get("time_grid"),
        snapshot_times=normalized.get("snapshot_times"),
        output_dir=normalized.get("output_dir"),
        config=normalized,
    )


# ---------------------------------------------------------------------------
# presets


def _presets() -> dict:
    quarter_pi = 0.7853981633974483   # pi/4
    half_pi = 1.5707963267948966      # pi/2
    # fig2 coupling calibrated so the accumulated phase t*f(t) reaches
    # pi/2 exactly at t = 100/omega_c: alpha = (pi/2) / 36.540666041034618,
    # the denominator being t*f(100) for the same spectrum at alpha = 1.
    alpha_fig2 = 0.042987621655032664
    # cavity coupling chosen so the integrated spectrum gives a collective
    # coupling rate eta = sqrt(integral G0) of 1 MHz for a far-detuned
    # line (omega_0 = 1e10 Hz, width 1e6 Hz): alpha = 1e6/pi.
    alpha_cavity = 318309.8861837907
    return {
        "fig1": {
            "schema": 1,
            "name": "fig1",
            "units": "omega_c",
            "spectrum": {"kind": "ohmic", "alpha": 2.5e-05, "omega_c": 1.0,
                         "beta": None},
            "n_particles": 50,
            "theta": quarter_pi,
            "phi": 0.0,
            "time_grid": {"kind": "log", "start": 0.01, "stop": 1e6,
                          "count": 121},
            "snapshot_times": {"kind": "tau-fractions", "values": [0.3, 1.0]},
            "basis": "Lx",
            "conventions": {"thermal": "coth-full", "mqs": "twist"},
            "solver": {"horizon_factor": 1e6},
            "outputs": ["kernels", "snapshots", "report"],
        },
        "fig2": {
            "schema": 1,
            "name": "fig2",
            "units": "omega_c",
            "spectrum": {"kind": "lorentzian", "alpha": alpha_fig2,
                         "omega_c": 1.0, "omega_0": 10.0, "beta": None},
            "n_particles": 50,
            "theta": half_pi,
            "phi": 0.0,
            "time_grid": {"kind": "log", "start": 0.01, "stop": 1000.0,
                          "count": 101},
            "snapshot_times": {"kind": "absolute", "values": [100.0]},
            "basis": "Lx",
            "conventions": {"thermal": "coth-full", "mqs": "twist"},
            "solver": {"horizon_factor": 1e6},
            "outputs": ["kernels", "snapshots", "report"],
        },
        # Acoustic-phonon estimate: Debye cutoff 1e13 Hz, weak coupling,
        # 0.5 mK temperature (beta = hbar/(k_B T) = 1.528e-8 s).
        "phonon": {
            "schema": 1,
            "name": "phonon",
            "units": "hz",
            "spectrum": {"kind": "ohmic", "alpha": 2e-07, "omega_c": 1e13,
                         "beta": 1.528e-08},
            "n_particles": 100,
            "theta": half_pi,
            "phi": 0.0,
            "basis": "Lz",
            "conventions": {"thermal": "coth-full", "mqs": "twist"},
            "solver": {"horizon_factor": 1e8},
            "outputs": ["report"],
        },
        # Far-detuned cavity estimate: 1 MHz linewidth at 10 GHz detuning,
        # 1 MHz collective coupling, zero temperature.
        "cavity": {
            "schema": 1,
            "name": "cavity",
            "units": "hz",
            "spectrum": {"kind": "lorentzian", "alpha": alpha_cavity,
                         "omega_c": 1e6, "omega_0": 1e10, "beta": None},
            "n_particles": 100,
            "theta": half_pi,
            "phi": 0.0,
            "basis": "Lz",
            "conventions": {"thermal": "coth-full", "mqs": "twist"},
            "solver": {"horizon_factor": 1e6},
            "outputs": ["report"],
        },
    }


def preset_names() -> list[str]:
    """Names of the built-in scenarios."""
    return sorted(_presets())


def preset_config(name: str) -> dict:
    """A fresh copy of the named preset's config document."""
    presets = _presets()
    if name not in presets:
        raise ConfigError(f"unknown preset {name!r}; available: "
                          + ", ".join(sorted(presets)))
    return copy.deepcopy(presets[name])


# ---------------------------------------------------------------------------
# artifact writing


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write_atomic(path: str, text: str):
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _time_grid_points(grid: dict) -> np.ndarray:
    if grid["kind"] == "log":
        return np.geomspace(grid["start"], grid["stop"], grid["count"])
    return np.linspace(grid["start"], grid["stop"], grid["count"])


def _snapshot_csv(rho, time: float) -> str:
    # |rho_{mm'}| magnitude grid; rows and columns run m = +l .. -l
    lines = [
        f"# basis = {rho.basis_tag.value}",
        f"# l = {float(rho.sector.l)!r}",
        f"# time = {float(time)!r}",
        "# grid = |rho| magnitudes, rows and columns ordered m = +l..-l",
    ]
    mags = np.abs(rho.elements)
    for row in mags:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def _report_payload(scn: Scenario, report) -> dict:
    sd = scn.spectrum
    spectrum = {
        "kind": sd.kind.value,
        "omega_c": sd.omega_c,
        "beta": None if sd.zero_temperature else sd.beta,
        "thermal_convention": sd.thermal_convention.value,
    }
    if sd.kind is SpectrumKind.TABULATED:
        w, g = sd.table_arrays()
        spectrum["table"] = [[float(a), float(b)] for a, b in zip(w, g)]
    else:
        spectrum["alpha"] = sd.alpha
        if sd.kind is SpectrumKind.LORENTZIAN:
            spectrum["omega_0"] = sd.omega_0
    return {
        "schema": 1,
        "name": scn.name,
        "units": scn.units,
        "spectrum": spectrum,
        "n_particles": scn.n_particles,
        "theta": scn.theta,
        "phi": scn.phi,
        "report": {
            "tau_mqs": report.tau_mqs,
            "f_at_tau": report.f_at_tau,
            "gamma_at_tau": report.gamma_at_tau,
            "fidelity": report.fidelity,
            "corner": report.corner,
            "purity": report.purity,
            "feasible": report.feasible,
            "n_max": report.n_max,
            "convention_used": report.convention_used,
        },
    }


def _annotate(exc: SpinCatError, operation: str):
    if not getattr(exc, "operation", None):
        exc.operation = operation
    return exc


def run_scenario(normalized: dict, output_dir: str | None = None) -> dict:
    """Execute a validated scenario and write its artifacts.

    Returns the summary dict that the CLI prints as one JSON line:
    scenario name, resolved output directory, the list of files written,
    and the formation report (when requested).  ``output_dir`` overrides
    the config's own setting.
    """
    scn = build_scenario(normalized)
    out_dir = output_dir or scn.output_dir or f"{scn.name}-out"
    os.makedirs(out_dir, exist_ok=True)
    files: list[str] = []
    summary: dict = {"name": scn.name, "output_dir": out_dir, "files": files,
                     "report": None}

    if "kernels" in scn.outputs:
        try:
            table = tabulate_kernels(scn.spectrum,
                                     _time_grid_points(scn.time_grid))
        except SpinCatError as exc:
            raise _annotate(exc, "kernel tabulation")
        _write_atomic(os.path.join(out_dir, "kernels.csv"),
                      "\n".join(table.csv_lines()) + "\n")
        files.append("kernels.csv")

    tau = None
    need_tau = "report" in scn.outputs or (
        "snapshots" in scn.outputs
        and scn.snapshot_times["kind"] == "tau-fractions")
    if need_tau:
        try:
            tau = solve_tau_mqs(scn.spectrum, scn.horizon_factor)
        except SpinCatError as exc:
            raise _annotate(exc, "formation-time solve")

    params = None
    if "report" in scn.outputs or "snapshots" in scn.outputs:
        initial = coherent_state(scn.sector, scn.theta, scn.phi)
        params = EvolutionParams(scn.spectrum, scn.sector, initial,
                                 mqs_convention=scn.mqs_convention,
                                 solve_horizon_factor=scn.horizon_factor)

    if "report" in scn.outputs:
        try:
            report = assess_mqs(params)
        except SpinCatError as exc:
            raise _annotate(exc, "formation assessment")
        payload = _report_payload(scn, report)
        _write_atomic(os.path.join(out_dir, "report.json"),
                      _json_dumps(payload))
        files.append("report.json")
        summary["report"] = payload["report"]

    if "snapshots" in scn.outputs:
        snap = scn.snapshot_times
        if snap["kind"] == "tau-fractions":
            times = [v * tau for v in snap["values"]]
        else:
            times = list(snap["values"])
        try:
            snaps = snapshot_series(params, times, scn.basis)
        except SpinCatError as exc:
            raise _annotate(exc, "snapshot evolution")
        index = []
        for i, (t, rho) in enumerate(zip(times, snaps)):
            fname = f"snapshot_{i:03d}.csv"
            _write_atomic(os.path.join(out_dir, fname), _snapshot_csv(rho, t))
            files.append(fname)
            index.append({
                "file": fname,
                "time": t,
                "basis": rho.basis_tag.value,
                "n_particles": scn.n_particles,
                "l": scn.sector.l,
            })
        _write_atomic(os.path.join(out_dir, "snapshots_index.json"),
                      _json_dumps({"schema": 1, "name": scn.name,
                                   "snapshots": index}))
        files.append("snapshots_index.json")

    return summary


# ---------------------------------------------------------------------------
# sweeps

_SWEEP_COLUMNS = ("tau_mqs", "f_at_tau", "gamma_at_tau", "fidelity", "corner",
                  "purity", "feasible", "n_max", "f_markov", "gamma_markov",
                  "error")


def _apply_axis(normalized: dict, axis: str, value: float) -> dict:
    cfg = copy.deepcopy(normalized)
    if axis == "N":
        n = int(value)
        if n != value or n < 1:
            raise ConfigError(f"N values must be positive integers, got {value!r}",
                              field="values")
        cfg["n_particles"] = n
    elif axis == "beta":
        if not value > 0.0:
            raise ConfigError(f"beta values must be > 0, got {value!r}",
                              field="values")
        cfg["spectrum"]["beta"] = value
    elif axis == "alpha":
        if value < 0.0:
            raise ConfigError(f"alpha values must be >= 0, got {value!r}",
                              field="values")
        cfg["spectrum"]["alpha"] = value
    elif axis == "omega_0":
        if not value > 0.0:
            raise ConfigError(f"omega_0 values must be > 0, got {value!r}",
                              field="values")
        cfg["spectrum"]["omega_0"] = value
    else:
        raise ConfigError(f"unknown sweep axis {axis!r}; "
                          f"expected one of {list(SWEEP_AXES)}", field="axis")
    return cfg


def _sweep_point(task) -> dict:
    normalized, axis, value = task
    row = {c: "" for c in _SWEEP_COLUMNS}
    try:
        cfg = _apply_axis(normalized, axis, value)
        scn = build_scenario(cfg)
        initial = coherent_state(scn.sector, scn.theta, scn.phi)
        params = EvolutionParams(scn.spectrum, scn.sector, initial,
                                 mqs_convention=scn.mqs_convention,
                                 solve_horizon_factor=scn.horizon_factor)
        report = assess_mqs(params)
        limits = markov_limits(scn.spectrum)
        row.update(
            tau_mqs=report.tau_mqs, f_at_tau=report.f_at_tau,
            gamma_at_tau=report.gamma_at_tau, fidelity=report.fidelity,
            corner=report.corner, purity=report.purity,
            feasible=report.feasible,
            n_max="" if report.n_max is None else report.n_max,
            f_markov=limits.f_markov, gamma_markov=limits.gamma_markov,
        )
    except SpinCatError as exc:
        row["error"] = str(exc)
    return row


def _format_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def sweep(normalized: dict, axis: str, values, jobs: int = 1,
          output_dir: str | None = None) -> dict:
    """Run the scenario once per axis value and emit a CSV table.

    One row per value, in input order; a failed point fills the ``error``
    column and the sweep continues.  ``jobs > 1`` distributes points over
    a process pool; results are identical to a serial run.
    """
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; "
                          f"expected one of {list(SWEEP_AXES)}", field="axis")
    values = list(values)
    if not values:
        raise ConfigError("sweep needs at least one value", field="values")
    if axis == "N":
        # the axis column prints integers whether values arrived as 2 or 2.0
        values = [int(v) if isinstance(v, float) and v.is_integer() else v
                  for v in values]
    if axis == "omega_0" and normalized["spectrum"]["kind"] != "lorentzian":
        raise ConfigError("omega_0 sweeps require a lorentzian spectrum",
                          field="axis")
    base = copy.deepcopy(normalized)
    base["outputs"] = ["report"]
    tasks = [(base, axis, v) for v in values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]

    out_dir = output_dir or normalized.get("output_dir") or f"{normalized['name']}-out"
    os.makedirs(out_dir, exist_ok=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow((axis,) + _SWEEP_COLUMNS)
    for value, row in zip(values, rows):
        writer.writerow([_format_cell(value)]
                        + [_format_cell(row[c]) for c in _SWEEP_COLUMNS])
    path = os.path.join(out_dir, "sweep.csv")
    _write_atomic(path, buf.getvalue())
    n_failed = sum(1 for r in rows if r["error"])
    return {"name": normalized["name"], "output_dir": out_dir, "axis": axis,
            "files": ["sweep.csv"], "points": len(values), "failed": n_failed}
