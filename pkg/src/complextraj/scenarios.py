"""Declarative scenario execution.

A ScenarioConfig describes one batch run: a state (or classical system),
the kind of field to integrate, initial points, time span, integrator
settings, requested analyses and output formats.  run_scenario integrates
every initial point (fanned out across worker threads), runs the analyses,
writes CSV/JSON/SVG artifacts atomically and returns a RunReport.  Output
is deterministic for a fixed config.

Builtin presets cover the standard survey: eigenstate orbit families,
closed and truncated coherent oscillator runs, well and Poschl-Teller
coherent states, complex classical comparisons, and a pilot-wave contrast
run.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum

from . import analysis
from .emitters import emit_csv, emit_json, emit_svg
from .errors import ConfigError, DegenerateFitError, InputDomainError
from .fields import (
    ClassicalSystem,
    DBBField,
    EnergySpec,
    HOCoherentClosedField,
    QuantumVelocityField,
    SystemKind,
    classical_ho_solution,
    free_particle_solution,
    initial_momentum,
)
from .integrate import (
    IntegratorConfig,
    Method,
    StopKind,
    StopReason,
    Trajectory,
    integrate_field,
    integrate_hamiltonian,
)
from .states import Family, ModelParams, StateSpec

import numpy as np


class FieldKind(str, Enum):
    QUANTUM_LOG_DERIVATIVE = "quantum_log_derivative"
    HO_COHERENT_CLOSED = "ho_coherent_closed"
    DBB = "dbb"
    CLASSICAL_HAMILTONIAN = "classical_hamiltonian"
    CLASSICAL_ANALYTIC = "classical_analytic"


ANALYSES = ("ellipse", "period", "abs_position_drift", "energy_drift")
OUTPUTS = ("csv", "json", "svg")


@dataclass
class ScenarioConfig:
    name: str
    field_kind: FieldKind
    t_span: tuple
    initial_points: list
    params: ModelParams = field(default_factory=ModelParams)
    state: StateSpec | None = None
    system: ClassicalSystem | None = None
    energy: EnergySpec | None = None
    momentum_signs: list | None = None
    samples: int = 2000
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    outputs: tuple = OUTPUTS
    analyses: tuple = ()
    period_window: tuple | None = None
    description: str = ""


@dataclass
class RunReport:
    name: str
    stop_kinds: list
    analyses: list
    wall_time: float
    config_echo: dict
    artifacts: list


def validate_config(cfg: ScenarioConfig) -> None:
    """Collects every violation before raising, so one pass reports all."""
    problems = []
    if not cfg.name:
        problems.append("name: must be nonempty")
    if not isinstance(cfg.field_kind, FieldKind):
        problems.append(f"field_kind: unknown kind {cfg.field_kind!r}")
    if not cfg.initial_points:
        problems.append("initial_points: at least one initial point is required")
    if len(cfg.t_span) != 2 or not cfg.t_span[1] > cfg.t_span[0]:
        problems.append(f"t_span: must be increasing, got {cfg.t_span}")
    if cfg.samples < 2:
        problems.append("samples: must be at least 2")
    quantum = cfg.field_kind in (
        FieldKind.QUANTUM_LOG_DERIVATIVE,
        FieldKind.HO_COHERENT_CLOSED,
        FieldKind.DBB,
    )
    if quantum and cfg.state is None:
        problems.append("state: required for quantum and pilot-wave runs")
    classical = cfg.field_kind in (
        FieldKind.CLASSICAL_HAMILTONIAN,
        FieldKind.CLASSICAL_ANALYTIC,
    )
    if classical and cfg.system is None:
        problems.append("system: required for classical runs")
    if classical and cfg.energy is None:
        problems.append("energy: required for classical runs")
    if cfg.momentum_signs is not None and len(cfg.momentum_signs) != len(cfg.initial_points):
        problems.append("momentum_signs: length must match initial_points")
    for a in cfg.analyses:
        if a not in ANALYSES:
            problems.append(f"analyses: unknown analysis {a!r}")
    for o in cfg.outputs:
        if o not in OUTPUTS:
            problems.append(f"outputs: unknown output {o!r}")
    if problems:
        raise ConfigError(problems)


# -- trajectory production -------------------------------------------------------

def _run_one(cfg: ScenarioConfig, index: int) -> Trajectory:
    x0 = complex(cfg.initial_points[index])
    meta = {"scenario": cfg.name, "index": index, "x0": x0}
    kind = cfg.field_kind
    if kind is FieldKind.QUANTUM_LOG_DERIVATIVE:
        fld = QuantumVelocityField(
            cfg.params, cfg.state, pole_psi_floor=cfg.integrator.pole_psi_floor
        )
        return integrate_field(fld, x0, cfg.t_span, cfg.integrator, cfg.samples, meta)
    if kind is FieldKind.HO_COHERENT_CLOSED:
        fld = HOCoherentClosedField(cfg.params, cfg.state.lam, cfg.state.kappa)
        return integrate_field(fld, x0, cfg.t_span, cfg.integrator, cfg.samples, meta)
    if kind is FieldKind.DBB:
        fld = DBBField(cfg.state.lam, cfg.state.kappa, cfg.params.omega)
        return integrate_field(fld, x0, cfg.t_span, cfg.integrator, cfg.samples, meta)
    sign = 1 if cfg.momentum_signs is None else int(cfg.momentum_signs[index])
    if kind is FieldKind.CLASSICAL_HAMILTONIAN:
        p0 = sign * initial_momentum(cfg.system, x0, cfg.energy)
        return integrate_hamiltonian(
            cfg.system, x0, p0, cfg.t_span, cfg.integrator, cfg.samples, meta
        )
    # CLASSICAL_ANALYTIC: evaluate the closed-form solution at sample times
    ts = np.linspace(cfg.t_span[0], cfg.t_span[1], cfg.samples)
    if cfg.system.kind is SystemKind.HARMONIC:
        xs = np.array(
            [classical_ho_solution(x0.real, cfg.energy, cfg.system.params, t) for t in ts]
        )
    elif cfg.system.kind is SystemKind.FREE:
        xs = np.array(
            [
                free_particle_solution(cfg.energy, x0.real, x0.imag, sign, cfg.system.params, t)
                for t in ts
            ]
        )
    else:
        raise ConfigError(["field_kind: no analytic solution for the Poschl-Teller system"])
    return Trajectory(
        times=ts, positions=xs, momenta=None,
        stop=StopReason(StopKind.COMPLETED, {"time": float(ts[-1])}), meta=meta,
    )


def _analyze_one(cfg: ScenarioConfig, traj: Trajectory) -> dict:
    out = {"index": traj.meta.get("index"), "x0": _cplx(traj.meta.get("x0"))}
    for name in cfg.analyses:
        if name == "ellipse":
            if len(traj) >= 16:
                try:
                    f = analysis.fit_ellipse(traj)
                    out["ellipse"] = {
                        "A": f.A, "B": f.B, "center": _cplx(f.center),
                        "phase": f.phase, "residual": f.residual,
                    }
                except DegenerateFitError as exc:
                    out["ellipse"] = {"degenerate": str(exc)}
        elif name == "period":
            window = cfg.period_window or (traj.times[0], traj.times[-1])
            window = (max(window[0], traj.times[0]), min(window[1], traj.times[-1]))
            try:
                p = analysis.detect_period(traj, window)
                out["period"] = {
                    "period": p.period,
                    "recurrence_error": p.recurrence_error,
                    "orientation": p.orientation.value,
                    "periodic": p.periodic,
                }
            except InputDomainError as exc:
                out["period"] = {"skipped": str(exc)}
        elif name == "abs_position_drift":
            out["abs_position_drift"] = analysis.conserved_drift(traj, analysis.ABS_POSITION)
        elif name == "energy_drift":
            if traj.momenta is not None and cfg.system is not None:
                out["energy_drift"] = analysis.conserved_drift(
                    traj, analysis.COMPLEX_ENERGY, system=cfg.system
                )
    return out


def _cplx(z) -> list | None:
    if z is None:
        return None
    z = complex(z)
    return [z.real, z.imag]


def run_scenario(cfg: ScenarioConfig, out_dir: str = ".") -> RunReport:
    """Integrate, analyze and persist one scenario batch."""
    validate_config(cfg)
    started = time.perf_counter()
    os.makedirs(out_dir, exist_ok=True)

    n = len(cfg.initial_points)
    workers = min(n, os.cpu_count() or 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trajectories = list(pool.map(lambda i: _run_one(cfg, i), range(n)))
    else:
        trajectories = [_run_one(cfg, i) for i in range(n)]

    results = [_analyze_one(cfg, tr) for tr in trajectories]
    stop_kinds = [tr.stop.kind.value for tr in trajectories]

    artifacts = []
    if "csv" in cfg.outputs:
        for i, tr in enumerate(trajectories):
            path = os.path.join(out_dir, f"{cfg.name}_traj{i:02d}.csv")
            emit_csv(tr, path)
            artifacts.append(path)
    if "svg" in cfg.outputs:
        path = os.path.join(out_dir, f"{cfg.name}.svg")
        emit_svg(trajectories, path, title=cfg.name)
        artifacts.append(path)

    wall = time.perf_counter() - started
    report = RunReport(
        name=cfg.name,
        stop_kinds=stop_kinds,
        analyses=results,
        wall_time=wall,
        config_echo=config_echo(cfg),
        artifacts=artifacts,
    )
    if "json" in cfg.outputs:
        path = os.path.join(out_dir, f"{cfg.name}_report.json")
        # wall time is intentionally left out of the artifact so repeated
        # runs of the same config are byte-identical
        emit_json(
            {
                "name": report.name,
                "stop_kinds": report.stop_kinds,
                "stops": [
                    {"kind": tr.stop.kind.value, "detail": _jsonable(tr.stop.detail)}
                    for tr in trajectories
                ],
                "analyses": report.analyses,
                "config": report.config_echo,
                "artifacts": [os.path.basename(a) for a in report.artifacts],
            },
            path,
        )
        artifacts.append(path)
    return report


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.complexfloating):
        return [obj.real.item(), obj.imag.item()]
    return obj


def config_echo(cfg: ScenarioConfig) -> dict:
    """Full config with every default resolved; a run is reproducible from it."""
    echo = {
        "name": cfg.name,
        "description": cfg.description,
        "field_kind": cfg.field_kind.value,
        "t_span": [float(cfg.t_span[0]), float(cfg.t_span[1])],
        "initial_points": [_cplx(z) for z in cfg.initial_points],
        "samples": cfg.samples,
        "params": {
            "hbar": cfg.params.hbar, "mass": cfg.params.mass,
            "omega": cfg.params.omega, "a": cfg.params.a,
        },
        "integrator": {
            "method": cfg.integrator.method.value,
            "dt_init": cfg.integrator.dt_init,
            "rel_tol": cfg.integrator.rel_tol,
            "abs_tol": cfg.integrator.abs_tol,
            "dt_min": cfg.integrator.dt_min,
            "max_steps": cfg.integrator.max_steps,
            "pole_psi_floor": cfg.integrator.pole_psi_floor,
            "domain_margin": cfg.integrator.domain_margin,
        },
        "outputs": list(cfg.outputs),
        "analyses": list(cfg.analyses),
    }
    if cfg.state is not None:
        echo["state"] = {
            "family": cfg.state.family.value, "n": cfg.state.n,
            "lam": cfg.state.lam, "kappa": cfg.state.kappa,
            "J": cfg.state.J, "l": cfg.state.l, "n_max": cfg.state.n_max,
        }
    if cfg.system is not None:
        echo["system"] = {"kind": cfg.system.kind.value, "l": cfg.system.l}
    if cfg.energy is not None:
        echo["energy"] = cfg.energy.E
    if cfg.momentum_signs is not None:
        echo["momentum_signs"] = [int(s) for s in cfg.momentum_signs]
    if cfg.period_window is not None:
        echo["period_window"] = [float(cfg.period_window[0]), float(cfg.period_window[1])]
    return echo


# -- config files -----------------------------------------------------------------

def load_config(path: str) -> ScenarioConfig:
    """Read a scenario from a JSON file (the config_echo layout)."""
    with open(path) as handle:
        raw = json.load(handle)
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> ScenarioConfig:
    problems = []

    def grab(key, default=None, required=False):
        if key not in raw:
            if required:
                problems.append(f"{key}: missing required field")
            return default
        return raw[key]

    name = grab("name", required=True)
    kind_raw = grab("field_kind", required=True)
    try:
        kind = FieldKind(kind_raw) if kind_raw is not None else None
    except ValueError:
        problems.append(f"field_kind: unknown kind {kind_raw!r}")
        kind = None
    t_span = grab("t_span", required=True)
    pts_raw = grab("initial_points", default=[], required=True) or []
    points = []
    for entry in pts_raw:
        if isinstance(entry, (int, float)):
            points.append(complex(entry, 0.0))
        elif isinstance(entry, (list, tuple)) and len(entry) == 2:
            points.append(complex(entry[0], entry[1]))
        else:
            problems.append(f"initial_points: cannot parse entry {entry!r}")

    params_raw = grab("params", default={}) or {}
    try:
        params = ModelParams(**params_raw)
    except (TypeError, InputDomainError) as exc:
        problems.append(f"params: {exc}")
        params = ModelParams()

    state = None
    if raw.get("state") is not None:
        s = raw["state"]
        try:
            state = StateSpec(
                family=Family(s["family"]),
                n=int(s.get("n", 0)),
                lam=float(s.get("lam", 0.0)),
                kappa=float(s.get("kappa", 0.0)),
                J=float(s.get("J", 0.0)),
                l=float(s.get("l", 1.5)),
                n_max=int(s.get("n_max", 0)),
            )
        except (KeyError, ValueError, InputDomainError) as exc:
            problems.append(f"state: {exc}")

    system = None
    if raw.get("system") is not None:
        s = raw["system"]
        try:
            system = ClassicalSystem(
                kind=SystemKind(s["kind"]), params=params, l=float(s.get("l", 1.5))
            )
        except (KeyError, ValueError, InputDomainError) as exc:
            problems.append(f"system: {exc}")

    energy = None
    if raw.get("energy") is not None:
        try:
            energy = EnergySpec(float(raw["energy"]))
        except (ValueError, InputDomainError) as exc:
            problems.append(f"energy: {exc}")

    integ_raw = grab("integrator", default={}) or {}
    try:
        if "method" in integ_raw:
            integ_raw = dict(integ_raw)
            integ_raw["method"] = Method(integ_raw["method"])
        integrator = IntegratorConfig(**integ_raw)
    except (TypeError, ValueError, InputDomainError) as exc:
        problems.append(f"integrator: {exc}")
        integrator = IntegratorConfig()

    if problems:
        raise ConfigError(problems)

    cfg = ScenarioConfig(
        name=name,
        field_kind=kind,
        t_span=tuple(t_span),
        initial_points=points,
        params=params,
        state=state,
        system=system,
        energy=energy,
        momentum_signs=raw.get("momentum_signs"),
        samples=int(raw.get("samples", 2000)),
        integrator=integrator,
        outputs=tuple(raw.get("outputs", OUTPUTS)),
        analyses=tuple(raw.get("analyses", ())),
        period_window=tuple(raw["period_window"]) if raw.get("period_window") else None,
        description=raw.get("description", ""),
    )
    validate_config(cfg)
    return cfg


# -- builtin presets ---------------------------------------------------------------

HO_EIGEN_POINTS = [0.25 * k for k in range(1, 9)]
# midpoint spacing keeps every start clear of the sine eigenfunction nodes
WELL_EIGEN_POINTS = [math.pi * (2 * k - 1) / 16.0 for k in range(1, 9)]
HO_COHERENT_POINTS = [2.2, 2.3, 2.4, 2.5, 2.6, 2.7, 2.8, 2.9]
WELL_COHERENT_POINTS = [1.6, 2.0, 2.4, 3.1]
WELL_COHERENT_J = (0.04, 0.09, 0.16, 0.25, 0.36)
PT_COHERENT_POINTS = [0.2, 0.67, 0.7015]
CLASSICAL_HO_AMPLITUDES = [3.05, 3.2, 3.35, 3.5, 3.65, 3.8]
CLASSICAL_PT_POINTS = [0.12, 0.16, 0.20, 0.24]

TWO_PI = 2.0 * math.pi


def _presets() -> dict:
    table = {}

    for n in range(5):
        table[f"ho_eigen_n{n}"] = ScenarioConfig(
            name=f"ho_eigen_n{n}",
            description=f"oscillator eigenstate n={n} orbit family",
            field_kind=FieldKind.QUANTUM_LOG_DERIVATIVE,
            state=StateSpec(family=Family.HO_EIGEN, n=n),
            t_span=(0.0, 20.0),
            initial_points=list(HO_EIGEN_POINTS),
            analyses=("abs_position_drift",) if n == 0 else (),
        )
    for n in range(4):
        table[f"well_eigen_n{n}"] = ScenarioConfig(
            name=f"well_eigen_n{n}",
            description=f"infinite-well eigenstate n={n} orbit family",
            field_kind=FieldKind.QUANTUM_LOG_DERIVATIVE,
            state=StateSpec(family=Family.WELL_EIGEN, n=n),
            t_span=(0.0, 20.0),
            initial_points=list(WELL_EIGEN_POINTS),
        )
    table["ho_coherent_lambda21"] = ScenarioConfig(
        name="ho_coherent_lambda21",
        description="oscillator coherent state |z|=2.1, truncated series field (n_max=4)",
        field_kind=FieldKind.QUANTUM_LOG_DERIVATIVE,
        state=StateSpec(family=Family.HO_COHERENT_SERIES, lam=2.1, kappa=0.0, n_max=4),
        t_span=(0.0, TWO_PI),
        initial_points=list(HO_COHERENT_POINTS),
        analyses=("ellipse",),
    )
    table["ho_coherent_closed_lambda21"] = ScenarioConfig(
        name="ho_coherent_closed_lambda21",
        description="oscillator coherent state |z|=2.1, closed-form field",
        field_kind=FieldKind.HO_COHERENT_CLOSED,
        state=StateSpec(family=Family.HO_COHERENT_CLOSED, lam=2.1, kappa=0.0),
        t_span=(0.0, TWO_PI),
        initial_points=list(HO_COHERENT_POINTS),
        analyses=("ellipse",),
    )
    for J in WELL_COHERENT_J:
        tag = f"{J:.2f}".replace("0.", "j0")
        table[f"well_coherent_{tag}"] = ScenarioConfig(
            name=f"well_coherent_{tag}",
            description=f"infinite-well coherent state J={J}, n_max=7",
            field_kind=FieldKind.QUANTUM_LOG_DERIVATIVE,
            state=StateSpec(family=Family.WELL_COHERENT, J=J, n_max=7),
            t_span=(0.0, TWO_PI),
            initial_points=list(WELL_COHERENT_POINTS),
        )
    table["pt_coherent_j016"] = ScenarioConfig(
        name="pt_coherent_j016",
        description="Poschl-Teller coherent state J=0.16, l=3/2, long-time run",
        field_kind=FieldKind.QUANTUM_LOG_DERIVATIVE,
        state=StateSpec(family=Family.PT_COHERENT, J=0.16, l=1.5, n_max=4),
        t_span=(0.0, 100.0),
        initial_points=list(PT_COHERENT_POINTS),
        samples=4000,
        analyses=("period",),
        period_window=(50.0, 100.0),
    )
    table["classical_ho_e45"] = ScenarioConfig(
        name="classical_ho_e45",
        description="complex classical oscillator ellipses at E=4.5",
        field_kind=FieldKind.CLASSICAL_HAMILTONIAN,
        system=ClassicalSystem(SystemKind.HARMONIC),
        energy=EnergySpec(4.5),
        t_span=(0.0, TWO_PI),
        initial_points=[complex(a, 0.0) for a in CLASSICAL_HO_AMPLITUDES],
        analyses=("ellipse", "energy_drift"),
    )
    table["classical_pt_e225"] = ScenarioConfig(
        name="classical_pt_e225",
        description="complex classical Poschl-Teller loops at E=2.25",
        field_kind=FieldKind.CLASSICAL_HAMILTONIAN,
        system=ClassicalSystem(SystemKind.POSCHL_TELLER, l=1.5),
        energy=EnergySpec(2.25),
        t_span=(0.0, 20.0),
        initial_points=[complex(x, 0.0) for x in CLASSICAL_PT_POINTS],
        analyses=("energy_drift",),
    )
    table["dbb_lambda21"] = ScenarioConfig(
        name="dbb_lambda21",
        description="pilot-wave contrast run for the |z|=2.1 coherent state",
        field_kind=FieldKind.DBB,
        state=StateSpec(family=Family.HO_COHERENT_CLOSED, lam=2.1, kappa=0.0),
        t_span=(0.0, TWO_PI),
        initial_points=[0.5, 1.0, 1.5, 2.0],
    )
    return table


PRESETS = _presets()


def preset(name: str) -> ScenarioConfig:
    if name not in PRESETS:
        raise ConfigError([f"preset: unknown preset {name!r}; see list-presets"])
    cfg = PRESETS[name]
    # hand out an independent copy so callers can tweak freely
    return replace(cfg, initial_points=list(cfg.initial_points))


def preset_names() -> list:
    return sorted(PRESETS)
