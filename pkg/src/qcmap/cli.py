"""Command-line interface: spectrum | evolve | compare | sweep.

Runs are described by an INI-style config file (sections ``model``, ``run``,
``plan``, ``output``, ``sweep``) with command-line flags taking precedence.
All times and energies use hbar = 1 (energies are angular frequencies).

Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import analysis, classical_exact, classical_rca, quantum
from .integrators import IntegrationPlan, Trajectory, propose_dt
from .linalg import LinalgError
from .models import (
    Hamiltonian,
    LcCircuitPair,
    ModelError,
    build_dimer,
    build_ring,
    hamiltonian_from_dense,
    lc_to_oscillator,
)

MODELS = ("dimer", "ring", "dense", "lc")
METHODS = ("quantum-spectral", "quantum-ode", "classical-exact", "classical-rca", "classical-rca-spring")
DAMPABLE = ("quantum-ode", "classical-rca", "classical-rca-spring")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(ValueError):
    pass


def fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class RunConfig:
    model: str = "dimer"
    params: dict = field(default_factory=dict)
    methods: tuple = ("quantum-spectral", "classical-exact")
    gamma: tuple | None = None
    initial_state: object = 0
    dt: float | None = None
    t_end: float | None = None
    tau_end: float | None = None
    samples: int = 1001
    out: str = "qcmap"
    workers: int = 1
    pairs: tuple | None = None
    sweep_k: tuple = ()

    def hamiltonian(self) -> Hamiltonian:
        p = self.params
        try:
            if self.model == "dimer":
                if "epsilon" in p or "v" in p:
                    return build_dimer(p.get("epsilon", 1.0), p.get("v", 0.0))
                # the dimer that pendula with spring constant k reproduce
                omega = p.get("omega", 1.0)
                return build_dimer(omega, -p.get("k", 0.0) / (2.0 * omega))
            if self.model == "ring":
                if "n" not in p:
                    raise ConfigError("ring model needs n")
                return build_ring(int(p["n"]), p.get("epsilon", 1.0), p.get("v", 0.0))
            if self.model == "dense":
                if "matrix" not in p:
                    raise ConfigError("dense model needs matrix")
                return hamiltonian_from_dense(p["matrix"])
            if self.model == "lc":
                circuit = LcCircuitPair(p.get("inductance", 1.0), p.get("capacitance", 1.0),
                                        p.get("coupling_capacitance", 0.0))
                osc = lc_to_oscillator(circuit)
                return build_dimer(osc.omega, osc.v_equiv)
        except ModelError as exc:
            raise ConfigError(str(exc)) from exc
        raise ConfigError(f"unknown model {self.model!r}; expected one of {MODELS}")

    def initial_vector(self, n: int) -> np.ndarray:
        s = self.initial_state
        if isinstance(s, int):
            try:
                return quantum.site_state(n, s)
            except IndexError as exc:
                raise ConfigError(str(exc)) from exc
        c = np.asarray(s, dtype=np.complex128)
        if c.shape != (n,):
            raise ConfigError(f"initial_state has {c.size} entries, model has {n} sites")
        norm = math.sqrt(float(np.vdot(c, c).real))
        if norm == 0:
            raise ConfigError("initial_state is the zero vector")
        return c / norm

    def coherence_pairs(self, n: int):
        if self.pairs is not None:
            for i, j in self.pairs:
                if not (0 <= i < n and 0 <= j < n):
                    raise ConfigError(f"coherence pair {i}-{j} out of range for {n} sites")
            return list(self.pairs)
        return [(i, j) for i in range(n) for j in range(i + 1, n)] if n <= 4 else [(0, 1)]


def coupling_scale(h: Hamiltonian) -> float:
    """max|V_nm|; sets the figure time unit tau = scale * t."""
    return float(np.max(np.abs(h.v)))


def make_plan(cfg: RunConfig, h: Hamiltonian) -> IntegrationPlan:
    dt = cfg.dt if cfg.dt is not None else propose_dt(h.spectrum.eigenvalues)
    if cfg.t_end is not None:
        t_end = cfg.t_end
    else:
        scale = coupling_scale(h)
        tau_end = cfg.tau_end if cfg.tau_end is not None else 2.0 * math.pi
        t_end = tau_end / scale if scale > 0 else 100.0
    if not t_end > 0:
        raise ConfigError(f"t_end must be positive, got {t_end}")
    if dt <= 0:
        raise ConfigError(f"dt must be positive, got {dt}")
    try:
        return IntegrationPlan.uniform(dt, t_end, cfg.samples)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def method_shift(method: str, h: Hamiltonian) -> float:
    """Overall eigenfrequency offset of a method relative to the quantum spectrum."""
    if method == "classical-rca":
        return classical_rca.spectral_shift(classical_rca.build_q_coupled(h))
    if method == "classical-rca-spring":
        return classical_rca.spectral_shift(classical_rca.build_q_coupled_spring(h))
    return 0.0


def run_method(method: str, h: Hamiltonian, c0, plan: IntegrationPlan, gamma=None) -> Trajectory:
    if gamma is not None and method not in DAMPABLE:
        raise ConfigError(f"method {method} has no damped form; damping works with {', '.join(DAMPABLE)}")
    if method == "quantum-spectral":
        return quantum.propagate_spectral(h, c0, plan.sample_times)
    if method == "quantum-ode":
        if gamma is not None:
            return quantum.propagate_damped(h, gamma, c0, plan)
        return quantum.propagate_ode(h, c0, plan)
    if method == "classical-exact":
        return classical_exact.exact_classical_evolve(h, c0, plan)
    if method in ("classical-rca", "classical-rca-spring"):
        sys_ = classical_rca.build(h, "bare" if method == "classical-rca" else "spring")
        if gamma is not None:
            sys_ = classical_rca.build_damped(sys_, gamma)
        return classical_rca.rca_evolve(sys_, c0, plan)
    raise ConfigError(f"unknown method {method!r}; expected one of {METHODS}")


def _gamma(cfg: RunConfig, n: int):
    if cfg.gamma is None:
        return None
    g = np.asarray(cfg.gamma, dtype=np.float64)
    if g.size == 1:
        g = np.full(n, g[0])
    if g.shape != (n,):
        raise ConfigError(f"gamma needs 1 or {n} entries, got {g.size}")
    if np.any(g < 0):
        raise ConfigError("gamma entries must be non-negative")
    return g


# --- files -----------------------------------------------------------------


def trajectory_header(n: int, pairs) -> list:
    cols = ["t"]
    for k in range(n):
        cols += [f"q_{k}", f"p_{k}", f"re_z_{k}", f"im_z_{k}", f"pop_{k}"]
    for i, j in pairs:
        cols += [f"re_coh_{i}_{j}", f"im_coh_{i}_{j}"]
    return cols


def write_trajectory_csv(path: str, traj: Trajectory, pairs) -> None:
    n = traj.n
    root2 = math.sqrt(2.0)
    pops = analysis.populations(traj.z)
    cohs = [analysis.coherence(traj.z, i, j) for i, j in pairs]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(trajectory_header(n, pairs))
        for r, t in enumerate(traj.t):
            z = traj.z[r]
            row = [fmt(t)]
            for k in range(n):
                row += [fmt(root2 * z[k].real), fmt(root2 * z[k].imag), fmt(z[k].real), fmt(z[k].imag), fmt(pops[r, k])]
            for coh in cohs:
                row += [fmt(coh[r].real), fmt(coh[r].imag)]
            w.writerow(row)


def read_trajectory_csv(path: str) -> Trajectory:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    re_cols = [i for i, name in enumerate(header) if name.startswith("re_z_")]
    im_cols = [i for i, name in enumerate(header) if name.startswith("im_z_")]
    data = np.array([[float(x) for x in row] for row in body]).reshape(len(body), len(header))
    return Trajectory(data[:, 0], data[:, re_cols] + 1j * data[:, im_cols])


def write_report(path: str, items) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in items:
            fh.write(f"{key}: {value}\n")


class _Outputs:
    """Tracks written files and removes them if the command fails."""

    def __init__(self):
        self.paths = []

    def add(self, path):
        d = os.path.dirname(path)
        if d:
            os.makedirs(d, exist_ok=True)
        self.paths.append(path)
        return path

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            for p in self.paths:
                if os.path.exists(p):
                    os.remove(p)
        return False


# --- commands --------------------------------------------------------------


def cmd_spectrum(cfg: RunConfig) -> list:
    h = cfg.hamiltonian()
    dec = h.spectrum
    items = [("model", cfg.model), ("n", h.n)]
    for k, (e, b) in enumerate(zip(dec.eigenvalues, dec.eigenvectors)):
        items.append((f"eigenvalue_{k}", fmt(e)))
        items.append((f"eigenvector_{k}", " ".join(fmt(x) for x in b)))
    pq = classical_exact.build_pq_system(h)
    for k, w in enumerate(pq.eigenfrequencies()):
        items.append((f"pq_eigenfrequency_{k}", fmt(w)))
    for variant in classical_rca.VARIANTS:
        rsys = classical_rca.build(h, variant)
        for k, e in enumerate(classical_rca.rca_effective_spectrum(rsys).eigenvalues):
            items.append((f"rca_{variant}_effective_{k}", fmt(e)))
        for k, w in enumerate(rsys.second_order.eigenfrequencies()):
            items.append((f"rca_{variant}_eigenfrequency_{k}", fmt(w)))
    val = classical_rca.rca_validity_ratio(h)
    items += [
        ("rca_ratio", fmt(val.ratio)),
        ("rca_second_order_ratio", fmt(val.second_order_ratio)),
        ("rca_nonrotating_scale", fmt(val.nonrotating_scale)),
        ("rca_regime", val.regime),
    ]
    if h.n <= 4:
        _, linear, quadratic = classical_exact.pq_stiffness_terms(h)
        for i in range(h.n):
            items.append((f"pq_linear_row_{i}", " ".join(fmt(x) for x in linear[i])))
            items.append((f"pq_quadratic_row_{i}", " ".join(fmt(x) for x in quadratic[i])))
    with _Outputs() as out:
        path = out.add(f"{cfg.out}_spectrum.txt")
        write_report(path, items)
    return out.paths


def cmd_evolve(cfg: RunConfig) -> list:
    h = cfg.hamiltonian()
    c0 = cfg.initial_vector(h.n)
    plan = make_plan(cfg, h)
    gamma = _gamma(cfg, h.n)
    pairs = cfg.coherence_pairs(h.n)
    with _Outputs() as out:
        for method in cfg.methods:
            traj = run_method(method, h, c0, plan, gamma)
            write_trajectory_csv(out.add(f"{cfg.out}_{method}.csv"), traj, pairs)
    return out.paths


def comparison(cfg: RunConfig):
    """Run the two configured methods; return ``(h, trajectories, report, shift)``."""
    if len(cfg.methods) != 2:
        raise ConfigError(f"compare needs exactly two methods, got {len(cfg.methods)}")
    h = cfg.hamiltonian()
    c0 = cfg.initial_vector(h.n)
    plan = make_plan(cfg, h)
    gamma = _gamma(cfg, h.n)
    a_name, b_name = cfg.methods
    a = run_method(a_name, h, c0, plan, gamma)
    b = run_method(b_name, h, c0, plan, gamma)
    shift = method_shift(b_name, h) - method_shift(a_name, h)
    report = analysis.compare(a, b, phase_shift=shift if shift != 0.0 else None)
    return h, (a, b), report, shift


def _report_items(cfg: RunConfig, h: Hamiltonian, report) -> list:
    items = [("model", cfg.model), ("method_a", cfg.methods[0]), ("method_b", cfg.methods[1])]
    items += [(k, "true" if v is True else "false" if v is False else fmt(v)) for k, v in report.as_dict().items()]
    val = classical_rca.rca_validity_ratio(h)
    items += [("rca_ratio", fmt(val.ratio)), ("rca_regime", val.regime), ("time_unit_coupling", fmt(coupling_scale(h)))]
    return items


def cmd_compare(cfg: RunConfig) -> list:
    h, (a, b), report, shift = comparison(cfg)
    pairs = cfg.coherence_pairs(h.n)
    scale = coupling_scale(h)
    tau = a.t * scale if scale > 0 else a.t
    b_comp = classical_rca.phase_compensate(b, shift)
    cols = ["t", "tau"]
    n = h.n
    cols += [f"pop_a_{k}" for k in range(n)] + [f"pop_b_{k}" for k in range(n)]
    cols += [f"re_a_{k}" for k in range(n)] + [f"re_b_comp_{k}" for k in range(n)]
    for i, j in pairs:
        cols += [f"im_coh_a_{i}_{j}", f"im_coh_b_{i}_{j}"]
    pa, pb = analysis.populations(a.z), analysis.populations(b.z)
    coh = [(analysis.coherence(a.z, i, j).imag, analysis.coherence(b.z, i, j).imag) for i, j in pairs]
    with _Outputs() as out:
        write_report(out.add(f"{cfg.out}_compare.txt"), _report_items(cfg, h, report))
        with open(out.add(f"{cfg.out}_figure.csv"), "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for r in range(len(a.t)):
                row = [fmt(a.t[r]), fmt(tau[r])]
                row += [fmt(x) for x in pa[r]] + [fmt(x) for x in pb[r]]
                row += [fmt(x) for x in a.z[r].real] + [fmt(x) for x in b_comp.z[r].real]
                for ca, cb in coh:
                    row += [fmt(ca[r]), fmt(cb[r])]
                w.writerow(row)
    return out.paths


SWEEP_HEADER = ["k", "rca_validity_ratio", "splitting_error", "max_population_diff"]


def splitting_error(omega: float, k: float) -> float:
    """Exact spring-pendulum splitting minus its weak-coupling value: ``sqrt(w^2+2K) - w - K/w``."""
    return math.sqrt(omega**2 + 2.0 * k) - omega - k / omega


def sweep_point(cfg: RunConfig, k: float, index: int) -> list:
    omega = cfg.params.get("omega", cfg.params.get("epsilon", 1.0))
    point = replace(cfg, model="dimer", params={"omega": omega, "k": k})
    h, _, report, _ = comparison(point)
    path = f"{cfg.out}_sweep_{index:03d}.txt"
    write_report(path, _report_items(point, h, report))
    val = classical_rca.rca_validity_ratio(h)
    return [fmt(k), fmt(val.ratio), fmt(splitting_error(omega, k)), fmt(report.max_population_diff)]


def _sweep_job(args):
    return sweep_point(*args)


def cmd_sweep(cfg: RunConfig) -> list:
    if cfg.model != "dimer":
        raise ConfigError("sweep supports the dimer model (parameters omega, k)")
    if len(cfg.methods) != 2:
        raise ConfigError(f"sweep compares exactly two methods, got {len(cfg.methods)}")
    jobs = [(cfg, k, i) for i, k in enumerate(cfg.sweep_k)]
    with _Outputs() as out:
        for _, _, i in jobs:
            out.add(f"{cfg.out}_sweep_{i:03d}.txt")
        summary = out.add(f"{cfg.out}_sweep.csv")
        if cfg.workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                rows = list(pool.map(_sweep_job, jobs))
        else:
            rows = [_sweep_job(j) for j in jobs]
        with open(summary, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SWEEP_HEADER)
            w.writerows(rows)
    return out.paths


COMMANDS = {"spectrum": cmd_spectrum, "evolve": cmd_evolve, "compare": cmd_compare, "sweep": cmd_sweep}


# --- configuration ---------------------------------------------------------


def _floats(text: str) -> tuple:
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"expected a list of numbers, got {text!r}") from exc


def _matrix(text: str):
    rows = [r for r in text.split(";") if r.strip()]
    try:
        return [[float(x) for x in r.replace(",", " ").split()] for r in rows]
    except ValueError as exc:
        raise ConfigError(f"cannot parse matrix {text!r}") from exc


def _initial_state(text: str):
    text = text.strip()
    if "," not in text and ";" not in text:
        try:
            return int(text)
        except ValueError:
            pass
    try:
        return tuple(complex(p.strip().replace(" ", "")) for p in text.replace(";", ",").split(",") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"cannot parse initial_state {text!r}") from exc


def _pairs(text: str):
    out = []
    for item in text.replace(";", ",").split(","):
        item = item.strip()
        if not item:
            continue
        try:
            i, j = (int(x) for x in item.split("-"))
        except ValueError as exc:
            raise ConfigError(f"coherence pairs look like '0-1, 1-2', got {text!r}") from exc
        out.append((i, j))
    return tuple(out)


def _methods(text: str) -> tuple:
    methods = tuple(m.strip() for m in text.split(",") if m.strip())
    if not methods:
        raise ConfigError("methods list is empty")
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"unknown method {m!r}; expected some of {', '.join(METHODS)}")
    return methods


MODEL_KEYS = ("epsilon", "v", "omega", "k", "n", "inductance", "capacitance", "coupling_capacitance")


def config_from_sections(sections: dict) -> dict:
    """Flatten parsed INI sections into ``RunConfig`` keyword arguments."""
    kw = {}
    model = sections.get("model", {})
    params = {}
    for key, raw in model.items():
        if key == "name":
            kw["model"] = raw.strip()
        elif key == "matrix":
            params["matrix"] = _matrix(raw)
        elif key in MODEL_KEYS:
            try:
                params[key] = int(raw) if key == "n" else float(raw)
            except ValueError as exc:
                raise ConfigError(f"model.{key}: cannot parse {raw!r}") from exc
        else:
            raise ConfigError(f"unknown key model.{key}")
    kw["params"] = params
    run = sections.get("run", {})
    for key, raw in run.items():
        if key == "methods":
            kw["methods"] = _methods(raw)
        elif key == "gamma":
            kw["gamma"] = _floats(raw) or None
        elif key == "initial_state":
            kw["initial_state"] = _initial_state(raw)
        elif key == "pairs":
            kw["pairs"] = _pairs(raw)
        else:
            raise ConfigError(f"unknown key run.{key}")
    plan = sections.get("plan", {})
    for key, raw in plan.items():
        if key not in ("dt", "t_end", "tau_end", "samples"):
            raise ConfigError(f"unknown key plan.{key}")
        try:
            kw[key] = int(raw) if key == "samples" else float(raw)
        except ValueError as exc:
            raise ConfigError(f"plan.{key}: cannot parse {raw!r}") from exc
    output = sections.get("output", {})
    for key, raw in output.items():
        if key != "prefix":
            raise ConfigError(f"unknown key output.{key}")
        kw["out"] = raw.strip()
    sweep = sections.get("sweep", {})
    for key, raw in sweep.items():
        if key == "k":
            kw["sweep_k"] = _floats(raw)
        elif key == "workers":
            kw["workers"] = int(raw)
        else:
            raise ConfigError(f"unknown key sweep.{key}")
    return kw


def read_config_file(path: str) -> dict:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    return {name: dict(parser[name]) for name in parser.sections()}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI run configuration")
    common.add_argument("--model", choices=MODELS)
    common.add_argument("--epsilon", type=float, help="site energy (angular frequency)")
    common.add_argument("--v", type=float, help="coupling matrix element")
    common.add_argument("--omega", type=float, help="oscillator natural frequency")
    common.add_argument("--k", type=float, help="pendulum spring constant (dimer: v = -k / (2 omega))")
    common.add_argument("--n", type=int, help="ring size")
    common.add_argument("--inductance", type=float)
    common.add_argument("--capacitance", type=float)
    common.add_argument("--coupling-capacitance", type=float)
    common.add_argument("--gamma", help="damping rates, one value or one per site (comma separated)")
    common.add_argument("--initial-state", help="site index or comma-separated complex amplitudes")
    common.add_argument("--dt", type=float)
    common.add_argument("--t-end", type=float)
    common.add_argument("--tau-end", type=float, help="end time in units of 1/max|V|")
    common.add_argument("--samples", type=int)
    common.add_argument("--methods", help=f"comma-separated subset of {', '.join(METHODS)}")
    common.add_argument("--out", help="output path prefix")
    common.add_argument("--workers", type=int)
    common.add_argument("--k-values", help="sweep: comma-separated spring couplings")
    parser = argparse.ArgumentParser(prog="qcmap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    kw = config_from_sections(read_config_file(args.config)) if args.config else {"params": {}}
    params = dict(kw.get("params", {}))
    if args.model is not None:
        kw["model"] = args.model
    for key in ("epsilon", "v", "omega", "k", "n", "inductance", "capacitance", "coupling_capacitance"):
        val = getattr(args, key)
        if val is not None:
            params[key] = val
    if args.omega is not None or args.k is not None:
        if args.epsilon is None:
            params.pop("epsilon", None)
        if args.v is None:
            params.pop("v", None)
    kw["params"] = params
    if args.gamma is not None:
        kw["gamma"] = _floats(args.gamma) or None
    if args.initial_state is not None:
        kw["initial_state"] = _initial_state(args.initial_state)
    for key in ("dt", "t_end", "tau_end", "samples", "workers"):
        val = getattr(args, key)
        if val is not None:
            kw[key] = val
    if args.methods is not None:
        kw["methods"] = _methods(args.methods)
    if args.out is not None:
        kw["out"] = args.out
    if args.k_values is not None:
        kw["sweep_k"] = _floats(args.k_values)
    cfg = RunConfig(**kw)
    if cfg.samples < 1:
        raise ConfigError("samples must be at least 1")
    if cfg.workers < 1:
        raise ConfigError("workers must be at least 1")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        paths = COMMANDS[args.command](cfg)
    except LinalgError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ValueError, IndexError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for p in paths:
        print(p)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
