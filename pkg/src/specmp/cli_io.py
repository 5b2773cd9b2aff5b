"""Configuration, orchestration and persistence for the ``specmp`` command.

Configs are INI files with an ``[experiment]`` section naming the kind of
run (``run``, ``sweep`` or ``check``) plus kind-specific sections.  Every
command writes a CSV table and a JSON summary atomically into ``--out``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 a
reproduction check failed.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import hashlib
import io
import itertools
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__, kernel_lab, reproductions, schemes, stability_lab

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CHECK = 0, 2, 3, 4
DEFAULT_SWEEP_CAP = 10_000
RUN_COLUMNS = ["step", "t", "linf", "l2", "energy", "margin"]


class ConfigError(ValueError):
    """Invalid or unreadable configuration."""


class NumericalFailure(RuntimeError):
    """A computation produced non-finite output or an integrator gave up."""


# ---------------------------------------------------------------------------
# values and configs
# ---------------------------------------------------------------------------

def format_value(v, shortest: bool = False) -> str:
    """Text form of a value: floats with 17 significant digits.

    With ``shortest`` floats use the shortest string that round-trips exactly,
    which keeps configs readable.
    """
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v)) if shortest else format(float(v), ".17g")
    if isinstance(v, complex):
        return format_value(v.real, shortest)
    if isinstance(v, (list, tuple)):
        return ", ".join(format_value(x, shortest) for x in v)
    if v is None:
        return "none"
    return str(v)


def parse_value(text: str):
    """Inverse of :func:`format_value` for scalars and comma-separated lists."""
    text = text.strip()
    if "," in text and "(" not in text:
        return [parse_value(part) for part in text.split(",") if part.strip()]
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    if low == "none":
        return None
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


@dataclass
class ExperimentConfig:
    """One invocation: a scheme run, a sweep over a grid or a named check."""

    kind: str
    name: str = ""
    seed: int = 0
    params: dict = field(default_factory=dict)
    scheme: dict = field(default_factory=dict)
    initial: dict = field(default_factory=dict)
    axes: dict = field(default_factory=dict)
    fit: dict = field(default_factory=dict)
    cap: int = DEFAULT_SWEEP_CAP

    def __post_init__(self):
        if self.kind not in ("run", "sweep", "check"):
            raise ConfigError(f"experiment.kind: unknown kind {self.kind!r}")
        if self.kind == "check" and self.name not in reproductions.CHECKS:
            raise ConfigError(f"experiment.name: unknown check {self.name!r}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            raise ConfigError("experiment.seed: must be an unsigned 64-bit integer")

    # -- serialisation ---------------------------------------------------
    def to_ini(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        exp = {"kind": self.kind, "seed": str(self.seed)}
        if self.name:
            exp["name"] = self.name
        if self.kind == "sweep":
            exp["cap"] = str(self.cap)
        cp["experiment"] = exp
        for section in ("params", "scheme", "initial", "axes", "fit"):
            data = getattr(self, section)
            if data:
                cp[section] = {k: format_value(v, shortest=True) for k, v in data.items()}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str) -> "ExperimentConfig":
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"config: {exc}") from None
        if "experiment" not in cp:
            raise ConfigError("experiment: missing section")
        exp = cp["experiment"]
        try:
            seed = int(exp.get("seed", "0"))
            cap = int(exp.get("cap", str(DEFAULT_SWEEP_CAP)))
        except ValueError as exc:
            raise ConfigError(f"experiment: {exc}") from None

        def section(name):
            return {k: parse_value(v) for k, v in cp[name].items()} if name in cp else {}

        # expression and mode payloads stay verbatim; numeric payloads are parsed
        initial = dict(cp["initial"]) if "initial" in cp else {}
        if "payload" in initial and initial.get("kind") in ("rough_linf", "node_samples"):
            initial["payload"] = parse_value(initial["payload"])
        return cls(kind=exp.get("kind", ""), name=exp.get("name", ""), seed=seed,
                   params=section("params"), scheme=section("scheme"), initial=initial,
                   axes=section("axes"), fit=section("fit"), cap=cap)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
        return cls.from_ini(text)

    def hash(self) -> str:
        return hashlib.sha256(self.to_ini().encode()).hexdigest()[:16]

    def scheme_config(self, overrides: dict | None = None) -> schemes.SchemeConfig:
        data = dict(self.scheme)
        data.update(overrides or {})
        init = self.initial or {"kind": "rough_linf", "payload": 1.0}
        try:
            initial = schemes.InitialData(init.get("kind", ""), init.get("payload"))
            names = {f.name for f in dataclasses.fields(schemes.SchemeConfig)} - {"initial", "seed"}
            unknown = set(data) - names
            if unknown:
                raise ValueError(f"{sorted(unknown)[0]}: unknown scheme field")
            for key in ("N", "steps", "d", "samples"):
                if key in data:
                    data[key] = int(data[key])
            return schemes.SchemeConfig(initial=initial, seed=self.seed, **data)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"scheme.{exc}") from None


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

def atomic_write(path: Path, data: str) -> None:
    """Write ``data`` to ``path`` through a temporary file and ``os.replace``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


@dataclass
class ResultBundle:
    """Paths and summary of one command."""

    name: str
    kind: str
    config_hash: str
    columns: list
    rows: list
    passed: bool | None = None
    metrics: dict = field(default_factory=dict)
    fits: dict = field(default_factory=dict)
    runtime: float = 0.0
    paths: list = field(default_factory=list)

    def summary(self) -> dict:
        return _jsonable({
            "tool": "specmp",
            "version": __version__,
            "name": self.name,
            "kind": self.kind,
            "config_hash": self.config_hash,
            "verdict": "n/a" if self.passed is None else ("pass" if self.passed else "fail"),
            "metrics": self.metrics,
            "fits": self.fits,
            "runtime_seconds": self.runtime,
            "rows": len(self.rows),
            "csv": [p for p in self.paths if p.endswith(".csv")],
        })

    def write(self, out: Path, fmt: str = "both") -> list:
        out = Path(out)
        stem = self.name.replace("/", "_") or self.kind
        if fmt in ("csv", "both"):
            p = out / f"{stem}.csv"
            atomic_write(p, csv_text(self.columns, self.rows))
            self.paths.append(str(p))
        if fmt in ("json", "both"):
            p = out / f"{stem}.json"
            atomic_write(p, json.dumps(self.summary(), indent=2, sort_keys=True) + "\n")
            self.paths.append(str(p))
        return self.paths

    def verdict_line(self) -> str:
        v = "n/a" if self.passed is None else ("PASS" if self.passed else "FAIL")
        return f"{self.name or self.kind}: {v} ({len(self.rows)} rows, hash {self.config_hash})"


def summary_schema() -> dict:
    """The JSON schema that every summary file satisfies."""
    return json.loads(resources.files("specmp").joinpath("schema/summary.json").read_text())


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------

def _check_finite(values, what):
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NumericalFailure(f"{what}: non-finite values encountered")


def run(config: ExperimentConfig) -> ResultBundle:
    """Execute a single scheme run."""
    start = time.perf_counter()
    sc = config.scheme_config()
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            diag = schemes.run_scheme(sc)
    except schemes.IntegrationError as exc:
        raise NumericalFailure(str(exc)) from None
    _check_finite(diag.linf, "run")
    rows = list(diag.rows())
    metrics = {"final_linf": float(diag.linf[-1]), "max_margin": float(diag.margin.max()),
               "max_energy_increase": float(np.max(np.diff(diag.energy))) if len(diag.energy) > 1 else 0.0,
               "scheme_hash": diag.config_hash}
    return ResultBundle(config.name or "run", "run", config.hash(), RUN_COLUMNS, rows, None, metrics,
                        runtime=time.perf_counter() - start)


def _grid_points(axes: dict) -> list:
    names = list(axes)
    values = [v if isinstance(v, list) else [v] for v in axes.values()]
    return [dict(zip(names, combo)) for combo in itertools.product(*values)]


def _sweep_point(config: ExperimentConfig, point: dict) -> tuple:
    target = config.params.get("target", "scheme")
    if target == "kernel_tail":
        d = int(point.get("d", config.params.get("d", 1)))
        beta = float(point.get("beta", config.params.get("beta", 1.0)))
        t = kernel_lab.tail_l1_norm(d, int(point["N"]), beta)
        return (t.value, t.ratio)
    if target == "strang_error":
        p = dict(config.params)
        p.update(point)
        nu, T, N = float(p.get("nu", 0.05)), float(p.get("T", 0.5)), int(p.get("N", 32))
        x = np.arange(N) / N
        U0 = 0.9 * np.sin(2 * np.pi * x) + 0.3 * np.cos(6 * np.pi * x)
        ref = schemes.ac_collocation_ode_integrate(U0, nu, T, [0.0, T], rtol=1e-12, atol=1e-13).states[-1]
        m = int(p["steps"])
        U = U0.copy()
        for _ in range(m):
            U = schemes.ac_strang_step(U, nu, T / m)
        return (T / m, float(np.max(np.abs(U - ref))))
    if target != "scheme":
        raise ConfigError(f"params.target: unknown sweep target {target!r}")
    sc = config.scheme_config(point)
    with np.errstate(over="ignore", invalid="ignore"):
        diag = schemes.run_scheme(sc)
    inc = float(np.max(np.diff(diag.energy))) if len(diag.energy) > 1 else 0.0
    return (float(diag.linf.max()), float(diag.margin.max()), inc)


_SWEEP_OUTPUTS = {
    "scheme": ["linf_max", "margin_max", "energy_increase_max"],
    "kernel_tail": ["tail_l1", "ratio"],
    "strang_error": ["tau", "error"],
}


def sweep(config: ExperimentConfig, threads: int = 1) -> ResultBundle:
    """Cartesian sweep; grid points may run concurrently, results are merged in grid order."""
    start = time.perf_counter()
    points = _grid_points(config.axes) if config.axes else []
    if not points:
        raise ConfigError("empty sweep")
    if len(points) > config.cap:
        raise ConfigError(f"experiment.cap: sweep has {len(points)} points, cap is {config.cap}")
    target = config.params.get("target", "scheme")
    if target not in _SWEEP_OUTPUTS:
        raise ConfigError(f"params.target: unknown sweep target {target!r}")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda p: _sweep_point(config, p), points))
    else:
        results = [_sweep_point(config, p) for p in points]
    names = list(config.axes)
    outputs = _SWEEP_OUTPUTS[target]
    rows = [tuple(p[n] for n in names) + r for p, r in zip(points, results)]
    for r in results:
        _check_finite(r, "sweep")
    fits = {}
    x_name, y_name = config.fit.get("x"), config.fit.get("y")
    if x_name and y_name:
        cols = names + outputs
        if x_name not in cols or y_name not in cols:
            raise ConfigError("fit: x and y must name sweep columns")
        xs = [row[cols.index(x_name)] for row in rows]
        ys = [row[cols.index(y_name)] for row in rows]
        fits[f"{y_name}_vs_{x_name}"] = schemes.fit_loglog(xs, ys)
    metrics = {}
    if target == "kernel_tail":
        ratios = [r[1] for r in results]
        metrics["ratio_band"] = max(ratios) / min(ratios)
    passed = None
    lo, hi = config.fit.get("slope_min"), config.fit.get("slope_max")
    if fits and (lo is not None or hi is not None):
        slope = next(iter(fits.values()))["slope"]
        passed = (lo is None or slope >= lo) and (hi is None or slope <= hi)
    return ResultBundle(config.name or "sweep", "sweep", config.hash(), names + outputs, rows, passed,
                        metrics, fits, time.perf_counter() - start)


def check(config: ExperimentConfig) -> ResultBundle:
    start = time.perf_counter()
    with np.errstate(over="ignore", invalid="ignore"):
        res = reproductions.run_check(config.name, config.params, config.seed)
    return ResultBundle(config.name, "check", config.hash(), res.columns, res.rows, bool(res.passed),
                        res.metrics, res.fits, time.perf_counter() - start)


def execute(config: ExperimentConfig, threads: int = 1) -> ResultBundle:
    if config.kind == "run":
        return run(config)
    if config.kind == "sweep":
        return sweep(config, threads)
    return check(config)


# ---------------------------------------------------------------------------
# shipped configs
# ---------------------------------------------------------------------------

def _config_dir():
    return resources.files("specmp").joinpath("configs")


def list_configs() -> list:
    return sorted(p.name[:-4] for p in _config_dir().iterdir() if p.name.endswith(".ini"))


def load_named(name: str) -> ExperimentConfig:
    key = name.split("/")[-1]
    path = _config_dir().joinpath(f"{key}.ini")
    if not path.is_file():
        raise ConfigError(f"reproduce: no shipped config named {name!r}")
    return ExperimentConfig.from_ini(path.read_text())


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------

def _direct_bundle(name, columns, rows, metrics, passed=None) -> ResultBundle:
    blob = json.dumps(_jsonable({"name": name, "metrics": metrics}), sort_keys=True).encode()
    return ResultBundle(name, "direct", hashlib.sha256(blob).hexdigest()[:16], columns, rows, passed,
                        metrics)


def _kernel_command(args) -> ResultBundle:
    if args.action == "profile":
        p = kernel_lab.kernel_profile(args.d, args.N, args.beta, args.s)
        m = {"min_value": p.min_value, "l1_norm": p.l1_norm, "positive": p.positive,
             "certificate": p.certificate, "total_mass": p.total_mass}
        return _direct_bundle("kernel_profile", ["quantity", "value"], list(m.items()), m)
    if args.action == "sweep":
        rows = []
        for N in range(args.N_min, args.N_max + 1):
            t = kernel_lab.tail_l1_norm(args.d, N, args.beta)
            rows.append((N, t.value, t.ratio))
        ratios = [r[2] for r in rows]
        m = {"ratio_min": min(ratios), "ratio_max": max(ratios), "band": max(ratios) / min(ratios)}
        return _direct_bundle("kernel_sweep", ["N", "tail_l1", "ratio"], rows, m)
    if args.action == "sstar":
        ce = kernel_lab.critical_exponent()
        m = {"s_star": ce.s_star, "f_low": ce.f_low, "f_high": ce.f_high}
        return _direct_bundle("kernel_sstar", ["quantity", "value"], list(m.items()), m)
    if args.action == "abeta":
        a = kernel_lab.a_beta(args.beta, args.s)
        m = dict(a._asdict())
        return _direct_bundle("kernel_abeta", ["quantity", "value"], list(m.items()), m)
    t = kernel_lab.threshold_report(args.beta)
    m = {"formula_N0": t.formula_N0, "log_formula_N0": t.log_formula_N0,
         "astronomically_large": t.astronomically_large, "empirical_N0": t.empirical_N0}
    return _direct_bundle("kernel_threshold", ["quantity", "value"], list(m.items()), m)


def _stability_command(args) -> ResultBundle:
    if args.action == "envelope":
        e = stability_lab.cubic_envelope(args.tau, args.alpha)
        m = dataclasses.asdict(e)
        return _direct_bundle("stability_envelope", ["quantity", "value"], list(m.items()), m)
    if args.action == "iterate":
        r = stability_lab.prototype_iteration(args.tau, args.eta, args.alpha0, args.n_max)
        rows = [(n, a, u) for n, (a, u) in enumerate(zip(r.alphas, r.upper))]
        m = {"diverged": r.diverged, "lower_ok": r.lower_ok, "upper_ok": r.upper_ok,
             "final": float(r.alphas[-1])}
        return _direct_bundle("stability_iterate", ["n", "alpha", "upper_bound"], rows, m)
    if args.action == "tau1":
        t = stability_lab.tau1_root()
        m = dict(t._asdict())
        return _direct_bundle("stability_tau1", ["quantity", "value"], list(m.items()), m)
    if args.action == "counterexample":
        name = "tau2" if args.which == "tau2" else "prop_small_tau"
        res = reproductions.run_check(name, {}, args.seed or 0)
        return _direct_bundle(f"stability_{name}", res.columns, res.rows, res.metrics, res.passed)
    if args.action == "amplify":
        if args.mode == "heat":
            a = stability_lab.heat_amplification(args.N, args.t, args.nu)
        else:
            a = stability_lab.resolvent_amplification(args.N, args.t, args.n, args.nu)
        rows = [(j, float(b)) for j, b in enumerate(a.beta[:8])]
        m = {"direct": a.direct, "table_total": a.table_total, "scale": a.scale,
             "closed_form": a.closed_form}
        return _direct_bundle(f"stability_amplify_{args.mode}", ["j", "beta"], rows, m)
    a = stability_lab.adversarial_data(args.N, args.mode)
    rows = [(i, float(v)) for i, v in enumerate(a.values)]
    m = {"witness": a.witness, "predicted": a.predicted, "achieved": a.achieved, "step": a.step}
    return _direct_bundle(f"stability_adversarial_{args.mode}", ["node", "value"], rows, m)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output directory (default: print only)")
    common.add_argument("--seed", type=int, default=None, help="unsigned 64-bit seed overriding the config")
    common.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    common.add_argument("--format", choices=("csv", "json", "both"), default="both")
    common.add_argument("--dry-run", action="store_true", help="print the resolved config and exit")

    parser = argparse.ArgumentParser(prog="specmp", description="Spectral maximum-principle toolkit.")
    parser.add_argument("--version", action="version", version=f"specmp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    k = sub.add_parser("kernel", parents=[common], help="kernel analysis")
    k.add_argument("action", choices=("profile", "sweep", "sstar", "abeta", "threshold"))
    k.add_argument("--d", type=int, default=1)
    k.add_argument("--N", type=int, default=8)
    k.add_argument("--N-min", dest="N_min", type=int, default=2)
    k.add_argument("--N-max", dest="N_max", type=int, default=64)
    k.add_argument("--beta", type=float, default=1.0)
    k.add_argument("--s", type=float, default=2.0)

    s = sub.add_parser("stability", parents=[common], help="scalar stability and amplification")
    s.add_argument("action", choices=("envelope", "iterate", "tau1", "counterexample", "amplify", "adversarial"))
    s.add_argument("--tau", type=float, default=0.5)
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--alpha0", type=float, default=1.5)
    s.add_argument("--eta", type=float, default=0.0)
    s.add_argument("--n-max", dest="n_max", type=int, default=50)
    s.add_argument("--which", choices=("small_tau", "tau2"), default="small_tau")
    s.add_argument("--mode", choices=("heat", "resolvent"), default="heat")
    s.add_argument("--N", type=int, default=256)
    s.add_argument("--t", type=float, default=None, help="heat time or resolvent step")
    s.add_argument("--n", type=int, default=1, help="resolvent power")
    s.add_argument("--nu", type=float, default=1.0)

    r = sub.add_parser("run", parents=[common], help="run a scheme config")
    r.add_argument("config")
    w = sub.add_parser("sweep", parents=[common], help="run a sweep config")
    w.add_argument("config")
    p = sub.add_parser("reproduce", parents=[common], help="run a shipped reproduction config")
    p.add_argument("name")
    sub.add_parser("list", help="list shipped configs")
    return parser


def _emit(bundle: ResultBundle, args) -> int:
    if args.out:
        bundle.write(Path(args.out), args.format)
    else:
        print(json.dumps(bundle.summary(), indent=2, sort_keys=True))
    print(bundle.verdict_line())
    return EXIT_CHECK if bundle.passed is False else EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "list":
            for name in list_configs():
                print(name)
            return EXIT_OK
        if args.command in ("kernel", "stability"):
            if args.dry_run:
                print(json.dumps(_jsonable({k: v for k, v in vars(args).items()}), sort_keys=True))
                return EXIT_OK
            if args.command == "stability" and args.action == "amplify" and args.t is None:
                args.t = 1.0 / (4 * args.nu**2 * args.N**2)
            bundle = _kernel_command(args) if args.command == "kernel" else _stability_command(args)
            return _emit(bundle, args)
        if args.command == "reproduce":
            config = load_named(args.name)
        else:
            config = ExperimentConfig.load(args.config)
            expected = "run" if args.command == "run" else "sweep"
            if config.kind != expected:
                raise ConfigError(f"experiment.kind: expected {expected!r}, got {config.kind!r}")
        if args.seed is not None:
            config = dataclasses.replace(config, seed=args.seed)
        if args.dry_run:
            print(config.to_ini(), end="")
            return EXIT_OK
        return _emit(execute(config, args.threads), args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, schemes.IntegrationError, kernel_lab.QuadratureError,
            FloatingPointError, OverflowError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
