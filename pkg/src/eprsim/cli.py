"""Reproducible experiment runner.

    eprsim teleport-qm --trials 1000 --seed 42
    eprsim teleport-ensemble --epsilon 0.1 --trials 1000000 --seed 7 --format csv
    eprsim chsh --model ensemble-det --trials 1000000 --seed 1 --output run.json
    eprsim isotropy --trials 1000

Every random draw comes from a block stream keyed by (seed, experiment,
trial // BLOCK_SIZE); see ``eprsim.streams``. Metric blocks are therefore
byte-identical across runs and across ``--workers`` values.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .bellspace import BellOutcome, singlet, singlet_along
from .chsh import MODELS, chsh_from_sums, expected_chsh, optimal_settings, product_sum
from .ensemble import (
    SelectionConfig,
    Submodel,
    acceptance_rate_analytic,
    mean_infidelity_analytic,
    merge_summaries,
    run_ensemble_teleport,
)
from .qcore import PureState, UnitAxis, axis_state, bloch_vector, fidelity, random_axis, random_state
from .streams import BLOCK_SIZE, GENERATOR_FAMILY, map_blocks
from .teleport import bob_marginal_before_classical, teleport_once

SCHEMA_VERSION = 1
EXPERIMENTS = ("teleport-qm", "teleport-ensemble", "chsh", "isotropy")
EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class ExperimentConfig:
    experiment: str
    trials: int = 10_000
    seed: int = 0
    epsilon: float = 0.1
    submodel: str = "malus"
    model: str = "qm"
    settings: Optional[tuple[tuple[float, float], ...]] = None
    input_state: Optional[tuple[float, float]] = None
    output_format: str = "json"
    output_path: Optional[str] = None
    emit_trials: bool = False
    workers: int = 1

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"must be one of {', '.join(EXPERIMENTS)}")
        if isinstance(self.trials, bool) or not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("trials", f"must be an integer >= 1, got {self.trials!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 1 << 64:
            raise ConfigError("seed", f"must be an unsigned 64-bit integer, got {self.seed!r}")
        if not isinstance(self.epsilon, (int, float)) or not math.isfinite(self.epsilon) or not 0 < self.epsilon <= math.pi:
            raise ConfigError("epsilon", f"must lie in (0, pi] radians, got {self.epsilon!r}")
        if self.submodel not in ("malus", "det"):
            raise ConfigError("submodel", f"must be 'malus' or 'det', got {self.submodel!r}")
        if self.model not in MODELS:
            raise ConfigError("model", f"must be one of {', '.join(MODELS)}, got {self.model!r}")
        if self.settings is not None:
            if len(self.settings) != 4:
                raise ConfigError("settings", "needs four (theta, phi) pairs")
            self.settings = tuple(_check_angles("settings", p) for p in self.settings)
        if self.input_state is not None:
            self.input_state = _check_angles("input_state", self.input_state)
        if self.output_format not in ("json", "csv"):
            raise ConfigError("output_format", f"must be 'json' or 'csv', got {self.output_format!r}")
        if isinstance(self.workers, bool) or not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError("workers", f"must be an integer >= 1, got {self.workers!r}")
        return self

    def echo(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        for k in ("settings", "input_state"):
            if d[k] is not None:
                d[k] = json.loads(json.dumps(d[k]))
        return d


def _check_angles(name: str, pair) -> tuple[float, float]:
    try:
        theta, phi = (float(v) for v in pair)
    except (TypeError, ValueError):
        raise ConfigError(name, f"expected a (theta, phi) pair in radians, got {pair!r}") from None
    if not (math.isfinite(theta) and math.isfinite(phi)):
        raise ConfigError(name, "angles must be finite")
    # out-of-range values are almost always degrees
    if not 0.0 <= theta <= math.pi or not -2 * math.pi <= phi <= 2 * math.pi:
        raise ConfigError(name, f"angles must be radians with theta in [0, pi] and |phi| <= 2 pi, got {pair!r}")
    return theta, phi


@dataclass
class RunReport:
    config: ExperimentConfig
    metrics: dict[str, Any]
    trial_rows: Optional[list[dict[str, Any]]] = None
    duration_s: float = 0.0
    version: str = __version__
    generator: str = GENERATOR_FAMILY

    def metrics_json(self) -> str:
        return json.dumps(self.metrics)

    def to_json(self) -> str:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "artifact_version": self.version,
            "generator": self.generator,
            "config": self.config.echo(),
            "metrics": self.metrics,
            "duration_s": self.duration_s,
        }
        if self.trial_rows is not None:
            doc["trials"] = self.trial_rows
        return json.dumps(doc, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["record", "index", "key", "value"])
        for k, v in self.metrics.items():
            w.writerow(["metric", "", k, _csv_value(v)])
        for row in self.trial_rows or ():
            idx = row["index"]
            for k, v in row.items():
                if k != "index":
                    w.writerow(["trial", idx, k, _csv_value(v)])
        return buf.getvalue()

    def render(self) -> str:
        return self.to_json() if self.config.output_format == "json" else self.to_csv()


def _csv_value(v) -> str:
    # match json.dumps so both formats carry the same digits
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    return json.dumps(v)


def _axis(angles: Optional[tuple[float, float]], default: UnitAxis) -> UnitAxis:
    return default if angles is None else UnitAxis.from_angles(*angles)


def _run_teleport_qm(cfg: ExperimentConfig, block_size: int):
    fixed = None if cfg.input_state is None else axis_state(UnitAxis.from_angles(*cfg.input_state), 1)

    def work(block, rng):
        counts = np.zeros(4, dtype=np.int64)
        fid_sum, min_fid, max_ns = 0.0, 1.0, 0.0
        rows = []
        for i in range(block.count):
            psi = fixed if fixed is not None else random_state(rng)
            trial = teleport_once(psi, rng)
            counts[trial.outcome] += 1
            fid_sum += trial.fidelity_out
            min_fid = min(min_fid, trial.fidelity_out)
            max_ns = max(max_ns, float(np.abs(bloch_vector(bob_marginal_before_classical(psi))).max()))
            if cfg.emit_trials:
                rows.append({"index": block.start + i, "outcome": trial.outcome.name, "fidelity": trial.fidelity_out})
        return counts, fid_sum, min_fid, max_ns, rows

    parts = map_blocks(work, cfg.seed, cfg.experiment, cfg.trials, cfg.workers, block_size)
    counts = sum((p[0] for p in parts), np.zeros(4, dtype=np.int64))
    fid_sum = 0.0
    for p in parts:
        fid_sum += p[1]
    metrics = {
        "trials": cfg.trials,
        "mean_fidelity": fid_sum / cfg.trials,
        "min_fidelity": min(p[2] for p in parts),
        "max_bob_marginal_bloch": max(p[3] for p in parts),
    }
    for k in BellOutcome:
        metrics[f"outcome_count_{k.name.lower()}"] = int(counts[k])
    for k in BellOutcome:
        metrics[f"outcome_rate_{k.name.lower()}"] = int(counts[k]) / cfg.trials
    rows = [r for p in parts for r in p[4]] if cfg.emit_trials else None
    return metrics, rows


def _run_teleport_ensemble(cfg: ExperimentConfig, block_size: int):
    alice = _axis(cfg.input_state, UnitAxis(0.0, 0.0, 1.0))
    sel = SelectionConfig(cfg.epsilon, Submodel(cfg.submodel))

    def work(block, rng):
        return run_ensemble_teleport(alice, sel, block.count, rng, record_trials=cfg.emit_trials)

    summary = merge_summaries(map_blocks(work, cfg.seed, cfg.experiment, cfg.trials, cfg.workers, block_size))
    expected = acceptance_rate_analytic(cfg.epsilon)
    binom_se = math.sqrt(expected * (1 - expected) / cfg.trials)
    metrics = {
        "trials": cfg.trials,
        "accepted": summary.n_accepted,
        "acceptance_rate": summary.acceptance_rate,
        "acceptance_rate_analytic": expected,
        "acceptance_std_error": binom_se,
        "acceptance_z_score": (summary.acceptance_rate - expected) / binom_se if binom_se > 0 else 0.0,
        "mean_conditional_fidelity": summary.mean_conditional_fidelity,
        "mean_conditional_infidelity": summary.mean_conditional_infidelity,
        "mean_conditional_infidelity_analytic": mean_infidelity_analytic(cfg.epsilon),
    }
    rows = None
    if cfg.emit_trials:
        rows = [
            {
                "index": i,
                "accepted": t.accepted,
                "axis_x": t.hidden_axis.x,
                "axis_y": t.hidden_axis.y,
                "axis_z": t.hidden_axis.z,
                "conditional_fidelity": t.conditional_fidelity,
            }
            for i, t in enumerate(summary.trials)
        ]
    return metrics, rows


def _run_chsh(cfg: ExperimentConfig, block_size: int):
    model = MODELS[cfg.model]()
    if cfg.settings is None:
        settings = optimal_settings()
    else:
        settings = tuple(UnitAxis.from_angles(*p) for p in cfg.settings)
    a, a2, b, b2 = settings
    pairs = [(a, b), (a, b2), (a2, b), (a2, b2)]
    labels = ["E_ab", "E_ab2", "E_a2b", "E_a2b2"]
    sums, rows = [], []
    for p, (x, y) in enumerate(pairs):
        tag = f"{cfg.experiment}/{cfg.model}/pair{p}"

        def work(block, rng, x=x, y=y, p=p):
            if not cfg.emit_trials:
                return product_sum(model, x, y, block.count, rng), []
            ox, oy = model.sample(x, y, block.count, rng)
            recs = [
                {"index": block.start + i, "pair": labels[p], "alice": int(u), "bob": int(v)}
                for i, (u, v) in enumerate(zip(ox, oy))
            ]
            return int(np.sum(ox * oy)), recs

        parts = map_blocks(work, cfg.seed, tag, cfg.trials, cfg.workers, block_size)
        sums.append(sum(s for s, _ in parts))
        rows.extend(r for _, rs in parts for r in rs)
    est = chsh_from_sums(settings, sums, cfg.trials)
    metrics = {"trials_per_pair": cfg.trials, "model": cfg.model}
    metrics.update(zip(labels, est.correlations))
    metrics.update(
        {
            "S": est.s_value,
            "abs_S": est.magnitude,
            "std_error": est.std_error,
            "expected_S": expected_chsh(model, *settings),
        }
    )
    return metrics, (rows if cfg.emit_trials else None)


def _run_isotropy(cfg: ExperimentConfig, block_size: int):
    ref = singlet()

    def work(block, rng):
        fids = []
        rows = []
        for i in range(block.count):
            axis = random_axis(rng)
            f = fidelity(singlet_along(axis), ref)
            fids.append(f)
            if cfg.emit_trials:
                rows.append({"index": block.start + i, "axis_x": axis.x, "axis_y": axis.y, "axis_z": axis.z, "fidelity": f})
        return float(np.sum(fids)), min(fids), max(abs(1 - f) for f in fids), rows

    parts = map_blocks(work, cfg.seed, cfg.experiment, cfg.trials, cfg.workers, block_size)
    total = 0.0
    for p in parts:
        total += p[0]
    metrics = {
        "trials": cfg.trials,
        "mean_fidelity": total / cfg.trials,
        "min_fidelity": min(p[1] for p in parts),
        "max_abs_deviation": max(p[2] for p in parts),
    }
    rows = [r for p in parts for r in p[3]] if cfg.emit_trials else None
    return metrics, rows


_RUNNERS = {
    "teleport-qm": _run_teleport_qm,
    "teleport-ensemble": _run_teleport_ensemble,
    "chsh": _run_chsh,
    "isotropy": _run_isotropy,
}


def run(config: ExperimentConfig, block_size: int = BLOCK_SIZE) -> RunReport:
    config.validate()
    t0 = time.perf_counter()
    metrics, rows = _RUNNERS[config.experiment](config, block_size)
    return RunReport(config, metrics, rows, duration_s=time.perf_counter() - t0)


# -- argument parsing ---------------------------------------------------------

_FILE_KEYS = {f.name for f in dataclasses.fields(ExperimentConfig)} - {"experiment"}


def _float_list(text: str, n: int, name: str) -> list[float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != n:
        raise argparse.ArgumentTypeError(f"{name} needs {n} comma-separated radian values, got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{name} values must be plain numbers in radians, got {text!r}") from None


def _settings_arg(text: str):
    v = _float_list(text, 8, "--settings")
    return [(v[i], v[i + 1]) for i in range(0, 8, 2)]


def _input_arg(text: str):
    return tuple(_float_list(text, 2, "--input"))


def _radians(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected radians as a plain number, got {text!r}") from None


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an unsigned 64-bit integer, got {text!r}") from None
    return v


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False, argument_default=S)
    common.add_argument("--config", metavar="FILE", help="JSON file with config keys; flags override it")
    common.add_argument("--trials", type=int, metavar="N")
    common.add_argument("--seed", type=_u64, metavar="U64")
    common.add_argument("--output", dest="output_path", metavar="PATH", help="default: standard output")
    common.add_argument("--format", dest="output_format", choices=["json", "csv"])
    common.add_argument("--emit-trials", dest="emit_trials", action="store_true")
    common.add_argument("--workers", type=int, metavar="N")

    parser = argparse.ArgumentParser(prog="eprsim", description="Teleportation and CHSH experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="experiment", required=True)

    p = sub.add_parser("teleport-qm", parents=[common], argument_default=S, help="collapse-model teleportation")
    p.add_argument("--input", dest="input_state", type=_input_arg, metavar="THETA,PHI")

    p = sub.add_parser("teleport-ensemble", parents=[common], argument_default=S, help="state-selection teleportation")
    p.add_argument("--epsilon", type=_radians, metavar="RAD")
    p.add_argument("--submodel", choices=["malus", "det"])
    p.add_argument("--input", dest="input_state", type=_input_arg, metavar="THETA,PHI")

    p = sub.add_parser("chsh", parents=[common], argument_default=S, help="CHSH estimate for one outcome model")
    p.add_argument("--model", choices=list(MODELS))
    p.add_argument("--submodel", choices=["malus", "det"])
    p.add_argument("--settings", type=_settings_arg, metavar="Ta,Pa,Ta2,Pa2,Tb,Pb,Tb2,Pb2")

    sub.add_parser("isotropy", parents=[common], argument_default=S, help="singlet isotropy sweep")
    return parser


def _load_config_file(path: str) -> dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"{path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config", "config file must hold a JSON object")
    data = {k.replace("-", "_"): v for k, v in data.items()}
    unknown = sorted(set(data) - _FILE_KEYS - {"experiment"})
    if unknown:
        raise ConfigError(unknown[0], "unknown config key")
    return data


def parse_config(argv: Optional[Sequence[str]] = None) -> ExperimentConfig:
    """Build a validated config; flags override config-file values.

    Usage errors exit via argparse (status 2); invalid values raise ``ConfigError``.
    """
    ns = vars(build_parser().parse_args(argv))
    experiment = ns.pop("experiment")
    values: dict[str, Any] = {}
    if "config" in ns:
        values.update(_load_config_file(ns.pop("config")))
        file_exp = values.pop("experiment", experiment)
        if file_exp != experiment:
            raise ConfigError("experiment", f"config file names {file_exp!r} but the subcommand is {experiment!r}")
    values.update(ns)
    if experiment == "chsh" and "submodel" in ns:
        implied = f"ensemble-{ns['submodel']}"
        if "model" in ns and ns["model"] != implied:
            raise ConfigError("submodel", f"conflicts with --model {ns['model']}")
        values["model"] = implied
    if values.get("settings") is not None:
        values["settings"] = tuple(tuple(p) for p in values["settings"])
    if values.get("input_state") is not None:
        values["input_state"] = tuple(values["input_state"])
    return ExperimentConfig(experiment=experiment, **values).validate()


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = parse_config(argv)
        report = run(cfg)
    except ConfigError as exc:
        print(f"eprsim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = report.render()
    if cfg.output_path in (None, "-"):
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader went away (e.g. piped into head); silence the flush at exit
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    try:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"eprsim: cannot write {cfg.output_path}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
