"""Command-line front end.

Subcommands::

    fracstate simulate <config>          run and write CSV + metadata sidecar
    fracstate compare <csvA> <csvB>      max |dy| and history-memory ratio
    fracstate controllability <config>   print A, B, C, Q_R and rank

Configurations are flat ``key = value`` lines; ``#`` starts a comment.
Exit codes: 0 success, 1 configuration error, 2 numerical instability,
3 I/O failure.
"""

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .control import CFE, PSE, ControllerSpec, simulate_closed_loop
from .errors import ConfigurationError, InstabilityError
from .glcore import SampledSignal
from .statespace import (
    DEFAULT_MEMORY_SAMPLES,
    FodeModel,
    controllability,
    decompose,
    simulate_cfe,
    simulate_pse,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INSTABILITY = 2
EXIT_IO = 3

CSV_HEADER = ("t", "u", "y", "x1", "x2")
DEFAULT_N_STEPS = 300
DEFAULT_OUT = "trajectory.csv"

_PLANT_KEYS = ("a2", "a1", "a0", "alpha", "beta")
_CONTROLLER_KEYS = {"K": "K", "Ti": "Ti", "Td": "Td", "lambda": "lam", "delta": "delta"}
_KNOWN_KEYS = set(_PLANT_KEYS) | set(_CONTROLLER_KEYS) | {
    "scheme", "memory_samples", "T", "n_steps", "input", "out",
}
_REQUIRED_KEYS = _PLANT_KEYS + ("T",)


@dataclass(frozen=True)
class RunConfig:
    plant: FodeModel
    scheme: object
    step: float
    n_steps: int
    input_kind: str = "step"
    input_path: Optional[str] = None
    controller: Optional[ControllerSpec] = None
    out: str = DEFAULT_OUT


def _float(raw, key, line):
    try:
        value = float(raw)
    except ValueError:
        raise ConfigurationError(f"line {line}: {key} must be a number, got {raw!r}", key)
    if not math.isfinite(value):
        raise ConfigurationError(f"line {line}: {key} must be finite", key)
    return value


def _int(raw, key, line):
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(f"line {line}: {key} must be an integer, got {raw!r}", key)
    if value < 1:
        raise ConfigurationError(f"line {line}: {key} must be >= 1, got {value}", key)
    return value


def parse_config(text):
    """Parse and validate a run configuration.

    Defaults: ``scheme = pse``, ``memory_samples = 100``, ``input = step``,
    ``n_steps = 300``, ``out = trajectory.csv``. Any of ``K, Ti, Td,
    lambda, delta`` switches to a closed loop whose setpoint is ``input``.
    Every error is a :class:`ConfigurationError` carrying the key.
    """
    raw = {}
    where = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key = value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}", key)
        if key in raw:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}", key)
        raw[key] = value
        where[key] = lineno

    for key in _REQUIRED_KEYS:
        if key not in raw:
            raise ConfigurationError(f"missing required key {key!r}", key)

    num = {k: _float(raw[k], k, where[k]) for k in _PLANT_KEYS + ("T",)}
    if num["T"] <= 0:
        raise ConfigurationError(f"line {where['T']}: T must be positive", "T")
    if num["a2"] == 0:
        raise ConfigurationError(f"line {where['a2']}: a2 must be nonzero", "a2")
    if num["beta"] <= 0:
        raise ConfigurationError(f"line {where['beta']}: beta must be positive", "beta")
    if num["alpha"] <= num["beta"]:
        raise ConfigurationError(
            f"line {where['alpha']}: constraint alpha > beta violated "
            f"(alpha={num['alpha']}, beta={num['beta']})",
            "alpha",
        )
    plant = FodeModel(*(num[k] for k in _PLANT_KEYS))

    scheme_name = raw.get("scheme", "pse").lower()
    if scheme_name == "pse":
        memory = DEFAULT_MEMORY_SAMPLES
        if "memory_samples" in raw:
            memory = _int(raw["memory_samples"], "memory_samples", where["memory_samples"])
        scheme = PSE(memory)
    elif scheme_name == "cfe":
        if "memory_samples" in raw:
            raise ConfigurationError(
                f"line {where['memory_samples']}: memory_samples applies to scheme=pse only",
                "memory_samples",
            )
        scheme = CFE()
    else:
        raise ConfigurationError(
            f"line {where['scheme']}: scheme must be pse or cfe, got {raw['scheme']!r}", "scheme"
        )

    n_steps = DEFAULT_N_STEPS
    if "n_steps" in raw:
        n_steps = _int(raw["n_steps"], "n_steps", where["n_steps"])

    input_kind, input_path = "step", None
    if "input" in raw:
        value = raw["input"]
        if value in ("step", "zero"):
            input_kind = value
        elif value.startswith("file:") and len(value) > 5:
            input_kind, input_path = "file", value[5:].strip()
        else:
            raise ConfigurationError(
                f"line {where['input']}: input must be step, zero or file:<path>", "input"
            )

    controller = None
    if any(k in raw for k in _CONTROLLER_KEYS):
        kwargs = {
            field: _float(raw[k], k, where[k]) for k, field in _CONTROLLER_KEYS.items() if k in raw
        }
        for key in ("lambda", "delta"):
            if key in raw and kwargs[_CONTROLLER_KEYS[key]] < 0:
                raise ConfigurationError(f"line {where[key]}: {key} must be >= 0", key)
        if kwargs.get("lam", 1.0) == 0 and kwargs.get("Ti", 0.0) != 0:
            raise ConfigurationError(
                f"line {where['lambda']}: lambda = 0 with Ti != 0 is a duplicate "
                "proportional term",
                "lambda",
            )
        controller = ControllerSpec(**kwargs)

    return RunConfig(
        plant=plant,
        scheme=scheme,
        step=num["T"],
        n_steps=n_steps,
        input_kind=input_kind,
        input_path=input_path,
        controller=controller,
        out=raw.get("out", DEFAULT_OUT),
    )


def load_input(config, base_dir="."):
    """Build the input (or setpoint) signal the configuration asks for."""
    n = config.n_steps
    if config.input_kind == "step":
        return SampledSignal(config.step, np.ones(n))
    if config.input_kind == "zero":
        return SampledSignal(config.step, np.zeros(n))
    path = Path(base_dir, config.input_path)
    values = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                values.append(float(line))
    if len(values) < n:
        raise ConfigurationError(
            f"input file {path} has {len(values)} samples, n_steps={n}", "input"
        )
    return SampledSignal(config.step, values[:n])


def format_float(x):
    """Shortest decimal string that parses back to the same double."""
    return repr(float(x))


def write_csv(result, path):
    cols = (result.t, result.u, result.y, result.x1, result.x2)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(CSV_HEADER) + "\n")
        for row in zip(*cols):
            fh.write(",".join(format_float(v) for v in row) + "\n")


def read_csv(path):
    """Read a trajectory CSV into a dict of float arrays keyed by column."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        rows = [[float(v) for v in row] for row in reader]
    data = np.array(rows, dtype=float).reshape(-1, len(CSV_HEADER))
    return {name: data[:, i] for i, name in enumerate(CSV_HEADER)}


def metadata_path(csv_path):
    return Path(str(csv_path) + ".meta.json")


def simulate(config, base_dir="."):
    """Run the configured simulation and return the :class:`SimulationResult`."""
    signal = load_input(config, base_dir)
    if config.controller is not None:
        return simulate_closed_loop(
            config.plant, config.controller, signal, config.scheme, config.n_steps
        )
    ss = decompose(config.plant)
    if isinstance(config.scheme, CFE):
        return simulate_cfe(ss, signal, config.n_steps)
    return simulate_pse(ss, signal, config.scheme.memory_samples, config.n_steps)


def run(config, base_dir="."):
    """Simulate, write CSV and sidecar, and return a process exit code."""
    started = time.perf_counter()
    try:
        result = simulate(config, base_dir)
    except InstabilityError as exc:
        print(f"error: simulation unstable: {exc}", file=sys.stderr)
        return EXIT_INSTABILITY
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: cannot read input: {exc}", file=sys.stderr)
        return EXIT_IO
    wall = time.perf_counter() - started

    out = Path(base_dir, config.out)
    p = config.plant
    meta = {
        "scheme": result.scheme,
        "T": config.step,
        "n_steps": config.n_steps,
        "plant": {"a2": p.a2, "a1": p.a1, "a0": p.a0, "alpha": p.alpha, "beta": p.beta},
        "controller": None if config.controller is None else {
            "K": config.controller.K, "Ti": config.controller.Ti, "Td": config.controller.Td,
            "lambda": config.controller.lam, "delta": config.controller.delta,
        },
        "input": config.input_kind if config.input_path is None else f"file:{config.input_path}",
        "memory_bytes_peak": result.memory_bytes_peak,
        "wall_time_s": wall,
    }
    try:
        write_csv(result, out)
        with open(metadata_path(out), "w") as fh:
            json.dump(meta, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def compare(csv_a, csv_b):
    """Max ``|y_a - y_b|`` over the common length, and the memory ratio a/b.

    The ratio is ``None`` unless both metadata sidecars exist.
    """
    a = read_csv(csv_a)
    b = read_csv(csv_b)
    n = min(a["y"].size, b["y"].size)
    max_dy = float(np.max(np.abs(a["y"][:n] - b["y"][:n]))) if n else 0.0
    ratio = None
    ma, mb = metadata_path(csv_a), metadata_path(csv_b)
    if ma.exists() and mb.exists():
        bytes_a = json.loads(ma.read_text())["memory_bytes_peak"]
        bytes_b = json.loads(mb.read_text())["memory_bytes_peak"]
        ratio = bytes_a / bytes_b
    return max_dy, ratio


def _read_config(path):
    return parse_config(Path(path).read_text())


def _cmd_simulate(args):
    config = _read_config(args.config)
    return run(config, base_dir=Path(args.config).parent)


def _cmd_compare(args):
    max_dy, ratio = compare(args.csv_a, args.csv_b)
    print(f"max_abs_dy = {format_float(max_dy)}")
    if ratio is None:
        print("memory_ratio = n/a (metadata sidecar missing)")
    else:
        print(f"memory_ratio = {format_float(ratio)}")
    return EXIT_OK


def _cmd_controllability(args):
    config = _read_config(args.config)
    ss = decompose(config.plant)
    report = controllability(ss)
    print(f"A = {ss.A.tolist()}")
    print(f"B = {ss.B.tolist()}")
    print(f"C = {ss.C.tolist()}")
    print(f"Q_R = {report.Q_R.tolist()}")
    print(f"rank = {report.rank}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fracstate", description="Fractional-order state-space simulation."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("simulate", help="run a simulation from a config file")
    p.add_argument("config")
    p.set_defaults(func=_cmd_simulate)
    p = sub.add_parser("compare", help="compare two trajectory CSVs")
    p.add_argument("csv_a")
    p.add_argument("csv_b")
    p.set_defaults(func=_cmd_compare)
    p = sub.add_parser("controllability", help="controllability matrix and rank")
    p.add_argument("config")
    p.set_defaults(func=_cmd_controllability)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InstabilityError as exc:
        print(f"error: simulation unstable: {exc}", file=sys.stderr)
        return EXIT_INSTABILITY
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
