"""Command-line front end.

Commands: visibility, evolve-check, collapse, packet-check, discriminate.
Times are given in mirror periods (``--periods``, ``--t-over-tm``) unless a
raw-time flag is used; ``--gamma`` is in units of 1/T_m unless
``--gamma-absolute`` is set. Flags override ``--config`` entries, which
override built-in defaults.

Exit codes: 0 success / relative verdict, 1 tolerance failure, 2 usage or
precondition, 3 cutoff too small, 4 packets interfere, 5 absolute verdict,
6 inconclusive.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np
from scipy import stats

from . import hilbert, measurement, mirror_model
from .errors import CutoffTooSmall, PacketsInterfere, PreconditionFailed, Unreachable
from .propagator import Evolver, build_hamiltonian

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_USAGE = 2
EXIT_CUTOFF = 3
EXIT_INTERFERE = 4
EXIT_ABSOLUTE = 5
EXIT_INCONCLUSIVE = 6

VERDICT_EXIT = {
    mirror_model.RELATIVE: EXIT_OK,
    mirror_model.ABSOLUTE: EXIT_ABSOLUTE,
    mirror_model.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}

COMMANDS = ("visibility", "evolve-check", "collapse", "packet-check", "discriminate")
CSV_COLUMNS = ("t", "visibility", "phase", "mirror_purity", "overlap_re", "overlap_im")


@dataclass
class RunConfig:
    command: str = "visibility"
    k: float = 1.0
    omega_m: float = 1.0
    omega_p: float = 0.0
    n_max: int | None = None
    gamma: float = 0.0
    gamma_absolute: bool = False
    t_start: float = 0.0
    periods: float | None = None
    t_end: float | None = None
    samples: int | None = None
    t_over_tm: float = 0.5
    t: float | None = None
    seed: int = 42
    draws: int = 100_000
    weights: str | None = None
    alpha: str | None = None
    cat: str | None = None
    threshold: float = measurement.DEFAULT_THRESHOLD
    overlap_tol: float = measurement.DEFAULT_OVERLAP_TOL
    revival_tol: float = mirror_model.DEFAULT_REVIVAL_TOL
    suppression_tol: float = mirror_model.DEFAULT_SUPPRESSION_TOL
    tol: float = 1e-6
    format: str | None = None
    output: str | None = None

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega_m

    def model_params(self) -> mirror_model.ModelParams:
        gamma = self.gamma if self.gamma_absolute else self.gamma / self.period
        return mirror_model.ModelParams(
            k=self.k, omega_m=self.omega_m, omega_p=self.omega_p,
            n_max=self.n_max, gamma=gamma,
        )

    def grid(self) -> tuple[float, float, int]:
        per_command = {"evolve-check": (2.0, 64)}
        periods, samples = per_command.get(self.command, (1.0, 512))
        if self.t_end is not None:
            t_end = self.t_end
        else:
            t_end = (self.periods if self.periods is not None else periods) * self.period
        return self.t_start, t_end, self.samples if self.samples is not None else samples

    def time(self) -> float:
        return self.t if self.t is not None else self.t_over_tm * self.period

    def output_format(self) -> str:
        if self.format:
            return self.format
        return "csv" if self.command == "visibility" else "json"


_FIELD_TYPES = {
    "k": float, "omega_m": float, "omega_p": float, "n_max": int, "gamma": float,
    "t_start": float, "periods": float, "t_end": float, "samples": int,
    "t_over_tm": float, "t": float, "seed": int, "draws": int, "weights": str,
    "alpha": str, "cat": str, "threshold": float, "overlap_tol": float,
    "revival_tol": float, "suppression_tol": float, "tol": float, "format": str,
    "output": str,
}


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def read_config(path: str) -> dict:
    """Parse a ``key = value`` file; keys may use dashes or underscores."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.lstrip("-").replace("-", "_")
            if key == "gamma_absolute":
                out[key] = _parse_bool(value)
            elif key in _FIELD_TYPES:
                out[key] = _FIELD_TYPES[key](value)
            else:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # defaults are None so unset flags can fall back to the config file
    add = common.add_argument
    add("--config", metavar="PATH", help="key=value file of defaults")
    add("--k", type=float, help="mirror displacement per photon, in ground-state widths")
    add("--omega-m", type=float, help="mirror angular frequency")
    add("--omega-p", type=float, help="photon angular frequency")
    add("--n-max", type=int, help="Fock cutoff (default: from k)")
    add("--gamma", type=float, help="dephasing rate in units of 1/T_m")
    add("--gamma-absolute", action="store_const", const=True, default=None,
        help="read --gamma as a raw rate")
    add("--t-start", type=float, help="grid start (raw time)")
    add("--periods", type=float, help="grid end in mirror periods")
    add("--t-end", type=float, help="grid end (raw time)")
    add("--samples", type=int, help="grid points")
    add("--t-over-tm", type=float, help="evaluation time in mirror periods")
    add("--t", type=float, help="evaluation time (raw)")
    add("--seed", type=int)
    add("--draws", type=int, help="number of seeded branch selections")
    add("--weights", help="comma-separated Born weights for a premeasured state")
    add("--alpha", help="coherent displacement, e.g. 5 or 5+5j")
    add("--cat", help="displacement of an even cat state (+alpha and -alpha)")
    add("--threshold", type=float, help="wave-packet ratio threshold")
    add("--overlap-tol", type=float)
    add("--revival-tol", type=float)
    add("--suppression-tol", type=float)
    add("--tol", type=float, help="evolve-check fidelity-defect tolerance")
    add("--format", choices=("csv", "json"))
    add("--output", "-o", metavar="PATH", help="output file (default: stdout)")

    parser = argparse.ArgumentParser(
        prog="photomirror", description="Photon + movable mirror interferometer simulator."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        values.update(read_config(args.config))
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    return RunConfig(**values)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _curve_csv(curve: mirror_model.VisibilityCurve) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for t, v, ph, pu, ov in zip(
        curve.times, curve.visibility, curve.phase, curve.mirror_purity, curve.overlap
    ):
        buf.write(",".join(_fmt(x) for x in (t, v, ph, pu, ov.real, ov.imag)) + "\n")
    return buf.getvalue()


def _key_value_csv(result: dict) -> str:
    buf = io.StringIO()
    buf.write("key,value\n")
    for key, value in result.items():
        if isinstance(value, (list, tuple)):
            value = ";".join(_fmt(v) if isinstance(v, float) else str(v) for v in value)
        elif isinstance(value, dict):
            value = ";".join(f"{k}={v}" for k, v in value.items())
        elif isinstance(value, float):
            value = _fmt(value)
        buf.write(f"{key},{value}\n")
    return buf.getvalue()


def _json(config: RunConfig, result: dict) -> str:
    # the output location is not part of the run, so files stay comparable
    echoed = {k: v for k, v in asdict(config).items() if k != "output"}
    doc = {"command": config.command, "config": echoed}
    doc.update(result)
    return json.dumps(doc, indent=2) + "\n"


def _emit(config: RunConfig, text: str) -> None:
    if config.output:
        with open(config.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_result(config: RunConfig, result: dict) -> None:
    if config.output_format() == "json":
        _emit(config, _json(config, result))
    else:
        _emit(config, _key_value_csv(result))


def cmd_visibility(config: RunConfig) -> int:
    params = config.model_params()
    t0, t1, n = config.grid()
    curve = mirror_model.visibility_curve(params, t0, t1, n)
    if config.output_format() == "csv":
        _emit(config, _curve_csv(curve))
    else:
        _emit(config, _json(config, {"curve": {
            "t": curve.times.tolist(),
            "visibility": curve.visibility.tolist(),
            "phase": curve.phase.tolist(),
            "mirror_purity": curve.mirror_purity.tolist(),
            "overlap_re": curve.overlap.real.tolist(),
            "overlap_im": curve.overlap.imag.tolist(),
        }}))
    return EXIT_OK


def cmd_evolve_check(config: RunConfig) -> int:
    params = config.model_params()
    params.check_cutoff()
    t0, t1, n = config.grid()
    evolver = Evolver(build_hamiltonian(params.hamiltonian_spec()))
    psi0 = mirror_model.initial_state(params)
    defect = 0.0
    for t in np.linspace(t0, t1, n):
        fid = hilbert.fidelity(evolver(t, psi0), mirror_model.joint_state(params, t))
        defect = max(defect, 1.0 - fid)
    passed = defect <= config.tol
    _emit_result(config, {"defect": defect, "tolerance": config.tol, "passed": passed})
    return EXIT_OK if passed else EXIT_TOLERANCE


def _parse_weights(text: str) -> list[float]:
    w = [float(x) for x in text.split(",")]
    if len(w) != 2 or any(x < 0 for x in w) or abs(sum(w) - 1.0) > 1e-10:
        raise ValueError(f"weights must be two non-negative numbers summing to 1: {text!r}")
    return w


def cmd_collapse(config: RunConfig) -> int:
    params = config.model_params()
    t = config.time()
    if config.draws < 1:
        raise ValueError("--draws must be >= 1")
    pointers = mirror_model.pointer_set(params, t)
    arms = list(mirror_model.arm_states())
    if config.weights is not None:
        coeffs = np.sqrt(_parse_weights(config.weights))
        state = measurement.premeasure(coeffs, arms, pointers)
    else:
        state = mirror_model.joint_state(params, t)
    draws = measurement.draw_branches(
        state, arms, pointers, config.draws, config.seed, config.overlap_tol
    )
    weights = measurement.born_weights(state, arms)
    counts = np.bincount(draws, minlength=len(weights))
    expected = weights * config.draws
    nz = expected > 0
    chi2 = float(np.sum((counts[nz] - expected[nz]) ** 2 / expected[nz]))
    dof = int(nz.sum()) - 1
    p_value = float(stats.chi2.sf(chi2, dof)) if dof > 0 else 1.0
    _emit_result(config, {
        "time": t,
        "weights": weights.tolist(),
        "counts": counts.tolist(),
        "frequencies": (counts / config.draws).tolist(),
        "chi_square": chi2,
        "chi_square_p": p_value,
    })
    return EXIT_OK


def _parse_complex(text: str) -> complex:
    return complex(text.replace(" ", "").replace("i", "j"))


def cmd_packet_check(config: RunConfig) -> int:
    if config.alpha is not None and config.cat is not None:
        raise ValueError("give either --alpha or --cat, not both")
    if config.cat is not None:
        a = _parse_complex(config.cat)
        n_max = config.n_max or hilbert.default_cutoff(abs(a))
        plus = hilbert.coherent_state(a, n_max)
        minus = hilbert.coherent_state(-a, n_max)
        psi = hilbert.StateVector.normalized(plus.dims, plus.amps + minus.amps)
        label = f"cat({a})"
    else:
        a = _parse_complex(config.alpha) if config.alpha is not None else 0j
        n_max = config.n_max or hilbert.default_cutoff(abs(a))
        psi = hilbert.coherent_state(a, n_max)
        label = f"coherent({a})"
    x, p = hilbert.quadrature_observables(n_max)
    table = []
    for name, op in (("X", x), ("P", p)):
        mean, dev = hilbert.moments(psi, op)
        table.append({
            "observable": name, "mean": mean, "deviation": dev,
            "ratio": measurement.wave_packet_ratio(psi, op),
        })
    verdict = measurement.is_wave_packet(psi, [x, p], config.threshold)
    if config.output_format() == "json":
        _emit(config, _json(config, {
            "state": label, "ratios": table, "threshold": config.threshold,
            "verdict": verdict,
        }))
    else:
        buf = io.StringIO()
        buf.write("observable,mean,deviation,ratio\n")
        for row in table:
            buf.write(f"{row['observable']},{_fmt(row['mean'])},"
                      f"{_fmt(row['deviation'])},{_fmt(row['ratio'])}\n")
        buf.write(f"verdict,{str(verdict).lower()},,\n")
        _emit(config, buf.getvalue())
    return EXIT_OK


def cmd_discriminate(config: RunConfig) -> int:
    params = config.model_params()
    verdict = mirror_model.discriminate(params, config.revival_tol, config.suppression_tol)
    _emit_result(config, {
        "verdict": verdict.label,
        "mid_visibility": verdict.mid_visibility,
        "revival_visibility": verdict.revival_visibility,
        "tolerances": {
            "revival_tol": config.revival_tol,
            "suppression_tol": config.suppression_tol,
        },
    })
    return VERDICT_EXIT[verdict.label]


HANDLERS = {
    "visibility": cmd_visibility,
    "evolve-check": cmd_evolve_check,
    "collapse": cmd_collapse,
    "packet-check": cmd_packet_check,
    "discriminate": cmd_discriminate,
}


def _fail(exc: Exception) -> None:
    print(f"photomirror: error: {exc}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = resolve_config(args)
        return HANDLERS[config.command](config)
    except CutoffTooSmall as exc:
        _fail(exc)
        return EXIT_CUTOFF
    except PacketsInterfere as exc:
        _fail(exc)
        return EXIT_INTERFERE
    except (PreconditionFailed, Unreachable, ValueError, OSError) as exc:
        _fail(exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
