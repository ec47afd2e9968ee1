"""Command line front end.

Subcommands map one-to-one onto the library layers:

  classify      case matches and predicted surviving exponents
  print-charfn  expanded and reduced characteristic function
  analyze       stability criteria plus the winding-number cross-check
  oracle        the winding-number zero count on its own
  simulate      time stepping, CSV/SVG output, decay diagnostic
  basin         repeated runs from shrinking initial states
  sweep         one scalar parameter swept over a value list

Exit codes: 0 for any completed verdict (including inconclusive ones),
1 for usage or configuration problems, 2 when internal consistency
breaks (a criterion contradicting another, or the oracle contradicting
a fired criterion) with a JSON diagnostic on stderr.

All file output is written atomically (temp file in the destination
directory, then rename), so a killed run never leaves a truncated
artifact behind.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .charfn import build_general, sine_ratios, to_simple
from .classify import classification_report
from .config import load_system
from .criteria import Verdict, assess
from .errors import (
    ConfigError,
    CriterionOracleMismatch,
    FracstabError,
    InternalContradiction,
    NotReducible,
    SamplingInconclusive,
    SineRatiosUndefined,
    ZeroAtOrigin,
    ZeroOnAxis,
)
from .model import MultiOrder, MultiOrderSystem, SystemMatrix
from .oracle import ContourSpec, auto_contour, count_rhp_zeros, scan_imaginary_axis
from .solver import SolverConfig, decay_diagnostic, integrate, simulate_nonlinear_basin
from .svgplot import render

__all__ = ["main"]

USAGE_EXIT = 1
CONTRADICTION_EXIT = 2


@dataclass
class RunManifest:
    """What a CLI invocation did, for reproducibility records."""

    command: str
    config: str
    version: str = __version__
    options: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "version": self.version,
            "options": self.options,
            "outputs": self.outputs,
        }


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage by default; this project
    reserves 2 for consistency violations, so remap usage to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".partial-")
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


def _parse_floats(text: str, *, expect: int | None = None, what: str = "value") -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"could not parse {what} list {text!r}") from exc
    if expect is not None and len(vals) != expect:
        raise ConfigError(f"expected {expect} comma-separated {what}s, got {len(vals)}")
    return vals


def _contour_from_args(args, q) -> ContourSpec | None:
    if args.epsilon is None and args.radius is None:
        return None
    base = auto_contour(q)
    return ContourSpec(
        epsilon=args.epsilon if args.epsilon is not None else base.epsilon,
        radius=args.radius if args.radius is not None else base.radius,
    )


def _with_x0(system: MultiOrderSystem, x0_text: str | None) -> MultiOrderSystem:
    if x0_text is None:
        return system
    vals = _parse_floats(x0_text, expect=3, what="initial state component")
    return MultiOrderSystem(
        order=system.order,
        matrix=system.matrix,
        forcing=system.forcing,
        nonlinearity=system.nonlinearity,
        x0=tuple(vals),
    )


def _emit(args, manifest: RunManifest, payload: dict, text_lines: list[str]) -> None:
    if getattr(args, "json", False):
        doc = dict(payload)
        doc["manifest"] = manifest.as_dict()
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)
        for out in manifest.outputs:
            print(f"wrote {out}")


def _cmd_classify(args) -> int:
    system = load_system(args.config)
    report = classification_report(system)
    manifest = RunManifest(command="classify", config=args.config)
    lines = []
    structural = report["structural"]
    if structural is None:
        lines.append("structural exponents: unavailable (not reducible)")
    else:
        lines.append(
            "structural exponents: ("
            + ", ".join(f"{v:.6g}" for v in structural)
            + ")"
        )
    if not report["matches"]:
        lines.append("no case conditions hold for this matrix")
    for m in report["matches"]:
        pred = ", ".join(f"{v:.6g}" for v in m["predicted"])
        agrees = m["agrees_with_structural"]
        tag = {True: "agrees with structural", False: "DIFFERS from structural"}.get(
            agrees, "no structural comparison"
        )
        lines.append(
            f"case {m['case']:2d}: conditions {'+'.join(m['conditions'])} "
            f"hold (residual {m['residual']:.2e}); predicted ({pred}) [{tag}]"
        )
    _emit(args, manifest, report, lines)
    return 0


def _cmd_print_charfn(args) -> int:
    system = load_system(args.config)
    q = build_general(system)
    manifest = RunManifest(command="print-charfn", config=args.config)
    payload: dict = {"general": {"terms": [list(t) for t in q.terms], "text": q.describe()}}
    lines = [f"characteristic function: {q.describe()}"]
    try:
        simple = to_simple(q)
        payload["reduced"] = {
            "exponents": [simple.p1, simple.p2, simple.p3, simple.p4],
            "coefficients": {"a": simple.a, "b": simple.b, "c": simple.c, "d": simple.d},
            "text": simple.describe(),
        }
        lines.append(f"reduced form: {simple.describe()}")
        lines.append(
            f"slots: p1={simple.p1:.6g} p2={simple.p2:.6g} "
            f"p3={simple.p3:.6g} p4={simple.p4:.6g}"
        )
        lines.append(
            f"coefficients: a={simple.a:.6g} b={simple.b:.6g} "
            f"c={simple.c:.6g} d={simple.d:.6g}"
        )
        try:
            ratios = sine_ratios(simple)
            payload["sine_ratios"] = {
                "complement": list(ratios.complement),
                "direct": list(ratios.direct),
            }
            lines.append(
                "sine ratios (complement): "
                + ", ".join(f"{v:.6g}" for v in ratios.complement)
            )
            lines.append(
                "sine ratios (direct): " + ", ".join(f"{v:.6g}" for v in ratios.direct)
            )
        except SineRatiosUndefined:
            lines.append("sine ratios undefined (leading exponent is 2)")
            payload["sine_ratios"] = None
    except NotReducible as exc:
        lines.append(f"reduced form: unavailable ({exc})")
        payload["reduced"] = None
    _emit(args, manifest, payload, lines)
    return 0


def _criterion_lines(report) -> list[str]:
    lines = []
    for r in report.criteria:
        status = r.verdict.value if r.applicable else "not applicable"
        note = f"  [{r.note}]" if r.note else ""
        lines.append(f"  {r.criterion:28s} {status}{note}")
    return lines


def _report_payload(report) -> dict:
    return {
        "overall": report.overall.value,
        "criteria": [
            {
                "criterion": r.criterion,
                "applicable": r.applicable,
                "verdict": r.verdict.value,
                "witness": {k: _jsonable(v) for k, v in r.witness.items()},
                "note": r.note,
            }
            for r in report.criteria
        ],
        "oracle_zero_count": report.oracle_zero_count,
        "oracle_note": report.oracle_note,
        "notes": list(report.notes),
        "characteristic_function": report.general.describe(),
    }


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (tuple, list)):
        return [_jsonable(u) for u in v]
    return v


def _cmd_analyze(args) -> int:
    system = load_system(args.config)
    q = build_general(system)
    contour = _contour_from_args(args, q)
    report = assess(system, with_oracle=not args.no_oracle, contour=contour)
    manifest = RunManifest(
        command="analyze",
        config=args.config,
        options={"oracle": not args.no_oracle},
    )
    lines = [f"characteristic function: {report.general.describe()}"]
    if report.simple is not None:
        lines.append(f"reduced form: {report.simple.describe()}")
    lines.append("criteria:")
    lines.extend(_criterion_lines(report))
    if report.oracle_zero_count is not None:
        lines.append(f"zero count (right half-plane): {report.oracle_zero_count}")
    elif report.oracle_note:
        lines.append(f"zero count unavailable: {report.oracle_note}")
    for note in report.notes:
        lines.append(f"note: {note}")
    lines.append(f"overall: {report.overall.value}")
    _emit(args, manifest, _report_payload(report), lines)
    return 0


def _cmd_oracle(args) -> int:
    system = load_system(args.config)
    q = build_general(system)
    contour = _contour_from_args(args, q)
    manifest = RunManifest(command="oracle", config=args.config)
    samples: list | None = [] if args.dump_contour else None
    try:
        res = count_rhp_zeros(q, contour=contour, samples_out=samples)
    except (ZeroAtOrigin, ZeroOnAxis) as exc:
        _emit(
            args,
            manifest,
            {"zero_count": None, "boundary": str(exc)},
            [f"zero count unavailable: {exc}", "verdict: not asymptotically stable"],
        )
        return 0
    except SamplingInconclusive as exc:
        _emit(
            args,
            manifest,
            {"zero_count": None, "inconclusive": str(exc)},
            [f"zero count inconclusive: {exc}"],
        )
        return 0
    if args.dump_contour and samples is not None:
        rows = ["segment,re_s,im_s,re_q,im_q"]
        for name, pts, vals in samples:
            for s, v in zip(pts, vals):
                rows.append(
                    f"{name},{s.real:.16e},{s.imag:.16e},{v.real:.16e},{v.imag:.16e}"
                )
        _atomic_write(args.dump_contour, "\n".join(rows) + "\n")
        manifest.outputs.append(args.dump_contour)
    axis_roots = scan_imaginary_axis(q)
    payload = {
        "zero_count": res.zero_count,
        "total_turning": res.total_turning,
        "residual": res.residual,
        "epsilon": res.contour.epsilon,
        "radius": res.contour.radius,
        "samples_used": res.samples_used,
        "min_abs_on_contour": res.min_abs_on_contour,
        "segment_turning": res.segment_turning,
        "axis_roots": [
            {"omega": r.omega, "real_part": r.real_part} for r in axis_roots
        ],
    }
    lines = [
        f"zeros in the right half-plane: {res.zero_count}",
        f"turning residual: {res.residual:.2e} windings "
        f"(contour eps={res.contour.epsilon:g}, R={res.contour.radius:g}, "
        f"{res.samples_used} samples)",
    ]
    for r in axis_roots:
        lines.append(
            f"imaginary-part root at omega={r.omega:.6g}, real part {r.real_part:.6g}"
        )
    _emit(args, manifest, payload, lines)
    return 0


def _traj_csv(traj, stride: int) -> str:
    rows = ["t,x1,x2,x3"]
    idx = list(range(0, len(traj.t), stride))
    if idx[-1] != len(traj.t) - 1:
        idx.append(len(traj.t) - 1)
    for i in idx:
        rows.append(
            f"{traj.t[i]:.16e},{traj.x[0, i]:.16e},"
            f"{traj.x[1, i]:.16e},{traj.x[2, i]:.16e}"
        )
    return "\n".join(rows) + "\n"


def _cmd_simulate(args) -> int:
    system = _with_x0(load_system(args.config), args.x0)
    cfg = SolverConfig(step=args.step, t_end=args.t_end)
    traj = integrate(system, cfg)
    manifest = RunManifest(
        command="simulate",
        config=args.config,
        options={"step": args.step, "t_end": args.t_end, "stride": args.stride},
    )
    norms = traj.norms()
    payload: dict = {
        "t_end": float(traj.t[-1]),
        "final_state": [float(v) for v in traj.x[:, -1]],
        "final_norm": float(norms[-1]),
        "max_norm": float(norms.max()),
    }
    lines = [
        f"integrated to t={traj.t[-1]:g} in {len(traj.t) - 1} steps",
        "final state: (" + ", ".join(f"{v:.6g}" for v in traj.x[:, -1]) + ")",
        f"final norm: {norms[-1]:.6g} (max over run {norms.max():.6g})",
    ]
    if args.diag:
        window = tuple(_parse_floats(args.window, expect=2, what="window bound"))
        diag = decay_diagnostic(traj, args.nu, window)
        payload["decay"] = {
            "nu": diag.nu,
            "sup": diag.sup,
            "sup_q3": diag.sup_q3,
            "sup_q4": diag.sup_q4,
            "plateau": diag.plateau,
        }
        lines.append(
            f"decay check: sup t^{args.nu:g}|x| = {diag.sup:.6g} on "
            f"[{window[0]:g}, {window[1]:g}]; quarters q3={diag.sup_q3:.6g} "
            f"q4={diag.sup_q4:.6g}; plateau: {'yes' if diag.plateau else 'no'}"
        )
    if args.out:
        _atomic_write(args.out, _traj_csv(traj, max(1, args.stride)))
        manifest.outputs.append(args.out)
    if args.svg:
        series = {"|x|": norms}
        if args.diag:
            scaled = np.full_like(norms, np.nan)
            mask = traj.t > 0
            scaled[mask] = traj.t[mask] ** args.nu * norms[mask]
            series[f"t^{args.nu:g} |x|"] = scaled
        _atomic_write(
            args.svg,
            render(traj.t, series, title=f"trajectory ({os.path.basename(args.config)})"),
        )
        manifest.outputs.append(args.svg)
    _emit(args, manifest, payload, lines)
    return 0


def _cmd_basin(args) -> int:
    system = load_system(args.config)
    cfg = SolverConfig(step=args.step, t_end=args.t_end)
    radii = _parse_floats(args.radii, what="radius")
    if not radii:
        raise ConfigError("at least one radius is required")
    window = tuple(_parse_floats(args.window, expect=2, what="window bound"))
    runs = simulate_nonlinear_basin(system, radii, cfg, args.nu, window)
    manifest = RunManifest(
        command="basin",
        config=args.config,
        options={"radii": radii, "step": args.step, "t_end": args.t_end, "nu": args.nu},
    )
    lines = []
    payload_runs = []
    for run in runs:
        d = run.diagnostic
        lines.append(
            f"radius {run.radius:g}: sup t^{args.nu:g}|x| = {d.sup:.6g}, "
            f"q3={d.sup_q3:.6g}, q4={d.sup_q4:.6g}, "
            f"plateau: {'yes' if d.plateau else 'no'}"
        )
        payload_runs.append(
            {
                "radius": run.radius,
                "sup": d.sup,
                "sup_q3": d.sup_q3,
                "sup_q4": d.sup_q4,
                "plateau": d.plateau,
                "final_norm": float(run.trajectory.norms()[-1]),
            }
        )
    if args.out:
        rows = ["radius,sup_scaled,sup_q3,sup_q4,plateau"]
        for r in payload_runs:
            rows.append(
                f"{r['radius']:.16e},{r['sup']:.16e},{r['sup_q3']:.16e},"
                f"{r['sup_q4']:.16e},{int(r['plateau'])}"
            )
        _atomic_write(args.out, "\n".join(rows) + "\n")
        manifest.outputs.append(args.out)
    if args.svg:
        base = runs[0].diagnostic.t_window
        series = {
            f"r={run.radius:g}": np.interp(
                base, run.diagnostic.t_window, run.diagnostic.scaled
            )
            for run in runs
        }
        _atomic_write(
            args.svg,
            render(base, series, title="scaled decay by initial radius",
                   y_label=f"t^{args.nu:g} |x|"),
        )
        manifest.outputs.append(args.svg)
    _emit(args, manifest, {"runs": payload_runs}, lines)
    return 0


def _apply_sweep_value(system: MultiOrderSystem, param: str, value: float) -> MultiOrderSystem:
    parts = param.split(".")
    try:
        if parts[0] == "matrix" and len(parts) == 3:
            i, j = int(parts[1]) - 1, int(parts[2]) - 1
            if not (0 <= i < 3 and 0 <= j < 3):
                raise ConfigError(f"matrix indices in {param!r} must be 1..3")
            arr = system.matrix.array.copy()
            arr[i, j] = value
            return MultiOrderSystem(
                order=system.order,
                matrix=SystemMatrix(arr),
                forcing=system.forcing,
                nonlinearity=system.nonlinearity,
                x0=system.x0,
            )
        if parts[0] == "alpha" and len(parts) == 2:
            k = int(parts[1]) - 1
            if not 0 <= k < 3:
                raise ConfigError(f"order index in {param!r} must be 1..3")
            alpha = list(system.order.alpha)
            alpha[k] = value
            return MultiOrderSystem(
                order=MultiOrder(tuple(alpha)),
                matrix=system.matrix,
                forcing=system.forcing,
                nonlinearity=system.nonlinearity,
                x0=system.x0,
            )
    except ValueError as exc:
        raise ConfigError(f"could not parse sweep parameter {param!r}") from exc
    raise ConfigError(
        f"unknown sweep parameter {param!r} (use matrix.I.J or alpha.K, 1-based)"
    )


def _sweep_workers(n_jobs: int) -> int:
    env = os.environ.get("FRACSTAB_THREADS", "")
    if env:
        try:
            cap = int(env)
        except ValueError as exc:
            raise ConfigError(f"FRACSTAB_THREADS must be an integer, got {env!r}") from exc
        if cap < 1:
            raise ConfigError("FRACSTAB_THREADS must be at least 1")
    else:
        cap = min(8, os.cpu_count() or 1)
    return max(1, min(cap, n_jobs))


def _cmd_sweep(args) -> int:
    system = load_system(args.config)
    values = _parse_floats(args.values, what="sweep value")
    if not values:
        raise ConfigError("at least one sweep value is required")
    variants = [_apply_sweep_value(system, args.param, v) for v in values]

    def run(sys_v):
        return assess(sys_v, with_oracle=not args.no_oracle)

    with ThreadPoolExecutor(max_workers=_sweep_workers(len(values))) as pool:
        reports = list(pool.map(run, variants))

    manifest = RunManifest(
        command="sweep",
        config=args.config,
        options={"param": args.param, "values": values, "oracle": not args.no_oracle},
    )
    lines = [f"sweep over {args.param}:"]
    payload_rows = []
    for v, rep in zip(values, reports):
        fired = ",".join(r.criterion for r in rep.fired()) or "-"
        zc = rep.oracle_zero_count
        z_text = "?" if zc is None else str(zc)
        lines.append(
            f"  {args.param}={v:<12g} verdict={rep.overall.value:<28s} "
            f"zeros={z_text:<3s} fired={fired}"
        )
        payload_rows.append(
            {
                "value": v,
                "verdict": rep.overall.value,
                "zero_count": zc,
                "oracle_note": rep.oracle_note,
                "fired": [r.criterion for r in rep.fired()],
            }
        )
    flips = [
        (values[i], values[i + 1])
        for i in range(len(reports) - 1)
        if reports[i].overall is not reports[i + 1].overall
    ]
    for lo, hi in flips:
        lines.append(f"verdict changes between {args.param}={lo:g} and {hi:g}")
    payload = {"param": args.param, "rows": payload_rows,
               "verdict_changes": [[lo, hi] for lo, hi in flips]}
    _emit(args, manifest, payload, lines)
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="fracstab",
        description="Stability analysis and simulation of three-component "
        "fractional linear systems with distinct derivative orders.",
    )
    parser.add_argument("--version", action="version", version=f"fracstab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="system description (.toml or .json)")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(fn=fn)
        return p

    add("classify", _cmd_classify, "match the matrix against the case table")
    add("print-charfn", _cmd_print_charfn, "show the characteristic function")

    p = add("analyze", _cmd_analyze, "run stability criteria and the zero-count oracle")
    p.add_argument("--no-oracle", action="store_true",
                   help="skip the winding-number cross-check")
    p.add_argument("--epsilon", type=float, default=None,
                   help="inner contour radius override")
    p.add_argument("--radius", type=float, default=None,
                   help="outer contour radius override")

    p = add("oracle", _cmd_oracle, "count right-half-plane zeros by winding number")
    p.add_argument("--epsilon", type=float, default=None,
                   help="inner contour radius override")
    p.add_argument("--radius", type=float, default=None,
                   help="outer contour radius override")
    p.add_argument("--dump-contour", metavar="PATH", default=None,
                   help="write sampled contour values as CSV")

    p = add("simulate", _cmd_simulate, "integrate the system on a uniform grid")
    p.add_argument("--step", type=float, required=True, help="grid spacing h")
    p.add_argument("--t-end", type=float, required=True, help="final time")
    p.add_argument("--x0", default=None, help="initial state override, e.g. 1,-2,2")
    p.add_argument("--out", default=None, help="trajectory CSV path")
    p.add_argument("--stride", type=int, default=1, help="CSV row thinning factor")
    p.add_argument("--svg", default=None, help="plot path")
    p.add_argument("--diag", action="store_true", help="attach the decay diagnostic")
    p.add_argument("--nu", type=float, default=0.3, help="decay exponent for t^nu |x|")
    p.add_argument("--window", default="100,1000",
                   help="diagnostic window lo,hi (default 100,1000)")

    p = add("basin", _cmd_basin, "rerun from shrinking initial radii")
    p.add_argument("--radii", required=True, help="comma-separated initial radii")
    p.add_argument("--step", type=float, required=True, help="grid spacing h")
    p.add_argument("--t-end", type=float, required=True, help="final time")
    p.add_argument("--nu", type=float, default=0.3, help="decay exponent for t^nu |x|")
    p.add_argument("--window", default="100,1000",
                   help="diagnostic window lo,hi (default 100,1000)")
    p.add_argument("--out", default=None, help="summary CSV path")
    p.add_argument("--svg", default=None, help="plot path")

    p = add("sweep", _cmd_sweep, "re-analyze while varying one scalar")
    p.add_argument("--param", required=True,
                   help="matrix.I.J or alpha.K (1-based indices)")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--no-oracle", action="store_true",
                   help="skip the winding-number count per value")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (InternalContradiction, CriterionOracleMismatch) as exc:
        diagnostic = {
            "error": type(exc).__name__,
            "message": str(exc),
            "command": args.command,
            "config": getattr(args, "config", None),
        }
        print(json.dumps(diagnostic, indent=2, sort_keys=True), file=sys.stderr)
        return CONTRADICTION_EXIT
    except FracstabError as exc:
        print(f"fracstab {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except OSError as exc:
        print(f"fracstab {args.command}: {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
