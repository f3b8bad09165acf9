"""Command-line interface: enumeration, labeling, solving, classification, reports.

Exit codes: 0 on success, 1 on a verification failure, 2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from wronski import __version__
from wronski.critpoly import SequenceError
from wronski.labelpoly import (
    Labeling,
    LabelingError,
    lemma6_labeling,
    lemma7_labeling,
    validate_labeling,
)
from wronski.netcomb import EdgeId, NetClass, NetStructureError, enumerate_nets
from wronski.nettrace import TraceConfig, TraceError, classify_net, roundtrip_check, trace_chords
from wronski.numcore import NumericError, Plane2
from wronski.render import (
    fig_net_gallery,
    fig_residual_summary,
    fig_traced_chords,
    render_dual_tree_svg,
    render_net_svg,
)
from wronski.solver import (
    ShapiroProblem,
    SolveConfig,
    SolveError,
    random_problem,
    solve_shapiro,
    verify_theorems,
)

INPUT_ERRORS = (
    SolveError,
    TraceError,
    LabelingError,
    NetStructureError,
    SequenceError,
    NumericError,
    ValueError,
    KeyError,
    OSError,
    json.JSONDecodeError,
)


@dataclass
class RunConfig:
    seed: int = 0
    tol_residual: float = 1e-10
    tol_plucker: float = 1e-6
    tol_label: float = 1e-9
    tol_realness: float = 1e-8
    trace_step: float = 1e-3
    out_json: str | None = None
    svg_dir: str | None = None
    out_dir: str | None = None

    def tolerances(self) -> dict:
        return {
            "residual": self.tol_residual,
            "plucker": self.tol_plucker,
            "label": self.tol_label,
            "realness": self.tol_realness,
            "trace_step": self.trace_step,
        }

    def meta(self) -> dict:
        return {"tool": "wronski", "version": __version__, "seed": self.seed,
                "tolerances": self.tolerances()}

    def solve_config(self) -> SolveConfig:
        return SolveConfig(
            seed=self.seed,
            residual_tol=self.tol_residual,
            plucker_separation=self.tol_plucker,
            realness_ratio=self.tol_realness,
        )

    def trace_config(self) -> TraceConfig:
        return TraceConfig(step=self.trace_step)


def _config_from(args) -> RunConfig:
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("WRONSKI_SEED", "0"))
    cfg = RunConfig(seed=seed)
    for name in ("tol_residual", "tol_plucker", "tol_label", "tol_realness", "trace_step"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    cfg.out_json = getattr(args, "json", None)
    cfg.svg_dir = getattr(args, "svg_dir", None)
    cfg.out_dir = getattr(args, "out_dir", None)
    return cfg


def _write_json(path, payload: dict, cfg: RunConfig):
    payload = {"meta": cfg.meta(), **payload}
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=False) + "\n")


def _poly_json(row) -> dict:
    arr = np.asarray(row, dtype=complex)
    return {"re": [float(v) for v in arr.real], "im": [float(v) for v in arr.imag]}


def _poly_from_json(data) -> np.ndarray:
    return np.array(data["re"], dtype=float) + 1j * np.array(data["im"], dtype=float)


def _plane_json(plane: Plane2) -> dict:
    rows = plane.basis_array
    return {
        "d": plane.d,
        "rows": [_poly_json(rows[0]), _poly_json(rows[1])],
        "plucker": _poly_json(plane.plucker()),
    }


def _plane_from_json(data) -> Plane2:
    rows = np.vstack([_poly_from_json(data["rows"][0]), _poly_from_json(data["rows"][1])])
    return Plane2.from_rows(rows, int(data["d"]))


def _parse_points(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.replace(" ", "").split(",") if part)


def _parse_arcs(text: str) -> list[EdgeId]:
    return [EdgeId.parse(part) for part in text.replace(" ", "").split(",") if part]


def _load_net(spec: str) -> NetClass:
    path = Path(spec)
    text = path.read_text() if path.exists() else spec
    return NetClass.from_json(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_nets(args) -> int:
    cfg = _config_from(args)
    if not 3 <= args.d <= 8:
        print("nets: d must be between 3 and 8", file=sys.stderr)
        return 2
    nets = enumerate_nets(args.d)
    if cfg.out_json:
        _write_json(
            cfg.out_json,
            {"d": args.d, "count": len(nets), "nets": [json.loads(n.to_json()) for n in nets]},
            cfg,
        )
    if cfg.svg_dir:
        out = Path(cfg.svg_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, net in enumerate(nets):
            (out / f"net_d{args.d}_{i:03d}.svg").write_text(render_net_svg(net))
            if args.dual_trees:
                (out / f"tree_d{args.d}_{i:03d}.svg").write_text(render_dual_tree_svg(net))
    print(f"{len(nets)} nets for d={args.d}")
    return 0


def cmd_label(args) -> int:
    cfg = _config_from(args)
    net = _load_net(args.net)
    if args.mode == "interior":
        lab = lemma6_labeling(net, net.arcs())
    elif args.mode == "lemma6":
        if not args.w:
            print("label: --w is required for mode lemma6", file=sys.stderr)
            return 2
        lab = lemma6_labeling(net, _parse_arcs(args.w))
    else:
        if not args.chain:
            print("label: --chain is required for mode lemma7", file=sys.stderr)
            return 2
        chain = [_parse_arcs(part) for part in args.chain.split(";") if part.strip()]
        lab = lemma7_labeling(net, chain)
    violations = validate_labeling(lab, tol=cfg.tol_label)
    payload = {
        "labeling": json.loads(lab.to_json()),
        "violations": violations,
    }
    if cfg.out_json:
        _write_json(cfg.out_json, payload, cfg)
    else:
        print(json.dumps(payload, indent=2))
    return 0 if not violations else 1


def _solution_payload(problem, sols) -> dict:
    return {
        "problem": {"d": problem.d, "points": [x.real for x in problem.points]},
        "solutions": [
            {
                "plane": _plane_json(s.plane),
                "residual": s.residual,
                "is_real": s.is_real,
            }
            for s in sols.solutions
        ],
        "diagnostics": {
            k: v for k, v in sols.diagnostics.items() if not isinstance(v, list)
        },
    }


def cmd_solve(args) -> int:
    cfg = _config_from(args)
    points = _parse_points(args.points)
    problem = ShapiroProblem(args.d, points)
    sols = solve_shapiro(problem, cfg.solve_config())
    report = verify_theorems(problem, sols, residual_tol=cfg.tol_residual)
    payload = _solution_payload(problem, sols)
    payload["verification"] = report.to_dict()
    if cfg.out_json:
        _write_json(cfg.out_json, payload, cfg)
    status = "ok" if report.passed else "FAILED"
    print(
        f"d={args.d}: {report.found_count}/{report.expected_count} planes, "
        f"{sum(report.real_flags)} real, verification {status}"
    )
    if not report.passed:
        for line in report.failures:
            print(f"  {line}", file=sys.stderr)
    return 0 if report.passed else 1


def cmd_classify(args) -> int:
    cfg = _config_from(args)
    data = json.loads(Path(args.infile).read_text())
    problem = ShapiroProblem(
        int(data["problem"]["d"]), tuple(data["problem"]["points"])
    )
    nets = []
    for record in data["solutions"]:
        plane = _plane_from_json(record["plane"])
        nets.append(json.loads(classify_net(plane, problem, cfg.trace_config()).to_json()))
    text = json.dumps(nets, indent=2)
    if cfg.out_json:
        _write_json(cfg.out_json, {"nets": nets}, cfg)
    else:
        print(text)
    return 0


def cmd_roundtrip(args) -> int:
    cfg = _config_from(args)
    points = _parse_points(args.points)
    problem = ShapiroProblem(args.d, points)
    report = roundtrip_check(problem, cfg.solve_config(), cfg.trace_config())
    if cfg.out_json:
        _write_json(cfg.out_json, {"roundtrip": report.to_dict()}, cfg)
    status = "ok" if report.passed else "FAILED"
    print(
        f"d={args.d}: {report.solution_count}/{report.expected_count} solutions, "
        f"nets distinct={report.nets_distinct} cover={report.nets_cover_all}, {status}"
    )
    if not report.passed:
        for line in report.failures + report.solver_failures:
            print(f"  {line}", file=sys.stderr)
    return 0 if report.passed else 1


def report_expected(d: int) -> int:
    from wronski.netcomb import catalan_u

    return catalan_u(d)


def cmd_verify(args) -> int:
    cfg = _config_from(args)
    if args.d > 5 and args.full:
        print("verify: full roundtrip is limited to d <= 5", file=sys.stderr)
        return 2
    out_dir = Path(cfg.out_dir or "verify_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(cfg.seed)
    full = args.full and args.d <= 5

    rows = []
    all_passed = True
    first_chords = None
    for i in range(args.instances):
        problem = random_problem(args.d, rng)
        sols = solve_shapiro(problem, cfg.solve_config())
        max_residual = max((s.residual for s in sols.solutions), default=0.0)
        row = {
            "instance": i,
            "d": args.d,
            "points": ",".join(f"{x.real:.6g}" for x in problem.points),
            "solutions": len(sols.solutions),
            "expected": report_expected(args.d),
            "nets_distinct": "",
            "nets_cover": "",
            "labels_valid": "",
            "max_residual": max_residual,
            "passed": False,
        }
        if full:
            report = roundtrip_check(
                problem, cfg.solve_config(), cfg.trace_config(), solutions=sols
            )
            row["nets_distinct"] = report.nets_distinct
            row["nets_cover"] = report.nets_cover_all
            row["labels_valid"] = all(report.labelings_valid)
            row["passed"] = report.passed
        else:
            report = verify_theorems(problem, sols, residual_tol=cfg.tol_residual)
            row["passed"] = report.passed
        if i == 0 and args.d >= 3:
            try:
                from wronski.nettrace import _circle_model

                chords = []
                circle_pts = None
                for s in sols.solutions:
                    func, circle_pts = _circle_model(s.plane, problem)
                    chords.append(trace_chords(func, circle_pts, cfg.trace_config()))
                first_chords = (circle_pts, chords)
            except (TraceError, NumericError):
                first_chords = None
        rows.append(row)
        all_passed = all_passed and row["passed"]

    # delimited output with an embedded metadata comment
    csv_path = out_dir / "verify_report.csv"
    with csv_path.open("w", newline="") as fh:
        fh.write(f"# {json.dumps(cfg.meta(), sort_keys=True)}\n")
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)

    _write_json(
        out_dir / "verify_report.json",
        {"d": args.d, "instances": args.instances, "all_passed": all_passed, "rows": rows},
        cfg,
    )

    if args.d <= 6:
        fig_net_gallery(enumerate_nets(args.d), out_dir / "nets.png")
    fig_residual_summary(rows, out_dir / "residuals.png")
    if first_chords is not None:
        fig_traced_chords(
            first_chords[0],
            first_chords[1],
            out_dir / "traced_chords.png",
            title=f"level-set chords, d={args.d}, instance 0",
        )

    print(f"verify d={args.d}: {sum(1 for r in rows if r['passed'])}/{len(rows)} instances passed")
    print(f"report written to {out_dir}")
    return 0 if all_passed else 1


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(parser):
    parser.add_argument("--seed", type=int, default=None, help="rng seed (or WRONSKI_SEED)")
    parser.add_argument("--json", type=str, default=None, help="write JSON output here")
    parser.add_argument("--tol-residual", dest="tol_residual", type=float, default=None)
    parser.add_argument("--tol-plucker", dest="tol_plucker", type=float, default=None)
    parser.add_argument("--tol-label", dest="tol_label", type=float, default=None)
    parser.add_argument("--tol-realness", dest="tol_realness", type=float, default=None)
    parser.add_argument("--trace-step", dest="trace_step", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wronski",
        description="Nets, labelings and real rational functions with prescribed critical points.",
    )
    parser.add_argument("--version", action="version", version=f"wronski {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("nets", help="enumerate nets, optionally render SVG")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--svg-dir", dest="svg_dir", type=str, default=None)
    p.add_argument("--dual-trees", action="store_true", help="also render dual trees")
    _add_common(p)
    p.set_defaults(func=cmd_nets)

    p = sub.add_parser("label", help="construct a labeling for a net")
    p.add_argument("--net", type=str, required=True, help="net JSON (inline or file)")
    p.add_argument("--mode", choices=("lemma6", "lemma7", "interior"), default="interior")
    p.add_argument("--w", type=str, default=None, help="arc subset, e.g. t1,t2,t4")
    p.add_argument("--chain", type=str, default=None, help="nested subsets, ';' separated")
    _add_common(p)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("solve", help="find all planes with prescribed critical points")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--points", type=str, required=True, help="comma separated reals")
    _add_common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("classify", help="net classes of solutions in a solve output file")
    p.add_argument("--in", dest="infile", type=str, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("roundtrip", help="solve, classify and label-check one instance")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--points", type=str, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("verify", help="random-instance verification report with figures")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--instances", type=int, default=5)
    p.add_argument("--full", action="store_true", help="include net/labeling round trip")
    p.add_argument("--out-dir", dest="out_dir", type=str, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
