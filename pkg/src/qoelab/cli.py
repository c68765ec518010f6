"""Command-line front end for the analysis pipeline.

Exit status: 0 success, 2 usage error, 3 file-system error, 4 domain
error (malformed input content, violated preconditions, non-convergence).
Output files are written via a temp-file-and-rename step so a failing
run never leaves partial output behind.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

from . import rate_distortion as rd_mod
from . import scores as scores_mod
from . import screening as screening_mod
from . import stats as stats_mod

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FILE = 3
EXIT_DOMAIN = 4


def _write_atomic(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_plot_data(series: list[tuple[str, list[tuple[float, float]]]], path: Path):
    """Write named (x, y) series as plot-ready tabular text.

    One column pair per series, one row per point; all series must have
    the same number of points.
    """
    if not series:
        raise ValueError("no series to emit")
    lengths = {len(pts) for _, pts in series}
    if len(lengths) != 1:
        raise ValueError("all series must have the same length")
    if lengths == {0}:
        raise ValueError("series contain no points")
    header = ",".join(f"{name}_x,{name}_y" for name, _ in series)
    lines = [header]
    for i in range(lengths.pop()):
        cells = []
        for _, pts in series:
            cells.append(f"{pts[i][0]:.9g}")
            cells.append(f"{pts[i][1]:.9g}")
        lines.append(",".join(cells))
    _write_atomic(path, "\n".join(lines) + "\n")


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _screening_config(args) -> screening_mod.ScreeningConfig:
    return screening_mod.ScreeningConfig(frequency_limit=args.p_limit,
                                         balance_limit=args.pq_ratio)


def _cmd_screen(args) -> int:
    matrix = scores_mod.load_scores(_read_text(args.scores))
    refined, report = screening_mod.screen(matrix, _screening_config(args))
    out = Path(args.out)
    _write_atomic(out / "refined_scores.csv", scores_mod.dump_scores(refined))
    _write_atomic(out / "screening_report.csv", screening_mod.report_to_table(report))
    _write_atomic(out / "screening_report.txt", screening_mod.report_to_text(report))
    print(f"retained {len(report.retained)} of {len(report.verdicts)} observers")
    return EXIT_OK


def _mos_table_text(matrix: scores_mod.ScoreMatrix) -> str:
    lines = ["condition_id,mos,n,ci_low,ci_high"]
    for rec in scores_mod.mos_table(matrix):
        lines.append(f"{rec.condition_id},{rec.mos:.6f},{rec.n},"
                     f"{rec.ci_low:.6f},{rec.ci_high:.6f}")
    return "\n".join(lines) + "\n"


def _cmd_mos(args) -> int:
    matrix = scores_mod.load_scores(_read_text(args.scores))
    _write_atomic(Path(args.out), _mos_table_text(matrix))
    return EXIT_OK


def _cmd_compare(args) -> int:
    raw = scores_mod.load_scores(_read_text(args.scores))
    refined = scores_mod.load_scores(_read_text(args.refined))
    records, r, ci = stats_mod.compare_refining(raw, refined, alpha=args.alpha)
    _write_atomic(Path(args.out), stats_mod.comparison_to_table(records))
    if args.plot:
        xs = list(range(1, len(records) + 1))
        emit_plot_data([
            ("mos_before", list(zip(xs, (rec.mos_before for rec in records)))),
            ("mos_after", list(zip(xs, (rec.mos_after for rec in records)))),
        ], Path(args.plot))
    sys.stdout.write(stats_mod.ci_to_text(ci))
    return EXIT_OK


def _cmd_ci(args) -> int:
    ci = stats_mod.fisher_ci(args.r, args.n, args.alpha)
    text = stats_mod.ci_to_text(ci)
    if args.out:
        _write_atomic(Path(args.out), text)
    sys.stdout.write(text)
    return EXIT_OK


def _cmd_capacity(args) -> int:
    channel = rd_mod.load_channel(_read_text(args.channel))
    result = rd_mod.channel_capacity(channel, tol=args.tol, max_iter=args.max_iter)
    text = (f"capacity_bits: {result.capacity:.9f}\n"
            f"iterations: {result.iterations}\n"
            f"gap_bits: {result.gap:.3e}\n"
            f"input_dist: {','.join(f'{p:.9f}' for p in result.input_dist)}\n")
    if args.out:
        _write_atomic(Path(args.out), text)
    sys.stdout.write(text)
    return EXIT_OK


def _parse_slopes(text: str) -> list[float]:
    try:
        return [float(f) for f in text.split(",") if f.strip()]
    except ValueError:
        raise ValueError(f"malformed slope list {text!r}") from None


def _cmd_rd(args) -> int:
    source = rd_mod.load_pmf(_read_text(args.source))
    dist = rd_mod.load_distortion(_read_text(args.distortion))
    curve = rd_mod.rd_curve(source, dist, _parse_slopes(args.slopes),
                            tol=args.tol, max_iter=args.max_iter)
    _write_atomic(Path(args.out), rd_mod.curve_to_text(curve))
    if args.plot:
        emit_plot_data(
            [("rd_curve", [(pt.distortion, pt.rate) for pt in curve])], Path(args.plot))
    print(f"wrote {len(curve)} rate-distortion points")
    return EXIT_OK


def _cmd_check(args) -> int:
    curve = rd_mod.curve_from_text(_read_text(args.curve))
    verdict = rd_mod.operating_point_check(curve, args.rate, args.dist,
                                           tol_margin=args.margin)
    print(verdict)
    return EXIT_OK


def _cmd_report(args) -> int:
    out = Path(args.out)
    raw = scores_mod.load_scores(_read_text(args.scores))
    refined, screening_report = screening_mod.screen(raw, _screening_config(args))
    records, r, ci = stats_mod.compare_refining(raw, refined, alpha=args.alpha)

    _write_atomic(out / "refined_scores.csv", scores_mod.dump_scores(refined))
    _write_atomic(out / "screening_report.csv", screening_mod.report_to_table(screening_report))
    _write_atomic(out / "mos_before.csv", _mos_table_text(raw))
    _write_atomic(out / "mos_after.csv", _mos_table_text(refined))
    _write_atomic(out / "comparison.csv", stats_mod.comparison_to_table(records))

    sections = [
        "subjective quality analysis report",
        "",
        f"observers: {len(raw.observers)} raw, {len(refined.observers)} retained",
        f"conditions: {len(raw.conditions)}",
        f"rejected: {', '.join(screening_report.rejected) if screening_report.rejected else 'none'}",
        "",
        "before/after MOS correlation",
        stats_mod.ci_to_text(ci).rstrip(),
    ]

    if args.conditions:
        conditions = scores_mod.load_conditions(_read_text(args.conditions))
        sections += ["", f"condition metadata: {len(conditions)} entries loaded"]

    if args.source and args.distortion and args.slopes:
        source = rd_mod.load_pmf(_read_text(args.source))
        dist = rd_mod.load_distortion(_read_text(args.distortion))
        curve = rd_mod.rd_curve(source, dist, _parse_slopes(args.slopes),
                                tol=args.tol, max_iter=args.max_iter)
        _write_atomic(out / "rd_curve.csv", rd_mod.curve_to_text(curve))
        sections += ["", f"rate-distortion curve: {len(curve)} points "
                         f"(source entropy {source.entropy_bits():.6f} bits)"]
        if args.rate is not None and args.dist is not None:
            verdict = rd_mod.operating_point_check(curve, args.rate, args.dist,
                                                   tol_margin=args.margin)
            sections += [f"operating point (rate={args.rate}, distortion={args.dist}): {verdict}"]

    _write_atomic(out / "report.txt", "\n".join(sections) + "\n")
    print(f"report written to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qoelab",
        description="Subjective video-quality analysis: screening, MOS CIs, "
                    "and rate-distortion checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_screening_flags(p):
        p.add_argument("--p-limit", type=float, default=0.05,
                       help="deviation-frequency rejection limit (default 0.05)")
        p.add_argument("--pq-ratio", type=float, default=0.3,
                       help="P/Q balance limit for systematic deviants (default 0.3)")

    def add_solver_flags(p):
        p.add_argument("--tol", type=float, default=1e-9,
                       help="convergence tolerance in bits (default 1e-9)")
        p.add_argument("--max-iter", type=int, default=10000,
                       help="iteration cap (default 10000)")

    p = sub.add_parser("screen", help="refine a score file by observer screening")
    p.add_argument("--scores", required=True)
    p.add_argument("--out", required=True, help="output directory")
    add_screening_flags(p)
    p.set_defaults(func=_cmd_screen)

    p = sub.add_parser("mos", help="per-condition MOS table with CIs")
    p.add_argument("--scores", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mos)

    p = sub.add_parser("compare", help="before/after-refining MOS comparison and CI")
    p.add_argument("--scores", required=True, help="raw score file")
    p.add_argument("--refined", required=True, help="refined score file")
    p.add_argument("--out", required=True, help="comparison table output")
    p.add_argument("--plot", help="optional plot-data output")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("ci", help="Fisher-transform confidence interval for r")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_ci)

    p = sub.add_parser("capacity", help="channel capacity of a transition matrix")
    p.add_argument("--channel", required=True)
    p.add_argument("--out")
    add_solver_flags(p)
    p.set_defaults(func=_cmd_capacity)

    p = sub.add_parser("rd", help="rate-distortion curve over a slope sweep")
    p.add_argument("--source", required=True, help="source pmf file")
    p.add_argument("--distortion", required=True, help="distortion matrix file")
    p.add_argument("--slopes", required=True, help="comma-separated slopes <= 0")
    p.add_argument("--out", required=True)
    p.add_argument("--plot", help="optional plot-data output")
    add_solver_flags(p)
    p.set_defaults(func=_cmd_rd)

    p = sub.add_parser("check", help="classify an operating point against a curve")
    p.add_argument("--curve", required=True, help="curve file from the rd subcommand")
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--dist", type=float, required=True)
    p.add_argument("--margin", type=float, default=0.01)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("report", help="full pipeline: screen, MOS, compare, optional RD")
    p.add_argument("--scores", required=True)
    p.add_argument("--conditions")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--source")
    p.add_argument("--distortion")
    p.add_argument("--slopes")
    p.add_argument("--rate", type=float)
    p.add_argument("--dist", type=float)
    p.add_argument("--margin", type=float, default=0.01)
    add_screening_flags(p)
    add_solver_flags(p)
    p.set_defaults(func=_cmd_report)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except OSError as exc:
        print(f"file error: {exc}", file=sys.stderr)
        return EXIT_FILE
    except (ValueError, rd_mod.ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
