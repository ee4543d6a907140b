"""Command-line front end: plan trajectories and write report files.

    feedplan run --path path.json --limits limits.json --mode all --out dir
    feedplan info --path path.json

Each mode writes reference_points.csv, profile.csv and summary.json (plus
SVG plots with --emit-svg) into out/<mode>/.  Files are staged in a
temporary directory and moved into place atomically, so a failed run never
leaves partial mode directories.  Exit codes: 0 success, 1 input or
validation failure, 2 a strict mode failed its own audit.
"""

import argparse
import json
import math
import os
import shutil
import sys
import tempfile

import numpy as np

from .interpolator import generate_reference_points
from .limits import ALL_MODES, KinematicLimits, SchedulerMode
from .phpath import PhSplinePath
from .scheduler import schedule_path
from .verifier import audit_bounds, sample_kinematics


def _fmt(x):
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return "%.17g" % x


def _load_json(filename, what):
    try:
        with open(filename, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValueError("cannot read %s file %s: %s" % (what, filename, exc))
    except json.JSONDecodeError as exc:
        raise ValueError("malformed %s file %s: %s" % (what, filename, exc))


def _write_reference_csv(filename, points):
    with open(filename, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("k,t,segment,xi,x,y,v,chord_error\n")
        for p in points:
            fh.write("%d,%s,%d,%s,%s,%s,%s,%s\n"
                     % (p.index, _fmt(p.t), p.segment_index, _fmt(p.xi),
                        _fmt(p.position[0]), _fmt(p.position[1]),
                        _fmt(p.feedrate), _fmt(p.chord_error)))


def _write_profile_csv(filename, trace):
    with open(filename, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,v,vdot,vddot,ax,ay,jx,jy\n")
        for i in range(len(trace)):
            fh.write(",".join(_fmt(x) for x in (
                trace.t[i], trace.v[i], trace.vdot[i], trace.vddot[i],
                trace.a_vec[i, 0], trace.a_vec[i, 1],
                trace.j_vec[i, 0], trace.j_vec[i, 1])) + "\n")


def _summary_dict(result, report):
    blocks = []
    for b in result.blocks:
        blocks.append({"S": b.length, "kappa_stat": b.kappa_stat,
                       "w_stat": b.w_stat, "v_start": b.v_start,
                       "v_end": b.v_end, "v_cap": b.v_cap,
                       "t_acc": b.t_acc, "t_con": b.t_con, "t_dec": b.t_dec})
    specials = [{"segment": p.segment_index, "xi": p.xi,
                 "arclength": p.arclength, "kind": p.kind}
                for p in result.special_points]
    segment_times = [{"t_start": t0, "t_end": t1, "duration": t1 - t0}
                     for t0, t1 in result.profile.span_windows()]
    return {"mode": result.mode.name,
            "kappa_cr": result.kappa_cr,
            "special_points": specials,
            "blocks": blocks,
            "segment_times": segment_times,
            "total_time": result.profile.total_time,
            "audit": report.to_dict()}


def _emit_svg(outdir, result, trace, points, limits):
    import matplotlib
    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "feedplan"
    import matplotlib.pyplot as plt

    meta = {"Date": None}
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(trace.t, trace.v, lw=1.0)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("v [mm/s]")
    ax.set_title("feedrate, mode %s" % result.mode.name)
    fig.tight_layout()
    fig.savefig(os.path.join(outdir, "feedrate.svg"), metadata=meta)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(7, 4))
    xy = np.array([p.position for p in points])
    ax.plot(xy[:, 0], xy[:, 1], lw=0.8)
    ax.set_aspect("equal")
    ax.set_xlabel("x [mm]")
    ax.set_ylabel("y [mm]")
    ax.set_title("reference points")
    fig.tight_layout()
    fig.savefig(os.path.join(outdir, "path.svg"), metadata=meta)
    plt.close(fig)

    fig, axes = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    axes[0].plot(trace.t, trace.a_vec[:, 0], lw=0.8, label="ax")
    axes[0].plot(trace.t, trace.a_vec[:, 1], lw=0.8, label="ay")
    axes[0].axhline(limits.a_max, color="k", lw=0.5, ls="--")
    axes[0].axhline(-limits.a_max, color="k", lw=0.5, ls="--")
    axes[0].set_ylabel("a [mm/s^2]")
    axes[0].legend(loc="upper right")
    axes[1].plot(trace.t, trace.j_vec[:, 0], lw=0.8, label="jx")
    axes[1].plot(trace.t, trace.j_vec[:, 1], lw=0.8, label="jy")
    axes[1].axhline(limits.j_max, color="k", lw=0.5, ls="--")
    axes[1].axhline(-limits.j_max, color="k", lw=0.5, ls="--")
    axes[1].set_ylabel("j [mm/s^3]")
    axes[1].set_xlabel("t [s]")
    axes[1].legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(os.path.join(outdir, "kinematics.svg"), metadata=meta)
    plt.close(fig)


def _run(args):
    path = PhSplinePath.from_document(_load_json(args.path, "path"))
    limits = KinematicLimits.from_document(_load_json(args.limits, "limits"))
    if args.mode.lower() == "all":
        modes = list(ALL_MODES)
    else:
        modes = [SchedulerMode.parse(args.mode)]

    os.makedirs(args.out, exist_ok=True)
    staging = tempfile.mkdtemp(prefix=".feedplan-", dir=args.out)
    strict_failed = False
    try:
        for mode in modes:
            result = schedule_path(path, limits, mode,
                                   grid_density=args.grid_density)
            points = generate_reference_points(path, result.profile, limits)
            trace = sample_kinematics(path, result.profile, limits,
                                      samples_per_tick=args.audit_grid)
            report = audit_bounds(trace, limits, mode, result.profile)
            mode_dir = os.path.join(staging, mode.name)
            os.makedirs(mode_dir)
            _write_reference_csv(
                os.path.join(mode_dir, "reference_points.csv"), points)
            _write_profile_csv(os.path.join(mode_dir, "profile.csv"), trace)
            with open(os.path.join(mode_dir, "summary.json"), "w",
                      encoding="utf-8") as fh:
                json.dump(_summary_dict(result, report), fh, indent=2)
                fh.write("\n")
            if args.emit_svg:
                _emit_svg(mode_dir, result, trace, points, limits)
            if mode.strict and not report.strict_ok:
                strict_failed = True
                print("audit FAILED for mode %s" % mode.name,
                      file=sys.stderr)
        for mode in modes:
            final_dir = os.path.join(args.out, mode.name)
            if os.path.isdir(final_dir):
                shutil.rmtree(final_dir)
            os.replace(os.path.join(staging, mode.name), final_dir)
    finally:
        shutil.rmtree(staging, ignore_errors=True)
    return 2 if strict_failed else 0


def _info(args):
    path = PhSplinePath.from_document(_load_json(args.path, "path"))
    print("segments: %d" % len(path.segments))
    print("total length: %.6f mm" % path.total_length)
    print("breakpoints at piece indices: %s"
          % ", ".join(str(i) for i in path.breakpoint_indices))
    for i, seg in enumerate(path.segments):
        xs = np.linspace(0.0, 1.0, 257)
        kap = seg.curv_num.evaluate(xs) / seg.sigma.evaluate(xs) ** 3
        print("  piece %d: length %.6f mm, |kappa| in [%.6g, %.6g] 1/mm"
              % (i, seg.length, float(np.min(np.abs(kap))),
                 float(np.max(np.abs(kap)))))
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="feedplan",
        description="C2 feedrate scheduling on PH quintic spline paths")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="schedule, interpolate and audit")
    run_p.add_argument("--path", required=True, help="path JSON document")
    run_p.add_argument("--limits", required=True, help="limits JSON document")
    run_p.add_argument("--mode", default="all",
                       help="R0..R2, S0..S2 or 'all' (default)")
    run_p.add_argument("--out", required=True, help="output directory")
    run_p.add_argument("--emit-svg", action="store_true",
                       help="also write SVG plots")
    run_p.add_argument("--audit-grid", type=int, default=10,
                       help="audit samples per tick (default 10)")
    run_p.add_argument("--grid-density", type=int, default=1024,
                       help="detection grid per spline piece (default 1024)")

    info_p = sub.add_parser("info", help="describe a path document")
    info_p.add_argument("--path", required=True, help="path JSON document")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _run(args)
        return _info(args)
    except (ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
