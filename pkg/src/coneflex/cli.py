"""Command line entry point: coneflex <verb> --job JOB [--seed N] [--out-dir DIR]."""
import argparse
import sys

from .jobs import VERBS, JobError, StageError, parse_job, run_job


def build_parser():
    ap = argparse.ArgumentParser(prog="coneflex",
                                 description="Flexible cones and cylinders with planar sections.")
    ap.add_argument("verb", choices=VERBS)
    ap.add_argument("--job", required=True, help="JSON job file")
    ap.add_argument("--seed", type=int, default=None, help="override the job seed")
    ap.add_argument("--out-dir", default=".", help="directory for reports and meshes")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_job(args.job)
        if args.seed is not None:
            cfg.seed = args.seed
        report, files = run_job(cfg, args.verb, args.out_dir)
    except (JobError, StageError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    for note in report.notes:
        print("note: %s" % note)
    for name, v in sorted(report.maxima().items()):
        t = report.thresholds.get(name)
        status = "" if t is None else ("ok" if v <= t else "FAIL")
        print("%-26s %-24.6g %s" % (name, v, status))
    for f in files:
        print("wrote %s" % f)
    if args.verb in ("synth", "export"):
        return 0
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
