#!/usr/bin/env python3
"""Solve an LP-format model with HiGHS and print a "name value" variable dump.

Usage: solve_lp.py MODEL.lp [-o OUT.sol] [--time-limit SECONDS]

Exit status: 0 optimal, 3 solver reported a non-optimal status, 4 highspy missing.
"""
import argparse
import sys


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("model")
    parser.add_argument("-o", "--output", default="-")
    parser.add_argument("--time-limit", type=float, default=None)
    args = parser.parse_args()

    try:
        import highspy
    except ImportError:
        print("highspy is not installed (pip install highspy)", file=sys.stderr)
        return 4

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 0.0)
    if args.time_limit is not None:
        h.setOptionValue("time_limit", args.time_limit)
    h.readModel(args.model)
    h.run()
    status = h.getModelStatus()
    if status != highspy.HighsModelStatus.kOptimal:
        print(f"solver status: {h.modelStatusToString(status)}", file=sys.stderr)
        return 3

    lp = h.getLp()
    values = h.getSolution().col_value
    lines = [f"{name} {value:.10g}" for name, value in zip(lp.col_names_, values)]
    text = "\n".join(lines) + "\n"
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
