#!/usr/bin/env python3
"""Solve a CPLEX-LP file with HiGHS and print the optimal objective.

Exit codes: 0 solved, 3 solver reported a non-optimal status, 77 HiGHS is
not installed.
"""

import sys


def main() -> int:
    if len(sys.argv) != 2:
        print("usage: solve_lp.py MODEL.lp", file=sys.stderr)
        return 2
    try:
        import highspy
    except ImportError:
        print("highspy unavailable", file=sys.stderr)
        return 77

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("time_limit", 120.0)
    if h.readModel(sys.argv[1]) != highspy.HighsStatus.kOk:
        print("could not read " + sys.argv[1], file=sys.stderr)
        return 3
    h.run()
    status = h.getModelStatus()
    if status != highspy.HighsModelStatus.kOptimal:
        print("status " + h.modelStatusToString(status), file=sys.stderr)
        return 3
    print(repr(h.getInfo().objective_function_value))
    return 0


if __name__ == "__main__":
    sys.exit(main())
