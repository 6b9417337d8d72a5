# This file provides a simplified interface to the acceptance suite
from mposym.cli.main import run

if __name__ == "__main__":
    import argparse

    parser = argparse.ArgumentParser(description="Run the mposym acceptance suite")
    parser.add_argument("--only", help="Run a single check group")
    parser.add_argument(
        "--out",
        default="results/report.json",
        help="Where to write the JSON report",
    )
    parser.add_argument("--debug", action="store_true", help="Enable debug logging")
    args = parser.parse_args()

    # Build the argument list for the command-line entry point
    argv = ["reproduce-paper", "--out", args.out]
    if args.only:
        argv.extend(["--only", args.only])
    if args.debug:
        argv.append("--debug")

    exit(run(argv))
