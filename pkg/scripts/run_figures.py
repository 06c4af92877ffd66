"""Regenerate the data behind every named preset panel.

Writes one CSV (or JSON) per preset into the output directory, using the
same code path as the command line tool, so the files match what
`python -m neoms fig <panel>` prints. Panels whose preset varies a
parameter come out as curve families; the rest as single classified
curves or displacement sweeps.
"""

import argparse
import os

from neoms.cli import main as neoms_main
from neoms.presets import PRESETS


def run(out_dir, fmt, points):
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for name in sorted(PRESETS):
        path = os.path.join(out_dir, f"{name}.{fmt}")
        argv = ["fig", name, "--points", str(points),
                "--format", fmt, "--out", path]
        code = neoms_main(argv)
        if code != 0:
            raise SystemExit(f"{name}: exit code {code}")
        written.append(path)
    # the headline panel also gets its hysteresis jump powers
    path = os.path.join(out_dir, f"fig2_hysteresis.{fmt}")
    code = neoms_main(["hysteresis", "--preset", "fig2",
                       "--points", str(points), "--format", fmt,
                       "--out", path])
    if code != 0:
        raise SystemExit(f"fig2 hysteresis: exit code {code}")
    written.append(path)
    return written


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="figures")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--points", type=int, default=201,
                    help="power grid size per curve")
    args = ap.parse_args()

    written = run(args.out_dir, args.format, args.points)
    for path in written:
        print(path)
    print(f"wrote {len(written)} files to {args.out_dir}")


if __name__ == "__main__":
    main()
