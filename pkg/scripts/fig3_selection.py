"""Azimuthal-order selection by interfering plane waves.

Prints |c_m| for the catalog patterns and for designed beam sets, and
writes ``results/fig3_selection.csv`` (pattern, m, |c_m| with sum |E_j| = 1).

    python scripts/fig3_selection.py --seed 0
"""

import argparse
import csv
import pathlib

from cylspdc.illumination import catalog, design_beams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--restarts", type=int, default=64)
    ap.add_argument("--m-max", type=int, default=3)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    patterns = {name: bs.normalized() for name, (bs, _) in catalog().items()}
    designs = {
        "keep0_null_pm2_n3": dict(keep=[0], null=[2, -2], n_beams=3, equal_amplitudes=True),
        "keep1_null_0_m1_pm2_n3": dict(keep=[1], null=[0, -1, 2, -2], n_beams=3),
        "keep1_null_0_m1_pm2_n4": dict(keep=[1], null=[0, -1, 2, -2], n_beams=4),
    }
    for name, kw in designs.items():
        d = design_beams(seed=args.seed, restarts=args.restarts, **kw)
        status = "feasible" if d.feasible else f"infeasible ({d.report})"
        print(f"{name}: {status}, residual {d.residual:.3g}")
        for j, re, im, phi in d.beams.to_rows():
            print(f"    beam {j}: E = {re:+.6f}{im:+.6f}i  phi = {phi:.6f}")
        patterns[name] = d.beams

    rows = []
    for name, bs in patterns.items():
        c = bs.coefficients(args.m_max)
        line = "  ".join(f"{m:+d}:{abs(v):.3e}" for m, v in c.items())
        print(f"{name:28s} {line}")
        rows.extend((name, m, abs(v)) for m, v in c.items())
    with open(out / "fig3_selection.csv", "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["pattern", "m", "abs_c"])
        wr.writerows(rows)


if __name__ == "__main__":
    main()
