"""Guided bands of an eps_core = 5 rod in air and the pair-channel thresholds.

Writes ``results/fig1_dispersion.csv`` and, with matplotlib installed,
``results/fig1_dispersion.png``.

    python scripts/fig1_dispersion.py --n-points 200
"""

import argparse
import csv
import math
import pathlib

import numpy as np

from cylspdc.spdc import channel_thresholds
from cylspdc.waveguide import WaveguideSpec, find_modes


def bands(spec, w_grid, m_max):
    rows = []
    for w in w_grid:
        for m in range(m_max + 1):
            for md in find_modes(m, float(w), spec, compute_beta=False):
                rows.append((md.label, m, md.family, md.l, float(w), md.qa))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eps-core", type=float, default=5.0)
    ap.add_argument("--eps-host", type=float, default=1.0)
    ap.add_argument("--w-max", type=float, default=3.5)
    ap.add_argument("--n-points", type=int, default=200)
    ap.add_argument("--m-max", type=int, default=2)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()

    spec = WaveguideSpec(args.eps_core, args.eps_host)
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = np.linspace(0.1, args.w_max, args.n_points)
    rows = bands(spec, grid, args.m_max)
    with open(out / "fig1_dispersion.csv", "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["label", "m", "family", "l", "w", "qa"])
        wr.writerows(rows)

    w1, w2 = channel_thresholds(spec)
    print(f"TM01 cutoff w1 = {w1:.6f}  (2.4048/sqrt(eps1-eps_h) = {2.4048 / spec.na:.6f})")
    print(f"HE11 partner  w2 = {w2:.6f}")
    print(f"one channel below w1+w2 = {w1 + w2:.6f}, three up to 2 w1 = {2 * w1:.6f}")

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return
    fig, ax = plt.subplots(figsize=(5, 4))
    labels = sorted({r[0] for r in rows}, key=lambda s: (int(s[2:-1] or 0), s))
    for lab in labels:
        pts = np.array([(r[4], r[5]) for r in rows if r[0] == lab])
        ax.plot(pts[:, 1], pts[:, 0], lw=1.2, label=lab)
    q = np.linspace(0, math.sqrt(spec.eps_core) * args.w_max, 2)
    ax.plot(q, q / math.sqrt(spec.eps_host), "k--", lw=0.8)
    ax.plot(q, q / math.sqrt(spec.eps_core), "k:", lw=0.8)
    ax.axhline(w1, color="grey", lw=0.6)
    ax.axhline(w2, color="grey", lw=0.6, ls="--")
    ax.set_xlim(0, q[-1] * 0.8)
    ax.set_ylim(0, args.w_max)
    ax.set_xlabel("q a")
    ax.set_ylabel("w = omega a / c")
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(out / "fig1_dispersion.png", dpi=150)


if __name__ == "__main__":
    main()
