"""Scaled down-conversion efficiency spectra.

Panel (a): every channel of an eps_core = 5 rod over w_total in [1, 4].
Panel (b): HE11+HE11 and HE11+TM01 across the three-channel window for
several core permittivities, with the crossover metrics printed.

    python scripts/fig2_efficiency.py --n-points 400 --jobs 1
"""

import argparse
import csv
import pathlib
import time
import warnings

import numpy as np

from cylspdc.cli import RunConfig, compute
from cylspdc.spdc import Chi2Tensor, channel_thresholds, channel_variants, efficiency, enumerate_channels
from cylspdc.waveguide import WaveguideSpec

ZZZ = Chi2Tensor.zzz()


def three_channel_curves(eps, n):
    spec = WaveguideSpec(eps, 1.0)
    w1, w2 = channel_thresholds(spec)
    rows = []
    for wt in np.linspace(w1 + w2, 2 * w1, n + 2)[1:-1]:
        ch = {c.name: c for c in enumerate_channels(wt, spec)}
        hh = [efficiency(a, b, ZZZ, spec).eta_scaled for a, b, _ in channel_variants(ch["HE11+HE11"])]
        c = ch["HE11+TM01"]
        rows.append((eps, wt, hh[0], hh[1], efficiency(c.mode_i, c.mode_ip, ZZZ, spec).eta_scaled))
    return np.array(rows)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-points", type=int, default=400)
    ap.add_argument("--n-window", type=int, default=40)
    ap.add_argument("--eps", type=float, nargs="+", default=[3.0, 5.0, 8.0, 12.0])
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    warnings.simplefilter("ignore")

    t0 = time.perf_counter()
    cfg = RunConfig(kind="efficiency", w_range=[1.0, 4.0], n_points=args.n_points, jobs=args.jobs)
    rows, _ = compute(cfg)
    print(f"panel a: {len(rows)} rows in {time.perf_counter() - t0:.0f}s")
    with open(out / "fig2a_efficiency.csv", "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["w_total", "channel", "m_i", "m_ip", "eta_scaled", "multiplicity"])
        wr.writerows(rows)

    curves = np.vstack([three_channel_curves(e, args.n_window) for e in args.eps])
    with open(out / "fig2b_three_channel.csv", "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["eps_core", "w_total", "eta_HE11_HE11_same_m", "eta_HE11_HE11_opposite_m", "eta_HE11_TM01"])
        wr.writerows(curves)
    for e in args.eps:
        c = curves[curves[:, 0] == e]
        hh = np.maximum(c[:, 2], c[:, 3])
        print(
            f"eps1={e:5.1f}  max_w[HH-HT]={np.max(hh - c[:, 4]):+.4g}  "
            f"max_w[HT-HH]={np.max(c[:, 4] - hh):+.4g}  peak={max(hh.max(), c[:, 4].max()):.4g}"
        )

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return
    spec = WaveguideSpec(5.0, 1.0)
    w1, w2 = channel_thresholds(spec)
    fig, (a, b) = plt.subplots(1, 2, figsize=(11, 4.5))
    keys = sorted({(r[1], r[2], r[3]) for r in rows})
    low = ("HE11+HE11", "HE11+TM01", "TM01+HE11")
    for name, mi, mip in keys:
        pts = np.array([(r[0], r[4]) for r in rows if (r[1], r[2], r[3]) == (name, mi, mip)])
        if name in low:
            a.plot(pts[:, 0], pts[:, 1], lw=1.2, label=f"{name} ({mi},{mip})")
        else:
            a.plot(pts[:, 0], pts[:, 1], lw=0.5, color="0.6")
    a.axvspan(w1 + w2, 2 * w1, color="tab:blue", alpha=0.15)
    a.axvspan(2 * w1, 4.0, color="tab:green", alpha=0.1)
    a.set_yscale("log")
    a.set_ylim(1e-5, 2)
    a.set_xlabel("w_total")
    a.set_ylabel("eta (scaled)")
    a.legend(fontsize=7, loc="lower right")
    for e in args.eps:
        c = curves[curves[:, 0] == e]
        (ln,) = b.plot(c[:, 1], np.maximum(c[:, 2], c[:, 3]), lw=1.2, label=f"eps1={e:g} HE11+HE11")
        b.plot(c[:, 1], c[:, 4], lw=1.2, ls="--", color=ln.get_color(), label=f"eps1={e:g} HE11+TM01")
    b.set_xlabel("w_total")
    b.set_ylabel("eta (scaled)")
    b.legend(fontsize=6, ncol=2)
    fig.tight_layout()
    fig.savefig(out / "fig2_efficiency.png", dpi=150)


if __name__ == "__main__":
    main()
