"""Command-line sweeps producing CSV tables and a JSON run manifest.

Configuration is a JSON file; command-line flags override file values, and
both override the defaults in :class:`RunConfig`.  Exit codes: 0 success,
2 invalid configuration (nothing is written), 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy

from .errors import CylSpdcError
from .illumination import catalog, design_beams, selection_coefficients
from .spdc import (
    Chi2Tensor,
    channel_count_class,
    channel_variants,
    efficiency,
    enumerate_channels,
    physical_prefactor,
    physical_rate,
)
from .waveguide import WaveguideSpec, find_modes

log = logging.getLogger("cylspdc")

KINDS = ("dispersion", "efficiency", "channels", "beams", "rate")
HEADERS = {
    "dispersion": ["m", "l", "family", "w", "qa", "beta", "re_nu", "im_nu"],
    "efficiency": ["w_total", "channel_label", "m_i", "m_ip", "eta_scaled", "multiplicity"],
    "channels": ["w_total", "n_channels", "count_class", "channels"],
    "beams": ["j", "re_E", "im_E", "phi_j"],
    "rate": ["radius_a", "chi_norm", "eta_scaled", "pump_power", "photon_energy", "prefactor", "rate"],
}
FILENAMES = {
    "dispersion": "modes.csv",
    "efficiency": "efficiency.csv",
    "channels": "channels.csv",
    "beams": "beams.csv",
    "rate": "rate.csv",
}


@dataclass
class RunConfig:
    """Everything that affects the output of a run."""

    kind: str = "dispersion"
    eps_core: float = 5.0
    eps_host: float = 1.0
    radius_a: float = 1.0e-7
    chi_zzz: float = 1.0e-10
    w_range: list = field(default_factory=lambda: [0.2, 3.5])
    n_points: int = 300
    m_max: int = 2
    output_path: str = "out"
    seed: int = 0
    jobs: int = 1
    keep: list = field(default_factory=lambda: [1])
    null: list = field(default_factory=lambda: [0, -1, 2, -2])
    n_beams: int = 4
    restarts: int = 64
    eta_scaled: float = 0.1
    pump_power: float = 1.0e-3
    photon_energy: float = 1.0

    @classmethod
    def from_dict(cls, d):
        """Build from the nested file layout or a flat dict of field names."""
        flat = {}
        for k, v in d.items():
            if k in ("spec", "sweep", "chi", "beams", "rate") and isinstance(v, dict):
                for kk, vv in v.items():
                    flat[{"zzz": "chi_zzz"}.get(kk, kk)] = vv
            else:
                flat[k] = v
        known = {f for f in cls.__dataclass_fields__}
        unknown = sorted(set(flat) - known)
        cfg = cls(**{k: v for k, v in flat.items() if k in known})
        cfg._unknown = unknown
        return cfg

    def spec(self):
        return WaveguideSpec(float(self.eps_core), float(self.eps_host), float(self.radius_a))

    def chi(self):
        return Chi2Tensor.zzz(float(self.chi_zzz))

    def grid(self):
        lo, hi = self.w_range
        return np.linspace(float(lo), float(hi), int(self.n_points))


def _path(name):
    return {
        "eps_core": "spec.eps_core",
        "eps_host": "spec.eps_host",
        "radius_a": "spec.radius_a",
        "chi_zzz": "chi.zzz",
        "w_range": "sweep.w_range",
        "n_points": "sweep.n_points",
        "kind": "sweep.kind",
    }.get(name, name)


def _is_num(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def validate(config):
    """Diagnostics ``(field_path, reason)``; empty iff the config is usable."""
    if isinstance(config, dict):
        try:
            config = RunConfig.from_dict(config)
        except TypeError as exc:
            return [("<root>", str(exc))]
    out = [(k, "unknown field") for k in getattr(config, "_unknown", [])]
    c = config
    if c.kind not in KINDS:
        out.append((_path("kind"), f"must be one of {', '.join(KINDS)}"))
    for name in ("eps_core", "eps_host", "radius_a", "chi_zzz", "eta_scaled", "pump_power", "photon_energy"):
        if not _is_num(getattr(c, name)):
            out.append((_path(name), "must be a finite number"))
    if not out:
        if not c.radius_a > 0:
            out.append((_path("radius_a"), "must be positive"))
        if not c.eps_host >= 1:
            out.append((_path("eps_host"), "must be >= 1"))
        if not c.eps_core > c.eps_host:
            out.append((_path("eps_core"), "must exceed eps_host"))
        if c.chi_zzz == 0:
            out.append((_path("chi_zzz"), "must be nonzero"))
        if c.eta_scaled < 0:
            out.append(("rate.eta_scaled", "must be >= 0"))
        if c.pump_power < 0:
            out.append(("rate.pump_power", "must be >= 0"))
        if not c.photon_energy > 0:
            out.append(("rate.photon_energy", "must be positive"))
    wr = c.w_range
    if not (isinstance(wr, (list, tuple)) and len(wr) == 2 and all(_is_num(x) for x in wr)):
        out.append((_path("w_range"), "must be [w_lo, w_hi]"))
    elif not 0 < wr[0] < wr[1]:
        out.append((_path("w_range"), "need 0 < w_lo < w_hi"))
    for name, lo in (("n_points", 2), ("m_max", 0), ("jobs", 1), ("n_beams", 1), ("restarts", 1)):
        v = getattr(c, name)
        if not isinstance(v, int) or isinstance(v, bool) or v < lo:
            out.append((_path(name), f"must be an integer >= {lo}"))
    if not isinstance(c.seed, int) or isinstance(c.seed, bool):
        out.append(("seed", "must be an integer"))
    for name in ("keep", "null"):
        v = getattr(c, name)
        if not isinstance(v, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
            out.append((f"beams.{name}", "must be a list of integers"))
    if not out and set(c.keep) & set(c.null):
        out.append(("beams.null", "overlaps beams.keep"))
    return out


def _fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if x is None:
        return ""
    return format(float(x), ".17g")


class NumericalFailure(Exception):
    def __init__(self, m, w, reason):
        super().__init__(f"numerical failure at (m={m}, w={w!r}): {reason}")
        self.m, self.w = m, w


# ---------------------------------------------------------------------------
# per-point workers (top level so they pickle)


def _dispersion_point(args):
    spec, w, m_max = args
    rows = []
    for m in range(m_max + 1):
        try:
            modes = find_modes(m, w, spec)
        except (CylSpdcError, ArithmeticError, RuntimeError) as exc:
            return ("err", m, w, str(exc))
        for md in modes:
            rows.append([md.m, md.l, md.family, w, md.qa, md.beta, md.nu.real, md.nu.imag])
    return ("ok", rows)


def _efficiency_point(args):
    spec, chi, w = args
    rows = []
    try:
        pairs = enumerate_channels(w, spec)
    except (CylSpdcError, ArithmeticError, RuntimeError) as exc:
        return ("err", "*", w, str(exc))
    for p in pairs:
        for a, b, mult in channel_variants(p):
            try:
                eta = efficiency(a, b, chi, spec).eta_scaled
            except (CylSpdcError, ArithmeticError, RuntimeError) as exc:
                return ("err", (a.m, b.m), w, str(exc))
            rows.append([w, p.name, a.m, b.m, eta, mult])
    return ("ok", rows)


def _channels_point(args):
    spec, w = args
    try:
        pairs = enumerate_channels(w, spec, compute_beta=False)
    except (CylSpdcError, ArithmeticError, RuntimeError) as exc:
        return ("err", "*", w, str(exc))
    return ("ok", [[w, len(pairs), channel_count_class(len(pairs)), ";".join(p.name for p in pairs)]])


def _map(fn, tasks, jobs):
    if jobs <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, tasks))  # ordered


def _collect(results):
    rows = []
    for r in results:
        if r[0] == "err":
            raise NumericalFailure(*r[1:])
        rows.extend(r[1])
    return rows


def compute(config):
    """Rows and extra manifest entries for a validated config."""
    spec = config.spec()
    kind = config.kind
    extra = {}
    if kind == "dispersion":
        rows = _collect(_map(_dispersion_point, [(spec, float(w), config.m_max) for w in config.grid()], config.jobs))
    elif kind == "efficiency":
        chi = config.chi()
        rows = _collect(_map(_efficiency_point, [(spec, chi, float(w)) for w in config.grid()], config.jobs))
    elif kind == "channels":
        rows = _collect(_map(_channels_point, [(spec, float(w)) for w in config.grid()], config.jobs))
    elif kind == "beams":
        d = design_beams(config.keep, config.null, config.n_beams, seed=config.seed, restarts=config.restarts)
        rows = [list(r) for r in d.beams.to_rows()]
        c = selection_coefficients(d.beams, config.m_max if config.m_max else 2)
        extra = {
            "feasible": d.feasible,
            "residual": d.residual,
            "report": d.report,
            "abs_c": {str(k): float(abs(v)) for k, v in c.items()},
            "catalog": {
                name: {str(k): float(abs(v)) for k, v in selection_coefficients(bs, 3).items()}
                for name, (bs, _) in catalog().items()
            },
        }
    else:
        chi = config.chi()
        pref = physical_prefactor(spec, chi)
        rate = physical_rate(config.eta_scaled, spec, chi, config.pump_power, config.photon_energy)
        rows = [[spec.radius_a, chi.norm, config.eta_scaled, config.pump_power, config.photon_energy, pref, rate]]
    return rows, extra


def render_csv(kind, rows):
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(HEADERS[kind])
    for r in rows:
        wr.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def run(config, out_dir=None):
    """Execute a run; returns the process exit code."""
    diags = validate(config)
    if diags:
        for path, reason in diags:
            print(f"config error: {path}: {reason}", file=sys.stderr)
        return 2
    out_dir = out_dir or config.output_path
    t0 = time.time()
    try:
        rows, extra = compute(config)
    except NumericalFailure as exc:
        print(str(exc), file=sys.stderr)
        return 3
    os.makedirs(out_dir, exist_ok=True)
    fname = FILENAMES[config.kind]
    with open(os.path.join(out_dir, fname), "w", newline="") as fh:
        fh.write(render_csv(config.kind, rows))
    cfg = {k: v for k, v in asdict(config).items()}
    manifest = {
        "config": cfg,
        "outputs": [fname],
        "n_rows": len(rows),
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "seed": config.seed,
        "wall_time_s": time.time() - t0,
        **extra,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    log.info("wrote %d rows to %s", len(rows), os.path.join(out_dir, fname))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="cylspdc", description=__doc__.splitlines()[0])
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--jobs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--mmax", type=int)
    return p


def load_config(args):
    """Defaults < config file < flags."""
    d = {}
    if args.config:
        with open(args.config) as fh:
            d = json.load(fh)
    cfg = RunConfig.from_dict(d)
    cfg.kind = args.kind
    for flag, name in (("out", "output_path"), ("jobs", "jobs"), ("seed", "seed"), ("mmax", "m_max")):
        v = getattr(args, flag)
        if v is not None:
            setattr(cfg, name, v)
    return cfg


def main(argv=None):
    level = os.environ.get("CYLSPDC_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
    except (OSError, ValueError, TypeError) as exc:
        print(f"config error: {args.config}: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
