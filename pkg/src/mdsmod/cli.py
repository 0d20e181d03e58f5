"""Command-line front end (``mdsmod`` / ``python -m mdsmod``).

Every command writes CSV (',' separator, '.' decimal, LF endings) to
``--output`` or stdout.  Floats are written with ``repr`` so files are
byte-stable for a given spec and seed.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import analysis, channel, mdscode, sim
from .constellation import analytic_med_apm, analytic_med_iqm, brute_force_med
from .detect import metric_count
from .modem import ApmScheme, IqmScheme, PlainScheme, Scheme

COMMANDS = ("ber", "bound", "rate", "med", "complexity", "tables")
CSV_SCHEMA_VERSION = 1


class UsageError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    """One CLI run.  Field names mirror the flags (and the JSON config keys)."""

    command: str
    scheme: str = "apm"
    n: int = 2
    k: int = 2
    p: int = 2
    m: int = 1
    r: int = 2
    t: int = 2
    family: str = "qam"
    groups: int = 1
    ring_rotation: bool = True
    snr: str = "0:5:40"
    detector: str = "ml"
    seed: int = 0
    min_errors: int = 200
    max_frames: int = 10**7
    threads: int = 1
    samples: int = 10**4
    which: str = "all"
    curves: bool = False
    output: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        parse_snr(self.snr)


def parse_snr(text: str) -> list[float]:
    """``start:step:stop`` (inclusive) or a single value."""
    parts = str(text).split(":")
    try:
        vals = [float(x) for x in parts]
    except ValueError:
        raise UsageError(f"bad SNR range {text!r}; expected start:step:stop") from None
    if len(vals) == 1:
        return vals
    if len(vals) != 3:
        raise UsageError(f"bad SNR range {text!r}; expected start:step:stop")
    start, step, stop = vals
    if step <= 0:
        raise UsageError("SNR step must be > 0")
    if stop < start:
        raise UsageError("SNR stop must be >= start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def build_scheme(spec: ExperimentSpec) -> Scheme:
    if spec.scheme == "apm":
        return ApmScheme(spec.n, spec.k, spec.p, spec.m, spec.groups, spec.ring_rotation)
    if spec.scheme == "iqm":
        return IqmScheme(spec.n, spec.r, spec.t, spec.m, spec.groups)
    if spec.scheme == "plain":
        return PlainScheme(spec.m, spec.family, 1, spec.groups)
    raise UsageError(f"unknown scheme {spec.scheme!r}")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(out, header, rows) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])


# commands -----------------------------------------------------------------

def cmd_ber(spec: ExperimentSpec, out) -> None:
    scheme = build_scheme(spec)
    stop = sim.StopRule(spec.min_errors, spec.max_frames)
    points = sim.run_ber_sweep(scheme, parse_snr(spec.snr), spec.detector, stop, spec.seed, spec.threads)
    write_csv(
        out,
        ["snr_db", "ber", "bit_errors", "bits_sent", "frames", "detector", "seed"],
        [(p.snr_db, p.ber, p.bit_errors, p.bits_sent, p.frames, p.detector, p.seed) for p in points],
    )


def cmd_bound(spec: ExperimentSpec, out) -> None:
    scheme = build_scheme(spec)
    snrs = parse_snr(spec.snr)
    bounds = analysis.union_bound_ber(scheme, analysis.db_to_linear(snrs))
    write_csv(out, ["snr_db", "ber_upper_bound"], zip(snrs, bounds))


def cmd_rate(spec: ExperimentSpec, out) -> None:
    scheme = build_scheme(spec)
    rng = channel.derive_rng(spec.seed, 0)
    est = analysis.achievable_rate(scheme, parse_snr(spec.snr), spec.samples, rng)
    write_csv(out, ["snr_db", "rate_bps", "samples", "stderr"],
              [(e.snr_db, e.rate, e.samples, e.stderr) for e in est])


def med_rows(scheme: Scheme) -> list[tuple[str, float | None]]:
    rows: list[tuple[str, float | None]] = []
    if isinstance(scheme, ApmScheme):
        med = analytic_med_apm(scheme.constellation)
        rows += [(name, getattr(med, name)) for name in ("d1", "d2", "d3", "d4", "d_min")]
    elif isinstance(scheme, IqmScheme):
        med = analytic_med_iqm(scheme.constellation)
        rows += [("d_min", med.d_min), ("d1", med.d1)]
    pts = scheme.points.ravel()
    if pts.size > 1:
        rows.append(("brute_constellation", brute_force_med(pts).value))
    if scheme.f <= 12 and scheme.f > 0:
        rows.append(("brute_codebook", brute_force_med(scheme.codebook).value))
    return rows


def cmd_med(spec: ExperimentSpec, out) -> None:
    write_csv(out, ["quantity", "value"], med_rows(build_scheme(spec)))


def cmd_complexity(spec: ExperimentSpec, out) -> None:
    if spec.curves:
        ns = [2**i for i in range(1, 11)]
        write_csv(
            out,
            ["n", "m", "se"] + [f"zeta_{s}" for s in analysis.COMPLEXITY_SCHEMES],
            [
                (n, spec.m, analysis.matched_se(n, spec.m),
                 *(analysis.decoding_complexity_per_bit(n, spec.m, s) for s in analysis.COMPLEXITY_SCHEMES))
                for n in ns
            ],
        )
        return
    scheme = build_scheme(spec)
    rows = []
    for det in ("ml", "lcml"):
        c = metric_count(scheme, det)
        rows.append((det, c.per_group, float(c.per_subcarrier)))
    write_csv(out, ["detector", "metrics_per_group", "metrics_per_subcarrier"], rows)


# tables -------------------------------------------------------------------

def _radical(v: float) -> str:
    """Render +-sqrt(a)/b style closed forms for values whose square is a small rational."""
    sq = Fraction(v * v).limit_denominator(1000)
    sign = "-" if v < 0 else ""
    num, den = sq.numerator * sq.denominator, sq.denominator
    outside, inside = 1, num
    for f in range(2, int(math.isqrt(num)) + 1):
        while inside % (f * f) == 0:
            inside //= f * f
            outside *= f
    coef = Fraction(outside, den)
    if inside == 1:
        return f"{sign}{coef}"
    lead = "" if coef.numerator == 1 else f"{coef.numerator}*"
    tail = "" if coef.denominator == 1 else f"/{coef.denominator}"
    return f"{sign}{lead}sqrt({inside}){tail}"


def _sqrt_form(v: float) -> str:
    return f"sqrt({Fraction(v * v).limit_denominator(1000)})"


def _phase_form(z: complex) -> str:
    turn = Fraction(float(np.angle(z)) / math.pi).limit_denominator(64) % 2
    if turn == 0:
        return "1"
    return "exp(j*pi)" if turn == 1 else f"exp(j*{turn}*pi)"


def _tuple_str(t) -> str:
    return "(" + ", ".join(str(int(v)) for v in t) + ")"


def table_amplitude_phase() -> list[list[str]]:
    """APM with K=P=2, N=3, no ring rotation: amplitude and phase vectors per tuple."""
    c = ApmScheme(3, 2, 2, ring_rotation=False).constellation
    rows = []
    for tup in mdscode.enumerate_codewords(mdscode.MdsParams(2, 3)):
        amps = [c.radii[v - 1] for v in tup]
        phases = [c.point(1, v, 0) for v in tup]
        rows.append([
            _tuple_str(tup[:-1]), _tuple_str(tup),
            "(" + ", ".join(_sqrt_form(a) for a in amps) + ")",
            "(" + ", ".join(_phase_form(z) for z in phases) + ")",
        ])
    return rows


def table_bit_to_index() -> list[list[str]]:
    """K=3, N=3: bit sequence, decimal, base-3 digits, prefix tuple, full tuple."""
    params = mdscode.MdsParams(3, 3)
    rows = []
    for d in range(2**params.bits):
        bits = [(d >> (params.bits - 1 - i)) & 1 for i in range(params.bits)]
        tup = mdscode.bits_to_tuple(bits, params)
        rows.append([
            "[" + " ".join(map(str, bits)) + "]", str(d),
            _tuple_str(v - 1 for v in tup[:-1]), _tuple_str(tup[:-1]), _tuple_str(tup),
        ])
    return rows


TABLE_III_IN_PHASE = (math.sqrt(2) / 2, -math.sqrt(2) / 2)
TABLE_III_QUADRATURE = (1 / 2, -math.sqrt(3) / 2)


def table_iq_components() -> list[list[str]]:
    """IQM with R=T=2, N=3 and the example level tables."""
    scheme = IqmScheme.with_levels(3, TABLE_III_IN_PHASE, TABLE_III_QUADRATURE)
    c = scheme.constellation
    rows = []
    for tup in mdscode.enumerate_codewords(mdscode.MdsParams(2, 3)):
        i_part = [c.in_phase[v - 1, 0] for v in tup]
        q_part = [c.quadrature[v - 1, 0] for v in tup]
        rows.append([
            _tuple_str(tup[:-1]), _tuple_str(tup),
            "(" + ", ".join(_radical(x) for x in i_part) + ")",
            "(" + ", ".join(_radical(x) for x in q_part) + ")",
        ])
    return rows


TABLES = {
    "1": (["prefix", "tuple", "amplitudes", "phases"], table_amplitude_phase),
    "2": (["bits", "decimal", "digits", "prefix", "tuple"], table_bit_to_index),
    "3": (["prefix", "tuple", "in_phase", "quadrature"], table_iq_components),
    "4": (["config", "ml", "lcml", "ofdm_im", "mm_ofdm_im", "ofdm"], lambda: [
        dataclasses.astuple(r) for r in analysis.complexity_table()
    ]),
}


def cmd_tables(spec: ExperimentSpec, out) -> None:
    keys = list(TABLES) if spec.which == "all" else [spec.which]
    for i, key in enumerate(keys):
        if key not in TABLES:
            raise UsageError(f"unknown table {key!r}; choose 1, 2, 3, 4 or all")
        header, fn = TABLES[key]
        if len(keys) > 1:
            out.write(("\n" if i else "") + f"# table {key}\n")
        write_csv(out, header, fn())


HANDLERS = {
    "ber": cmd_ber, "bound": cmd_bound, "rate": cmd_rate,
    "med": cmd_med, "complexity": cmd_complexity, "tables": cmd_tables,
}


def run(spec: ExperimentSpec, stdout=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    if spec.output:
        Path(spec.output).parent.mkdir(parents=True, exist_ok=True)
        buf = io.StringIO()
        HANDLERS[spec.command](spec, buf)
        with open(spec.output, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        HANDLERS[spec.command](spec, stdout)
    return 0


# presets ------------------------------------------------------------------

def _apm(n, k, p, m=1):
    return {"scheme": "apm", "n": n, "k": k, "p": p, "m": m}


def _iqm(n, r, t, m=1):
    return {"scheme": "iqm", "n": n, "r": r, "t": t, "m": m}


def _plain(m, family):
    return {"scheme": "plain", "m": m, "family": family}


def _sweep(tag, cfg, detector, snr="0:5:40"):
    return (tag, {"command": "ber", "detector": detector, "snr": snr, **cfg})


def _bound(tag, cfg, snr="0:5:40"):
    return (tag, {"command": "bound", "snr": snr, **cfg})


def _rate(tag, cfg, snr="-10:2:30"):
    return (tag, {"command": "rate", "snr": snr, **cfg})


PRESETS: dict[str, list[tuple[str, dict]]] = {
    "fig4": [
        _sweep("apm_2_2_2_ml", _apm(2, 2, 2), "ml"),
        _sweep("iqm_2_2_2_ml", _iqm(2, 2, 2), "ml"),
        _sweep("bpsk_ml", _plain(2, "psk"), "ml"),
    ],
    "fig5": [
        _sweep("iqm_4_4_4_ml", _iqm(4, 4, 4), "ml"),
        _sweep("apm_4_2_8_ml", _apm(4, 2, 8), "ml"),
        _sweep("apm_4_2_4_2_ml", _apm(4, 2, 4, 2), "ml"),
    ],
    "fig6": [
        _sweep("apm_4_2_8_2_lcml", _apm(4, 2, 8, 2), "lcml"),
        _sweep("iqm_4_8_6_lcml", _iqm(4, 8, 6), "lcml"),
        _sweep("qam16_ml", _plain(16, "qam"), "ml"),
    ],
    "fig8": [
        entry
        for tag, cfg in (
            ("apm_2_4_4", _apm(2, 4, 4)), ("apm_4_2_4_2", _apm(4, 2, 4, 2)),
            ("iqm_4_2_2_2", _iqm(4, 2, 2, 2)), ("iqm_2_2_2", _iqm(2, 2, 2)),
        )
        for entry in (
            _sweep(f"{tag}_ml", cfg, "ml"), _sweep(f"{tag}_lcml", cfg, "lcml"), _bound(f"{tag}_bound", cfg)
        )
    ],
    # Desk-scale stand-ins for the rate figures: every codebook has f <= 12.
    "fig9a": [
        _rate("apm_2_4_4_4", _apm(2, 4, 4, 4)),
        _rate("iqm_2_4_4_2", _iqm(2, 4, 4, 2)),
        _rate("qam16", _plain(16, "qam")),
    ],
    "fig9b": [
        _rate("apm_2_8_8_4", _apm(2, 8, 8, 4)),
        _rate("iqm_2_8_8_2", _iqm(2, 8, 8, 2)),
        _rate("psk32", _plain(32, "psk")),
    ],
}


def preset_specs(name: str, outdir: str, base: dict | None = None) -> list[ExperimentSpec]:
    if name not in PRESETS:
        raise UsageError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    specs = []
    for tag, cfg in PRESETS[name]:
        fields = {**(base or {}), **cfg, "output": str(Path(outdir) / f"{name}_{tag}.csv")}
        specs.append(ExperimentSpec(**fields))
    return specs


# argument parsing ---------------------------------------------------------

def _default_seed() -> int:
    env = os.environ.get("MDSMOD_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"MDSMOD_SEED must be an integer, got {env!r}") from None


def _add_common(sp: argparse.ArgumentParser) -> None:
    g = sp.add_argument_group("scheme")
    g.add_argument("--scheme", choices=("apm", "iqm", "plain"))
    for flag in ("n", "k", "p", "m", "r", "t", "groups"):
        g.add_argument(f"--{flag}", type=int)
    g.add_argument("--family", choices=("psk", "qam"))
    g.add_argument("--no-ring-rotation", dest="ring_rotation", action="store_false", default=None)
    sp.add_argument("--snr", help="start:step:stop in dB, endpoints included")
    sp.add_argument("--detector", choices=("ml", "lcml"))
    sp.add_argument("--seed", type=int)
    sp.add_argument("--min-errors", dest="min_errors", type=int)
    sp.add_argument("--max-frames", dest="max_frames", type=int)
    sp.add_argument("--threads", type=int)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--which")
    sp.add_argument("--curves", action="store_true", default=None)
    sp.add_argument("--output", "-o")
    sp.add_argument("--config", help="flat JSON file with the same keys as the flags")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mdsmod", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        _add_common(sub.add_parser(name))
    pre = sub.add_parser("preset", help="run a named figure preset")
    pre.add_argument("name", choices=sorted(PRESETS))
    pre.add_argument("--outdir", default="results")
    pre.add_argument("--dry-run", action="store_true")
    pre.add_argument("--threads", type=int)
    pre.add_argument("--seed", type=int)
    pre.add_argument("--min-errors", dest="min_errors", type=int)
    pre.add_argument("--max-frames", dest="max_frames", type=int)
    pre.add_argument("--samples", type=int)
    return parser


_SPEC_FIELDS = {f.name for f in dataclasses.fields(ExperimentSpec)}


def spec_from_args(ns: argparse.Namespace) -> ExperimentSpec:
    values: dict = {"seed": _default_seed(), "threads": os.cpu_count() or 1}
    if getattr(ns, "config", None):
        with open(ns.config) as fh:
            cfg = json.load(fh)
        unknown = set(cfg) - _SPEC_FIELDS
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        values.update(cfg)
    values.update({k: v for k, v in vars(ns).items() if k in _SPEC_FIELDS and v is not None})
    return ExperimentSpec(**values)


def main(argv=None) -> int:
    parser = make_parser()
    ns = parser.parse_args(argv)
    try:
        if ns.command == "preset":
            base = {k: v for k, v in vars(ns).items()
                    if k in ("threads", "seed", "min_errors", "max_frames", "samples") and v is not None}
            base.setdefault("seed", _default_seed())
            specs = preset_specs(ns.name, ns.outdir, base)
            for spec in specs:
                if ns.dry_run:
                    print(json.dumps(dataclasses.asdict(spec), sort_keys=True))
                else:
                    run(spec)
                    print(f"wrote {spec.output}", file=sys.stderr)
            return 0
        return run(spec_from_args(ns))
    except analysis.UnsupportedConfiguration as exc:
        print(f"mdsmod: unsupported configuration: {exc}", file=sys.stderr)
        return 3
    except (UsageError, ValueError, OSError) as exc:
        parser.print_usage(sys.stderr)
        print(f"mdsmod: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
