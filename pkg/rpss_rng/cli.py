"""
Command-line front end.

    rpss gen --n 4 --m 4 --bits 4 --bytes 1024 --seed 0x1 --mode sim --out out.bin
    rpss dist --n 4 --m 1 --trials 1000000
    rpss mod --n 4 --m 3 --bits 5
    rpss convergence
    rpss conjugate --pads 26 --runs 5 --seed 1
    rpss oracle --dist wrapped --m 3 --p 1/24 --R 16
    rpss validate --file out.bin --bits 4
    rpss replay out/gen_manifest.json

Exit codes: 0 success, 1 usage error, 2 engine failure, 3 validation failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .engine import PACKABLE_BITS, DrawBudgetExceeded, Turng, default_clock, run_cycle, unpack_bytes
from .io import (
    RunManifest, output_dir, write_histogram_csv, write_histogram_json,
    write_report_json, write_rows_csv, histogram_summary,
)
from .models.config import ConvergenceWarning, EngineConfig, Mode
from .models.histogram import Histogram
from .models.permutation import MAX_TABLE_SIZE
from .prng import Lcg
from .simulate import CycleBatch, simulate_cycles
from .stats import (
    InsufficientSampleError, TruncationError, Verdict,
    compound_time_moments, convergence_verdict, negbin_moments, negbin_pmf, residue_correlation,
    uniformity_report, wrapped_compound_pmf, wrapped_residue_pmf,
)
from .timing import ClockUnavailableError, ScheduleExhaustedError, parse_runtime_model


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ENGINE = 2
EXIT_VALIDATION = 3

DEFAULT_TRIALS = 10 ** 6

GENERATORS = ("auto", "lcg", "pcg64")

# (N, m, n_bits) rows of the convergence sweep
DEFAULT_GRID = [(3, 15, 4), (3, 20, 4), (4, 3, 4), (4, 4, 4), (5, 2, 4), (5, 4, 8), (5, 5, 8)]


class UsageError(ValueError):
    """Invalid flag combination."""


class ValidationFailed(RuntimeError):
    """Output did not meet the Good thresholds."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int(text: str) -> int:
    """Decimal or 0x-prefixed integer."""
    return int(text, 0)


def _probability(text: str) -> float:
    """A float or a fraction such as 1/24."""
    return float(Fraction(text))


def _grid(text: str) -> list[tuple[int, int, int]]:
    rows = []
    for item in text.split():
        try:
            n, m, bits = (int(v) for v in item.split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(f"grid rows look like N,m,bits; got {item!r}") from None
        rows.append((n, m, bits))
    return rows


def _engine_args(p: argparse.ArgumentParser, bits: bool = True, reseed: bool = False):
    p.add_argument("--n", type=int, default=4, help="array size N")
    p.add_argument("--m", type=int, default=4, help="sorting successes per cycle")
    if bits:
        p.add_argument("--bits", type=int, default=4, help="symbol width n")
    p.add_argument("--seed", type=_int, default=1, help="initial seed (decimal or 0x hex)")
    p.add_argument("--mode", choices=["hardware", "sim"], default="sim")
    if reseed:
        p.add_argument("--k-shift", type=int, default=None, help="reseed shift k")
    p.add_argument("--runtime-model", default=None,
                   help="simulated cost model, e.g. constant:2 or empirical:1=0.5,2=0.5")
    p.add_argument("--draw-cap", type=int, default=None, help="per-cycle draw cap")
    p.add_argument("--multiplier", type=_int, default=None, help="LCG multiplier")
    p.add_argument("--increment", type=_int, default=None, help="LCG increment")


def _sampling_args(p: argparse.ArgumentParser):
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--generator", choices=GENERATORS, default="auto",
                   help="pad draws: the LCG one cycle at a time, or numpy PCG64 batched "
                        "(simulated mode, N <= 6); auto batches unless LCG constants are given")
    p.add_argument("--out-dir", default=None)


def _config(args, n: int | None = None, m: int | None = None,
            bits: int | None = None) -> EngineConfig:
    return EngineConfig(
        n=n if n is not None else args.n,
        m=m if m is not None else args.m,
        n_bits=bits if bits is not None else getattr(args, "bits", 4),
        k_shift=getattr(args, "k_shift", None),
        mode=args.mode,
        runtime_model=parse_runtime_model(args.runtime_model) if args.runtime_model else None,
        draw_cap=args.draw_cap,
        warmup=getattr(args, "warmup", 0),
        multiplier=args.multiplier,
        increment=args.increment,
    )


def _generator(args, cfg: EngineConfig) -> str:
    """The pad generator a sampling command actually uses."""
    requested = getattr(args, "generator", "auto")
    batchable = cfg.mode is Mode.SIMULATED and cfg.n <= MAX_TABLE_SIZE
    custom = args.multiplier is not None or args.increment is not None
    if requested == "pcg64":
        if not batchable:
            raise UsageError(f"--generator pcg64 needs --mode sim and N <= {MAX_TABLE_SIZE}")
        if custom:
            raise UsageError("--multiplier/--increment set the LCG; drop them or use --generator lcg")
        return "pcg64"
    if requested == "lcg" or custom or not batchable:
        return "lcg"
    return "pcg64"


def _collect(cfg: EngineConfig, trials: int, seed: int, generator: str) -> CycleBatch:
    """Cycles with a fixed pad generator: batched PCG64 or the sequential LCG."""
    if generator == "pcg64":
        return simulate_cycles(cfg, trials, seed)
    rng = Lcg(state=cfg.lcg_state(seed))
    clock = default_clock(cfg, seed)
    n_p = np.empty(trials, dtype=np.int64)
    t = np.empty(trials, dtype=np.int64)
    for i in range(trials):
        result, _ = run_cycle(cfg, rng, clock)
        n_p[i], t[i] = result.n_p, result.ticks
    return CycleBatch(n_p, t, cfg.n_bits)


def _write(manifest: RunManifest, path: Path, writer: Callable, *args, **kwargs) -> Path:
    writer(*args, path, **kwargs)
    manifest.add_output(path)
    return path


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_gen(args, manifest: RunManifest) -> int:
    """Raw TURNG bytes."""
    if args.bytes < 0:
        raise UsageError("--bytes must be >= 0")
    cfg = _config(args)
    manifest.config, manifest.seed, manifest.mode, manifest.trials = (
        cfg.to_dict(), args.seed, cfg.mode.value, args.bytes)
    manifest.generator = "lcg"
    engine = Turng(cfg, args.seed)
    data = engine.read(args.bytes)

    if args.out in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        path = Path(args.out)
        path.write_bytes(data)
        manifest.add_output(path)
        print(f"TURNG: {len(data)} bytes, {engine.cycle_index} cycles -> {path}", file=sys.stderr)
    return EXIT_OK


def cmd_dist(args, manifest: RunManifest) -> int:
    """Raw n_p and tick histograms."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        cfg = _config(args, bits=16)
    out = output_dir(args.out_dir)
    manifest.config, manifest.seed, manifest.mode, manifest.trials = (
        cfg.to_dict(), args.seed, cfg.mode.value, args.trials)
    manifest.generator = _generator(args, cfg)
    batch = _collect(cfg, args.trials, args.seed, manifest.generator)

    counts, ticks = batch.count_histogram(), batch.tick_histogram()
    stem = f"dist_N{cfg.n}_m{cfg.m}"
    for label, h in (("np", counts), ("t", ticks)):
        _write(manifest, out / f"{stem}_{label}.csv", write_histogram_csv, h)
        _write(manifest, out / f"{stem}_{label}.json", write_histogram_json, h,
               **histogram_summary(h))
    expected_mean, expected_var = negbin_moments(cfg.m, cfg.success_probability)
    summary = {
        "n_p": histogram_summary(counts),
        "t": histogram_summary(ticks),
        "expected_n_p": {"mean": expected_mean, "variance": expected_var},
        "p_n_p_mode": counts[counts.mode()] / counts.total,
    }
    path = out / f"{stem}_summary.json"
    path.write_text(json.dumps(summary, indent=2) + "\n")
    manifest.add_output(path)

    print(f"n_p: {len(counts)} bins, {counts.total} samples, mean {counts.mean():.3f} "
          f"(expected {expected_mean:g}), mode {counts.mode()}")
    print(f"t:   {len(ticks)} bins, mean {ticks.mean():.3f}, mode {ticks.mode()}")
    print(f"  → {out}")
    return EXIT_OK


def _pair_correlation(a: np.ndarray, b: np.ndarray) -> float | None:
    try:
        return residue_correlation(a, b)
    except ValueError:
        return None


def cmd_mod(args, manifest: RunManifest) -> int:
    """Residue histograms, the three uniformity criteria and the n_p/t correlation."""
    cfg = _config(args)
    out = output_dir(args.out_dir)
    manifest.config, manifest.seed, manifest.mode, manifest.trials = (
        cfg.to_dict(), args.seed, cfg.mode.value, args.trials)
    manifest.generator = _generator(args, cfg)
    batch = _collect(cfg, args.trials, args.seed, manifest.generator)
    correlation = _pair_correlation(batch.n_p_mod, batch.t_mod)

    stem = f"mod_N{cfg.n}_m{cfg.m}_n{cfg.n_bits}"
    failed = []
    for label, h in (("np", batch.count_residues()), ("t", batch.tick_residues())):
        _write(manifest, out / f"{stem}_{label}.csv", write_histogram_csv, h, R=cfg.R)
        report = uniformity_report(h, cfg.n_bits)
        verdict = convergence_verdict(report)
        if verdict is Verdict.FAIL:
            failed.append(label)
        _write(manifest, out / f"{stem}_{label}_report.json", write_report_json, report,
               verdict=verdict.value, np_t_correlation=correlation)
        print(f"{label:>2} mod {cfg.R}: {report.summary()} -> {verdict.value}")
    if correlation is not None:
        print(f"corr(n_p mod {cfg.R}, t mod {cfg.R}) = {correlation:+.4f}")
    print(f"  → {out}")
    if failed:
        raise ValidationFailed(f"{' and '.join(failed)} residues fail the Good thresholds")
    return EXIT_OK


def cmd_convergence(args, manifest: RunManifest) -> int:
    """Verdict per (N, m, bits) row."""
    out = output_dir(args.out_dir)
    manifest.seed, manifest.mode, manifest.trials = args.seed, args.mode, args.trials
    if getattr(args, "generator", "auto") == "pcg64" and (
            args.multiplier is not None or args.increment is not None):
        raise UsageError("--multiplier/--increment set the LCG; drop them or use --generator lcg")
    rows = []
    used = []
    for n, m, bits in args.grid:
        row = {"N": n, "m": m, "bits": bits}
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ConvergenceWarning)
                cfg = _config(args, n=n, m=m, bits=bits)
            generator = _generator(args, cfg)
            used.append(generator)
            batch = _collect(cfg, args.trials, args.seed, generator)
            report = uniformity_report(batch.count_residues(), bits)
            verdict = convergence_verdict(report)
            row.update({"M": cfg.M, "R": cfg.R, "generator": generator, **report.to_dict(),
                        "verdict": verdict.value})
        except (ValueError, RuntimeError) as e:
            logger.warning("Row N=%d m=%d bits=%d failed: %s", n, m, bits, e)
            row.update({"verdict": Verdict.FAIL.value, "error": str(e)})
        rows.append(row)
        print(f"N={n} m={m:<3} bits={bits}: {row['verdict']}")
    manifest.generator = ",".join(dict.fromkeys(used)) or None

    _write(manifest, out / "convergence.csv", write_rows_csv, rows)
    path = out / "convergence.json"
    path.write_text(json.dumps(rows, indent=2) + "\n")
    manifest.add_output(path)
    print(f"  → {out}")
    return EXIT_OK


def cmd_conjugate(args, manifest: RunManifest) -> int:
    """Fixed pad sequence timed over repeated runs, raw and mod 2^bits."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        cfg = _config(args)
    out = output_dir(args.out_dir)
    manifest.config, manifest.seed, manifest.mode, manifest.trials = (
        cfg.to_dict(), args.seed, cfg.mode.value, args.pads * args.runs)
    manifest.generator = "lcg"
    clock = default_clock(cfg, args.seed)
    raw, reduced = [], []
    for run in range(1, args.runs + 1):
        # same seed every run: the pad sequence is frozen
        rng = Lcg(state=cfg.lcg_state(args.seed))
        for pad in range(1, args.pads + 1):
            result, _ = run_cycle(cfg, rng, clock)
            raw.append({"pad": pad, "run": run, "n_p": result.n_p, "t": result.ticks})
            reduced.append({"pad": pad, "run": run, "n_p_mod": result.n_p_mod,
                            "t_mod": result.t_mod})

    _write(manifest, out / "conjugate_raw.csv", write_rows_csv, raw)
    _write(manifest, out / f"conjugate_mod{cfg.R}.csv", write_rows_csv, reduced)
    varying = {r["pad"] for r in raw if r["t"] != raw[r["pad"] - 1]["t"]}
    correlation = _pair_correlation(np.array([r["n_p_mod"] for r in reduced]),
                                    np.array([r["t_mod"] for r in reduced]))
    summary = {"pads": args.pads, "runs": args.runs, "pads_with_varying_t": len(varying),
               "np_t_correlation": correlation}
    path = out / "conjugate_summary.json"
    path.write_text(json.dumps(summary, indent=2) + "\n")
    manifest.add_output(path)
    print(f"Conjugate: {args.pads} pads x {args.runs} runs, "
          f"{len(varying)} pads with varying t")
    if correlation is not None:
        print(f"corr(n_p mod {cfg.R}, t mod {cfg.R}) = {correlation:+.4f}")
    print(f"  → {out}")
    return EXIT_OK


def cmd_oracle(args, manifest: RunManifest) -> int:
    """Exact pmf or moment values as JSON on stdout (and CSV with --out)."""
    p = args.p
    if args.dist == "negbin":
        k_max = args.k_max if args.k_max is not None else args.m + 20
        values = {k: negbin_pmf(k, args.m, p) for k in range(args.m, k_max + 1)}
        mean, variance = negbin_moments(args.m, p)
        payload = {"dist": "negbin", "m": args.m, "p": p, "mean": mean,
                   "variance": variance, "pmf": {str(k): v for k, v in values.items()}}
    elif args.dist == "wrapped":
        if args.runtime_model:
            probs = wrapped_compound_pmf(args.m, p, parse_runtime_model(args.runtime_model), args.R)
        else:
            probs = wrapped_residue_pmf(args.m, p, args.R)
        values = dict(enumerate(probs.tolist()))
        payload = {"dist": "wrapped", "m": args.m, "p": p, "R": args.R,
                   "runtime_model": args.runtime_model, "sum": float(probs.sum()),
                   "pmf": {str(k): v for k, v in values.items()}}
    else:
        if args.runtime_model:
            model = parse_runtime_model(args.runtime_model)
            mu, var = model.mean, model.variance
        else:
            if args.mu is None or args.var is None:
                raise UsageError("compound needs --mu and --var or --runtime-model")
            mu, var = args.mu, args.var
        mean, variance = compound_time_moments(args.m, p, mu, var)
        values = {}
        payload = {"dist": "compound", "m": args.m, "p": p, "mu_x": mu, "var_x": var,
                   "mean": mean, "variance": variance}

    print(json.dumps(payload, indent=2))
    if args.out and values:
        path = Path(args.out)
        write_rows_csv([{"value": k, "probability": v} for k, v in values.items()], path)
        manifest.add_output(path)
    return EXIT_OK


def cmd_validate(args, manifest: RunManifest) -> int:
    """Uniformity report for a raw byte file."""
    if args.bits not in PACKABLE_BITS:
        raise UsageError(f"--bits must be one of {PACKABLE_BITS}")
    data = Path(args.file).read_bytes()
    symbols = np.array(unpack_bytes(data, args.bits), dtype=np.int64)
    h = Histogram.from_cells(np.bincount(symbols, minlength=1 << args.bits))
    manifest.trials = len(symbols)
    report = uniformity_report(h, args.bits)
    verdict = convergence_verdict(report)
    print(f"{args.file}: {len(data)} bytes, {len(symbols)} symbols")
    print(f"  {report.summary()}")
    print(f"  verdict: {verdict.value}")
    if args.report:
        _write(manifest, Path(args.report), write_report_json, report, verdict=verdict.value)
    if verdict is Verdict.FAIL:
        raise ValidationFailed(f"{args.file} fails the Good thresholds")
    return EXIT_OK


def cmd_replay(args, manifest: RunManifest) -> int:
    """Rerun the command recorded in a manifest."""
    recorded = RunManifest.load(args.manifest)
    if recorded.command not in COMMANDS or recorded.command == "replay":
        raise UsageError(f"cannot replay command {recorded.command!r}")
    replayed = argparse.Namespace(**recorded.arguments)
    if args.out_dir is not None and hasattr(replayed, "out_dir"):
        replayed.out_dir = args.out_dir
    manifest.arguments = {**vars(replayed), "replayed_from": str(args.manifest)}
    print(f"Replaying {recorded.command} from {args.manifest}", file=sys.stderr)
    return COMMANDS[recorded.command](replayed, manifest)


COMMANDS: dict[str, Callable] = {
    "gen": cmd_gen,
    "dist": cmd_dist,
    "mod": cmd_mod,
    "convergence": cmd_convergence,
    "conjugate": cmd_conjugate,
    "oracle": cmd_oracle,
    "validate": cmd_validate,
    "replay": cmd_replay,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rpss", description="Random permutation sorting entropy engine")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate raw TURNG bytes")
    _engine_args(p, reseed=True)
    p.add_argument("--bytes", type=int, required=True, help="number of bytes")
    p.add_argument("--warmup", type=int, default=0, help="symbols discarded at start")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--out-dir", default=None, help="manifest directory")

    for name, text in (("dist", "raw n_p and tick histograms"),
                       ("mod", "modular-reduced histograms and uniformity report")):
        p = sub.add_parser(name, help=text)
        _engine_args(p, bits=(name == "mod"))
        _sampling_args(p)

    p = sub.add_parser("convergence", help="uniformity verdict over (N, m, bits) rows")
    _engine_args(p, bits=False)
    p.add_argument("--grid", type=_grid, default=DEFAULT_GRID,
                   help='space separated N,m,bits rows, e.g. "4,4,4 5,2,4"')
    _sampling_args(p)

    p = sub.add_parser("conjugate", help="repeat the timing of a frozen pad sequence")
    _engine_args(p)
    p.set_defaults(mode="hardware", m=1)
    p.add_argument("--pads", type=int, default=26)
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--out-dir", default=None)

    p = sub.add_parser("oracle", help="exact pmf and moment values")
    p.add_argument("--dist", choices=["negbin", "wrapped", "compound"], required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--p", type=_probability, default=Fraction(1, 24))
    p.add_argument("--R", type=int, default=16)
    p.add_argument("--k-max", type=int, default=None, help="last k for negbin")
    p.add_argument("--mu", type=float, default=None, help="mean ticks per permutation")
    p.add_argument("--var", type=float, default=None, help="tick variance per permutation")
    p.add_argument("--runtime-model", default=None)
    p.add_argument("--out", default=None, help="CSV output")
    p.add_argument("--out-dir", default=None, help="manifest directory")

    p = sub.add_parser("validate", help="uniformity report for a byte file")
    p.add_argument("--file", required=True)
    p.add_argument("--bits", type=int, default=4)
    p.add_argument("--report", default=None, help="JSON report path")
    p.add_argument("--out-dir", default=None, help="manifest directory")

    p = sub.add_parser("replay", help="rerun a recorded command")
    p.add_argument("manifest")
    p.add_argument("--out-dir", default=None, help="override the recorded output directory")

    return parser


def _manifest_path(args, manifest: RunManifest) -> Path:
    out = getattr(args, "out", None)
    if args.command == "gen" and out not in (None, "-"):
        return Path(f"{out}.manifest.json")
    return output_dir(getattr(args, "out_dir", None)) / f"{args.command}_manifest.json"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    arguments = {k: v for k, v in vars(args).items() if k not in ("verbose",)}
    if isinstance(arguments.get("p"), Fraction):
        arguments["p"] = float(arguments["p"])
        args.p = arguments["p"]
    manifest = RunManifest(command=args.command, arguments=arguments)

    error = None
    code = EXIT_OK
    try:
        code = COMMANDS[args.command](args, manifest)
    except ValidationFailed as e:
        error, code = e, EXIT_VALIDATION
        print(f"Validation failed: {e}", file=sys.stderr)
    except InsufficientSampleError as e:
        error, code = e, EXIT_VALIDATION
        print(f"Validation failed: {e}", file=sys.stderr)
    except (DrawBudgetExceeded, ScheduleExhaustedError, ClockUnavailableError, TruncationError) as e:
        error, code = e, EXIT_ENGINE
        print(f"Engine error: {e}", file=sys.stderr)
    except (ValueError, OSError) as e:
        error, code = e, EXIT_USAGE
        print(f"Error: {e}", file=sys.stderr)
    finally:
        manifest.finish(error)
        try:
            manifest.write(_manifest_path(args, manifest))
        except OSError as e:
            logger.warning("Could not write manifest: %s", e)
    return code


if __name__ == "__main__":
    sys.exit(main())
