"""Command-line interface.

Subcommands: coherence, spectrum, recover, certify, table1, noiselet,
phase, deviation. A JSON config file (--config) may supply any
ExperimentConfig field; explicit flags override file values.

Exit codes: 0 success, 2 invalid configuration, 3 experiment ran but the
success target was censored (unreachable within the search range).
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .analysis import coherence
from .certificate import certify_then_solve
from .harness import (ExperimentConfig, certify_experiment,
                      deviation_experiment, noiselet_haar_experiment,
                      phase_csv, phase_curve, table1_experiment, trial_seeds)
from .sampling import random_model, sample_uniform
from .solver import recover
from .transforms import two_sided_frequencies, wavelet_spectrum
from .harness import _system as build_system

EXIT_OK = 0
EXIT_BAD_CONFIG = 2
EXIT_CENSORED = 3


def _int_list(text):
    return tuple(int(s) for s in str(text).split(",") if s.strip())


def _add_common(p):
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--n", type=int)
    p.add_argument("--system", choices=["dft", "subband", "noiselet_haar"])
    p.add_argument("--wavelet", choices=["haar", "daub8"])
    p.add_argument("--scale", type=int, dest="scale", help="wavelet scale j")
    p.add_argument("--sparsity", type=_int_list, help="S (comma list allowed)")
    p.add_argument("--m", type=int)
    p.add_argument("--m-grid", type=_int_list, dest="m_grid")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--target", type=float, help="required success fraction")
    p.add_argument("--out", dest="out")
    p.add_argument("--format", choices=["csv", "json"], dest="fmt")
    p.add_argument("--solver-gap", type=float, dest="solver_gap")
    p.add_argument("--coarse-direct", type=int, dest="coarse_direct")
    p.add_argument("--dense-coarse", type=int, dest="dense_coarse")
    p.add_argument("--workers", type=int)
    p.add_argument("--cells", help="explicit j:S pairs, e.g. 1:50,2:15")


class ConfigError(Exception):
    """Invalid configuration (maps to exit code 2)."""


def _merge_config(args, experiment):
    base = {}
    if args.config:
        try:
            with open(args.config) as fh:
                base = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}")
    base["experiment"] = experiment
    override = {
        "n": args.n,
        "system": args.system,
        "wavelet": args.wavelet,
        "scales": (args.scale,) if args.scale is not None else None,
        "sparsities": args.sparsity,
        "m": args.m,
        "m_grid": args.m_grid,
        "trials": args.trials,
        "seed": args.seed,
        "success_target": args.target,
        "output_path": args.out,
        "output_format": args.fmt,
        "coarse_direct": args.coarse_direct,
        "dense_coarse": args.dense_coarse,
        "workers": args.workers,
    }
    if args.cells:
        try:
            base["cells"] = [tuple(int(v) for v in pair.split(":"))
                             for pair in args.cells.split(",")]
        except ValueError:
            raise ConfigError(f"bad --cells value {args.cells!r}")
    for k, v in override.items():
        if v is not None:
            base[k] = v
    if args.solver_gap is not None:
        sol = dict(base.get("solver", {}))
        sol["duality_gap_tol"] = args.solver_gap
        base["solver"] = sol
    try:
        return ExperimentConfig.from_dict(base)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc))


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_record(record, cfg, csv_text=None):
    if cfg.output_format == "json":
        _emit(record.to_json(indent=2), cfg.output_path)
    else:
        _emit(csv_text if csv_text is not None else record.rows_csv(),
              cfg.output_path)


def cmd_coherence(args):
    cfg = _merge_config(args, "coherence")
    j = cfg.scales[0] if cfg.scales else 1
    U = build_system(cfg.system, cfg.n, j, cfg.wavelet)
    mu = coherence(U)
    out = {"system": cfg.system, "n": cfg.n, "mu": mu}
    if cfg.output_format == "json" or not cfg.output_path:
        _emit(json.dumps(out), cfg.output_path)
    else:
        _emit("system,n,mu\n%s,%d,%r" % (cfg.system, cfg.n, mu), cfg.output_path)
    return EXIT_OK


def cmd_spectrum(args):
    cfg = _merge_config(args, "spectrum")
    j = cfg.scales[0] if cfg.scales else 1
    mags = wavelet_spectrum(cfg.n, j, cfg.wavelet)
    omegas = two_sided_frequencies(cfg.n)
    if cfg.output_format == "json":
        _emit(json.dumps({"n": cfg.n, "j": j, "wavelet": cfg.wavelet,
                          "omega": omegas.tolist(), "magnitude": mags.tolist()}),
              cfg.output_path)
    else:
        lines = ["omega,magnitude"]
        lines += [f"{int(w)},{float(v)!r}" for w, v in zip(omegas, mags)]
        _emit("\n".join(lines) + "\n", cfg.output_path)
    return EXIT_OK


def _single_instance(cfg):
    j = cfg.scales[0] if cfg.scales else 1
    U = build_system(cfg.system, cfg.n, j, cfg.wavelet)
    S = cfg.sparsities[0]
    if cfg.m is None:
        raise ConfigError("--m is required")
    model_seed, omega_seed = trial_seeds(cfg.seed, 0)
    model = random_model(U.n_cols, S, model_seed)
    omega = sample_uniform(U.n_rows, cfg.m, omega_seed)
    return U, omega, model


def cmd_recover(args):
    cfg = _merge_config(args, "recover")
    U, omega, model = _single_instance(cfg)
    res = recover(U, omega, model, opts=cfg.solver)
    payload = {"config": cfg.to_dict(), "model": model.to_dict(),
               "omega": omega.to_dict(), "result": res.to_dict()}
    _emit(json.dumps(payload, indent=2), cfg.output_path)
    return EXIT_OK


def cmd_certify(args):
    cfg = _merge_config(args, "certify")
    U, omega, model = _single_instance(cfg)
    out = certify_then_solve(U, omega, model, opts=cfg.solver)
    payload = {"config": cfg.to_dict(), "model": model.to_dict(),
               "omega": omega.to_dict(),
               "certificate": out["certificate"].to_dict(),
               "recovery": out["recovery"].to_dict(),
               "consistent": out["consistent"],
               "expected_failure": out["expected_failure"]}
    _emit(json.dumps(payload, indent=2), cfg.output_path)
    return EXIT_OK


def cmd_table1(args):
    cfg = _merge_config(args, "table1")
    record = table1_experiment(cfg)
    _emit_record(record, cfg)
    summary = ", ".join(f"(j={c['j']},S={c['S']})->M="
                        f"{c['M'] if not c['censored'] else 'censored'}"
                        for c in record.aggregates["cells"])
    print(summary, file=sys.stderr)
    return EXIT_CENSORED if record.aggregates["censored"] else EXIT_OK


def cmd_noiselet(args):
    cfg = _merge_config(args, "noiselet_haar")
    if cfg.m is None:
        raise ConfigError("--m is required")
    record = noiselet_haar_experiment(cfg.n, cfg.sparsities[0], cfg.m,
                                      cfg.trials, cfg.seed,
                                      coarse_direct=cfg.coarse_direct,
                                      dense_coarse=cfg.dense_coarse,
                                      opts=cfg.solver, workers=cfg.workers)
    _emit_record(record, cfg)
    rate = record.aggregates["success_rate"]
    print(f"success_rate={rate:.3f} mu={record.aggregates['mu']:.6f}",
          file=sys.stderr)
    if cfg.success_target < 1.0 and rate < cfg.success_target:
        return EXIT_CENSORED
    return EXIT_OK


def cmd_phase(args):
    cfg = _merge_config(args, "phase_curve")
    record = phase_curve(cfg)
    _emit_record(record, cfg, csv_text=phase_csv(record))
    return EXIT_OK


def cmd_deviation(args):
    cfg = _merge_config(args, "deviation_tail")
    record = deviation_experiment(cfg)
    if cfg.output_format == "json":
        _emit(record.to_json(indent=2), cfg.output_path)
    else:
        a = record.aggregates
        _emit("n,system,S,m,trials,frequency\n"
              f"{cfg.n},{cfg.system},{len(a['support'])},{a['m']},"
              f"{a['trials']},{a['frequency']!r}\n", cfg.output_path)
    return EXIT_OK


def cmd_certify_batch(args):
    cfg = _merge_config(args, "certify")
    record = certify_experiment(cfg)
    _emit_record(record, cfg)
    return EXIT_OK


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="cskit",
        description="Compressive sampling experiments: sparse recovery from "
                    "partial orthogonal measurements.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    commands = {
        "coherence": ("largest entry magnitude of a measurement system",
                      cmd_coherence),
        "spectrum": ("wavelet band magnitudes for subband diagnostics",
                     cmd_spectrum),
        "recover": ("solve one seeded recovery instance", cmd_recover),
        "certify": ("dual certificate plus solve on one seeded instance",
                    cmd_certify),
        "table1": ("minimum measurement search over subband cells",
                   cmd_table1),
        "noiselet": ("noiselet/Haar recovery trials", cmd_noiselet),
        "phase": ("success-rate grid over (S, m) cells", cmd_phase),
        "deviation": ("Gram deviation tail frequency (Bernoulli model)",
                      cmd_deviation),
    }
    for name, (help_text, _) in commands.items():
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        if name == "certify":
            p.add_argument("--batch", action="store_true",
                           help="run config.trials certified instances")

    args = parser.parse_args(argv)
    handler = commands[args.command][1]
    if args.command == "certify" and getattr(args, "batch", False):
        handler = cmd_certify_batch
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
