"""Command-line pipeline driver.

Subcommands: ``gen``, ``noise``, ``train``, ``denoise``, ``eval``,
``summary``.  All take ``--config`` (a versioned JSON run config) plus
optional ``--seed``, ``--threads`` and ``--dry-run``.  Exit codes: 0
success, 2 config error, 3 data error, 4 numeric failure.  Failures print a
single machine-parsable line ``specdenoise: error[<kind>]: <message>`` to
stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

DENOISE_METHODS = ("n2n4m", "sg", "cotcat_like")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specdenoise",
        description="Spectrum denoising pipeline: generate, noise, train, denoise, evaluate.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="path to the JSON run config")
    common.add_argument("--seed", type=int, default=None,
                        help="override the config seed everywhere, uniformly")
    common.add_argument("--threads", type=int, default=None,
                        help="cap BLAS/OpenMP thread count")
    common.add_argument("--dry-run", action="store_true",
                        help="validate inputs and report what would happen, without writing")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("gen", parents=[common], help="generate the clean synthetic dataset")
    p_noise = sub.add_parser("noise", parents=[common],
                             help="write the noisy twin of the clean dataset")
    p_noise.add_argument("--clamp", action="store_true",
                         help="clip noisy values back to (0, 1] (off by default)")

    p_train = sub.add_parser("train", parents=[common], help="train the n2n4m denoiser")
    p_train.add_argument("--resume", default=None,
                         help="checkpoint to resume from (continues epoch numbering)")

    p_den = sub.add_parser("denoise", parents=[common], help="denoise a dataset CSV")
    p_den.add_argument("--method", required=True, choices=DENOISE_METHODS)
    p_den.add_argument("--in", dest="in_path", required=True, help="input dataset CSV")
    p_den.add_argument("--out", dest="out_path", required=True, help="output dataset CSV")

    sub.add_parser("eval", parents=[common], help="evaluate all denoised datasets")

    p_sum = sub.add_parser("summary", parents=[common], help="per-pixel band-depth export")
    p_sum.add_argument("--param", required=True, help="band-depth parameter name")
    p_sum.add_argument("--in", dest="in_path", required=True, help="input dataset CSV")
    p_sum.add_argument("--out", dest="out_path", default=None,
                       help="output CSV (default: report_dir/summary_<param>.csv)")
    return parser


def _apply_threads(argv) -> None:
    # Must happen before numpy is imported anywhere in this process.
    if "--threads" not in argv:
        return
    idx = argv.index("--threads")
    if idx + 1 >= len(argv):
        return
    n = argv[idx + 1]
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[var] = str(n)


def cmd_gen(cfg, args) -> int:
    import numpy as np

    from . import dataio
    from .grid import build_default_grid
    from .synth import generate_dataset

    grid = build_default_grid()
    n_rows = len(cfg.scene.templates) * cfg.scene.n_per_class + cfg.scene.n_bland
    if args.dry_run:
        print(f"gen (dry run): would write {n_rows} spectra to {cfg.paths.dataset('clean')}")
        return 0
    ds = generate_dataset(cfg.scene, grid)
    cfg.paths.data_dir.mkdir(parents=True, exist_ok=True)
    dataio.write_dataset_csv(cfg.paths.dataset("clean"), ds)
    dataio.write_wavelengths_csv(cfg.paths.dataset("wavelengths"), grid)
    dataio.write_split_manifest(cfg.paths.dataset("splits"), ds.split_assignment)
    sizes = {s: int(np.sum(ds.split_of_rows() == s)) for s in ("train", "val", "test")}
    print(f"gen: wrote {len(ds)} spectra ({sizes}) to {cfg.paths.data_dir}")
    return 0


def cmd_noise(cfg, args) -> int:
    from . import dataio
    from .preprocess import add_noise_dataset

    clean = dataio.read_dataset_csv(cfg.paths.dataset("clean"))
    clamp = cfg.clamp_noisy or getattr(args, "clamp", False)
    if args.dry_run:
        print(f"noise (dry run): would noise {len(clean)} spectra "
              f"(sigma_base={cfg.noise.sigma_base}, "
              f"sigma_uniform_max={cfg.noise.sigma_uniform_max}, clamp={clamp})")
        return 0
    noisy = add_noise_dataset(clean, cfg.noise, clamp=clamp)
    dataio.write_dataset_csv(cfg.paths.dataset("noisy"), noisy)
    print(f"noise: wrote {len(noisy)} spectra to {cfg.paths.dataset('noisy')}")
    return 0


def cmd_train(cfg, args) -> int:
    from . import dataio
    from .errors import DataError
    from .nn.checkpoint import load_checkpoint, save_checkpoint
    from .nn.train import train
    from .nn.unet import UNet1D

    if args.dry_run:
        model = UNet1D.build(cfg.model)
        print(f"train (dry run): model has {model.num_params} parameters, "
              f"max {cfg.train.max_epochs} epochs, patience {cfg.train.early_stop_patience}")
        return 0
    splits = dataio.read_split_manifest(cfg.paths.dataset("splits"))
    clean = dataio.read_dataset_csv(cfg.paths.dataset("clean"), split_assignment=splits)
    noisy = dataio.read_dataset_csv(cfg.paths.dataset("noisy"), split_assignment=splits)
    if not (clean.ids == noisy.ids).all():
        raise DataError("clean and noisy datasets are not aligned by id")

    start_epoch = 0
    if args.resume:
        previous = load_checkpoint(args.resume)
        model = UNet1D(previous.config, previous.params)
        start_epoch = previous.epochs_run
        print(f"train: resuming from {args.resume} at epoch {start_epoch}")
    else:
        model = UNet1D.build(cfg.model)

    rows = clean.split_of_rows()
    tr, va = rows == "train", rows == "val"
    ckpt, history = train(
        model,
        (noisy.values[tr], clean.values[tr]),
        (noisy.values[va], clean.values[va]),
        cfg.train,
        shuffle_seed=cfg.shuffle_seed,
        start_epoch=start_epoch,
        log=print,
    )
    cfg.paths.model_dir.mkdir(parents=True, exist_ok=True)
    save_checkpoint(cfg.paths.checkpoint, ckpt)
    dataio.write_loss_history_csv(cfg.paths.loss_history, history)
    print(f"train: best val MSE {ckpt.best_val_loss:.6e} after {ckpt.epochs_run} epochs, "
          f"checkpoint at {cfg.paths.checkpoint}")
    return 0


def cmd_denoise(cfg, args) -> int:
    from . import dataio
    from .baselines import cotcat_like_values, sg_filter_values
    from .grid import build_default_grid
    from .nn.checkpoint import load_checkpoint
    from .nn.train import denoise_values

    ds = dataio.read_dataset_csv(args.in_path)
    grid = (
        dataio.read_wavelengths_csv(cfg.paths.dataset("wavelengths"))
        if cfg.paths.dataset("wavelengths").exists()
        else build_default_grid()
    )
    if args.dry_run:
        print(f"denoise (dry run): {len(ds)} spectra, method {args.method}")
        return 0
    if args.method == "sg":
        values = sg_filter_values(ds.values, cfg.sg, grid)
    elif args.method == "cotcat_like":
        values = cotcat_like_values(ds.values, cfg.cotcat, grid)
    else:
        ckpt = load_checkpoint(cfg.paths.checkpoint)
        values = denoise_values(ckpt, ds.values)
    dataio.write_dataset_csv(args.out_path, ds.with_values(values))
    print(f"denoise: wrote {len(ds)} spectra to {args.out_path} (method {args.method})")
    return 0


def cmd_eval(cfg, args) -> int:
    import numpy as np

    from . import dataio, evaluate as ev
    from .errors import DataError

    splits = dataio.read_split_manifest(cfg.paths.dataset("splits"))
    grid = dataio.read_wavelengths_csv(cfg.paths.dataset("wavelengths"))
    clean = dataio.read_dataset_csv(cfg.paths.dataset("clean"), split_assignment=splits)
    noisy = dataio.read_dataset_csv(cfg.paths.dataset("noisy"), split_assignment=splits)
    available = [m for m in DENOISE_METHODS if cfg.paths.denoised(m).exists()]
    if not available:
        raise DataError(
            f"no denoised datasets found under {cfg.paths.data_dir} "
            f"(expected denoised_<method>.csv)"
        )
    if args.dry_run:
        print(f"eval (dry run): methods {available}, {len(clean)} spectra")
        return 0

    clean_test = clean.split("test")
    test_ids = set(clean_test.ids.tolist())
    denoised = {"noisy": noisy.subset(np.isin(noisy.ids, clean_test.ids))}
    for m in available:
        full = dataio.read_dataset_csv(cfg.paths.denoised(m), split_assignment=splits)
        denoised[m] = full.subset(np.isin(full.ids, clean_test.ids))
        if set(denoised[m].ids.tolist()) != test_ids:
            raise DataError(f"denoised_{m}.csv does not cover the test split")

    classifier = ev.centroid_classifier_train(clean.split("train"), grid)
    report = ev.evaluate_methods(clean_test, denoised, classifier, grid)

    cfg.paths.report_dir.mkdir(parents=True, exist_ok=True)
    table = ev.report_table(report)
    (cfg.paths.report_dir / "report.txt").write_text(table, encoding="utf-8")
    (cfg.paths.report_dir / "report.csv").write_text(ev.report_csv(report), encoding="utf-8")
    print(table, end="")

    # Outcrop check: ratio each dataset by its own bland pool, then band
    # depths.  Values are floored at 1e-6 so the scale-free post-processing
    # cannot divide by nonpositive spectra from a badly denoised input.
    bland = clean_test.kind_mask("bland")
    if bland.any():
        lines = ["method,n_detected,n_true,n_missed,n_spurious"]
        ref_ratio = clean_test.with_values(
            ev.ratio_values(clean_test.values, clean_test.values[bland])
        )
        for m, raw in denoised.items():
            ds = raw.with_values(np.maximum(raw.values, 1e-6))
            ratioed = ds.with_values(ev.ratio_values(ds.values, ds.values[bland]))
            rep = ev.outcrop_report(ratioed, cfg.band_depth_params, cfg.outcrop_threshold,
                                    grid, reference=ref_ratio)
            lines.append(f"{m},{rep.n_detected},{rep.n_true},{rep.n_missed},{rep.n_spurious}")
            _write_detection_map(cfg.paths.report_dir / f"outcrops_{m}.csv", ds, rep)
        (cfg.paths.report_dir / "outcrops.csv").write_text("\n".join(lines) + "\n",
                                                           encoding="utf-8")
        print("\n".join(lines))
    return 0


def _write_detection_map(path, ds, rep) -> None:
    header = "id," + ",".join(rep.param_names) + ",flag"
    rows = [header]
    for i in range(len(ds)):
        bds = ",".join(f"{v:.10e}" for v in rep.band_depths[i])
        rows.append(f"{ds.ids[i]},{bds},{int(rep.flags[i])}")
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")


def cmd_summary(cfg, args) -> int:
    from . import dataio, evaluate as ev

    param = cfg.band_depth_param(args.param)
    ds = dataio.read_dataset_csv(args.in_path)
    grid = (
        dataio.read_wavelengths_csv(cfg.paths.dataset("wavelengths"))
        if cfg.paths.dataset("wavelengths").exists()
        else None
    )
    if grid is None:
        from .grid import build_default_grid

        grid = build_default_grid()
    if args.dry_run:
        print(f"summary (dry run): parameter {param.name} over {len(ds)} spectra")
        return 0
    bd = ev.band_depth_values(ds.values, param, grid)
    out_path = args.out_path or (cfg.paths.report_dir / f"summary_{param.name}.csv")
    cfg.paths.report_dir.mkdir(parents=True, exist_ok=True)
    lines = ["id,band_depth,flag"]
    for i in range(len(ds)):
        lines.append(f"{ds.ids[i]},{bd[i]:.10e},{int(bd[i] > cfg.outcrop_threshold)}")
    Path(out_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"summary: wrote {len(ds)} rows to {out_path}")
    return 0


_COMMANDS = {
    "gen": cmd_gen,
    "noise": cmd_noise,
    "train": cmd_train,
    "denoise": cmd_denoise,
    "eval": cmd_eval,
    "summary": cmd_summary,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    _apply_threads(argv)
    args = _build_parser().parse_args(argv)

    from .config import load_run_config
    from .errors import SpecDenoiseError

    try:
        cfg = load_run_config(args.config, seed_override=args.seed)
        return _COMMANDS[args.command](cfg, args)
    except SpecDenoiseError as exc:
        kind = {2: "config", 3: "data", 4: "numeric"}[getattr(exc, "exit_code", 3)]
        print(f"specdenoise: error[{kind}]: {exc}", file=sys.stderr)
        return getattr(exc, "exit_code", 3)


if __name__ == "__main__":
    raise SystemExit(main())
