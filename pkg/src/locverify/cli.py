"""Command-line entry point: ``locverify <command> [options]``."""

import argparse
import json
import logging
import sys
from dataclasses import asdict, replace
from pathlib import Path

from . import harness, io
from .channel import ChannelParams, generate_dataset
from .errors import InvalidParameterError
from .lrt import LrtDetector, evaluate_lrt
from .metrics import EMPIRICAL, compute_metrics
from .nn import TrainConfig, fit, predict

PROG = "locverify"


def _common_parser():
    # defaults are SUPPRESS so flags given before and after the subcommand merge
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="base random seed (default 1)")
    g.add_argument("--config", metavar="PATH", default=argparse.SUPPRESS,
                   help="JSON file with ExperimentConfig fields; flags override it")
    g.add_argument("--out", metavar="DIR", default=argparse.SUPPRESS,
                   help="output directory (default: results)")
    g.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS,
                   help="log progress to stderr")
    return p


def _experiment_options(p):
    g = p.add_argument_group("experiment options")
    g.add_argument("--scenario", help="bs4, bs6, or a scenario JSON file")
    g.add_argument("--sigma", type=float, help="thermal noise std in ns")
    g.add_argument("--bias", type=float, help="attacker common bias std in ns (default 0)")
    g.add_argument("--n-test", type=int, help="test-set size")
    g.add_argument("--max-seconds", type=int, help="length of the incremental training run")
    g.add_argument("--jobs", type=int, help="worker processes for independent cells")
    g.add_argument("--no-plots", action="store_true", help="write CSV files only")


def _train_options(p):
    g = p.add_argument_group("network training options")
    g.add_argument("--lr", type=float, help="gradient-descent learning rate")
    g.add_argument("--epochs", type=int, help="maximum training epochs")
    g.add_argument("--max-fail", type=int, help="consecutive validation failures before stopping")
    g.add_argument("--features", choices=["raw", "residual"], help="network input features")


def build_parser():
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog=PROG, parents=[common],
        description="Simulate ToA location claims and verify them with an LRT or a neural network.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    p = sub.add_parser("generate", parents=[common], help="write a simulated dataset CSV")
    _experiment_options(p)
    p.add_argument("--n", type=int, default=1000, help="number of samples (default 1000)")
    p.add_argument("--po", type=float, default=0.5, help="malicious fraction (default 0.5)")
    p.add_argument("--nlos", type=float, default=0.0, help="NLoS bias std in ns (default 0)")
    p.add_argument("--name", default="dataset.csv", help="output file name inside --out")

    p = sub.add_parser("eval-lrt", parents=[common], help="score the LRT verifier on a dataset CSV")
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--sigma", type=float, help="detector noise std in ns (default: dataset's)")
    p.add_argument("--threshold", type=float, default=1.0, help="likelihood-ratio threshold (default 1)")
    p.add_argument("--decisions", action="store_true",
                   help="also write the dataset with lrt_decision and undecidable_geometry columns")

    p = sub.add_parser("train-nn", parents=[common], help="train the network on a dataset CSV")
    p.add_argument("--data", required=True, help="training dataset CSV")
    p.add_argument("--test", help="optional dataset CSV to score the trained model on")
    p.add_argument("--model", default="model.json", help="model file name inside --out")
    _train_options(p)

    p = sub.add_parser("curve", parents=[common], help="one incremental-training learning curve")
    _experiment_options(p)
    _train_options(p)
    p.add_argument("--nlos", type=float, default=300.0, help="NLoS bias std in ns (default 300)")
    p.add_argument("--po-test", type=float, default=0.5, help="test-set malicious fraction (default 0.5)")

    for name, text in [("fig2", "NN curves vs NLoS level with LRT references"),
                       ("fig3", "NN curves vs test Po, NLoS 300 ns, 4 BSs"),
                       ("fig4", "NN curves vs test Po, NLoS 500 ns, 4 BSs"),
                       ("fig5", "NN curves vs test Po, NLoS 500 ns, 6 BSs"),
                       ("all", "every figure plus summary.csv")]:
        p = sub.add_parser(name, parents=[common], help=text)
        _experiment_options(p)
        _train_options(p)
        p.add_argument("--nlos", type=float, nargs="+", help="NLoS std list in ns (fig2)")
        p.add_argument("--po-test", type=float, nargs="+", help="test Po list (fig3-5)")
    return parser


def _train_overrides(args):
    mapping = {"lr": "learning_rate", "epochs": "max_epochs",
               "max_fail": "max_validation_failures", "features": "feature_mode"}
    return {dst: getattr(args, src) for src, dst in mapping.items() if getattr(args, src, None) is not None}


def resolve_config(args):
    cfg = harness.ExperimentConfig.from_file(args.config) if getattr(args, "config", None) else harness.ExperimentConfig()
    nlos = getattr(args, "nlos", None)
    po_test = getattr(args, "po_test", None)
    cfg = harness.with_overrides(
        cfg,
        seed=getattr(args, "seed", None),
        output_dir=getattr(args, "out", None),
        scenario=getattr(args, "scenario", None),
        thermal_noise_std_ns=getattr(args, "sigma", None),
        attacker_common_bias_std_ns=getattr(args, "bias", None),
        n_test=getattr(args, "n_test", None),
        max_seconds=getattr(args, "max_seconds", None),
        jobs=getattr(args, "jobs", None),
        nlos_std_ns=nlos if isinstance(nlos, list) else None,
        po_test=po_test if isinstance(po_test, list) else None,
    )
    if getattr(args, "no_plots", False):
        cfg = replace(cfg, plots=False)
    train = _train_overrides(args)
    if train:
        cfg = replace(cfg, train={**cfg.train, **train})
    harness.ExperimentConfig.__post_init__(cfg)
    return cfg


def cmd_generate(args, cfg):
    scenario = cfg.build_scenario()
    params = ChannelParams(cfg.thermal_noise_std_ns, args.nlos, cfg.attacker_common_bias_std_ns)
    data = generate_dataset(scenario, params, args.n, args.po, seed=cfg.seed)
    header = {"command": "generate", "n": args.n, "po": args.po, "nlos_std_ns": args.nlos,
              "seed": cfg.seed, "scenario": scenario.to_dict(),
              "thermal_noise_std_ns": cfg.thermal_noise_std_ns,
              "attacker_common_bias_std_ns": cfg.attacker_common_bias_std_ns}
    path = io.write_dataset(Path(cfg.output_dir) / args.name, data, header)
    print(f"wrote {path} ({data.n_legit} legitimate, {data.n_malicious} malicious)")


def cmd_eval_lrt(args, cfg):
    data = io.read_dataset(args.data)
    sigma = args.sigma if args.sigma is not None else data.params.thermal_noise_std
    det = LrtDetector(sigma, args.threshold)
    report, decisions, undecidable = evaluate_lrt(det, data)
    nlos = data.params.nlos_std
    po = data.malicious_fraction if data.malicious_fraction is not None else data.n_malicious / len(data)
    row = report.csv_row("lrt", data.n_bs, sigma, nlos, po)
    header = {"command": "eval-lrt", "data": str(args.data), "sigma_ns": sigma, "threshold": args.threshold}
    out = Path(cfg.output_dir)
    io.atomic_write(out / "lrt_metrics.csv", io.metrics_csv([row], header))
    if args.decisions:
        extra = {"lrt_decision": decisions.astype(int), "undecidable_geometry": undecidable.astype(int)}
        io.atomic_write(out / (Path(args.data).stem + "_lrt.csv"), io.dataset_csv(data, header, extra))
    print(io.CSV_HEADER)
    print(row)
    if undecidable.any():
        print(f"# {int(undecidable.sum())} sample(s) flagged undecidable_geometry", file=sys.stderr)


def cmd_train_nn(args, cfg):
    data = io.read_dataset(args.data)
    tcfg = TrainConfig(**{**cfg.train, "seed": cfg.seed})
    result = fit(data, tcfg)
    path = io.atomic_write(Path(cfg.output_dir) / args.model, result.model.to_json())
    train_rep = compute_metrics(predict(result.model, data), data.labels, EMPIRICAL)
    print(f"wrote {path}: {result.epochs_run} epochs, best epoch {result.best_epoch}, "
          f"training error {train_rep.total_error:.6f}")
    if args.test:
        test = io.read_dataset(args.test)
        rep = compute_metrics(predict(result.model, test), test.labels, EMPIRICAL)
        po = test.n_malicious / len(test)
        print(io.CSV_HEADER)
        print(rep.csv_row("nn", test.n_bs, test.params.thermal_noise_std, test.params.nlos_std, po))


def cmd_curve(args, cfg):
    cell = harness.run_cell(cfg, "curve", args.nlos, [args.po_test])
    curve = cell.curves[args.po_test]
    header = {"config": cfg.to_dict(), "command": "curve", "nlos_std_ns": args.nlos, "po_test": args.po_test}
    out = Path(cfg.output_dir)
    path = io.atomic_write(out / "curve.csv", io.curve_csv(curve, header))
    if cfg.plots:
        from .plotting import plot_po_curves

        plot_po_curves({args.po_test: curve}, cell.lrt.total_error, out / "curve.png")
    print(f"wrote {path}: plateau Total Error {curve.plateau():.6f}, LRT {cell.lrt.total_error:.6f}")


def _report(results):
    for res in results:
        for cell in res.cells:
            line = f"{res.figure} nlos={cell.nlos:g} n_bs={cell.n_bs}: LRT {cell.lrt.total_error:.4f}"
            plateaus = ", ".join(f"Po={po:g}: {c.plateau():.4f}" for po, c in cell.curves.items())
            print(f"{line}; NN plateau {plateaus}")


def cmd_figure(args, cfg):
    if args.command == "fig2":
        _report([harness.run_fig2(cfg)])
    elif args.command == "all":
        results, path = harness.run_all(cfg)
        _report(results)
        print(f"wrote {path}")
    else:
        _report([harness.run_po_figure(cfg, args.command)])
    print(f"outputs in {cfg.output_dir}")


COMMANDS = {
    "generate": cmd_generate,
    "eval-lrt": cmd_eval_lrt,
    "train-nn": cmd_train_nn,
    "curve": cmd_curve,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        COMMANDS.get(args.command, cmd_figure)(args, cfg)
    except (InvalidParameterError, ValueError, OSError, RuntimeError, json.JSONDecodeError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
