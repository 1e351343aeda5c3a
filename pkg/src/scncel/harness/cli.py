"""Command-line entry point: ``scncel <subcommand> ...``.

Exit codes: 0 success, 1 configuration or usage error, 2 data error,
3 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from ..ensemble import ScnCelModel, train_scn_cel
from ..oversampling import SAMPLERS, SamplerRequest, get_sampler
from ..scn import ScnConfig, ScnModel, train_scn
from ..signal_pipeline import WindowSpec, extract_cloud_features
from .config import ConfigError, DataError, load_config
from .datasets import load_csv_dataset, read_features_csv, write_features_csv, write_labels_csv
from .experiment import JOBS_ENV, compare_samplers, run_experiment
from .metrics import metrics

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_RUNTIME = 0, 1, 2, 3

log = logging.getLogger("scncel")


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which here means "data error"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _scn_args(p):
    p.add_argument("--t-max", type=int, default=100, help="candidates per weight scale (default 100)")
    p.add_argument("--l-max", type=int, default=150, help="hidden node budget (default 150)")
    p.add_argument("--tol", type=float, default=0.1, help="training RMSE tolerance (default 0.1)")


def _request_args(p, target_default=None):
    p.add_argument("--target", type=int, default=target_default, help="rows to generate per sampled class")
    p.add_argument("--classes", choices=("minority", "all"), default="minority",
                   help="which classes to sample (default: those smaller than the largest)")
    p.add_argument("--include-originals", action="store_true", help="keep the original rows of sampled classes")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scncel", description="Cloud-feature fault diagnosis with SCN ensembles.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", help="recording CSVs -> cloud feature CSV")
    p.add_argument("inputs", nargs="+", type=Path)
    p.add_argument("-o", "--output", type=Path, required=True)
    p.add_argument("--window", type=int, default=500)
    p.add_argument("--step", type=int, default=200)
    p.add_argument("--denoise", action="store_true")

    p = sub.add_parser("sample", help="feature CSV -> augmented feature CSV")
    p.add_argument("input", type=Path)
    p.add_argument("-o", "--output", type=Path, required=True)
    p.add_argument("--method", choices=SAMPLERS, default="cloud")
    _request_args(p, target_default=70)

    p = sub.add_parser("train", help="feature CSV -> model file")
    p.add_argument("input", type=Path)
    p.add_argument("-o", "--output", type=Path, required=True)
    p.add_argument("--kind", choices=("scn", "scn-cel"), default="scn-cel")
    p.add_argument("--members", type=int, default=6)
    p.add_argument("--method", choices=SAMPLERS, default="cloud", help="sampler for ensemble members")
    _request_args(p, target_default=70)
    _scn_args(p)

    p = sub.add_parser("predict", help="model + feature CSV -> labels CSV")
    p.add_argument("model", type=Path)
    p.add_argument("input", type=Path)
    p.add_argument("-o", "--output", type=Path, required=True)

    for name, text in (("experiment", "config file -> trial reports"),
                       ("compare", "config file + sampler list -> comparison report")):
        p = sub.add_parser(name, help=text)
        p.add_argument("config", type=Path)
        p.add_argument("--output", type=Path, help="override the config's output directory")
        p.add_argument("--trials", type=int, help="override the config's trial count")
        p.add_argument("--seed", type=int, help="override the config's base seed")
        p.add_argument("--jobs", type=int, help=f"parallel trials (default ${JOBS_ENV} or 1)")
        if name == "compare":
            p.add_argument("--samplers", default=",".join(SAMPLERS),
                           help="comma-separated sampler names (default: all)")
    return parser


def _request(args, data):
    counts = data.class_counts()
    if args.classes == "all":
        chosen = sorted(counts)
    else:
        top = max(counts.values())
        chosen = sorted(c for c, n in counts.items() if n < top)
    if not chosen:
        return None
    return SamplerRequest({c: args.target for c in chosen}, args.include_originals, args.seed)


def cmd_extract(args):
    recs = load_csv_dataset(args.inputs)
    try:
        fs = extract_cloud_features(recs, WindowSpec(args.window, args.step), denoise=args.denoise)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    write_features_csv(fs, args.output)
    log.info("wrote %d feature rows to %s", len(fs), args.output)


def cmd_sample(args):
    data = read_features_csv(args.input)
    req = _request(args, data)
    out = data if req is None else get_sampler(args.method)(data, req)
    write_features_csv(out, args.output)
    log.info("wrote %d rows to %s", len(out), args.output)


def cmd_train(args):
    data = read_features_csv(args.input)
    cfg = ScnConfig(t_max=args.t_max, l_max=args.l_max, tol=args.tol, seed=args.seed)
    if args.kind == "scn":
        model = train_scn(data, cfg)
        log.info("%d nodes, training accuracy %.4f", model.n_nodes, model.train_accuracy)
    else:
        req = _request(args, data)
        sampler = get_sampler(args.method)
        if req is None:
            # balanced input: members still draw their own cloud sets for every class
            req = SamplerRequest(args.target, args.include_originals, args.seed)
        model = train_scn_cel(data, args.members, req, cfg, sampler=sampler)
        log.info("%d members, nodes %s", model.k, [m.n_nodes for m in model.members])
    args.output.parent.mkdir(parents=True, exist_ok=True)
    args.output.write_text(model.dumps(), encoding="utf-8")


def load_model(path: Path):
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"{path}: cannot read model ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not a model file ({exc})") from None
    try:
        if doc.get("format") == "scncel.ensemble":
            return ScnCelModel.from_dict(doc)
        return ScnModel.from_dict(doc)
    except (KeyError, ValueError, AttributeError) as exc:
        raise DataError(f"{path}: {exc}") from None


def cmd_predict(args):
    model = load_model(args.model)
    data = read_features_csv(args.input, require_labels=False)
    try:
        pred = model.predict(data.features)
    except ValueError as exc:
        raise DataError(f"{args.input}: {exc}") from None
    with open(args.input, newline="", encoding="utf-8") as fh:
        has_labels = "label" in [h.strip() for h in next(csv.reader(fh))]
    true = data.labels if has_labels else None
    write_labels_csv(pred, args.output, true)
    if true is not None and len(true):
        m = max(model.n_classes, int(true.max()) + 1)
        log.info("accuracy %.4f", metrics(true, pred, m).accuracy)


def _experiment_config(args):
    cfg = load_config(args.config)
    changes = {}
    if args.output is not None:
        changes["output"] = str(args.output)
    if args.trials is not None:
        if args.trials < 1:
            raise ConfigError("--trials must be >= 1")
        changes["trials"] = args.trials
    if args.seed is not None:
        changes["seed"] = args.seed
    return replace(cfg, **changes)


def cmd_experiment(args):
    cfg = _experiment_config(args)
    report = run_experiment(cfg, jobs=args.jobs)
    s = report.summary()
    print(f"{cfg.name}: test accuracy {s['test_accuracy_mean']:.4f} "
          f"(var {s['test_accuracy_var']:.5f}) over {s['trials']} trials")
    if cfg.output:
        print(f"reports written to {cfg.output}")


def cmd_compare(args):
    cfg = _experiment_config(args)
    samplers = [s.strip() for s in args.samplers.split(",") if s.strip()]
    comp = compare_samplers(cfg, samplers, jobs=args.jobs)
    for row in comp.table():
        print(f"{row['sampler']:>10s}  test {row['test_accuracy_mean']:.4f}  var {row['test_accuracy_var']:.5f}"
              f"  nodes {row['mean_nodes']:.1f}")
    if cfg.output:
        print(f"comparison written to {cfg.output}")


COMMANDS = {
    "extract": cmd_extract, "sample": cmd_sample, "train": cmd_train, "predict": cmd_predict,
    "experiment": cmd_experiment, "compare": cmd_compare,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        log.debug("failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
