"""Command-line entry point: dataset generation, two-stage training, streaming
adaptation + evaluation, head/tail splits, and the alpha sweep.

Every subcommand writes its outputs into a run directory together with a
manifest recording the exact configuration, so a run is reproducible from the
manifest and seed alone.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import data as data_mod
from . import doda, metrics, nn
from .errors import (
    ConfigError,
    EnergyOverflowError,
    InsufficientDataError,
    InvalidInputError,
    LogitFileError,
    ShapeError,
    TrainingDivergedError,
    UndefinedMetricError,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

DATASET_FILES = {
    data_mod.ID_TRAIN: "id_train.csv",
    data_mod.ID_TEST: "id_test.csv",
    data_mod.OUTLIER: "outlier.csv",
    data_mod.TRUE_OOD: "true_ood.csv",
}


# ---------------------------------------------------------------------------
# shared pipeline pieces
# ---------------------------------------------------------------------------


def load_datasets(data_dir):
    data_dir = Path(data_dir)
    return {
        tag: data_mod.read_sample_set(data_dir / fname, tag)
        for tag, fname in DATASET_FILES.items()
    }


def build_stream(id_test: data_mod.SampleSet, true_ood: data_mod.SampleSet,
                 ood_fraction: float, seed: int):
    """Interleave ID-test and true-OOD samples by a seeded shuffle.

    Returns (features, is_ood flags, class labels) in stream order. The OOD
    count is chosen to hit ood_fraction given all ID samples, capped by what is
    available.
    """
    if not 0.0 < ood_fraction < 1.0:
        raise ConfigError("ood_fraction must lie strictly between 0 and 1")
    n_id = id_test.n
    n_ood = min(true_ood.n, round(n_id * ood_fraction / (1.0 - ood_fraction)))
    if n_ood < 1:
        raise ConfigError("stream would contain no OOD samples")
    feats = np.vstack([id_test.features, true_ood.features[:n_ood]])
    labels = np.concatenate([id_test.labels, np.full(n_ood, -1)])
    is_ood = np.concatenate([np.zeros(n_id, bool), np.ones(n_ood, bool)])
    order = np.random.default_rng(seed).permutation(feats.shape[0])
    return feats[order], is_ood[order], labels[order]


def scored_samples(stream_logits, stream_scores, is_ood, labels):
    out = []
    for logits, score, ood, lbl in zip(stream_logits, stream_scores, is_ood, labels):
        out.append(
            metrics.ScoredSample(
                score=float(score),
                is_id=not ood,
                predicted_class=int(np.argmax(logits)),
                true_class=int(lbl) if lbl >= 0 else None,
            )
        )
    return out


def evaluate_modes(model, datasets, *, alpha=doda.DEFAULT_ALPHA, virtual_count=1,
                   ood_fraction=0.5, seed=0, oracle_fractions=(), record_events=False):
    """Run the no-TTA / DODA / oracle / sweep modes over one seeded stream.

    Returns a dict of mode name -> {"report": MetricReport, "scores": [...]},
    plus the stream arrays under "_stream". Sweep runs share the per-sample
    uniform draws across fractions (common random numbers) so differences come
    from the labeled fraction alone.
    """
    train_logits = model.forward(datasets[data_mod.ID_TRAIN].features)
    stats = doda.fit_energy_stats(train_logits, alpha=alpha)
    outlier_logits = model.forward(datasets[data_mod.OUTLIER].features)
    p0 = doda.init_outlier_distribution(outlier_logits, virtual_count=virtual_count)

    feats, is_ood, labels = build_stream(
        datasets[data_mod.ID_TEST], datasets[data_mod.TRUE_OOD], ood_fraction, seed
    )
    stream_logits = model.forward(feats)

    results = {"_stream": {"is_ood": is_ood, "labels": labels, "logits": stream_logits,
                           "stats": stats, "p0": p0}}

    def run(mode_name, **kwargs):
        scores, events, final_state = doda.run_stream(
            kwargs.pop("state", p0), stats, stream_logits,
            record_events=record_events, **kwargs
        )
        samples = scored_samples(stream_logits, scores, is_ood, labels)
        results[mode_name] = {
            "report": metrics.metric_report(samples, with_acc=True),
            "scores": scores,
            "events": events,
            "final_state": final_state,
        }

    zero_state = doda.OutlierDistribution(values=np.zeros(p0.k), m=0)
    run("uncalibrated", state=zero_state, freeze=True)
    run("no_tta", freeze=True)
    run("doda")
    run("oracle", oracle_labels=is_ood, use_label_probability=1.0,
        rng=np.random.default_rng(seed))
    for frac in oracle_fractions:
        if frac == 0.0:
            run(f"sweep_{frac:g}")
        else:
            run(f"sweep_{frac:g}", oracle_labels=is_ood, use_label_probability=float(frac),
                rng=np.random.default_rng(seed))
    return results


def head_tail_reports(model, datasets, *, head_classes=None, alpha=doda.DEFAULT_ALPHA,
                      virtual_count=1, ood_fraction=0.5, seed=0, mode="doda"):
    """Evaluate twice with ID restricted to the head half, then the tail half.

    Returns {"head": MetricReport, "tail": MetricReport}. Classes are ordered
    by training frequency, so the head half is the first half of class indices.
    """
    id_test = datasets[data_mod.ID_TEST]
    k = int(id_test.labels.max()) + 1
    if head_classes is None:
        head_classes = set(range(k // 2))
    reports = {}
    for name, keep in (("head", head_classes), ("tail", set(range(k)) - set(head_classes))):
        mask = np.isin(id_test.labels, sorted(keep))
        if not mask.any():
            raise UndefinedMetricError(f"no ID samples left in the {name} subset")
        subset = data_mod.SampleSet(id_test.features[mask], id_test.labels[mask],
                                    data_mod.ID_TEST)
        sub_datasets = dict(datasets)
        sub_datasets[data_mod.ID_TEST] = subset
        res = evaluate_modes(model, sub_datasets, alpha=alpha, virtual_count=virtual_count,
                             ood_fraction=ood_fraction, seed=seed)
        key = {"doda": "doda", "frozen": "no_tta", "uncalibrated": "uncalibrated",
               "oracle": "oracle"}[mode]
        reports[name] = res[key]["report"]
    return reports


def train_models(datasets, *, seed, hidden=(32,), epochs_pretrain=15, epochs_finetune=10,
                 lr_pretrain=0.1, lr_finetune=0.005, b_in=64, b_out=128, momentum=0.9,
                 ce_only=False, finetune_all_layers=False, dne_weight=1.0):
    """Initialize and train a model on the generated task. Returns (model, log)."""
    id_train = datasets[data_mod.ID_TRAIN]
    k = int(id_train.labels.max()) + 1
    d = id_train.features.shape[1]
    model = nn.Mlp.init([d, *hidden, k], seed)
    cfg = nn.TrainConfig(
        seed=seed,
        epochs_pretrain=epochs_pretrain,
        epochs_finetune=0 if ce_only else epochs_finetune,
        lr_pretrain=lr_pretrain,
        lr_finetune=lr_finetune,
        b_in=b_in,
        b_out=b_out,
        momentum=momentum,
        finetune_all_layers=finetune_all_layers,
        dne_weight=dne_weight,
    )
    return nn.train(model, id_train.features, id_train.labels,
                    datasets[data_mod.OUTLIER].features, cfg)


def benchmark_datasets(seed: int, *, k=10, n_max=300, rho=100.0, d=8, class_scale=0.6,
                       class_radius=4.0, n_test_per_class=40, n_out=600, n_ood=600,
                       shift=2.5, head_tilt=0.7, max_cosine=0.6,
                       shell_gap=2.0, shell_width=3.0):
    """Build the default synthetic long-tailed benchmark for one seed.

    The class means sit on the coordinate axes, so only the sampling noise
    varies with the seed. Auxiliary outliers cover a shell around the ID
    region except for a cone around the novel direction; the true-OOD cloud
    lives inside that cone, leaning toward the head class. The lean gives the
    OOD samples head-class-like logits that the adapted outlier distribution
    can learn to discount, while the frozen one cannot.
    """
    means = data_mod.axis_aligned_means(k, d, class_radius)
    spec = data_mod.LongTailSpec(k=k, n_max=n_max, rho=rho, d=d, seed=seed,
                                 class_scale=class_scale, class_means=means)
    id_train, id_test = data_mod.generate_long_tailed(spec, n_test_per_class)
    u = data_mod.novel_direction(d, head_tilt)
    datasets = {
        data_mod.ID_TRAIN: id_train,
        data_mod.ID_TEST: id_test,
        data_mod.OUTLIER: data_mod.generate_outliers(
            spec, n_out, avoid_direction=u, max_cosine=max_cosine,
            shell_gap=shell_gap, shell_width=shell_width),
        data_mod.TRUE_OOD: data_mod.generate_true_ood(spec, n_ood, shift, direction=u),
    }
    return spec, datasets


BENCHMARK_TRAIN = dict(lr_pretrain=0.1, epochs_pretrain=30, lr_finetune=0.005,
                       epochs_finetune=10)
BENCHMARK_VIRTUAL_COUNT = 64


def desk_benchmark(seed: int, *, oracle_fractions=(0.0, 0.25, 0.5, 0.75, 1.0),
                   **dataset_kwargs):
    """One seed of the default synthetic long-tailed benchmark.

    Trains a CE-only model and a DNE fine-tuned model from the same
    initialization, then evaluates all adaptation modes and the head/tail
    split. The streaming modes use a large virtual count so the adapted
    distribution blends gradually from its initialization toward the test
    outlier statistics as more samples are accepted.
    """
    _, datasets = benchmark_datasets(seed, **dataset_kwargs)
    ce_model, _ = train_models(datasets, seed=seed, ce_only=True, **BENCHMARK_TRAIN)
    dne_model, dne_log = train_models(datasets, seed=seed, **BENCHMARK_TRAIN)

    res = evaluate_modes(dne_model, datasets, seed=seed, oracle_fractions=oracle_fractions,
                         virtual_count=BENCHMARK_VIRTUAL_COUNT)
    out = {
        "auroc": {m: res[m]["report"].auroc for m in ("uncalibrated", "no_tta", "doda", "oracle")},
        "sweep": [(f, res[f"sweep_{f:g}"]["report"].auroc) for f in oracle_fractions],
        "train_log": dne_log,
    }
    for name, model in (("ce", ce_model), ("dne", dne_model)):
        ht = head_tail_reports(model, datasets, seed=seed, mode="oracle",
                               virtual_count=BENCHMARK_VIRTUAL_COUNT)
        out[f"headtail_{name}"] = (ht["head"].auroc, ht["tail"].auroc)
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _write_manifest(out_dir: Path, command: str, params: dict) -> None:
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump({"command": command, "params": params}, fh, sort_keys=True, indent=2)
        fh.write("\n")


def cmd_generate(ns) -> int:
    out_dir = Path(ns.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    spec, sets = benchmark_datasets(
        ns.seed, k=ns.k, n_max=ns.n_max, rho=ns.rho, d=ns.d,
        class_scale=ns.class_scale, n_test_per_class=ns.n_test_per_class,
        n_out=ns.n_out, n_ood=ns.n_ood, shift=ns.shift, head_tilt=ns.head_tilt,
    )
    for tag, sample_set in sets.items():
        data_mod.write_sample_set(out_dir / DATASET_FILES[tag], sample_set)
    _write_manifest(out_dir, "generate", {
        "k": ns.k, "n_max": ns.n_max, "rho": ns.rho, "d": ns.d, "seed": ns.seed,
        "class_scale": ns.class_scale, "n_test_per_class": ns.n_test_per_class,
        "n_out": ns.n_out, "n_ood": ns.n_ood, "shift": ns.shift,
        "head_tilt": ns.head_tilt, "class_counts": data_mod.class_counts(spec),
    })
    return EXIT_OK


def cmd_train(ns) -> int:
    out_dir = Path(ns.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    datasets = load_datasets(ns.data)
    model, log = train_models(
        datasets, seed=ns.seed, hidden=tuple(ns.hidden), epochs_pretrain=ns.epochs_pretrain,
        epochs_finetune=ns.epochs_finetune, lr_pretrain=ns.lr_pretrain,
        lr_finetune=ns.lr_finetune, b_in=ns.b_in, b_out=ns.b_out, momentum=ns.momentum,
        ce_only=ns.ce_only, finetune_all_layers=ns.finetune_all_layers,
    )
    stage = "pretrain" if (ns.ce_only or ns.epochs_finetune == 0) else "finetune"
    nn.save_checkpoint(out_dir / "checkpoint.json", model, ns.seed, stage)
    with open(out_dir / "loss_log.csv", "w") as fh:
        fh.write("epoch,total,ce,dne_c,dne_s\n")
        for i, row in enumerate(log):
            fh.write(f"{i},{row.total!r},{row.ce!r},{row.dne_c!r},{row.dne_s!r}\n")
    _write_manifest(out_dir, "train", {
        "data": str(ns.data), "seed": ns.seed, "hidden": list(ns.hidden),
        "epochs_pretrain": ns.epochs_pretrain, "epochs_finetune": ns.epochs_finetune,
        "lr_pretrain": ns.lr_pretrain, "lr_finetune": ns.lr_finetune,
        "b_in": ns.b_in, "b_out": ns.b_out, "momentum": ns.momentum,
        "ce_only": ns.ce_only, "finetune_all_layers": ns.finetune_all_layers,
    })
    return EXIT_OK


def _load_model_for_data(ns, datasets):
    model, _, _ = nn.load_checkpoint(ns.model)
    k_data = int(datasets[data_mod.ID_TRAIN].labels.max()) + 1
    if model.layer_dims[-1] != k_data:
        raise ConfigError(
            f"checkpoint k={model.layer_dims[-1]} does not match dataset k={k_data}"
        )
    if model.layer_dims[0] != datasets[data_mod.ID_TRAIN].features.shape[1]:
        raise ConfigError("checkpoint input dim does not match dataset feature dim")
    return model


def _write_histograms(out_dir: Path, model, datasets, doda_result) -> None:
    """50-bin histograms of global energy for the ID-test, outlier, and true-OOD
    populations, plus calibrated (adapted) scores of the evaluation stream."""
    populations = {
        "id_test": [doda.global_energy(r) for r in model.forward(datasets[data_mod.ID_TEST].features)],
        "outlier": [doda.global_energy(r) for r in model.forward(datasets[data_mod.OUTLIER].features)],
        "true_ood": [doda.global_energy(r) for r in model.forward(datasets[data_mod.TRUE_OOD].features)],
        "adapted_scores": list(doda_result["scores"]),
    }
    pooled = np.concatenate([np.asarray(v) for v in populations.values()])
    edges = np.linspace(pooled.min(), pooled.max(), 51)
    counts = {name: np.histogram(vals, bins=edges)[0] for name, vals in populations.items()}
    with open(out_dir / "energy_hist.csv", "w") as fh:
        fh.write("bin_lo,bin_hi," + ",".join(counts) + "\n")
        for i in range(50):
            row = [repr(float(edges[i])), repr(float(edges[i + 1]))]
            row += [str(int(counts[name][i])) for name in counts]
            fh.write(",".join(row) + "\n")
    _write_hist_svg(out_dir / "energy_hist.svg", edges, counts)


def _write_hist_svg(path, edges, counts) -> None:
    width, height, pad = 640, 360, 30
    series = list(counts)
    palette = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"]
    max_count = max(1, max(int(c.max()) for c in counts.values()))
    n_bins = len(edges) - 1
    bar_w = (width - 2 * pad) / (n_bins * len(series))
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">']
    for si, name in enumerate(series):
        color = palette[si % len(palette)]
        for b in range(n_bins):
            h = (height - 2 * pad) * int(counts[name][b]) / max_count
            x = pad + (b * len(series) + si) * bar_w
            y = height - pad - h
            parts.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{bar_w:.2f}" height="{h:.2f}" '
                f'fill="{color}" fill-opacity="0.7"><title>{name}</title></rect>'
            )
        parts.append(
            f'<text x="{pad + 4}" y="{pad + 14 * (si + 1)}" fill="{color}" '
            f'font-size="12">{name}</text>'
        )
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def cmd_adapt_eval(ns) -> int:
    out_dir = Path(ns.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    datasets = load_datasets(ns.data)
    model = _load_model_for_data(ns, datasets)
    fractions = _parse_grid(ns.oracle_fractions)
    results = evaluate_modes(
        model, datasets, alpha=ns.alpha, virtual_count=ns.virtual_count,
        ood_fraction=ns.ood_fraction, seed=ns.seed, oracle_fractions=fractions,
        record_events=ns.events,
    )
    payload = {}
    for mode, res in results.items():
        if mode.startswith("_"):
            continue
        payload[mode] = json.loads(res["report"].to_json())
    with open(out_dir / "metrics.json", "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    if ns.events:
        with open(out_dir / "events.csv", "w") as fh:
            fh.write("sample_index,accepted,global_energy,calibrated_score\n")
            for ev in results["doda"]["events"]:
                fh.write(f"{ev.sample_index},{int(ev.accepted)},"
                         f"{ev.global_energy!r},{ev.calibrated_score!r}\n")
    _write_histograms(out_dir, model, datasets, results["doda"])
    doda.save_state(out_dir / "adapter_state.json",
                    results["doda"]["final_state"], results["_stream"]["stats"])
    _write_manifest(out_dir, "adapt-eval", {
        "data": str(ns.data), "model": str(ns.model), "alpha": ns.alpha,
        "virtual_count": ns.virtual_count, "ood_fraction": ns.ood_fraction,
        "seed": ns.seed, "oracle_fractions": fractions, "events": ns.events,
    })
    return EXIT_OK


def cmd_headtail(ns) -> int:
    out_dir = Path(ns.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    datasets = load_datasets(ns.data)
    model = _load_model_for_data(ns, datasets)
    reports = head_tail_reports(
        model, datasets, alpha=ns.alpha, virtual_count=ns.virtual_count,
        ood_fraction=ns.ood_fraction, seed=ns.seed, mode=ns.mode,
    )
    payload = {name: json.loads(rep.to_json()) for name, rep in reports.items()}
    with open(out_dir / "head_tail.json", "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    _write_manifest(out_dir, "head-tail", {
        "data": str(ns.data), "model": str(ns.model), "alpha": ns.alpha,
        "virtual_count": ns.virtual_count, "ood_fraction": ns.ood_fraction,
        "seed": ns.seed, "mode": ns.mode,
    })
    return EXIT_OK


def cmd_alpha_sweep(ns) -> int:
    out_dir = Path(ns.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    datasets = load_datasets(ns.data)
    model = _load_model_for_data(ns, datasets)
    alphas = _parse_grid(ns.alphas)
    if not alphas:
        raise ConfigError("alpha grid is empty")
    rows = []
    for alpha in alphas:
        res = evaluate_modes(model, datasets, alpha=alpha, virtual_count=ns.virtual_count,
                             ood_fraction=ns.ood_fraction, seed=ns.seed)
        rows.append((alpha, res["doda"]["report"].auroc))
    with open(out_dir / "alpha_sweep.csv", "w") as fh:
        fh.write("alpha,auroc\n")
        for alpha, auc in rows:
            fh.write(f"{alpha!r},{auc!r}\n")
    _write_manifest(out_dir, "alpha-sweep", {
        "data": str(ns.data), "model": str(ns.model), "alphas": alphas,
        "virtual_count": ns.virtual_count, "ood_fraction": ns.ood_fraction, "seed": ns.seed,
    })
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing / dispatch
# ---------------------------------------------------------------------------


def _parse_grid(value) -> list[float]:
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    value = value.strip()
    if not value:
        return []
    try:
        return [float(v) for v in value.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad numeric grid {value!r}") from exc


def _add_eval_args(p):
    p.add_argument("--data", required=True, help="directory produced by `generate`")
    p.add_argument("--model", required=True, help="checkpoint.json from `train`")
    p.add_argument("--out", required=True, help="output run directory")
    p.add_argument("--alpha", type=float, default=doda.DEFAULT_ALPHA)
    p.add_argument("--virtual-count", type=int, default=1)
    p.add_argument("--ood-fraction", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adaptod")
    parser.add_argument("--config", help="JSON file with default values for the flags")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic long-tailed benchmark")
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--n-max", type=int, default=300)
    p.add_argument("--rho", type=float, default=100.0)
    p.add_argument("--d", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--class-scale", type=float, default=0.6)
    p.add_argument("--n-test-per-class", type=int, default=40)
    p.add_argument("--n-out", type=int, default=600)
    p.add_argument("--n-ood", type=int, default=600)
    p.add_argument("--shift", type=float, default=2.5)
    p.add_argument("--head-tilt", type=float, default=0.7)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="two-stage training on a generated benchmark")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hidden", type=int, nargs="*", default=[32])
    p.add_argument("--epochs-pretrain", type=int, default=30)
    p.add_argument("--epochs-finetune", type=int, default=10)
    p.add_argument("--lr-pretrain", type=float, default=0.1)
    p.add_argument("--lr-finetune", type=float, default=0.005)
    p.add_argument("--b-in", type=int, default=64)
    p.add_argument("--b-out", type=int, default=128)
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("--ce-only", action="store_true")
    p.add_argument("--finetune-all-layers", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("adapt-eval", help="streaming adaptation + metric report")
    _add_eval_args(p)
    p.add_argument("--oracle-fractions", default="0,0.25,0.5,0.75,1.0")
    p.add_argument("--events", action="store_true", help="also write the event log")
    p.set_defaults(func=cmd_adapt_eval)

    p = sub.add_parser("head-tail", help="evaluate against head and tail classes separately")
    _add_eval_args(p)
    p.add_argument("--mode", choices=["doda", "frozen", "uncalibrated"], default="doda")
    p.set_defaults(func=cmd_headtail)

    p = sub.add_parser("alpha-sweep", help="AUROC across the Z-score alpha grid")
    _add_eval_args(p)
    p.add_argument("--alphas", default="2.0,2.5,3.0,3.5,4.0")
    p.set_defaults(func=cmd_alpha_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    if args.config:
        try:
            with open(args.config) as fh:
                defaults = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        for key, value in defaults.items():
            attr = key.replace("-", "_")
            if hasattr(args, attr):
                setattr(args, attr, value)
    try:
        return args.func(args)
    except (ConfigError, InvalidInputError, ShapeError, InsufficientDataError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (LogitFileError, UndefinedMetricError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (EnergyOverflowError, TrainingDivergedError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
