"""Command-line entry point: ``mccatch detect | synth | eval``.

Exit codes: 0 success, 2 input/parse error, 3 degenerate dataset,
4 configuration error. Failures print one line to stderr.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import evaluation, synth
from ._backend import set_num_threads
from .detect import write_histogram_tsv
from .errors import ConfigurationError, InputError, McCatchError
from .metric import DatasetHandle
from .score import DEFAULT_A, DEFAULT_B, DEFAULT_C_FRACTION, McCatchResult, run_mccatch

SCALING_SIZES = (10_000, 20_000, 40_000, 80_000, 160_000)


# ---------------------------------------------------------------- ingestion

def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def _as_id(s: str):
    s = s.strip()
    try:
        return int(s)
    except ValueError:
        return s


def read_vector_csv(path, p: float = 2.0) -> DatasetHandle:
    """Comma-separated rows of coordinates.

    A first row with any non-numeric cell is a header. If the header's first
    cell is ``id`` that column supplies element ids; otherwise ids are row
    numbers.
    """
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    if not rows:
        raise InputError(f"{path}: no data rows")
    ids = None
    if not all(_is_number(c) for c in rows[0]):
        header = [c.strip().lower() for c in rows.pop(0)]
        if header and header[0] == "id":
            ids = [_as_id(r[0]) for r in rows]
            rows = [r[1:] for r in rows]
    if not rows:
        raise InputError(f"{path}: header only, no data rows")
    width = len(rows[0])
    if width == 0:
        raise InputError(f"{path}: rows have no coordinates")
    for k, r in enumerate(rows):
        if len(r) != width:
            raise InputError(f"{path}: row {k + 1} has {len(r)} fields, expected {width}")
    try:
        X = np.array([[float(c) for c in r] for r in rows], dtype=np.float64)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    return DatasetHandle.from_vectors(X, p=p, labels=ids)


def read_strings(path) -> DatasetHandle:
    """One UTF-8 string per line; a trailing newline is not an extra element."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    words = text.split("\n")
    if words and words[-1] == "":
        words.pop()
    words = [w[:-1] if w.endswith("\r") else w for w in words]
    return DatasetHandle.from_strings(words)


def load_dataset(args) -> DatasetHandle:
    if args.kind == "strings-lines":
        if args.lp is not None:
            raise ConfigurationError("--lp applies to vector input only; strings use edit distance")
        return read_strings(args.input)
    p = 2.0 if args.lp is None else args.lp
    if not p >= 1:
        raise ConfigurationError(f"--lp must be >= 1 (or inf), got {p}")
    return read_vector_csv(args.input, p=p)


# ---------------------------------------------------------------- outputs

def _num(v: float) -> str:
    return f"{float(v):.17g}"


def _json_id(v) -> str:
    return json.dumps(v if isinstance(v, str) else int(v))


def write_microclusters_json(result: McCatchResult, data: DatasetHandle, path) -> None:
    """Fixed keys: ``n``, ``cutoff`` and the ranked ``microclusters`` list."""
    lines = ["{", f'  "n": {data.n},', f'  "cutoff": {_num(result.cutoff)},', '  "microclusters": [']
    items = []
    for rank, mc in enumerate(result.microclusters, 1):
        members = ", ".join(_json_id(data.label(int(i))) for i in mc.members)
        items.append(f'    {{"rank": {rank}, "score": {_num(mc.score)}, "cardinality": {mc.cardinality}, '
                     f'"bridge_length": {_num(mc.bridge_length)}, "members": [{members}]}}')
    lines.append(",\n".join(items))
    lines += ["  ]", "}"]
    text = "\n".join(l for l in lines if l) + "\n"
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def write_point_scores_csv(result: McCatchResult, data: DatasetHandle, path) -> None:
    ranks = result.rank_of_point()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("id,w,microcluster_rank\n")
        for i in range(data.n):
            fh.write(f"{data.label(i)},{_num(result.point_scores[i])},{int(ranks[i])}\n")


def write_cutoff_txt(result: McCatchResult, path) -> None:
    s = result.schedule
    Path(path).write_text(
        f"d\t{_num(result.cutoff)}\nr_1\t{_num(s.r1)}\na\t{result.a}\nb\t{_num(result.b)}\n"
        f"c\t{result.c}\nl\t{_num(s.diameter)}\n", encoding="utf-8", newline="\n")


def write_outputs(result: McCatchResult, data: DatasetHandle, out) -> None:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    write_microclusters_json(result, data, out / "microclusters.json")
    write_point_scores_csv(result, data, out / "point_scores.csv")
    result.plot.to_tsv(out / "oracle_plot.tsv", data.labels)
    write_histogram_tsv(result.histogram, result.schedule, out / "histogram.tsv")
    write_cutoff_txt(result, out / "cutoff.txt")


# ---------------------------------------------------------------- commands

def cmd_detect(args) -> int:
    set_num_threads(args.threads)
    if not 0 < args.max_mc_fraction <= 1:
        raise ConfigurationError(f"--max-mc-fraction must be in (0, 1], got {args.max_mc_fraction}")
    data = load_dataset(args)
    result = run_mccatch(data, a=args.radii, b=args.slope, c_fraction=args.max_mc_fraction)
    write_outputs(result, data, args.out)
    print(f"{data.n} elements, cutoff {result.cutoff:.6g}, {len(result.microclusters)} microclusters "
          f"-> {args.out}")
    return 0


def cmd_synth(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.what == "axiom":
        spec = synth.AxiomScenario.default(args.axiom, args.shape, args.seed, args.n_inliers)
        data, labels = synth.generate_axiom_scenario(spec)
        synth.write_labels_csv(labels, out / "labels.csv")
    elif args.what == "cloud":
        data = synth.generate_cloud(synth.CloudSpec(args.kind, args.dim, args.count, args.seed))
    else:
        data, labels = synth.planted_outlier_corpus(args.seed, n_inliers=args.n_inliers)
        synth.write_labels_csv(labels, out / "labels.csv", names=("inlier", "outlier"))
    synth.write_vectors_csv(data, out / "dataset.csv")
    print(f"wrote {data.n} points to {out}")
    return 0


def _read_labels(path) -> dict:
    with open(path, encoding="utf-8", newline="") as fh:
        return {_as_id(r["id"]): r["label"].strip() for r in csv.DictReader(fh)}


def cmd_eval(args) -> int:
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    if args.what == "axioms":
        rows = []
        print("axiom\tshape\twins\ttrials\twin_rate")
        for axiom in synth.AXIOMS:
            for shape in synth.SHAPES:
                runs = evaluation.axiom_trials(axiom, shape, args.trials, args.seed, args.n_inliers)
                rows += runs
                wins = sum(t.win for t in runs)
                print(f"{axiom}\t{shape}\t{wins}\t{len(runs)}\t{wins / len(runs):.3f}")
        if out:
            evaluation.write_axiom_tsv(rows, out / "axioms.tsv")
    elif args.what == "scaling":
        report = evaluation.scaling_exponent(args.kind, args.dim, args.sizes, args.seed, args.repeats)
        for n, sec in zip(report.sizes, report.seconds):
            print(f"{n}\t{sec:.4g}s")
        print(f"slope {report.slope:.4f} (expected {report.expected:.4f})")
        if out:
            report.to_tsv(out / f"scaling_{args.kind}_{args.dim}d.tsv")
    else:
        truth = _read_labels(args.labels)
        with open(args.scores, encoding="utf-8", newline="") as fh:
            rows = list(csv.DictReader(fh))
        try:
            scores = [float(r["w"]) for r in rows]
            labels = [truth[_as_id(r["id"])] not in ("inlier", "0") for r in rows]
        except KeyError as exc:
            raise InputError(f"scores and labels disagree on ids or columns: {exc}") from None
        print(f"AUROC\t{evaluation.auroc(scores, labels):.6f}")
        print(f"AP\t{evaluation.average_precision(scores, labels):.6f}")
        print(f"MaxF1\t{evaluation.max_f1(scores, labels):.6f}")
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mccatch", description="Microcluster outlier detection.")
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("detect", help="detect and score microclusters in a dataset")
    d.add_argument("--input", required=True)
    d.add_argument("--kind", choices=("vector-csv", "strings-lines"), default="vector-csv")
    d.add_argument("--lp", type=float, default=None, help="Minkowski exponent for vectors (default 2)")
    d.add_argument("--radii", type=int, default=DEFAULT_A, help="number of radii a")
    d.add_argument("--slope", type=float, default=DEFAULT_B, help="maximum plateau slope b")
    d.add_argument("--max-mc-fraction", type=float, default=DEFAULT_C_FRACTION,
                   help="maximum microcluster cardinality as a fraction of n")
    d.add_argument("--out", required=True)
    d.add_argument("--threads", type=int, default=0, help="worker threads, 0 = all")
    d.add_argument("--seed", type=int, default=0, help="unused; the detector is deterministic")
    d.set_defaults(func=cmd_detect)

    s = sub.add_parser("synth", help="generate seeded datasets")
    ss = s.add_subparsers(dest="what", required=True)
    sa = ss.add_parser("axiom")
    sa.add_argument("--axiom", choices=synth.AXIOMS, default="isolation")
    sa.add_argument("--shape", choices=synth.SHAPES, default="gaussian")
    sa.add_argument("--n-inliers", type=int, default=10_000)
    sc = ss.add_parser("cloud")
    sc.add_argument("--kind", choices=("uniform", "diagonal"), default="uniform")
    sc.add_argument("--dim", type=int, default=2)
    sc.add_argument("--count", type=int, default=10_000)
    sp = ss.add_parser("planted")
    sp.add_argument("--n-inliers", type=int, default=10_000)
    for p in (sa, sc, sp):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)

    e = sub.add_parser("eval", help="axiom win rates, scaling slopes, ranking metrics")
    es = e.add_subparsers(dest="what", required=True)
    ea = es.add_parser("axioms")
    ea.add_argument("--trials", type=int, default=50)
    ea.add_argument("--n-inliers", type=int, default=10_000)
    ek = es.add_parser("scaling")
    ek.add_argument("--kind", choices=("uniform", "diagonal"), default="uniform")
    ek.add_argument("--dim", type=int, default=2)
    ek.add_argument("--sizes", type=int, nargs="+", default=list(SCALING_SIZES))
    ek.add_argument("--repeats", type=int, default=3)
    em = es.add_parser("metrics", help="AUROC, AP and Max-F1 of point_scores.csv against labels")
    em.add_argument("--scores", required=True)
    em.add_argument("--labels", required=True)
    for p in (ea, ek, em):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None)
    e.set_defaults(func=cmd_eval)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except McCatchError as exc:
        print(f"mccatch: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"mccatch: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
