"""Batch command-line interface.

Commands: train, predict, evaluate, sample, split, agree, synth,
validate.  Global flags ``--seed``, ``--threads`` and ``--deterministic``
come before the command.  Exit codes: 2 for usage errors, 3 for data
errors (unreadable or invalid inputs), 1 for internal failures.  Outputs
are written atomically (temp file + rename); all file I/O is UTF-8.
"""

from __future__ import annotations

import dataclasses
import json
import sys

import click

from .datagen import CorpusSpec, generate_corpus, uniform_tree_codes
from .documents import document_to_record, read_documents, read_jsonl
from .errors import DataError, HiertaxError, ModelFormatError
from .estimators import estimate, top_k, train_bottom_up, train_top_down
from .features import fit_vocabulary
from .hierarchy import ClassCode, build_hierarchy, load_hierarchy, save_hierarchy
from .linear import TrainConfig
from .metrics import CoderTable, agreement_rate, cohens_kappa
from .persist import atomic_write_text, load_estimator, save_estimator
from .reporting import evaluation_report
from .sampling import (
    by_char_bin,
    by_code,
    by_source,
    composite_key,
    sample_manifest,
    stratified_sample,
    train_test_split,
)

EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_DATA = 3


@dataclasses.dataclass
class RunContext:
    seed: int
    threads: int
    deterministic: bool


def _parse_ints(text: str, what: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise click.UsageError(f"{what} must be comma-separated integers, got {text!r}")
    if not values:
        raise click.UsageError(f"{what} must not be empty")
    return values


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _run_guarded(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (DataError, ModelFormatError) as exc:
        _fail(EXIT_DATA, str(exc))
    except HiertaxError as exc:
        _fail(EXIT_INTERNAL, str(exc))
    except click.ClickException:
        raise
    except Exception as exc:  # noqa: BLE001 - report, then non-zero exit
        _fail(EXIT_INTERNAL, f"{type(exc).__name__}: {exc}")


def _write_json(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2)
    if path:
        atomic_write_text(path, text + "\n")
    else:
        click.echo(text)


def _write_jsonl_atomic(rows, path: str) -> None:
    text = "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows)
    atomic_write_text(path, text)


@click.group()
@click.option("--seed", type=int, default=0, show_default=True, help="Global random seed.")
@click.option("--threads", type=int, default=1, show_default=True,
              help="Worker threads for prediction/evaluation sharding.")
@click.option("--deterministic/--no-deterministic", default=True, show_default=True,
              help="Keep all numeric results reproducible for a fixed seed.")
@click.pass_context
def cli(ctx: click.Context, seed: int, threads: int, deterministic: bool) -> None:
    """Hierarchical occupation-code classification toolkit."""
    ctx.obj = RunContext(seed=seed, threads=threads, deterministic=deterministic)


def main(argv=None) -> int:
    return cli.main(args=argv, standalone_mode=True)


# -- train ----------------------------------------------------------------


@cli.command()
@click.option("--mode", type=click.Choice(["bottom_up", "top_down"]), required=True)
@click.option("--hierarchy", "hierarchy_path", required=True, help="Leaf codes file.")
@click.option("--segments", required=True, help="Per-level segment widths, e.g. 1,1,1,1,2.")
@click.option("--data", "data_path", required=True, help="Training documents (JSONL).")
@click.option("--out", "out_path", required=True, help="Model output path (.htax).")
@click.option("--min-df", type=int, default=2, show_default=True)
@click.option("--lr", type=float, default=1e-3, show_default=True)
@click.option("--weight-decay", type=float, default=0.01, show_default=True)
@click.option("--epochs", type=int, default=10, show_default=True)
@click.option("--batch-size", type=int, default=32, show_default=True)
@click.option("--warmup-steps", type=int, default=50, show_default=True)
@click.pass_obj
def train(run: RunContext, mode, hierarchy_path, segments, data_path, out_path,
          min_df, lr, weight_decay, epochs, batch_size, warmup_steps) -> None:
    """Fit TF-IDF and train a hierarchical estimator."""
    segment_lengths = _parse_ints(segments, "--segments")

    def body():
        tree = load_hierarchy(hierarchy_path, segment_lengths)
        docs = read_documents(data_path, segment_lengths)
        for doc in docs:
            for code in doc.codes:
                if not tree.is_leaf(code):
                    raise DataError(
                        f"document {doc.id!r}: code {code} is not a leaf of the hierarchy"
                    )
        tfidf = fit_vocabulary((d.text for d in docs), min_df=min_df)
        config = TrainConfig(
            learning_rate=lr, weight_decay=weight_decay, epochs=epochs,
            batch_size=batch_size, warmup_steps=warmup_steps, seed=run.seed,
        )
        trainer = train_bottom_up if mode == "bottom_up" else train_top_down
        est = trainer(tree, docs, tfidf, config)
        save_estimator(est, out_path)
        click.echo(f"trained {mode} estimator on {len(docs)} documents -> {out_path}")

    _run_guarded(body)


# -- predict ---------------------------------------------------------------


@cli.command()
@click.option("--model", "model_path", required=True)
@click.option("--data", "data_path", required=True, help="Documents (JSONL with 'text').")
@click.option("--top-k", "k", type=int, default=5, show_default=True)
@click.option("--out", "out_path", default=None, help="Output JSONL (default stdout).")
@click.pass_obj
def predict(run: RunContext, model_path, data_path, k, out_path) -> None:
    """Per-level top-k codes and probabilities for each document."""

    def body():
        est = load_estimator(model_path)
        rows = read_jsonl(data_path)
        out_rows = []
        for i, row in enumerate(rows):
            if "text" not in row:
                raise DataError(f"{data_path}: row {i + 1} has no 'text' field")
            profile = estimate(est, str(row["text"]))
            levels = {
                str(level): [
                    [code.render(), prob] for code, prob in top_k(profile, level, k)
                ]
                for level in range(1, est.tree.level_count + 1)
            }
            out_rows.append({"id": str(row.get("id", i)), "levels": levels})
        if out_path:
            _write_jsonl_atomic(out_rows, out_path)
        else:
            for row in out_rows:
                click.echo(json.dumps(row, ensure_ascii=False))

    _run_guarded(body)


# -- evaluate ---------------------------------------------------------------


@cli.command()
@click.option("--model", "model_path", required=True)
@click.option("--data", "data_path", required=True, help="Labeled documents (JSONL).")
@click.option("--report", "report_path", required=True, help="Report JSON output path.")
@click.option("--decode", type=click.Choice(["leaf_argmax", "greedy"]),
              default="leaf_argmax", show_default=True)
@click.pass_obj
def evaluate(run: RunContext, model_path, data_path, report_path, decode) -> None:
    """Per-level log loss, recall@{1,3,5} and confusion, sliced by source."""

    def body():
        est = load_estimator(model_path)
        docs = read_documents(data_path, est.tree.segment_lengths)
        for doc in docs:
            for code in doc.codes:
                if not est.tree.is_leaf(code):
                    raise DataError(
                        f"document {doc.id!r}: code {code} is not a leaf of the hierarchy"
                    )
        report = evaluation_report(est, docs, decode=decode, threads=run.threads)
        _write_json(report, report_path)
        overall = report["slices"]["overall"]["levels"]
        for level, entry in overall.items():
            click.echo(
                f"level {level}: log_loss={entry['log_loss']:.4f} "
                f"recall@1={entry['recall@1']:.4f} recall@5={entry['recall@5']:.4f}"
            )

    _run_guarded(body)


# -- sample / split ----------------------------------------------------------


_KEY_FUNCTIONS = {"source": by_source, "code": by_code, "chars": by_char_bin}


@cli.command()
@click.option("--data", "data_path", required=True)
@click.option("--segments", required=True)
@click.option("--fraction", type=float, default=0.2, show_default=True)
@click.option("--by", "by_fields", default="code,chars", show_default=True,
              help="Comma list of strata keys: source, code, chars.")
@click.option("--out", "out_path", required=True)
@click.option("--manifest", "manifest_path", default=None)
@click.pass_obj
def sample(run: RunContext, data_path, segments, fraction, by_fields, out_path,
           manifest_path) -> None:
    """Stratified sample: max{1, round_half_up(fraction*N_h)} per stratum."""
    segment_lengths = _parse_ints(segments, "--segments")
    fields = [f.strip() for f in by_fields.split(",") if f.strip()]
    unknown = [f for f in fields if f not in _KEY_FUNCTIONS]
    if unknown:
        raise click.UsageError(f"unknown strata keys {unknown}; choose from source, code, chars")
    key = composite_key(*(_KEY_FUNCTIONS[f] for f in fields))

    def body():
        docs = read_documents(data_path, segment_lengths)
        sampled = stratified_sample(docs, key, fraction, seed=run.seed)
        _write_jsonl_atomic((document_to_record(d) for d in sampled), out_path)
        if manifest_path:
            _write_json(sample_manifest(docs, key, fraction, seed=run.seed), manifest_path)
        click.echo(f"sampled {len(sampled)} of {len(docs)} documents -> {out_path}")

    _run_guarded(body)


@cli.command()
@click.option("--data", "data_path", required=True)
@click.option("--segments", required=True)
@click.option("--train-fraction", type=float, default=0.7, show_default=True)
@click.option("--always-train", "always_train", default="",
              help="Comma list of sources sent wholly to train (dictionary, thesaurus).")
@click.option("--out-train", required=True)
@click.option("--out-test", required=True)
@click.option("--manifest", "manifest_path", default=None)
@click.pass_obj
def split(run: RunContext, data_path, segments, train_fraction, always_train,
          out_train, out_test, manifest_path) -> None:
    """Train/test split stratified by (source, leaf code)."""
    segment_lengths = _parse_ints(segments, "--segments")
    always = {s.strip() for s in always_train.split(",") if s.strip()}

    def body():
        docs = read_documents(data_path, segment_lengths)
        result = train_test_split(docs, always, train_fraction, seed=run.seed)
        _write_jsonl_atomic((document_to_record(d) for d in result.train), out_train)
        _write_jsonl_atomic((document_to_record(d) for d in result.test), out_test)
        if manifest_path:
            _write_json(result.manifest, manifest_path)
        click.echo(f"train={len(result.train)} test={len(result.test)}")

    _run_guarded(body)


# -- agree -------------------------------------------------------------------


@cli.command()
@click.option("--pairs", "pairs_path", required=True,
              help="JSONL rows with coder_a, coder_b and optional weight.")
@click.option("--digits", default="1,2,4,6", show_default=True,
              help="Comma list of digit prefixes to compare at.")
@click.option("--digit-levels", default="1,2,3,4,6", show_default=True,
              help="Digit lengths of the hierarchy levels.")
@click.option("--out", "out_path", default=None)
@click.pass_obj
def agree(run: RunContext, pairs_path, digits, digit_levels, out_path) -> None:
    """Coder agreement rate (with 95% CI) and Cohen's kappa."""
    digit_list = _parse_ints(digits, "--digits")
    levels = _parse_ints(digit_levels, "--digit-levels")

    def body():
        rows = read_jsonl(pairs_path)
        try:
            table = CoderTable(
                coder_a=tuple(str(r["coder_a"]) for r in rows),
                coder_b=tuple(str(r["coder_b"]) for r in rows),
                weights=tuple(float(r.get("weight", 1.0)) for r in rows),
                digit_levels=levels,
            )
        except KeyError as exc:
            raise DataError(f"{pairs_path}: row missing field {exc}") from exc
        report = {"pairs": len(table), "digit_levels": list(levels), "agreement": {}}
        for d in digit_list:
            point, (lo, hi) = agreement_rate(table, d)
            report["agreement"][str(d)] = {
                "rate": point,
                "ci95": [lo, hi],
                "kappa": cohens_kappa(table, d),
            }
        _write_json(report, out_path)

    _run_guarded(body)


# -- synth -------------------------------------------------------------------


@cli.command()
@click.option("--hierarchy", "hierarchy_path", default=None,
              help="Leaf codes file (with --segments).")
@click.option("--segments", default=None)
@click.option("--branching", default=None,
              help="Generate a uniform tree instead, e.g. 10,6,5.")
@click.option("--docs", "n_docs", type=int, default=1000, show_default=True)
@click.option("--tail-exponent", type=float, default=1.2, show_default=True)
@click.option("--signal", type=float, default=0.8, show_default=True)
@click.option("--tokens", default="10,40", show_default=True, help="Tokens per doc: lo,hi.")
@click.option("--multi-code-rate", type=float, default=0.0, show_default=True)
@click.option("--out", "out_path", required=True)
@click.option("--emit-hierarchy", "emit_path", default=None,
              help="Also write the generated tree's leaf codes to this file.")
@click.pass_obj
def synth(run: RunContext, hierarchy_path, segments, branching, n_docs, tail_exponent,
          signal, tokens, multi_code_rate, out_path, emit_path) -> None:
    """Generate a synthetic long-tail labeled corpus (JSONL)."""
    token_range = _parse_ints(tokens, "--tokens")
    if len(token_range) != 2:
        raise click.UsageError("--tokens takes exactly two integers: lo,hi")
    lo, hi = token_range
    if branching is None and (hierarchy_path is None or segments is None):
        raise click.UsageError("give either --branching or --hierarchy with --segments")

    def body():
        if branching is not None:
            codes, widths = uniform_tree_codes(_parse_ints(branching, "--branching"))
            tree = build_hierarchy(codes, widths)
        else:
            tree = load_hierarchy(hierarchy_path, _parse_ints(segments, "--segments"))
        spec = CorpusSpec(
            tree=tree, total_docs=n_docs, tail_exponent=tail_exponent,
            tokens_per_doc=(lo, hi), class_token_signal=signal,
            seed=run.seed, multi_code_rate=multi_code_rate,
        )
        corpus = generate_corpus(spec)
        _write_jsonl_atomic((document_to_record(d) for d in corpus), out_path)
        if emit_path:
            save_hierarchy(tree, emit_path)
        click.echo(f"generated {len(corpus)} documents over {len(tree.leaves)} leaves -> {out_path}")

    _run_guarded(body)


# -- validate ---------------------------------------------------------------


@cli.command()
@click.option("--data", "data_path", required=True)
@click.option("--hierarchy", "hierarchy_path", required=True)
@click.option("--segments", required=True)
@click.option("--strict", is_flag=True, default=False,
              help="Exit with a data error on any finding.")
@click.option("--out", "out_path", default=None)
@click.pass_obj
def validate(run: RunContext, data_path, hierarchy_path, segments, strict, out_path) -> None:
    """Report unknown codes, empty texts and duplicate ids in a dataset."""
    segment_lengths = _parse_ints(segments, "--segments")

    def body():
        tree = load_hierarchy(hierarchy_path, segment_lengths)
        rows = read_jsonl(data_path)
        unknown_codes: list[dict] = []
        empty_texts: list[str] = []
        duplicate_ids: list[str] = []
        malformed: list[dict] = []
        seen: set[str] = set()
        for i, row in enumerate(rows, start=1):
            row_id = str(row.get("id", i))
            if row_id in seen:
                duplicate_ids.append(row_id)
            seen.add(row_id)
            if not str(row.get("text", "")).strip():
                empty_texts.append(row_id)
            codes = row.get("codes")
            if not codes:
                malformed.append({"id": row_id, "reason": "no codes"})
                continue
            for code_text in codes:
                try:
                    code = ClassCode.parse(str(code_text), segment_lengths)
                except HiertaxError:
                    unknown_codes.append({"id": row_id, "code": str(code_text)})
                    continue
                if not tree.is_leaf(code):
                    unknown_codes.append({"id": row_id, "code": str(code_text)})
        report = {
            "rows": len(rows),
            "unknown_codes": unknown_codes,
            "empty_texts": empty_texts,
            "duplicate_ids": duplicate_ids,
            "malformed": malformed,
        }
        _write_json(report, out_path)
        findings = len(unknown_codes) + len(empty_texts) + len(duplicate_ids) + len(malformed)
        if strict and findings:
            raise DataError(f"validation found {findings} problem(s)")

    _run_guarded(body)


if __name__ == "__main__":
    main()
