"""Command-line entry point: every pipeline stage as a subcommand.

Exit codes: 0 success, 1 domain error, 2 usage error. All randomness is
seeded through explicit flags; nothing reads the wall clock or entropy.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__
from .annotation import LABEL_KEYS, SCHEMA, AnnotationStore, label_distribution
from .chat_parser import LangTag, ParserProfile, parse_file, read_corpus_jsonl, write_corpus_jsonl
from .config import load_config
from .errors import ConfigError, CsMotiveError
from .eval_harness import (
    DEFAULT_SEEDS,
    EvalReport,
    NBBackend,
    RemoteBackend,
    SplitSpec,
    make_splits,
    render_report,
    run_experiment,
    write_report,
)
from .langid import CharNgramLanguageIdentifier, bundled_seed_corpora, tag_utterance, train_langmodel
from .switch_extractor import extract_instances, read_instances_jsonl, write_instances_jsonl
from .translate_train import make_client, transfer_corpus


@click.group(name="csmotive")
@click.version_option(__version__)
def cli():
    """Code-switch extraction, motivation annotation, and classification."""


@cli.command("parse")
@click.option("--in", "inputs", multiple=True, required=True, type=click.Path(exists=True),
              help="Transcript file or directory (repeatable).")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--drop-retraced", is_flag=True, help="Drop retraced material, not just the marks.")
def parse_cmd(inputs, out_path, drop_retraced):
    """Parse CHAT-style transcripts into canonical corpus JSONL."""
    profile = ParserProfile(drop_retraced_material=drop_retraced)
    files: list[Path] = []
    for item in inputs:
        path = Path(item)
        if path.is_dir():
            files.extend(sorted(p for p in path.iterdir() if p.suffix in (".cha", ".txt")))
        else:
            files.append(path)
    transcripts = [parse_file(path, profile) for path in files]
    n = write_corpus_jsonl(transcripts, out_path)
    click.echo(f"parsed {len(transcripts)} transcripts, wrote {n} utterances to {out_path}")


@cli.group("langid")
def langid_group():
    """Train or apply the word-level language identifier."""


@langid_group.command("train")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--lexicon", "lexicons", multiple=True, metavar="LANG=PATH",
              help="Seed word list (eng|spa|hin=path); default: bundled lexicons.")
@click.option("--margin", default=0.5, show_default=True, help="Ambiguity margin in nats.")
@click.option("--min-words", default=1000, show_default=True)
def langid_train_cmd(out_path, lexicons, margin, min_words):
    if lexicons:
        corpora = {}
        for item in lexicons:
            lang_code, _, path = item.partition("=")
            corpora[LangTag(lang_code)] = Path(path).read_text(encoding="utf-8").split()
    else:
        corpora = bundled_seed_corpora()
    model = train_langmodel(corpora, ambiguity_margin=margin, min_words=min_words)
    model.save(out_path)
    click.echo(f"trained langid model over {list(c.value for c in corpora)} -> {out_path}")


@langid_group.command("apply")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def langid_apply_cmd(model_path, in_path, out_path):
    model = CharNgramLanguageIdentifier.load(model_path)
    transcripts = read_corpus_jsonl(in_path)
    tagged = []
    for transcript in transcripts:
        utts = tuple(tag_utterance(model, u) for u in transcript.utterances)
        tagged.append(type(transcript)(id=transcript.id, utterances=utts))
    n = write_corpus_jsonl(tagged, out_path)
    click.echo(f"tagged {n} utterances -> {out_path}")


@cli.command("extract")
@click.option("--context", default=3, show_default=True, help="Context window radius in lines.")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--detection", type=click.Choice(["tags", "markers"]), default="tags",
              show_default=True)
def extract_cmd(context, in_path, out_path, detection):
    """Extract switch instances with context windows from a tagged corpus."""
    instances = []
    for transcript in read_corpus_jsonl(in_path):
        instances.extend(extract_instances(transcript, window=context, detection=detection))
    n = write_instances_jsonl(instances, out_path)
    click.echo(f"extracted {n} instances -> {out_path}")


@cli.group("annotate")
def annotate_group():
    """Annotation store reports and exports."""


@annotate_group.command("stats")
@click.option("--annotations", "store_path", required=True, type=click.Path(exists=True))
@click.option("--annotator", required=True)
def annotate_stats_cmd(store_path, annotator):
    store = AnnotationStore(store_path)
    dist = label_distribution(store.records_by(annotator).values())
    click.echo(json.dumps(dist.to_json(), indent=2, sort_keys=True))


@annotate_group.command("agreement")
@click.option("--annotations", "store_path", required=True, type=click.Path(exists=True))
@click.option("--a", "annotator_a", required=True)
@click.option("--b", "annotator_b", required=True)
@click.option("--subset", "subset_path", required=True, type=click.Path(exists=True),
              help="File with one instance id per line.")
def annotate_agreement_cmd(store_path, annotator_a, annotator_b, subset_path):
    from .annotation import agreement_accuracy, agreement_kappa

    store = AnnotationStore(store_path)
    ids = [line.strip() for line in Path(subset_path).read_text().splitlines() if line.strip()]
    result = {}
    for label in LABEL_KEYS:
        result[label] = {
            "accuracy": agreement_accuracy(store, annotator_a, annotator_b, label, ids),
            "kappa": agreement_kappa(store, annotator_a, annotator_b, label, ids),
        }
    click.echo(json.dumps({"n_instances": len(ids), "per_label": result}, indent=2, sort_keys=True))


@annotate_group.command("export")
@click.option("--instances", "instances_path", required=True, type=click.Path(exists=True))
@click.option("--annotations", "store_path", required=True, type=click.Path(exists=True))
@click.option("--annotator", required=True, help="Whose labels to attach (the primary annotator).")
@click.option("--out", "out_path", required=True, type=click.Path())
def annotate_export_cmd(instances_path, store_path, annotator, out_path):
    """Attach one annotator's LabelSets to instances for training/eval."""
    store = AnnotationStore(store_path)
    records = store.records_by(annotator)
    labeled = []
    skipped = 0
    for inst in read_instances_jsonl(instances_path):
        record = records.get(inst.id)
        if record is None:
            skipped += 1
            continue
        labeled.append(inst.with_labels(record.labels.to_json()))
    n = write_instances_jsonl(labeled, out_path)
    click.echo(f"exported {n} labeled instances ({skipped} unannotated skipped) -> {out_path}")


def _build_backend(backend, alphas, endpoint, model_name, cache):
    if backend == "nb":
        return NBBackend(alphas=tuple(float(a) for a in alphas.split(",")))
    if not endpoint:
        raise ConfigError(["--endpoint is required for the remote backend"])
    return RemoteBackend(endpoint=endpoint, model_name=model_name, cache_path=cache)


@cli.command("train")
@click.option("--backend", type=click.Choice(["nb", "remote"]), default="nb", show_default=True)
@click.option("--label", "label_key", default="all", show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--alpha", default=1.0, show_default=True)
@click.option("--instances", "instances_path", required=True, type=click.Path(exists=True),
              help="Labeled instances JSONL (see `annotate export`).")
@click.option("--splits", "splits_path", default="splits.json", show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--endpoint", default=None)
@click.option("--model-name", default="mbert")
def train_cmd(backend, label_key, seed, alpha, instances_path, splits_path, out_dir, endpoint, model_name):
    """Train per-label models on the train split and save them."""
    if not Path(splits_path).exists():
        raise ConfigError([f"splits file not found: {splits_path}"])
    instances = read_instances_jsonl(instances_path)
    spec = SplitSpec.load(splits_path)
    train, _, _ = make_splits(instances, spec)
    labels = list(LABEL_KEYS) if label_key == "all" else [label_key]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if backend == "remote":
        raise ConfigError(["remote training has no local artifacts; use `csmotive eval --backend remote`"])
    from .classification import nb_train

    for label in labels:
        model = nb_train(train, label=label, alpha=alpha)
        path = out / f"{label}.nb.seed{seed}.json"
        model.save(path)
        click.echo(f"saved {path}")


@cli.command("eval")
@click.option("--backend", type=click.Choice(["nb", "remote"]), default="nb", show_default=True)
@click.option("--labels", "label_keys", default="all", show_default=True,
              help='"all" or comma-separated label keys.')
@click.option("--seeds", default=",".join(str(s) for s in DEFAULT_SEEDS), show_default=True)
@click.option("--alphas", default="1.0", show_default=True, help="NB smoothing grid.")
@click.option("--instances", "instances_path", required=True, type=click.Path(exists=True))
@click.option("--splits", "splits_path", default="splits.json", show_default=True)
@click.option("--train", "train_path", default=None, type=click.Path(exists=True),
              help="Explicit train set (overrides --splits; for transferred corpora).")
@click.option("--dev", "dev_path", default=None, type=click.Path(exists=True))
@click.option("--test", "test_path", default=None, type=click.Path(exists=True))
@click.option("--language-pair", default="es-en", show_default=True)
@click.option("--out-prefix", default="report", show_default=True)
@click.option("--endpoint", default=None)
@click.option("--model-name", default="mbert")
@click.option("--cache", default=None, type=click.Path())
def eval_cmd(backend, label_keys, seeds, alphas, instances_path, splits_path, train_path,
             dev_path, test_path, language_pair, out_prefix, endpoint, model_name, cache):
    """Run the full protocol and write report.txt + report.json."""
    if train_path or dev_path or test_path:
        if not (train_path and dev_path and test_path):
            raise ConfigError(["--train/--dev/--test must be given together"])
        train = read_instances_jsonl(train_path)
        dev = read_instances_jsonl(dev_path)
        test = read_instances_jsonl(test_path)
    else:
        if not Path(splits_path).exists():
            raise ConfigError([f"splits file not found: {splits_path}"])
        instances = read_instances_jsonl(instances_path)
        spec = SplitSpec.load(splits_path)
        train, dev, test = make_splits(instances, spec)

    labels = list(LABEL_KEYS) if label_keys == "all" else label_keys.split(",")
    seed_list = tuple(int(s) for s in seeds.split(","))
    eval_backend = _build_backend(backend, alphas, endpoint, model_name, cache)

    rows = tuple(
        run_experiment(eval_backend, label, train, dev, test, seeds=seed_list)
        for label in labels
    )
    report = EvalReport(rows=rows, language_pair=language_pair)
    text_path = f"{out_prefix}.txt"
    json_path = f"{out_prefix}.json"
    write_report(report, text_path, json_path)
    text, _ = render_report(report)
    click.echo(text)
    click.echo(f"wrote {text_path} and {json_path}")


@cli.command("transfer")
@click.option("--client", "client_spec", default="identity", show_default=True,
              metavar="identity|upper|http:<url>")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--cache", "cache_path", default=None, type=click.Path())
@click.option("--report", "report_path", default=None, type=click.Path())
def transfer_cmd(client_spec, in_path, out_path, cache_path, report_path):
    """Translate the Spanish spans of a labeled corpus into romanized Hindi."""
    client = make_client(client_spec, cache_path=cache_path)
    instances = read_instances_jsonl(in_path)
    output, report = transfer_corpus(instances, client)
    write_instances_jsonl(output, out_path)
    click.echo(json.dumps(report.to_json(), indent=2, sort_keys=True))
    if report_path:
        Path(report_path).write_text(json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")
    click.echo(f"transferred {report.transferred}/{report.total} instances -> {out_path}")


@cli.command("serve")
@click.option("--config", "config_path", default=None, type=click.Path(),
              help="Project config (JSON/TOML); CSMOTIVE_CONFIG overrides.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=None, type=int, help="Overrides the config port.")
def serve_cmd(config_path, host, port):
    """Serve the annotation API (and the UI, when configured)."""
    import uvicorn

    from .server import create_app

    config = load_config(config_path)
    app = create_app(config)
    uvicorn.run(app, host=host, port=port or config.port)


@cli.command("schema")
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="Also write the schema to a file (schema.json).")
def schema_cmd(out_path):
    """Print the label schema as JSON."""
    payload = json.dumps(SCHEMA.to_json(), indent=2, ensure_ascii=False)
    click.echo(payload)
    if out_path:
        Path(out_path).write_text(payload + "\n", encoding="utf-8")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except CsMotiveError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 2
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return 2


if __name__ == "__main__":
    sys.exit(main())
