import json
from pathlib import Path

import pytest

from csmotive.annotation import LABEL_KEYS
from csmotive.cli import main
from csmotive.eval_harness import SplitSpec
from csmotive.switch_extractor import read_instances_jsonl, write_instances_jsonl

from test_classification import make_instance

FIXTURES = Path(__file__).parent / "fixtures" / "chat"


def test_unknown_subcommand_is_usage_error(capsys):
    assert main(["frobnicate"]) == 2
    assert "Usage" in capsys.readouterr().err


def test_parse_extract_pipeline(tmp_path, capsys):
    corpus = tmp_path / "corpus.jsonl"
    assert main(["parse", "--in", str(FIXTURES), "--out", str(corpus)]) == 0
    assert corpus.exists()
    n_utts = len(corpus.read_text().strip().splitlines())
    assert n_utts == 34  # every fixture utterance lands in the corpus

    model = tmp_path / "langid.json"
    assert main(["langid", "train", "--out", str(model), "--min-words", "500"]) == 0

    tagged = tmp_path / "tagged.jsonl"
    assert main(["langid", "apply", "--model", str(model), "--in", str(corpus),
                 "--out", str(tagged)]) == 0

    instances = tmp_path / "instances.jsonl"
    assert main(["extract", "--context", "3", "--in", str(tagged),
                 "--out", str(instances)]) == 0
    extracted = read_instances_jsonl(instances)
    assert extracted, "tagged fixtures must contain at least one switch"
    for inst in extracted:
        assert len(inst.context) <= 7
        assert inst.switch_points


def test_eval_without_splits_is_domain_error(tmp_path, capsys):
    instances = tmp_path / "instances.jsonl"
    write_instances_jsonl([make_instance("hola now", iid="x1", labels={"joke": True})], instances)
    code = main(["eval", "--instances", str(instances),
                 "--splits", str(tmp_path / "missing.json")])
    assert code == 1
    assert "splits file not found" in capsys.readouterr().err


def synthetic_labeled_corpus(tmp_path, n_convs=6, per_conv=10):
    instances = []
    for c in range(n_convs):
        for k in range(per_conv):
            truth = (c + k) % 2 == 0
            text = "uno marker_joke now" if truth else "uno plain now"
            inst = make_instance(text, iid=f"c{c}-{k:02d}", labels={"joke": truth})
            inst = type(inst)(**{**inst.__dict__, "transcript_id": f"c{c}"})
            instances.append(inst)
    path = tmp_path / "labeled.jsonl"
    write_instances_jsonl(instances, path)
    return path


def test_eval_end_to_end_writes_reports(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    labeled = synthetic_labeled_corpus(tmp_path)
    SplitSpec(test_conversation_ids=("c0",), shuffle_seed=42).save(tmp_path / "splits.json")
    code = main([
        "eval", "--backend", "nb", "--labels", "joke",
        "--instances", str(labeled), "--splits", str(tmp_path / "splits.json"),
        "--out-prefix", str(tmp_path / "report"),
    ])
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["rows"][0]["label"] == "joke"
    assert report["rows"][0]["accuracy_std"] == 0.0
    assert (tmp_path / "report.txt").read_text().startswith("Label detection accuracy")


def test_train_saves_models(tmp_path):
    labeled = synthetic_labeled_corpus(tmp_path)
    SplitSpec(test_conversation_ids=("c0",), shuffle_seed=42).save(tmp_path / "splits.json")
    code = main(["train", "--backend", "nb", "--label", "joke",
                 "--instances", str(labeled), "--splits", str(tmp_path / "splits.json"),
                 "--out", str(tmp_path / "models")])
    assert code == 0
    assert (tmp_path / "models" / "joke.nb.seed42.json").exists()


def test_transfer_cli_identity(tmp_path):
    from csmotive.chat_parser import LangTag, Token, Utterance
    from csmotive.switch_extractor import SwitchInstance

    tokens = tuple(
        Token(text=w, lang=lang)
        for w, lang in [("vamos", LangTag.SPA), ("now", LangTag.ENG)]
    )
    inst = SwitchInstance(
        id="t-0", transcript_id="t", focus_line=0,
        context=(Utterance(speaker="ANA", tokens=tokens, line_no=0),),
        switch_points=((0, 1),), text="ANA: vamos now", labels={"joke": False},
    )
    src = tmp_path / "es.jsonl"
    dst = tmp_path / "hi.jsonl"
    write_instances_jsonl([inst], src)
    code = main(["transfer", "--client", "identity", "--in", str(src), "--out", str(dst),
                 "--cache", str(tmp_path / "cache.json")])
    assert code == 0
    out = read_instances_jsonl(dst)[0]
    assert out.labels == {"joke": False}
    assert out.context[0].tokens[0].lang is LangTag.HIN
    assert out.context[0].tokens[1].text == "now"


def test_annotate_stats_and_agreement(tmp_path):
    from csmotive.annotation import AnnotationRecord, AnnotationStore, LabelSet

    store = AnnotationStore(tmp_path / "ann.jsonl")
    for iid in ("i1", "i2"):
        store.submit(AnnotationRecord(instance_id=iid, annotator_id="main",
                                      labels=LabelSet.of("joke", "quote")))
        store.submit(AnnotationRecord(instance_id=iid, annotator_id="second",
                                      labels=LabelSet.of("joke")))
    subset = tmp_path / "subset.txt"
    subset.write_text("i1\ni2\n")

    assert main(["annotate", "stats", "--annotations", str(store.path),
                 "--annotator", "main"]) == 0
    assert main(["annotate", "agreement", "--annotations", str(store.path),
                 "--a", "main", "--b", "second", "--subset", str(subset)]) == 0


def test_schema_command(capsys, tmp_path):
    assert main(["schema", "--out", str(tmp_path / "schema.json")]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert [l["key"] for l in payload["labels"]] == list(LABEL_KEYS)
    on_disk = json.loads((tmp_path / "schema.json").read_text())
    assert on_disk == payload
    assert on_disk["version"]
