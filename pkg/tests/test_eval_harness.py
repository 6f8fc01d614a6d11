import json

import pytest

from csmotive.chat_parser import LangTag, Token, Utterance
from csmotive.classification import Prediction
from csmotive.errors import IdMismatch, UnknownConversation
from csmotive.eval_harness import (
    DEFAULT_SEEDS,
    EvalReport,
    EvalRow,
    NBBackend,
    SplitSpec,
    accuracy,
    format_cell,
    make_splits,
    render_report,
    run_experiment,
    write_report,
)
from csmotive.switch_extractor import SwitchInstance


def make_instance(iid, conv, text="hola now", labels=None):
    tokens = tuple(Token(text=w, lang=LangTag.AMBIGUOUS) for w in text.split())
    utt = Utterance(speaker="ANA", tokens=tokens, line_no=0)
    return SwitchInstance(
        id=iid, transcript_id=conv, focus_line=0, context=(utt,),
        switch_points=((0, 0),), text=f"ANA: {text}", labels=labels,
    )


def corpus(n_convs=26, per_conv=10):
    instances = []
    for c in range(n_convs):
        for k in range(per_conv):
            instances.append(make_instance(f"conv{c:02d}-{k:03d}", f"conv{c:02d}"))
    return instances


def test_make_splits_partition_and_determinism():
    instances = corpus()
    spec = SplitSpec(test_conversation_ids=("conv00", "conv07", "conv13", "conv25"), shuffle_seed=42)
    train, dev, test = make_splits(instances, spec)
    train2, dev2, test2 = make_splits(instances, spec)
    assert (train, dev, test) == (train2, dev2, test2)

    all_ids = {i.id for i in instances}
    split_ids = [i.id for i in train + dev + test]
    assert len(split_ids) == len(all_ids)
    assert set(split_ids) == all_ids

    # test split keeps whole conversations
    assert {i.transcript_id for i in test} == {"conv00", "conv07", "conv13", "conv25"}
    assert len(test) == 40
    assert not {i.transcript_id for i in train + dev} & {i.transcript_id for i in test}


def test_make_splits_exact_75_25():
    instances = corpus(n_convs=5, per_conv=25)  # 125 total, 25 test
    spec = SplitSpec(test_conversation_ids=("conv04",), shuffle_seed=7)
    train, dev, test = make_splits(instances, spec)
    assert len(test) == 25
    assert len(train) == 75
    assert len(dev) == 25


def test_make_splits_unknown_conversation():
    with pytest.raises(UnknownConversation):
        make_splits(corpus(n_convs=2), SplitSpec(test_conversation_ids=("nope",)))


def test_split_spec_round_trip(tmp_path):
    spec = SplitSpec(test_conversation_ids=("a", "b"), dev_fraction=0.25, shuffle_seed=5)
    path = tmp_path / "splits.json"
    spec.save(path)
    assert SplitSpec.load(path) == spec


def gold_set(n, label="joke", positives=None):
    positives = positives if positives is not None else set(range(0, n, 2))
    return [
        make_instance(f"g{k:03d}", "conv", labels={label: k in positives})
        for k in range(n)
    ]


def preds_for(gold, label="joke", correct_on=None):
    correct_on = set(range(len(gold))) if correct_on is None else correct_on
    preds = []
    for k, inst in enumerate(gold):
        truth = inst.labels[label]
        decision = truth if k in correct_on else not truth
        preds.append(Prediction(instance_id=inst.id, label=label, decision=decision,
                                score=0.9 if decision else 0.1))
    return preds


def test_accuracy_all_correct_and_complement():
    gold = gold_set(8)
    assert accuracy(preds_for(gold), gold, "joke") == 1.0
    assert accuracy(preds_for(gold, correct_on=set()), gold, "joke") == 0.0


def test_accuracy_139_of_220():
    gold = gold_set(220, label="change_topic")
    acc = accuracy(
        preds_for(gold, label="change_topic", correct_on=set(range(139))),
        gold,
        "change_topic",
    )
    assert acc == pytest.approx(139 / 220, abs=1e-12)
    assert abs(acc - 0.632) <= 1 / 220  # within one instance of the reported cell


def test_accuracy_id_mismatch():
    gold = gold_set(4)
    preds = preds_for(gold)[:-1]
    with pytest.raises(IdMismatch):
        accuracy(preds, gold, "joke")
    with pytest.raises(IdMismatch):
        accuracy(preds_for(gold), gold[:-1], "joke")


SEPARABLE_TEXTS = {
    True: "words marker_joke here",
    False: "words plain here",
}


def separable_corpus(n=40, conv="conv"):
    instances = []
    for k in range(n):
        truth = k % 2 == 0
        instances.append(
            make_instance(f"{conv}-{k:03d}", conv, text=SEPARABLE_TEXTS[truth],
                          labels={"joke": truth})
        )
    return instances


def test_nb_backend_std_exactly_zero_across_seeds():
    train = separable_corpus(40, "tr")
    dev = separable_corpus(12, "dv")
    test = separable_corpus(16, "te")
    row = run_experiment(NBBackend(alphas=(0.5, 1.0)), "joke", train, dev, test)
    assert row.n_runs == len(DEFAULT_SEEDS)
    assert row.std == 0.0
    assert row.mean == 1.0
    assert len(set(row.accuracies)) == 1


class ScriptedBackend:
    """Returns predictions hitting a scripted per-seed correct count."""

    name = "mock-remote"

    def __init__(self, correct_by_seed):
        self.correct_by_seed = correct_by_seed
        self.grid = [{}]

    def train_predict(self, label, hyperparams, seed, train, dev, test):
        n_correct = self.correct_by_seed[seed]
        preds = []
        for k, inst in enumerate(test):
            truth = inst.labels[label]
            decision = truth if k < n_correct else not truth
            preds.append(Prediction(instance_id=inst.id, label=label,
                                    decision=decision, score=0.5))
        return preds


def test_scripted_backend_mean_and_sample_std():
    # accuracies 80,82,84,86,88 percent -> mean 84.0, sample std 3.162
    test = gold_set(50)
    backend = ScriptedBackend({42: 40, 30: 41, 20: 42, 10: 43, 5: 44})
    row = run_experiment(backend, "joke", [], [], test)
    assert row.mean == pytest.approx(0.84, abs=1e-12)
    assert row.std == pytest.approx(0.031622776601683794, abs=1e-12)
    assert format_cell(row.mean, row.std) == "84.0 ± 3.2"
    assert row.dev_accuracy is None  # single-point grid skips the search


def test_grid_selection_prefers_better_dev_accuracy():
    class GridBackend:
        name = "gridmock"
        grid = [{"alpha": 0.5}, {"alpha": 1.0}]

        def train_predict(self, label, hyperparams, seed, train, dev, test):
            good = hyperparams["alpha"] == 1.0
            preds = []
            for inst in test:
                truth = inst.labels[label]
                preds.append(Prediction(instance_id=inst.id, label=label,
                                        decision=truth if good else not truth, score=0.5))
            return preds

    gold = gold_set(10)
    row = run_experiment(GridBackend(), "joke", [], gold, gold, seeds=(42,))
    assert row.hyperparams == {"alpha": 1.0}
    assert row.dev_accuracy == 1.0
    assert row.mean == 1.0


def test_format_cell_exact():
    assert format_cell(0.863, 0.009) == "86.3 ± 0.9"
    assert format_cell(0.5, 0.0) == "50.0 ± 0.0"


def row_from(label, mean, std):
    # two synthetic accuracies reproducing the target mean and sample std
    delta = std / (2 ** 0.5)
    return EvalRow(label=label, backend="imported", hyperparams={},
                   seeds=(1, 2), accuracies=(mean - delta, mean + delta))


def test_report_average_is_mean_of_rows():
    rows = tuple(row_from(f"l{k}", 0.5, 0.0) for k in range(11))
    report = EvalReport(rows=rows)
    assert report.average_mean() == pytest.approx(0.5, abs=1e-12)
    text, _ = render_report(report)
    assert "Average" in text
    assert text.rstrip().splitlines()[-1].split()[-3:] == ["50.0", "±", "0.0"]


XLMR_COLUMN = [
    ("change_topic", 86.3, 0.9), ("borrowing", 75.0, 2.3), ("joke", 68.5, 15.6),
    ("quote", 69.3, 4.9), ("translate", 74.6, 17.6), ("command", 66.4, 20.6),
    ("filler", 73.4, 2.5), ("exasperation", 70.5, 14.4), ("happiness", 78.4, 4.3),
    ("proper_noun", 85.5, 1.9), ("surprise", 79.4, 3.6),
]


def test_report_average_recomputed_from_published_style_rows():
    # the Average row must equal the arithmetic mean of the per-label means
    rows = tuple(row_from(label, mean / 100, std / 100) for label, mean, std in XLMR_COLUMN)
    report = EvalReport(rows=rows)
    expected_mean = sum(m for _, m, _ in XLMR_COLUMN) / 11 / 100
    assert report.average_mean() == pytest.approx(expected_mean, abs=1e-9)
    assert expected_mean == pytest.approx(0.7520909090909091, abs=1e-12)
    text, machine = render_report(report)
    assert text.rstrip().splitlines()[-1].startswith("Average")
    assert "75.2" in text.rstrip().splitlines()[-1]
    payload = json.loads(machine)
    assert payload["average"]["accuracy_mean"] == pytest.approx(expected_mean, abs=1e-12)


def test_report_language_pair_header():
    rows = (row_from("joke", 0.7, 0.01),)
    text, machine = render_report(EvalReport(rows=rows, language_pair="hi-en"))
    assert "hi-en" in text.splitlines()[0]
    assert json.loads(machine)["language_pair"] == "hi-en"


def test_write_report_deterministic_bytes(tmp_path):
    train = separable_corpus(40, "tr")
    dev = separable_corpus(12, "dv")
    test = separable_corpus(16, "te")
    outputs = []
    for run in range(2):
        row = run_experiment(NBBackend(), "joke", train, dev, test)
        report = EvalReport(rows=(row,))
        t = tmp_path / f"report{run}.txt"
        j = tmp_path / f"report{run}.json"
        write_report(report, t, j)
        outputs.append((t.read_bytes(), j.read_bytes()))
    assert outputs[0] == outputs[1]
