"""End-to-end smoke tests for the python bindings."""

import json
import math

import pytest

import xlt


def test_tokenize():
    assert xlt.tokenize("Great book!") == ["great", "book", "!"]
    assert xlt.tokenize("C'est bon.") == ["c'est", "bon", "."]
    assert xlt.tokenize("") == []


def test_binarize_rating():
    assert xlt.binarize_rating(5) == 1
    assert xlt.binarize_rating(2) == 0
    assert xlt.binarize_rating(3) is None
    with pytest.raises(ValueError):
        xlt.binarize_rating(0)


def test_f1_matches_published_numbers():
    assert abs(xlt.f1_from_pr(0.796, 0.816) - 0.806) < 5e-4
    assert abs(xlt.f1_from_pr(0.909, 0.830) - 0.868) < 5e-4


def test_fisher_exact_against_scipy():
    scipy_stats = pytest.importorskip("scipy.stats")
    tables = [
        (3, 1, 1, 3),
        (10, 2, 3, 9),
        (0, 5, 5, 0),
        (7, 7, 7, 7),
        (1, 0, 0, 1),
        (12, 4, 0, 9),
        (200, 150, 170, 180),  # exercises the large-table path
        (50, 5, 5, 50),
    ]
    for a, b, c, d in tables:
        ours = xlt.fisher_exact(a, b, c, d)
        theirs = scipy_stats.fisher_exact([[a, b], [c, d]], alternative="two-sided")[1]
        assert ours == pytest.approx(theirs, abs=1e-9), (a, b, c, d)


def test_interpolate_picks_the_better_model():
    dev_a = [0.5005, 0.5005, 0.4995, 0.4995]
    dev_b = [0.0, 0.0, 1.0, 1.0]
    labels = [1, 1, 0, 0]
    out = xlt.interpolate(dev_a, dev_b, labels, dev_a, dev_b)
    assert out["lambda"] == pytest.approx(1.0)
    assert out["dev_accuracy"] == pytest.approx(1.0)
    assert len(out["combined_test"]) == 4


@pytest.fixture(scope="module")
def tiny_run(tmp_path_factory):
    root = tmp_path_factory.mktemp("pipeline")
    files = xlt.gen_synth(
        str(root / "corpus"), seed=11, labeled=200, parallel=400, test=80
    )
    src_vocab = str(root / "src.vocab")
    tgt_vocab = str(root / "tgt.vocab")
    xlt.build_vocab(
        [str(files["train"])],
        src_vocab,
        text_inputs=[str(files["parallel_source"])],
        lang="src",
        min_count=1,
    )
    xlt.build_vocab(
        [str(files["parallel_target"])], tgt_vocab, format="text", lang="tgt", min_count=1
    )

    def train(out_name, seed=5):
        return xlt.train(
            labeled=str(files["train"]),
            source_vocab=src_vocab,
            out_dir=str(root / out_name),
            parallel_source=str(files["parallel_source"]),
            parallel_target=str(files["parallel_target"]),
            target_vocab=tgt_vocab,
            source_lang="src",
            target_lang="tgt",
            embed_dim=8,
            hidden_dim=16,
            repr_dim=16,
            sentences=4,
            words=8,
            batch_size=16,
            parallel_batch_size=8,
            pretrain_epochs=1,
            joint_epochs=2,
            seed=seed,
        )

    return {"files": files, "root": root, "train": train}


def test_pipeline_trains_and_evaluates(tiny_run):
    out = tiny_run["train"]("run1")
    report = xlt.evaluate(
        str(out["checkpoint"]), str(tiny_run["files"]["target_test"]), "tgt"
    )
    assert 0.0 <= report["accuracy"] <= 1.0
    assert report["tp"] + report["fp"] + report["tn"] + report["fn"] == 80

    manifest = json.loads((tiny_run["root"] / "run1" / "manifest.json").read_text())
    assert manifest["command"] == "train"
    assert manifest["mode"] == "joint"


def test_pipeline_is_deterministic(tiny_run):
    out1 = tiny_run["train"]("det1", seed=9)
    out2 = tiny_run["train"]("det2", seed=9)
    csv1 = (tiny_run["root"] / "det1" / "loss.csv").read_text()
    csv2 = (tiny_run["root"] / "det2" / "loss.csv").read_text()
    assert csv1 == csv2
    acc1 = xlt.evaluate(str(out1["checkpoint"]), str(tiny_run["files"]["target_test"]), "tgt")
    acc2 = xlt.evaluate(str(out2["checkpoint"]), str(tiny_run["files"]["target_test"]), "tgt")
    assert acc1["accuracy"] == acc2["accuracy"]


def test_neighbors_shape_and_scores(tiny_run):
    out = tiny_run["train"]("nn")
    rows = xlt.neighbors(str(out["checkpoint"]), "pos0", "src", "tgt", k=5)
    assert len(rows) == 5
    scores = [s for _, s in rows]
    assert scores == sorted(scores, reverse=True)
    assert all(-1.0 - 1e-9 <= s <= 1.0 + 1e-9 for s in scores)
    assert all(not math.isnan(s) for s in scores)
    with pytest.raises(ValueError):
        xlt.neighbors(str(out["checkpoint"]), "not_a_token", "src", "tgt")
