import subprocess
import sys

import pytest

from plsakit.foldin import read_features_csv
from plsakit.harness import parse_report
from plsakit.synth import make_synthetic_corpus, write_corpus_tree

PNG_MAGIC = bytes([0x89]) + b"PNG\r\n\x1a\n"


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "plsakit.cli", *map(str, args)],
        capture_output=True, text=True, cwd=cwd,
    )


@pytest.fixture(scope="module")
def corpus_tree(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    train, test = make_synthetic_corpus(
        n_categories=2, words_per_category=8, train_per_category=10,
        test_per_category=5, doc_length=(10, 20), seed=13,
    )
    write_corpus_tree(train, root / "train")
    write_corpus_tree(test, root / "test")
    return root


class TestUsageErrors:
    def test_no_subcommand_exits_1(self):
        proc = run_cli()
        assert proc.returncode == 1

    def test_unknown_subcommand_exits_1(self):
        proc = run_cli("explode")
        assert proc.returncode == 1

    def test_missing_required_flag_exits_1(self, corpus_tree):
        proc = run_cli("train", "--corpus", corpus_tree / "train", "--topics", "2")
        assert proc.returncode == 1

    def test_non_integer_topics_exits_1(self, corpus_tree):
        proc = run_cli(
            "train", "--corpus", corpus_tree / "train", "--topics", "two",
            "--iterations", "1", "--out", "x",
        )
        assert proc.returncode == 1


class TestPreprocess:
    def test_reports_statistics(self, corpus_tree, tmp_path):
        vocab_out = tmp_path / "vocab.txt"
        proc = run_cli(
            "preprocess", "--corpus", corpus_tree / "train",
            "--vocab-out", vocab_out,
        )
        assert proc.returncode == 0
        assert "documents: 20" in proc.stdout
        assert "categories: cat00,cat01" in proc.stdout
        words = vocab_out.read_text(encoding="utf-8").split()
        assert len(words) == len(set(words)) <= 16

    def test_missing_corpus_exits_2(self, tmp_path):
        proc = run_cli("preprocess", "--corpus", tmp_path / "absent")
        assert proc.returncode == 2


class TestPipeline:
    def test_train_fold_classify(self, corpus_tree, tmp_path):
        model = tmp_path / "model.txt"
        train_csv = tmp_path / "train.csv"
        test_csv = tmp_path / "test.csv"
        proc = run_cli(
            "train", "--corpus", corpus_tree / "train", "--topics", "2",
            "--iterations", "8", "--seed", "3", "--out", model,
            "--features-out", train_csv,
        )
        assert proc.returncode == 0
        assert model.is_file()
        assert "final_log_likelihood:" in proc.stdout

        proc = run_cli(
            "fold-in", "--model", model, "--corpus", corpus_tree / "test",
            "--out", test_csv,
        )
        assert proc.returncode == 0
        doc_ids, vectors, labels = read_features_csv(test_csv)
        assert len(doc_ids) == 10
        assert all(len(v.probs) == 2 for v in vectors)

        predictions_out = tmp_path / "predictions.csv"
        arff_out = tmp_path / "features.arff"
        proc = run_cli(
            "classify", "--train-features", train_csv,
            "--test-features", test_csv, "--classifier", "logistic",
            "--predictions-out", predictions_out, "--arff-out", arff_out,
        )
        assert proc.returncode == 0
        assert "accuracy_pct:" in proc.stdout
        assert "confusion" in proc.stdout
        assert predictions_out.read_text(encoding="utf-8").startswith(
            "doc_id,gold,predicted"
        )
        assert arff_out.read_text(encoding="utf-8").startswith("@relation")

    def test_fold_in_missing_model_exits_2(self, corpus_tree, tmp_path):
        proc = run_cli(
            "fold-in", "--model", tmp_path / "absent.model",
            "--corpus", corpus_tree / "test", "--out", tmp_path / "f.csv",
        )
        assert proc.returncode == 2

    def test_classify_missing_features_exits_2(self, tmp_path):
        proc = run_cli(
            "classify", "--train-features", tmp_path / "a.csv",
            "--test-features", tmp_path / "b.csv", "--classifier", "svm",
        )
        assert proc.returncode == 2

    def test_nonfinite_model_exits_3(self, corpus_tree, tmp_path):
        bad = tmp_path / "bad.model"
        bad.write_text(
            "PLSA v1 K=1 D=1 W=1 seed=0 iters=1\nkata\nnan\n1.0\n1.0\n",
            encoding="utf-8",
        )
        proc = run_cli(
            "fold-in", "--model", bad, "--corpus", corpus_tree / "test",
            "--out", tmp_path / "f.csv",
        )
        assert proc.returncode == 3


class TestCell:
    def test_prints_header_and_row_without_timing(self, corpus_tree):
        proc = run_cli(
            "cell", "--train-corpus", corpus_tree / "train",
            "--test-corpus", corpus_tree / "test", "--topics", "2",
            "--iterations", "2", "--classifier", "svm", "--restarts", "2",
        )
        assert proc.returncode == 0
        lines = proc.stdout.splitlines()
        assert len(lines) == 2
        assert lines[0] == "train_size,topics,iterations,repeat,classifier,accuracy_pct"
        fields = lines[1].split(",")
        assert fields[:5] == ["20", "2", "2", "1", "svm"]
        assert 0.0 <= float(fields[5]) <= 100.0

    def test_train_size_subsets_pool(self, corpus_tree):
        proc = run_cli(
            "cell", "--train-corpus", corpus_tree / "train",
            "--test-corpus", corpus_tree / "test", "--topics", "2",
            "--iterations", "2", "--classifier", "logistic",
            "--train-size", "12", "--restarts", "2",
        )
        assert proc.returncode == 0
        assert proc.stdout.splitlines()[1].startswith("12,2,2,1,logistic,")

    def test_indivisible_train_size_exits_1(self, corpus_tree):
        proc = run_cli(
            "cell", "--train-corpus", corpus_tree / "train",
            "--test-corpus", corpus_tree / "test", "--topics", "2",
            "--iterations", "1", "--classifier", "svm", "--train-size", "13",
        )
        assert proc.returncode == 1


class TestGrid:
    def test_flags_only_grid(self, corpus_tree, tmp_path):
        out = tmp_path / "report.csv"
        proc = run_cli(
            "grid", "--train-corpus", corpus_tree / "train",
            "--test-corpus", corpus_tree / "test", "--train-sizes", "12,20",
            "--topics", "2", "--iterations", "1,2", "--repeats", "1",
            "--classifiers", "logistic", "--restarts", "1", "--out", out,
        )
        assert proc.returncode == 0
        report = parse_report(out)
        assert len(report.cells) == 4
        assert all(c.seconds is not None for c in report.cells)

    def test_config_file_with_flag_override(self, corpus_tree, tmp_path):
        out = tmp_path / "report.csv"
        cfg = tmp_path / "grid.cfg"
        cfg.write_text(
            f"train-corpus = {corpus_tree / 'train'}\n"
            f"test-corpus = {corpus_tree / 'test'}\n"
            "train-sizes = 20\n"
            "topics = 2\n"
            "iterations = 1,2\n"
            "repeats = 1\n"
            "classifiers = logistic\n"
            "restarts = 1\n"
            f"out = {out}\n",
            encoding="utf-8",
        )
        proc = run_cli("grid", "--config", cfg, "--iterations", "2")
        assert proc.returncode == 0
        report = parse_report(out)
        assert [c.iterations for c in report.cells] == [2]

    def test_unknown_config_key_exits_1(self, tmp_path):
        cfg = tmp_path / "grid.cfg"
        cfg.write_text("mystery = 1\n", encoding="utf-8")
        proc = run_cli("grid", "--config", cfg)
        assert proc.returncode == 1

    def test_missing_out_exits_1(self, corpus_tree):
        proc = run_cli(
            "grid", "--train-corpus", corpus_tree / "train",
            "--test-corpus", corpus_tree / "test",
        )
        assert proc.returncode == 1


class TestSummarize:
    def test_reference_tables_axis_table(self):
        proc = run_cli("summarize", "--reference-tables", "--axis", "iterations",
                       "--no-figures")
        assert proc.returncode == 0
        assert "axis: iterations" in proc.stdout
        for expected in ("1: 35%", "3: 43%", "5: 47%", "7: 52%",
                         "9: 53%", "10: 57%", "20: 65%"):
            assert expected in proc.stdout

    def test_out_dir_writes_csv_and_figures(self, tmp_path):
        out_dir = tmp_path / "summaries"
        proc = run_cli("summarize", "--reference-tables", "--out-dir", out_dir)
        assert proc.returncode == 0
        for axis in ("train_size", "topic_count", "iterations", "classifier"):
            csv_path = out_dir / f"summary_{axis}.csv"
            png_path = out_dir / f"summary_{axis}.png"
            assert csv_path.is_file()
            header = csv_path.read_text(encoding="utf-8").splitlines()[0]
            assert header == f"{axis},mean_accuracy_pct,display_pct"
            assert png_path.read_bytes()[:8] == PNG_MAGIC

    def test_no_figures_skips_pngs(self, tmp_path):
        out_dir = tmp_path / "summaries"
        proc = run_cli("summarize", "--reference-tables", "--axis", "classifier",
                       "--out-dir", out_dir, "--no-figures")
        assert proc.returncode == 0
        assert (out_dir / "summary_classifier.csv").is_file()
        assert not (out_dir / "summary_classifier.png").exists()

    def test_without_source_exits_1(self):
        assert run_cli("summarize").returncode == 1

    def test_missing_report_exits_2(self, tmp_path):
        proc = run_cli("summarize", "--report", tmp_path / "absent.csv")
        assert proc.returncode == 2


class TestGenSynth:
    def test_writes_loadable_tree(self, tmp_path):
        out = tmp_path / "synthetic"
        proc = run_cli(
            "gen-synth", "--out", out, "--categories", "2",
            "--train-per-category", "4", "--test-per-category", "2",
            "--doc-length", "5:8", "--seed", "11", "--source-balance",
        )
        assert proc.returncode == 0
        assert "train_documents: 8" in proc.stdout
        assert "source_balance" in proc.stdout
        check = run_cli("preprocess", "--corpus", out / "train")
        assert check.returncode == 0
        assert "documents: 8" in check.stdout
