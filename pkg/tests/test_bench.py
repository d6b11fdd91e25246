import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

from acoubench.bench import (
    ExperimentConfig,
    load_corpus,
    run_experiment,
    run_noise_sweep,
    significance_from_predictions,
    write_bundle,
)
from acoubench.cli import main as cli_main
from acoubench.errors import ParameterError, PipelineStageError, UnsupportedWavError
from acoubench.synth import FaultClass, GeneratorConfig, generate_sample, robustness_index
from acoubench.wavio import write_wav

TINY = {
    "data": {"source": "synthetic", "samples_per_class": 12},
    "cv": {"n_folds": 3, "holdout_fraction": 0.2},
    "noise": {"levels_db": [20.0]},
    "timing": {"enabled": False},
    "models": [
        {"kind": "knn", "params": {"k": 3}},
        {"kind": "rf", "params": {"n_trees": 5, "max_depth": 6}},
    ],
}


@pytest.fixture(scope="module")
def tiny_bundle():
    cfg = ExperimentConfig.from_dict(TINY, seed=77)
    return cfg, run_experiment(cfg)


class TestConfig:
    def test_seed_is_mandatory(self):
        with pytest.raises(ParameterError):
            ExperimentConfig.from_dict({"data": {"source": "synthetic"}})

    def test_zero_models_rejected_before_any_work(self):
        with pytest.raises(ParameterError):
            ExperimentConfig.from_dict({"models": []}, seed=1)

    def test_noise_levels_must_strictly_decrease(self):
        with pytest.raises(ParameterError):
            ExperimentConfig.from_dict({"noise": {"levels_db": [20, 30]}}, seed=1)

    def test_noise_sweep_requires_holdout(self):
        with pytest.raises(ParameterError, match="hold-out"):
            ExperimentConfig.from_dict(
                {"cv": {"holdout_fraction": 0.0}, "noise": {"levels_db": [20.0]}}, seed=1
            )

    def test_unknown_config_keys_rejected(self):
        with pytest.raises(ParameterError, match="modles"):
            ExperimentConfig.from_dict({"modles": []}, seed=1)

    def test_optional_nemenyi_constant_lands_in_friedman_csv(self, tmp_path):
        cfg = ExperimentConfig.from_dict(
            {**TINY, "stats": {"nemenyi_q_alpha": 2.85}}, seed=19,
            output_dir=str(tmp_path),
        )
        write_bundle(run_experiment(cfg), cfg.output_dir)
        text = (tmp_path / "friedman.csv").read_text()
        assert "nemenyi_critical_difference" in text
        assert "nemenyi_q_alpha,2.8500" in text

    def test_hash_ignores_output_dir(self):
        a = ExperimentConfig.from_dict(dict(TINY), seed=5, output_dir="/tmp/a")
        b = ExperimentConfig.from_dict(dict(TINY), seed=5, output_dir="/tmp/b")
        assert a.config_hash() == b.config_hash()

    def test_hash_tracks_seed(self):
        a = ExperimentConfig.from_dict(dict(TINY), seed=5)
        b = ExperimentConfig.from_dict(dict(TINY), seed=6)
        assert a.config_hash() != b.config_hash()

    def test_default_roster_has_six_models(self):
        cfg = ExperimentConfig.from_dict({}, seed=1)
        assert cfg.model_names() == ["knn", "svm", "rf", "gbt", "mlp", "ensemble"]


class TestRunExperiment:
    def test_bundle_shape(self, tiny_bundle):
        cfg, bundle = tiny_bundle
        assert bundle.model_names == ["knn", "rf"]
        for name in bundle.model_names:
            for metric in ("accuracy", "precision", "recall", "f1", "auc_roc", "mcc"):
                assert metric in bundle.metrics_mean[name]
        assert bundle.fold_f1.shape == (3, 2)
        assert bundle.noise_table is not None
        assert bundle.noise_conditions[0] == math.inf
        assert bundle.importance is not None
        assert bundle.importance.sum() == pytest.approx(1.0)

    def test_write_bundle_files(self, tiny_bundle, tmp_path):
        cfg, bundle = tiny_bundle
        written = write_bundle(bundle, tmp_path)
        for key in ("metrics", "significance", "friedman", "noise", "importance",
                    "domain_importance", "predictions", "manifest"):
            assert written[key].is_file(), key
        with open(written["metrics"], newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0][:2] == ["Algorithm", "Accuracy"]
        assert len(rows) == 1 + 2
        assert "±" in rows[1][1]  # mean ± std convention

    def test_manifest_determines_run(self, tiny_bundle):
        cfg, bundle = tiny_bundle
        assert bundle.manifest["config_hash"] == cfg.config_hash()
        assert bundle.manifest["seed"] == 77
        assert bundle.manifest["registry_version"] == "1.0"

    def test_byte_identical_reruns(self, tmp_path):
        outs = []
        for sub in ("one", "two"):
            cfg = ExperimentConfig.from_dict(TINY, seed=31, output_dir=str(tmp_path / sub))
            bundle = run_experiment(cfg)
            write_bundle(bundle, cfg.output_dir)
            outs.append(Path(cfg.output_dir))
        for rel in ("metrics.csv", "significance.csv", "friedman.csv", "noise.csv",
                    "importance.csv", "predictions.csv", "manifest.txt"):
            assert (outs[0] / rel).read_bytes() == (outs[1] / rel).read_bytes(), rel

    def test_predictions_csv_feeds_stats(self, tiny_bundle, tmp_path):
        cfg, bundle = tiny_bundle
        written = write_bundle(bundle, tmp_path)
        report = significance_from_predictions(written["predictions"])
        assert list(report.model_names) == bundle.model_names
        np.testing.assert_allclose(report.mcnemar_p, bundle.significance.mcnemar_p)
        assert report.friedman_chi2 == pytest.approx(bundle.significance.friedman_chi2)


class TestNoiseSweep:
    def test_infinite_level_reproduces_clean_f1(self):
        cfg = ExperimentConfig.from_dict(
            {**TINY, "noise": {"levels_db": []}}, seed=13
        )
        names, conditions, table, indices = run_noise_sweep(cfg, levels_db=[math.inf])
        for name in names:
            assert table[name][0] == pytest.approx(table[name][1])
            assert indices[name] == pytest.approx(np.mean(table[name]))

    def test_noise_sweep_emits_requested_levels(self):
        cfg = ExperimentConfig.from_dict(TINY, seed=13)
        names, conditions, table, indices = run_noise_sweep(cfg, levels_db=[40.0, 10.0])
        assert conditions == [math.inf, 40.0, 10.0]
        for name in names:
            assert len(table[name]) == 3
            assert indices[name] == pytest.approx(robustness_index(table[name]))


class TestLoadCorpus:
    @pytest.fixture
    def corpus(self, tmp_path):
        cfg = GeneratorConfig(samples_per_class=1, duration_s=0.5)
        wav_dir = tmp_path / "wavs"
        wav_dir.mkdir()
        rows = [["filename", "label"]]
        for cls in (FaultClass.NORMAL, FaultClass.MODERATE_FAULT, FaultClass.CRITICAL_FAULT):
            sig = generate_sample(cls, int(cls), cfg)
            peak = np.max(np.abs(sig.samples))
            scaled = sig.replace_samples(sig.samples / (peak * 1.01))
            name = f"sample_{int(cls)}.wav"
            write_wav(wav_dir / name, scaled)
            rows.append([name, int(cls)])
        labels = tmp_path / "labels.csv"
        with open(labels, "w", newline="") as fh:
            csv.writer(fh).writerows(rows)
        return wav_dir, labels

    def test_loads_and_extracts(self, corpus):
        wav_dir, labels = corpus
        ds = load_corpus(wav_dir, labels)
        assert len(ds) == 3
        assert ds.features.shape == (3, 127)
        np.testing.assert_array_equal(ds.labels, [0, 1, 2])  # densified

    def test_empty_directory_rejected(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        labels = tmp_path / "labels.csv"
        labels.write_text("filename,label\nx.wav,0\n")
        with pytest.raises(ParameterError, match="empty"):
            load_corpus(empty, labels)

    def test_missing_file_rejected_unless_permissive(self, corpus):
        wav_dir, labels = corpus
        with open(labels, "a", newline="") as fh:
            csv.writer(fh).writerow(["ghost.wav", 4])
        with pytest.raises(ParameterError, match="ghost.wav"):
            load_corpus(wav_dir, labels)
        with pytest.warns(UserWarning, match="skipped"):
            ds = load_corpus(wav_dir, labels, permissive=True)
        assert len(ds) == 3
        assert "ghost.wav" in ds.provenance["skipped"]

    def test_stereo_file_rejected_with_filename(self, corpus):
        import wave

        wav_dir, labels = corpus
        stereo = wav_dir / "stereo.wav"
        with wave.open(str(stereo), "wb") as wf:
            wf.setnchannels(2)
            wf.setsampwidth(2)
            wf.setframerate(16000)
            wf.writeframes(b"\x00\x00" * 8)
        with open(labels, "a", newline="") as fh:
            csv.writer(fh).writerow(["stereo.wav", 1])
        with pytest.raises(UnsupportedWavError, match="stereo.wav"):
            load_corpus(wav_dir, labels)

    def test_malformed_csv_rejected(self, corpus, tmp_path):
        wav_dir, _ = corpus
        bad = tmp_path / "bad.csv"
        bad.write_text("path,cls\na.wav,0\n")
        with pytest.raises(ParameterError, match="filename"):
            load_corpus(wav_dir, bad)


class TestCLI:
    def test_synth_extract_round_trip(self, tmp_path, capsys):
        corpus_dir = tmp_path / "corpus"
        rc = cli_main(
            [
                "synth", "--out", str(corpus_dir), "--seed", "3",
                "--samples-per-class", "2", "--duration", "0.5",
            ]
        )
        assert rc == 0
        assert (corpus_dir / "labels.csv").is_file()
        assert len(list(corpus_dir.glob("*.wav"))) == 10
        from acoubench.wavio import read_wav

        # the shared corpus gain keeps every sample inside 16-bit range
        for wav in corpus_dir.glob("*.wav"):
            assert np.max(np.abs(read_wav(wav).samples)) <= 0.99 + 1 / 32768

        features_csv = tmp_path / "features.csv"
        rc = cli_main(
            [
                "extract", "--wav-dir", str(corpus_dir),
                "--labels", str(corpus_dir / "labels.csv"),
                "--out", str(features_csv),
            ]
        )
        assert rc == 0
        with open(features_csv, newline="") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 1 + 10
        assert rows[0][0] == "Mean"
        assert rows[0][-1] == "label"

    def test_bench_cli_writes_bundle(self, tmp_path):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps(TINY))
        out = tmp_path / "out"
        rc = cli_main(
            ["bench", "--config", str(config_path), "--out", str(out), "--seed", "21"]
        )
        assert rc == 0
        assert (out / "metrics.csv").is_file()
        assert (out / "manifest.txt").is_file()

    def test_failure_is_stage_tagged_and_nonzero(self, tmp_path, capsys):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps({**TINY, "data": {"source": "wav",
                                           "directory": str(tmp_path / "nope"),
                                           "labels_csv": "none.csv"}}))
        rc = cli_main(
            ["bench", "--config", str(config_path), "--out", str(tmp_path / "o"), "--seed", "1"]
        )
        assert rc == 1
        err = capsys.readouterr().err
        assert "[data]" in err

    def test_noise_cli_writes_table(self, tmp_path):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps(TINY))
        out = tmp_path / "noise_out"
        rc = cli_main(
            [
                "noise", "--config", str(config_path), "--out", str(out),
                "--seed", "21", "--levels", "30,10",
            ]
        )
        assert rc == 0
        with open(out / "noise.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["Algorithm", "Clean", "SNR 30 dB", "SNR 10 dB", "Robustness Index"]
        assert len(rows) == 1 + 2

    def test_never_mutates_input_directory(self, tmp_path):
        corpus_dir = tmp_path / "corpus"
        cli_main(
            [
                "synth", "--out", str(corpus_dir), "--seed", "3",
                "--samples-per-class", "1", "--duration", "0.5",
            ]
        )
        before = sorted(p.name for p in corpus_dir.iterdir())
        features_csv = tmp_path / "f.csv"
        cli_main(
            [
                "extract", "--wav-dir", str(corpus_dir),
                "--labels", str(corpus_dir / "labels.csv"),
                "--out", str(features_csv),
            ]
        )
        after = sorted(p.name for p in corpus_dir.iterdir())
        assert before == after
