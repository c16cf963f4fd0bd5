import json
from pathlib import Path

import pytest

from plexrecon.cli import main
from plexrecon.io_formats import load_multiplex

DATA = Path(__file__).resolve().parent.parent / "data"


def write_edges(tmp_path, text, name="net.edges"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestStats:
    def test_single_edge_layer_row(self, tmp_path, capsys):
        path = write_edges(tmp_path, "1 x y\n")
        assert main(["stats", path]) == 0
        out = capsys.readouterr().out.strip().split("\n")
        assert out[0].split() == [
            "layer", "active_nodes", "edges", "density_x1000",
            "avg_degree", "mean_cc_size", "gcc_size", "cov_cc_size",
        ]
        assert out[1].split() == ["1", "2", "1", "1000.00", "1.00", "2.00", "2", "0.00"]

    def test_empty_layer_flagged(self, tmp_path, capsys):
        path = write_edges(tmp_path, "1 x y\n2 z z\n")
        with pytest.warns(UserWarning):
            assert main(["stats", path]) == 0
        out = capsys.readouterr().out
        assert "2 empty" in out

    def test_parse_failure_exits_2(self, tmp_path, capsys):
        path = write_edges(tmp_path, "1 x\n")
        assert main(["stats", path]) == 2
        assert "line 1" in capsys.readouterr().err

    def test_stdin_input(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr("sys.stdin", io.StringIO("1 a b\n"))
        assert main(["stats", "-"]) == 0
        assert "1 2 1" in capsys.readouterr().out

    def test_fixture_tables(self, capsys):
        assert main(["stats", str(DATA / "london_transport_synthetic.edges")]) == 0
        out = capsys.readouterr().out
        assert "underground 260 225 6.68 1.73 5.65 98 2.48" in out
        assert "overground 81 62 19.14 1.53 4.26 17 0.83" in out
        assert "lightrail 44 34 35.94 1.55 4.00 8 0.54" in out


DEMO_NET = (
    "a 0 1\na 1 2\na 2 3\na 3 4\na 4 5\na 5 6\na 6 7\na 0 7\n"
    "b 0 2\nb 1 3\nb 2 4\nb 3 5\nb 4 6\nb 5 7\nb 0 1\nb 4 5\n"
)


class TestReconstruct:
    def run_cmd(self, tmp_path, path, extra=()):
        prefix = str(tmp_path / "out")
        argv = [
            "reconstruct", "--input", path, "--coverage", "0.75",
            "--seed", "3", "--out-prefix", prefix,
        ] + list(extra)
        code = main(argv)
        return code, prefix

    def test_writes_layer_files_and_metrics(self, tmp_path, capsys):
        path = write_edges(tmp_path, DEMO_NET)
        code, prefix = self.run_cmd(tmp_path, path, extra=["--trace", str(tmp_path / "t.csv")])
        assert code == 0
        assert Path(f"{prefix}_layer1.edges").exists()
        assert Path(f"{prefix}_layer2.edges").exists()
        payload = json.loads(Path(f"{prefix}_metrics.json").read_text())
        assert payload["method"] == "ema"
        assert "mcc" in payload["metrics"]
        assert (tmp_path / "t.csv").read_text().startswith("iteration,mae")
        out = capsys.readouterr().out
        assert "MCC=" in out and "iterations=" in out

    def test_full_coverage_notes_no_unobserved(self, tmp_path, capsys):
        path = write_edges(tmp_path, "a 0 1\nb 1 2\n")
        argv = [
            "reconstruct", "--input", path, "--coverage", "1.0",
            "--out-prefix", str(tmp_path / "full"),
        ]
        assert main(argv) == 0
        payload = json.loads((tmp_path / "full_metrics.json").read_text())
        assert payload["note"] == "no unobserved entries"
        assert payload["metrics"] == {}

    def test_ema_on_single_layer_exits_3(self, tmp_path, capsys):
        path = write_edges(tmp_path, "only 0 1\nonly 1 2\n")
        argv = [
            "reconstruct", "--input", path, "--coverage", "0.5",
            "--method", "ema", "--out-prefix", str(tmp_path / "x"),
        ]
        assert main(argv) == 3
        assert "2 layers" in capsys.readouterr().err

    def test_byte_identical_rerun(self, tmp_path):
        path = write_edges(tmp_path, DEMO_NET)
        outputs = []
        for sub in ("one", "two"):
            subdir = tmp_path / sub
            subdir.mkdir()
            prefix = str(subdir / "r")
            main([
                "reconstruct", "--input", path, "--coverage", "0.75",
                "--seed", "5", "--out-prefix", prefix,
                "--trace", str(subdir / "trace.csv"),
            ])
            outputs.append({
                p.name: p.read_bytes() for p in sorted(subdir.iterdir())
            })
        assert outputs[0] == outputs[1]


class TestExperiment:
    def spec_json(self, tmp_path):
        spec = {
            "node_count": 40, "layer_count": 2,
            "degree_law": "poisson:3", "overlap": 0.5, "seed": 4,
        }
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(spec))
        return str(path)

    def test_run_counts(self, tmp_path, capsys):
        out_dir = tmp_path / "exp"
        argv = [
            "experiment", "--synthetic-spec", self.spec_json(tmp_path),
            "--coverages", "0.4,0.8", "--reps", "3",
            "--methods", "ema,em", "--seed", "9",
            "--max-iters", "30", "--out", str(out_dir),
        ]
        assert main(argv) == 0
        runs = (out_dir / "runs.csv").read_text().strip().split("\n")
        assert len(runs) == 1 + 12  # header + 2 coverages x 3 reps x 2 methods
        assert (out_dir / "manifest.json").exists()

    def test_grid_syntax_gives_nine_groups(self, tmp_path):
        out_dir = tmp_path / "exp9"
        argv = [
            "experiment", "--synthetic-spec", self.spec_json(tmp_path),
            "--coverages", "0.1:0.9:0.1", "--reps", "1",
            "--methods", "rm", "--seed", "2", "--out", str(out_dir),
        ]
        assert main(argv) == 0
        summary = (out_dir / "summary.csv").read_text().strip().split("\n")
        assert len(summary) == 1 + 9

    def test_rerun_is_byte_identical(self, tmp_path):
        spec = self.spec_json(tmp_path)
        blobs = []
        for sub in ("e1", "e2"):
            out_dir = tmp_path / sub
            main([
                "experiment", "--synthetic-spec", spec,
                "--coverages", "0.4,0.6", "--reps", "2",
                "--methods", "ema,rm", "--seed", "31",
                "--max-iters", "30", "--out", str(out_dir),
            ])
            blobs.append((
                (out_dir / "runs.csv").read_bytes(),
                (out_dir / "summary.csv").read_bytes(),
            ))
        assert blobs[0] == blobs[1]

    def test_requires_exactly_one_dataset_flag(self, tmp_path, capsys):
        assert main(["experiment", "--out", str(tmp_path / "x")]) == 2
        assert main([
            "experiment", "--input", "a", "--synthetic-spec", "b",
            "--out", str(tmp_path / "y"),
        ]) == 2

    def test_inline_spec_json(self, tmp_path):
        out_dir = tmp_path / "inline"
        spec = (
            '{"node_count": 20, "layer_count": 2, '
            '"degree_law": "poisson:2", "overlap": 0.3, "seed": 1}'
        )
        argv = [
            "experiment", "--synthetic-spec", spec, "--coverages", "0.5",
            "--reps", "1", "--methods", "rm", "--seed", "3",
            "--out", str(out_dir),
        ]
        assert main(argv) == 0


class TestGenerate:
    def test_single_layer_file(self, tmp_path):
        out = tmp_path / "g.edges"
        argv = [
            "generate", "--nodes", "20", "--layers", "1",
            "--degree-law", "poisson:2.5", "--seed", "8", "--out", str(out),
        ]
        assert main(argv) == 0
        net = load_multiplex(out)
        assert net.layer_count == 1

    def test_full_overlap_superset(self, tmp_path):
        out = tmp_path / "g2.edges"
        main([
            "generate", "--nodes", "25", "--layers", "2", "--overlap", "1.0",
            "--degree-law", "poisson:2.5", "--seed", "8", "--out", str(out),
        ])
        net = load_multiplex(out)
        first = net.layers[0].adjacency
        assert (net.layers[1].adjacency[first == 1] == 1).all()

    def test_round_trip_validates(self, tmp_path):
        from plexrecon.core import validate

        out = tmp_path / "g3.edges"
        main([
            "generate", "--nodes", "30", "--layers", "3", "--overlap", "0.4",
            "--degree-law", "powerlaw:2.5:1", "--seed", "2", "--out", str(out),
        ])
        net = load_multiplex(out)
        assert validate(net).ok

    def test_bad_degree_law_exits_2(self, tmp_path, capsys):
        argv = [
            "generate", "--nodes", "10", "--layers", "1",
            "--degree-law", "zipf:2", "--out", str(tmp_path / "z.edges"),
        ]
        assert main(argv) == 2

    def test_stdout_output(self, capsys):
        assert main([
            "generate", "--nodes", "12", "--layers", "1",
            "--degree-law", "poisson:2", "--seed", "1",
        ]) == 0
        out = capsys.readouterr().out
        assert out.strip()
        assert all(len(line.split()) == 3 for line in out.strip().split("\n"))


class TestHelp:
    def test_reconstruct_help_documents_defaults(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["reconstruct", "--help"])
        assert exc.value.code == 0
        text = capsys.readouterr().out
        assert "1e-05" in text
        assert "per_layer" in text
        assert "200" in text
