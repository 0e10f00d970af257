"""
Integration tests for the command-line interface
"""
import json

import numpy as np
import pandas as pd
import pytest

from services.ricci.app.commands import curvature as curvature_command
from services.ricci.app.errors import CurvatureError
from services.ricci.app.fileio import parse_trajectory, read_edit_log, read_trajectory, serialize_trajectory, write_trajectory
from services.ricci.app.main import main
from services.ricci.app.models import Trajectory, build_from_cells, build_from_edges
from tests.conftest import complete_graph, path_graph

pytestmark = pytest.mark.integration


def write_graph(tmp_path, name, *frames):
    path = tmp_path / name
    write_trajectory(Trajectory(frames=frames), path)
    return str(path)


@pytest.fixture
def p4_file(tmp_path, p4_graph):
    return write_graph(tmp_path, "p4.mgj", p4_graph)


@pytest.fixture
def mesh_file(tmp_path):
    """Small refined cylinder mesh with two frames"""
    path = tmp_path / "mesh.mgj"
    argv = ["gen", "--nx", "20", "--ny", "8", "--obstacle", "0.5,0.5,0.15", "--refine", "0.2", "--frames", "2", "-o", str(path)]
    assert main(argv) == 0
    return str(path)


class TestGen:
    """Test mesh generation"""

    def test_smoke(self, tmp_path, capsys):
        """Test that gen writes a readable trajectory"""
        out = tmp_path / "grid.mgj"
        assert main(["gen", "--nx", "6", "--ny", "4", "-o", str(out)]) == 0
        t = read_trajectory(out)
        assert t.frames[0].node_count == 35
        assert "1 frames, 35 nodes" in capsys.readouterr().out

    def test_file_is_canonical(self, mesh_file):
        """Test that the written file reparses to the same bytes"""
        with open(mesh_file) as f:
            text = f.read()
        assert serialize_trajectory(parse_trajectory(text)) == text

    def test_invalid_grid(self, tmp_path, capsys):
        """Test that a one-cell grid is a usage error naming its flag"""
        assert main(["gen", "--nx", "1", "-o", str(tmp_path / "x.mgj")]) == 2
        assert "--nx" in capsys.readouterr().err

    def test_invalid_obstacle(self, tmp_path, capsys):
        """Test that an obstacle needs three numbers"""
        assert main(["gen", "--obstacle", "1,2", "-o", str(tmp_path / "x.mgj")]) == 2
        assert "--obstacle" in capsys.readouterr().err

    def test_unknown_flag(self, tmp_path):
        """Test that argparse errors map to exit code 2"""
        assert main(["gen", "--bogus", "-o", str(tmp_path / "x.mgj")]) == 2


class TestCurvature:
    """Test the curvature command"""

    def test_triangle(self, tmp_path):
        """Test that every K_3 edge has curvature 1/2"""
        source = write_graph(tmp_path, "k3.mgj", complete_graph(3))
        out = tmp_path / "report.json"
        assert main(["curvature", source, "--out", str(out)]) == 0
        edges = pd.read_csv(tmp_path / "report_edges.csv")
        assert list(edges.columns) == ["frame", "i", "j", "kappa"]
        assert len(edges) == 3
        assert edges["kappa"].tolist() == pytest.approx([0.5, 0.5, 0.5])
        nodes = pd.read_csv(tmp_path / "report_nodes.csv")
        assert nodes["gamma"].tolist() == pytest.approx([0.5, 0.5, 0.5])
        summary = json.loads(out.read_text())
        assert summary[0]["min"] == pytest.approx(0.5)
        assert summary[0]["edge_count"] == 3

    def test_frames_share_one_table(self, tmp_path):
        """Test that rows carry their frame and stay sorted within each frame"""
        path = tmp_path / "two.mgj"
        write_trajectory(Trajectory(frames=(complete_graph(3), path_graph(3)), static_mesh=False), path)
        out = tmp_path / "two.json"
        assert main(["curvature", str(path), "--out", str(out)]) == 0
        edges = pd.read_csv(tmp_path / "two_edges.csv")
        assert edges["frame"].tolist() == [0, 0, 0, 1, 1]
        assert edges[edges["frame"] == 1][["i", "j"]].values.tolist() == [[0, 1], [1, 2]]
        nodes = pd.read_csv(tmp_path / "two_nodes.csv")
        assert list(nodes.columns) == ["frame", "i", "gamma"]
        assert nodes.groupby("frame").size().tolist() == [3, 3]

    def test_edgeless_frame(self, tmp_path):
        """Test that a frame without cells yields empty tables"""
        source = write_graph(tmp_path, "empty.mgj", build_from_cells(np.zeros((2, 2)), []))
        out = tmp_path / "report.json"
        assert main(["curvature", source, "--out", str(out)]) == 0
        assert (tmp_path / "report_edges.csv").read_text() == "frame,i,j,kappa\n"
        assert json.loads(out.read_text())[0]["min"] is None

    def test_curvature_failure(self, tmp_path, p4_file, capsys, monkeypatch):
        """Test that a transport failure exits with code 3 and names the frame"""
        def failing(*args, **kwargs):
            raise CurvatureError("infinite transport cost", edge=(0, 1))

        monkeypatch.setattr(curvature_command, "full_report", failing)
        assert main(["curvature", p4_file, "--out", str(tmp_path / "c.json")]) == 3
        err = capsys.readouterr().err
        assert "frame=0" in err and "edge=(0,1)" in err

    def test_missing_input(self, tmp_path, capsys):
        """Test that a missing input file is a usage error"""
        assert main(["curvature", str(tmp_path / "nope.mgj")]) == 2
        assert "not found" in capsys.readouterr().err


class TestRewire:
    """Test rewire and replay"""

    def test_cardinality(self, tmp_path, mesh_file):
        """Test that each frame adds at most floor(delta |V|) edges"""
        out, log_path = tmp_path / "out.mgj", tmp_path / "edits.json"
        assert main(["rewire", mesh_file, "--delta", "0.05", "-o", str(out), "--log", str(log_path)]) == 0
        original = read_trajectory(mesh_file)
        rewired = read_trajectory(out)
        log = read_edit_log(log_path)
        limit = int(np.floor(0.05 * original.frames[0].node_count))
        assert len(log.frames) == 2
        for frame, edits, before in zip(rewired.frames, log.frames, original.frames):
            assert 0 < len(edits.added) <= limit
            assert before.edge_set <= frame.edge_set

    def test_replay_is_byte_identical(self, tmp_path, mesh_file):
        """Test that replaying the log reproduces the rewired file"""
        out, log_path, again = tmp_path / "out.mgj", tmp_path / "edits.json", tmp_path / "again.mgj"
        assert main(["rewire", mesh_file, "--delta", "0.05", "--action", "both", "-o", str(out), "--log", str(log_path)]) == 0
        assert main(["replay", mesh_file, "--log", str(log_path), "-o", str(again)]) == 0
        assert again.read_bytes() == out.read_bytes()

    def test_deterministic(self, tmp_path, mesh_file):
        """Test that two runs without timings write identical files"""
        outputs = []
        for run in ("a", "b"):
            out, log_path = tmp_path / f"{run}.mgj", tmp_path / f"{run}.json"
            argv = ["rewire", mesh_file, "--latter", "random", "--seed", "7", "--no-timings", "-o", str(out), "--log", str(log_path)]
            assert main(argv) == 0
            outputs.append((out.read_bytes(), log_path.read_bytes()))
        assert outputs[0] == outputs[1]

    def test_first_frame_mode(self, tmp_path, mesh_file):
        """Test that first_frame mode logs identical additions for every frame"""
        out, log_path = tmp_path / "out.mgj", tmp_path / "edits.json"
        assert main(["rewire", mesh_file, "--mode", "first_frame", "-o", str(out), "--log", str(log_path)]) == 0
        log = read_edit_log(log_path)
        assert log.frames[0].added == log.frames[1].added
        assert read_trajectory(out).static_mesh

    def test_baseline_params(self, tmp_path, p4_file):
        """Test that --param reaches a baseline"""
        out, log_path = tmp_path / "out.mgj", tmp_path / "edits.json"
        argv = ["rewire", p4_file, "--method", "fosr", "--param", "max_iterations=1", "-o", str(out), "--log", str(log_path)]
        assert main(argv) == 0
        assert len(read_edit_log(log_path).frames[0].added) == 1

    def test_missing_pressure(self, tmp_path, p4_file, capsys):
        """Test that a missing target field exits with code 4"""
        argv = ["rewire", p4_file, "--delta", "0.25", "--latter", "pressure", "-o", str(tmp_path / "o.mgj"), "--log", str(tmp_path / "l.json")]
        assert main(argv) == 4
        assert "pressure" in capsys.readouterr().err

    def test_invalid_delta(self, tmp_path, p4_file, capsys):
        """Test that an out-of-range ratio names --delta"""
        argv = ["rewire", p4_file, "--delta", "0", "-o", str(tmp_path / "o.mgj"), "--log", str(tmp_path / "l.json")]
        assert main(argv) == 2
        assert "--delta" in capsys.readouterr().err

    def test_bad_param(self, tmp_path, p4_file):
        """Test that malformed --param values are usage errors"""
        argv = ["rewire", p4_file, "--method", "sdrf", "--param", "max_iterations", "-o", str(tmp_path / "o.mgj"), "--log", str(tmp_path / "l.json")]
        assert main(argv) == 2

    def test_replay_frame_mismatch(self, tmp_path, p4_file, mesh_file):
        """Test that a log for another trajectory is rejected"""
        log_path = tmp_path / "edits.json"
        assert main(["rewire", mesh_file, "-o", str(tmp_path / "o.mgj"), "--log", str(log_path)]) == 0
        assert main(["replay", p4_file, "--log", str(log_path), "-o", str(tmp_path / "r.mgj")]) == 2


class TestDiagnose:
    """Test structure diagnostics"""

    def test_path_resistance(self, tmp_path):
        """Test that P_3 reports total effective resistance 4"""
        source = write_graph(tmp_path, "p3.mgj", path_graph(3))
        out = tmp_path / "diag.json"
        assert main(["diagnose", source, "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["total_effective_resistance"] == pytest.approx(4.0)
        histogram = pd.read_csv(tmp_path / "diag_histogram.csv")
        assert histogram["count"].sum() == 2

    def test_disconnected(self, tmp_path, capsys):
        """Test exit code 5 and the --skip-resistance escape"""
        source = write_graph(tmp_path, "split.mgj", build_from_edges(np.zeros((4, 2)), [(0, 1), (2, 3)]))
        out = tmp_path / "diag.json"
        assert main(["diagnose", source, "--out", str(out)]) == 5
        assert "error:" in capsys.readouterr().err
        assert main(["diagnose", source, "--skip-resistance", "--out", str(out)]) == 0
        assert json.loads(out.read_text())["total_effective_resistance"] is None

    def test_compare(self, tmp_path, capsys):
        """Test a before/after comparison"""
        before = write_graph(tmp_path, "p3.mgj", path_graph(3))
        after = write_graph(tmp_path, "k3.mgj", complete_graph(3))
        out = tmp_path / "cmp.json"
        assert main(["diagnose", before, after, "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["deltas"]["total_effective_resistance"] == pytest.approx(-2.0)
        assert "delta total effective resistance" in capsys.readouterr().out
        assert set(pd.read_csv(tmp_path / "cmp_histogram.csv")["graph"]) == {"before", "after"}

    def test_frame_out_of_range(self, tmp_path, p4_file):
        """Test that --frame must name an existing frame"""
        assert main(["diagnose", p4_file, "--frame", "3", "--out", str(tmp_path / "d.json")]) == 2


class TestBenchAndSweep:
    """Test the timing and ratio sweep harnesses"""

    def test_bench_rows(self, tmp_path, mesh_file):
        """Test one row per method and edge count"""
        out = tmp_path / "timings.csv"
        argv = ["bench", mesh_file, "--methods", "piorf,fosr", "--edge-counts", "2,4", "--repeats", "1", "--out", str(out)]
        assert main(argv) == 0
        table = pd.read_csv(out)
        assert list(table.columns) == ["method", "edges_added", "seconds"]
        assert table[["method", "edges_added"]].values.tolist() == [["piorf", 2], ["piorf", 4], ["fosr", 2], ["fosr", 4]]
        assert (table["seconds"] >= 0.0).all()

    def test_bench_no_counts(self, tmp_path, p4_file):
        """Test that an empty edge-count list writes only the header"""
        out = tmp_path / "timings.csv"
        assert main(["bench", p4_file, "--edge-counts=", "--out", str(out)]) == 0
        assert out.read_text() == "method,edges_added,seconds\n"

    def test_bench_unknown_method(self, tmp_path, p4_file, capsys):
        """Test that unknown methods are usage errors"""
        assert main(["bench", p4_file, "--methods", "gtr", "--out", str(tmp_path / "t.csv")]) == 2
        assert "--methods" in capsys.readouterr().err

    def test_bench_skips_digl(self, tmp_path, p4_file):
        """Test that DIGL is left out of the timing table"""
        out = tmp_path / "timings.csv"
        assert main(["bench", p4_file, "--methods", "digl", "--edge-counts", "1", "--out", str(out)]) == 0
        assert out.read_text() == "method,edges_added,seconds\n"

    def test_sweep(self, tmp_path, p4_file):
        """Test one row per ratio"""
        out = tmp_path / "sweep.csv"
        assert main(["sweep", p4_file, "--deltas", "0.25,0.5", "--out", str(out)]) == 0
        table = pd.read_csv(out)
        assert table["delta"].tolist() == [0.25, 0.5]
        assert table["edges_added"].tolist() == [1, 2]
        assert table["total_effective_resistance"].notna().all()
