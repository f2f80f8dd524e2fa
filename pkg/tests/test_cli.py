"""End-to-end runs of ``flowcat.cli.main`` on the fixture documents."""

import json

import pytest

from flowcat import __version__
from flowcat.cli import main, parse_end, parse_sequence
from flowcat.config import ENVIRONMENT_KEYS
from flowcat.exceptions import InputError
from flowcat.horn_fill import horn_from_bimodules
from flowcat.serialization import dump


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for variable in ENVIRONMENT_KEYS.values():
        monkeypatch.delenv(variable, raising=False)


def run(capsys, *argv: str) -> tuple[int, str]:
    status = main(list(argv))
    return status, capsys.readouterr().out


class TestArguments:
    def test_version(self, capsys):
        status, out = run(capsys, "--version")

        assert status == 0
        assert __version__ in out

    def test_missing_command(self, capsys):
        assert main([]) == 2

    def test_bad_ring(self, capsys, fixtures_dir):
        status = main(
            ["homology", "--complex", str(fixtures_dir / "s2.json"), "--ring", "Q"]
        )

        assert status == 2

    def test_parse_sequence(self):
        assert parse_sequence("a,b|b| c ") == (("a", "b"), ("b",), ("c",))

    def test_empty_set_in_sequence(self):
        with pytest.raises(InputError):
            parse_sequence("a||c")

    @pytest.mark.parametrize("text", ["a", "x:a", "1:"])
    def test_bad_endpoint(self, text):
        with pytest.raises(InputError):
            parse_end(text)


class TestValidate:
    def test_broken_differential_fails(self, capsys, fixtures_dir):
        status, out = run(
            capsys, "validate", "--category", str(fixtures_dir / "broken_d2.json")
        )

        report = json.loads(out)
        assert status == 1
        assert report["ok"] is False
        assert report["violations"][0]["name"] == "FLOW_IDENTIFICATION"
        assert report["violations"][0]["location"] == ["a", "c"]

    def test_text_format(self, capsys, fixtures_dir):
        status, out = run(
            capsys,
            "validate",
            "--category",
            str(fixtures_dir / "broken_d2.json"),
            "--format",
            "text",
        )

        assert status == 1
        assert out.splitlines()[0] == "FAILED"
        assert "FLOW_IDENTIFICATION a/c" in out

    def test_corner_document(self, capsys, fixtures_dir):
        status, out = run(
            capsys, "validate", "--corner", str(fixtures_dir / "interval_corner.json")
        )

        assert status == 0
        assert json.loads(out)["ok"] is True

    def test_missing_file(self, capsys, tmp_path):
        status = main(["validate", "--category", str(tmp_path / "nope.json")])

        assert status == 2
        assert "not found" in capsys.readouterr().err


class TestMorse:
    def test_build_then_validate(self, capsys, fixtures_dir, tmp_path):
        target = tmp_path / "s2-flow.json"

        assert main(
            ["morse", "build", "--complex", str(fixtures_dir / "s2.json"),
             "--out", str(target)]
        ) == 0
        status, out = run(capsys, "validate", "--category", str(target))

        assert status == 0
        assert json.loads(out)["ok"] is True
        assert [o["id"] for o in json.loads(target.read_text())["objects"]] == [
            "1",
            "1,2,3",
        ]

    def test_cyclic_matching_is_a_failed_check(self, capsys, fixtures_dir, tmp_path):
        matching = tmp_path / "cycle.json"
        matching.write_text(
            json.dumps({"pairs": [[[0], [0, 1]], [[1], [1, 2]], [[2], [0, 2]]]})
        )
        circle = tmp_path / "circle.json"
        circle.write_text(json.dumps({"simplices": [[0, 1], [1, 2], [0, 2]]}))

        status, out = run(
            capsys, "morse", "build", "--complex", str(circle),
            "--matching", str(matching),
        )

        error = json.loads(out)["error"]
        assert status == 1
        assert error["code"] == 706
        assert len(error["witness"]) == 6

    def test_homology_text(self, capsys, fixtures_dir):
        status, out = run(
            capsys, "homology", "--complex", str(fixtures_dir / "s2.json"),
            "--format", "text",
        )

        assert status == 0
        assert out.splitlines() == ["H0 = Z", "H1 = 0", "H2 = Z"]

    def test_homology_csv(self, capsys, fixtures_dir):
        status, out = run(
            capsys, "homology", "--complex", str(fixtures_dir / "s2.json"),
            "--format", "csv",
        )

        assert status == 0
        assert out.splitlines()[0] == "degree,rank,torsion,group"

    def test_morse_homology_of_a_matching(self, capsys, fixtures_dir):
        status, out = run(
            capsys, "homology", "--complex", str(fixtures_dir / "s2.json"),
            "--matching", "greedy", "--format", "text",
        )

        assert status == 0
        assert out.splitlines() == ["H0 = Z", "H1 = 0", "H2 = Z"]


class TestBimodules:
    def test_les_of_the_degree_two_map(self, capsys, fixtures_dir):
        status, out = run(
            capsys, "les", "--bimodule", str(fixtures_dir / "times2_s1.json")
        )

        assert status == 0
        assert json.loads(out)["ok"] is True
        assert "Z/2" in out

    def test_compose(self, capsys, fixtures_dir):
        path = str(fixtures_dir / "times2_s1.json")

        status, out = run(capsys, "compose", "--first", path, "--second", path)

        assert status == 0
        assert json.loads(out)["schema"] == "flowcat-simplex-v1"

    def test_hornfill_writes_the_filled_simplex(
        self, capsys, times2_bimodule, tmp_path
    ):
        horn = tmp_path / "horn.json"
        filled = tmp_path / "filled.json"
        dump(horn_from_bimodules(times2_bimodule, times2_bimodule), horn)

        status, out = run(
            capsys, "hornfill", "--horn", str(horn), "--k", "1",
            "--filled", str(filled),
        )

        assert status == 0
        assert json.loads(out)["ok"] is True
        assert filled.exists()


class TestGeometry:
    def test_arcs_enum(self, capsys):
        status, out = run(
            capsys, "arcs", "enum", "--sequence", "a|b|c", "--max-codim", "0",
            "--format", "text",
        )

        assert status == 0
        assert len(out.splitlines()) == 6

    def test_arcs_codim1(self, capsys):
        status, out = run(
            capsys, "arcs", "codim1", "--sequence", "a|b|c",
            "--source", "0:a", "--target", "2:c",
        )

        kinds = sorted(s["kind"] for s in json.loads(out))
        assert status == 0
        assert kinds == ["break", "break", "break", "forget_vertex"]

    def test_arcs_faces_check(self, capsys):
        status, _ = run(
            capsys, "arcs", "faces-check", "--sequence", "a|b|c", "--max-codim", "2"
        )

        assert status == 0

    def test_lblock_facets(self, capsys):
        status, out = run(capsys, "lblock", "facets", "--d", "2")

        data = json.loads(out)
        assert status == 0
        assert data["count"] == data["expected"]

    def test_export_dot(self, capsys, fixtures_dir):
        status, out = run(
            capsys, "export", "dot", "--corner",
            str(fixtures_dir / "interval_corner.json"),
        )

        assert status == 0
        assert out.startswith("digraph corner")
