import json

import pytest
import sympy

from flowcat import ErrorCode, InputError
from flowcat._canonical import PROJECTIVE_PLANE
from flowcat.corner_model import is_corner_model
from flowcat.flow_data import canonical_category
from flowcat.morse import simplicial_homology
from flowcat.serialization import (
    category_dot,
    corner_dot,
    dump,
    dumps,
    homology_csv,
    load_category,
    load_complex,
    load_corner,
    load_matching,
    matrix_csv,
    read_json,
    simplex_dot,
)


class TestJson:
    def test_dumps_is_canonical(self, circle_category):
        shuffled = circle_category.model_copy(
            update={"objects": tuple(reversed(circle_category.objects))}
        )

        text = dumps(circle_category)

        assert text == dumps(shuffled)
        assert text.endswith("}\n")
        assert json.loads(text)["schema"] == "flowcat-category-v1"

    def test_reload(self, circle_category):
        reloaded = load_category(json.loads(dumps(circle_category)))

        assert reloaded == canonical_category(circle_category)

    def test_dump_to_file(self, tmp_path, circle_category):
        target = tmp_path / "circle.json"

        dump(circle_category, target)

        assert load_category(target) == canonical_category(circle_category)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputError) as exc_info:
            read_json(tmp_path / "nope.json")

        assert exc_info.value.code == ErrorCode.INPUT_FILE_NOT_FOUND

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")

        with pytest.raises(InputError) as exc_info:
            read_json(path)

        assert exc_info.value.code == ErrorCode.INPUT_INVALID_JSON

    def test_schema_violation_names_the_field(self):
        with pytest.raises(InputError) as exc_info:
            load_category({"objects": [{"id": ""}]})

        assert exc_info.value.code == ErrorCode.INPUT_SCHEMA_VIOLATION
        assert "objects.0.id" in str(exc_info.value)


class TestComplexDocuments:
    def test_load_complex_document(self, fixtures_dir):
        K = load_complex(fixtures_dir / "s2.json")

        assert K.f_vector == (4, 6, 4)

    def test_bare_list(self):
        assert load_complex([["a", "b"]]).f_vector == (2, 1)

    def test_document_without_simplices(self):
        with pytest.raises(InputError) as exc_info:
            load_complex({"faces": [[0, 1]]})

        assert exc_info.value.code == ErrorCode.INPUT_SCHEMA_VIOLATION

    def test_load_matching(self):
        V = load_matching({"pairs": [[[0], [0, 1]]]})

        assert V.pairs == ((("0",), ("0", "1")),)


class TestCornerDocuments:
    def test_poset_document(self, fixtures_dir):
        C = load_corner(fixtures_dir / "interval_corner.json")

        assert len(C.objects) == 3
        assert C.codim("0") == 1
        assert is_corner_model(C).ok

    def test_unknown_arrow_in_composition(self):
        document = {
            "objects": [{"id": "a", "codim": 0}, {"id": "b", "codim": 1}],
            "arrows": [
                {"id": "id_a", "source": "a", "target": "a"},
                {"id": "id_b", "source": "b", "target": "b"},
                {"id": "f", "source": "a", "target": "b"},
            ],
            "composition": [{"second": "f", "first": "g", "result": "f"}],
        }

        with pytest.raises(InputError) as exc_info:
            load_corner(document)

        assert exc_info.value.code == ErrorCode.INPUT_UNKNOWN_REFERENCE

    def test_negative_codimension(self):
        with pytest.raises(InputError) as exc_info:
            load_corner({"objects": [{"id": "a", "codim": -1}]})

        assert exc_info.value.code == ErrorCode.INPUT_SCHEMA_VIOLATION


class TestDot:
    def test_category_dot(self, circle_category):
        source = category_dot(circle_category)

        assert source.startswith("digraph flowcat")
        assert "2c" in source
        assert "rank=same" in source

    def test_simplex_dot_clusters_vertices(self, times2_bimodule):
        source = simplex_dot(times2_bimodule)

        assert "cluster_0" in source
        assert "cluster_1" in source

    def test_corner_dot(self, fixtures_dir):
        source = corner_dot(load_corner(fixtures_dir / "interval_corner.json"))

        assert source.count("->") == 2
        assert "codim 1" in source


class TestCsv:
    def test_matrix_csv_quotes_cell_ids(self):
        text = matrix_csv(
            sympy.Matrix([[1, 0], [0, -1]]), ["1", "1,2"], ["0", "0,2"]
        )

        assert text == ',0,"0,2"\n1,1,0\n"1,2",0,-1\n'

    def test_homology_csv(self):
        text = homology_csv(simplicial_homology(PROJECTIVE_PLANE.build()))

        assert text.splitlines() == [
            "degree,rank,torsion,group",
            "0,1,,Z",
            "1,0,2,Z/2",
            "2,0,,0",
        ]
