import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmlattice import fixtures
from cmlattice.cli import run
from cmlattice.errors import InvalidPair, ParseError, ValidationError
from cmlattice.linalg import QQ, FieldConfig
from cmlattice.problem import ComplexSpec, ProblemSpec, parse_problem, validate_problem
from cmlattice.report import CRITERIA, NuEntry, ReportDocument, Verdict, verdict

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

MINIMAL = """\
schema: 1
field: rationals
generators: [[1, 0], [0, 1]]
complex: all
"""


class TestParse:
    def test_minimal(self):
        spec = parse_problem(MINIMAL)
        assert spec.field == QQ
        assert spec.generators == ((1, 0), (0, 1))
        assert spec.complex == ComplexSpec("all")
        validate_problem(spec)

    def test_square_fixture(self):
        spec = parse_problem((FIXTURES / "square_cone.yaml").read_text())
        assert [list(g) for g in spec.generators] == [list(g) for g in fixtures.SQUARE_GENERATORS]
        cone, delta, pair = spec.build()
        assert len(cone.facet_normals) == 4 and len(cone.faces) == 10
        assert pair is None

    @pytest.mark.parametrize("path", sorted(p.name for p in FIXTURES.glob("*.yaml") if not p.name.startswith("nu_")))
    def test_every_shipped_problem_validates(self, path):
        validate_problem(parse_problem((FIXTURES / path).read_text()))

    def test_sigma_not_contained(self):
        text = MINIMAL.replace("complex: all", "complex: {delta_seeds: [[0]]}\nsigma: {delta_seeds: [[1]]}")
        spec = parse_problem(text)
        with pytest.raises(InvalidPair) as e:
            validate_problem(spec)
        assert e.value.code == "sigma-not-contained"

    def test_ideal_exponents(self):
        spec = parse_problem(MINIMAL.replace("complex: all", "complex: {ideal_exponents: [[1, 1]]}"))
        _, delta, _ = spec.build()
        assert len(delta) == 3

    def test_prime_field(self):
        assert parse_problem(MINIMAL.replace("rationals", "p:7")).field == FieldConfig("prime", 7)

    @pytest.mark.parametrize(
        "text, code",
        [
            ("schema: 1\ngenerators: [[1, 0], [0, 1]\n", "syntax"),
            (MINIMAL + "colour: red\n", "unknown-key"),
            ("schema: 1\ngenerators: [[1]]\n", "missing-key"),
            (MINIMAL.replace("schema: 1", "schema: 2"), "schema"),
            ("", "empty"),
        ],
    )
    def test_parse_errors(self, text, code):
        with pytest.raises(ParseError) as e:
            parse_problem(text)
        assert e.value.code == code

    @pytest.mark.parametrize(
        "old, new, code",
        [
            ("[[1, 0], [0, 1]]", "[[1, 0], [0, 1, 1]]", "length-mismatch"),
            ("rationals", "p:4", None),
            ("complex: all", "complex: all\nnormality_box: -1", "negative-box"),
        ],
    )
    def test_validation_errors(self, old, new, code):
        with pytest.raises(ValidationError) as e:
            parse_problem(MINIMAL.replace(old, new))
        if code:
            assert e.value.code == code

    def test_type_error_carries_a_line(self):
        text = MINIMAL.replace("[[1, 0], [0, 1]]", "\n  - [1, 0]\n  - [0, x]")
        with pytest.raises(ParseError) as e:
            parse_problem(text)
        assert e.value.code == "type"
        assert "line 5" in str(e.value) and "generators[1][1]" in str(e.value)

    def test_index_out_of_range(self):
        spec = parse_problem(MINIMAL.replace("complex: all", "complex: {delta_seeds: [[0, 5]]}"))
        with pytest.raises(ValidationError) as e:
            spec.build()
        assert e.value.code == "index-out-of-range"

    def test_text_round_trip(self):
        for path in FIXTURES.glob("*.yaml"):
            if path.name.startswith("nu_"):
                continue
            spec = parse_problem(path.read_text())
            assert parse_problem(spec.to_text()) == spec


class TestReport:
    def sample(self):
        return ReportDocument(
            command="analyze",
            field="q",
            generators=[(1, 0), (0, 1)],
            verdicts=[verdict("cm", True), verdict("serre_max", float("inf")), verdict("dim", float("-inf"))],
            nu_table=[NuEntry(0, [0], 1, 1), NuEntry(1, [], 0, 1)],
            seqcm_routes={"ext": True, "duval": True, "filtration": True},
            local_coh0=[0, 1, 0],
            data={"faces": [{"face": (0,), "cone_dim": 1}]},
            notes=["a note"],
        )

    def test_json_round_trip(self):
        doc = self.sample()
        back = ReportDocument.from_json(doc.to_json())
        assert back == doc
        assert back.to_json() == doc.to_json()

    def test_infinities_are_strings(self):
        d = json.loads(self.sample().to_json())
        assert {v["name"]: v["value"] for v in d["verdicts"]} == {"cm": True, "serre_max": "inf", "dim": "-inf"}

    def test_every_verdict_carries_a_criterion(self):
        doc = run("analyze", parse_problem((FIXTURES / "square_boundary.yaml").read_text()))
        assert all(v.criterion == CRITERIA[v.name] for v in doc.verdicts)

    def test_text_rendering(self):
        text = self.sample().to_text()
        assert "serre_max" in text and "inf" in text
        assert "nu-table" in text and "a note" in text

    def test_get(self):
        assert self.sample().get("cm") is True
        with pytest.raises(KeyError):
            self.sample().get("gcm")

    @given(st.dictionaries(st.text(min_size=1, max_size=5),
                           st.one_of(st.integers(), st.booleans(), st.lists(st.integers(), max_size=3)),
                           max_size=4))
    @settings(max_examples=50, deadline=None)
    def test_round_trip_of_arbitrary_data(self, data):
        doc = ReportDocument("faces", "q", [[1]], [Verdict("x", 1, "c")], data=data)
        assert ReportDocument.from_json(doc.to_json()) == doc


@pytest.mark.parametrize("command", ["faces", "analyze", "nu", "seqcm", "gorenstein", "localcoh0", "regularize"])
def test_reports_are_byte_identical_across_runs(command):
    spec = parse_problem((FIXTURES / "triangle_pendant.yaml").read_text())
    assert run(command, spec).to_json() == run(command, spec).to_json()
    assert run(command, spec).to_text() == run(command, spec).to_text()
