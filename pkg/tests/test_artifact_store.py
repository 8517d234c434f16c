import csv
import json

import pytest

from idealforge.clients.artifact_store import ArtifactStore, parse_dimacs, render_dimacs, render_text
from idealforge.core.errors import InvalidInputError
from idealforge.models.family import SetFamily
from idealforge.models.schemas import OutputFormat
from idealforge.services.oracle_service import OracleService
from tests.conftest import make_constructions


@pytest.fixture
def store(tmp_path):
    return ArtifactStore(tmp_path)


@pytest.fixture
def forty_nine():
    return make_constructions().build_block(49)


def test_family_document_carries_count_as_string(store, forty_nine):
    path = store.write_family(forty_nine)
    document = json.loads(path.read_text())
    assert document["exact_count"] == "49"
    assert document["members"][0] == [[3, 1]]
    family, count = ArtifactStore.read_family(path)
    assert count == 49
    assert family.canonical_members() == forty_nine.family.canonical_members()


def test_trace_document_reads_back(store, forty_nine):
    _, trace_path = store.write_certified(forty_nine)
    trace = ArtifactStore.read_trace(trace_path)
    assert trace == forty_nine.trace


def test_read_family_rejects_other_json(store):
    path = store._write("bad.json", '{"members": "nope", "exact_count": "1"}')
    with pytest.raises(InvalidInputError):
        ArtifactStore.read_family(path)
    with pytest.raises(InvalidInputError):
        ArtifactStore.read_json(store.path("missing.json"))


def test_dimacs_round_trip(formulas, forty_nine):
    dnf = formulas.family_to_dnf(forty_nine.family)
    text = render_dimacs(dnf, 49)
    assert text.splitlines()[-1] == "c exact-count 49"
    assert f"p dnf {dnf.num_vars} {len(dnf.terms)}" in text
    parsed, count = parse_dimacs(text)
    assert count == 49
    assert parsed.canonical_terms() == dnf.canonical_terms()
    assert parsed.variables == dnf.variables


def test_dimacs_needs_padding_for_empty_terms(formulas):
    dnf = formulas.family_to_dnf(SetFamily.of([[]]))
    with pytest.raises(InvalidInputError):
        render_dimacs(dnf, 1)
    padded, count = parse_dimacs(render_dimacs(formulas.pad(dnf), 1))
    assert padded.padded
    assert formulas.dnf_count(padded) == count == 1


@pytest.mark.parametrize(
    "text",
    [
        "p dnf 2 1\n1 0\n",
        "p dnf 2 2\n1 0\nc exact-count 3\n",
        "p xor 2 1\n1 0\nc exact-count 2\n",
        "1 0\np dnf 2 1\nc exact-count 2\n",
        "p dnf 2 1\n1\nc exact-count 2\n",
        "p dnf 2 1\n1 x 0\nc exact-count 3\n",
        "p dnf two 1\n1 0\nc exact-count 3\n",
        "p dnf 2 1\n1 0\nc exact-count lots\n",
        "c var 1 a 1\np dnf 2 1\n1 0\nc exact-count 3\n",
    ],
)
def test_parse_dimacs_rejects_malformed_input(text):
    with pytest.raises(InvalidInputError):
        parse_dimacs(text)


def test_render_text_lists_every_term(formulas, forty_nine):
    cnf = formulas.family_to_cnf(forty_nine.family)
    text = render_text(cnf, 49)
    assert text.startswith("# cnf over 7 variables, 3 lines, 49 falsifying assignments")
    assert len(text.splitlines()) == 4


@pytest.mark.parametrize("fmt, suffix", [(OutputFormat.json, ".json"), (OutputFormat.text, ".txt")])
def test_write_formula_formats(store, formulas, forty_nine, fmt, suffix):
    path = store.write_formula(formulas.family_to_dnf(forty_nine.family), 49, fmt)
    assert path.suffix == suffix
    if fmt == OutputFormat.json:
        formula, count = ArtifactStore.read_formula(path)
        assert count == 49
        assert formulas.exact_count(formula) == 49


def test_write_bounds_csv(store):
    records = OracleService(max_universe=6, max_members=4).bounds_table(4)
    path = store.write_bounds_csv([(r, 1, 2) for r in records])
    rows = list(csv.DictReader(path.read_text().splitlines()))
    assert [row["k"] for row in rows] == ["1", "2", "3", "4"]
    assert rows[2]["alpha"] == "2"
