"""Parsing, sorting, and the canonical CSV round trip."""

from __future__ import annotations

from datetime import datetime, timezone

import pytest
from hypothesis import given, strategies as st

from hetree.errors import EmptyDatasetError, MixedKindError
from hetree.ingest import (
    DataObject,
    Dataset,
    NUMERIC,
    TEMPORAL,
    parse_csv,
    parse_ntriples,
    serialize_csv,
    sort_dataset,
)

from conftest import AGE_IRI, AGES, PERSON, XSD_INT, ages_csv, ages_ntriples

XSD_DATE = "http://www.w3.org/2001/XMLSchema#date"


class TestParseNTriples:
    def test_running_example(self):
        ds = parse_ntriples(ages_ntriples())
        assert len(ds) == 10
        assert ds.kind == NUMERIC
        assert ds.predicate == AGE_IRI
        assert (ds.minv, ds.maxv) == (20.0, 100.0)

    def test_empty_stream(self):
        with pytest.raises(EmptyDatasetError):
            parse_ntriples("")

    def test_date_literal_epoch_ms(self):
        line = f'<urn:s> <urn:p> "2000-01-01"^^<{XSD_DATE}> .\n'
        ds = parse_ntriples(line)
        expected = (datetime(2000, 1, 1, tzinfo=timezone.utc)
                    - datetime(1970, 1, 1, tzinfo=timezone.utc)).total_seconds() * 1000.0
        assert ds.kind == TEMPORAL
        assert ds.objects[0].value == expected

    def test_malformed_lines_counted(self):
        text = ages_ntriples() + "this is not a triple\n<urn:a> <urn:b> broken .\n"
        ds = parse_ntriples(text)
        assert len(ds) == 10
        assert ds.skipped == 2

    def test_unparseable_lexical_counted(self):
        text = ages_ntriples() + f'<urn:x> <{AGE_IRI}> "elderly"^^<{XSD_INT}> .\n'
        ds = parse_ntriples(text)
        assert len(ds) == 10
        assert ds.skipped == 1

    def test_most_frequent_predicate_wins(self):
        text = ages_ntriples() + f'<urn:x> <urn:other> "1"^^<{XSD_INT}> .\n'
        ds = parse_ntriples(text)
        assert ds.predicate == AGE_IRI
        assert ds.ineligible == 1

    def test_predicate_filter(self):
        text = ages_ntriples() + f'<urn:x> <urn:other> "7"^^<{XSD_INT}> .\n'
        ds = parse_ntriples(text, predicate_filter="urn:other")
        assert len(ds) == 1
        assert ds.objects[0].value == 7.0

    def test_mixed_kinds_error_names_predicate(self):
        text = (f'<urn:a> <urn:p> "1"^^<{XSD_INT}> .\n'
                f'<urn:b> <urn:p> "2000-01-01"^^<{XSD_DATE}> .\n')
        with pytest.raises(MixedKindError, match="urn:p"):
            parse_ntriples(text)

    def test_non_finite_rejected(self):
        double = "http://www.w3.org/2001/XMLSchema#double"
        text = f'<urn:a> <urn:p> "INF"^^<{double}> .\n'
        with pytest.raises(EmptyDatasetError):
            parse_ntriples(text)


class TestParseCsv:
    def test_mirrors_ntriples(self):
        from_csv = sort_dataset(parse_csv(ages_csv()))
        from_nt = sort_dataset(parse_ntriples(ages_ntriples()))
        assert from_csv.objects == from_nt.objects

    def test_single_row(self):
        ds = parse_csv("subject,height\nurn:a,12.5\n")
        assert ds.minv == ds.maxv == 12.5
        assert ds.predicate == "height"

    def test_bad_cell_skipped(self):
        rows = "\n".join(f"urn:{i},{i}" for i in range(9))
        ds = parse_csv(f"subject,v\n{rows}\nurn:bad,oops\n")
        assert len(ds) == 9
        assert ds.skipped == 1

    def test_all_rows_bad(self):
        with pytest.raises(EmptyDatasetError):
            parse_csv("subject,v\nurn:a,xx\nurn:b,yy\n")

    def test_temporal_column(self):
        ds = parse_csv("subject,when\nurn:a,2000-01-01T00:00:00Z\nurn:b,2000-01-02T00:00:00Z\n")
        assert ds.kind == TEMPORAL
        assert ds.objects[1].value - ds.objects[0].value == 86400_000.0


class TestSort:
    def test_running_example_order(self, ages_dataset):
        s = ages_dataset
        assert (s.objects[0].subject, s.objects[0].value) == (PERSON + "p8", 20.0)
        assert (s.objects[-1].subject, s.objects[-1].value) == (PERSON + "p1", 100.0)

    def test_idempotent(self, ages_dataset):
        assert sort_dataset(ages_dataset).objects == ages_dataset.objects

    def test_tie_break_by_subject(self, ages_dataset):
        pair = [o.subject for o in ages_dataset.objects if o.value == 35.0]
        assert pair == [PERSON + "p0", PERSON + "p5"]

    @given(st.lists(st.tuples(st.integers(0, 50), st.integers(0, 9)), min_size=1, max_size=40))
    def test_sort_properties(self, pairs):
        objects = [DataObject(f"urn:s{sub}", "urn:p", float(v)) for v, sub in pairs]
        ds = Dataset(list(objects), NUMERIC, "urn:p")
        out = sort_dataset(ds)
        assert sorted(map(id, out.objects)) == sorted(map(id, objects))  # permutation
        for a, b in zip(out.objects, out.objects[1:]):
            assert a.value <= b.value
            if a.value == b.value:
                assert a.subject <= b.subject
        assert sort_dataset(out).objects == out.objects


class TestRoundTrip:
    def test_csv_round_trip_bit_exact(self, ages_dataset):
        text = serialize_csv(ages_dataset)
        again = parse_csv(text)
        assert again.objects == ages_dataset.objects
        assert serialize_csv(sort_dataset(again)) == text

    @given(st.lists(st.floats(allow_nan=False, allow_infinity=False,
                              min_value=-1e12, max_value=1e12), min_size=1, max_size=30))
    def test_numeric_round_trip(self, values):
        objects = [DataObject(f"urn:i{i}", "urn:p", v) for i, v in enumerate(values)]
        ds = Dataset(objects, NUMERIC, "urn:p")
        again = parse_csv(serialize_csv(ds))
        assert [o.value for o in again.objects] == values

    def test_temporal_round_trip(self):
        text = "subject,when\nurn:a,2000-01-01T00:00:00Z\nurn:b,2021-06-15T12:34:56.789000Z\n"
        ds = parse_csv(text)
        again = parse_csv(serialize_csv(ds))
        assert again.objects == ds.objects
        assert again.kind == TEMPORAL
