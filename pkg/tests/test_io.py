import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symdefect.constructions import sic_vectors
from symdefect.core import VectorSet
from symdefect.io import VectorFileError, dumps_vectors, load_vector_file, load_vectors, load_vectors_mp, save_vectors


def test_round_trip_bit_exact(tmp_path):
    v = sic_vectors(4)
    p = tmp_path / "s.json"
    save_vectors(v, p, accuracy=1e-30, source="test")
    vf = load_vector_file(p)
    assert np.array_equal(vf.vectors.vectors, v.vectors)
    assert vf.accuracy == 1e-30
    assert vf.meta["source"] == "test"


@settings(max_examples=25, deadline=None)
@given(d=st.integers(1, 4), extra=st.integers(0, 4), seed=st.integers(0, 2**31))
def test_dumps_round_trip_random(tmp_path_factory, d, extra, seed):
    n = d + extra
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((d, n)) + 1j * rng.standard_normal((d, n))
    v = VectorSet(a / np.linalg.norm(a, axis=0))
    p = tmp_path_factory.mktemp("v") / "v.json"
    p.write_text(dumps_vectors(v))
    assert np.array_equal(load_vectors(p).vectors, v.vectors)


def test_truncated_file_reports_line(tmp_path):
    p = tmp_path / "t.json"
    p.write_text('{\n  "d": 2,\n  "N": 1,\n  "entries": [[1, 0],\n')
    with pytest.raises(VectorFileError) as exc:
        load_vector_file(p)
    assert exc.value.line is not None
    assert str(p) in str(exc.value)


def test_inconsistent_shape(tmp_path):
    p = tmp_path / "t.json"
    p.write_text(json.dumps({"d": 2, "N": 2, "entries": [[1, 0], [0, 0], [0, 0]]}))
    with pytest.raises(VectorFileError, match="inconsistent"):
        load_vector_file(p)


def test_norm_checked_against_declared_accuracy(tmp_path):
    p = tmp_path / "t.json"
    doc = {"d": 1, "N": 1, "entries": [["1.000001", "0"]]}
    p.write_text(json.dumps(doc))
    with pytest.raises(VectorFileError, match="normalised"):
        load_vector_file(p)
    doc["accuracy"] = "1e-5"
    p.write_text(json.dumps(doc))
    assert load_vector_file(p).accuracy == 1e-5


def test_extended_precision_reader(tmp_path):
    import mpmath

    p = tmp_path / "t.json"
    digits = "0.7071067811865475244008443621048490392848359376884740"
    p.write_text(json.dumps({"d": 2, "N": 1, "entries": [[digits, "0"], [digits, "0"]]}))
    d, n, rows = load_vectors_mp(p, dps=50)
    with mpmath.workdps(50):
        norm = sum(abs(x) ** 2 for x in rows[0])
        assert abs(norm - 1) < mpmath.mpf("1e-45")
