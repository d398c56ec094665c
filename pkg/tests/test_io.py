import io
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from contextlab import io as cio
from contextlab import pms
from contextlab.catalog import REFERENCE_ALPHAS, FockParams, fock_displacement_triple, pauli_triple, weyl_triple, WeylParams
from contextlab.spectral import canonical_form

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(st.lists(st.tuples(finite, finite), min_size=4, max_size=4))
def test_matrix_round_trip_is_bit_exact(pairs):
    m = np.array([complex(a, b) for a, b in pairs]).reshape(2, 2)
    back = cio.matrix_from_json(json.loads(cio.dumps(cio.matrix_to_json(m))))
    assert np.array_equal(back.view(np.float64), m.view(np.float64))


def test_seventeen_digits():
    assert cio.dumps(0.1) == "0.10000000000000001"
    assert cio.dumps(1.0) == "1.0"
    assert cio.dumps(float("nan")) == "null"


@pytest.mark.parametrize("obj", [{"dim": 2, "entries": [[1, 0]]}, {"entries": []}, {"dim": 1, "entries": [["a", 0]]}])
def test_matrix_json_rejects(obj):
    with pytest.raises(ValueError):
        cio.matrix_from_json(obj)


def test_triple_round_trip(tmp_path):
    t = weyl_triple(WeylParams(4), sign=-1)
    path = tmp_path / "t.json"
    cio.write_json(cio.triple_to_json(t), path)
    back = cio.triple_from_json(json.loads(path.read_text()))
    assert back.sign == -1
    for a, b in zip(t.operators(), back.operators()):
        assert np.array_equal(a, b)


def test_approx_triple_json_has_quality():
    approx = fock_displacement_triple(FockParams(16, *REFERENCE_ALPHAS))
    obj = cio.triple_to_json(approx)
    assert obj["kind"] == "approx" and obj["cutoff"] == 16
    assert "low_energy_anticommutator" in obj["quality"]


def test_canonical_json():
    obj = json.loads(cio.dumps(cio.canonical_to_json(canonical_form(pauli_triple()))))
    assert obj["N"] == 1 and obj["block_multiplicities"] == [1]


def test_scan_csv():
    s = pms.scan_states(pms.build_square(pauli_triple()), 2, 1, seed=0)
    buf = io.StringIO()
    cio.write_scan_csv(s, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "seed_index,kind,total_direct,total_hermitian"
    assert len(lines) == 4 and lines[3].startswith("2,mixed,")
