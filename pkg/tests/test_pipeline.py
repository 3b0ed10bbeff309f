import pytest

from qch.pipeline import (
    KNOWN_IDS,
    default_evaluations,
    evaluation_label,
    run_evaluation,
    select,
    spectral_report,
    structure_report,
)

from conftest import yb


def _statuses(rep):
    return {e.identity: e.status for e in rep.entries}


@pytest.mark.parametrize("k", [2, 3, 4])
def test_structure_report_passes(k):
    st = _statuses(structure_report(yb(k)))
    assert st and all(v == "pass" for v in st.values())


def test_labels():
    assert evaluation_label({"kind": "torus", "F": "P", "t": [2, 3]}) == "torus[2,3]/F=P"
    assert evaluation_label({"kind": "operator", "F": "R"}) == "operator/F=R"
    assert evaluation_label({"kind": "identity", "F": "P", "c": 3}) == "identity[3]/F=P"


def test_default_evaluations():
    evs = default_evaluations(3)
    assert evs[0] == {"kind": "torus", "F": "P", "t": [2, 4, 8]}
    assert {e["kind"] for e in evs} == {"torus", "operator"}


def test_run_evaluation_k3_operator():
    rep = run_evaluation(yb(3), {"kind": "operator", "F": "R"})
    st = _statuses(rep)
    assert st["CH-O-odd"] == "pass"
    assert all(v in ("pass", "skip") for v in st.values())


def test_rejected_point_is_an_error_entry():
    rep = run_evaluation(yb(3), {"kind": "torus", "F": "R", "t": [2, 4, 8]})
    assert [e.status for e in rep.entries] == ["error"]


@pytest.mark.parametrize("k", [2, 3, 4])
def test_spectral_report(k):
    st = _statuses(spectral_report(k, points=2))
    assert st["popo"] == "pass"
    assert all(v in ("pass", "skip") for v in st.values())
    if k == 2:
        assert st["EvenMinus:all"] == "skip"


def test_select():
    rep = select(structure_report(yb(2)), {"braid"})
    assert [e.identity for e in rep.entries] == ["braid"]
    assert "braid" in KNOWN_IDS and "CH-O+" in KNOWN_IDS
