import pytest
from pydantic import ValidationError

from config import get_settings, resolve_seed
from extraction import extract
from models import Report, VerdictEntry, extraction_response, failed, passed, skipped
from normalform import normalize

def test_report_requires_verdicts():
    with pytest.raises(ValidationError):
        Report(verdicts={}, seed=0)

def test_verdict_status_is_restricted():
    with pytest.raises(ValidationError):
        VerdictEntry(status="maybe")

def test_failed_property():
    ok = Report(verdicts={"a": passed(), "b": skipped("sem goldens")}, seed=0)
    bad = Report(verdicts={"a": passed(), "b": failed("difere")}, seed=0)
    assert not ok.failed
    assert bad.failed

def test_report_json_keys():
    report = Report(verdicts={"a": passed()}, seed=3)
    assert list(report.model_dump()) == ["principle", "logic", "stages", "trace", "extraction",
                                         "herbrandisation", "verdicts", "seed", "timings"]

def test_seed_precedence(monkeypatch):
    assert resolve_seed() == get_settings().DEFAULT_SEED
    assert resolve_seed(9) == 9
    monkeypatch.setenv("NSZOO_SEED", "4")
    get_settings.cache_clear()
    assert resolve_seed(9) == 4

def test_witness_response_carries_provenance(transfer):
    nf, trace = normalize(transfer)
    response = extraction_response(extract(nf, trace))
    witness = response.witnesses[0]
    assert (witness.name, witness.symbol, witness.recipe) == ("m", "t_m", "pass-through")
    assert witness.origin == ["m"]
    assert witness.steps == [1, 2]
    assert witness.collapsed == "max(app(t_m,f))"
