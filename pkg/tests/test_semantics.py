from dataclasses import replace

import pytest

from config import get_settings
from errors import CoverageError, ModelBoundsError
from extraction import collapse_monotone, extract
from normalform import Rule, normalize
from semantics import (
    INFINITARY_RULES, RULE_SCHEMAS, SCHEMA_SIGNATURE, SeqVal, StandardVariant, Status, TwoLevelModel,
    check_extraction, check_rule_soundness, drop_entry, enumerate_models, evaluate, oracle_witnesses,
    search_witnesses,
)
from surface import Signature, parse_formula
from syntax import BASE, ExistsSt, ForallSt, pure_type

def test_cutoff_must_fit_domain():
    with pytest.raises(ModelBoundsError):
        TwoLevelModel(3, 0)
    with pytest.raises(ModelBoundsError):
        TwoLevelModel(2, 3)

def test_standard_quantifiers_range_below_cutoff():
    model = TwoLevelModel(3, 2)
    assert evaluate(parse_formula("!st x:0. x <= 1"), model)
    assert not evaluate(parse_formula("!x:0. x <= 1"), model)
    assert not evaluate(parse_formula("st(2)"), model)
    assert evaluate(parse_formula("?x:0. ~st(x)"), model)

def test_successor_saturates():
    model = TwoLevelModel(3, 1)
    assert evaluate(parse_formula("s(2) = 2"), model)
    assert evaluate(parse_formula("5 = 2"), model)

def test_standard_functions_preserve_standardness():
    model = TwoLevelModel(2, 1)
    one = pure_type(1)
    standard = model.standard(one)
    assert len(model.values(one)) == 4
    assert all(f(0) == 0 for f in standard)
    assert len(standard) == 2

def test_definable_variant_is_smaller():
    maximal = TwoLevelModel(3, 1, StandardVariant.MAXIMAL)
    definable = TwoLevelModel(3, 1, StandardVariant.DEFINABLE)
    one = pure_type(1)
    assert len(definable.standard(one)) < len(maximal.standard(one))

def test_level_bound():
    model = TwoLevelModel(2, 1, level_bound=1)
    with pytest.raises(ModelBoundsError):
        model.values(pure_type(2))

def test_model_enumeration_is_seeded():
    signature = Signature(relations={"R": (BASE, BASE)})
    first = [m.relations["R"] for m in enumerate_models(signature, 3, seed=5, budget=4)]
    second = [m.relations["R"] for m in enumerate_models(signature, 3, seed=5, budget=4)]
    assert first == second

def test_domain_bound_is_enforced():
    with pytest.raises(ModelBoundsError):
        list(enumerate_models(SCHEMA_SIGNATURE, 99))

@pytest.mark.slow
@pytest.mark.parametrize("rule", [rule for rule in Rule if rule not in INFINITARY_RULES])
def test_rule_soundness(rule):
    verdict = check_rule_soundness(rule, budget=1000, max_domain=3, seed=0)
    assert verdict.status == Status.PASS
    assert verdict.checked >= 1000
    assert verdict.counterexamples == []
    assert set(verdict.coverage) == {instance.text for instance in RULE_SCHEMAS[rule]}
    assert all(count > 0 for count in verdict.coverage.values())

def test_budget_is_split_between_instances():
    verdict = check_rule_soundness(Rule.PRENEX_IMPLIES_ST, budget=40, max_domain=2, seed=0)
    assert verdict.status == Status.PASS
    assert list(verdict.coverage.values()) == [10, 10, 10, 10]

def test_budget_below_instance_count_is_a_coverage_error():
    with pytest.raises(CoverageError):
        check_rule_soundness(Rule.PRENEX_IMPLIES_ST, budget=2, max_domain=2, seed=0)

@pytest.mark.slow
def test_idealisation_fails_in_finite_models():
    verdict = check_rule_soundness(Rule.IDEALISATION, max_domain=3, seed=0)
    assert verdict.status == Status.EXPECTED_COUNTEREXAMPLE
    assert verdict.passed
    assert "instância" in verdict.counterexamples[0].to_text()
    model = verdict.counterexamples[0].model
    assert model.cutoff > model.seq_len

@pytest.mark.slow
def test_idealisation_holds_when_sequences_reach_the_cutoff(monkeypatch):
    monkeypatch.setenv("MODEL_SEQ_LEN", "3")
    get_settings.cache_clear()
    verdict = check_rule_soundness(Rule.IDEALISATION, max_domain=3, seed=0)
    assert verdict.status == Status.FAIL
    assert verdict.counterexamples == []

@pytest.fixture
def transfer_extraction(transfer):
    nf, trace = normalize(transfer)
    return extract(nf, trace)

@pytest.mark.slow
def test_extraction_holds_with_oracle_witnesses(transfer_extraction):
    verdict = check_extraction(transfer_extraction, max_domain=3, seed=0, witnesses=oracle_witnesses)
    assert verdict.status == Status.PASS
    assert verdict.checked > 0

@pytest.mark.slow
def test_wrong_witness_is_caught(transfer_extraction):
    def always_zero(result, model):
        return {"t_m": lambda argument: SeqVal((0,))}
    verdict = check_extraction(transfer_extraction, max_domain=3, seed=0, witnesses=always_zero)
    assert verdict.status == Status.FAIL
    assert not verdict.passed

def test_seed_from_environment(monkeypatch, transfer_extraction):
    monkeypatch.setenv("NSZOO_SEED", "11")
    get_settings.cache_clear()
    verdict = check_extraction(transfer_extraction, budget=5, max_domain=2, seed=3)
    assert verdict.seed == 11

@pytest.mark.slow
def test_extraction_holds_with_search_witnesses(transfer_extraction):
    collapsed = replace(transfer_extraction,
                        collapsed_sentence=collapse_monotone(transfer_extraction, ["m"]))
    verdict = check_extraction(collapsed, max_domain=3, seed=0, witnesses=search_witnesses)
    assert verdict.status == Status.PASS
    assert verdict.checked > 0

def test_search_witness_has_a_single_entry(transfer_extraction):
    model = TwoLevelModel(2, 1)
    witness = search_witnesses(transfer_extraction, model)["t_m"]
    assert all(len(witness(f).items) == 1 for f in model.values(pure_type(1)))

def test_dropped_entry_is_caught(transfer_extraction):
    verdict = check_extraction(transfer_extraction, max_domain=2, seed=0,
                               witnesses=drop_entry(search_witnesses))
    assert verdict.status == Status.FAIL
    assert "sentença extraída falsa" in verdict.counterexamples[0].to_text()

def test_st_quantifiers_are_monotone_in_the_cutoff(random_formulas):
    generator = random_formulas(5)
    symbols = {"a": lambda v: min(v + 1, 2), "b": lambda u, v: max(u, v)}
    relations = {"P": frozenset({(0,), (2,)}), "Q": frozenset({(1,)}),
                 "R": frozenset({(0, 1), (1, 1), (2, 0)})}
    small = TwoLevelModel(3, 1, symbols=symbols, relations=relations)
    large = TwoLevelModel(3, 2, symbols=symbols, relations=relations)
    functions = small.values(pure_type(1))[::5]
    for _ in range(100):
        var = generator.rng.choice(generator.BINDERS)
        body = generator.internal(2, (var,))
        universal, existential = ForallSt(var, BASE, body), ExistsSt(var, BASE, body)
        for y in range(3):
            for f in functions:
                env = {"y": y, "f": f}
                if evaluate(universal, large, env):
                    assert evaluate(universal, small, env)
                if evaluate(existential, small, env):
                    assert evaluate(existential, large, env)
