from dataclasses import replace

import pytest

from errors import FragmentError, RuleError, TraceError
from normalform import (
    Logic, Rule, RULE_INFO, RuleTrace, apply_rule, expand_standard_extensionality, is_monotone_in,
    is_normal_form, measure, normalize, normalize_antecedent, normalize_implication, replay,
    standard_extensionality_clause,
)
from surface import format_formula, parse_formula
from syntax import BASE, Prod, Seq, alpha_equivalent, children, pure_type

F1 = pure_type(1)

@pytest.mark.parametrize("logic", list(Logic))
def test_transfer_normal_form(transfer, golden, logic):
    nf, trace = normalize(transfer, logic)
    assert alpha_equivalent(nf.to_formula(), golden("curk"))
    assert [(s.rule, s.path, s.fresh) for s in trace.steps] == [
        (Rule.BOUND_SEARCH, (0, 1), ("i",)),
        (Rule.PRENEX_IMPLIES_ST, (0,), ()),
    ]
    assert nf.st_universals == (("f", F1),)
    assert nf.st_existentials == (("m", BASE),)

def test_trace_lines(transfer):
    _, trace = normalize(transfer)
    assert trace.lines()[0] == ("STEP 1 BoundSearch AT 0.1 FRESH i => "
                                "!st f:1. (?n:0. app(f,n) = 0) -> ?st m:0. ?i <= m. app(f,i) = 0")
    assert trace.lines()[1].startswith("STEP 2 PrenexImpliesSt AT 0 FRESH - => ")
    assert trace.fresh_names() == ["i"]

def test_replay_reproduces_final(transfer):
    nf, trace = normalize(transfer)
    assert replay(trace) == nf.to_formula()

def test_measure_decreases_along_trace(transfer):
    _, trace = normalize(transfer)
    previous = measure(trace.initial)
    for step in trace.steps:
        current = measure(step.after)
        assert current < previous
        previous = current

def test_tampered_trace_is_rejected(transfer):
    _, trace = normalize(transfer)
    tampered = RuleTrace(trace.initial, trace.logic, [replace(trace.steps[0], fresh=("k",))] + trace.steps[1:])
    with pytest.raises(TraceError):
        replay(tampered)

def test_trace_with_wrong_path_is_rejected(transfer):
    _, trace = normalize(transfer)
    tampered = RuleTrace(trace.initial, trace.logic, [replace(trace.steps[0], path=(0,))] + trace.steps[1:])
    with pytest.raises(TraceError):
        replay(tampered)

def test_markov_normalizes_classically(schema):
    nf, trace = normalize(schema("~(!st x:0. P(x))"))
    assert format_formula(nf.to_formula()) == "?st x:0. ~P(x)"
    assert [s.rule for s in trace.steps] == [Rule.MARKOV_ST]

def test_double_negation(schema):
    nf, trace = normalize(schema("~~(!st x:0. P(x))"))
    assert format_formula(nf.to_formula()) == "!st x:0. P(x)"
    assert [s.rule for s in trace.steps] == [Rule.DOUBLE_NEG_ST]

def test_intuitionistic_blocks_markov(schema):
    with pytest.raises(FragmentError) as info:
        normalize(schema("~(!st x:0. P(x))"), Logic.INTUITIONISTIC)
    assert info.value.path == (0,)
    assert info.value.trace.steps == []

def test_bare_st_atom_is_outside_fragment():
    with pytest.raises(FragmentError) as info:
        normalize(parse_formula("st(y)", context={"y": BASE}))
    assert info.value.path == ()

def test_classical_only_rules(schema):
    formula = schema("~(!st x:0. P(x))")
    assert RULE_INFO[Rule.MARKOV_ST].classical_only
    with pytest.raises(RuleError):
        apply_rule(Rule.MARKOV_ST, formula, (), Logic.INTUITIONISTIC)
    with pytest.raises(RuleError):
        apply_rule(Rule.DROP_ST_ANTECEDENT, schema("(!st x:0. P(x)) -> Q(y)"), (0,), Logic.INTUITIONISTIC)

def test_inapplicable_rule(schema):
    with pytest.raises(RuleError):
        apply_rule(Rule.HAC_INT, schema("P(y)"))

def test_bound_search_skips_monotone_bodies(schema):
    with pytest.raises(RuleError):
        apply_rule(Rule.BOUND_SEARCH, schema("?st m:0. y <= m"))
    result = apply_rule(Rule.BOUND_SEARCH, schema("?st m:0. R(m,y)"))
    assert format_formula(result) == "?st m:0. ?i <= m. R(i,y)"

def test_hac_introduces_sequence_functional(schema):
    result = apply_rule(Rule.HAC_INT, schema("!st x:0. ?st z:0. R(x,z)"))
    assert format_formula(result) == "?st Xi1:(0 -> 0^*). !st x:0. ?z in app(Xi1,x). R(x,z)"

def test_hip_and_hgmp(schema):
    hip = apply_rule(Rule.HIP_FORALL_ST, schema("(!st x:0. P(x)) -> ?st z:0. R(z,y)"))
    assert format_formula(hip) == "?st sigma1:0^*. (!st x:0. P(x)) -> ?z in sigma1. R(z,y)"
    hgmp = apply_rule(Rule.HGMP_ST, schema("(!st x:0. P(x)) -> Q(y)"))
    assert format_formula(hgmp) == "?st W1:0^*. (!x in W1. P(x)) -> Q(y)"

def test_hgmp_requires_internal_consequent(schema):
    with pytest.raises(RuleError):
        apply_rule(Rule.HGMP_ST, schema("(!st x:0. P(x)) -> !st z:0. Q(z)"))

def test_idealisation(schema):
    result = apply_rule(Rule.IDEALISATION, schema("!st x:0^*. ?y:0. !z in x. R(z,y)"))
    assert format_formula(result) == "?y:0. !st z:0. R(z,y)"

def test_drop_st_in_antecedent(schema):
    result = apply_rule(Rule.DROP_ST_ANTECEDENT, schema("(!st x:0. P(x)) -> Q(y)"), (0,))
    assert format_formula(result) == "(!x:0. P(x)) -> Q(y)"
    with pytest.raises(RuleError):
        apply_rule(Rule.DROP_ST_ANTECEDENT, schema("Q(y) -> !st x:0. P(x)"), (1,))

def test_expand_approx(schema):
    result = apply_rule(Rule.EXPAND_APPROX, schema("!st n:0. app(f,n) = app(g,n)"))
    assert format_formula(result) == "!st N:0. !j <= N. app(f,j) = app(g,j)"

def test_standard_extensionality(golden):
    pair = Prod(F1, F1)
    expanded = expand_standard_extensionality("P", pair, pair)
    assert alpha_equivalent(expanded, golden("finkal"))
    form = is_normal_form(expanded)
    assert form is not None
    assert alpha_equivalent(form.matrix, golden("tokamak"))

@pytest.mark.parametrize("domain, codomain", [(F1, BASE), (BASE, F1), (Prod(F1, BASE), BASE)])
def test_standard_extensionality_is_normal_for_ground_sides(domain, codomain):
    form = is_normal_form(expand_standard_extensionality("P", domain, codomain))
    assert form is not None
    assert all(typ == BASE for _, typ in form.st_existentials)

def test_standard_extensionality_clause_shape():
    clause = standard_extensionality_clause("P", F1, F1)
    assert format_formula(clause) == \
        "!st f:1. !st u:1. (!st n:0. app(f,n) = app(u,n)) -> !st n:0. app(app(P,f),n) = app(app(P,u),n)"

def test_extensionality_rejects_sequences():
    with pytest.raises(RuleError):
        standard_extensionality_clause("P", Seq(BASE), BASE)

def test_monotonicity_certificate():
    context = {"m": BASE, "f": F1, "y": BASE}
    assert is_monotone_in(parse_formula("?i <= m. app(f,i) = 0", context=context), "m")
    assert is_monotone_in(parse_formula("y <= m", context=context), "m")
    assert not is_monotone_in(parse_formula("app(f,m) = 0", context=context), "m")
    assert not is_monotone_in(parse_formula("~(y <= m)", context=context), "m")
    assert not is_monotone_in(parse_formula("m <= y", context=context), "m")

def test_normalize_implication_checks_shapes(schema, transfer):
    with pytest.raises(FragmentError):
        normalize_implication(schema("P(y)"), transfer)

def test_antecedent_clauses(schema):
    antecedent, _ = normalize_antecedent(schema("?st h:1. (!st x:0. P(app(h,x))) & Q(y)"))
    assert antecedent.witnesses == (("h", F1),)
    assert [block for block, _ in antecedent.clauses] == [(("x", BASE),), ()]

def _depth(formula) -> int:
    return 1 + max((_depth(child) for child in children(formula)), default=0)

@pytest.mark.parametrize("logic", list(Logic))
def test_normalization_terminates_on_random_inputs(random_formulas, logic):
    generator = random_formulas(3)
    normalized = 0
    for _ in range(150):
        formula = generator.external(5)
        assert _depth(formula) <= 12
        try:
            nf, trace = normalize(formula, logic)
        except FragmentError:
            continue
        previous = measure(trace.initial)
        for step in trace.steps:
            current = measure(step.after)
            assert current < previous
            previous = current
        assert replay(trace) == nf.to_formula()
        normalized += 1
    assert normalized > 0
