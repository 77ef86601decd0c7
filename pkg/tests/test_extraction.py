import pytest

from errors import ExtractionError, TraceError
from extraction import collapse_monotone, extract, herbrandise, meta_reverse, monotone_existentials
from normalform import Logic, Rule, normalize, normalize_antecedent
from surface import format_formula
from syntax import BASE, App, Arrow, Implies, Max0, Prod, Seq, Var, alpha_equivalent, pure_type

F1 = pure_type(1)

@pytest.fixture
def transfer_extraction(transfer):
    nf, trace = normalize(transfer)
    return extract(nf, trace)

def test_witness_for_transfer(transfer_extraction):
    result = transfer_extraction
    symbol = Var("t_m", Arrow(F1, Seq(BASE)))
    assert result.witness_terms == {"m": App(symbol, Var("f", F1))}
    assert result.symbols == {"t_m": Arrow(F1, Seq(BASE))}
    assert result.recipes == {"m": "pass-through"}
    assert result.vacuous == []

def test_internal_sentence(transfer_extraction):
    assert format_formula(transfer_extraction.internal_sentence) == \
        "!f:1. ?m in app(t_m,f). (?n:0. app(f,n) = 0) -> ?i <= m. app(f,i) = 0"

def test_collapse_by_maximum(transfer_extraction):
    assert monotone_existentials(transfer_extraction) == ["m"]
    collapsed = collapse_monotone(transfer_extraction, ["m"])
    assert format_formula(collapsed) == \
        "!f:1. (?n:0. app(f,n) = 0) -> ?i <= max(app(t_m,f)). app(f,i) = 0"

def test_collapse_rejects_non_existentials(transfer_extraction):
    with pytest.raises(ExtractionError):
        collapse_monotone(transfer_extraction, ["f"])

def test_bound_search_witness_keeps_recipe(schema):
    nf, trace = normalize(schema("Q(y) -> ?st m:0. R(m,y)"))
    assert [s.rule for s in trace.steps] == [Rule.BOUND_SEARCH, Rule.PRENEX_IMPLIES_ST]
    result = extract(nf, trace)
    assert result.recipes == {"m": "pass-through"}
    assert format_formula(result.internal_sentence) == "?m in t_m. Q(y) -> ?i <= m. R(i,y)"

def test_normal_input_has_input_recipe(schema):
    nf, trace = normalize(schema("?st m:0. R(m,y)"))
    assert trace.steps == []
    result = extract(nf, trace)
    assert result.recipes == {"m": "input"}
    assert result.provenance["m"].steps == ()
    assert format_formula(result.internal_sentence) == "?m in t_m. R(m,y)"

def test_transfer_provenance(transfer_extraction):
    symbol = Var("t_m", Arrow(F1, Seq(BASE)))
    recipe = transfer_extraction.provenance["m"]
    assert recipe.kind == "pass-through"
    assert recipe.origin == ("m",)
    assert recipe.steps == (1, 2)
    assert recipe.term == App(symbol, Var("f", F1))
    assert recipe.collapsed == Max0(App(symbol, Var("f", F1)))

def test_witness_recipe_from_generalized_markov(schema):
    nf, trace = normalize(schema("(!st x:0. ?st z:0. R(x,z)) -> P(y)"), Logic.INTUITIONISTIC)
    assert [s.rule for s in trace.steps] == [Rule.HAC_INT, Rule.PRENEX_IMPLIES_ST, Rule.HGMP_ST]
    result = extract(nf, trace)
    assert [name for name, _ in result.universals] == ["Xi1"]
    assert result.recipes == {"W1": "HGMPst"}
    recipe = result.provenance["W1"]
    assert recipe.kind == "HGMPst"
    assert recipe.origin == ("x",)
    assert recipe.steps == (3,)
    assert recipe.collapsed is None

def test_extraction_requires_matching_trace(transfer, schema):
    _, trace = normalize(transfer)
    other, _ = normalize(schema("~(!st x:0. P(x))"))
    with pytest.raises(TraceError):
        extract(other, trace)

@pytest.fixture
def small_herbrandisation(schema, transfer):
    antecedent, _ = normalize_antecedent(schema("?st h:1. !st x:0. P(app(h,x))"))
    consequent, _ = normalize(transfer)
    return antecedent, consequent, herbrandise(antecedent, consequent)

def test_herbrandisation_body(small_herbrandisation):
    _, _, h = small_herbrandisation
    assert h.i_term == Var("i", Arrow(Prod(F1, F1), Seq(BASE)))
    assert format_formula(h.body) == (
        "!h:1. !f:1. (!x in app(i,pair(h,f)). P(app(h,x))) -> "
        "(?n:0. app(f,n) = 0) -> ?i' <= app(o,pair(h,f)). app(f,i') = 0")
    assert not h.vacuous_o

def test_meta_reverse_round_trip(small_herbrandisation):
    antecedent, consequent, h = small_herbrandisation
    original = Implies(antecedent.to_formula(), consequent.to_formula())
    assert alpha_equivalent(meta_reverse(h), original)

def test_herbrandisation_needs_ground_existential(schema, transfer):
    antecedent, _ = normalize_antecedent(schema("?st h:1. !st x:0. P(app(h,x))"))
    consequent, _ = normalize(schema("!st x:0. ?st z:0^*. P(x)"))
    with pytest.raises(ExtractionError):
        herbrandise(antecedent, consequent)
