import pytest

from conftest import GOLDEN_LABELS
from errors import ParseError, SignatureError, TypeCheckError
from semantics import SCHEMA_SIGNATURE
from surface import Signature, format_document, format_formula, parse_document, parse_formula, parse_type
from syntax import BASE, Arrow, Prod, Seq, numeral, pure_type

@pytest.mark.parametrize("label", GOLDEN_LABELS)
def test_golden_documents_round_trip(golden, label):
    formula = golden(label)
    again = parse_document(format_document(formula)).formula
    assert again == formula
    assert format_formula(again) == format_formula(formula)

def test_curk_prints_canonically(golden):
    assert format_formula(golden("curk")) == \
        "!st f:1. ?st m:0. (?n:0. app(f,n) = 0) -> ?i <= m. app(f,i) = 0"

def test_document_header_lists_used_declarations():
    text = "sym app2 : 1 x 0 x 0 -> 0\nrel bin : 0\nvar g : 1\n!i:0. bin(app2(g,i,0))\n"
    document = parse_document(text)
    assert document.signature.symbols["app2"] == (pure_type(1), BASE, BASE)
    assert document.context == {"g": pure_type(1)}
    assert format_document(document.formula) == text

def test_document_comment_line():
    formula = parse_formula("0 <= 1")
    assert format_document(formula, comment="exemplo") == "# exemplo\n0 <= 1\n"

def test_types():
    assert parse_type("2") == pure_type(2)
    assert parse_type("((1 * 1) -> (1 * 1))") == Arrow(Prod(pure_type(1), pure_type(1)),
                                                        Prod(pure_type(1), pure_type(1)))
    assert parse_type("0^*^*") == Seq(Seq(BASE))

@pytest.mark.parametrize("text", [
    "P(y) & Q(y) | R(y,y)",
    "P(y) & (Q(y) | R(y,y))",
    "(P(y) -> Q(y)) -> P(y)",
    "P(y) -> Q(y) -> P(y)",
    "~(P(y) & Q(y))",
    "~P(y) | ~st(y)",
    "(!x:0. P(x)) & Q(y)",
    "?st x:0. !z <= x. R(z,x) -> P(a(z))",
])
def test_printing_is_canonical(schema, text):
    assert format_formula(schema(text)) == text

def test_redundant_parentheses_are_dropped(schema):
    assert format_formula(schema("((P(y)) & (Q(y)))")) == "P(y) & Q(y)"

def test_numerals_and_successor():
    formula = parse_formula("s(s(0)) = 2")
    assert formula.lhs == numeral(2) == formula.rhs
    assert format_formula(formula) == "2 = 2"

def test_defined_equalities_expand(schema):
    assert format_formula(schema("f ~~[1] g")) == "!st n:0. app(f,n) = app(g,n)"
    assert format_formula(schema("f ==[1] g")) == "!n:0. app(f,n) = app(g,n)"

def test_sequences_and_membership():
    formula = parse_formula("!x in [1,2]. x <= len([0])")
    assert format_formula(formula) == "!x in [1,2]. x <= len([0])"
    assert format_formula(parse_formula("?x in [:0]. x = 0")) == "?x in [:0]. x = 0"

def test_syntax_error_reports_position():
    with pytest.raises(ParseError) as info:
        parse_formula("!x:0 x = 0")
    assert info.value.line == 1
    assert "linha 1" in info.value.detail

def test_undeclared_variable():
    with pytest.raises(TypeCheckError):
        parse_formula("x = 0")

def test_higher_type_atom_is_rejected(schema):
    with pytest.raises(TypeCheckError):
        schema("f = g")

def test_defined_equality_checks_type(schema):
    with pytest.raises(TypeCheckError):
        schema("f ~~[2] g")

def test_relation_arity_and_types(schema):
    with pytest.raises(TypeCheckError):
        schema("R(y)")
    with pytest.raises(TypeCheckError):
        schema("P(f)")

def test_undeclared_symbols():
    with pytest.raises(SignatureError):
        parse_formula("foo(0) = 0")
    with pytest.raises(SignatureError):
        parse_formula("Q(0)")

def test_reserved_and_duplicate_declarations():
    signature = Signature()
    with pytest.raises(SignatureError):
        signature.declare_symbol("app", (BASE,))
    with pytest.raises(SignatureError):
        parse_document("rel bin : 0\nrel bin : 0\nbin(0)\n")

def test_signature_merge_conflict():
    other = Signature(relations={"P": (BASE, BASE)})
    with pytest.raises(SignatureError):
        SCHEMA_SIGNATURE.merged(other)

def test_malformed_header():
    with pytest.raises(ParseError) as info:
        parse_document("rel : 0\n0 = 0\n")
    assert info.value.line == 1

def test_document_without_formula():
    with pytest.raises(ParseError):
        parse_document("# só comentário\nrel bin : 0\n")

def test_random_formulas_round_trip(random_formulas, schema):
    generator = random_formulas(11)
    for _ in range(300):
        formula = generator.formula(4)
        assert schema(format_formula(formula)) == formula
