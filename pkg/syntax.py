"""
Sintaxe abstrata da aritmética de tipos finitos com o predicado de standardness.

Tipos, termos e fórmulas são dataclasses imutáveis; todas as operações aqui são
funções puras sobre esses valores.
"""
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from errors import TypeCheckError, RuleError

# Tipos finitos

@dataclass(frozen=True)
class Base:
    pass

@dataclass(frozen=True)
class Arrow:
    domain: "FinType"
    codomain: "FinType"

@dataclass(frozen=True)
class Prod:
    left: "FinType"
    right: "FinType"

@dataclass(frozen=True)
class Seq:
    element: "FinType"

FinType = Union[Base, Arrow, Prod, Seq]

BASE = Base()

def pure_type(n: int) -> FinType:
    """Tipo puro n: 0, 1 = 0->0, 2 = 1->0, ..."""
    typ: FinType = BASE
    for _ in range(n):
        typ = Arrow(typ, BASE)
    return typ

def pure_level(typ: FinType) -> Optional[int]:
    """Nível do tipo puro, ou None se o tipo não for puro"""
    if isinstance(typ, Base):
        return 0
    if isinstance(typ, Arrow) and isinstance(typ.codomain, Base):
        inner = pure_level(typ.domain)
        if inner is not None:
            return inner + 1
    return None

def type_level(typ: FinType) -> int:
    if isinstance(typ, Base):
        return 0
    if isinstance(typ, Arrow):
        return max(type_level(typ.domain) + 1, type_level(typ.codomain))
    if isinstance(typ, Prod):
        return max(type_level(typ.left), type_level(typ.right))
    return type_level(typ.element)

def format_type(typ: FinType) -> str:
    level = pure_level(typ)
    if level is not None and level < 10:
        return str(level)
    if isinstance(typ, Arrow):
        return f"({format_type(typ.domain)} -> {format_type(typ.codomain)})"
    if isinstance(typ, Prod):
        return f"({format_type(typ.left)} * {format_type(typ.right)})"
    return f"{format_type(typ.element)}^*"

def tuple_type(types: Sequence[FinType]) -> FinType:
    """Produto aninhado à direita: [a, b, c] -> a * (b * c)"""
    if not types:
        raise TypeCheckError("Tupla vazia não tem tipo")
    if len(types) == 1:
        return types[0]
    return Prod(types[0], tuple_type(types[1:]))

# Termos

@dataclass(frozen=True)
class Var:
    name: str
    type: FinType

@dataclass(frozen=True)
class Zero:
    pass

@dataclass(frozen=True)
class Succ:
    arg: "Term"

@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"

@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"

@dataclass(frozen=True)
class Proj1:
    arg: "Term"

@dataclass(frozen=True)
class Proj2:
    arg: "Term"

@dataclass(frozen=True)
class SeqLit:
    items: Tuple["Term", ...]
    elem_type: FinType

@dataclass(frozen=True)
class Len:
    arg: "Term"

@dataclass(frozen=True)
class Idx:
    seq: "Term"
    index: "Term"

@dataclass(frozen=True)
class Max0:
    arg: "Term"

@dataclass(frozen=True)
class FunSym:
    name: str
    args: Tuple["Term", ...]
    arg_types: Tuple[FinType, ...]

Term = Union[Var, Zero, Succ, App, Pair, Proj1, Proj2, SeqLit, Len, Idx, Max0, FunSym]

ZERO = Zero()

def numeral(n: int) -> Term:
    term: Term = ZERO
    for _ in range(n):
        term = Succ(term)
    return term

def numeral_value(term: Term) -> Optional[int]:
    count = 0
    while isinstance(term, Succ):
        term = term.arg
        count += 1
    return count if isinstance(term, Zero) else None

def tuple_term(terms: Sequence[Term]) -> Term:
    if not terms:
        raise TypeCheckError("Tupla vazia não é um termo")
    if len(terms) == 1:
        return terms[0]
    return Pair(terms[0], tuple_term(terms[1:]))

def tuple_projections(term: Term, size: int) -> List[Term]:
    """Projeções de uma tupla aninhada à direita com `size` componentes"""
    if size == 1:
        return [term]
    return [Proj1(term)] + tuple_projections(Proj2(term), size - 1)

# Fórmulas

@dataclass(frozen=True)
class AtomEq0:
    lhs: Term
    rhs: Term

@dataclass(frozen=True)
class AtomLe:
    lhs: Term
    rhs: Term

@dataclass(frozen=True)
class AtomPred:
    name: str
    args: Tuple[Term, ...]
    arg_types: Tuple[FinType, ...]

@dataclass(frozen=True)
class St:
    term: Term

@dataclass(frozen=True)
class Not:
    body: "Formula"

@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

@dataclass(frozen=True)
class Forall:
    var: str
    type: FinType
    body: "Formula"

@dataclass(frozen=True)
class Exists:
    var: str
    type: FinType
    body: "Formula"

@dataclass(frozen=True)
class ForallSt:
    var: str
    type: FinType
    body: "Formula"

@dataclass(frozen=True)
class ExistsSt:
    var: str
    type: FinType
    body: "Formula"

@dataclass(frozen=True)
class BoundedForall:
    var: str
    bound: Term
    body: "Formula"

@dataclass(frozen=True)
class BoundedExists:
    var: str
    bound: Term
    body: "Formula"

@dataclass(frozen=True)
class ForallIn:
    var: str
    elem_type: FinType
    seq: Term
    body: "Formula"

@dataclass(frozen=True)
class ExistsIn:
    var: str
    elem_type: FinType
    seq: Term
    body: "Formula"

Formula = Union[AtomEq0, AtomLe, AtomPred, St, Not, And, Or, Implies, Forall, Exists,
                ForallSt, ExistsSt, BoundedForall, BoundedExists, ForallIn, ExistsIn]

TRUE = AtomEq0(ZERO, ZERO)

ATOMS = (AtomEq0, AtomLe, AtomPred, St)
BINARY = (And, Or, Implies)
TYPED_QUANTIFIERS = (Forall, Exists, ForallSt, ExistsSt)
BOUNDED_QUANTIFIERS = (BoundedForall, BoundedExists)
MEMBER_QUANTIFIERS = (ForallIn, ExistsIn)
QUANTIFIERS = TYPED_QUANTIFIERS + BOUNDED_QUANTIFIERS + MEMBER_QUANTIFIERS
ST_QUANTIFIERS = (ForallSt, ExistsSt)

def binder_type(formula) -> FinType:
    if isinstance(formula, TYPED_QUANTIFIERS):
        return formula.type
    if isinstance(formula, BOUNDED_QUANTIFIERS):
        return BASE
    return formula.elem_type

def conjunction(parts: Sequence[Formula]) -> Formula:
    """Conjunção associada à esquerda; lista vazia vira TRUE"""
    if not parts:
        return TRUE
    result = parts[0]
    for part in parts[1:]:
        result = And(result, part)
    return result

def conjuncts(formula: Formula) -> List[Formula]:
    if isinstance(formula, And):
        return conjuncts(formula.left) + conjuncts(formula.right)
    return [formula]

def quantify(kind, bindings: Sequence[Tuple[str, FinType]], body: Formula) -> Formula:
    for name, typ in reversed(list(bindings)):
        body = kind(name, typ, body)
    return body

def peel(kind, formula: Formula) -> Tuple[List[Tuple[str, FinType]], Formula]:
    """Separa uma cadeia de quantificadores do mesmo tipo"""
    bindings = []
    while isinstance(formula, kind):
        bindings.append((formula.var, formula.type))
        formula = formula.body
    return bindings, formula

# Inferência de tipos

def _show(term: Term) -> str:
    from surface import format_term
    try:
        return format_term(term)
    except Exception:
        return repr(term)

def infer_type(term: Term) -> FinType:
    if isinstance(term, Var):
        return term.type
    if isinstance(term, Zero):
        return BASE
    if isinstance(term, (Succ, Len)):
        arg = infer_type(term.arg)
        if isinstance(term, Succ) and arg != BASE:
            raise TypeCheckError(f"Sucessor aplicado a termo de tipo {format_type(arg)}: {_show(term)}")
        if isinstance(term, Len) and not isinstance(arg, Seq):
            raise TypeCheckError(f"len exige uma sequência: {_show(term)}")
        return BASE
    if isinstance(term, App):
        head = infer_type(term.fun)
        arg = infer_type(term.arg)
        if not isinstance(head, Arrow):
            raise TypeCheckError(
                f"Aplicação de termo de tipo {format_type(head)}, que não é uma seta: {_show(term)}")
        if head.domain != arg:
            raise TypeCheckError(
                f"Argumento de tipo {format_type(arg)} onde se espera {format_type(head.domain)}: {_show(term)}")
        return head.codomain
    if isinstance(term, Pair):
        return Prod(infer_type(term.left), infer_type(term.right))
    if isinstance(term, (Proj1, Proj2)):
        arg = infer_type(term.arg)
        if not isinstance(arg, Prod):
            raise TypeCheckError(f"Projeção de termo que não é par: {_show(term)}")
        return arg.left if isinstance(term, Proj1) else arg.right
    if isinstance(term, SeqLit):
        for item in term.items:
            if infer_type(item) != term.elem_type:
                raise TypeCheckError(f"Elementos de sequência com tipos diferentes: {_show(term)}")
        return Seq(term.elem_type)
    if isinstance(term, Idx):
        seq = infer_type(term.seq)
        if not isinstance(seq, Seq):
            raise TypeCheckError(f"idx exige uma sequência: {_show(term)}")
        if infer_type(term.index) != BASE:
            raise TypeCheckError(f"Índice deve ter tipo 0: {_show(term)}")
        return seq.element
    if isinstance(term, Max0):
        if infer_type(term.arg) != Seq(BASE):
            raise TypeCheckError(f"max se aplica apenas a sequências de tipo 0^*: {_show(term)}")
        return BASE
    if isinstance(term, FunSym):
        _check_args(term.name, term.args, term.arg_types)
        return BASE
    raise TypeCheckError(f"Termo desconhecido: {term!r}")

def _check_args(name: str, args: Sequence[Term], arg_types: Sequence[FinType]):
    if len(args) != len(arg_types):
        raise TypeCheckError(f"{name} espera {len(arg_types)} argumentos, recebeu {len(args)}")
    for arg, expected in zip(args, arg_types):
        actual = infer_type(arg)
        if actual != expected:
            raise TypeCheckError(
                f"Argumento {_show(arg)} de {name} tem tipo {format_type(actual)}, "
                f"esperado {format_type(expected)}")

def typecheck(term: Term, context: Dict[str, FinType]) -> FinType:
    """Tipo de `term`; toda variável livre deve estar declarada em `context`"""
    for name, typ in free_vars_term(term).items():
        if name not in context:
            raise TypeCheckError(f"Variável não declarada: {name}")
        if context[name] != typ:
            raise TypeCheckError(
                f"Variável {name} usada com tipo {format_type(typ)}, declarada {format_type(context[name])}")
    return infer_type(term)

def check_formula(formula: Formula, context: Optional[Dict[str, FinType]] = None) -> None:
    """Verifica tipos de toda a fórmula; com `context`, exige variáveis livres declaradas"""
    if isinstance(formula, (AtomEq0, AtomLe)):
        for side in (formula.lhs, formula.rhs):
            if infer_type(side) != BASE:
                raise TypeCheckError(f"Átomo exige termos de tipo 0: {_show(side)}")
    elif isinstance(formula, AtomPred):
        _check_args(formula.name, formula.args, formula.arg_types)
    elif isinstance(formula, St):
        infer_type(formula.term)
    elif isinstance(formula, Not):
        check_formula(formula.body)
    elif isinstance(formula, BINARY):
        check_formula(formula.left)
        check_formula(formula.right)
    elif isinstance(formula, BOUNDED_QUANTIFIERS):
        if infer_type(formula.bound) != BASE:
            raise TypeCheckError(f"Limite de quantificador deve ter tipo 0: {_show(formula.bound)}")
        check_formula(formula.body)
    elif isinstance(formula, MEMBER_QUANTIFIERS):
        if infer_type(formula.seq) != Seq(formula.elem_type):
            raise TypeCheckError(f"Quantificador de pertinência sobre termo que não é sequência: {_show(formula.seq)}")
        check_formula(formula.body)
    elif isinstance(formula, TYPED_QUANTIFIERS):
        check_formula(formula.body)
    if context is not None:
        for name, typ in free_vars(formula).items():
            if context.get(name) != typ:
                raise TypeCheckError(f"Variável não declarada: {name}")

# Variáveis livres e nomes

def free_vars_term(term: Term) -> Dict[str, FinType]:
    if isinstance(term, Var):
        return {term.name: term.type}
    result: Dict[str, FinType] = {}
    for child in term_children(term):
        result.update(free_vars_term(child))
    return result

def term_children(term: Term) -> Tuple[Term, ...]:
    if isinstance(term, (Succ, Proj1, Proj2, Len, Max0)):
        return (term.arg,)
    if isinstance(term, App):
        return (term.fun, term.arg)
    if isinstance(term, Pair):
        return (term.left, term.right)
    if isinstance(term, Idx):
        return (term.seq, term.index)
    if isinstance(term, (SeqLit, FunSym)):
        return tuple(term.items if isinstance(term, SeqLit) else term.args)
    return ()

def map_term(term: Term, fn) -> Term:
    """Reconstrói `term` aplicando `fn` aos filhos imediatos"""
    if isinstance(term, (Succ, Proj1, Proj2, Len, Max0)):
        return type(term)(fn(term.arg))
    if isinstance(term, App):
        return App(fn(term.fun), fn(term.arg))
    if isinstance(term, Pair):
        return Pair(fn(term.left), fn(term.right))
    if isinstance(term, Idx):
        return Idx(fn(term.seq), fn(term.index))
    if isinstance(term, SeqLit):
        return SeqLit(tuple(fn(item) for item in term.items), term.elem_type)
    if isinstance(term, FunSym):
        return FunSym(term.name, tuple(fn(arg) for arg in term.args), term.arg_types)
    return term

def formula_terms(formula: Formula) -> Tuple[Term, ...]:
    """Termos que aparecem diretamente no nó (fora do escopo do binder)"""
    if isinstance(formula, (AtomEq0, AtomLe)):
        return (formula.lhs, formula.rhs)
    if isinstance(formula, AtomPred):
        return formula.args
    if isinstance(formula, St):
        return (formula.term,)
    if isinstance(formula, BOUNDED_QUANTIFIERS):
        return (formula.bound,)
    if isinstance(formula, MEMBER_QUANTIFIERS):
        return (formula.seq,)
    return ()

def free_vars(formula: Formula) -> Dict[str, FinType]:
    result: Dict[str, FinType] = {}
    for term in formula_terms(formula):
        result.update(free_vars_term(term))
    if isinstance(formula, Not):
        result.update(free_vars(formula.body))
    elif isinstance(formula, BINARY):
        result.update(free_vars(formula.left))
        result.update(free_vars(formula.right))
    elif isinstance(formula, QUANTIFIERS):
        inner = free_vars(formula.body)
        inner.pop(formula.var, None)
        result.update(inner)
    return result

def all_names(formula: Formula) -> Set[str]:
    """Nomes livres e ligados em qualquer ponto da fórmula"""
    names = set()
    for term in formula_terms(formula):
        names |= set(free_vars_term(term))
    if isinstance(formula, QUANTIFIERS):
        names.add(formula.var)
    for child in children(formula):
        names |= all_names(child)
    return names

def fresh_variant(name: str, avoid: Iterable[str]) -> str:
    """Acrescenta apóstrofos até o nome ficar livre"""
    avoid = set(avoid)
    while name in avoid:
        name += "'"
    return name

def fresh_indexed(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    if base not in avoid:
        return base
    k = 2
    while f"{base}{k}" in avoid:
        k += 1
    return f"{base}{k}"

# Navegação por caminhos

Path = Tuple[int, ...]

def children(formula: Formula) -> Tuple[Formula, ...]:
    if isinstance(formula, Not):
        return (formula.body,)
    if isinstance(formula, BINARY):
        return (formula.left, formula.right)
    if isinstance(formula, QUANTIFIERS):
        return (formula.body,)
    return ()

def with_children(formula: Formula, new: Sequence[Formula]) -> Formula:
    if isinstance(formula, Not):
        return Not(new[0])
    if isinstance(formula, BINARY):
        return type(formula)(new[0], new[1])
    if isinstance(formula, QUANTIFIERS):
        return replace(formula, body=new[0])
    return formula

def subformula_at(formula: Formula, path: Path) -> Formula:
    for step in path:
        kids = children(formula)
        if step >= len(kids):
            raise RuleError(f"Caminho inválido: {format_path(path)}")
        formula = kids[step]
    return formula

def replace_at(formula: Formula, path: Path, new: Formula) -> Formula:
    if not path:
        return new
    kids = list(children(formula))
    if path[0] >= len(kids):
        raise RuleError(f"Caminho inválido: {format_path(path)}")
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return with_children(formula, kids)

def positions(formula: Formula, path: Path = ()) -> List[Tuple[Path, Formula]]:
    """Todas as subfórmulas em pré-ordem, com seus caminhos"""
    result = [(path, formula)]
    for i, child in enumerate(children(formula)):
        result.extend(positions(child, path + (i,)))
    return result

def polarity_at(formula: Formula, path: Path) -> int:
    """+1 para posição positiva, -1 para negativa"""
    sign = 1
    for step in path:
        if isinstance(formula, Not) or (isinstance(formula, Implies) and step == 0):
            sign = -sign
        formula = children(formula)[step]
    return sign

def binders_above(formula: Formula, path: Path) -> Set[str]:
    names = set()
    for step in path:
        if isinstance(formula, QUANTIFIERS):
            names.add(formula.var)
        formula = children(formula)[step]
    return names

def format_path(path: Path) -> str:
    return ".".join(str(step) for step in path) if path else "ε"

def parse_path(text: str) -> Path:
    if text in ("ε", ""):
        return ()
    return tuple(int(part) for part in text.split("."))

# Substituição

def substitute_term(term: Term, name: str, value: Term) -> Term:
    if isinstance(term, Var):
        return value if term.name == name else term
    return map_term(term, lambda child: substitute_term(child, name, value))

def replace_subterm(term: Term, mapping: Dict[Term, Term]) -> Term:
    """Troca ocorrências exatas de subtermos, de fora para dentro"""
    if term in mapping:
        return mapping[term]
    return map_term(term, lambda child: replace_subterm(child, mapping))

def _map_terms(formula: Formula, fn) -> Formula:
    if isinstance(formula, (AtomEq0, AtomLe)):
        return type(formula)(fn(formula.lhs), fn(formula.rhs))
    if isinstance(formula, AtomPred):
        return AtomPred(formula.name, tuple(fn(a) for a in formula.args), formula.arg_types)
    if isinstance(formula, St):
        return St(fn(formula.term))
    if isinstance(formula, BOUNDED_QUANTIFIERS):
        return replace(formula, bound=fn(formula.bound))
    if isinstance(formula, MEMBER_QUANTIFIERS):
        return replace(formula, seq=fn(formula.seq))
    return formula

def substitute(formula: Formula, name: str, value: Term) -> Formula:
    """Substituição sem captura de `name` por `value`"""
    free = free_vars(formula)
    if name in free and free[name] != infer_type(value):
        raise TypeCheckError(
            f"Substituição de {name}:{format_type(free[name])} por termo de tipo {format_type(infer_type(value))}")
    return _substitute(formula, name, value, set(free_vars_term(value)))

def _substitute(formula: Formula, name: str, value: Term, value_free: Set[str]) -> Formula:
    formula = _map_terms(formula, lambda t: substitute_term(t, name, value))
    if isinstance(formula, Not):
        return Not(_substitute(formula.body, name, value, value_free))
    if isinstance(formula, BINARY):
        return type(formula)(_substitute(formula.left, name, value, value_free),
                             _substitute(formula.right, name, value, value_free))
    if isinstance(formula, QUANTIFIERS):
        if formula.var == name or name not in free_vars(formula.body):
            return formula
        body = formula.body
        var = formula.var
        if var in value_free:
            new_var = fresh_variant(var, value_free | set(free_vars(body)) | {name})
            body = _substitute(body, var, Var(new_var, binder_type(formula)), {new_var})
            var = new_var
        return replace(formula, var=var, body=_substitute(body, name, value, value_free))
    return formula

def replace_terms(formula: Formula, mapping: Dict[Term, Term]) -> Formula:
    """Aplica `replace_subterm` em todos os termos; os binders não podem colidir com o mapeamento"""
    formula = _map_terms(formula, lambda t: replace_subterm(t, mapping))
    kids = children(formula)
    if not kids:
        return formula
    return with_children(formula, [replace_terms(kid, mapping) for kid in kids])

def rename_binders(formula: Formula, clashes: Set[str]) -> Formula:
    """Renomeia (com apóstrofo) binders cujo nome está em `clashes`"""
    if isinstance(formula, QUANTIFIERS) and formula.var in clashes:
        new_var = fresh_variant(formula.var, clashes | all_names(formula))
        body = substitute(formula.body, formula.var, Var(new_var, binder_type(formula)))
        formula = replace(formula, var=new_var, body=body)
    kids = children(formula)
    if not kids:
        return formula
    return with_children(formula, [rename_binders(kid, clashes) for kid in kids])

# Classificação e relativização

class Classification(str, Enum):
    INTERNAL = "Internal"
    EXTERNAL = "External"

def is_internal(formula: Formula) -> bool:
    if isinstance(formula, (St, ForallSt, ExistsSt)):
        return False
    return all(is_internal(child) for child in children(formula))

def classify_internal(formula: Formula) -> Classification:
    return Classification.INTERNAL if is_internal(formula) else Classification.EXTERNAL

def relativize_st(formula: Formula) -> Formula:
    """A^st: acrescenta st a todo quantificador não limitado"""
    if not is_internal(formula):
        raise RuleError("relativize_st exige fórmula interna")
    return _relativize(formula)

def _relativize(formula: Formula) -> Formula:
    if isinstance(formula, Forall):
        return ForallSt(formula.var, formula.type, _relativize(formula.body))
    if isinstance(formula, Exists):
        return ExistsSt(formula.var, formula.type, _relativize(formula.body))
    kids = children(formula)
    if not kids:
        return formula
    return with_children(formula, [_relativize(kid) for kid in kids])

def erase_st(formula: Formula) -> Formula:
    if isinstance(formula, ForallSt):
        return Forall(formula.var, formula.type, erase_st(formula.body))
    if isinstance(formula, ExistsSt):
        return Exists(formula.var, formula.type, erase_st(formula.body))
    if isinstance(formula, St):
        return TRUE
    kids = children(formula)
    if not kids:
        return formula
    return with_children(formula, [erase_st(kid) for kid in kids])

# Igualdade definida

class EqualityMode(str, Enum):
    EXACT = "Exact"
    APPROX = "Approx"

def bind_tuple(typ: FinType, avoid: Set[str]) -> Tuple[List[Tuple[str, FinType]], Term]:
    """Variáveis frescas para cada folha de um tipo produto e o termo-tupla correspondente"""
    if isinstance(typ, Prod):
        left_vars, left = bind_tuple(typ.left, avoid)
        right_vars, right = bind_tuple(typ.right, avoid)
        return left_vars + right_vars, Pair(left, right)
    name = fresh_indexed("n" if typ == BASE else "z", avoid)
    avoid.add(name)
    return [(name, typ)], Var(name, typ)

def expand_equality(lhs: Term, rhs: Term, typ: FinType, mode: EqualityMode,
                    avoid: Iterable[str] = ()) -> Formula:
    """=_τ (Exact) ou ≈_τ (Approx) desdobrados até igualdades de tipo 0"""
    names = set(avoid) | set(free_vars_term(lhs)) | set(free_vars_term(rhs))
    return _expand(lhs, rhs, typ, mode, names)

def _expand(lhs: Term, rhs: Term, typ: FinType, mode: EqualityMode, avoid: Set[str]) -> Formula:
    if isinstance(typ, Base):
        return AtomEq0(lhs, rhs)
    if isinstance(typ, Prod):
        return And(_expand(Proj1(lhs), Proj1(rhs), typ.left, mode, avoid),
                   _expand(Proj2(lhs), Proj2(rhs), typ.right, mode, avoid))
    if isinstance(typ, Seq):
        raise TypeCheckError(f"Igualdade não definida para o tipo de sequência {format_type(typ)}")
    bindings, arg = bind_tuple(typ.domain, avoid)
    body = _expand(App(lhs, arg), App(rhs, arg), typ.codomain, mode, avoid)
    kind = ForallSt if mode == EqualityMode.APPROX else Forall
    return quantify(kind, bindings, body)

# Equivalência alfa

def _canon_term(term: Term, env: Dict[str, str]) -> Term:
    if isinstance(term, Var):
        return Var(env.get(term.name, term.name), term.type)
    return map_term(term, lambda child: _canon_term(child, env))

def canonical(formula: Formula, env: Optional[Dict[str, str]] = None, depth: int = 0) -> Formula:
    """Renomeia binders para `#0`, `#1`, ... pela profundidade"""
    env = env or {}
    formula = _map_terms(formula, lambda t: _canon_term(t, env))
    if isinstance(formula, QUANTIFIERS):
        inner = dict(env)
        inner[formula.var] = f"#{depth}"
        return replace(formula, var=f"#{depth}", body=canonical(formula.body, inner, depth + 1))
    kids = children(formula)
    if not kids:
        return formula
    return with_children(formula, [canonical(kid, env, depth) for kid in kids])

def alpha_equivalent(left: Formula, right: Formula) -> bool:
    return canonical(left) == canonical(right)

def substitute_all(formula: Formula, mapping: Dict[str, Term]) -> Formula:
    """Substituição simultânea, passando por nomes temporários que não colidem com a superfície"""
    temporaries = {}
    for index, (name, value) in enumerate(mapping.items()):
        temp = f"#{index}"
        formula = substitute(formula, name, Var(temp, infer_type(value)))
        temporaries[temp] = value
    for temp, value in temporaries.items():
        formula = substitute(formula, temp, value)
    return formula
