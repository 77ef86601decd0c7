"""
Sintaxe concreta: gramática lark, elaboração para a AST tipada e impressão canônica.

A impressão é determinística e satisfaz parse(print(φ)) == φ nó a nó.
"""
import logging
import re
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedInput

from errors import ParseError, SignatureError, TypeCheckError
from syntax import (
    BASE, Arrow, Prod, Seq, FinType, Term, Formula, EqualityMode,
    Var, Zero, Succ, App, Pair, Proj1, Proj2, SeqLit, Len, Idx, Max0, FunSym,
    AtomEq0, AtomLe, AtomPred, St, Not, And, Or, Implies,
    Forall, Exists, ForallSt, ExistsSt, BoundedForall, BoundedExists, ForallIn, ExistsIn,
    pure_type, format_type, infer_type, numeral, numeral_value, expand_equality,
    free_vars, formula_terms, term_children, children,
)

logger = logging.getLogger(__name__)

GRAMMAR = r"""
start: formula
type_start: type
term_start: term

?formula: implication
        | quantified

?implication: disjunction
            | disjunction "->" formula -> implies

?disjunction: conjunction
            | disjunction "|" conjunction -> or_

?conjunction: unary
            | conjunction "&" unary -> and_

?unary: "~" unary -> not_
      | atom
      | "(" formula ")"

quantified: "!" NAME ":" type "." formula -> forall
          | "?" NAME ":" type "." formula -> exists
          | "!" "st" NAME ":" type "." formula -> forall_st
          | "?" "st" NAME ":" type "." formula -> exists_st
          | "!" NAME "<=" term "." formula -> bounded_forall
          | "?" NAME "<=" term "." formula -> bounded_exists
          | "!" NAME "in" term "." formula -> forall_in
          | "?" NAME "in" term "." formula -> exists_in

atom: term "=" term -> eq
    | term "<=" term -> le
    | term "==" "[" type "]" term -> eq_typed
    | term "~~" "[" type "]" term -> approx
    | "st" "(" term ")" -> st_atom
    | NAME "(" [terms] ")" -> pred
    | NAME -> pred0

term: NUMBER -> number
    | NAME -> name
    | NAME "(" [terms] ")" -> call
    | "[" terms "]" -> seq_lit
    | "[" ":" type "]" -> empty_seq

terms: term ("," term)*

type: type_base SEQ_STAR*
?type_base: NUMBER -> pure
          | "(" type "->" type ")" -> arrow
          | "(" type "*" type ")" -> prod

SEQ_STAR: "^*"
NAME: /[A-Za-z_][A-Za-z0-9_']*/
NUMBER: /[0-9]+/

%import common.WS
%ignore WS
"""

_parser = Lark(GRAMMAR, parser="lalr", lexer="contextual", propagate_positions=True,
               start=["start", "type_start", "term_start"])

BUILTINS = {"app": 2, "s": 1, "pair": 2, "p1": 1, "p2": 1, "len": 1, "idx": 2, "max": 1}

# Assinatura

@dataclass
class Signature:
    symbols: Dict[str, Tuple[FinType, ...]] = field(default_factory=dict)
    relations: Dict[str, Tuple[FinType, ...]] = field(default_factory=dict)

    def declare_symbol(self, name: str, arg_types: Tuple[FinType, ...]):
        self._check_free(name)
        self.symbols[name] = tuple(arg_types)

    def declare_relation(self, name: str, arg_types: Tuple[FinType, ...]):
        self._check_free(name)
        self.relations[name] = tuple(arg_types)

    def _check_free(self, name: str):
        if name in BUILTINS or name in ("st", "in"):
            raise SignatureError(f"Nome reservado não pode ser declarado: {name}")
        if name in self.symbols or name in self.relations:
            raise SignatureError(f"Símbolo declarado duas vezes: {name}")

    def merged(self, other: "Signature") -> "Signature":
        result = Signature(dict(self.symbols), dict(self.relations))
        for name, types in other.symbols.items():
            if result.symbols.get(name, types) != types:
                raise SignatureError(f"Declarações incompatíveis para {name}")
            result.symbols[name] = types
        for name, types in other.relations.items():
            if result.relations.get(name, types) != types:
                raise SignatureError(f"Declarações incompatíveis para {name}")
            result.relations[name] = types
        return result

    def header_lines(self) -> List[str]:
        lines = []
        for name in sorted(self.symbols):
            lines.append(f"sym {name} : {_format_arity(self.symbols[name])} -> 0")
        for name in sorted(self.relations):
            args = self.relations[name]
            lines.append(f"rel {name} : {_format_arity(args)}" if args else f"rel {name}")
        return lines

def _format_arity(types: Tuple[FinType, ...]) -> str:
    return " x ".join(format_type(t) for t in types)

def signature_of(formula: Formula) -> Signature:
    """Reconstrói a assinatura a partir dos tipos gravados nos nós"""
    signature = Signature()
    def visit_term(term: Term):
        if isinstance(term, FunSym):
            signature.symbols[term.name] = term.arg_types
        for child in term_children(term):
            visit_term(child)
    def visit(node: Formula):
        if isinstance(node, AtomPred):
            signature.relations[node.name] = node.arg_types
        for term in formula_terms(node):
            visit_term(term)
        for child in children(node):
            visit(child)
    visit(formula)
    return signature

# Elaboração

@dataclass(frozen=True)
class _Env:
    signature: Signature
    context: Dict[str, FinType]

    def bind(self, name: str, typ: FinType) -> "_Env":
        context = dict(self.context)
        context[name] = typ
        return _Env(self.signature, context)

def _where(meta) -> str:
    line = getattr(meta, "line", None)
    if line is None:
        return ""
    return f" (linha {line}, coluna {meta.column})"

def _typed(build: Callable[[], object], meta):
    """Constrói o nó e confere o tipo, anexando a posição ao erro"""
    try:
        node = build()
        if isinstance(node, (Var, Zero, Succ, App, Pair, Proj1, Proj2, SeqLit, Len, Idx, Max0, FunSym)):
            infer_type(node)
        return node
    except TypeCheckError as e:
        if "(linha" in e.detail:
            raise
        raise TypeCheckError(e.detail + _where(meta))

def _expect_base(term: Term, meta):
    typ = infer_type(term)
    if typ != BASE:
        raise TypeCheckError(
            f"Átomo exige termos de tipo 0, recebeu {format_type(typ)}: {format_term(term)}; "
            f"use ==[T] ou ~~[T] para tipos superiores" + _where(meta))

@v_args(meta=True)
class _Elaborator(Transformer):
    """Cada regra devolve uma função env -> nó, para tipar variáveis ligadas de cima para baixo"""

    def start(self, meta, items):
        return items[0]

    type_start = start
    term_start = start

    # tipos

    def pure(self, meta, items):
        return pure_type(int(items[0]))

    def arrow(self, meta, items):
        return Arrow(items[0], items[1])

    def prod(self, meta, items):
        return Prod(items[0], items[1])

    def type(self, meta, items):
        typ = items[0]
        for _ in items[1:]:
            typ = Seq(typ)
        return typ

    # termos

    def number(self, meta, items):
        value = int(items[0])
        return lambda env: numeral(value)

    def name(self, meta, items):
        name = str(items[0])

        def build(env: _Env):
            if name in env.context:
                return Var(name, env.context[name])
            if name in env.signature.symbols and not env.signature.symbols[name]:
                return FunSym(name, (), ())
            raise TypeCheckError(f"Variável não declarada: {name}" + _where(meta))
        return build

    def terms(self, meta, items):
        return list(items)

    def call(self, meta, items):
        name = str(items[0])
        args = items[1] or []

        def build(env: _Env):
            values = [arg(env) for arg in args]
            if name in BUILTINS:
                if len(values) != BUILTINS[name]:
                    raise TypeCheckError(
                        f"{name} espera {BUILTINS[name]} argumentos, recebeu {len(values)}" + _where(meta))
                return _typed(lambda: _builtin(name, values), meta)
            if name in env.signature.symbols:
                arg_types = env.signature.symbols[name]
                return _typed(lambda: FunSym(name, tuple(values), arg_types), meta)
            if name in env.signature.relations:
                raise TypeCheckError(f"Relação {name} usada como termo" + _where(meta))
            raise SignatureError(f"Símbolo não declarado: {name}" + _where(meta))
        return build

    def seq_lit(self, meta, items):
        args = items[0]

        def build(env: _Env):
            values = [arg(env) for arg in args]
            return _typed(lambda: SeqLit(tuple(values), infer_type(values[0])), meta)
        return build

    def empty_seq(self, meta, items):
        elem_type = items[0]
        return lambda env: SeqLit((), elem_type)

    # átomos

    def eq(self, meta, items):
        lhs, rhs = items

        def build(env: _Env):
            left, right = lhs(env), rhs(env)
            _expect_base(left, meta)
            _expect_base(right, meta)
            return AtomEq0(left, right)
        return build

    def le(self, meta, items):
        lhs, rhs = items

        def build(env: _Env):
            left, right = lhs(env), rhs(env)
            _expect_base(left, meta)
            _expect_base(right, meta)
            return AtomLe(left, right)
        return build

    def _defined_equality(self, meta, items, mode: EqualityMode):
        lhs, typ, rhs = items

        def build(env: _Env):
            left, right = lhs(env), rhs(env)
            for side in (left, right):
                if infer_type(side) != typ:
                    raise TypeCheckError(
                        f"Termo {format_term(side)} não tem tipo {format_type(typ)}" + _where(meta))
            return expand_equality(left, right, typ, mode, avoid=env.context.keys())
        return build

    def eq_typed(self, meta, items):
        return self._defined_equality(meta, items, EqualityMode.EXACT)

    def approx(self, meta, items):
        return self._defined_equality(meta, items, EqualityMode.APPROX)

    def st_atom(self, meta, items):
        term = items[0]
        return lambda env: St(term(env))

    def pred(self, meta, items):
        name = str(items[0])
        args = items[1] or []

        def build(env: _Env):
            if name not in env.signature.relations:
                if name in BUILTINS or name in env.signature.symbols:
                    raise TypeCheckError(f"Termo {name}(...) usado como fórmula" + _where(meta))
                raise SignatureError(f"Relação não declarada: {name}" + _where(meta))
            arg_types = env.signature.relations[name]
            values = tuple(arg(env) for arg in args)
            if len(values) != len(arg_types):
                raise TypeCheckError(
                    f"{name} espera {len(arg_types)} argumentos, recebeu {len(values)}" + _where(meta))
            for value, expected in zip(values, arg_types):
                if infer_type(value) != expected:
                    raise TypeCheckError(
                        f"Argumento {format_term(value)} de {name} deveria ter tipo {format_type(expected)}"
                        + _where(meta))
            return AtomPred(name, values, arg_types)
        return build

    def pred0(self, meta, items):
        return self.pred(meta, [items[0], []])

    # conectivos

    def not_(self, meta, items):
        body = items[0]
        return lambda env: Not(body(env))

    def _binary(self, kind, items):
        left, right = items
        return lambda env: kind(left(env), right(env))

    def and_(self, meta, items):
        return self._binary(And, items)

    def or_(self, meta, items):
        return self._binary(Or, items)

    def implies(self, meta, items):
        return self._binary(Implies, items)

    # quantificadores

    def _typed_quantifier(self, kind, items):
        name, typ, body = str(items[0]), items[1], items[2]
        return lambda env: kind(name, typ, body(env.bind(name, typ)))

    def forall(self, meta, items):
        return self._typed_quantifier(Forall, items)

    def exists(self, meta, items):
        return self._typed_quantifier(Exists, items)

    def forall_st(self, meta, items):
        return self._typed_quantifier(ForallSt, items)

    def exists_st(self, meta, items):
        return self._typed_quantifier(ExistsSt, items)

    def _bounded(self, kind, meta, items):
        name, bound, body = str(items[0]), items[1], items[2]

        def build(env: _Env):
            limit = bound(env)
            _expect_base(limit, meta)
            return kind(name, limit, body(env.bind(name, BASE)))
        return build

    def bounded_forall(self, meta, items):
        return self._bounded(BoundedForall, meta, items)

    def bounded_exists(self, meta, items):
        return self._bounded(BoundedExists, meta, items)

    def _member(self, kind, meta, items):
        name, seq, body = str(items[0]), items[1], items[2]

        def build(env: _Env):
            collection = seq(env)
            typ = infer_type(collection)
            if not isinstance(typ, Seq):
                raise TypeCheckError(
                    f"Quantificador 'in' exige sequência, recebeu {format_type(typ)}" + _where(meta))
            return kind(name, typ.element, collection, body(env.bind(name, typ.element)))
        return build

    def forall_in(self, meta, items):
        return self._member(ForallIn, meta, items)

    def exists_in(self, meta, items):
        return self._member(ExistsIn, meta, items)

    quantified = start
    atom = start

def _builtin(name: str, args: List[Term]) -> Term:
    if name == "app":
        return App(args[0], args[1])
    if name == "s":
        return Succ(args[0])
    if name == "pair":
        return Pair(args[0], args[1])
    if name == "p1":
        return Proj1(args[0])
    if name == "p2":
        return Proj2(args[0])
    if name == "len":
        return Len(args[0])
    if name == "idx":
        return Idx(args[0], args[1])
    return Max0(args[0])

def _run(text: str, start: str):
    try:
        tree = _parser.parse(text, start=start)
    except UnexpectedInput as e:
        line = getattr(e, "line", None)
        column = getattr(e, "column", None)
        if line is None or line < 0:
            line, column = None, None
        raise ParseError(f"Erro de sintaxe: {_describe(e)}", line, column)
    return _Elaborator().transform(tree)

def _describe(error: UnexpectedInput) -> str:
    token = getattr(error, "token", None)
    if token is not None:
        return f"token inesperado {str(token)!r}" if str(token) else "fim de texto inesperado"
    char = getattr(error, "char", None)
    if char is not None:
        return f"caractere inesperado {char!r}"
    return "entrada incompleta"

def parse_type(text: str) -> FinType:
    return _run(text, "type_start")

def parse_term(text: str, signature: Optional[Signature] = None,
               context: Optional[Dict[str, FinType]] = None) -> Term:
    build = _run(text, "term_start")
    return build(_Env(signature or Signature(), dict(context or {})))

def parse_formula(text: str, signature: Optional[Signature] = None,
                  context: Optional[Dict[str, FinType]] = None) -> Formula:
    """Fórmula tipada; erros de sintaxe trazem linha e coluna"""
    build = _run(text, "start")
    formula = build(_Env(signature or Signature(), dict(context or {})))
    logger.debug("Fórmula elaborada: %s", format_formula(formula))
    return formula

# Documentos com cabeçalho

@dataclass
class Document:
    signature: Signature
    context: Dict[str, FinType]
    formula: Formula

_SYM_LINE = re.compile(r"^sym\s+([A-Za-z_][A-Za-z0-9_']*)\s*:\s*(.*)->\s*0\s*$")
_REL_LINE = re.compile(r"^rel\s+([A-Za-z_][A-Za-z0-9_']*)\s*(?::\s*(.+))?$")
_VAR_LINE = re.compile(r"^var\s+([A-Za-z_][A-Za-z0-9_']*)\s*:\s*(.+)$")

def _parse_arity(text: str, line_no: int) -> Tuple[FinType, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(parse_type(part) for part in re.split(r"\s+x\s+", text))
    except ParseError as e:
        raise ParseError(f"Tipo inválido no cabeçalho: {text}", line_no, 1) from e

def parse_document(text: str) -> Document:
    """Cabeçalho (`sym`, `rel`, `var`, comentários `#`) seguido de uma fórmula"""
    signature = Signature()
    context: Dict[str, FinType] = {}
    body_lines = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            body_lines.append("")
            continue
        match = _SYM_LINE.match(line)
        if match and line.startswith("sym "):
            signature.declare_symbol(match.group(1), _parse_arity(match.group(2), line_no))
            body_lines.append("")
            continue
        match = _REL_LINE.match(line)
        if match and line.startswith("rel "):
            signature.declare_relation(match.group(1), _parse_arity(match.group(2) or "", line_no))
            body_lines.append("")
            continue
        match = _VAR_LINE.match(line)
        if match and line.startswith("var "):
            context[match.group(1)] = parse_type(match.group(2))
            body_lines.append("")
            continue
        if line.split()[0] in ("sym", "rel", "var"):
            raise ParseError(f"Linha de cabeçalho mal formada: {line}", line_no, 1)
        body_lines.append(raw)
    if not any(part.strip() for part in body_lines):
        raise ParseError("Documento sem fórmula")
    formula = parse_formula("\n".join(body_lines), signature, context)
    return Document(signature, context, formula)

def format_document(formula: Formula, comment: Optional[str] = None) -> str:
    """Documento autocontido: declarações usadas, variáveis livres e a fórmula"""
    lines = []
    if comment:
        lines.append(f"# {comment}")
    lines.extend(signature_of(formula).header_lines())
    for name, typ in sorted(free_vars(formula).items()):
        lines.append(f"var {name} : {format_type(typ)}")
    lines.append(format_formula(formula))
    return "\n".join(lines) + "\n"

# Impressão

def format_term(term: Term) -> str:
    value = numeral_value(term)
    if value is not None:
        return str(value)
    if isinstance(term, Var):
        return term.name
    if isinstance(term, Succ):
        return f"s({format_term(term.arg)})"
    if isinstance(term, App):
        return f"app({format_term(term.fun)},{format_term(term.arg)})"
    if isinstance(term, Pair):
        return f"pair({format_term(term.left)},{format_term(term.right)})"
    if isinstance(term, Proj1):
        return f"p1({format_term(term.arg)})"
    if isinstance(term, Proj2):
        return f"p2({format_term(term.arg)})"
    if isinstance(term, Len):
        return f"len({format_term(term.arg)})"
    if isinstance(term, Idx):
        return f"idx({format_term(term.seq)},{format_term(term.index)})"
    if isinstance(term, Max0):
        return f"max({format_term(term.arg)})"
    if isinstance(term, SeqLit):
        if not term.items:
            return f"[:{format_type(term.elem_type)}]"
        return "[" + ",".join(format_term(item) for item in term.items) + "]"
    if isinstance(term, FunSym):
        return f"{term.name}(" + ",".join(format_term(arg) for arg in term.args) + ")"
    raise TypeCheckError(f"Termo desconhecido: {term!r}")

# Níveis: quantificador 0, -> 1, | 2, & 3, unários e átomos 4
_LEVEL = {Implies: 1, Or: 2, And: 3}

def _level(formula: Formula) -> int:
    if isinstance(formula, (Forall, Exists, ForallSt, ExistsSt, BoundedForall, BoundedExists,
                            ForallIn, ExistsIn)):
        return 0
    return _LEVEL.get(type(formula), 4)

def _format_at(formula: Formula, required: int) -> str:
    text = _format(formula)
    return f"({text})" if _level(formula) < required else text

def _format(formula: Formula) -> str:
    if isinstance(formula, AtomEq0):
        return f"{format_term(formula.lhs)} = {format_term(formula.rhs)}"
    if isinstance(formula, AtomLe):
        return f"{format_term(formula.lhs)} <= {format_term(formula.rhs)}"
    if isinstance(formula, AtomPred):
        if not formula.args:
            return formula.name
        return f"{formula.name}(" + ",".join(format_term(a) for a in formula.args) + ")"
    if isinstance(formula, St):
        return f"st({format_term(formula.term)})"
    if isinstance(formula, Not):
        if isinstance(formula.body, (AtomPred, St)):
            return "~" + _format(formula.body)
        return f"~({_format(formula.body)})"
    if isinstance(formula, And):
        return f"{_format_at(formula.left, 3)} & {_format_at(formula.right, 4)}"
    if isinstance(formula, Or):
        return f"{_format_at(formula.left, 2)} | {_format_at(formula.right, 3)}"
    if isinstance(formula, Implies):
        return f"{_format_at(formula.left, 2)} -> {_format_at(formula.right, 0)}"
    return _quantifier_head(formula) + _format(formula.body)

def _quantifier_head(formula: Formula) -> str:
    if isinstance(formula, Forall):
        return f"!{formula.var}:{format_type(formula.type)}. "
    if isinstance(formula, Exists):
        return f"?{formula.var}:{format_type(formula.type)}. "
    if isinstance(formula, ForallSt):
        return f"!st {formula.var}:{format_type(formula.type)}. "
    if isinstance(formula, ExistsSt):
        return f"?st {formula.var}:{format_type(formula.type)}. "
    if isinstance(formula, BoundedForall):
        return f"!{formula.var} <= {format_term(formula.bound)}. "
    if isinstance(formula, BoundedExists):
        return f"?{formula.var} <= {format_term(formula.bound)}. "
    if isinstance(formula, ForallIn):
        return f"!{formula.var} in {format_term(formula.seq)}. "
    return f"?{formula.var} in {format_term(formula.seq)}. "

def format_formula(formula: Formula) -> str:
    return _format(formula)

print_formula = format_formula
