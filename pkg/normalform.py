"""
Motor de reescrita que leva implicações entre enunciados com quantificadores st
à forma normal `!st x. ?st y. ψ` com ψ interna.

A estratégia é determinística: para cada movimento (regra + caso) na ordem de
`MOVES`, procura-se a primeira posição em pré-ordem onde ele se aplica. Cada passo
fica registrado num `RuleTrace`, que pode ser reaplicado com `replay`.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Set, Tuple

from errors import FragmentError, RuleError, TraceError
from syntax import (
    BASE, BINARY, QUANTIFIERS, TRUE, And, App, Arrow, AtomEq0, AtomLe, BoundedExists, BoundedForall,
    EqualityMode, Exists, ExistsIn, ExistsSt, FinType, Forall, ForallIn, ForallSt, Formula, Implies,
    Not, Or, Pair, Path, Prod, Seq, St, Var, all_names, check_formula, children, conjunction,
    conjuncts, expand_equality, format_path, formula_terms, free_vars, free_vars_term, fresh_indexed,
    fresh_variant, is_internal, peel, positions, quantify, replace_at, subformula_at, substitute,
    substitute_all, tuple_projections, tuple_term, tuple_type,
)
from surface import format_formula

logger = logging.getLogger(__name__)

class Logic(str, Enum):
    CLASSICAL = "classical"
    INTUITIONISTIC = "intuitionistic"

class Rule(str, Enum):
    PRENEX_AND_ST = "PrenexAndSt"
    PRENEX_OR_ST = "PrenexOrSt"
    PRENEX_IMPLIES_ST = "PrenexImpliesSt"
    DOUBLE_NEG_ST = "DoubleNegSt"
    IDEALISATION = "Idealisation"
    HAC_INT = "HACint"
    HGMP_ST = "HGMPst"
    HIP_FORALL_ST = "HIPforallst"
    EXPAND_APPROX = "ExpandApprox"
    EXPAND_EXACT_EQ = "ExpandExactEq"
    EXPAND_STD_EXT = "ExpandStdExt"
    DROP_ST_ANTECEDENT = "DropStAntecedent"
    MARKOV_ST = "MarkovSt"
    BOUND_SEARCH = "BoundSearch"

class Direction(str, Enum):
    EQUIVALENCE = "equivalence"
    AXIOM = "axiom"
    WEAKENING = "weakening"

@dataclass(frozen=True)
class RuleInfo:
    direction: Direction
    classical_only: bool
    description: str

RULE_INFO: Dict[Rule, RuleInfo] = {
    Rule.PRENEX_AND_ST: RuleInfo(Direction.EQUIVALENCE, False, "Extrai quantificador st de uma conjunção"),
    Rule.PRENEX_OR_ST: RuleInfo(Direction.EQUIVALENCE, True, "Extrai quantificador st de uma disjunção"),
    Rule.PRENEX_IMPLIES_ST: RuleInfo(Direction.EQUIVALENCE, False, "Extrai quantificador st de uma implicação"),
    Rule.DOUBLE_NEG_ST: RuleInfo(Direction.EQUIVALENCE, False, "Elimina dupla negação e empurra ~ por ?st"),
    Rule.IDEALISATION: RuleInfo(Direction.AXIOM, False, "Idealização: troca !st x* ?y !z in x por ?y !st z"),
    Rule.HAC_INT: RuleInfo(Direction.AXIOM, False, "Axioma da escolha herbrandizado"),
    Rule.HGMP_ST: RuleInfo(Direction.AXIOM, False, "Princípio de Markov generalizado herbrandizado"),
    Rule.HIP_FORALL_ST: RuleInfo(Direction.AXIOM, False, "Independência de premissa herbrandizada"),
    Rule.EXPAND_APPROX: RuleInfo(Direction.EQUIVALENCE, False, "Desdobra ≈ de tipo 1 em segmentos iniciais"),
    Rule.EXPAND_EXACT_EQ: RuleInfo(Direction.EQUIVALENCE, False, "Desdobra = de tipo 1 em segmentos iniciais"),
    Rule.EXPAND_STD_EXT: RuleInfo(Direction.EQUIVALENCE, False, "Prenexa uma cláusula de extensionalidade padrão"),
    Rule.DROP_ST_ANTECEDENT: RuleInfo(Direction.WEAKENING, True, "Remove st de um bloco universal do antecedente"),
    Rule.MARKOV_ST: RuleInfo(Direction.EQUIVALENCE, True, "Markov relativo a st: ~!st x A vira ?st x ~A"),
    Rule.BOUND_SEARCH: RuleInfo(Direction.EQUIVALENCE, False, "Troca ?st m. φ(m) por busca limitada ?i <= m"),
}

# Formas normais

Binding = Tuple[str, FinType]

@dataclass(frozen=True)
class NormalForm:
    st_universals: Tuple[Binding, ...]
    st_existentials: Tuple[Binding, ...]
    matrix: Formula

    def to_formula(self) -> Formula:
        return quantify(ForallSt, self.st_universals, quantify(ExistsSt, self.st_existentials, self.matrix))

    def vacuous(self) -> List[str]:
        """Variáveis do prefixo que não ocorrem livres na matriz"""
        free = free_vars(self.matrix)
        return [name for name, _ in self.st_universals + self.st_existentials if name not in free]

def is_normal_form(formula: Formula) -> Optional[NormalForm]:
    universals, rest = peel(ForallSt, formula)
    existentials, matrix = peel(ExistsSt, rest)
    if not is_internal(matrix):
        return None
    names = [name for name, _ in universals + existentials]
    if len(set(names)) != len(names):
        return None
    return NormalForm(tuple(universals), tuple(existentials), matrix)

@dataclass(frozen=True)
class AntecedentForm:
    """`?st P. ?st Xi. (bloco_1 & ... & bloco_n)` com cada bloco `!st x̄. corpo interno`"""
    witnesses: Tuple[Binding, ...]
    clauses: Tuple[Tuple[Tuple[Binding, ...], Formula], ...]

    def to_formula(self) -> Formula:
        parts = [quantify(ForallSt, block, body) for block, body in self.clauses]
        return quantify(ExistsSt, self.witnesses, conjunction(parts))

# Nomes frescos

class NameSupply:
    """
    Fornece nomes frescos para as regras. No replay, devolve os nomes gravados no
    passo em vez de gerar novos.
    """

    def __init__(self, recorded: Optional[Sequence[str]] = None):
        self.counters: Dict[str, int] = {}
        self.recorded = list(recorded) if recorded is not None else None
        self.issued: List[str] = []

    def _take(self, candidate: str) -> str:
        if self.recorded is not None:
            if not self.recorded:
                raise TraceError("Nomes frescos gravados insuficientes para o replay")
            candidate = self.recorded.pop(0)
        self.issued.append(candidate)
        return candidate

    def counter(self, prefix: str, avoid: Set[str]) -> str:
        n = self.counters.get(prefix, 0) + 1
        while f"{prefix}{n}" in avoid:
            n += 1
        self.counters[prefix] = n
        return self._take(f"{prefix}{n}")

    def indexed(self, base: str, avoid: Set[str]) -> str:
        return self._take(fresh_indexed(base, avoid))

    def primed(self, name: str, avoid: Set[str]) -> str:
        return self._take(fresh_variant(name, avoid))

# Traços

@dataclass(frozen=True)
class TraceStep:
    index: int
    rule: Rule
    path: Path
    fresh: Tuple[str, ...]
    after: Formula

    def line(self) -> str:
        fresh = ",".join(self.fresh) if self.fresh else "-"
        return (f"STEP {self.index} {self.rule.value} AT {format_path(self.path)} "
                f"FRESH {fresh} => {format_formula(self.after)}")

@dataclass
class RuleTrace:
    initial: Formula
    logic: Logic
    steps: List[TraceStep] = field(default_factory=list)

    @property
    def final(self) -> Formula:
        return self.steps[-1].after if self.steps else self.initial

    def lines(self) -> List[str]:
        return [step.line() for step in self.steps]

    def to_text(self) -> str:
        return "\n".join(self.lines())

    def fresh_names(self) -> List[str]:
        return [name for step in self.steps for name in step.fresh]

# Casos das regras

class _SideCondition(Exception):
    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

@dataclass
class _Site:
    whole: Formula
    path: Path
    node: Formula
    logic: Logic
    names: NameSupply

    @property
    def classical(self) -> bool:
        return self.logic == Logic.CLASSICAL

    def avoid(self) -> Set[str]:
        return all_names(self.whole)

Case = Callable[[_Site], Optional[Formula]]

def _pull(site: _Site, quantifier, other: Formula, make) -> Formula:
    """Extrai `quantifier` por cima do outro operando, renomeando se houver captura"""
    var, body = quantifier.var, quantifier.body
    if var in free_vars(other):
        new = site.names.primed(var, site.avoid())
        body = substitute(body, var, Var(new, quantifier.type))
        var = new
    return make(var, quantifier.type, body)

def _binary_pull(site: _Site, connective, kind, result_kind) -> Optional[Formula]:
    node = site.node
    if not isinstance(node, connective):
        return None
    if isinstance(node.left, kind):
        return _pull(site, node.left, node.right,
                     lambda v, t, b: result_kind(v, t, connective(b, node.right)))
    if isinstance(node.right, kind):
        return _pull(site, node.right, node.left,
                     lambda v, t, b: result_kind(v, t, connective(node.left, b)))
    return None

def _and_exists(site: _Site) -> Optional[Formula]:
    return _binary_pull(site, And, ExistsSt, ExistsSt)

def _and_forall(site: _Site) -> Optional[Formula]:
    return _binary_pull(site, And, ForallSt, ForallSt)

def _or_exists(site: _Site) -> Optional[Formula]:
    if not site.classical:
        return None
    return _binary_pull(site, Or, ExistsSt, ExistsSt)

def _or_forall(site: _Site) -> Optional[Formula]:
    if not site.classical:
        return None
    return _binary_pull(site, Or, ForallSt, ForallSt)

def _implies_exists_left(site: _Site) -> Optional[Formula]:
    node = site.node
    if not (isinstance(node, Implies) and isinstance(node.left, ExistsSt)):
        return None
    return _pull(site, node.left, node.right, lambda v, t, b: ForallSt(v, t, Implies(b, node.right)))

def _implies_forall_right(site: _Site) -> Optional[Formula]:
    node = site.node
    if not (isinstance(node, Implies) and isinstance(node.right, ForallSt)):
        return None
    return _pull(site, node.right, node.left, lambda v, t, b: ForallSt(v, t, Implies(node.left, b)))

def _implies_forall_left(site: _Site) -> Optional[Formula]:
    node = site.node
    if not (site.classical and isinstance(node, Implies) and isinstance(node.left, ForallSt)):
        return None
    return _pull(site, node.left, node.right, lambda v, t, b: ExistsSt(v, t, Implies(b, node.right)))

def _implies_exists_right(site: _Site) -> Optional[Formula]:
    node = site.node
    if not (isinstance(node, Implies) and isinstance(node.right, ExistsSt)):
        return None
    target = node.right
    if not site.classical:
        if not (is_internal(node.left) and target.type == BASE and is_monotone_in(target.body, target.var)):
            return None
    return _pull(site, target, node.left, lambda v, t, b: ExistsSt(v, t, Implies(node.left, b)))

def _double_negation(site: _Site) -> Optional[Formula]:
    node = site.node
    if site.classical and isinstance(node, Not) and isinstance(node.body, Not):
        return node.body.body
    return None

def _negated_exists(site: _Site) -> Optional[Formula]:
    node = site.node
    if isinstance(node, Not) and isinstance(node.body, ExistsSt):
        inner = node.body
        return ForallSt(inner.var, inner.type, Not(inner.body))
    return None

def _markov(site: _Site) -> Optional[Formula]:
    node = site.node
    if site.classical and isinstance(node, Not) and isinstance(node.body, ForallSt):
        inner = node.body
        return ExistsSt(inner.var, inner.type, Not(inner.body))
    return None

def _is_pointwise_equality(node: Formula, kind) -> bool:
    return isinstance(node, kind) and node.type == BASE and isinstance(node.body, AtomEq0)

def _expand_segment(site: _Site, kind) -> Optional[Formula]:
    node = site.node
    if not _is_pointwise_equality(node, kind):
        return None
    avoid = site.avoid()
    bound = site.names.indexed("N", avoid)
    index = site.names.indexed("j", avoid | {bound})
    body = substitute(node.body, node.var, Var(index, BASE))
    return kind(bound, BASE, BoundedForall(index, Var(bound, BASE), body))

def _expand_approx(site: _Site) -> Optional[Formula]:
    return _expand_segment(site, ForallSt)

def _expand_exact(site: _Site) -> Optional[Formula]:
    return _expand_segment(site, Forall)

def _is_segment_block(part: Formula) -> bool:
    return (isinstance(part, ForallSt) and part.type == BASE and isinstance(part.body, BoundedForall)
            and part.body.bound == Var(part.var, BASE) and is_internal(part.body))

def _expand_std_ext(site: _Site, require_block: bool = True) -> Optional[Formula]:
    outer, inner = peel(ForallSt, site.node)
    if not isinstance(inner, Implies):
        return None
    segments: List[str] = []
    for part in conjuncts(inner.left):
        if _is_segment_block(part):
            segments.append(part.var)
        elif not is_internal(part):
            return None
    if not segments:
        return None
    consequents = []
    for part in conjuncts(inner.right):
        block, body = peel(ForallSt, part)
        if not is_internal(body):
            return None
        consequents.append((block, body))
    if require_block and not any(block for block, _ in consequents):
        return None

    eliminated = set(segments) | {name for block, _ in consequents for name, _ in block}
    avoid = all_names(site.node) - eliminated
    shared_bound = site.names.indexed("N", avoid)
    avoid.add(shared_bound)
    shared: Dict[Tuple[int, FinType], str] = {}
    precision: List[Binding] = []
    for block, _ in consequents:
        for position, (_, typ) in enumerate(block):
            if (position, typ) not in shared:
                name = site.names.indexed("k" if typ == BASE else "z", avoid)
                avoid.add(name)
                shared[(position, typ)] = name
                precision.append((name, typ))

    antecedent = []
    for part in conjuncts(inner.left):
        if _is_segment_block(part):
            part = substitute(part.body, part.var, Var(shared_bound, BASE))
        antecedent.append(part)
    consequent = []
    for block, body in consequents:
        mapping = {name: Var(shared[(position, typ)], typ) for position, (name, typ) in enumerate(block)}
        consequent.append(substitute_all(body, mapping))
    matrix = ExistsSt(shared_bound, BASE, Implies(conjunction(antecedent), conjunction(consequent)))
    return quantify(ForallSt, outer + precision, matrix)

def _bound_search(site: _Site) -> Optional[Formula]:
    node = site.node
    if not (isinstance(node, ExistsSt) and node.type == BASE and is_internal(node.body)):
        return None
    if node.var not in free_vars(node.body) or is_monotone_in(node.body, node.var):
        return None
    index = site.names.indexed("i", site.avoid())
    body = substitute(node.body, node.var, Var(index, BASE))
    return ExistsSt(node.var, BASE, BoundedExists(index, Var(node.var, BASE), body))

def _hac_shape(node: Formula) -> Optional[Tuple[List[Binding], ExistsSt]]:
    block, inner = peel(ForallSt, node)
    if block and isinstance(inner, ExistsSt):
        return block, inner
    return None

def _hac(site: _Site) -> Optional[Formula]:
    shape = _hac_shape(site.node)
    if shape is None:
        return None
    block, inner = shape
    if not is_internal(inner.body):
        raise _SideCondition("HACint exige matriz interna sob ?st")
    functional_type = Arrow(tuple_type([t for _, t in block]), Seq(inner.type))
    name = site.names.counter("Xi", site.avoid())
    functional = Var(name, functional_type)
    arguments = tuple_term([Var(n, t) for n, t in block])
    search = ExistsIn(inner.var, inner.type, App(functional, arguments), inner.body)
    return ExistsSt(name, functional_type, quantify(ForallSt, block, search))

def _drop_st(site: _Site) -> Optional[Formula]:
    if not (site.classical and isinstance(site.node, ForallSt) and site.path):
        return None
    path = site.path
    while path and isinstance(subformula_at(site.whole, path[:-1]), And):
        path = path[:-1]
    if not path or path[-1] != 0 or not isinstance(subformula_at(site.whole, path[:-1]), Implies):
        return None
    block, body = peel(ForallSt, site.node)
    if not is_internal(body):
        return None
    return quantify(Forall, block, body)

def _st_blocks(antecedent: Formula) -> Optional[List[Tuple[List[Binding], Formula]]]:
    """Conjuntos do antecedente como (bloco !st, corpo interno); None fora do formato"""
    parts = []
    for part in conjuncts(antecedent):
        block, body = peel(ForallSt, part)
        if not is_internal(body):
            return None
        parts.append((block, body))
    if not any(block for block, _ in parts):
        return None
    return parts

def _hip(site: _Site) -> Optional[Formula]:
    node = site.node
    if not (isinstance(node, Implies) and isinstance(node.right, ExistsSt)):
        return None
    if _st_blocks(node.left) is None:
        return None
    target = node.right
    name = site.names.counter("sigma", site.avoid())
    herbrand = Var(name, Seq(target.type))
    return ExistsSt(name, Seq(target.type),
                    Implies(node.left, ExistsIn(target.var, target.type, herbrand, target.body)))

def _hgmp(site: _Site) -> Optional[Formula]:
    node = site.node
    if not isinstance(node, Implies):
        return None
    parts = _st_blocks(node.left)
    if parts is None:
        return None
    if not is_internal(node.right):
        raise _SideCondition("HGMPst exige consequente interno")
    avoid = site.avoid()
    sequences: List[Binding] = []
    guarded = []
    for block, body in parts:
        if not block:
            guarded.append(body)
            continue
        prefix = "W" if len(sequences) % 2 == 0 else "V"
        if len(block) == 1:
            var, element = block[0]
        else:
            element = tuple_type([t for _, t in block])
            var = site.names.counter("Z", avoid)
            avoid.add(var)
            projections = tuple_projections(Var(var, element), len(block))
            body = substitute_all(body, {n: p for (n, _), p in zip(block, projections)})
        seq_name = site.names.counter(prefix, avoid)
        avoid.add(seq_name)
        sequences.append((seq_name, Seq(element)))
        guarded.append(ForallIn(var, element, Var(seq_name, Seq(element)), body))
    return quantify(ExistsSt, sequences, Implies(conjunction(guarded), node.right))

def _idealisation(site: _Site) -> Optional[Formula]:
    node = site.node
    if not (isinstance(node, ForallSt) and isinstance(node.type, Seq) and isinstance(node.body, Exists)):
        return None
    middle = node.body
    inner = middle.body
    if not (isinstance(inner, ForallIn) and inner.seq == Var(node.var, node.type)
            and inner.elem_type == node.type.element):
        return None
    if node.var in free_vars(inner.body):
        return None
    if not is_internal(inner.body):
        raise _SideCondition("Idealização exige fórmula interna")
    return Exists(middle.var, middle.type, ForallSt(inner.var, inner.elem_type, inner.body))

# A ordem dos casos dentro de cada regra acompanha a ordem de MOVES, para que o
# replay escolha o mesmo caso que a estratégia.
CASES: Dict[Rule, List[Case]] = {
    Rule.PRENEX_AND_ST: [_and_exists, _and_forall],
    Rule.PRENEX_OR_ST: [_or_exists, _or_forall],
    Rule.PRENEX_IMPLIES_ST: [_implies_exists_left, _implies_forall_right, _implies_forall_left,
                             _implies_exists_right],
    Rule.DOUBLE_NEG_ST: [_double_negation, _negated_exists],
    Rule.IDEALISATION: [_idealisation],
    Rule.HAC_INT: [_hac],
    Rule.HGMP_ST: [_hgmp],
    Rule.HIP_FORALL_ST: [_hip],
    Rule.EXPAND_APPROX: [_expand_approx],
    Rule.EXPAND_EXACT_EQ: [_expand_exact],
    Rule.EXPAND_STD_EXT: [_expand_std_ext],
    Rule.DROP_ST_ANTECEDENT: [_drop_st],
    Rule.MARKOV_ST: [_markov],
    Rule.BOUND_SEARCH: [_bound_search],
}

# Monotonicidade

def is_monotone_in(formula: Formula, name: str) -> bool:
    """
    Certificado sintático: `name` só ocorre como limite de `?i <= name` ou como lado
    direito de `<=`, sempre em posição positiva. Nesses casos aumentar `name` preserva a
    verdade da fórmula.
    """
    return _monotone(formula, name, 1)

def _monotone(formula: Formula, name: str, sign: int) -> bool:
    if isinstance(formula, QUANTIFIERS) and formula.var == name:
        return all(name not in free_vars_term(t) for t in formula_terms(formula))
    if isinstance(formula, BoundedExists) and formula.bound == Var(name, BASE):
        return sign > 0 and _monotone(formula.body, name, sign)
    if isinstance(formula, AtomLe) and formula.rhs == Var(name, BASE):
        return sign > 0 and name not in free_vars_term(formula.lhs)
    if any(name in free_vars_term(t) for t in formula_terms(formula)):
        return False
    if isinstance(formula, Not):
        return _monotone(formula.body, name, -sign)
    if isinstance(formula, Implies):
        return _monotone(formula.left, name, -sign) and _monotone(formula.right, name, sign)
    return all(_monotone(child, name, sign) for child in children(formula))

# Aplicação de regras

def _rewrite(rule: Rule, formula: Formula, path: Path, logic: Logic, names: NameSupply) -> Formula:
    node = subformula_at(formula, path)
    site = _Site(formula, path, node, logic, names)
    problem = None
    for case in CASES[rule]:
        try:
            result = case(site)
        except _SideCondition as exc:
            problem = exc.detail
            continue
        if result is not None:
            return replace_at(formula, path, result)
    if problem is not None:
        raise RuleError(f"Condição lateral de {rule.value} violada em {format_path(path)}: {problem}")
    raise RuleError(f"Regra {rule.value} inaplicável em {format_path(path)}")

def apply_rule(rule: Rule, formula: Formula, path: Path = (), logic: Logic = Logic.CLASSICAL,
               fresh: Optional[Sequence[str]] = None) -> Formula:
    """Aplica `rule` na posição `path`; `fresh` fixa os nomes novos (usado no replay)"""
    if RULE_INFO[rule].classical_only and logic != Logic.CLASSICAL:
        raise RuleError(f"Regra {rule.value} disponível apenas na lógica clássica")
    names = NameSupply(recorded=fresh)
    return _rewrite(rule, formula, path, logic, names)

def replay(trace: RuleTrace) -> Formula:
    current = trace.initial
    for step in trace.steps:
        names = NameSupply(recorded=step.fresh)
        try:
            after = _rewrite(step.rule, current, step.path, trace.logic, names)
        except RuleError as exc:
            raise TraceError(f"Replay falhou no passo {step.index}: {exc.detail}")
        if after != step.after:
            raise TraceError(f"Replay divergente no passo {step.index} ({step.rule.value})")
        current = after
    return current

# Medida de terminação

def _walk(formula: Formula, path: Path = (), sign: int = 1, depth: int = 0) -> Iterator[Tuple[Path, Formula, int, int]]:
    yield path, formula, sign, depth
    inner = depth + 1 if isinstance(formula, (Not,) + BINARY) else depth
    for i, child in enumerate(children(formula)):
        flip = isinstance(formula, Not) or (isinstance(formula, Implies) and i == 0)
        yield from _walk(child, path + (i,), -sign if flip else sign, inner)

def _pending_site(node: Formula, path: Path, sign: int) -> bool:
    if _is_pointwise_equality(node, ForallSt):
        return True
    if (sign > 0 and isinstance(node, ExistsSt) and node.type == BASE and is_internal(node.body)
            and node.var in free_vars(node.body) and not is_monotone_in(node.body, node.var)):
        return True
    if sign < 0 and path:
        shape = _hac_shape(node)
        if shape is not None and is_internal(shape[1].body):
            return True
    return isinstance(node, Not)

def measure(formula: Formula) -> Tuple[int, int]:
    """(soma das profundidades conectivas dos nós st, sítios pendentes + negações)"""
    depth_sum = 0
    pending = 0
    for path, node, sign, depth in _walk(formula):
        if isinstance(node, (St, ForallSt, ExistsSt)):
            depth_sum += depth
        if _pending_site(node, path, sign):
            pending += 1
    return depth_sum, pending

# Estratégia

Filter = Callable[[Path, int], bool]

def _anywhere(path: Path, sign: int) -> bool:
    return True

def _positive(path: Path, sign: int) -> bool:
    return sign > 0

def _negative_inner(path: Path, sign: int) -> bool:
    return sign < 0 and bool(path)

@dataclass(frozen=True)
class Move:
    rule: Rule
    case: Case
    where: Filter = _anywhere
    external_only: bool = False

MOVES: Tuple[Move, ...] = (
    Move(Rule.EXPAND_APPROX, _expand_approx),
    Move(Rule.EXPAND_STD_EXT, _expand_std_ext),
    Move(Rule.BOUND_SEARCH, _bound_search, _positive),
    Move(Rule.HAC_INT, _hac, _negative_inner),
    Move(Rule.DOUBLE_NEG_ST, _double_negation, external_only=True),
    Move(Rule.DOUBLE_NEG_ST, _negated_exists),
    Move(Rule.MARKOV_ST, _markov),
    Move(Rule.PRENEX_AND_ST, _and_exists),
    Move(Rule.PRENEX_OR_ST, _or_exists),
    Move(Rule.PRENEX_IMPLIES_ST, _implies_exists_left),
    Move(Rule.PRENEX_IMPLIES_ST, _implies_forall_right),
    Move(Rule.PRENEX_AND_ST, _and_forall, _positive),
    Move(Rule.PRENEX_OR_ST, _or_forall, _positive),
    Move(Rule.DROP_ST_ANTECEDENT, _drop_st),
    Move(Rule.PRENEX_IMPLIES_ST, _implies_forall_left),
    Move(Rule.PRENEX_IMPLIES_ST, _implies_exists_right),
    Move(Rule.HIP_FORALL_ST, _hip),
    Move(Rule.HGMP_ST, _hgmp),
)

ANTECEDENT_MOVES = (MOVES[0], MOVES[1], MOVES[3], MOVES[7])
# Na cláusula isolada o consequente pode vir sem bloco st (contradomínio ground)
EXTENSIONALITY_MOVES = (
    MOVES[0],
    Move(Rule.EXPAND_STD_EXT, lambda site: _expand_std_ext(site, require_block=False)),
    MOVES[10],
)

def _select(formula: Formula, logic: Logic, names: NameSupply,
            moves: Sequence[Move]) -> Optional[Tuple[Rule, Path, Formula]]:
    walked = list(_walk(formula))
    for move in moves:
        for path, node, sign, _ in walked:
            if not move.where(path, sign):
                continue
            if move.external_only and is_internal(node):
                continue
            site = _Site(formula, path, node, logic, names)
            try:
                result = move.case(site)
            except _SideCondition:
                continue
            if result is not None:
                return move.rule, path, replace_at(formula, path, result)
    return None

def _blocking_path(formula: Formula) -> Path:
    """Primeiro nó st em pré-ordem abaixo do prefixo de quantificadores st"""
    prefix: Path = ()
    node = formula
    while isinstance(node, (ForallSt, ExistsSt)):
        node = node.body
        prefix += (0,)
    for path, sub in positions(node):
        if isinstance(sub, (St, ForallSt, ExistsSt)):
            return prefix + path
    return prefix

def _drive(formula: Formula, logic: Logic, moves: Sequence[Move], until_normal: bool) -> RuleTrace:
    check_formula(formula)
    trace = RuleTrace(initial=formula, logic=logic)
    names = NameSupply()
    current = formula
    current_measure = measure(current)
    while not (until_normal and is_normal_form(current) is not None):
        start = len(names.issued)
        chosen = _select(current, logic, names, moves)
        if chosen is None:
            if not until_normal:
                break
            path = _blocking_path(current)
            error = FragmentError(
                f"Fórmula fora do fragmento suportado: nenhuma regra aplicável após "
                f"{len(trace.steps)} passo(s); nó bloqueante em {format_path(path)}", path)
            error.trace = trace
            raise error
        rule, path, after = chosen
        new_measure = measure(after)
        if not new_measure < current_measure:
            raise RuleError(f"Medida não decresceu no passo {len(trace.steps) + 1} ({rule.value})")
        step = TraceStep(len(trace.steps) + 1, rule, path, tuple(names.issued[start:]), after)
        trace.steps.append(step)
        logger.debug(step.line())
        current, current_measure = after, new_measure
    return trace

def normalize(formula: Formula, logic: Logic = Logic.CLASSICAL) -> Tuple[NormalForm, RuleTrace]:
    trace = _drive(formula, logic, MOVES, until_normal=True)
    logger.info("Forma normal obtida em %d passo(s) (%s)", len(trace.steps), logic.value)
    return is_normal_form(trace.final), trace

def normalize_implication(antecedent: Formula, consequent: Formula,
                          logic: Logic = Logic.CLASSICAL) -> Tuple[NormalForm, RuleTrace]:
    if antecedent == TRUE:
        return normalize(consequent, logic)
    if not isinstance(antecedent, ExistsSt):
        raise FragmentError("Antecedente deve ter a forma ?st P. (cláusulas)", ())
    if is_normal_form(consequent) is None:
        raise FragmentError("Consequente deve estar em forma normal", (1,))
    return normalize(Implies(antecedent, consequent), logic)

def normalize_antecedent(antecedent: Formula,
                         logic: Logic = Logic.CLASSICAL) -> Tuple[AntecedentForm, RuleTrace]:
    """Expande ≈, a extensionalidade e HACint no antecedente, devolvendo testemunhas e cláusulas"""
    trace = _drive(Implies(antecedent, TRUE), logic, ANTECEDENT_MOVES, until_normal=False)
    left = trace.final.left
    witnesses, body = peel(ExistsSt, left)
    clauses = []
    for i, part in enumerate(conjuncts(body)):
        block, inner = peel(ForallSt, part)
        if not is_internal(inner):
            raise FragmentError(f"Cláusula {i + 1} do antecedente não tem corpo interno", (0,))
        clauses.append((tuple(block), inner))
    return AntecedentForm(tuple(witnesses), tuple(clauses)), trace

# Extensionalidade padrão

_LEFT_NAMES = "fgh"
_RIGHT_NAMES = "uvw"

def _bind_leaves(typ: FinType, pool: str, avoid: Set[str], bound: List[Binding]):
    if isinstance(typ, Prod):
        left = _bind_leaves(typ.left, pool, avoid, bound)
        right = _bind_leaves(typ.right, pool, avoid, bound)
        return Pair(left, right)
    name = fresh_indexed(pool[len(bound) % len(pool)], avoid)
    avoid.add(name)
    bound.append((name, typ))
    return Var(name, typ)

def _has_seq(typ: FinType) -> bool:
    if isinstance(typ, Seq):
        return True
    if isinstance(typ, Arrow):
        return _has_seq(typ.domain) or _has_seq(typ.codomain)
    if isinstance(typ, Prod):
        return _has_seq(typ.left) or _has_seq(typ.right)
    return False

def standard_extensionality_clause(functional: str, domain: FinType, codomain: FinType) -> Formula:
    """`!st x̄. !st ȳ. (x̄ ≈ ȳ -> P(x̄) ≈ P(ȳ))` antes de qualquer expansão"""
    if _has_seq(domain) or _has_seq(codomain):
        raise RuleError("Extensionalidade exige domínio e contradomínio sem sequências")
    target = Var(functional, Arrow(domain, codomain))
    avoid = {functional}
    left: List[Binding] = []
    right: List[Binding] = []
    left_term = _bind_leaves(domain, _LEFT_NAMES, avoid, left)
    right_term = _bind_leaves(domain, _RIGHT_NAMES, avoid, right)
    agreement = conjunction([
        expand_equality(Var(l, t), Var(r, t), t, EqualityMode.APPROX, avoid)
        for (l, t), (r, _) in zip(left, right)
    ])
    image = expand_equality(App(target, left_term), App(target, right_term), codomain,
                            EqualityMode.APPROX, avoid)
    return quantify(ForallSt, left + right, Implies(agreement, image))

def expand_standard_extensionality(functional: str, domain: FinType, codomain: FinType) -> Formula:
    clause = standard_extensionality_clause(functional, domain, codomain)
    return _drive(clause, Logic.CLASSICAL, EXTENSIONALITY_MOVES, until_normal=False).final
