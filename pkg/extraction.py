"""
Extração de termos a partir de formas normais, colapso pelo máximo, herbrandização
e meta-reversão.

As testemunhas são símbolos de Herbrand `t_<y>` aplicados à tupla das variáveis
universais padrão. A receita de cada uma é composta de trás para frente pelo traço:
as variáveis st da fórmula inicial que ela representa, os passos que a introduziram
ou moveram e, para existenciais monótonas de tipo 0, o termo colapsado `max(t_y(ū))`.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from errors import ExtractionError, TraceError
from normalform import AntecedentForm, NormalForm, RuleTrace, Rule, Binding, is_monotone_in, replay
from syntax import (
    BASE, App, Arrow, ExistsIn, ExistsSt, FinType, ForallIn, ForallSt, Forall, Formula, Implies,
    Max0, Seq, Term, Var, all_names, conjunction, conjuncts, free_vars, fresh_indexed,
    fresh_variant, peel, positions, quantify, rename_binders, replace_terms, subformula_at, substitute,
    substitute_all, tuple_projections, tuple_term, tuple_type,
)

logger = logging.getLogger(__name__)

# Regras que só renomeiam ou movem uma existencial já presente
_PASS_THROUGH = {Rule.PRENEX_AND_ST, Rule.PRENEX_OR_ST, Rule.PRENEX_IMPLIES_ST, Rule.DOUBLE_NEG_ST,
                 Rule.MARKOV_ST}

@dataclass(frozen=True)
class Recipe:
    """Procedência de uma testemunha: variáveis st de origem, passos do traço e termo final"""
    kind: str
    origin: Tuple[str, ...]
    steps: Tuple[int, ...]
    term: Term
    collapsed: Optional[Term] = None

@dataclass
class ExtractionResult:
    universals: Tuple[Binding, ...]
    existentials: Tuple[Binding, ...]
    matrix: Formula
    witness_terms: Dict[str, Term]
    symbols: Dict[str, FinType]
    recipes: Dict[str, str]
    internal_sentence: Formula
    collapsed_sentence: Optional[Formula] = None
    vacuous: List[str] = field(default_factory=list)
    provenance: Dict[str, Recipe] = field(default_factory=dict)

def _tuple_of(bindings: Sequence[Binding]) -> Optional[Term]:
    if not bindings:
        return None
    return tuple_term([Var(name, typ) for name, typ in bindings])

def _herbrand_symbol(name: str, universals: Sequence[Binding], codomain: FinType) -> Tuple[Var, Term]:
    """Símbolo `name` de tipo tupla(universais) -> codomain e sua aplicação à tupla"""
    argument = _tuple_of(universals)
    if argument is None:
        symbol = Var(name, codomain)
        return symbol, symbol
    symbol = Var(name, Arrow(tuple_type([t for _, t in universals]), codomain))
    return symbol, App(symbol, argument)

def _recipe(name: str, trace: RuleTrace) -> Optional[str]:
    for step in trace.steps:
        if name in step.fresh:
            return "pass-through" if step.rule in _PASS_THROUGH else step.rule.value
    if not trace.steps:
        return "input"
    for _, node in positions(trace.initial):
        if isinstance(node, (ForallSt, ExistsSt)) and node.var == name:
            return "pass-through"
    return None

def _st_heads(formula: Formula) -> List[str]:
    heads = []
    while isinstance(formula, (ForallSt, ExistsSt)):
        heads.append(formula.var)
        formula = formula.body
    return heads

def _st_bound(formula: Formula) -> set:
    return {node.var for _, node in positions(formula) if isinstance(node, (ForallSt, ExistsSt))}

def _lineage(trace: RuleTrace) -> Dict[str, Tuple[Tuple[str, ...], Tuple[int, ...]]]:
    """Para cada variável st do traço: (variáveis st iniciais que ela representa, passos que a tocaram)"""
    lineage = {name: ((name,), ()) for name in _st_bound(trace.initial)}
    current = trace.initial
    for step in trace.steps:
        before = subformula_at(current, step.path)
        after = subformula_at(step.after, step.path)
        # uma variável nova herda das variáveis st que o passo consumiu
        consumed = sorted(_st_bound(before) - _st_bound(after))
        before_heads = _st_heads(before)
        for name in _st_heads(after):
            if name in step.fresh or name not in lineage:
                sources = [lineage[s] for s in consumed if s in lineage]
                origin = tuple(dict.fromkeys(o for src, _ in sources for o in src)) or (name,)
                steps = tuple(sorted({i for _, touched in sources for i in touched})) + (step.index,)
                lineage[name] = (origin, steps)
            elif name not in before_heads or step.rule is Rule.BOUND_SEARCH:
                origin, steps = lineage[name]
                lineage[name] = (origin, steps + (step.index,))
        current = step.after
    return lineage

def _search(existentials: Sequence[Binding], witnesses: Dict[str, Term], matrix: Formula) -> Formula:
    body = matrix
    for name, typ in reversed(list(existentials)):
        body = ExistsIn(name, typ, witnesses[name], body)
    return body

def extract(nf: NormalForm, trace: RuleTrace) -> ExtractionResult:
    final = replay(trace)
    if final != nf.to_formula():
        raise TraceError("O traço não reproduz a forma normal fornecida")
    avoid = all_names(final)
    witnesses: Dict[str, Term] = {}
    symbols: Dict[str, FinType] = {}
    recipes: Dict[str, str] = {}
    provenance: Dict[str, Recipe] = {}
    lineage = _lineage(trace)
    for name, typ in nf.st_existentials:
        recipe = _recipe(name, trace)
        if recipe is None:
            raise ExtractionError(f"Existencial {name} sem receita registrada no traço")
        symbol_name = fresh_variant(f"t_{name}", avoid)
        avoid.add(symbol_name)
        symbol, term = _herbrand_symbol(symbol_name, nf.st_universals, Seq(typ))
        witnesses[name] = term
        symbols[symbol_name] = symbol.type
        recipes[name] = recipe
        origin, steps = lineage.get(name, ((name,), ()))
        collapsed = Max0(term) if typ == BASE and is_monotone_in(nf.matrix, name) else None
        provenance[name] = Recipe(recipe, origin, steps, term, collapsed)
    sentence = quantify(Forall, nf.st_universals, _search(nf.st_existentials, witnesses, nf.matrix))
    logger.info("Extraídas %d testemunha(s)", len(witnesses))
    return ExtractionResult(
        universals=nf.st_universals,
        existentials=nf.st_existentials,
        matrix=nf.matrix,
        witness_terms=witnesses,
        symbols=symbols,
        recipes=recipes,
        internal_sentence=sentence,
        vacuous=nf.vacuous(),
        provenance=provenance,
    )

def collapse_monotone(result: ExtractionResult, monotone_vars: Sequence[str]) -> Formula:
    """Troca `?m in t(x)` por `m := max(t(x))` para cada variável monótona de tipo 0"""
    types = dict(result.existentials)
    matrix = result.matrix
    for name in monotone_vars:
        if name not in types:
            raise ExtractionError(f"{name} não é existencial da forma normal")
        if types[name] != BASE:
            raise ExtractionError(f"Variável não ground: {name}")
        if not is_monotone_in(matrix, name):
            raise ExtractionError(f"Certificado de monotonicidade falhou para {name}")
        matrix = substitute(matrix, name, Max0(result.witness_terms[name]))
    remaining = [(n, t) for n, t in result.existentials if n not in monotone_vars]
    return quantify(Forall, result.universals, _search(remaining, result.witness_terms, matrix))

def monotone_existentials(result: ExtractionResult) -> List[str]:
    return [name for name, typ in result.existentials
            if typ == BASE and is_monotone_in(result.matrix, name)]

# Herbrandização

@dataclass(frozen=True)
class HerbrandClause:
    block: Tuple[Binding, ...]
    body: Formula
    variable: Optional[Binding]
    selector: Optional[Term]

@dataclass(frozen=True)
class Herbrandisation:
    i_term: Var
    o_term: Var
    body: Formula
    witnesses: Tuple[Binding, ...]
    universals: Tuple[Binding, ...]
    existential: Optional[Binding]
    clauses: Tuple[HerbrandClause, ...]
    normal_form: Formula

    @property
    def vacuous_o(self) -> bool:
        return self.existential is None

    def bound_variables(self) -> Tuple[Binding, ...]:
        return self.witnesses + self.universals

def herbrandise(antecedent: AntecedentForm, consequent: NormalForm) -> Herbrandisation:
    if len(consequent.st_existentials) > 1:
        raise ExtractionError("Herbrandização exige no máximo uma existencial no consequente")
    existential = consequent.st_existentials[0] if consequent.st_existentials else None
    if existential is not None and existential[1] != BASE:
        raise ExtractionError("A existencial do consequente deve ter tipo 0")
    clash = {n for n, _ in antecedent.witnesses} & {n for n, _ in consequent.st_universals}
    if clash:
        raise ExtractionError(f"Testemunhas e universais com o mesmo nome: {', '.join(sorted(clash))}")

    bound = antecedent.witnesses + consequent.st_universals
    # cláusula de extensionalidade primeiro, como na exibição usual
    ordered = list(reversed(antecedent.clauses))
    families = [block for block, _ in ordered if block]
    element_types = [tuple_type([t for _, t in block]) for block in families]
    i_codomain = tuple_type([Seq(t) for t in element_types]) if families else BASE
    i_symbol, i_applied = _herbrand_symbol("i", bound, i_codomain)
    o_symbol, o_applied = _herbrand_symbol("o", bound, BASE)
    selectors = iter(tuple_projections(i_applied, len(families)) if families else [])

    avoid = {n for n, _ in bound} | {"i", "o"}
    for block, body in ordered:
        avoid |= all_names(body)
    clauses = []
    premises = []
    for block, body in ordered:
        if not block:
            clauses.append(HerbrandClause(block, body, None, None))
            premises.append(body)
            continue
        selector = next(selectors)
        if len(block) == 1:
            variable = block[0]
            guarded = body
            if variable[0] in ("i", "o"):
                variable = (fresh_variant(variable[0], avoid), variable[1])
                avoid.add(variable[0])
                guarded = substitute(body, block[0][0], Var(*variable))
        else:
            variable = (fresh_indexed("Z", avoid), tuple_type([t for _, t in block]))
            avoid.add(variable[0])
            projections = tuple_projections(Var(*variable), len(block))
            guarded = substitute_all(body, {n: p for (n, _), p in zip(block, projections)})
        guarded = rename_binders(guarded, {"i", "o"})
        clauses.append(HerbrandClause(block, body, variable, selector))
        premises.append(ForallIn(variable[0], variable[1], selector, guarded))

    conclusion = rename_binders(consequent.matrix, {"i", "o"})
    if existential is not None:
        conclusion = substitute(conclusion, existential[0], o_applied)
    body = quantify(Forall, bound, Implies(conjunction(premises), conclusion))

    sequences = []
    guarded_clauses = []
    for k, clause in enumerate(clauses):
        if clause.variable is None:
            guarded_clauses.append(clause.body)
            continue
        prefix = "W" if len(sequences) % 2 == 0 else "V"
        name = fresh_indexed(prefix, avoid)
        avoid.add(name)
        sequence = (name, Seq(clause.variable[1]))
        sequences.append(sequence)
        guarded_clauses.append(ForallIn(clause.variable[0], clause.variable[1], Var(*sequence), premises[k].body))
    existentials = ([existential] if existential is not None else []) + sequences
    normal_form = quantify(ForallSt, bound, quantify(
        ExistsSt, existentials, Implies(conjunction(guarded_clauses), consequent.matrix)))

    logger.info("Herbrandização com %d família(s) de premissas", len(families))
    return Herbrandisation(i_symbol, o_symbol, body, antecedent.witnesses, consequent.st_universals,
                           existential, tuple(clauses), normal_form)

def meta_reverse(h: Herbrandisation) -> Formula:
    """Reconstrói a implicação externa `UT⁺ -> consequente` a partir da herbrandização"""
    bound, inner = peel(Forall, h.body)
    if tuple(bound) != h.bound_variables() or not isinstance(inner, Implies):
        raise ExtractionError("Corpo da herbrandização fora do formato esperado")
    premises = conjuncts(inner.left) if h.clauses else []
    if len(premises) != len(h.clauses):
        raise ExtractionError("Número de premissas difere do número de cláusulas")

    blocks = []
    for clause, premise in zip(h.clauses, premises):
        if clause.variable is None:
            blocks.append(premise)
            continue
        if not isinstance(premise, ForallIn) or premise.seq != clause.selector:
            raise ExtractionError("Seletor de componente malformado")
        body = premise.body
        if len(clause.block) > 1:
            projections = tuple_projections(Var(premise.var, premise.elem_type), len(clause.block))
            body = replace_terms(body, {p: Var(n, t) for p, (n, t) in zip(projections, clause.block)})
        elif premise.var != clause.block[0][0]:
            body = substitute(body, premise.var, Var(*clause.block[0]))
        blocks.append(quantify(ForallSt, clause.block, body))
    blocks.reverse()
    antecedent = quantify(ExistsSt, h.witnesses, conjunction(blocks))

    conclusion = inner.right
    tail: List[Binding] = []
    if h.existential is not None:
        _, o_applied = _herbrand_symbol(h.o_term.name, h.bound_variables(), BASE)
        conclusion = replace_terms(conclusion, {o_applied: Var(*h.existential)})
        tail = [h.existential]
    if h.i_term.name in free_vars(conclusion) or h.o_term.name in free_vars(conclusion):
        raise ExtractionError("Conclusão ainda menciona i ou o após a reversão")
    consequent = quantify(ForallSt, h.universals, quantify(ExistsSt, tail, conclusion))
    return Implies(antecedent, consequent)

