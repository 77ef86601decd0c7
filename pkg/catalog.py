"""
Catálogo de princípios do zoo, construtores da versão uniforme e da versão "plus",
e o pipeline de ponta a ponta (uniformização, normalização, extração, herbrandização).
"""
import logging
import os
import time
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from config import resolve_seed
from errors import CatalogError, EngineError
from extraction import collapse_monotone, extract, herbrandise, meta_reverse, monotone_existentials
from models import (
    Report, VerdictEntry, extraction_response, failed, herbrandisation_response, passed, skipped,
    trace_response,
)
from normalform import (
    Binding, Logic, expand_standard_extensionality, is_normal_form, normalize, normalize_antecedent,
    normalize_implication, standard_extensionality_clause,
)
from surface import Signature, format_document, format_formula, parse_document
from syntax import (
    QUANTIFIERS, And, App, Arrow, Exists, ExistsSt, FinType, Forall, ForallSt, Formula, Implies,
    Term, Var, all_names, alpha_equivalent, binder_type, children, fresh_variant, peel, polarity_at,
    positions, quantify, replace_at, replace_terms, subformula_at, substitute, tuple_projections,
    tuple_term, tuple_type,
)

logger = logging.getLogger(__name__)

class Kind(str, Enum):
    ZOO = "Zoo"
    UNIFORM = "Uniform"
    UNIFORM_PLUS = "UniformPlus"
    COMPREHENSION = "Comprehension"
    TRANSFER = "Transfer"

@dataclass(frozen=True)
class UniformComponent:
    """Componente de P que substitui uma existencial; `path` é a posição da existencial removida"""
    name: str
    type: FinType
    path: Tuple[int, ...]
    term: Term

@dataclass(frozen=True)
class Principle:
    name: str
    statement: Formula
    signature: Signature
    kind: Kind
    witnesses: Tuple[str, ...] = ()
    block: Tuple[Binding, ...] = ()
    source: Optional[str] = None
    components: Tuple[UniformComponent, ...] = ()
    functional: Optional[str] = None
    description: str = ""

    def document(self) -> str:
        return format_document(self.statement, comment=f"{self.name} ({self.kind.value})")

# Codificações

_KLEENE = "rel T : 0 x 0 x 1 x 0 x 0"

_ENCODINGS: Dict[str, Tuple[Kind, Tuple[str, ...], str, str]] = {
    "DNR": (Kind.ZOO, ("f",), f"""
{_KLEENE}
!A:1. ?f:1. !e:0. !s:0. !m:0. (T(e,s,A,e,m) -> ~(app(f,e) = m))
""", "Função diagonalmente não recursiva relativa a A"),
    "Pi01G": (Kind.ZOO, ("G", "s"), """
sym app2 : 1 x 0 x 0 -> 0
sym app3 : 1 x 0 x 0 x 0 -> 0
rel ext : 0 x 0
rel prefix : 0 x 1
rel bin : 0
!f:1. !g:1. ?G:1. ((!i:0. !t:0. (bin(t) -> ext(app2(g,i,t),t) & (!k:0. ~(app3(f,k,i,app2(g,i,t)) = 0)))) -> !i:0. ?s:0. prefix(s,G) & (!k:0. ~(app3(f,k,i,s) = 0)))
""", "Genericidade Π⁰₁: G encontra todos os conjuntos densos D_i^f"),
    "1GEN": (Kind.ZOO, ("Y", "n", "m"), """
sym app3 : 1 x 0 x 0 x 0 -> 0
sym init : 1 x 0 -> 0
sym lh : 0 -> 0
rel ext : 0 x 0
!X:1. ?Y:1. !f:1. ?n:0. ?m:0. (?t:0. app3(f,init(Y,n),t,init(X,lh(t))) = 0) | (!r:0. ext(r,init(Y,m)) -> ~(?t:0. app3(f,r,t,init(X,lh(t))) = 0))
""", "1-genericidade relativa a X"),
    "HYP": (Kind.ZOO, ("g", "n"), f"""
{_KLEENE}
!f:1. ?g:1. !e:0. !k:0. ?n:0. k <= n & (!m:0. !s:0. (T(e,s,f,n,m) -> s(m) <= app(g,n)))
""", "Função hiperimune relativa a f"),
    "NCS": (Kind.ZOO, ("g", "n"), f"""
{_KLEENE}
!f:1. ?g:1. !e:0. ?n:0. !s:0. !m:0. (T(e,s,f,n,m) -> ~(app(g,n) = m))
""", "Função que escapa de toda função f-computável"),
    "KPT": (Kind.ZOO, ("g", "h"), """
rel turing : 1 x 1 x 1
rel incomp : 1 x 1
!f:1. ?g:1. ?h:1. turing(f,g,h) & incomp(g,h)
""", "Par de graus Turing-incomparáveis acima de f; relações não interpretadas"),
    "PI01-TRANS": (Kind.TRANSFER, (), """
!st f:1. ((?n:0. app(f,n) = 0) -> ?st m:0. app(f,m) = 0)
""", "Transferência Π⁰₁, consequente fixo do pipeline"),
    "MU2": (Kind.COMPREHENSION, (), """
?mu:2. !f:1. ((?n:0. app(f,n) = 0) -> app(f,app(mu,f)) = 0)
""", "Operador de busca de Feferman"),
    "E2": (Kind.COMPREHENSION, (), """
?phi:2. !f:1. (((?n:0. app(f,n) = 0) -> app(phi,f) = 0) & (app(phi,f) = 0 -> ?n:0. app(f,n) = 0))
""", "Compreensão aritmética funcional"),
}

UNIFORM_NAMES = {"DNR": "UDNR", "Pi01G": "UPi01G", "1GEN": "U1G", "HYP": "UHYP", "NCS": "UNCS",
                 "KPT": "UKPT"}

ALIASES = {"OPT": "HYP", "AMT": "HYP", "SADS": "HYP", "AST": "NCS",
           "UOPT": "UHYP", "UAMT": "UHYP", "USADS": "UHYP", "UAST": "UNCS"}

NOT_ENCODED = {
    "FIP": "FIP não codificado: a redução aparece só em prosa, sem fórmula exibida",
    "UFIP": "UFIP não codificado: a redução aparece só em prosa, sem fórmula exibida",
}

# Seis codificações distintas; OPT, AMT e SADS resolvem para HYP e entram só como apelidos
DISTINCT_PIPELINE_PRINCIPLES = ("DNR", "Pi01G", "1GEN", "HYP", "NCS", "KPT")
PIPELINE_ALIASES = ("OPT", "AMT", "SADS")
PIPELINE_PRINCIPLES = DISTINCT_PIPELINE_PRINCIPLES + PIPELINE_ALIASES

@lru_cache()
def _base_principle(name: str) -> Principle:
    kind, witnesses, text, description = _ENCODINGS[name]
    document = parse_document(text)
    block: Tuple[Binding, ...] = ()
    if kind == Kind.ZOO:
        block = tuple(peel(Forall, document.formula)[0])
    return Principle(name=name, statement=document.formula, signature=document.signature, kind=kind,
                     witnesses=witnesses, block=block, description=description)

def principle_names() -> List[str]:
    return list(_ENCODINGS) + [UNIFORM_NAMES[n] for n in _ENCODINGS if n in UNIFORM_NAMES]

def resolve_name(name: str) -> str:
    if name in NOT_ENCODED:
        raise CatalogError(NOT_ENCODED[name])
    return ALIASES.get(name, name)

def get_principle(name: str) -> Principle:
    canonical_name = resolve_name(name)
    if canonical_name in _ENCODINGS:
        return _base_principle(canonical_name)
    for zoo_name, uniform_name in UNIFORM_NAMES.items():
        if uniform_name == canonical_name:
            return uniformize(_base_principle(zoo_name))
    raise CatalogError(f"Princípio desconhecido: {name}")

# Uniformização

def _scope(formula: Formula, path: Tuple[int, ...]) -> List[Binding]:
    """Variáveis ligadas por quantificadores no caminho até `path`"""
    bindings = []
    node = formula
    for step in path:
        if isinstance(node, QUANTIFIERS):
            bindings.append((node.var, binder_type(node)))
        node = children(node)[step]
    return bindings

def _find_existential(formula: Formula, name: str) -> Tuple[int, ...]:
    for path, node in positions(formula):
        if isinstance(node, Exists) and node.var == name:
            return path
    raise CatalogError(f"Existencial {name} não encontrada no enunciado")

def uniformize(p: Principle) -> Principle:
    """`!X. ?Y. φ(X,Y)` vira `?P. !X. φ(X, P(X))`, com uma componente de P por testemunha"""
    if p.kind != Kind.ZOO:
        raise CatalogError(f"{p.name} não é um princípio do zoo ({p.kind.value})")
    block, body = peel(Forall, p.statement)
    if not block or not isinstance(body, Exists) or body.var != p.witnesses[0]:
        raise CatalogError(f"{p.name} não tem o formato !X. ?Y. φ")
    xs = [Var(n, t) for n, t in block]

    # primeira passagem: tipos das componentes, na ordem das testemunhas
    plans = []
    current = body
    for witness in p.witnesses:
        path = _find_existential(current, witness)
        if polarity_at(current, path) < 0:
            raise CatalogError(f"Existencial {witness} em posição negativa")
        node = subformula_at(current, path)
        scope = [(n, t) for n, t in _scope(current, path) if n not in p.witnesses]
        component_type = Arrow(tuple_type([t for _, t in scope]), node.type) if scope else node.type
        plans.append((witness, node.type, scope, component_type))
        current = replace_at(current, path, node.body)

    functional = fresh_variant("P", all_names(p.statement))
    p_type = Arrow(tuple_type([t for _, t in block]), tuple_type([plan[3] for plan in plans]))
    selectors = tuple_projections(App(Var(functional, p_type), tuple_term(xs)), len(plans))

    components = []
    current = body
    for (witness, typ, scope, _), selector in zip(plans, selectors):
        path = _find_existential(current, witness)
        node = subformula_at(current, path)
        term = App(selector, tuple_term([Var(n, t) for n, t in scope])) if scope else selector
        current = replace_at(current, path, substitute(node.body, witness, term))
        components.append(UniformComponent(witness, typ, path, term))

    statement = Exists(functional, p_type, quantify(Forall, block, current))
    name = UNIFORM_NAMES.get(p.name, f"U{p.name}")
    logger.info("Uniformização de %s: P de tipo %s", p.name, p_type)
    return Principle(name=name, statement=statement, signature=p.signature, kind=Kind.UNIFORM,
                     witnesses=p.witnesses, block=p.block, source=p.name,
                     components=tuple(components), functional=functional,
                     description=f"Versão uniforme de {p.name}")

def _split_block(u: Principle) -> Tuple[List[Binding], Formula]:
    """Separa exatamente o bloco !X do enunciado uniforme"""
    block, body = [], u.statement.body
    for _ in u.block:
        if not isinstance(body, Forall):
            raise CatalogError(f"{u.name} não tem o bloco universal esperado")
        block.append((body.var, body.type))
        body = body.body
    return block, body

def deuniformize(u: Principle) -> Formula:
    """Reinsere as existenciais no lugar das componentes de P"""
    if u.kind != Kind.UNIFORM or not isinstance(u.statement, Exists):
        raise CatalogError(f"{u.name} não é uma versão uniforme")
    block, body = _split_block(u)
    for component in reversed(u.components):
        node = subformula_at(body, component.path)
        inner = replace_terms(node, {component.term: Var(component.name, component.type)})
        body = replace_at(body, component.path, Exists(component.name, component.type, inner))
    return quantify(Forall, block, body)

def plus_version(u: Principle) -> Principle:
    if u.kind == Kind.UNIFORM_PLUS:
        raise CatalogError(f"{u.name} já é uma versão plus")
    if u.kind != Kind.UNIFORM or not isinstance(u.statement, Exists):
        raise CatalogError(f"{u.name} não é uma versão uniforme")
    p_type = u.statement.type
    block, rest = _split_block(u)
    extensionality = standard_extensionality_clause(u.functional, p_type.domain, p_type.codomain)
    statement = ExistsSt(u.functional, p_type, And(quantify(ForallSt, block, rest), extensionality))
    return replace(u, name=f"{u.name}+", statement=statement, kind=Kind.UNIFORM_PLUS,
                   description=f"{u.name} com P padrão e extensional")

# Goldens

@dataclass(frozen=True)
class GoldenStage:
    principles: Optional[Tuple[str, ...]]
    logic: Optional[Logic]
    stage: str

GOLDEN_STAGES: Dict[str, GoldenStage] = {
    "curk": GoldenStage(None, None, "consequent"),
    "frok": GoldenStage(("Pi01G",), None, "uniform"),
    "fras": GoldenStage(("1GEN",), None, "uniform"),
    "finkal": GoldenStage(("Pi01G",), None, "extensionality"),
    "tokamak": GoldenStage(("Pi01G",), None, "extensionality_matrix"),
    "structure": GoldenStage(("Pi01G",), Logic.CLASSICAL, "normal_form"),
    "bling": GoldenStage(("Pi01G",), Logic.INTUITIONISTIC, "normal_form"),
    "HIO": GoldenStage(("Pi01G",), None, "herbrandisation"),
    "frood": GoldenStage(("DNR",), Logic.CLASSICAL, "collapsed"),
    "frood2": GoldenStage(("Pi01G",), Logic.CLASSICAL, "collapsed"),
    "froodke": GoldenStage(("Pi01G",), Logic.INTUITIONISTIC, "internal_sentence"),
}

def golden_verdict(label: str, formula: Optional[Formula], golden_dir: Optional[str]) -> VerdictEntry:
    if golden_dir is None:
        return skipped("sem diretório de goldens")
    if formula is None:
        return failed(f"estágio {GOLDEN_STAGES[label].stage} não produzido")
    path = os.path.join(golden_dir, f"{label}.txt")
    if not os.path.exists(path):
        return failed(f"Arquivo golden não encontrado: {path}")
    with open(path, encoding="utf-8") as handle:
        expected = parse_document(handle.read()).formula
    if alpha_equivalent(expected, formula):
        return passed()
    return failed(f"difere de {label}: {format_formula(formula)}")

# Pipeline

def pipeline(name: str, logic: Logic = Logic.CLASSICAL, golden_dir: Optional[str] = None,
             seed: Optional[int] = None, timings: bool = False) -> Report:
    principle = get_principle(name)
    if principle.kind == Kind.UNIFORM:
        zoo = _base_principle(principle.source)
    elif principle.kind == Kind.ZOO:
        zoo = principle
    else:
        raise CatalogError(f"{name} não é princípio do zoo nem versão uniforme")

    stages: Dict[str, Formula] = {}
    verdicts: Dict[str, VerdictEntry] = {}
    clock: Dict[str, float] = {}
    sections = {}
    current = "uniform"
    started = time.perf_counter()

    def mark(stage: str, formula: Optional[Formula] = None):
        nonlocal started
        if formula is not None:
            stages[stage] = formula
        clock[stage] = round(time.perf_counter() - started, 6)
        started = time.perf_counter()
        logger.info("Estágio %s concluído (%s, %s)", stage, zoo.name, logic.value)

    try:
        uniform = uniformize(zoo)
        mark("uniform", uniform.statement)
        current = "plus"
        plus = plus_version(uniform)
        mark("plus", plus.statement)

        current = "extensionality"
        p_type = uniform.statement.type
        extensionality = expand_standard_extensionality(uniform.functional, p_type.domain, p_type.codomain)
        mark("extensionality", extensionality)
        form = is_normal_form(extensionality)
        if form is None:
            raise CatalogError("Extensionalidade expandida fora da forma normal")
        mark("extensionality_matrix", form.matrix)

        current = "consequent"
        consequent, _ = normalize(get_principle("PI01-TRANS").statement, logic)
        mark("consequent", consequent.to_formula())

        current = "antecedent"
        antecedent, _ = normalize_antecedent(plus.statement, logic)
        mark("antecedent", antecedent.to_formula())

        current = "normal_form"
        normal_form, trace = normalize_implication(plus.statement, consequent.to_formula(), logic)
        sections["trace"] = trace_response(trace)
        mark("normal_form", normal_form.to_formula())

        current = "internal_sentence"
        result = extract(normal_form, trace)
        mark("internal_sentence", result.internal_sentence)
        current = "collapsed"
        monotone = monotone_existentials(result)
        if monotone:
            result.collapsed_sentence = collapse_monotone(result, monotone)
            mark("collapsed", result.collapsed_sentence)
        sections["extraction"] = extraction_response(result)

        current = "herbrandisation"
        herbrand = herbrandise(antecedent, consequent)
        mark("herbrandisation", herbrand.body)
        stages["herbrand_normal_form"] = herbrand.normal_form
        sections["herbrandisation"] = herbrandisation_response(herbrand)

        current = "meta_reverse"
        reversed_form = meta_reverse(herbrand)
        mark("meta_reverse", reversed_form)
        original = Implies(antecedent.to_formula(), consequent.to_formula())
        verdicts["round_trip"] = (passed() if alpha_equivalent(reversed_form, original)
                                  else failed("meta-reversão difere da implicação original"))
        verdicts["uniformization"] = (passed() if alpha_equivalent(deuniformize(uniform), zoo.statement)
                                      else failed("desfazer a uniformização não recupera o enunciado"))
    except EngineError as e:
        logger.warning("Estágio %s falhou: %s", current, e.detail)
        verdicts[f"stage:{current}"] = failed(e.detail)

    for label, golden in GOLDEN_STAGES.items():
        if golden.principles is not None and zoo.name not in golden.principles:
            continue
        if golden.logic is not None and golden.logic != logic:
            continue
        verdicts[f"golden:{label}"] = golden_verdict(label, stages.get(golden.stage), golden_dir)

    return Report(
        principle=name,
        logic=logic.value,
        stages={stage: format_document(formula) for stage, formula in stages.items()},
        trace=sections.get("trace", []),
        extraction=sections.get("extraction"),
        herbrandisation=sections.get("herbrandisation"),
        verdicts=verdicts,
        seed=resolve_seed(seed),
        timings=clock if timings else None,
    )
