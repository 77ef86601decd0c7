"""
Modelos finitos de dois níveis: o tipo 0 é {0, ..., N-1}, os padrões de tipo 0 são
os números abaixo do corte `s`, e os tipos superiores são espaços de funções
completos com um subuniverso padrão fechado por aplicação.

Serve como arnês de falsificação: avalia fórmulas por enumeração exaustiva, verifica
as regras de reescrita em instâncias pequenas e confere sentenças extraídas.
"""
import itertools
import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Tuple

from config import get_settings, resolve_seed
from errors import CoverageError, EngineError, ModelBoundsError
from extraction import ExtractionResult
from normalform import Direction, Logic, Rule, RULE_INFO, apply_rule
from surface import Signature, format_formula, parse_formula, signature_of
from syntax import (
    BASE, And, App, Arrow, AtomEq0, AtomLe, AtomPred, Base, BoundedExists, BoundedForall, Exists,
    ExistsIn, ExistsSt, FinType, Forall, ForallIn, ForallSt, Formula, FunSym, Idx, Implies, Len,
    Max0, Not, Or, Pair, Path, Prod, Proj1, Proj2, Seq, SeqLit, St, Succ, Term, Var, Zero,
    format_type, free_vars, infer_type, type_level,
)

logger = logging.getLogger(__name__)

# Valores

@dataclass(frozen=True)
class FunVal:
    """Função finita dada pelo gráfico"""
    graph: Tuple[Tuple[Any, Any], ...]
    table: Dict[Any, Any] = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "table", dict(self.graph))

    def __call__(self, argument):
        return self.table[argument]

@dataclass(frozen=True)
class SeqVal:
    items: Tuple[Any, ...]

def show_value(value) -> str:
    if isinstance(value, FunVal):
        return "{" + ", ".join(f"{show_value(a)}->{show_value(b)}" for a, b in value.graph) + "}"
    if isinstance(value, SeqVal):
        return "<" + ", ".join(show_value(v) for v in value.items) + ">"
    if isinstance(value, tuple):
        return "(" + ", ".join(show_value(v) for v in value) + ")"
    if isinstance(getattr(value, "graph", None), dict):
        return "{" + ", ".join(f"{show_value(a)}->{show_value(b)}" for a, b in value.graph.items()) + "}"
    if callable(value):
        return "<oráculo>"
    return str(value)

class StandardVariant(str, Enum):
    MAXIMAL = "maximal"
    DEFINABLE = "definable"

# Modelos

@dataclass
class TwoLevelModel:
    domain_size: int
    cutoff: int
    variant: StandardVariant = StandardVariant.MAXIMAL
    level_bound: int = 1
    seq_len: int = 1
    symbols: Dict[str, Callable] = field(default_factory=dict)
    relations: Dict[str, frozenset] = field(default_factory=dict)
    _values: Dict[FinType, List[Any]] = field(default_factory=dict, repr=False)
    _standard: Dict[FinType, List[Any]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not 0 < self.cutoff <= self.domain_size:
            raise ModelBoundsError(f"Corte {self.cutoff} fora de 1..{self.domain_size}")

    def _check(self, typ: FinType):
        if type_level(typ) > self.level_bound:
            raise ModelBoundsError(f"Tipo {format_type(typ)} acima do nível {self.level_bound}")

    def values(self, typ: FinType) -> List[Any]:
        if typ not in self._values:
            self._check(typ)
            self._values[typ] = self._enumerate(typ)
        return self._values[typ]

    def _enumerate(self, typ: FinType) -> List[Any]:
        limit = get_settings().MODEL_MAX_ENUM
        if isinstance(typ, Base):
            return list(range(self.domain_size))
        if isinstance(typ, Prod):
            left, right = self.values(typ.left), self.values(typ.right)
            _guard(len(left) * len(right), limit, typ)
            return list(itertools.product(left, right))
        if isinstance(typ, Seq):
            element = self.values(typ.element)
            _guard(sum(len(element) ** k for k in range(self.seq_len + 1)), limit, typ)
            return [SeqVal(items) for k in range(self.seq_len + 1)
                    for items in itertools.product(element, repeat=k)]
        domain, codomain = self.values(typ.domain), self.values(typ.codomain)
        _guard(len(codomain) ** len(domain), limit, typ)
        return [FunVal(tuple(zip(domain, results)))
                for results in itertools.product(codomain, repeat=len(domain))]

    def standard(self, typ: FinType) -> List[Any]:
        if typ not in self._standard:
            self._standard[typ] = [v for v in self.values(typ) if self.is_standard(v, typ)]
        return self._standard[typ]

    def is_standard(self, value, typ: FinType) -> bool:
        if isinstance(typ, Base):
            return value < self.cutoff
        if isinstance(typ, Prod):
            return self.is_standard(value[0], typ.left) and self.is_standard(value[1], typ.right)
        if isinstance(typ, Seq):
            return all(self.is_standard(v, typ.element) for v in value.items)
        if not isinstance(value, FunVal):
            return True
        outside = set()
        for argument, result in value.graph:
            if self.is_standard(argument, typ.domain):
                if not self.is_standard(result, typ.codomain):
                    return False
            else:
                outside.add(result)
        return self.variant == StandardVariant.MAXIMAL or len(outside) <= 1

    def key(self) -> Tuple:
        """Identidade da estrutura: tamanho, corte, variante e tabelas dos símbolos"""
        symbols = tuple((name, tuple(sorted(self.symbols[name].graph.items(), key=repr)))
                        for name in sorted(self.symbols))
        relations = tuple((name, tuple(sorted(self.relations[name], key=repr)))
                          for name in sorted(self.relations))
        return (self.domain_size, self.cutoff, self.variant, symbols, relations)

    def describe(self) -> str:
        lines = [f"domínio: {self.domain_size}", f"corte: {self.cutoff}",
                 f"subuniverso: {self.variant.value}"]
        for name in sorted(self.symbols):
            lines.append(f"sym {name}: {show_value(self.symbols[name])}")
        for name in sorted(self.relations):
            rows = sorted(self.relations[name], key=repr)
            lines.append(f"rel {name}: {{{', '.join(show_value(r) for r in rows)}}}")
        return "\n".join(lines)

def _guard(count: int, limit: int, typ: FinType):
    if count > limit:
        raise ModelBoundsError(f"Tipo {format_type(typ)} tem {count} valores (limite {limit})")

# Avaliação

def eval_term(term: Term, model: TwoLevelModel, env: Dict[str, Any]):
    top = model.domain_size - 1
    if isinstance(term, Var):
        if term.name not in env:
            raise EngineError(f"Variável livre sem valor: {term.name}")
        return env[term.name]
    if isinstance(term, Zero):
        return 0
    if isinstance(term, Succ):
        # aritmética saturada no último elemento do domínio
        return min(eval_term(term.arg, model, env) + 1, top)
    if isinstance(term, App):
        return eval_term(term.fun, model, env)(eval_term(term.arg, model, env))
    if isinstance(term, Pair):
        return (eval_term(term.left, model, env), eval_term(term.right, model, env))
    if isinstance(term, Proj1):
        return eval_term(term.arg, model, env)[0]
    if isinstance(term, Proj2):
        return eval_term(term.arg, model, env)[1]
    if isinstance(term, SeqLit):
        return SeqVal(tuple(eval_term(item, model, env) for item in term.items))
    if isinstance(term, Len):
        return min(len(eval_term(term.arg, model, env).items), top)
    if isinstance(term, Idx):
        items = eval_term(term.seq, model, env).items
        index = eval_term(term.index, model, env)
        if index < len(items):
            return items[index]
        return model.values(infer_type(term))[0]
    if isinstance(term, Max0):
        return max(eval_term(term.arg, model, env).items, default=0)
    if isinstance(term, FunSym):
        if term.name not in model.symbols:
            raise EngineError(f"Símbolo sem interpretação: {term.name}")
        return model.symbols[term.name](*(eval_term(arg, model, env) for arg in term.args))
    raise EngineError(f"Termo não suportado: {type(term).__name__}")

def _bind(env: Dict[str, Any], name: str, value) -> Dict[str, Any]:
    inner = dict(env)
    inner[name] = value
    return inner

def evaluate(formula: Formula, model: TwoLevelModel, env: Optional[Dict[str, Any]] = None) -> bool:
    """Verdade clássica por enumeração exaustiva dos quantificadores"""
    env = env or {}
    if isinstance(formula, AtomEq0):
        return eval_term(formula.lhs, model, env) == eval_term(formula.rhs, model, env)
    if isinstance(formula, AtomLe):
        return eval_term(formula.lhs, model, env) <= eval_term(formula.rhs, model, env)
    if isinstance(formula, AtomPred):
        if formula.name not in model.relations:
            raise EngineError(f"Relação sem interpretação: {formula.name}")
        row = tuple(eval_term(arg, model, env) for arg in formula.args)
        return row in model.relations[formula.name]
    if isinstance(formula, St):
        return model.is_standard(eval_term(formula.term, model, env), infer_type(formula.term))
    if isinstance(formula, Not):
        return not evaluate(formula.body, model, env)
    if isinstance(formula, And):
        return evaluate(formula.left, model, env) and evaluate(formula.right, model, env)
    if isinstance(formula, Or):
        return evaluate(formula.left, model, env) or evaluate(formula.right, model, env)
    if isinstance(formula, Implies):
        return not evaluate(formula.left, model, env) or evaluate(formula.right, model, env)
    if isinstance(formula, (Forall, ForallSt, Exists, ExistsSt)):
        pool = model.standard(formula.type) if isinstance(formula, (ForallSt, ExistsSt)) \
            else model.values(formula.type)
        quantifier = all if isinstance(formula, (Forall, ForallSt)) else any
        return quantifier(evaluate(formula.body, model, _bind(env, formula.var, v)) for v in pool)
    if isinstance(formula, (BoundedForall, BoundedExists)):
        bound = eval_term(formula.bound, model, env)
        quantifier = all if isinstance(formula, BoundedForall) else any
        return quantifier(evaluate(formula.body, model, _bind(env, formula.var, v))
                          for v in range(bound + 1))
    if isinstance(formula, (ForallIn, ExistsIn)):
        items = eval_term(formula.seq, model, env).items
        quantifier = all if isinstance(formula, ForallIn) else any
        return quantifier(evaluate(formula.body, model, _bind(env, formula.var, v)) for v in items)
    raise EngineError(f"Fórmula não suportada: {type(formula).__name__}")

# Enumeração de modelos

def _check_bounds(max_domain: int, level_bound: int):
    settings = get_settings()
    if max_domain > settings.MODEL_MAX_DOMAIN or max_domain < 1:
        raise ModelBoundsError(f"Domínio {max_domain} fora de 1..{settings.MODEL_MAX_DOMAIN}")
    if level_bound > settings.MODEL_MAX_LEVEL or level_bound < 0:
        raise ModelBoundsError(f"Nível {level_bound} fora de 0..{settings.MODEL_MAX_LEVEL}")

def _symbol_tables(model: TwoLevelModel, arg_types: Tuple[FinType, ...], rng: random.Random,
                   budget: int) -> List[Callable]:
    """Interpretações padrão de um símbolo: levam argumentos padrão a resultados padrão"""
    rows = list(itertools.product(*(model.values(t) for t in arg_types)))
    standard_rows = {row for row in rows if all(model.is_standard(v, t) for v, t in zip(row, arg_types))}
    def options(row):
        return range(model.cutoff) if row in standard_rows else range(model.domain_size)
    if model.domain_size ** len(rows) > get_settings().MODEL_MAX_ENUM:
        return [_as_callable({row: rng.choice(options(row)) for row in rows}) for _ in range(budget)]
    return [_as_callable(dict(zip(rows, results)))
            for results in itertools.product(*(options(row) for row in rows))]

def _as_callable(graph: Dict[Tuple, int]) -> Callable:
    def interpretation(*args):
        return graph[args]
    interpretation.graph = graph
    return interpretation

def _relation_tables(model: TwoLevelModel, arg_types: Tuple[FinType, ...], rng: random.Random,
                     budget: int) -> List[frozenset]:
    rows = list(itertools.product(*(model.values(t) for t in arg_types)))
    if 2 ** len(rows) > get_settings().MODEL_MAX_ENUM:
        return [frozenset(row for row in rows if rng.random() < 0.5) for _ in range(budget)]
    return [frozenset(row for row, keep in zip(rows, mask) if keep)
            for mask in itertools.product((False, True), repeat=len(rows))]

def enumerate_models(signature: Signature, max_domain: int, level_bound: int = 1,
                     seed: Optional[int] = None, budget: Optional[int] = None,
                     rng: Optional[random.Random] = None) -> Iterator[TwoLevelModel]:
    """
    Todos os modelos até `max_domain` elementos, para cada corte e cada variante de
    subuniverso. Quando as interpretações de um modelo passam de `budget`, sorteia
    `budget` delas com a semente dada, ou com `rng` quando o chamador reamostra.
    """
    _check_bounds(max_domain, level_bound)
    settings = get_settings()
    budget = budget or settings.INTERPRETATION_BUDGET
    rng = rng or random.Random(resolve_seed(seed))
    seq_len = settings.MODEL_SEQ_LEN
    for size in range(1, max_domain + 1):
        for cutoff in range(1, size + 1):
            for variant in StandardVariant:
                base = TwoLevelModel(size, cutoff, variant, level_bound, seq_len)
                names = sorted(signature.symbols) + sorted(signature.relations)
                choices = [_symbol_tables(base, signature.symbols[n], rng, budget)
                           for n in sorted(signature.symbols)]
                choices += [_relation_tables(base, signature.relations[n], rng, budget)
                            for n in sorted(signature.relations)]
                total = 1
                for options in choices:
                    total *= len(options)
                if total <= budget:
                    picks: Iterable[Tuple] = itertools.product(*choices)
                else:
                    picks = [tuple(rng.choice(options) for options in choices) for _ in range(budget)]
                for pick in picks:
                    model = TwoLevelModel(size, cutoff, variant, level_bound, seq_len,
                                          _values=base._values, _standard=base._standard)
                    for name, value in zip(names, pick):
                        if name in signature.symbols:
                            model.symbols[name] = value
                        else:
                            model.relations[name] = value
                    yield model

def environments(model: TwoLevelModel, variables: Dict[str, FinType],
                 fixed: Optional[Dict[str, Any]] = None) -> Iterator[Dict[str, Any]]:
    fixed = fixed or {}
    names = sorted(n for n in variables if n not in fixed)
    for values in itertools.product(*(model.values(variables[n]) for n in names)):
        env = dict(fixed)
        env.update(zip(names, values))
        yield env

# Veredictos

class Status(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    EXPECTED_COUNTEREXAMPLE = "expected-counterexample"

@dataclass
class Counterexample:
    model: TwoLevelModel
    instance: str
    env: Dict[str, Any]
    detail: str

    def to_text(self) -> str:
        lines = [self.model.describe(), f"instância: {self.instance}", f"falha: {self.detail}"]
        for name in sorted(self.env):
            lines.append(f"{name} = {show_value(self.env[name])}")
        return "\n".join(lines) + "\n"

@dataclass
class Verdict:
    subject: str
    status: Status
    checked: int
    seed: int
    counterexamples: List[Counterexample] = field(default_factory=list)
    exhausted: bool = False
    coverage: Dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status != Status.FAIL

# Esquemas de instância das regras

SCHEMA_SIGNATURE = Signature(symbols={"a": (BASE,), "b": (BASE, BASE)},
                             relations={"P": (BASE,), "Q": (BASE,), "R": (BASE, BASE)})
SCHEMA_CONTEXT: Dict[str, FinType] = {"y": BASE, "f": Arrow(BASE, BASE), "g": Arrow(BASE, BASE)}

@dataclass(frozen=True)
class RuleInstance:
    text: str
    path: Path = ()

RULE_SCHEMAS: Dict[Rule, List[RuleInstance]] = {
    Rule.PRENEX_AND_ST: [RuleInstance("(?st x:0. P(x)) & Q(a(y))"),
                         RuleInstance("Q(y) & (!st x:0. R(x,y))")],
    Rule.PRENEX_OR_ST: [RuleInstance("(?st x:0. R(x,y)) | Q(y)"),
                        RuleInstance("(!st x:0. P(x)) | Q(y)")],
    Rule.PRENEX_IMPLIES_ST: [RuleInstance("(?st x:0. P(x)) -> Q(y)"),
                             RuleInstance("Q(y) -> !st x:0. R(x,y)"),
                             RuleInstance("(!st x:0. P(x)) -> Q(y)"),
                             RuleInstance("Q(y) -> ?st x:0. R(x,y)")],
    Rule.DOUBLE_NEG_ST: [RuleInstance("~~(!st x:0. P(x))"), RuleInstance("~(?st x:0. R(x,y))")],
    Rule.MARKOV_ST: [RuleInstance("~(!st x:0. R(x,b(y,y)))")],
    Rule.IDEALISATION: [RuleInstance("!st x:0^*. ?y:0. !z in x. R(z,y)")],
    Rule.HAC_INT: [RuleInstance("!st x:0. ?st z:0. R(x,z)")],
    Rule.HGMP_ST: [RuleInstance("(!st x:0. P(x)) -> Q(y)")],
    Rule.HIP_FORALL_ST: [RuleInstance("(!st x:0. P(x)) -> ?st z:0. R(z,y)")],
    Rule.EXPAND_APPROX: [RuleInstance("!st n:0. app(f,n) = app(g,n)")],
    Rule.EXPAND_EXACT_EQ: [RuleInstance("!n:0. app(f,n) = app(g,n)")],
    Rule.EXPAND_STD_EXT: [RuleInstance("(!st N:0. !j <= N. app(f,j) = 0) -> !st k:0. P(k)")],
    Rule.DROP_ST_ANTECEDENT: [RuleInstance("(!st x:0. P(x)) -> Q(y)", (0,))],
    Rule.BOUND_SEARCH: [RuleInstance("?st m:0. R(m,y)")],
}

# Regras que só valem em estruturas infinitas. O contraexemplo finito da idealização
# depende de MODEL_SEQ_LEN < corte: com sequências do tamanho do corte, uma delas
# lista todos os padrões e o antecedente já fornece o y uniforme.
INFINITARY_RULES = {Rule.IDEALISATION}

def _instance_pairs(before: Formula, after: Formula, max_domain: int, level_bound: int,
                    rng: random.Random) -> Iterator[Tuple[TwoLevelModel, Dict[str, Any]]]:
    """Pares (modelo, ambiente) distintos, reamostrando os modelos sorteados a cada passada"""
    variables = free_vars(before)
    signature = signature_of(before).merged(signature_of(after))
    seen = set()
    for _ in range(get_settings().SOUNDNESS_MAX_PASSES):
        fresh = 0
        for model in enumerate_models(signature, max_domain, level_bound, rng=rng):
            model_key = model.key()
            for env in environments(model, variables):
                pair = (model_key, tuple(sorted(env.items())))
                if pair in seen:
                    continue
                seen.add(pair)
                fresh += 1
                yield model, env
        if not fresh:
            return

def check_rule_soundness(rule: Rule, budget: Optional[int] = None, max_domain: int = 3,
                         seed: Optional[int] = None, level_bound: int = 1) -> Verdict:
    """
    Confere `antes => depois` (e a volta, nas equivalências) em pares (modelo, ambiente)
    distintos. O orçamento é repartido entre as instâncias da regra; o que uma instância
    pequena não consome passa às seguintes.
    """
    settings = get_settings()
    budget = budget or settings.SOUNDNESS_BUDGET
    seed = resolve_seed(seed)
    rng = random.Random(seed)
    both_ways = RULE_INFO[rule].direction == Direction.EQUIVALENCE
    instances = RULE_SCHEMAS[rule]
    checked = 0
    exhausted = False
    coverage: Dict[str, int] = {}
    counterexamples: List[Counterexample] = []
    for position, instance in enumerate(instances):
        before = parse_formula(instance.text, SCHEMA_SIGNATURE, SCHEMA_CONTEXT)
        after = apply_rule(rule, before, instance.path, Logic.CLASSICAL)
        shown = f"{format_formula(before)}  ==>  {format_formula(after)}"
        remaining = len(instances) - position
        quota = -(-(budget - checked) // remaining)
        count = 0
        for model, env in _instance_pairs(before, after, max_domain, level_bound, rng):
            if count >= quota:
                exhausted = True
                break
            count += 1
            left, right = evaluate(before, model, env), evaluate(after, model, env)
            if left and not right:
                counterexamples.append(Counterexample(model, shown, env, "antes verdadeiro, depois falso"))
            elif both_ways and right and not left:
                counterexamples.append(Counterexample(model, shown, env, "depois verdadeiro, antes falso"))
            if counterexamples:
                break
        coverage[instance.text] = count
        checked += count
        if counterexamples:
            break
        if count == 0:
            raise CoverageError(f"Instância não coberta de {rule.value}: {instance.text} "
                                f"(orçamento {budget})")
    if counterexamples:
        status = Status.EXPECTED_COUNTEREXAMPLE if rule in INFINITARY_RULES else Status.FAIL
        log = logger.info if rule in INFINITARY_RULES else logger.warning
        log("Contraexemplo para %s:\n%s", rule.value, counterexamples[0].to_text())
    elif rule in INFINITARY_RULES:
        status = Status.FAIL
        logger.warning("Nenhum contraexemplo encontrado para %s", rule.value)
    else:
        status = Status.PASS
    return Verdict(rule.value, status, checked, seed, counterexamples, exhausted, coverage)

# Extração

WitnessFactory = Callable[[ExtractionResult, TwoLevelModel], Dict[str, Any]]

def _choices(result: ExtractionResult, model: TwoLevelModel, argument) -> List[Tuple]:
    """Escolhas das existenciais que tornam a matriz verdadeira, na ordem de enumeração"""
    universals = [name for name, _ in result.universals]
    values = [argument] if len(universals) == 1 else _untuple(argument, len(universals))
    env = dict(zip(universals, values))
    names = [name for name, _ in result.existentials]
    pools = [model.values(t) for _, t in result.existentials]
    found = []
    for choice in itertools.product(*pools):
        inner = dict(env)
        inner.update(zip(names, choice))
        if evaluate(result.matrix, model, inner):
            found.append(choice)
    return found

def _witness_table(result: ExtractionResult, model: TwoLevelModel,
                   pick: Callable[[List[Tuple], int], SeqVal]) -> Dict[str, Any]:
    cache: Dict[str, List[Tuple]] = {}
    witnesses: Dict[str, Any] = {}
    for position, (name, _) in enumerate(result.existentials):
        def witness(argument=None, position=position):
            key = repr(argument)
            if key not in cache:
                cache[key] = _choices(result, model, argument)
            return pick(cache[key], position)
        witnesses[_symbol_of(result, name)] = witness if result.universals else witness()
    return witnesses

def oracle_witnesses(result: ExtractionResult, model: TwoLevelModel) -> Dict[str, Any]:
    """
    Testemunhas que devolvem, para cada tupla de universais, todos os candidatos que
    completam uma escolha verdadeira da matriz.
    """
    def every(found: List[Tuple], position: int) -> SeqVal:
        return SeqVal(tuple(sorted({choice[position] for choice in found}, key=repr)))
    return _witness_table(result, model, every)

def search_witnesses(result: ExtractionResult, model: TwoLevelModel) -> Dict[str, Any]:
    """
    Testemunhas concretas: a sequência de uma entrada com a primeira escolha que
    satisfaz a matriz. Com uma entrada só, o termo colapsado `max(t(ū))` da receita
    vale a própria escolha.
    """
    def first(found: List[Tuple], position: int) -> SeqVal:
        return SeqVal((found[0][position],)) if found else SeqVal(())
    return _witness_table(result, model, first)

def drop_entry(factory: WitnessFactory) -> WitnessFactory:
    """Mutação: tira a primeira entrada de cada sequência devolvida pelas testemunhas"""
    def shorten(value: SeqVal) -> SeqVal:
        return SeqVal(value.items[1:])
    def mutated(result: ExtractionResult, model: TwoLevelModel) -> Dict[str, Any]:
        witnesses = {}
        for symbol, value in factory(result, model).items():
            if isinstance(value, SeqVal):
                witnesses[symbol] = shorten(value)
            else:
                witnesses[symbol] = lambda argument=None, value=value: shorten(value(argument))
        return witnesses
    return mutated

WITNESS_FACTORIES: Dict[str, WitnessFactory] = {"oracle": oracle_witnesses, "search": search_witnesses}

def _untuple(value, size: int) -> List[Any]:
    items = []
    for _ in range(size - 1):
        items.append(value[0])
        value = value[1]
    items.append(value)
    return items

def _symbol_of(result: ExtractionResult, name: str) -> str:
    term = result.witness_terms[name]
    return term.fun.name if isinstance(term, App) else term.name

def check_extraction(result: ExtractionResult, budget: Optional[int] = None, max_domain: int = 3,
                     seed: Optional[int] = None, level_bound: int = 1,
                     witnesses: Optional[WitnessFactory] = None) -> Verdict:
    """Avalia a sentença interna (e a colapsada, se houver) em cada modelo e ambiente"""
    settings = get_settings()
    budget = budget or settings.SOUNDNESS_BUDGET
    seed = resolve_seed(seed)
    factory = witnesses or search_witnesses
    sentences = [result.internal_sentence]
    if result.collapsed_sentence is not None:
        sentences.append(result.collapsed_sentence)
    symbols = set(result.symbols)
    signature = signature_of(result.internal_sentence)
    checked = 0
    exhausted = False
    counterexamples: List[Counterexample] = []
    for model in enumerate_models(signature, max_domain, level_bound, seed):
        if checked >= budget:
            exhausted = True
            break
        fixed = factory(result, model)
        for sentence in sentences:
            others = {n: t for n, t in free_vars(sentence).items() if n not in symbols}
            for env in environments(model, others, fixed):
                checked += 1
                if not evaluate(sentence, model, env):
                    shown = {n: v for n, v in env.items() if n not in symbols}
                    counterexamples.append(Counterexample(model, format_formula(sentence), shown,
                                                          "sentença extraída falsa"))
                    break
        if counterexamples:
            break
    if checked == 0:
        raise CoverageError("Orçamento esgotado sem verificar nenhum modelo")
    status = Status.FAIL if counterexamples else Status.PASS
    if counterexamples:
        logger.warning("Violação da extração:\n%s", counterexamples[0].to_text())
    return Verdict("extraction", status, checked, seed, counterexamples, exhausted)
