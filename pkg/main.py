import functools
import logging
import os
import sys
from typing import Optional, Sequence

import click

from catalog import ALIASES, NOT_ENCODED, get_principle, pipeline, principle_names
from config import get_settings, resolve_seed
from errors import EngineError, FragmentError, ExtractionError
from extraction import collapse_monotone, extract, herbrandise, meta_reverse, monotone_existentials
from models import (
    Report, extraction_response, failed, herbrandisation_response, passed, trace_response,
)
from normalform import Logic, Rule, normalize, normalize_antecedent, replay
from semantics import WITNESS_FACTORIES, Status, Verdict, check_extraction, check_rule_soundness
from surface import format_document, parse_document
from syntax import Implies, alpha_equivalent, classify_internal

logger = logging.getLogger(__name__)

LOGICS = click.Choice([logic.value for logic in Logic])
FORMATS = click.Choice(["text", "json"])

# Saída

def emit_report(report: Report, fmt: str = "text") -> str:
    """Serialização determinística do relatório"""
    if fmt == "json":
        return report.model_dump_json(indent=2)
    lines = []
    if report.principle:
        lines.append(f"principle: {report.principle}")
    if report.logic:
        lines.append(f"logic: {report.logic}")
    lines.append(f"seed: {report.seed}")
    for stage, document in report.stages.items():
        lines.append(f"[{stage}]")
        lines.append(document.rstrip("\n"))
    if report.trace:
        lines.append("[trace]")
        for step in report.trace:
            fresh = ",".join(step.fresh) if step.fresh else "-"
            lines.append(f"STEP {step.step} {step.rule} AT {step.path} FRESH {fresh} => {step.formula}")
    if report.extraction:
        lines.append("[extraction]")
        for witness in report.extraction.witnesses:
            lines.append(f"{witness.name} := {witness.term} : {witness.type} ({witness.recipe})")
        if report.extraction.vacuous:
            lines.append(f"vacuous: {', '.join(report.extraction.vacuous)}")
    if report.herbrandisation:
        lines.append("[herbrandisation]")
        lines.append(report.herbrandisation.i)
        lines.append(report.herbrandisation.o)
    lines.append("[verdicts]")
    for name, verdict in report.verdicts.items():
        detail = f" ({verdict.detail})" if verdict.detail else ""
        lines.append(f"{name}: {verdict.status}{detail}")
    if report.timings:
        lines.append("[timings]")
        for stage, seconds in report.timings.items():
            lines.append(f"{stage}: {seconds:.6f}")
    return "\n".join(lines)

def _finish(report: Report, fmt: str) -> int:
    click.echo(emit_report(report, fmt))
    return 1 if report.failed else 0

def _load(path: str):
    with open(path, encoding="utf-8") as handle:
        return parse_document(handle.read())

def engine_command(fn):
    """Converte o retorno e os EngineError do comando em código de saída"""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            code = fn(*args, **kwargs)
        except EngineError as e:
            click.echo(f"erro: {e.detail}", err=True)
            ctx.exit(e.exit_code)
        ctx.exit(code or 0)
    return wrapper

def report_options(fn):
    fn = click.option("--format", "fmt", type=FORMATS, default="text", show_default=True)(fn)
    return fn

# Comandos

@click.group()
@click.option("--verbose", is_flag=True, help="Logging em nível DEBUG")
def cli(verbose: bool):
    """Motor simbólico de aritmética não padrão para o zoo da Matemática Reversa"""
    settings = get_settings()
    level = logging.DEBUG if verbose else getattr(logging, settings.LOG_LEVEL.upper(), logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")

@cli.command("parse")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@report_options
@engine_command
def parse_command(file: str, fmt: str):
    """Lê e tipa um documento, conferindo a ida e volta da impressão"""
    document = _load(file)
    text = format_document(document.formula)
    again = parse_document(text).formula
    verdicts = {
        "parse": passed(classify_internal(document.formula).value),
        "round_trip": passed() if again == document.formula else failed("impressão não relê a mesma AST"),
    }
    report = Report(stages={"input": text}, verdicts=verdicts, seed=resolve_seed())
    return _finish(report, fmt)

@cli.command("print")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@engine_command
def print_command(file: str):
    """Imprime o documento na forma canônica"""
    click.echo(format_document(_load(file).formula), nl=False)
    return 0

@cli.command("normalize")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--logic", type=LOGICS, default=Logic.CLASSICAL.value, show_default=True)
@report_options
@engine_command
def normalize_command(file: str, logic: str, fmt: str):
    """Normaliza a fórmula, registrando o traço de reescrita"""
    formula = _load(file).formula
    stages = {"input": format_document(formula)}
    try:
        nf, trace = normalize(formula, Logic(logic))
    except FragmentError as e:
        partial = getattr(e, "trace", None)
        report = Report(logic=logic, stages=stages, trace=trace_response(partial) if partial else [],
                        verdicts={"normal_form": failed(e.detail)}, seed=resolve_seed())
        return _finish(report, fmt)
    stages["normal_form"] = format_document(nf.to_formula())
    verdicts = {
        "normal_form": passed(),
        "replay": passed() if replay(trace) == nf.to_formula() else failed("replay divergente"),
    }
    report = Report(logic=logic, stages=stages, trace=trace_response(trace), verdicts=verdicts,
                    seed=resolve_seed())
    return _finish(report, fmt)

def _extraction(file: str, logic: Logic):
    formula = _load(file).formula
    nf, trace = normalize(formula, logic)
    result = extract(nf, trace)
    monotone = monotone_existentials(result)
    if monotone:
        result.collapsed_sentence = collapse_monotone(result, monotone)
    return formula, nf, trace, result

@cli.command("extract")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--logic", type=LOGICS, default=Logic.CLASSICAL.value, show_default=True)
@report_options
@engine_command
def extract_command(file: str, logic: str, fmt: str):
    """Normaliza e extrai os termos de Herbrand das existenciais padrão"""
    formula, nf, trace, result = _extraction(file, Logic(logic))
    stages = {
        "input": format_document(formula),
        "normal_form": format_document(nf.to_formula()),
        "internal_sentence": format_document(result.internal_sentence),
    }
    if result.collapsed_sentence is not None:
        stages["collapsed"] = format_document(result.collapsed_sentence)
    report = Report(logic=logic, stages=stages, trace=trace_response(trace),
                    extraction=extraction_response(result), verdicts={"extraction": passed()},
                    seed=resolve_seed())
    return _finish(report, fmt)

def _herbrandisation(file: str, logic: Logic):
    formula = _load(file).formula
    if not isinstance(formula, Implies):
        raise ExtractionError("Herbrandização exige uma implicação UT⁺ -> consequente")
    antecedent, _ = normalize_antecedent(formula.left, logic)
    consequent, _ = normalize(formula.right, logic)
    return antecedent, consequent, herbrandise(antecedent, consequent)

@cli.command("herbrandise")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--logic", type=LOGICS, default=Logic.CLASSICAL.value, show_default=True)
@report_options
@engine_command
def herbrandise_command(file: str, logic: str, fmt: str):
    """Herbrandiza uma implicação com antecedente ?st P. (cláusulas)"""
    _, _, h = _herbrandisation(file, Logic(logic))
    report = Report(logic=logic,
                    stages={"herbrandisation": format_document(h.body),
                            "herbrand_normal_form": format_document(h.normal_form)},
                    herbrandisation=herbrandisation_response(h),
                    verdicts={"herbrandisation": passed()}, seed=resolve_seed())
    return _finish(report, fmt)

@cli.command("meta-reverse")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--logic", type=LOGICS, default=Logic.CLASSICAL.value, show_default=True)
@report_options
@engine_command
def meta_reverse_command(file: str, logic: str, fmt: str):
    """Herbrandiza e reconstrói a implicação externa"""
    antecedent, consequent, h = _herbrandisation(file, Logic(logic))
    reversed_form = meta_reverse(h)
    original = Implies(antecedent.to_formula(), consequent.to_formula())
    verdict = passed() if alpha_equivalent(reversed_form, original) else failed("reversão difere do original")
    report = Report(logic=logic,
                    stages={"herbrandisation": format_document(h.body),
                            "meta_reverse": format_document(reversed_form)},
                    herbrandisation=herbrandisation_response(h),
                    verdicts={"round_trip": verdict}, seed=resolve_seed())
    return _finish(report, fmt)

@cli.group("catalog")
def catalog_group():
    """Consulta o catálogo de princípios"""

@catalog_group.command("list")
@engine_command
def catalog_list():
    for name in principle_names():
        principle = get_principle(name)
        click.echo(f"{name}\t{principle.kind.value}\t{principle.description}")
    for alias, target in ALIASES.items():
        click.echo(f"{alias}\talias\t-> {target}")
    for name in NOT_ENCODED:
        click.echo(f"{name}\tnão codificado")
    return 0

@catalog_group.command("show")
@click.argument("name")
@engine_command
def catalog_show(name: str):
    click.echo(get_principle(name).document(), nl=False)
    return 0

@cli.command("pipeline")
@click.argument("name")
@click.option("--logic", type=LOGICS, default=Logic.CLASSICAL.value, show_default=True)
@click.option("--golden", "golden_dir", type=click.Path(file_okay=False), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--timings", is_flag=True, help="Inclui tempos por estágio")
@report_options
@engine_command
def pipeline_command(name: str, logic: str, golden_dir: Optional[str], seed: Optional[int], fmt: str,
                     timings: bool):
    """Executa uniformização, normalização, extração e herbrandização de um princípio"""
    report = pipeline(name, Logic(logic), golden_dir, seed=seed, timings=timings)
    return _finish(report, fmt)

# Verificação de modelos

def _verdict_report(verdict: Verdict, key: str, dump: Optional[str]) -> Report:
    detail = f"{verdict.status.value}; {verdict.checked} verificação(ões)"
    if verdict.exhausted:
        detail += "; orçamento esgotado"
    if verdict.counterexamples:
        first = verdict.counterexamples[0]
        detail += f"; {first.detail}: {first.instance}"
    entry = failed(detail) if verdict.status == Status.FAIL else passed(detail)
    if dump and verdict.counterexamples:
        os.makedirs(dump, exist_ok=True)
        for k, counterexample in enumerate(verdict.counterexamples, start=1):
            target = os.path.join(dump, f"{verdict.subject}-{k}.txt")
            with open(target, "w", encoding="utf-8") as handle:
                handle.write(counterexample.to_text())
    return Report(principle=verdict.subject, verdicts={key: entry}, seed=verdict.seed)

@cli.group("model-check")
def model_check_group():
    """Verificação por força bruta em modelos finitos de dois níveis"""

@model_check_group.command("rule")
@click.argument("name", type=click.Choice([rule.value for rule in Rule]))
@click.option("--seed", type=int, default=None)
@click.option("--size", type=int, default=3, show_default=True, help="Tamanho máximo do domínio")
@click.option("--budget", type=int, default=None)
@click.option("--dump", type=click.Path(file_okay=False), default=None)
@report_options
@engine_command
def model_check_rule(name: str, seed: Optional[int], size: int, budget: Optional[int],
                     dump: Optional[str], fmt: str):
    verdict = check_rule_soundness(Rule(name), budget=budget, max_domain=size, seed=seed)
    return _finish(_verdict_report(verdict, f"soundness:{name}", dump), fmt)

@model_check_group.command("extraction")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, default=None)
@click.option("--size", type=int, default=3, show_default=True, help="Tamanho máximo do domínio")
@click.option("--budget", type=int, default=None)
@click.option("--dump", type=click.Path(file_okay=False), default=None)
@click.option("--witnesses", type=click.Choice(sorted(WITNESS_FACTORIES)), default="search",
              show_default=True, help="search: uma escolha por tupla; oracle: todos os candidatos")
@report_options
@engine_command
def model_check_extraction(file: str, seed: Optional[int], size: int, budget: Optional[int],
                           dump: Optional[str], witnesses: str, fmt: str):
    _, _, _, result = _extraction(file, Logic.CLASSICAL)
    verdict = check_extraction(result, budget=budget, max_domain=size, seed=seed,
                               witnesses=WITNESS_FACTORIES[witnesses])
    return _finish(_verdict_report(verdict, "extraction", dump), fmt)

def run_command(argv: Sequence[str]) -> int:
    try:
        code = cli.main(args=list(argv), prog_name="nszoo", standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return 2
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        return 1
    return code if isinstance(code, int) else 0

if __name__ == "__main__":
    sys.exit(run_command(sys.argv[1:]))
