from pydantic import BaseModel, Field, model_validator
from typing import Optional, List, Dict

from extraction import ExtractionResult, Herbrandisation
from normalform import RuleTrace
from surface import format_formula, format_term
from syntax import format_path, format_type

# Veredictos
class VerdictEntry(BaseModel):
    status: str = Field(..., pattern="^(pass|fail|skipped)$")
    detail: Optional[str] = None

def passed(detail: Optional[str] = None) -> VerdictEntry:
    return VerdictEntry(status="pass", detail=detail)

def failed(detail: Optional[str] = None) -> VerdictEntry:
    return VerdictEntry(status="fail", detail=detail)

def skipped(detail: Optional[str] = None) -> VerdictEntry:
    return VerdictEntry(status="skipped", detail=detail)

# Traço
class TraceStepResponse(BaseModel):
    step: int = Field(..., ge=1)
    rule: str
    path: str
    fresh: List[str]
    formula: str

# Extração
class WitnessResponse(BaseModel):
    name: str
    symbol: str
    type: str
    term: str
    recipe: str
    origin: List[str] = []
    steps: List[int] = []
    collapsed: Optional[str] = None

class ExtractionResponse(BaseModel):
    witnesses: List[WitnessResponse]
    internal_sentence: str
    collapsed: Optional[str] = None
    vacuous: List[str] = []

class HerbrandisationResponse(BaseModel):
    i: str
    o: str
    body: str
    normal_form: str
    vacuous_o: bool

# Relatório
class Report(BaseModel):
    principle: Optional[str] = None
    logic: Optional[str] = None
    stages: Dict[str, str] = {}
    trace: List[TraceStepResponse] = []
    extraction: Optional[ExtractionResponse] = None
    herbrandisation: Optional[HerbrandisationResponse] = None
    verdicts: Dict[str, VerdictEntry]
    seed: int
    timings: Optional[Dict[str, float]] = None

    @model_validator(mode="after")
    def verdicts_present(self):
        if not self.verdicts:
            raise ValueError("Relatório sem veredictos")
        return self

    @property
    def failed(self) -> bool:
        return any(v.status == "fail" for v in self.verdicts.values())

def trace_response(trace: RuleTrace) -> List[TraceStepResponse]:
    return [TraceStepResponse(step=s.index, rule=s.rule.value, path=format_path(s.path),
                              fresh=list(s.fresh), formula=format_formula(s.after))
            for s in trace.steps]

def extraction_response(result: ExtractionResult) -> ExtractionResponse:
    witnesses = []
    for name, typ in result.existentials:
        term = result.witness_terms[name]
        symbol = term.fun.name if hasattr(term, "fun") else term.name
        provenance = result.provenance.get(name)
        witnesses.append(WitnessResponse(
            name=name, symbol=symbol, type=format_type(result.symbols[symbol]),
            term=format_term(term), recipe=result.recipes[name],
            origin=list(provenance.origin) if provenance else [],
            steps=list(provenance.steps) if provenance else [],
            collapsed=format_term(provenance.collapsed) if provenance and provenance.collapsed else None,
        ))
    collapsed = format_formula(result.collapsed_sentence) if result.collapsed_sentence is not None else None
    return ExtractionResponse(witnesses=witnesses,
                              internal_sentence=format_formula(result.internal_sentence),
                              collapsed=collapsed, vacuous=list(result.vacuous))

def herbrandisation_response(h: Herbrandisation) -> HerbrandisationResponse:
    return HerbrandisationResponse(
        i=f"{h.i_term.name} : {format_type(h.i_term.type)}",
        o=f"{h.o_term.name} : {format_type(h.o_term.type)}",
        body=format_formula(h.body),
        normal_form=format_formula(h.normal_form),
        vacuous_o=h.vacuous_o,
    )
