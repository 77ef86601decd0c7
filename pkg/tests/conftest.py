import os
import random
from typing import Sequence

import pytest

from catalog import get_principle
from config import get_settings
from semantics import SCHEMA_CONTEXT, SCHEMA_SIGNATURE
from surface import parse_document, parse_formula
from syntax import (
    BASE, And, App, AtomEq0, AtomLe, AtomPred, BoundedExists, BoundedForall, Exists, ExistsSt, Forall,
    ForallSt, Formula, FunSym, Implies, Not, Or, Succ, Term, Var, numeral, pure_type,
)

F1 = pure_type(1)

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
GOLDEN_DIR = os.path.join(ROOT, "golden")
GOLDEN_LABELS = ("curk", "frok", "fras", "finkal", "tokamak", "structure", "bling", "HIO",
                 "frood", "frood2", "froodke")

@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    monkeypatch.delenv("NSZOO_SEED", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()

@pytest.fixture
def golden_dir():
    return GOLDEN_DIR

@pytest.fixture
def golden():
    def load(label: str):
        with open(os.path.join(GOLDEN_DIR, f"{label}.txt"), encoding="utf-8") as handle:
            return parse_document(handle.read()).formula
    return load

@pytest.fixture
def schema():
    """Parser para fórmulas sobre a assinatura dos esquemas de regra (P, Q, R, a, b; y, f, g)"""
    return lambda text: parse_formula(text, SCHEMA_SIGNATURE, SCHEMA_CONTEXT)

@pytest.fixture
def transfer():
    return get_principle("PI01-TRANS").statement

class RandomFormulas:
    """
    Fórmulas pequenas e bem tipadas sobre a assinatura dos esquemas (P, Q, R, a, b),
    reprodutíveis pela semente. As variáveis livres são sempre `y:0` e `f:1`.
    """
    BINDERS = ("x", "z", "w", "v")

    def __init__(self, seed: int, st: bool = True, symbols: bool = True):
        self.rng = random.Random(seed)
        self.st = st
        self.symbols = symbols

    def term(self, scope: Sequence[str], depth: int = 2) -> Term:
        names = list(scope) + ["y"]
        choice = self.rng.randrange(6 if depth > 0 else 2)
        if choice == 0:
            return Var(self.rng.choice(names), BASE)
        if choice == 1:
            return numeral(self.rng.randrange(3))
        if choice == 2:
            return Succ(self.term(scope, depth - 1))
        if choice == 3:
            return App(Var("f", F1), self.term(scope, depth - 1))
        if not self.symbols:
            return Var(self.rng.choice(names), BASE)
        if choice == 4:
            return FunSym("a", (self.term(scope, depth - 1),), (BASE,))
        return FunSym("b", (self.term(scope, depth - 1), self.term(scope, depth - 1)), (BASE, BASE))

    def atom(self, scope: Sequence[str]) -> Formula:
        choice = self.rng.randrange(5)
        if choice == 0:
            return AtomEq0(self.term(scope), self.term(scope))
        if choice == 1:
            return AtomLe(self.term(scope), self.term(scope))
        if choice == 2:
            return AtomPred("P", (self.term(scope),), (BASE,))
        if choice == 3:
            return AtomPred("Q", (self.term(scope),), (BASE,))
        return AtomPred("R", (self.term(scope), self.term(scope)), (BASE, BASE))

    def formula(self, depth: int = 3, scope: Sequence[str] = ()) -> Formula:
        if depth == 0 or self.rng.random() < 0.3:
            return self.atom(scope)
        kinds = [Not, And, Or, Implies, Forall, Exists, BoundedForall, BoundedExists]
        if self.st:
            kinds += [ForallSt, ExistsSt]
        kind = self.rng.choice(kinds)
        if kind is Not:
            return Not(self.formula(depth - 1, scope))
        if kind in (And, Or, Implies):
            return kind(self.formula(depth - 1, scope), self.formula(depth - 1, scope))
        var = self.rng.choice(self.BINDERS)
        inner = tuple(scope) + (var,)
        if kind in (BoundedForall, BoundedExists):
            return kind(var, self.term(scope, 1), self.formula(depth - 1, inner))
        return kind(var, BASE, self.formula(depth - 1, inner))

    def internal(self, depth: int = 3, scope: Sequence[str] = ()) -> Formula:
        saved, self.st = self.st, False
        try:
            return self.formula(depth, scope)
        finally:
            self.st = saved

    def external(self, depth: int = 4) -> Formula:
        """Combinação proposicional de blocos st sobre corpos internos"""
        if depth == 0 or self.rng.random() < 0.25:
            kind = self.rng.choice([ForallSt, ExistsSt])
            var = self.rng.choice(self.BINDERS)
            return kind(var, BASE, self.internal(2, (var,)))
        choice = self.rng.randrange(4)
        if choice == 0:
            return Not(self.external(depth - 1))
        if choice == 1:
            return And(self.external(depth - 1), self.internal(1))
        if choice == 2:
            return Or(self.internal(1), self.external(depth - 1))
        return Implies(self.external(depth - 1), self.external(depth - 1))

@pytest.fixture
def random_formulas():
    """Fábrica de geradores semeados: `random_formulas(seed, st=..., symbols=...)`"""
    return RandomFormulas
