from typing import Optional, Tuple

class EngineError(Exception):
    """Erro base do motor. `detail` é a mensagem mostrada ao usuário."""

    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

class ParseError(EngineError):
    exit_code = 2

    def __init__(self, detail: str, line: Optional[int] = None, column: Optional[int] = None):
        if line is not None:
            detail = f"{detail} (linha {line}, coluna {column})"
        super().__init__(detail)
        self.line = line
        self.column = column

class TypeCheckError(EngineError):
    exit_code = 2

class SignatureError(EngineError):
    exit_code = 2

class CatalogError(EngineError):
    exit_code = 2

class RuleError(EngineError):
    pass

class FragmentError(EngineError):
    def __init__(self, detail: str, path: Tuple[int, ...] = ()):
        super().__init__(detail)
        self.path = path

class TraceError(EngineError):
    pass

class ExtractionError(EngineError):
    pass

class ModelBoundsError(EngineError):
    pass

class CoverageError(EngineError):
    pass
