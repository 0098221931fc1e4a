"""モジュールシステムのコア

構文ドメイン、意味ドメイン、compile_module / compile_import を提供します。
"""

from modlock.core.compiler import (
    CompileObserver,
    HostLanguage,
    compile_import,
    compile_module,
    default_language,
    observationally_equal,
    values_equal,
)
from modlock.core.domain import CBase, CModel, Compiled, CTrans, ModelClosure, ModuleEnv, Transformation, get_model
from modlock.core.syntax import (
    Apply,
    ImportExpr,
    ModuleDef,
    ModuleType,
    Simple,
    default_local_name,
    deps,
    deps_imp,
    format_import,
    import_from_sexpr,
    import_to_sexpr,
    module_to_sexpr,
    parse_import_text,
    parse_module,
    type_of,
)

__all__ = [
    "Apply",
    "CBase",
    "CModel",
    "CTrans",
    "CompileObserver",
    "Compiled",
    "HostLanguage",
    "ImportExpr",
    "ModelClosure",
    "ModuleDef",
    "ModuleEnv",
    "ModuleType",
    "Simple",
    "Transformation",
    "compile_import",
    "compile_module",
    "default_language",
    "default_local_name",
    "deps",
    "deps_imp",
    "format_import",
    "get_model",
    "import_from_sexpr",
    "import_to_sexpr",
    "module_to_sexpr",
    "observationally_equal",
    "parse_import_text",
    "parse_module",
    "type_of",
    "values_equal",
]
