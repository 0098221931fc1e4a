"""カーネル言語

Scheme 風の最小言語で、ベースモジュールと変換モジュールの本体を記述します。
"""

from modlock.core.domain import ModuleEnv, Transformation
from modlock.lang.bridge import compile_base, compile_trans, menv_to_env, module_to_val, val_to_module
from modlock.lang.builtins import initial_env
from modlock.lang.evaluator import apply_value, evaluate, step_budget
from modlock.lang.syntax import Exp, parse_exp
from modlock.lang.values import TRUE, FALSE, Env, Value, VClosure, VList, VNum, VStr
from modlock.sexpr import SExpr


class SchemeLanguage:
    """コアのホスト言語インターフェースのカーネル言語による実装"""

    name = "scheme"

    def compile_base(self, body: SExpr, menv: ModuleEnv) -> list[tuple[str, Value]]:
        return compile_base(body, menv)

    def compile_trans(self, body: SExpr, menv: ModuleEnv) -> Transformation:
        return compile_trans(body, menv)


__all__ = [
    "SchemeLanguage",
    "Exp",
    "Env",
    "Value",
    "VClosure",
    "VList",
    "VNum",
    "VStr",
    "TRUE",
    "FALSE",
    "parse_exp",
    "evaluate",
    "apply_value",
    "step_budget",
    "initial_env",
    "compile_base",
    "compile_trans",
    "module_to_val",
    "val_to_module",
    "menv_to_env",
]
