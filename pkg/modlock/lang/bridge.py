"""モジュールとカーネル言語の橋渡し

ベース／変換本体のコンパイルと、モジュールの実体化（値への変換）とその逆を担当します。
"""

from __future__ import annotations

import dataclasses
import logging
from typing import Sequence

from modlock.core.domain import CBase, ModuleEnv, Transformation, get_model
from modlock.core.syntax import ModuleDef, module_to_sexpr, parse_module
from modlock.exceptions import (
    ArityMismatchError,
    DuplicateDefinitionError,
    MalformedBodyError,
    MalformedGeneratedModuleError,
    MalformedModuleError,
    NotAFunctionError,
)
from modlock.lang.builtins import initial_env
from modlock.lang.evaluator import apply_value, evaluate
from modlock.lang.syntax import normalize_base, normalize_definitions, parse_exp
from modlock.lang.values import Env, Value, VClosure, format_value, sexpr_to_value, value_to_sexpr
from modlock.sexpr import SExpr, SList, head_is, print_sexpr

logger = logging.getLogger(__name__)


def menv_to_env(menv: ModuleEnv) -> Env:
    """モジュール環境を値の環境にする

    各ローカル名には実体化したモジュールを、ベースモジュールの各定義には
    `local:name` を束縛します。
    """
    bindings: list[tuple[str, Value]] = []
    for local, compiled in menv:
        bindings.append((local, module_to_val(get_model(compiled).syntax)))
        if isinstance(compiled, CBase):
            bindings.extend((f"{local}:{name}", value) for name, value in compiled.defs)
    return Env.of(bindings)


def _recursive_env(definitions: list[tuple[str, SExpr]], outer: Env) -> Env:
    """定義同士が互いを参照できる環境で各定義を評価する（ソース順）"""
    names = [name for name, _ in definitions]
    duplicates = sorted({name for name in names if names.count(name) > 1})
    if duplicates:
        raise DuplicateDefinitionError(
            f"duplicate definition: {', '.join(duplicates)}",
            details={"names": duplicates},
        )
    frame: dict[str, Value] = {}
    env = Env((frame,)).then(outer)
    for name, exp in definitions:
        value = evaluate(env, parse_exp(exp))
        if isinstance(value, VClosure) and value.name == "lambda":
            value = dataclasses.replace(value, name=name)
        frame[name] = value
    return env


def compile_base(body: SExpr, menv: ModuleEnv) -> list[tuple[str, Value]]:
    """ベース本体をコンパイルし、(定義名, 値) をソース順に返す

    Raises:
        DuplicateDefinitionError: 定義名の重複
        ExpSyntaxError: 本体・式の構文エラー
        EvaluationError: 定義の評価エラー
    """
    definitions = normalize_base(body)
    env = _recursive_env(definitions, menv_to_env(menv).then(initial_env()))
    return [(name, env.lookup(name)) for name, _ in definitions]


def compile_trans(body: SExpr, menv: ModuleEnv) -> Transformation:
    """変換本体をコンパイルし、構文モジュールのリストを受け取る関数を返す

    本体は `(transformation <exp> (define ...)*)` で、ヘルパー定義の下で <exp> を評価します。

    Raises:
        NotAFunctionError: <exp> の値がクロージャでない場合
    """
    if not (head_is(body, "transformation") and isinstance(body, SList) and len(body) >= 2):
        raise MalformedBodyError(f"expected a transformation body: {print_sexpr(body)}")
    helpers = normalize_definitions(body.items[2:])
    env = _recursive_env(helpers, menv_to_env(menv).then(initial_env()))
    closure = evaluate(env, parse_exp(body.items[1]))
    if not isinstance(closure, VClosure):
        raise NotAFunctionError(
            f"transformation body is not a function: {format_value(closure)}",
            details={"value": format_value(closure)},
        )

    def transform(modules: Sequence[ModuleDef]) -> ModuleDef:
        if closure.arity is not None and closure.arity != len(modules):
            raise ArityMismatchError(
                f"transformation expects {closure.arity} module(s), got {len(modules)}",
                details={"expected": closure.arity, "actual": len(modules)},
            )
        result = apply_value(closure, [module_to_val(m) for m in modules])
        return val_to_module(result)

    return transform


def module_to_val(m: ModuleDef) -> Value:
    """モジュールを値として実体化する"""
    return sexpr_to_value(module_to_sexpr(m))


def val_to_module(v: Value) -> ModuleDef:
    """実体化されたモジュールを構文に戻す

    Raises:
        MalformedGeneratedModuleError: 値がモジュールの像でない場合
    """
    try:
        return parse_module(value_to_sexpr(v))
    except (ValueError, MalformedModuleError, MalformedBodyError) as e:
        shown = format_value(v)
        logger.debug("Generated value is not a module", extra={"value": shown})
        raise MalformedGeneratedModuleError(
            f"transformation result is not a module: {shown} ({e})",
            details={"value": shown},
        ) from e
