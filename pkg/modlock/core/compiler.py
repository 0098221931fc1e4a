"""モジュールコンパイラ

compile_module / compile_import を提供します。本体の言語は HostLanguage として差し替え可能で、
ワークスペースなどの利用側は CompileObserver のフックで名前解決と生成を観測します。
コンパイル関数自体は状態を持たず、同じ入力には観測的に等しい結果を返します。
"""

from __future__ import annotations

import itertools
import logging
from contextlib import AbstractContextManager, nullcontext
from typing import Any, Protocol, Sequence

from modlock.config import get_settings
from modlock.core.domain import CBase, CModel, Compiled, CTrans, ModelClosure, ModuleEnv, Transformation, get_model
from modlock.core.syntax import Apply, ImportExpr, ModuleDef, ModuleType, Simple, format_import, parse_module, type_of
from modlock.exceptions import (
    HiddenDependencyError,
    ModlockError,
    NotATransformationError,
    TransformationFailureError,
    UnresolvedImportError,
)
from modlock.sexpr import SExpr, parse_sexpr

logger = logging.getLogger(__name__)


class HostLanguage(Protocol):
    """本体言語のインターフェース"""

    def compile_base(self, body: SExpr, menv: ModuleEnv) -> list[tuple[str, Any]]: ...

    def compile_trans(self, body: SExpr, menv: ModuleEnv) -> Transformation: ...


def default_language() -> HostLanguage:
    """既定の本体言語（カーネル言語）"""
    from modlock.lang import SchemeLanguage

    return SchemeLanguage()


class CompileObserver:
    """コンパイル中の出来事を受け取るフック

    既定の実装は何もしません。ワークスペースはこれを継承して
    使用名の記録、生成モジュールのメモ化、キャッシュからの復元を行います。
    """

    def resolved(self, name: str, compiled: Compiled) -> None:
        """Simple インポートが解決された"""

    def resolve_missing(self, name: str) -> Compiled | None:
        """環境にない名前の最後の解決手段（None なら未解決エラー）"""
        return None

    def generation_key(self, imp: Apply, trans: CTrans, args: Sequence[Compiled]) -> str:
        """生成モジュールを識別するキー"""
        return format_import(imp)

    def generated_value(self, key: str) -> Compiled | None:
        """生成済みのコンパイル結果（あれば変換の実行とコンパイルを省略）"""
        return None

    def generated_syntax(self, key: str) -> ModuleDef | None:
        """保存済みの生成モジュール構文（あれば変換の実行を省略）"""
        return None

    def generating(self, key: str, trans: CTrans, args: Sequence[Compiled]) -> AbstractContextManager[Any]:
        """生成モジュールのコンパイル区間"""
        return nullcontext()

    def generated(self, key: str, module: ModuleDef, result: Compiled) -> None:
        """生成モジュールのコンパイルが完了した"""


_NO_OBSERVER = CompileObserver()


def compile_module(
    env: ModuleEnv,
    m: ModuleDef,
    *,
    language: HostLanguage | None = None,
    observer: CompileObserver | None = None,
    _depth: int = 0,
) -> Compiled:
    """環境の下でモジュールをコンパイルする

    全インポートを env に対して解決して本体環境を作り、本体の種類に応じて
    CBase / CTrans / CModel を構築します。

    Args:
        env: インポート名の解決に使う環境
        m: コンパイルするモジュール
        language: 本体言語（省略時はカーネル言語）
        observer: コンパイルフック

    Returns:
        コンパイル済みモジュール（モデルクロージャの構文は m そのもの）

    Raises:
        UnresolvedImportError: Simple インポートが env にない場合
        HiddenDependencyError: 生成モジュールが genEnv にない名前を参照した場合
        NotATransformationError: 変換でないモジュールを適用した場合
        TransformationFailureError: 変換の実行に失敗した場合
        MalformedBodyError: 本体が認識できない場合
    """
    language = language or default_language()
    observer = observer or _NO_OBSERVER
    module_type = type_of(m.body)
    bodyenv = ModuleEnv(
        (local, compile_import(env, imp, language=language, observer=observer, _depth=_depth))
        for local, imp in m.imports
    )
    closure = ModelClosure(m, bodyenv)
    if module_type is ModuleType.TBASE:
        return CBase(closure, tuple(language.compile_base(m.body, bodyenv)))
    if module_type is ModuleType.TTRANS:
        return CTrans(closure, language.compile_trans(m.body, bodyenv))
    return CModel(closure)


def compile_import(
    env: ModuleEnv,
    i: ImportExpr,
    *,
    language: HostLanguage | None = None,
    observer: CompileObserver | None = None,
    _depth: int = 0,
) -> Compiled:
    """インポート式を解決する

    Simple は env から引き、Apply は変換を実行して生成モジュールを genEnv の下で
    コンパイルします。genEnv は current-arg-i、current-trans、引数のクロージャ環境、
    変換のクロージャ環境をこの順に連結したもので、呼び出し側の env は含みません。
    """
    language = language or default_language()
    observer = observer or _NO_OBSERVER
    if isinstance(i, Simple):
        compiled = env.lookup(i.name)
        if compiled is None:
            compiled = observer.resolve_missing(i.name)
        if compiled is None:
            logger.debug("Unresolved import", extra={"import_name": i.name, "env": env.names()})
            raise UnresolvedImportError(i.name, [i.name])
        observer.resolved(i.name, compiled)
        return compiled
    return _compile_apply(env, i, language, observer, _depth)


def _compile_apply(
    env: ModuleEnv,
    i: Apply,
    language: HostLanguage,
    observer: CompileObserver,
    depth: int,
) -> Compiled:
    trans = compile_import(env, i.target, language=language, observer=observer, _depth=depth)
    if not isinstance(trans, CTrans):
        target = format_import(i.target)
        raise NotATransformationError(
            f"{target} is not a transformation (it is a {trans.module_type.value} module)",
            details={"target": target, "module_type": trans.module_type.value},
        )
    args = [compile_import(env, arg, language=language, observer=observer, _depth=depth) for arg in i.args]

    key = observer.generation_key(i, trans, args)
    memoized = observer.generated_value(key)
    if memoized is not None:
        return memoized

    limit = get_settings().max_generation_depth
    if depth >= limit:
        raise TransformationFailureError(
            f"transformation applications nested deeper than {limit} while generating {key}",
            details={"generated": key, "limit": limit},
        )

    with observer.generating(key, trans, args):
        generated = observer.generated_syntax(key)
        if generated is None:
            generated = _run_transformation(key, trans, args)
        gen_env = ModuleEnv.concat(
            ModuleEnv([(f"current-arg-{n}", arg) for n, arg in enumerate(args, start=1)]),
            ModuleEnv([("current-trans", trans)]),
            *(get_model(arg).env for arg in args),
            get_model(trans).env,
        )
        try:
            result = compile_module(gen_env, generated, language=language, observer=observer, _depth=depth + 1)
        except HiddenDependencyError:
            raise
        except UnresolvedImportError as e:
            raise HiddenDependencyError(key, [e.name], [key, *e.chain]) from e
        observer.generated(key, generated, result)

    logger.debug("Generated module compiled", extra={"generated": key, "module_type": result.module_type.value})
    return result


def _run_transformation(key: str, trans: CTrans, args: Sequence[Compiled]) -> ModuleDef:
    try:
        generated = trans.fn([get_model(arg).syntax for arg in args])
    except ModlockError as e:
        raise TransformationFailureError(
            f"transformation failed while generating {key}: {e.message}",
            details={"generated": key, "cause": type(e).__name__, **e.details},
        ) from e
    except Exception as e:
        raise TransformationFailureError(
            f"transformation failed while generating {key}: {e}",
            details={"generated": key, "cause": type(e).__name__},
        ) from e
    if not isinstance(generated, ModuleDef):
        raise TransformationFailureError(
            f"transformation returned a non-module value while generating {key}",
            details={"generated": key, "value": repr(generated)},
        )
    return generated


# === 観測的等価性 ===

_PROBE_MODULES: tuple[ModuleDef, ...] = tuple(
    parse_module(parse_sexpr(text))
    for text in (
        "(module (imports) (model (entity probe ((id number) (name string)))))",
        "(module (imports (p probe)) (base ((v 1) (f (lambda (x) x)))))",
        "(module (imports) (transformation (lambda (m) m)))",
    )
)
_PROBE_STEPS = 20_000
_MAX_PROBE_TUPLES = 16


def _probe_values() -> list[Any]:
    from modlock.lang.values import VList, VNum, VStr

    return [VNum(0), VNum(3), VStr("a"), VList(()), VList((VNum(1), VStr("b", symbol=True)))]


def _observe(call: Any) -> tuple[str, Any]:
    """呼び出し結果を (結果の種類, 値) にする（例外はクラス名で比較）"""
    try:
        return "ok", call()
    except ModlockError as e:
        return "error", type(e).__name__
    except RecursionError:
        return "error", "RecursionError"


def values_equal(a: Any, b: Any, depth: int) -> bool:
    """値の観測的等価性（クロージャは固定の引数で呼び出して比較）"""
    from modlock.lang.evaluator import apply_value, step_budget
    from modlock.lang.values import VClosure, VList

    if isinstance(a, VClosure) or isinstance(b, VClosure):
        if not (isinstance(a, VClosure) and isinstance(b, VClosure)) or a.arity != b.arity:
            return False
        if depth <= 0:
            return True
        lengths = [a.arity] if a.arity is not None else [0, 1, 2]
        for length in lengths:
            probes = itertools.islice(itertools.product(_probe_values(), repeat=length), _MAX_PROBE_TUPLES)
            for args in probes:
                with step_budget(_PROBE_STEPS):
                    left = _observe(lambda: apply_value(a, list(args)))
                with step_budget(_PROBE_STEPS):
                    right = _observe(lambda: apply_value(b, list(args)))
                if left[0] != right[0]:
                    return False
                if left[0] == "error" and left[1] != right[1]:
                    return False
                if left[0] == "ok" and not values_equal(left[1], right[1], depth - 1):
                    return False
        return True
    if isinstance(a, VList) and isinstance(b, VList):
        return len(a.items) == len(b.items) and all(
            values_equal(x, y, depth) for x, y in zip(a.items, b.items)
        )
    return bool(a == b)


def _transformations_equal(a: Transformation, b: Transformation) -> bool:
    from modlock.lang.evaluator import step_budget

    for probe in ([_PROBE_MODULES[0]], [_PROBE_MODULES[1]], [_PROBE_MODULES[2]], list(_PROBE_MODULES[:2])):
        with step_budget(_PROBE_STEPS):
            left = _observe(lambda: a(probe))
        with step_budget(_PROBE_STEPS):
            right = _observe(lambda: b(probe))
        if left != right:
            return False
    return True


def observationally_equal(a: Compiled, b: Compiled, depth: int | None = None) -> bool:
    """コンパイル済みモジュールの観測的等価性

    種類、クロージャの構文、クロージャ環境（再帰的に比較）が等しく、さらに
    CBase は定義値が、CTrans は固定の探査モジュールへの適用結果が等しいときに真です。
    """
    probe_depth = get_settings().probe_depth if depth is None else depth
    seen: set[tuple[int, int]] = set()

    def equal(x: Compiled, y: Compiled) -> bool:
        if x is y:
            return True
        pair = (id(x), id(y))
        if pair in seen:
            return True
        seen.add(pair)
        if type(x) is not type(y) or get_model(x).syntax != get_model(y).syntax:
            return False
        env_x, env_y = get_model(x).env, get_model(y).env
        if env_x.names() != env_y.names():
            return False
        if not all(equal(cx, cy) for (_, cx), (_, cy) in zip(env_x, env_y)):
            return False
        if isinstance(x, CBase) and isinstance(y, CBase):
            return [n for n, _ in x.defs] == [n for n, _ in y.defs] and all(
                values_equal(vx, vy, probe_depth) for (_, vx), (_, vy) in zip(x.defs, y.defs)
            )
        if isinstance(x, CTrans) and isinstance(y, CTrans):
            return _transformations_equal(x.fn, y.fn)
        return isinstance(x, CModel)

    return equal(a, b)
