"""カーネル言語の評価器

値呼びの標準的な評価器です。ラムダ由来のクロージャへの末尾呼び出しはループで処理し、
評価ステップ数は contextvars で管理する上限で打ち切ります。
"""

from __future__ import annotations

import logging
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from typing import Iterator, Sequence

from modlock.config import get_settings
from modlock.exceptions import (
    ArityMismatchError,
    EvaluationError,
    NotAFunctionError,
    SpliceError,
    StepBudgetExceededError,
)
from modlock.lang.syntax import App, Exp, If, Lambda, Let, LitNum, LitStr, Quasiquote, Quote, Var, parse_exp
from modlock.lang.values import (
    Env,
    LambdaParts,
    Value,
    VClosure,
    VList,
    VNum,
    VStr,
    format_value,
    is_true,
    sexpr_to_value,
)
from modlock.sexpr import SExpr, SList, head_is, print_sexpr

logger = logging.getLogger(__name__)


@dataclass
class StepBudget:
    """残り評価ステップ数"""
    limit: int
    remaining: int

    def tick(self) -> None:
        self.remaining -= 1
        if self.remaining < 0:
            raise StepBudgetExceededError(
                f"evaluation exceeded the step budget of {self.limit}",
                details={"limit": self.limit},
            )


_BUDGET: ContextVar[StepBudget | None] = ContextVar("modlock_step_budget", default=None)


@contextmanager
def step_budget(limit: int | None = None) -> Iterator[StepBudget]:
    """新しいステップ上限の下で評価する

    Args:
        limit: 上限（省略時は設定の step_budget）
    """
    steps = get_settings().step_budget if limit is None else limit
    budget = StepBudget(steps, steps)
    token = _BUDGET.set(budget)
    try:
        yield budget
    finally:
        _BUDGET.reset(token)


def evaluate(env: Env, exp: Exp) -> Value:
    """式を環境の下で評価する

    有効なステップ上限がなければ、この呼び出し専用の上限を設定します。

    Raises:
        UnboundVariableError: 未束縛変数
        NotAFunctionError: 関数でない値の適用
        ArityMismatchError: 引数の個数不一致
        ValueTypeError: 組み込み関数への不正な引数
        SpliceError: unquote-splicing の結果がリストでない
        StepBudgetExceededError: ステップ上限の超過
    """
    budget = _BUDGET.get()
    if budget is None:
        with step_budget() as fresh:
            return _guarded(env, exp, fresh)
    return _guarded(env, exp, budget)


def _guarded(env: Env, exp: Exp, budget: StepBudget) -> Value:
    try:
        return _eval(env, exp, budget)
    except RecursionError as e:
        raise EvaluationError("evaluation nested too deeply", details={"cause": "RecursionError"}) from e


def apply_value(fn: Value, args: Sequence[Value]) -> Value:
    """値を関数として適用する"""
    if not isinstance(fn, VClosure):
        raise NotAFunctionError(
            f"not a function: {format_value(fn)}",
            details={"value": format_value(fn)},
        )
    if fn.arity is not None and len(args) != fn.arity:
        raise ArityMismatchError(
            f"{fn.name} expects {fn.arity} argument(s), got {len(args)}",
            details={"function": fn.name, "expected": fn.arity, "actual": len(args)},
        )
    return fn.fn(args)


def make_closure(lam: Lambda, env: Env, name: str = "lambda") -> VClosure:
    """ラムダ式と環境からクロージャを作る"""
    parts = LambdaParts(lam.params, lam.rest, lam.body, env)

    def call(args: Sequence[Value]) -> Value:
        return evaluate(bind_arguments(parts, args, name), parts.body)

    return VClosure(call, arity=None if lam.rest else len(lam.params), name=name, parts=parts)


def bind_arguments(parts: LambdaParts, args: Sequence[Value], name: str = "lambda") -> Env:
    """仮引数を束縛した環境を作る"""
    count = len(parts.params)
    if len(args) < count or (parts.rest is None and len(args) != count):
        raise ArityMismatchError(
            f"{name} expects {count}{'+' if parts.rest else ''} argument(s), got {len(args)}",
            details={"function": name, "expected": count, "actual": len(args)},
        )
    frame: dict[str, Value] = dict(zip(parts.params, args))
    if parts.rest is not None:
        frame[parts.rest] = VList(tuple(args[count:]))
    return parts.env.extend(frame)


def _eval(env: Env, exp: Exp, budget: StepBudget) -> Value:
    while True:
        budget.tick()
        match exp:
            case Var(name):
                return env.lookup(name)
            case LitNum(value):
                return VNum(value)
            case LitStr(text):
                return VStr(text)
            case Quote(datum):
                return sexpr_to_value(datum)
            case Quasiquote(datum):
                if head_is(datum, "unquote-splicing"):
                    raise SpliceError(f"unquote-splicing outside of a list: {print_sexpr(datum)}")
                return _expand_template(env, datum, budget)
            case Lambda():
                return make_closure(exp, env)
            case If(cond, then, otherwise):
                exp = then if is_true(_eval(env, cond, budget)) else otherwise
            case Let(bindings, body):
                frame = {name: _eval(env, bound, budget) for name, bound in bindings}
                env = env.extend(frame)
                exp = body
            case App(fn_exp, arg_exps):
                fn = _eval(env, fn_exp, budget)
                args = [_eval(env, arg, budget) for arg in arg_exps]
                if isinstance(fn, VClosure) and fn.parts is not None:
                    # 末尾位置の呼び出しはフレームを積まずに続行
                    env = bind_arguments(fn.parts, args, fn.name)
                    exp = fn.parts.body
                else:
                    return apply_value(fn, args)
            case _:
                raise EvaluationError(f"unknown expression: {exp!r}")


def _expand_template(env: Env, datum: SExpr, budget: StepBudget) -> Value:
    if not isinstance(datum, SList):
        return sexpr_to_value(datum)
    if head_is(datum, "unquote"):
        return _eval(env, parse_exp(datum.items[1]), budget)
    items: list[Value] = []
    for item in datum.items:
        if head_is(item, "unquote-splicing"):
            assert isinstance(item, SList)
            spliced = _eval(env, parse_exp(item.items[1]), budget)
            if not isinstance(spliced, VList):
                raise SpliceError(
                    f"unquote-splicing expects a list, got {format_value(spliced)}",
                    details={"form": print_sexpr(item), "value": format_value(spliced)},
                )
            items.extend(spliced.items)
        else:
            items.append(_expand_template(env, item, budget))
    return VList(tuple(items))
