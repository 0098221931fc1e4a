"""組み込み関数と定数

initial_env() が返す環境は不変で、trace のログ出力を除いて全ての関数は純粋です。
"""

from __future__ import annotations

import logging
from functools import lru_cache
from typing import Callable, Sequence

from modlock.exceptions import ArityMismatchError, UserRaisedError, ValueTypeError
from modlock.lang.evaluator import apply_value
from modlock.lang.values import (
    FALSE,
    TRUE,
    Env,
    Value,
    VClosure,
    VList,
    VNum,
    VStr,
    boolean,
    format_value,
    is_true,
)
from modlock.sexpr import is_valid_symbol

logger = logging.getLogger(__name__)

_BUILTINS: dict[str, VClosure] = {}


def builtin(name: str, arity: int | None = None) -> Callable[[Callable[..., Value]], Callable[..., Value]]:
    """組み込み関数を登録するデコレーター

    arity が None の関数は引数リストをそのまま受け取ります。
    """
    def register(func: Callable[..., Value]) -> Callable[..., Value]:
        if arity is None:
            fn = func
        else:
            def fn(args: Sequence[Value]) -> Value:
                return func(*args)
        _BUILTINS[name] = VClosure(fn, arity=arity, name=name)
        return func
    return register


# === 型チェック ===

def _type_error(name: str, expected: str, v: Value) -> ValueTypeError:
    return ValueTypeError(
        f"{name}: expected {expected}, got {format_value(v)}",
        details={"function": name, "expected": expected, "value": format_value(v)},
    )


def _num(name: str, v: Value) -> int:
    if not isinstance(v, VNum):
        raise _type_error(name, "a number", v)
    return v.value


def _str(name: str, v: Value) -> str:
    if not isinstance(v, VStr):
        raise _type_error(name, "a string", v)
    return v.text


def _list(name: str, v: Value) -> tuple[Value, ...]:
    if not isinstance(v, VList):
        raise _type_error(name, "a list", v)
    return v.items


def _at_least(name: str, args: Sequence[Value], count: int) -> None:
    if len(args) < count:
        raise ArityMismatchError(
            f"{name} expects at least {count} argument(s), got {len(args)}",
            details={"function": name, "expected": count, "actual": len(args)},
        )


# === 算術・比較 ===

@builtin("+")
def _add(args: Sequence[Value]) -> Value:
    return VNum(sum(_num("+", a) for a in args))


@builtin("*")
def _mul(args: Sequence[Value]) -> Value:
    result = 1
    for a in args:
        result *= _num("*", a)
    return VNum(result)


@builtin("-")
def _sub(args: Sequence[Value]) -> Value:
    _at_least("-", args, 1)
    first = _num("-", args[0])
    if len(args) == 1:
        return VNum(-first)
    return VNum(first - sum(_num("-", a) for a in args[1:]))


@builtin("quotient", 2)
def _quotient(a: Value, b: Value) -> Value:
    divisor = _num("quotient", b)
    if divisor == 0:
        raise ValueTypeError("quotient: division by zero", details={"function": "quotient"})
    dividend = _num("quotient", a)
    q = abs(dividend) // abs(divisor)
    return VNum(q if (dividend >= 0) == (divisor > 0) else -q)


@builtin("remainder", 2)
def _remainder(a: Value, b: Value) -> Value:
    divisor = _num("remainder", b)
    if divisor == 0:
        raise ValueTypeError("remainder: division by zero", details={"function": "remainder"})
    dividend = _num("remainder", a)
    r = abs(dividend) % abs(divisor)
    return VNum(r if dividend >= 0 else -r)


def _comparison(name: str, op: Callable[[int, int], bool]) -> None:
    def compare(args: Sequence[Value]) -> Value:
        _at_least(name, args, 1)
        numbers = [_num(name, a) for a in args]
        return boolean(all(op(x, y) for x, y in zip(numbers, numbers[1:])))
    builtin(name)(compare)


_comparison("=", lambda x, y: x == y)
_comparison("<", lambda x, y: x < y)
_comparison(">", lambda x, y: x > y)
_comparison("<=", lambda x, y: x <= y)
_comparison(">=", lambda x, y: x >= y)


@builtin("equal?", 2)
def _equal(a: Value, b: Value) -> Value:
    return boolean(a == b)


@builtin("not", 1)
def _not(a: Value) -> Value:
    return boolean(not is_true(a))


# === リスト ===

@builtin("car", 1)
def _car(v: Value) -> Value:
    items = _list("car", v)
    if not items:
        raise _type_error("car", "a non-empty list", v)
    return items[0]


@builtin("cdr", 1)
def _cdr(v: Value) -> Value:
    items = _list("cdr", v)
    if not items:
        raise _type_error("cdr", "a non-empty list", v)
    return VList(items[1:])


@builtin("cadr", 1)
def _cadr(v: Value) -> Value:
    items = _list("cadr", v)
    if len(items) < 2:
        raise _type_error("cadr", "a list of two or more elements", v)
    return items[1]


@builtin("caddr", 1)
def _caddr(v: Value) -> Value:
    items = _list("caddr", v)
    if len(items) < 3:
        raise _type_error("caddr", "a list of three or more elements", v)
    return items[2]


@builtin("cons", 2)
def _cons(head: Value, tail: Value) -> Value:
    return VList((head, *_list("cons", tail)))


@builtin("list")
def _make_list(args: Sequence[Value]) -> Value:
    return VList(tuple(args))


@builtin("append")
def _append(args: Sequence[Value]) -> Value:
    items: list[Value] = []
    for a in args:
        items.extend(_list("append", a))
    return VList(tuple(items))


@builtin("length", 1)
def _length(v: Value) -> Value:
    return VNum(len(_list("length", v)))


@builtin("list-ref", 2)
def _list_ref(v: Value, index: Value) -> Value:
    items = _list("list-ref", v)
    i = _num("list-ref", index)
    if not 0 <= i < len(items):
        raise ValueTypeError(
            f"list-ref: index {i} out of range for a list of length {len(items)}",
            details={"function": "list-ref", "index": i},
        )
    return items[i]


@builtin("null?", 1)
def _is_null(v: Value) -> Value:
    return boolean(isinstance(v, VList) and not v.items)


@builtin("list?", 1)
def _is_list(v: Value) -> Value:
    return boolean(isinstance(v, VList))


@builtin("number?", 1)
def _is_number(v: Value) -> Value:
    return boolean(isinstance(v, VNum))


@builtin("string?", 1)
def _is_string(v: Value) -> Value:
    return boolean(isinstance(v, VStr))


@builtin("symbol?", 1)
def _is_symbol(v: Value) -> Value:
    return boolean(isinstance(v, VStr) and v.symbol)


@builtin("procedure?", 1)
def _is_procedure(v: Value) -> Value:
    return boolean(isinstance(v, VClosure))


# === 高階関数 ===

@builtin("map")
def _map(args: Sequence[Value]) -> Value:
    _at_least("map", args, 2)
    fn, lists = args[0], [_list("map", a) for a in args[1:]]
    if len({len(items) for items in lists}) > 1:
        raise ValueTypeError("map: lists differ in length", details={"function": "map"})
    return VList(tuple(apply_value(fn, list(row)) for row in zip(*lists)))


@builtin("concat-map", 2)
def _concat_map(fn: Value, v: Value) -> Value:
    items: list[Value] = []
    for item in _list("concat-map", v):
        items.extend(_list("concat-map", apply_value(fn, [item])))
    return VList(tuple(items))


@builtin("filter", 2)
def _filter(fn: Value, v: Value) -> Value:
    return VList(tuple(item for item in _list("filter", v) if is_true(apply_value(fn, [item]))))


@builtin("foldl", 3)
def _foldl(fn: Value, init: Value, v: Value) -> Value:
    """(foldl f init l): 左から (f 要素 累積値) を畳み込む"""
    acc = init
    for item in _list("foldl", v):
        acc = apply_value(fn, [item, acc])
    return acc


@builtin("apply", 2)
def _apply(fn: Value, v: Value) -> Value:
    return apply_value(fn, list(_list("apply", v)))


# === 文字列・シンボル ===

@builtin("string-append")
def _string_append(args: Sequence[Value]) -> Value:
    return VStr("".join(_str("string-append", a) for a in args))


@builtin("string=?", 2)
def _string_equal(a: Value, b: Value) -> Value:
    return boolean(_str("string=?", a) == _str("string=?", b))


@builtin("string->symbol", 1)
def _string_to_symbol(v: Value) -> Value:
    text = _str("string->symbol", v)
    if not is_valid_symbol(text):
        raise _type_error("string->symbol", "text usable as a symbol", v)
    return VStr(text, symbol=True)


@builtin("symbol->string", 1)
def _symbol_to_string(v: Value) -> Value:
    return VStr(_str("symbol->string", v))


@builtin("number->string", 1)
def _number_to_string(v: Value) -> Value:
    return VStr(str(_num("number->string", v)))


@builtin("error")
def _error(args: Sequence[Value]) -> Value:
    parts = [a.text if isinstance(a, VStr) else format_value(a) for a in args]
    message = " ".join(parts) or "error"
    raise UserRaisedError(message, details={"irritants": [format_value(a) for a in args[1:]]})


@builtin("trace", 2)
def _trace(label: Value, value: Value) -> Value:
    """(trace label v): 呼び出しをログに記録して v をそのまま返す"""
    logger.info("Traced call", extra={"function": format_value(label), "value": format_value(value)})
    return value


# === 実体化モジュールのアクセサ ===

def _reified_module(name: str, v: Value) -> tuple[Value, ...]:
    items = v.items if isinstance(v, VList) else ()
    if not (
        len(items) == 3
        and items[0] == VStr("module")
        and isinstance(items[1], VList)
        and items[1].items[:1] == (VStr("imports"),)
    ):
        raise _type_error(name, "a reified module", v)
    return items


@builtin("get-imports", 1)
def _get_imports(v: Value) -> Value:
    """(ローカル名 インポート式) の2要素リストの並び"""
    imports = _reified_module("get-imports", v)[1]
    assert isinstance(imports, VList)
    return VList(imports.items[1:])


@builtin("get-body", 1)
def _get_body(v: Value) -> Value:
    return _reified_module("get-body", v)[2]


@lru_cache(maxsize=1)
def initial_env() -> Env:
    """組み込み関数と定数 #t / #f を束縛した環境"""
    constants: list[tuple[str, Value]] = [("#t", TRUE), ("#f", FALSE)]
    return Env.of([*constants, *_BUILTINS.items()])
