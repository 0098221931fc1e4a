"""カーネル言語の式構文

S式を Exp に変換します。特殊形式は lambda / if / let / quote / quasiquote のみで、
それ以外のリストは全て関数適用です。
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from modlock.exceptions import ExpSyntaxError
from modlock.sexpr import Num, SExpr, SList, Str, Sym, head_is, print_sexpr, slist


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class LitNum:
    value: int


@dataclass(frozen=True, slots=True)
class LitStr:
    text: str


@dataclass(frozen=True, slots=True)
class Lambda:
    """ラムダ式（rest があれば残りの引数をリストで受け取る）"""
    params: tuple[str, ...]
    body: Exp
    rest: str | None = None


@dataclass(frozen=True, slots=True)
class App:
    fn: Exp
    args: tuple[Exp, ...]


@dataclass(frozen=True, slots=True)
class If:
    cond: Exp
    then: Exp
    otherwise: Exp


@dataclass(frozen=True, slots=True)
class Let:
    bindings: tuple[tuple[str, Exp], ...]
    body: Exp


@dataclass(frozen=True, slots=True)
class Quote:
    datum: SExpr


@dataclass(frozen=True, slots=True)
class Quasiquote:
    datum: SExpr


Exp = Var | LitNum | LitStr | Lambda | App | If | Let | Quote | Quasiquote

SPECIAL_FORMS = frozenset({"lambda", "if", "let", "quote", "quasiquote"})


def _fail(message: str, e: SExpr) -> ExpSyntaxError:
    return ExpSyntaxError(f"{message}: {print_sexpr(e)}", details={"form": print_sexpr(e)})


def _symbol_name(e: SExpr, context: SExpr) -> str:
    if not isinstance(e, Sym):
        raise _fail("expected an identifier", context)
    return e.text


def _parse_params(spec: SExpr, form: SExpr) -> tuple[tuple[str, ...], str | None]:
    if isinstance(spec, Sym):
        return (), spec.text
    if not isinstance(spec, SList):
        raise _fail("malformed parameter list", form)
    params = tuple(_symbol_name(p, form) for p in spec.items)
    if len(set(params)) != len(params):
        raise _fail("duplicate parameter", form)
    return params, None


def _check_template(datum: SExpr, form: SExpr) -> None:
    """テンプレート内の unquote を検証し、ネストした quasiquote を拒否する"""
    if not isinstance(datum, SList):
        return
    if head_is(datum, "quasiquote"):
        raise _fail("nested quasiquote is not supported", form)
    if head_is(datum, "unquote") or head_is(datum, "unquote-splicing"):
        if len(datum) != 2:
            raise _fail("unquote takes exactly one expression", form)
        parse_exp(datum.items[1])
        return
    for item in datum.items:
        _check_template(item, form)


@lru_cache(maxsize=4096)
def parse_exp(e: SExpr) -> Exp:
    """S式を式に変換する

    Raises:
        ExpSyntaxError: 特殊形式の誤り、ネストした quasiquote、重複した引数名
    """
    match e:
        case Sym(text):
            return Var(text)
        case Num(value):
            return LitNum(value)
        case Str(text):
            return LitStr(text)
        case SList(()):
            raise _fail("empty application", e)
    assert isinstance(e, SList)
    head = e.items[0]
    if isinstance(head, Sym) and head.text in SPECIAL_FORMS:
        return _parse_special(head.text, e)
    return App(parse_exp(head), tuple(parse_exp(arg) for arg in e.items[1:]))


def _parse_special(keyword: str, e: SList) -> Exp:
    items = e.items
    if keyword == "lambda":
        if len(items) != 3:
            raise _fail("lambda takes a parameter list and one body", e)
        params, rest = _parse_params(items[1], e)
        return Lambda(params, parse_exp(items[2]), rest)
    if keyword == "if":
        if len(items) != 4:
            raise _fail("if takes exactly three expressions", e)
        return If(parse_exp(items[1]), parse_exp(items[2]), parse_exp(items[3]))
    if keyword == "let":
        if len(items) != 3 or not isinstance(items[1], SList):
            raise _fail("malformed let", e)
        bindings: list[tuple[str, Exp]] = []
        for binding in items[1].items:
            if not (isinstance(binding, SList) and len(binding) == 2):
                raise _fail("malformed let binding", e)
            bindings.append((_symbol_name(binding.items[0], e), parse_exp(binding.items[1])))
        names = [name for name, _ in bindings]
        if len(set(names)) != len(names):
            raise _fail("duplicate let binding", e)
        return Let(tuple(bindings), parse_exp(items[2]))
    if len(items) != 2:
        raise _fail(f"{keyword} takes exactly one datum", e)
    if keyword == "quote":
        return Quote(items[1])
    _check_template(items[1], e)
    return Quasiquote(items[1])


# === define 糖衣 ===

def normalize_definitions(forms: tuple[SExpr, ...]) -> list[tuple[str, SExpr]]:
    """`(define x e)` / `(define (f p...) e)` の並びを (名前, 式) の並びにする"""
    result: list[tuple[str, SExpr]] = []
    for form in forms:
        if not (head_is(form, "define") and len(form) == 3):
            raise _fail("expected (define name exp) or (define (name params...) exp)", form)
        assert isinstance(form, SList)
        target, exp = form.items[1], form.items[2]
        if isinstance(target, Sym):
            result.append((target.text, exp))
        elif isinstance(target, SList) and target.items and isinstance(target.items[0], Sym):
            params = SList(target.items[1:])
            result.append((target.items[0].text, slist(Sym("lambda"), params, exp)))
        else:
            raise _fail("malformed define", form)
    return result


def normalize_base(body: SExpr) -> list[tuple[str, SExpr]]:
    """ベース本体を (名前, 式) の並びに正規化する

    `(base ((name exp)...))` と `(base (define ...)...)` の両方を受け付けます。
    """
    if not (head_is(body, "base") and isinstance(body, SList) and len(body) >= 2):
        raise _fail("expected a base body", body)
    rest = body.items[1:]
    if all(head_is(form, "define") for form in rest):
        return normalize_definitions(rest)
    if len(rest) != 1 or not isinstance(rest[0], SList):
        raise _fail("expected (base ((name exp) ...))", body)
    result: list[tuple[str, SExpr]] = []
    for definition in rest[0].items:
        if not (isinstance(definition, SList) and len(definition) == 2 and isinstance(definition.items[0], Sym)):
            raise _fail("malformed definition", definition)
        result.append((definition.items[0].text, definition.items[1]))
    return result
