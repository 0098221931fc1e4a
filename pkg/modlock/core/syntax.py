"""モジュールの構文ドメイン

ModuleDef / ImportExpr / ModuleType と、S式との相互変換、宣言済み依存 deps を定義します。
モジュール自身は名前を持たず、名前はワークスペース（ファイルパス）が外部から与えます。
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from modlock.exceptions import MalformedBodyError, MalformedModuleError
from modlock.sexpr import SExpr, SList, Sym, print_sexpr, slist


class ModuleType(str, Enum):
    """モジュールの種類"""
    TBASE = "base"
    TTRANS = "transformation"
    TMODEL = "model"


@dataclass(frozen=True, slots=True)
class Simple:
    """名前によるインポート（ドット区切り）"""
    name: str


@dataclass(frozen=True, slots=True)
class Apply:
    """変換適用インポート target(args...)"""
    target: ImportExpr
    args: tuple[ImportExpr, ...]

    def __post_init__(self) -> None:
        if not self.args:
            raise ValueError("Apply needs at least one argument")


ImportExpr = Simple | Apply


@dataclass(frozen=True, slots=True)
class ModuleDef:
    """モジュールの構文

    imports はローカル名とインポート式の順序付きリスト、body は本体のS式です。
    """
    imports: tuple[tuple[str, ImportExpr], ...]
    body: SExpr

    def local_names(self) -> list[str]:
        return [local for local, _ in self.imports]


def type_of(body: SExpr) -> ModuleType:
    """本体の形からモジュール種別を判定する

    Raises:
        MalformedBodyError: model / transformation / base のいずれでもない場合
    """
    if isinstance(body, SList) and body.items and isinstance(body.items[0], Sym):
        head = body.items[0].text
        if head == "model" and len(body) == 2:
            return ModuleType.TMODEL
        # 変換本体の後ろにはヘルパー定義 (define ...) を並べられる
        if head == "transformation" and len(body) >= 2:
            return ModuleType.TTRANS
        if head == "base" and len(body) >= 2 and isinstance(body.items[1], SList):
            return ModuleType.TBASE
    raise MalformedBodyError(
        f"unrecognized module body: {print_sexpr(body)}",
        details={"body": print_sexpr(body)},
    )


# === インポート式 ===

def import_from_sexpr(e: SExpr) -> ImportExpr:
    """S式のインポート式を ImportExpr に変換する

    シンボルは Simple、リストは先頭が対象・残りが引数の Apply になります。
    名前に `,` は使えません（生成モジュールのキーの区切り文字）。
    """
    if isinstance(e, Sym) and "," not in e.text:
        return Simple(e.text)
    if isinstance(e, SList) and len(e) >= 2:
        return Apply(import_from_sexpr(e.items[0]), tuple(import_from_sexpr(a) for a in e.items[1:]))
    raise MalformedModuleError(
        f"malformed import expression: {print_sexpr(e)}",
        details={"import": print_sexpr(e)},
    )


def import_to_sexpr(imp: ImportExpr) -> SExpr:
    """ImportExpr をS式に戻す"""
    match imp:
        case Simple(name):
            return Sym(name)
        case Apply(target, args):
            return SList((import_to_sexpr(target), *(import_to_sexpr(a) for a in args)))
    raise TypeError(f"not an import expression: {imp!r}")


def format_import(imp: ImportExpr) -> str:
    """`t(a,b)` 形式の文字列にする（生成モジュールのキーにも使う）"""
    match imp:
        case Simple(name):
            return name
        case Apply(target, args):
            return f"{format_import(target)}({','.join(format_import(a) for a in args)})"
    raise TypeError(f"not an import expression: {imp!r}")


_IMPORT_TOKEN = re.compile(r"\s*(?:([(),])|([^\s(),]+))")


def parse_import_text(text: str) -> ImportExpr:
    """`name` / `t(a,b)` / `t(u)(a)` 形式の文字列を ImportExpr に変換する

    Raises:
        MalformedModuleError: 構文が正しくない場合
    """
    tokens: list[str] = []
    pos = 0
    stripped = text.rstrip()
    while pos < len(stripped):
        match = _IMPORT_TOKEN.match(stripped, pos)
        if match is None:
            raise MalformedModuleError(f"malformed import expression: {text!r}")
        tokens.append(match.group(1) or match.group(2))
        pos = match.end()

    index = 0

    def fail(message: str) -> MalformedModuleError:
        return MalformedModuleError(f"{message} in import expression {text!r}", details={"import": text})

    def parse_expr() -> ImportExpr:
        nonlocal index
        if index >= len(tokens) or tokens[index] in "(),":
            raise fail("expected a module name")
        result: ImportExpr = Simple(tokens[index])
        index += 1
        while index < len(tokens) and tokens[index] == "(":
            index += 1
            args = [parse_expr()]
            while index < len(tokens) and tokens[index] == ",":
                index += 1
                args.append(parse_expr())
            if index >= len(tokens) or tokens[index] != ")":
                raise fail("expected ')'")
            index += 1
            result = Apply(result, tuple(args))
        return result

    expr = parse_expr()
    if index != len(tokens):
        raise fail("unexpected trailing input")
    return expr


# === モジュール ===

def default_local_name(imp: ImportExpr) -> str:
    """ローカル名省略時の既定名（Simple の最後のドット区切り要素）"""
    if isinstance(imp, Simple):
        return imp.name.rsplit(".", 1)[-1]
    raise MalformedModuleError(
        f"transformation application {format_import(imp)} needs an explicit local name",
        details={"import": format_import(imp)},
    )


def parse_module(e: SExpr) -> ModuleDef:
    """`(module (imports i1 ... in) body)` を ModuleDef に変換する

    各 ij は `(localName impSExpr)` か、ローカル名を省略した裸のシンボルです。

    Raises:
        MalformedModuleError: 形が正しくない、ローカル名の重複、既定名の衝突など
        MalformedBodyError: 本体が認識できない場合
    """
    if not (isinstance(e, SList) and len(e) == 3 and e.items[0] == Sym("module")):
        raise MalformedModuleError(
            "expected (module (imports ...) body)",
            details={"module": print_sexpr(e)},
        )
    _, import_list, body = e.items
    if not (isinstance(import_list, SList) and import_list.items and import_list.items[0] == Sym("imports")):
        raise MalformedModuleError(
            "expected (imports ...) as the first module component",
            details={"imports": print_sexpr(import_list)},
        )

    imports: list[tuple[str, ImportExpr]] = []
    explicit: set[str] = set()
    defaulted: dict[str, str] = {}
    for entry in import_list.items[1:]:
        if isinstance(entry, Sym):
            imp = import_from_sexpr(entry)
            local = default_local_name(imp)
            if local in explicit or local in defaulted:
                raise MalformedModuleError(
                    f"default local name '{local}' of {entry.text} clashes with another import",
                    details={"local": local},
                )
            defaulted[local] = entry.text
        elif isinstance(entry, SList) and len(entry) == 2 and isinstance(entry.items[0], Sym):
            local = entry.items[0].text
            imp = import_from_sexpr(entry.items[1])
            if local in explicit:
                raise MalformedModuleError(f"duplicate local name '{local}'", details={"local": local})
            if local in defaulted:
                raise MalformedModuleError(
                    f"local name '{local}' clashes with the default name of {defaulted[local]}",
                    details={"local": local},
                )
            explicit.add(local)
        elif isinstance(entry, SList):
            raise MalformedModuleError(
                f"transformation application {print_sexpr(entry)} needs an explicit local name",
                details={"entry": print_sexpr(entry)},
            )
        else:
            raise MalformedModuleError(
                f"malformed import entry: {print_sexpr(entry)}",
                details={"entry": print_sexpr(entry)},
            )
        imports.append((local, imp))

    type_of(body)
    return ModuleDef(tuple(imports), body)


def module_to_sexpr(m: ModuleDef) -> SList:
    """ModuleDef を明示的なローカル名付きの表層形式に戻す"""
    entries = [slist(Sym(local), import_to_sexpr(imp)) for local, imp in m.imports]
    return slist(Sym("module"), SList((Sym("imports"), *entries)), m.body)


# === 宣言済み依存 ===

def deps_imp(i: ImportExpr) -> list[str]:
    """インポート式が参照するモジュール名（出現順、重複あり）"""
    match i:
        case Simple(name):
            return [name]
        case Apply(target, args):
            result = deps_imp(target)
            for arg in args:
                result.extend(deps_imp(arg))
            return result
    raise TypeError(f"not an import expression: {i!r}")


def deps(m: ModuleDef) -> list[str]:
    """モジュールの宣言済み依存（全インポートの deps_imp を連結）"""
    result: list[str] = []
    for _, imp in m.imports:
        result.extend(deps_imp(imp))
    return result
