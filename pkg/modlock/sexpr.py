"""S式の読み取りと出力

モジュール本体・モデル・実体化されたモジュールを運ぶ唯一のデータ形式。
ファイル、キャッシュ、CLI の expand 出力はすべてこの形式を使います。
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from modlock.exceptions import SExprSyntaxError

_INTEGER = re.compile(r"[+-]?[0-9]+")
_FORBIDDEN_IN_SYMBOL = frozenset(" \t\r\n\f\v()\";")
_SUGAR_PREFIXES = {
    "'": "quote",
    "`": "quasiquote",
    ",": "unquote",
    ",@": "unquote-splicing",
}
_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}


def is_valid_symbol(text: str) -> bool:
    """シンボルとして読み戻せる文字列かどうか"""
    if not text or text[0] in "'`,":
        return False
    if any(ch in _FORBIDDEN_IN_SYMBOL or ch.isspace() for ch in text):
        return False
    return not _looks_numeric(text)


def _looks_numeric(text: str) -> bool:
    if text[0].isdigit():
        return True
    return len(text) > 1 and text[0] in "+-" and text[1].isdigit()


@dataclass(frozen=True, slots=True)
class Sym:
    """識別子アトム"""
    text: str

    def __post_init__(self) -> None:
        if not is_valid_symbol(self.text):
            raise ValueError(f"invalid symbol text: {self.text!r}")


@dataclass(frozen=True, slots=True)
class Str:
    """文字列リテラルアトム"""
    text: str


@dataclass(frozen=True, slots=True)
class Num:
    """整数アトム（小数は存在しない）"""
    value: int


@dataclass(frozen=True, slots=True)
class SList:
    """S式のリスト"""
    items: tuple[SExpr, ...] = ()

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[SExpr]:
        return iter(self.items)

    def __getitem__(self, index: int) -> SExpr:
        return self.items[index]


SExpr = Sym | Str | Num | SList


def slist(*items: SExpr) -> SList:
    """可変長引数から SList を組み立てる"""
    return SList(tuple(items))


def head_is(e: SExpr, symbol: str) -> bool:
    """リストの先頭が指定シンボルかどうか"""
    return isinstance(e, SList) and len(e.items) > 0 and e.items[0] == Sym(symbol)


# === 読み取り ===

class _Reader:
    """位置情報付きの再帰下降リーダー"""

    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0
        self.line = 1
        self.column = 1

    def error(self, message: str) -> SExprSyntaxError:
        return SExprSyntaxError(message, self.line, self.column)

    def _advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.column = 1
        else:
            self.column += 1
        return ch

    def _peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_blank(self) -> None:
        while self.pos < len(self.text):
            ch = self._peek()
            if ch == ";":
                while self.pos < len(self.text) and self._peek() != "\n":
                    self._advance()
            elif ch.isspace():
                self._advance()
            else:
                return

    def at_end(self) -> bool:
        self.skip_blank()
        return self.pos >= len(self.text)

    def read(self) -> SExpr:
        self.skip_blank()
        if self.pos >= len(self.text):
            raise self.error("unexpected end of input")
        ch = self._peek()
        if ch == "(":
            return self._read_list()
        if ch == ")":
            raise self.error("unexpected ')'")
        if ch == '"':
            return self._read_string()
        if ch in "'`,":
            return self._read_sugar()
        return self._read_atom()

    def _read_list(self) -> SList:
        open_line, open_column = self.line, self.column
        self._advance()
        items: list[SExpr] = []
        while True:
            self.skip_blank()
            if self.pos >= len(self.text):
                raise SExprSyntaxError("unbalanced '('", open_line, open_column)
            if self._peek() == ")":
                self._advance()
                return SList(tuple(items))
            items.append(self.read())

    def _read_string(self) -> Str:
        start_line, start_column = self.line, self.column
        self._advance()
        chars: list[str] = []
        while True:
            if self.pos >= len(self.text):
                raise SExprSyntaxError("unterminated string", start_line, start_column)
            ch = self._advance()
            if ch == '"':
                return Str("".join(chars))
            if ch == "\\":
                if self.pos >= len(self.text):
                    raise SExprSyntaxError("unterminated string", start_line, start_column)
                escaped = self._advance()
                if escaped not in _ESCAPES:
                    raise self.error(f"unknown escape '\\{escaped}'")
                chars.append(_ESCAPES[escaped])
            else:
                chars.append(ch)

    def _read_sugar(self) -> SList:
        prefix = self._advance()
        if prefix == "," and self._peek() == "@":
            self._advance()
            prefix = ",@"
        self.skip_blank()
        if self.pos >= len(self.text) or self._peek() == ")":
            raise self.error(f"'{prefix}' must be followed by an expression")
        return slist(Sym(_SUGAR_PREFIXES[prefix]), self.read())

    def _read_atom(self) -> Sym | Num:
        line, column = self.line, self.column
        chars: list[str] = []
        while self.pos < len(self.text):
            ch = self._peek()
            if ch in _FORBIDDEN_IN_SYMBOL or ch.isspace():
                break
            chars.append(self._advance())
        token = "".join(chars)
        if _INTEGER.fullmatch(token):
            return Num(int(token))
        if _looks_numeric(token):
            raise SExprSyntaxError(f"invalid number '{token}'", line, column)
        return Sym(token)


def parse_sexpr(text: str) -> SExpr:
    """ちょうど1つのトップレベルS式を読み取る

    Args:
        text: UTF-8 文書（空白と `;` コメントを含んでよい）

    Returns:
        読み取った木（quote 系の略記は展開済み）

    Raises:
        SExprSyntaxError: 括弧の不整合、未終端文字列、空入力、余分な入力
    """
    reader = _Reader(text)
    if reader.at_end():
        raise reader.error("empty input")
    result = reader.read()
    if not reader.at_end():
        raise reader.error("trailing input after expression")
    return result


def parse_sexprs(text: str) -> list[SExpr]:
    """0個以上のトップレベルS式を読み取る（キャッシュレコード用）"""
    reader = _Reader(text)
    results: list[SExpr] = []
    while not reader.at_end():
        results.append(reader.read())
    return results


# === 出力 ===

def _quote_string(text: str) -> str:
    escaped = (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\t", "\\t")
    )
    return f'"{escaped}"'


def print_sexpr(e: SExpr) -> str:
    """正規の1行形式で出力する

    parse_sexpr(print_sexpr(e)) == e が常に成り立ちます。
    """
    match e:
        case Sym(text):
            return text
        case Str(text):
            return _quote_string(text)
        case Num(value):
            return str(value)
        case SList(items):
            return "(" + " ".join(print_sexpr(item) for item in items) + ")"
    raise TypeError(f"not an s-expression: {e!r}")
