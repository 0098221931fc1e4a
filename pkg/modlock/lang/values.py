"""カーネル言語の値と環境"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import TYPE_CHECKING, Any, Callable, Iterable, Mapping, Sequence

from modlock.exceptions import UnboundVariableError
from modlock.sexpr import Num, SExpr, SList, Str, Sym, print_sexpr

if TYPE_CHECKING:
    from modlock.lang.syntax import Exp


@dataclass(frozen=True, slots=True)
class VStr:
    """文字列値

    symbol はシンボル由来かどうかの印で、等価比較には使いません。
    実体化されたモジュールを構文に戻すときだけ参照されます。
    """
    text: str
    symbol: bool = field(default=False, compare=False)


@dataclass(frozen=True, slots=True)
class VNum:
    """整数値"""
    value: int


@dataclass(frozen=True, slots=True)
class VList:
    """リスト値"""
    items: tuple[Value, ...] = ()


@dataclass(frozen=True, slots=True)
class LambdaParts:
    """ラムダ式由来のクロージャの中身（末尾呼び出しの最適化に使う）"""
    params: tuple[str, ...]
    rest: str | None
    body: Exp
    env: Env


@dataclass(frozen=True, eq=False)
class VClosure:
    """関数値（値のリストから値への純粋関数）"""
    fn: Callable[[Sequence[Value]], Value]
    arity: int | None = None
    name: str = "lambda"
    parts: LambdaParts | None = None

    def __repr__(self) -> str:
        return f"VClosure({self.name}/{'*' if self.arity is None else self.arity})"


Value = VClosure | VStr | VNum | VList

TRUE = VStr("#t")
FALSE = VStr("#f")


def boolean(flag: bool) -> VStr:
    """Python の真偽値を "#t" / "#f" に変換する"""
    return TRUE if flag else FALSE


def is_true(v: Value) -> bool:
    """"#f" 以外は全て真"""
    return v != FALSE


class Env:
    """名前から値への連想環境

    フレームの並びとして表現し、先頭のフレームが後ろのフレームを隠します。
    """

    __slots__ = ("_frames",)

    def __init__(self, frames: Iterable[Mapping[str, Value]] = ()) -> None:
        self._frames: tuple[Mapping[str, Value], ...] = tuple(frames)

    @classmethod
    def of(cls, bindings: Iterable[tuple[str, Value]]) -> Env:
        """(名前, 値) の列から1フレームの環境を作る（先の束縛を優先）"""
        frame: dict[str, Value] = {}
        for name, value in bindings:
            frame.setdefault(name, value)
        return cls((MappingProxyType(frame),))

    def extend(self, frame: Mapping[str, Value]) -> Env:
        """先頭にフレームを追加した新しい環境"""
        return Env((frame, *self._frames))

    def then(self, other: Env) -> Env:
        """self の後ろに other を連結した環境（self ++ other）"""
        return Env((*self._frames, *other._frames))

    def lookup(self, name: str) -> Value:
        for frame in self._frames:
            if name in frame:
                return frame[name]
        raise UnboundVariableError(f"unbound variable: {name}", details={"name": name})

    def get(self, name: str) -> Value | None:
        for frame in self._frames:
            if name in frame:
                return frame[name]
        return None

    def bindings(self) -> list[tuple[str, Value]]:
        """可視な束縛の一覧（隠された束縛は含まない）"""
        seen: set[str] = set()
        result: list[tuple[str, Value]] = []
        for frame in self._frames:
            for name, value in frame.items():
                if name not in seen:
                    seen.add(name)
                    result.append((name, value))
        return result

    def __contains__(self, name: object) -> bool:
        return any(name in frame for frame in self._frames)


# === S式との変換 ===

def sexpr_to_value(e: SExpr) -> Value:
    """quote の意味: Sym/Str は VStr、Num は VNum、リストは VList"""
    match e:
        case Sym(text):
            return VStr(text, symbol=True)
        case Str(text):
            return VStr(text)
        case Num(value):
            return VNum(value)
        case SList(items):
            return VList(tuple(sexpr_to_value(item) for item in items))
    raise TypeError(f"not an s-expression: {e!r}")


def value_to_sexpr(v: Value) -> SExpr:
    """値をS式に戻す（シンボル印のある VStr は Sym になる）

    Raises:
        ValueError: クロージャ、またはシンボルとして不正な文字列を含む場合
    """
    match v:
        case VStr(text, symbol):
            return Sym(text) if symbol else Str(text)
        case VNum(value):
            return Num(value)
        case VList(items):
            return SList(tuple(value_to_sexpr(item) for item in items))
    raise ValueError(f"value has no s-expression form: {v!r}")


def format_value(v: Any) -> str:
    """デバッグ・エラーメッセージ用の表示"""
    if isinstance(v, VClosure):
        return f"#<procedure {v.name}>"
    if isinstance(v, VList):
        return "(" + " ".join(format_value(item) for item in v.items) + ")"
    if isinstance(v, (VStr, VNum)):
        try:
            return print_sexpr(value_to_sexpr(v))
        except ValueError:
            return repr(v.text) if isinstance(v, VStr) else str(v)
    return repr(v)
