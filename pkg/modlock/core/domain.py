"""モジュールの意味ドメイン

コンパイル済みモジュール（Compiled）、モデルクロージャ、モジュール環境を定義します。
全ての値は構築後に不変です。
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterable, Iterator, Sequence

from modlock.core.syntax import ModuleDef, ModuleType


class ModuleEnv:
    """名前から Compiled への連想リスト

    同じ名前が複数あるときは先に現れた束縛が優先されます（連結時は左側が右側を隠す）。
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Iterable[tuple[str, Compiled]] = ()) -> None:
        self._entries: tuple[tuple[str, Compiled], ...] = tuple(entries)

    @classmethod
    def concat(cls, *envs: ModuleEnv) -> ModuleEnv:
        """環境を連結する（常に素の ModuleEnv を返す）"""
        entries: list[tuple[str, Compiled]] = []
        for env in envs:
            entries.extend(env.entries())
        return ModuleEnv(entries)

    def lookup(self, name: str) -> Compiled | None:
        """名前を引く（見つからなければ None）"""
        for bound, value in self._entries:
            if bound == name:
                return value
        return None

    def entries(self) -> tuple[tuple[str, Compiled], ...]:
        return self._entries

    def names(self) -> list[str]:
        return [name for name, _ in self._entries]

    def without(self, name: str) -> ModuleEnv:
        """名前の全束縛を取り除いた環境"""
        return ModuleEnv((n, c) for n, c in self._entries if n != name)

    def __contains__(self, name: object) -> bool:
        return any(bound == name for bound, _ in self._entries)

    def __iter__(self) -> Iterator[tuple[str, Compiled]]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self) -> str:
        return f"ModuleEnv({self.names()!r})"


@dataclass(frozen=True, eq=False)
class ModelClosure:
    """モジュールの構文と、それがコンパイルされた環境の組

    env は syntax.imports のローカル名をちょうど束縛します。
    """
    syntax: ModuleDef
    env: ModuleEnv


# 変換関数: 構文モジュールのリストから構文モジュールへ
Transformation = Callable[[Sequence[ModuleDef]], ModuleDef]


@dataclass(frozen=True, eq=False)
class CBase:
    """ベースモジュール（定義名と値の順序付きリスト）"""
    model: ModelClosure
    defs: tuple[tuple[str, Any], ...]

    @property
    def module_type(self) -> ModuleType:
        return ModuleType.TBASE

    def definition(self, name: str) -> Any:
        """定義名から値を取得（なければ KeyError）"""
        for bound, value in self.defs:
            if bound == name:
                return value
        raise KeyError(name)


@dataclass(frozen=True, eq=False)
class CTrans:
    """変換モジュール"""
    model: ModelClosure
    fn: Transformation

    @property
    def module_type(self) -> ModuleType:
        return ModuleType.TTRANS


@dataclass(frozen=True, eq=False)
class CModel:
    """純粋なモデル"""
    model: ModelClosure

    @property
    def module_type(self) -> ModuleType:
        return ModuleType.TMODEL


Compiled = CBase | CTrans | CModel


def get_model(c: Compiled) -> ModelClosure:
    """どの種類の Compiled からもモデルクロージャを取り出す"""
    return c.model
