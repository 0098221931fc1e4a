"""コンパイルサマリーと隠れた依存関係の判定

各モジュールについて、コンパイル中に使用したモジュール名（used）と、
生成に関与したモジュール名（genBy）を記録し、そこから hidden を計算します。

    allowed(mod) = mod.genBy ∪ ⋃{m.used | m ∈ mod.genBy}
    dep_ok(m, mod) = m ∈ allowed(mod) ∨ (m.genBy ≠ ∅ ∧ ∀m' ∈ m.genBy. dep_ok(m', mod))
    hidden(mod) = {m ∈ mod.used | ¬dep_ok(m, mod)}
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from modlock.exceptions import SummaryError, UnknownModuleError
from modlock.sexpr import SExpr, SList, Str, Sym, head_is, print_sexpr, slist

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Summary:
    """1モジュールのコンパイルサマリー

    genBy が空であることと、ユーザーが書いたモジュールであることは同値です。
    """
    module_id: str
    used: frozenset[str] = frozenset()
    gen_by: frozenset[str] = frozenset()

    @property
    def is_generated(self) -> bool:
        return bool(self.gen_by)

    def to_sexpr(self) -> SList:
        """`(summary "name" (used "a" ...) (genby "t" ...))`"""
        return slist(
            Sym("summary"),
            Str(self.module_id),
            SList((Sym("used"), *(Str(name) for name in sorted(self.used)))),
            SList((Sym("genby"), *(Str(name) for name in sorted(self.gen_by)))),
        )

    @classmethod
    def from_sexpr(cls, e: SExpr) -> Summary:
        """to_sexpr の逆

        Raises:
            SummaryError: 形式が正しくない場合
        """
        if not (head_is(e, "summary") and isinstance(e, SList) and len(e) == 4 and isinstance(e.items[1], Str)):
            raise SummaryError(f"malformed summary record: {print_sexpr(e)}")
        return cls(e.items[1].text, _names(e.items[2], "used"), _names(e.items[3], "genby"))


def _names(e: SExpr, tag: str) -> frozenset[str]:
    if not (head_is(e, tag) and isinstance(e, SList)):
        raise SummaryError(f"expected ({tag} ...) in summary record: {print_sexpr(e)}")
    names: set[str] = set()
    for item in e.items[1:]:
        if not isinstance(item, Str):
            raise SummaryError(f"summary names must be strings: {print_sexpr(e)}")
        names.add(item.text)
    return frozenset(names)


@dataclass
class SummaryStore:
    """モジュール名から Summary へのマップ"""
    summaries: dict[str, Summary] = field(default_factory=dict)

    def add(self, summary: Summary) -> None:
        self.summaries[summary.module_id] = summary

    def get(self, name: str) -> Summary:
        try:
            return self.summaries[name]
        except KeyError:
            raise UnknownModuleError(
                f"no compilation summary for module: {name}",
                details={"name": name},
            ) from None

    def discard(self, name: str) -> None:
        self.summaries.pop(name, None)

    def __contains__(self, name: object) -> bool:
        return name in self.summaries

    def __iter__(self) -> Iterator[Summary]:
        return iter(self.summaries.values())

    def __len__(self) -> int:
        return len(self.summaries)

    @classmethod
    def of(cls, summaries: Iterable[Summary]) -> SummaryStore:
        store = cls()
        for summary in summaries:
            store.add(summary)
        return store


def allowed(store: SummaryStore, mod: str) -> frozenset[str]:
    """生成モジュール mod が参照してよいモジュール名

    Raises:
        UnknownModuleError: mod か genBy の要素がストアにない場合
    """
    summary = store.get(mod)
    result = set(summary.gen_by)
    for generator in summary.gen_by:
        result |= store.get(generator).used
    return frozenset(result)


def dep_ok(m: str, mod: str, store: SummaryStore) -> bool:
    """mod から m への依存が許されるかどうか

    genBy をたどる途中で同じモジュールに戻った場合は偽とします。
    """
    permitted = allowed(store, mod)

    def check(name: str, visiting: frozenset[str]) -> bool:
        if name in permitted:
            return True
        if name in visiting:
            return False
        summary = store.get(name)
        if not summary.gen_by:
            return False
        return all(check(generator, visiting | {name}) for generator in summary.gen_by)

    return check(m, frozenset())


def hidden(mod: str, store: SummaryStore) -> frozenset[str]:
    """mod の隠れた依存関係（空でなければエラー）"""
    summary = store.get(mod)
    result = frozenset(m for m in summary.used if not dep_ok(m, mod, store))
    if result:
        logger.debug("Hidden dependencies found", extra={"module_id": mod, "hidden": sorted(result)})
    return result
