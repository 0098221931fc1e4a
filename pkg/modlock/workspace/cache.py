"""コンパイルキャッシュの永続化

`<root>/.modcache/` にモジュールごとに1つの s 式レコードを保存します。
クロージャは保存せず、構文・サマリー・ソースのハッシュだけを持ちます。
ディレクトリを削除しても再コンパイルが増えるだけです。
"""

from __future__ import annotations

import hashlib
import logging
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

from modlock.core.syntax import ModuleDef, module_to_sexpr, parse_module
from modlock.exceptions import ModlockError, WorkspaceError
from modlock.sexpr import SExpr, SList, Str, Sym, head_is, parse_sexpr, print_sexpr, slist
from modlock.summaries import Summary

logger = logging.getLogger(__name__)

EntryKind = Literal["source", "generated"]


def content_hash(text: str) -> str:
    """ソーステキストの SHA-256（16進）"""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class CacheEntry:
    """1モジュール分のキャッシュレコード"""
    name: str
    kind: EntryKind
    syntax: ModuleDef
    summary: Summary
    source_hash: str = ""

    def to_sexpr(self) -> SList:
        return slist(
            Sym("entry"),
            Str(self.name),
            slist(Sym("kind"), Sym(self.kind)),
            slist(Sym("hash"), Str(self.source_hash)),
            slist(Sym("syntax"), module_to_sexpr(self.syntax)),
            self.summary.to_sexpr(),
        )

    @classmethod
    def from_sexpr(cls, e: SExpr) -> CacheEntry:
        """to_sexpr の逆

        Raises:
            WorkspaceError: レコードの形式が正しくない場合
        """
        if not (head_is(e, "entry") and isinstance(e, SList) and len(e) == 6 and isinstance(e.items[1], Str)):
            raise WorkspaceError(f"malformed cache entry: {print_sexpr(e)[:120]}")
        _, name, kind, source_hash, syntax, summary = e.items
        assert isinstance(name, Str)
        if not (head_is(kind, "kind") and isinstance(kind, SList) and kind.items[1:] in ((Sym("source"),), (Sym("generated"),))):
            raise WorkspaceError(f"malformed cache entry kind for {name.text}")
        if not (head_is(source_hash, "hash") and isinstance(source_hash, SList) and len(source_hash) == 2 and isinstance(source_hash.items[1], Str)):
            raise WorkspaceError(f"malformed cache entry hash for {name.text}")
        if not (head_is(syntax, "syntax") and isinstance(syntax, SList) and len(syntax) == 2):
            raise WorkspaceError(f"malformed cache entry syntax for {name.text}")
        kind_symbol = kind.items[1]
        assert isinstance(kind_symbol, Sym)
        parsed_summary = Summary.from_sexpr(summary)
        if parsed_summary.module_id != name.text:
            raise WorkspaceError(f"cache entry {name.text} carries the summary of {parsed_summary.module_id}")
        return cls(
            name=name.text,
            kind="source" if kind_symbol.text == "source" else "generated",
            syntax=parse_module(syntax.items[1]),
            summary=parsed_summary,
            source_hash=source_hash.items[1].text,
        )


class ModuleCache:
    """キャッシュディレクトリへの読み書き"""

    SUFFIX = ".sexpr"

    def __init__(self, directory: Path) -> None:
        self.directory = directory

    def path_for(self, name: str) -> Path:
        """モジュール名（生成キーを含む）からファイル名を決める"""
        digest = hashlib.sha256(name.encode("utf-8")).hexdigest()[:32]
        return self.directory / f"{digest}{self.SUFFIX}"

    def save(self, entry: CacheEntry) -> None:
        """レコードを一時ファイル経由で置き換える"""
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp-", suffix=self.SUFFIX)
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as f:
                    f.write(print_sexpr(entry.to_sexpr()))
                    f.write("\n")
                os.replace(tmp, self.path_for(entry.name))
            except BaseException:
                Path(tmp).unlink(missing_ok=True)
                raise
        except OSError as e:
            logger.warning("Failed to write cache entry", extra={"module_id": entry.name, "error": str(e)})

    def remove(self, name: str) -> None:
        self.path_for(name).unlink(missing_ok=True)

    def load_all(self) -> dict[str, CacheEntry]:
        """全レコードを読み込む（壊れたレコードは警告して読み飛ばす）"""
        entries: dict[str, CacheEntry] = {}
        if not self.directory.is_dir():
            return entries
        for path in sorted(self.directory.glob(f"*{self.SUFFIX}")):
            if path.name.startswith(".tmp-"):
                continue
            try:
                entry = CacheEntry.from_sexpr(parse_sexpr(path.read_text(encoding="utf-8")))
            except (ModlockError, OSError, UnicodeDecodeError, ValueError) as e:
                logger.warning("Skipping unreadable cache entry", extra={"path": str(path), "error": str(e)})
                continue
            if path.name != self.path_for(entry.name).name:
                logger.warning("Skipping misplaced cache entry", extra={"path": str(path), "module_id": entry.name})
                continue
            entries[entry.name] = entry
        logger.debug("Cache loaded", extra={"directory": str(self.directory), "entries": len(entries)})
        return entries
