"""ファイルベースのワークスペース

ドット区切りのモジュール名をファイルに対応付け、必要に応じてコンパイルしてメモ化します。
コンパイルごとにサマリーを記録し、生成モジュールには隠れた依存関係の検査を行います。
"""

from __future__ import annotations

import logging
import threading
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from modlock.config import ModlockSettings, get_settings
from modlock.core.compiler import CompileObserver, HostLanguage, compile_module, default_language
from modlock.core.compiler import compile_import as core_compile_import
from modlock.core.domain import Compiled, CTrans, ModuleEnv
from modlock.core.syntax import Apply, ModuleDef, Simple, deps, deps_imp, format_import, parse_import_text, parse_module
from modlock.exceptions import (
    CyclicDependencyError,
    HiddenDependencyError,
    ModlockError,
    ModuleSourceNotFoundError,
    WorkspaceError,
)
from modlock.sexpr import parse_sexpr
from modlock.summaries import Summary, SummaryStore, hidden
from modlock.workspace.cache import CacheEntry, EntryKind, ModuleCache, content_hash

logger = logging.getLogger(__name__)


def _append_trace(error: ModlockError, name: str) -> None:
    trace = error.details.setdefault("trace", [])
    if not trace or trace[-1] != name:
        trace.append(name)


def is_generated_key(name: str) -> bool:
    """生成モジュールのキー（`T(A)` 形式）かどうか"""
    return "(" in name


class Workspace:
    """モジュールワークスペース

    Attributes:
        root: ルートディレクトリ
        memo: モジュール名・生成キーから Compiled へのメモ
        store: コンパイルサマリー
        hashes: ソースモジュール名からコンパイル時のテキストのハッシュ
        compile_log: 実際にコンパイルした名前（コンパイル順）
        restore_log: キャッシュから復元した名前
        compile_counts: 名前ごとのコンパイル回数
        events: (名前, compiled | generated | restored) の記録
    """

    def __init__(
        self,
        root: Path | str,
        *,
        settings: ModlockSettings | None = None,
        language: HostLanguage | None = None,
    ) -> None:
        self.settings = settings or get_settings()
        self.root = Path(root).resolve()
        self.language = language or default_language()
        self.memo: dict[str, Compiled] = {}
        self.syntax: dict[str, ModuleDef] = {}
        self.store = SummaryStore()
        self.hashes: dict[str, str] = {}
        self.compile_log: list[str] = []
        self.restore_log: list[str] = []
        self.compile_counts: Counter[str] = Counter()
        self.events: list[tuple[str, str]] = []
        self.cache = ModuleCache(self.root / self.settings.cache_dir_name) if self.settings.cache_enabled else None
        self._cached: dict[str, CacheEntry] = {}
        self._restorable: dict[str, CacheEntry] = {}
        self._registry: dict[int, tuple[str, Compiled]] = {}
        self._in_progress: list[str] = []
        self._lock = threading.RLock()

    # === 名前とファイル ===

    def resolve(self, name: str) -> Path:
        """`a.b.C` を `<root>/a/b/C.mod` に対応付ける

        Raises:
            ModuleSourceNotFoundError: ファイルが存在しない場合
        """
        path = self.path_for(name)
        if not path.is_file():
            raise ModuleSourceNotFoundError(name, str(path))
        return path

    def path_for(self, name: str) -> Path:
        segments = name.split(".")
        if not all(segments) or any(s in (".", "..") or any(ch in s for ch in "/\\,()") for s in segments):
            raise ModuleSourceNotFoundError(name, str(self.root / name))
        return self.root.joinpath(*segments[:-1], segments[-1] + self.settings.source_suffix)

    def name_for_path(self, path: Path | str) -> str:
        """ソースファイルのパスからモジュール名を求める"""
        candidate = Path(path)
        if not candidate.is_absolute():
            candidate = self.root / candidate
        candidate = candidate.resolve()
        suffix = self.settings.source_suffix
        try:
            relative = candidate.relative_to(self.root)
        except ValueError:
            raise WorkspaceError(f"{path} is outside the workspace {self.root}", details={"path": str(path)}) from None
        if relative.suffix != suffix:
            raise WorkspaceError(f"{path} is not a module source (*{suffix})", details={"path": str(path)})
        name = ".".join((*relative.parts[:-1], relative.stem))
        if any(ch in name for ch in ",()"):
            raise WorkspaceError(f"{path} cannot be named as a module", details={"path": str(path), "name": name})
        return name

    def source_names(self) -> list[str]:
        """ルート以下の全ソースモジュール名（キャッシュディレクトリを除く）"""
        names = []
        for path in self.root.rglob(f"*{self.settings.source_suffix}"):
            relative = path.relative_to(self.root)
            if relative.parts[0].startswith("."):
                continue
            names.append(self.name_for_path(path))
        return sorted(names)

    def read_module(self, name: str) -> tuple[ModuleDef, str]:
        """ソースを読み込んで構文とハッシュを返す"""
        text = self.resolve(name).read_text(encoding="utf-8")
        return parse_module(parse_sexpr(text)), content_hash(text)

    # === コンパイル ===

    def compile(self, name: str) -> Compiled:
        """モジュールを必要に応じてコンパイルする（メモ化あり）

        Raises:
            CyclicDependencyError: 依存関係が循環している場合
            HiddenDependencyError: 生成モジュールに隠れた依存関係がある場合
            ModuleSourceNotFoundError: ソースファイルがない場合
        """
        with self._lock:
            return self._compile_source(name)

    def compile_import(self, imp: Apply | str) -> Compiled:
        """ワークスペースの名前でインポート式を解決する（expand コマンド用）"""
        expr = parse_import_text(imp) if isinstance(imp, str) else imp
        with self._lock:
            names = list(dict.fromkeys(deps_imp(expr)))
            for dep in names:
                self._compile_source(dep)
            if isinstance(expr, Simple):
                return self.memo[expr.name]
            env = ModuleEnv((dep, self.memo[dep]) for dep in names)
            tracker = _Tracker(self, format_import(expr))
            return core_compile_import(env, expr, language=self.language, observer=tracker)

    def _compile_source(self, name: str) -> Compiled:
        if name in self.memo:
            return self.memo[name]
        self._enter(name)
        try:
            module, digest = self.read_module(name)
            names = list(dict.fromkeys(deps(module)))
            for dep in names:
                self._compile_source(dep)
            env = ModuleEnv((dep, self.memo[dep]) for dep in names)
            tracker = _Tracker(self, name)
            result = compile_module(env, module, language=self.language, observer=tracker)
        except ModlockError as e:
            _append_trace(e, name)
            raise
        finally:
            self._in_progress.pop()
        summary = Summary(name, frozenset(tracker.root_used))
        self._record(name, "source", module, result, summary, digest)
        return result

    def _enter(self, name: str) -> None:
        if name in self._in_progress:
            cycle = [*self._in_progress[self._in_progress.index(name):], name]
            raise CyclicDependencyError(cycle)
        self._in_progress.append(name)

    def _record(
        self,
        name: str,
        kind: EntryKind,
        module: ModuleDef,
        result: Compiled,
        summary: Summary,
        digest: str = "",
    ) -> None:
        self.memo[name] = result
        self.syntax[name] = module
        self.store.add(summary)
        self._registry[id(result)] = (name, result)
        if digest:
            self.hashes[name] = digest
        restored = self._restorable.pop(name, None) is not None
        if restored:
            self.restore_log.append(name)
            self.events.append((name, "restored"))
        else:
            self.compile_log.append(name)
            self.events.append((name, "generated" if kind == "generated" else "compiled"))
            self.compile_counts[name] += 1
            if self.cache is not None:
                self.cache.save(CacheEntry(name, kind, module, summary, digest))
        self._cached.pop(name, None)
        logger.info(
            "Module restored" if restored else "Module compiled",
            extra={"module_id": name, "kind": kind, "module_type": result.module_type.value},
        )

    def canonical_name(self, compiled: Compiled) -> str | None:
        """コンパイル済みモジュールのワークスペース上の名前"""
        entry = self._registry.get(id(compiled))
        if entry is not None and entry[1] is compiled:
            return entry[0]
        return None

    # === 増分再構築 ===

    def load_cache(self) -> int:
        """保存済みキャッシュを読み込み、変更のないモジュールを復元対象にする

        Returns:
            復元対象のレコード数
        """
        if self.cache is None:
            return 0
        with self._lock:
            self._cached = {name: entry for name, entry in self.cache.load_all().items() if name not in self.memo}
            stale = self._dependents_closure(self.detect_changes())
            self._restorable = {name: entry for name, entry in self._cached.items() if name not in stale}
            logger.info(
                "Cache loaded",
                extra={"entries": len(self._cached), "restorable": len(self._restorable)},
            )
            return len(self._restorable)

    def detect_changes(self) -> set[str]:
        """内容のハッシュが前回のコンパイル時と異なるソースモジュール名"""
        changed: set[str] = set()
        for name in self._known_sources():
            baseline = self.hashes.get(name)
            if baseline is None and name in self._cached:
                baseline = self._cached[name].source_hash
            try:
                path = self.path_for(name)
            except ModuleSourceNotFoundError:
                changed.add(name)
                continue
            if not path.is_file() or baseline is None:
                changed.add(name)
            elif content_hash(path.read_text(encoding="utf-8")) != baseline:
                changed.add(name)
        return changed

    def rebuild(self, changed: Iterable[Path | str] | None = None) -> list[str]:
        """変更されたソースとその依存元だけを再コンパイルする

        Args:
            changed: 変更されたファイルのパス（None ならハッシュで検出）

        Returns:
            再コンパイルした名前（コンパイル順、重複なし）
        """
        with self._lock:
            changed_names = self.detect_changes() if changed is None else {self.name_for_path(p) for p in changed}
            stale = self._dependents_closure(changed_names)
            known = sorted(set(self._known_sources()) | changed_names)
            for name in stale:
                self._invalidate(name)
            logger.info("Rebuild started", extra={"changed": sorted(changed_names), "stale": sorted(stale)})
            before = len(self.compile_log)
            for name in known:
                if name in self.memo:
                    continue
                try:
                    self.resolve(name)
                except ModuleSourceNotFoundError:
                    continue
                self._compile_source(name)
            recompiled = list(dict.fromkeys(self.compile_log[before:]))
            logger.info("Rebuild finished", extra={"recompiled": recompiled})
            return recompiled

    def _known_sources(self) -> list[str]:
        names: set[str] = {n for n in self.memo if not is_generated_key(n)}
        names |= {n for n, entry in self._cached.items() if entry.kind == "source"}
        for entry in self._cached.values():
            names |= {n for n in entry.summary.used | entry.summary.gen_by if not is_generated_key(n)}
        return sorted(names)

    def _edges(self) -> dict[str, set[str]]:
        """名前 → それが依存する名前（used ∪ genBy ∪ 宣言済み依存）"""
        edges: dict[str, set[str]] = {}
        for name, entry in self._cached.items():
            edges.setdefault(name, set()).update(entry.summary.used | entry.summary.gen_by)
            edges[name].update(deps(entry.syntax) if entry.kind == "source" else ())
        for summary in self.store:
            edges.setdefault(summary.module_id, set()).update(summary.used | summary.gen_by)
        for name, module in self.syntax.items():
            if not is_generated_key(name):
                edges.setdefault(name, set()).update(deps(module))
        return edges

    def _dependents_closure(self, names: Iterable[str]) -> set[str]:
        """names とその推移的な依存元"""
        dependents: dict[str, set[str]] = {}
        for source, targets in self._edges().items():
            for target in targets:
                dependents.setdefault(target, set()).add(source)
        result: set[str] = set()
        pending = list(names)
        while pending:
            name = pending.pop()
            if name in result:
                continue
            result.add(name)
            pending.extend(dependents.get(name, ()))
        return result

    def _invalidate(self, name: str) -> None:
        compiled = self.memo.pop(name, None)
        if compiled is not None:
            self._registry.pop(id(compiled), None)
        self.syntax.pop(name, None)
        self.store.discard(name)
        self.hashes.pop(name, None)
        self._restorable.pop(name, None)
        self._cached.pop(name, None)


@dataclass
class _Frame:
    module_id: str
    used: set[str] = field(default_factory=set)
    gen_by: frozenset[str] = frozenset()


class _Tracker(CompileObserver):
    """1つのソースモジュールのコンパイルを観測する

    名前解決を最も内側の生成フレームに帰属させ、生成モジュールのサマリーを記録します。
    """

    def __init__(self, workspace: Workspace, module_id: str) -> None:
        self.ws = workspace
        self.frames: list[_Frame] = [_Frame(module_id)]

    @property
    def root_used(self) -> set[str]:
        return self.frames[0].used

    def _canonical(self, compiled: Compiled, fallback: str) -> str:
        return self.ws.canonical_name(compiled) or fallback

    def resolved(self, name: str, compiled: Compiled) -> None:
        self.frames[-1].used.add(self._canonical(compiled, name))

    def resolve_missing(self, name: str) -> Compiled | None:
        if self.ws.settings.detection != "summary" or len(self.frames) == 1:
            return None
        try:
            self.ws.resolve(name)
        except ModuleSourceNotFoundError:
            return None
        logger.debug("Resolving unbound name from the workspace", extra={"import_name": name})
        return self.ws._compile_source(name)

    def generation_key(self, imp: Apply, trans: CTrans, args: Sequence[Compiled]) -> str:
        target = self._canonical(trans, format_import(imp.target))
        arg_names = [self._canonical(arg, format_import(a)) for arg, a in zip(args, imp.args)]
        return f"{target}({','.join(arg_names)})"

    def generated_value(self, key: str) -> Compiled | None:
        compiled = self.ws.memo.get(key)
        if compiled is not None:
            self.frames[-1].used.add(key)
        return compiled

    def generated_syntax(self, key: str) -> ModuleDef | None:
        entry = self.ws._restorable.get(key)
        return entry.syntax if entry is not None and entry.kind == "generated" else None

    @contextmanager
    def generating(self, key: str, trans: CTrans, args: Sequence[Compiled]) -> Iterator[None]:
        gen_by = frozenset(
            self._canonical(c, key) for c in (trans, *args)
        )
        self.ws._enter(key)
        self.frames.append(_Frame(key, gen_by=gen_by))
        try:
            yield
        except ModlockError as e:
            _append_trace(e, key)
            raise
        finally:
            self.frames.pop()
            self.ws._in_progress.pop()

    def generated(self, key: str, module: ModuleDef, result: Compiled) -> None:
        frame = self.frames[-1]
        summary = Summary(key, frozenset(frame.used), frame.gen_by)
        self.ws.store.add(summary)
        offenders = hidden(key, self.ws.store)
        if offenders:
            self.ws.store.discard(key)
            logger.warning("Hidden dependency rejected", extra={"generated": key, "hidden": sorted(offenders)})
            raise HiddenDependencyError(key, sorted(offenders), [key])
        self.ws._record(key, "generated", module, result, summary)
        self.frames[-2].used.add(key)
