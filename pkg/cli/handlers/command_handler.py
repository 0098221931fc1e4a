"""コマンドハンドリングサービス

各サブコマンドのビジネスロジックを処理します。
click から分離されているため、ワークスペースを直接渡してテストできます。
"""

import logging
from pathlib import Path
from typing import Sequence

from modlock.core.domain import get_model
from modlock.core.syntax import deps, module_to_sexpr
from modlock.exceptions import HiddenDependencyError
from modlock.models.reports import CheckReport, CompileReport, HiddenEntry, ModuleStatus, RebuildReport
from modlock.sexpr import print_sexpr
from modlock.summaries import hidden
from modlock.workspace import Workspace, dependency_graph, is_generated_key

logger = logging.getLogger(__name__)


class CommandHandler:
    """コマンドハンドリングサービス

    責務:
    - キャッシュの読み込みとワークスペースのコンパイル
    - 隠れた依存関係レポートの作成
    - expand / graph / deps の出力テキストの生成
    """

    def __init__(self, workspace: Workspace):
        """初期化

        Args:
            workspace: 対象のワークスペース
        """
        self.workspace = workspace
        logger.info("CommandHandler initialized", extra={"root": str(workspace.root)})

    def _statuses_since(self, start: int) -> list[ModuleStatus]:
        return [
            ModuleStatus(name=name, status=status)  # type: ignore[typeddict-item]
            for name, status in self.workspace.events[start:]
        ]

    def handle_compile(self, name: str) -> CompileReport:
        """モジュールをコンパイルし、コンパイル・生成・復元したモジュールを返す

        Raises:
            ModlockError: コンパイルエラー全般
        """
        self.workspace.load_cache()
        start = len(self.workspace.events)
        self.workspace.compile(name)
        return CompileReport(target=name, modules=self._statuses_since(start))

    def handle_check(self, name: str) -> CheckReport:
        """モジュールをコンパイルし、隠れた依存関係のレポートを返す

        隠れた依存関係以外のエラーはそのまま送出します。
        """
        self.workspace.load_cache()
        report = CheckReport(target=name, hidden=[])
        try:
            self.workspace.compile(name)
        except HiddenDependencyError as e:
            trace = [str(step) for step in e.details.get("trace", [])]
            report["hidden"].append(HiddenEntry(generated=e.generated, names=e.names, chain=trace))
            logger.info("Hidden dependency reported", extra={"generated": e.generated, "hidden": e.names})
            return report
        store = self.workspace.store
        for summary in sorted(store, key=lambda s: s.module_id):
            if not summary.is_generated:
                continue
            offenders = hidden(summary.module_id, store)
            if offenders:
                report["hidden"].append(
                    HiddenEntry(generated=summary.module_id, names=sorted(offenders), chain=[summary.module_id])
                )
        return report

    def handle_deps(self, name: str) -> list[str]:
        """宣言済み依存（依存先はコンパイルしない）"""
        module, _ = self.workspace.read_module(name)
        return deps(module)

    def handle_expand(self, import_text: str) -> str:
        """インポート式が指す（生成）モジュールの構文を s 式で返す"""
        self.workspace.load_cache()
        compiled = self.workspace.compile_import(import_text)
        return print_sexpr(module_to_sexpr(get_model(compiled).syntax))

    def handle_graph(self, name: str) -> str:
        """依存関係グラフの DOT テキスト"""
        self.workspace.load_cache()
        return dependency_graph(self.workspace, name)

    def handle_rebuild(self, paths: Sequence[str]) -> RebuildReport:
        """増分再構築（パス省略時はハッシュで変更を検出）

        保存済みキャッシュがない場合はワークスペースの全モジュールをコンパイルします。
        """
        ws = self.workspace
        restorable = ws.load_cache()
        if paths:
            changed = sorted(ws.name_for_path(Path(p)) for p in paths)
        else:
            changed = sorted(ws.detect_changes())
        known_before = restorable > 0 or bool(ws.memo)
        if known_before:
            recompiled = ws.rebuild([Path(p) for p in paths] if paths else None)
        else:
            start = len(ws.compile_log)
            for name in ws.source_names():
                ws.compile(name)
            recompiled = list(dict.fromkeys(ws.compile_log[start:]))
            changed = [name for name in recompiled if not is_generated_key(name)]
        return RebuildReport(changed=changed, recompiled=recompiled, restored=len(ws.restore_log))
