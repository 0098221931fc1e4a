"""ファイルベースのワークスペース（名前解決、メモ化、増分再構築）"""

from modlock.workspace.cache import CacheEntry, ModuleCache, content_hash
from modlock.workspace.graph import build_graph, dependency_graph
from modlock.workspace.workspace import Workspace, is_generated_key

__all__ = [
    "CacheEntry",
    "ModuleCache",
    "Workspace",
    "build_graph",
    "content_hash",
    "dependency_graph",
    "is_generated_key",
]
