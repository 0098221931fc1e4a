"""依存関係グラフの DOT 出力

ソースモジュールが宣言した依存を実線、生成に関与したモジュール（genBy）への辺を破線、
宣言の外で実際に使われたモジュール（生成モジュールへの参照や current-trans の先）を点線で描きます。
生成モジュールのノードは破線の枠で表示します。
"""

from __future__ import annotations

import graphviz

from modlock.core import deps
from modlock.workspace.workspace import Workspace, is_generated_key


def _declared(ws: Workspace, node: str) -> list[str]:
    if is_generated_key(node) or node not in ws.syntax:
        return []
    return list(dict.fromkeys(deps(ws.syntax[node])))


def _reachable(ws: Workspace, start: str) -> list[str]:
    seen = {start}
    order = [start]
    queue = [start]
    while queue:
        current = queue.pop(0)
        targets = set(_declared(ws, current))
        if current in ws.store:
            summary = ws.store.get(current)
            targets |= summary.used | summary.gen_by
        for target in sorted(targets):
            if target not in seen:
                seen.add(target)
                order.append(target)
                queue.append(target)
    return order


def build_graph(ws: Workspace, start: str) -> graphviz.Digraph:
    """start から到達できるモジュールのグラフを作る"""
    dot = graphviz.Digraph(name="modules", node_attr={"shape": "box", "fontname": "Helvetica"})
    nodes = _reachable(ws, start)
    for node in sorted(nodes):
        if is_generated_key(node):
            dot.node(node, node, style="dashed")
        else:
            dot.node(node, node)
    for node in sorted(nodes):
        declared = _declared(ws, node)
        for target in declared:
            dot.edge(node, target)
        if node not in ws.store:
            continue
        summary = ws.store.get(node)
        for target in sorted(summary.gen_by):
            dot.edge(node, target, style="dashed")
        for target in sorted(summary.used - summary.gen_by - set(declared)):
            dot.edge(node, target, style="dotted")
    return dot


def dependency_graph(ws: Workspace, name: str) -> str:
    """モジュールをコンパイルし、その依存関係グラフを DOT テキストで返す"""
    ws.compile(name)
    return build_graph(ws, name).source
