"""CLI レポートの型定義

TypedDict を使用してコマンド結果の形を固定します。
"""

from typing import Literal, TypedDict


class ModuleStatus(TypedDict):
    """1モジュール分の状態行"""
    name: str
    status: Literal["compiled", "generated", "restored"]


class CompileReport(TypedDict):
    """compile コマンドの結果"""
    target: str
    modules: list[ModuleStatus]


class HiddenEntry(TypedDict):
    """隠れた依存関係1件"""
    generated: str
    names: list[str]
    chain: list[str]  # 生成キーからソースモジュールまでのたどり


class CheckReport(TypedDict):
    """check コマンドの結果"""
    target: str
    hidden: list[HiddenEntry]


class RebuildReport(TypedDict):
    """rebuild コマンドの結果"""
    changed: list[str]
    recompiled: list[str]
    restored: int
