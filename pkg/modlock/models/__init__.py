"""レポートの型定義"""

from modlock.models.reports import CheckReport, CompileReport, ModuleStatus, RebuildReport

__all__ = ["CheckReport", "CompileReport", "ModuleStatus", "RebuildReport"]
