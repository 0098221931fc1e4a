"""CLI 設定モジュール

1回の起動ごとのオプションを保持します。エンジン全体の設定は modlock.config を参照してください。
"""

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field


class CliConfig(BaseModel):
    """CLI 起動設定

    1回の起動で実行するコマンドは1つだけです。
    """

    root_dir: Path = Field(default_factory=Path.cwd)
    command: str = ""
    args: list[str] = Field(default_factory=list)
    step_budget: int | None = Field(default=None, gt=0)
    detection: Literal["environment", "summary"] | None = None
    color: bool = True
    verbosity: int = 0

    # === ハードコード定数 ===
    @property
    def log_format(self) -> str:
        """ログフォーマット（標準エラー出力）"""
        return "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
