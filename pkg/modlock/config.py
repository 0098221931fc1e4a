"""エンジン設定管理モジュール

MODLOCK_ で始まる環境変数（および .env）から読み込み、その他は適切なデフォルト値を持つ。
"""

from typing import Any, Literal

from pydantic_settings import BaseSettings, SettingsConfigDict


class ModlockSettings(BaseSettings):
    """エンジン設定クラス

    環境変数から設定を読み込み、型チェックとバリデーションを実行します。
    """

    model_config = SettingsConfigDict(
        env_prefix="MODLOCK_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )

    # === 環境変数 ===
    step_budget: int = 10_000_000
    log_level: str = "WARNING"
    cache_enabled: bool = True
    detection: Literal["environment", "summary"] = "environment"

    # === ハードコード定数（環境変数不要） ===
    @property
    def source_suffix(self) -> str:
        """モジュールソースファイルの拡張子"""
        return ".mod"

    @property
    def cache_dir_name(self) -> str:
        """ワークスペース直下のキャッシュディレクトリ名"""
        return ".modcache"

    @property
    def max_generation_depth(self) -> int:
        """変換適用のネスト上限（自己再生成する変換の停止用）"""
        return 64

    @property
    def probe_depth(self) -> int:
        """観測的等価性でクロージャを再帰的に調べる深さ"""
        return 2


# グローバル設定インスタンス
_settings: ModlockSettings | None = None


def get_settings() -> ModlockSettings:
    """設定インスタンスを取得（シングルトン）"""
    global _settings
    if _settings is None:
        _settings = ModlockSettings()
    return _settings


def reload_settings(**overrides: Any) -> ModlockSettings:
    """設定を再読み込み（主にテストとCLIオプション用）

    Args:
        overrides: 環境変数より優先する値（例: step_budget=1000）
    """
    global _settings
    _settings = ModlockSettings(**overrides)
    return _settings
