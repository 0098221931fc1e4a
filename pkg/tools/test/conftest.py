"""pytest 共通フィクスチャ

フィクスチャのワークスペースは tmp_path にコピーして使うので、
キャッシュ（.modcache）がリポジトリに書き込まれることはありません。
"""

import shutil
from pathlib import Path
from typing import Callable

import pytest

from modlock.config import reload_settings
from modlock.workspace import Workspace

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch: pytest.MonkeyPatch):
    """テストごとに環境変数の影響を受けない設定に戻す"""
    for var in ("MODLOCK_STEP_BUDGET", "MODLOCK_LOG_LEVEL", "MODLOCK_CACHE_ENABLED", "MODLOCK_DETECTION"):
        monkeypatch.delenv(var, raising=False)
    reload_settings()
    yield
    reload_settings()


@pytest.fixture
def copy_fixture(tmp_path: Path) -> Callable[[str], Path]:
    """fixtures/<name> を tmp_path にコピーしてそのパスを返す"""
    def copy(name: str) -> Path:
        target = tmp_path / name
        shutil.copytree(FIXTURES / name, target)
        return target
    return copy


@pytest.fixture
def make_workspace(copy_fixture: Callable[[str], Path]) -> Callable[..., Workspace]:
    """フィクスチャをコピーしたワークスペースを作る"""
    def make(name: str, **overrides) -> Workspace:
        root = copy_fixture(name)
        settings = reload_settings(**overrides) if overrides else None
        return Workspace(root, settings=settings)
    return make

