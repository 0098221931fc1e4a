"""CLI 終了コード定義

例外クラスから終了コードへの対応を1か所にまとめます。
終了コードが CLI の唯一の機械向け契約です。
"""

from modlock.exceptions import (
    CyclicDependencyError,
    HiddenDependencyError,
    ModlockError,
    ModuleSourceNotFoundError,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_HIDDEN_DEPENDENCY = 2
EXIT_USAGE = 3
EXIT_CYCLE = 4

# 先に一致したものを採用（サブクラスを先に並べる）
_EXIT_CODES: tuple[tuple[type[ModlockError], int], ...] = (
    (HiddenDependencyError, EXIT_HIDDEN_DEPENDENCY),
    (ModuleSourceNotFoundError, EXIT_USAGE),
    (CyclicDependencyError, EXIT_CYCLE),
    (ModlockError, EXIT_ERROR),
)


def exit_code_for(error: ModlockError) -> int:
    """例外に対応する終了コード"""
    for error_type, code in _EXIT_CODES:
        if isinstance(error, error_type):
            return code
    return EXIT_ERROR
