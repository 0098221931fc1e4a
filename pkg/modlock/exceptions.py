"""modlock カスタム例外定義

エンジン全体で使用するカスタム例外階層を定義します。
CLI はこの階層をもとに終了コードを決定します。
"""

from typing import Any


class ModlockError(Exception):
    """基底例外クラス

    全てのカスタム例外の基底となるクラス。
    """

    def __init__(self, message: str, details: dict[str, Any] | None = None) -> None:
        self.message = message
        self.details = details or {}
        super().__init__(self.message)


# === 読み取り・構文 ===

class SExprSyntaxError(ModlockError):
    """S式構文エラー

    括弧の不整合、閉じられていない文字列、空入力、余分な入力など。
    """

    def __init__(self, message: str, line: int, column: int) -> None:
        self.line = line
        self.column = column
        super().__init__(
            f"{message} at line {line}, column {column}",
            details={"line": line, "column": column},
        )


class MalformedModuleError(ModlockError):
    """モジュール形式エラー

    `(module (imports ...) body)` の形をしていない、ローカル名の重複など。
    """
    pass


class MalformedBodyError(ModlockError):
    """モジュール本体エラー

    本体が model / transformation / base のいずれでもない場合に発生します。
    """
    pass


# === コンパイル ===

class CompilationError(ModlockError):
    """コンパイルエラーの基底クラス"""
    pass


class UnresolvedImportError(CompilationError):
    """インポート未解決エラー

    Simple インポートの名前が環境に存在しない場合に発生します。
    """

    def __init__(self, name: str, chain: list[str] | None = None) -> None:
        self.name = name
        self.chain = list(chain or [])
        super().__init__(
            f"unresolved import: {name}",
            details={"name": name, "chain": self.chain},
        )


class HiddenDependencyError(UnresolvedImportError):
    """隠れた依存関係エラー

    変換が生成したモジュールが、変換・入力・それらの直接依存のいずれでもない
    モジュールを参照した場合に発生します。
    """

    def __init__(self, generated: str, names: list[str], chain: list[str] | None = None) -> None:
        super().__init__(names[0] if names else "", chain)
        self.generated = generated
        self.names = sorted(set(names))
        self.message = f"hidden dependency in {generated}: {', '.join(self.names)}"
        self.args = (self.message,)
        self.details.update({"generated": generated, "names": self.names})


class NotATransformationError(CompilationError):
    """変換でないモジュールを適用しようとした場合のエラー"""
    pass


class TransformationFailureError(CompilationError):
    """変換実行エラー

    変換関数が例外を送出した、モジュールでない値を返した、
    ステップ上限を超えたなどの場合に発生します。
    """
    pass


# === カーネル言語 ===

class LangError(ModlockError):
    """カーネル言語エラーの基底クラス"""
    pass


class ExpSyntaxError(LangError):
    """式構文エラー（特殊形式の誤り、ネストした quasiquote、重複引数など）"""
    pass


class DuplicateDefinitionError(LangError):
    """同一モジュール内での定義名の重複"""
    pass


class MalformedGeneratedModuleError(LangError):
    """変換結果の値がモジュールとして解釈できない場合のエラー"""
    pass


class EvaluationError(LangError):
    """評価時エラーの基底クラス"""
    pass


class UnboundVariableError(EvaluationError):
    """未束縛変数"""
    pass


class NotAFunctionError(EvaluationError):
    """関数でない値の適用"""
    pass


class ArityMismatchError(EvaluationError):
    """引数の個数不一致"""
    pass


class ValueTypeError(EvaluationError):
    """組み込み関数への不正な型の引数（例: リストでない値の car）"""
    pass


class SpliceError(EvaluationError):
    """unquote-splicing の結果がリストでない"""
    pass


class StepBudgetExceededError(EvaluationError):
    """評価ステップ上限の超過"""
    pass


class UserRaisedError(EvaluationError):
    """カーネル言語の error 組み込み関数による例外"""
    pass


# === サマリー ===

class SummaryError(ModlockError):
    """コンパイルサマリーエラーの基底クラス"""
    pass


class UnknownModuleError(SummaryError):
    """サマリーストアに存在しないモジュール"""
    pass


# === ワークスペース ===

class WorkspaceError(ModlockError):
    """ワークスペースエラーの基底クラス"""
    pass


class ModuleSourceNotFoundError(WorkspaceError):
    """モジュール名に対応するソースファイルが見つからない"""

    def __init__(self, name: str, path: str) -> None:
        self.name = name
        self.path = path
        super().__init__(
            f"module not found: {name} (searched {path})",
            details={"name": name, "path": path},
        )


class CyclicDependencyError(WorkspaceError):
    """循環依存エラー"""

    def __init__(self, cycle: list[str]) -> None:
        self.cycle = list(cycle)
        super().__init__(
            f"cyclic dependency: {' -> '.join(self.cycle)}",
            details={"cycle": self.cycle},
        )
