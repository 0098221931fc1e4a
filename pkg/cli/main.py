"""
modlock コマンドライン メインファイル
"""

import logging
import sys
from pathlib import Path
from typing import Sequence

import click
from dotenv import load_dotenv

from cli.config import CliConfig
from cli.exceptions import EXIT_ERROR, EXIT_HIDDEN_DEPENDENCY, EXIT_OK, EXIT_USAGE, exit_code_for
from cli.handlers import CommandHandler
from modlock.config import get_settings, reload_settings
from modlock.core import parse_import_text
from modlock.exceptions import MalformedModuleError, ModlockError
from modlock.workspace import Workspace

# ロガー設定
logger = logging.getLogger(__name__)

# 環境変数の読み込み
load_dotenv()

_STATUS_COLORS = {"compiled": "green", "generated": "cyan", "restored": "blue"}


def _configure_logging(config: CliConfig) -> None:
    level_name = get_settings().log_level.upper()
    level = getattr(logging, level_name, logging.WARNING)
    if config.verbosity == 1:
        level = min(level, logging.INFO)
    elif config.verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format=config.log_format, stream=sys.stderr)
    logging.getLogger().setLevel(level)


def _handler(ctx: click.Context) -> CommandHandler:
    config: CliConfig = ctx.obj
    return CommandHandler(Workspace(config.root_dir, settings=get_settings()))


def _status(config: CliConfig, status: str) -> str:
    if not config.color:
        return status
    return click.style(status, fg=_STATUS_COLORS.get(status))


@click.group()
@click.option(
    "--root",
    "root_dir",
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    default=Path("."),
    help="ワークスペースのルートディレクトリ",
)
@click.option("--step-budget", type=click.IntRange(min=1), default=None, help="評価ステップ上限（MODLOCK_STEP_BUDGET より優先）")
@click.option(
    "--detection",
    type=click.Choice(["environment", "summary"]),
    default=None,
    help="隠れた依存関係の検出方式",
)
@click.option("--plain/--color", default=False, help="色なしで出力する")
@click.option("-v", "--verbose", count=True, help="ログを詳しくする（-vv でデバッグ）")
@click.pass_context
def main_group(
    ctx: click.Context,
    root_dir: Path,
    step_budget: int | None,
    detection: str | None,
    plain: bool,
    verbose: int,
) -> None:
    """モジュールワークスペースのコンパイル・検査・可視化"""
    config = CliConfig(
        root_dir=root_dir.resolve(),
        command=ctx.invoked_subcommand or "",
        args=list(ctx.args),
        step_budget=step_budget,
        detection=detection,  # type: ignore[arg-type]
        color=not plain,
        verbosity=verbose,
    )
    overrides: dict[str, object] = {}
    if config.step_budget is not None:
        overrides["step_budget"] = config.step_budget
    if config.detection is not None:
        overrides["detection"] = config.detection
    reload_settings(**overrides)
    _configure_logging(config)
    ctx.obj = config


@main_group.command("compile")
@click.argument("name")
@click.pass_context
def compile_command(ctx: click.Context, name: str) -> int:
    """モジュールをコンパイルし、モジュールごとの状態を表示する"""
    report = _handler(ctx).handle_compile(name)
    for entry in report["modules"]:
        click.echo(f"{_status(ctx.obj, entry['status'])} {entry['name']}")
    return EXIT_OK


@main_group.command("check")
@click.argument("name")
@click.pass_context
def check_command(ctx: click.Context, name: str) -> int:
    """隠れた依存関係のレポートを表示する"""
    report = _handler(ctx).handle_check(name)
    if not report["hidden"]:
        click.echo(f"no hidden dependencies in {name}")
        return EXIT_OK
    for entry in report["hidden"]:
        click.echo(f"hidden dependency in {entry['generated']}: {', '.join(entry['names'])}")
        if entry["chain"]:
            click.echo(f"  via {' <- '.join(entry['chain'])}")
    return EXIT_HIDDEN_DEPENDENCY


@main_group.command("deps")
@click.argument("name")
@click.pass_context
def deps_command(ctx: click.Context, name: str) -> int:
    """宣言済み依存を1行ずつ表示する"""
    for dep in _handler(ctx).handle_deps(name):
        click.echo(dep)
    return EXIT_OK


@main_group.command("expand")
@click.argument("import_expr")
@click.pass_context
def expand_command(ctx: click.Context, import_expr: str) -> int:
    """インポート式（例: "t(a,b)"）の結果のモジュールを表示する"""
    try:
        parse_import_text(import_expr)
    except MalformedModuleError as e:
        raise click.BadParameter(e.message, param_hint="IMPORT_EXPR") from e
    click.echo(_handler(ctx).handle_expand(import_expr))
    return EXIT_OK


@main_group.command("graph")
@click.argument("name")
@click.pass_context
def graph_command(ctx: click.Context, name: str) -> int:
    """依存関係グラフを DOT 形式で出力する"""
    click.echo(_handler(ctx).handle_graph(name), nl=False)
    return EXIT_OK


@main_group.command("rebuild")
@click.argument("paths", nargs=-1)
@click.pass_context
def rebuild_command(ctx: click.Context, paths: tuple[str, ...]) -> int:
    """変更されたモジュールとその依存元だけを再コンパイルする"""
    report = _handler(ctx).handle_rebuild(paths)
    for name in report["recompiled"]:
        click.echo(f"{_status(ctx.obj, 'compiled')} {name}")
    return EXIT_OK


def run(argv: Sequence[str] | None = None) -> int:
    """CLI を実行して終了コードを返す

    Args:
        argv: 引数（省略時は sys.argv[1:]）

    Returns:
        0 成功 / 1 コンパイル・評価エラー / 2 隠れた依存関係 / 3 使い方の誤り・モジュールなし / 4 循環依存
    """
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        result = main_group.main(args=args, prog_name="modlock", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_ERROR
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except ModlockError as e:
        code = exit_code_for(e)
        logger.debug("Command failed", extra={"error_type": type(e).__name__, "details": e.details})
        click.echo(f"error: {e.message}", err=True)
        trace = e.details.get("trace")
        if trace:
            click.echo(f"  while compiling {' <- '.join(str(step) for step in trace)}", err=True)
        return code
    if isinstance(result, int):
        return result
    return EXIT_OK


def main() -> None:
    """エントリーポイント"""
    sys.exit(run())


if __name__ == "__main__":
    main()
