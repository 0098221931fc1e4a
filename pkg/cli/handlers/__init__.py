"""CLI コマンドハンドラー

click の詳細から分離した、テスト可能なコマンドのビジネスロジックです。
"""

from cli.handlers.command_handler import CommandHandler

__all__ = ["CommandHandler"]
