"""modlock: モデル・変換・ベースコードを一様なモジュールとして扱うモジュールシステム

変換はインポートの中で適用され、生成モジュールの隠れた依存関係はコンパイル時に拒否されます。
"""

__version__ = "0.1.0"
