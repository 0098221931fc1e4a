"""modlock コマンドラインインターフェース"""
