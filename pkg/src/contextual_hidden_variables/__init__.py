"""Contextual Hidden Variables - 履歴に依存する文脈的隠れた変数モデル"""

__version__ = "1.0.0"
__author__ = "Contextual Hidden Variables Team"
__description__ = "履歴に依存する文脈的隠れた変数モデルのシミュレーターと検証ツール"
