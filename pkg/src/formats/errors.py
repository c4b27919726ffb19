"""
Исключения чтения и записи файлов.
"""

from typing import Optional

import numpy as np


class FormatError(Exception):
    """Базовое исключение для форматов файлов."""
    pass


class ParseError(FormatError):
    """Строку текстового файла не удалось разобрать."""

    def __init__(self, message: str, line: int, column: Optional[int] = None):
        location = f"строка {line}" if column is None else f"строка {line}, колонка {column}"
        super().__init__(f"{location}: {message}")
        self.line = line
        self.column = column


class BadMagic(FormatError):
    """Неизвестная сигнатура файла."""
    pass


class TruncatedFile(FormatError):
    """Файл короче объявленного размера."""
    pass


class SchemaError(FormatError):
    """JSON-документ не соответствует схеме."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


def format_float(value: float) -> str:
    """Кратчайшее позиционное представление, читающееся обратно в то же число."""
    return np.format_float_positional(float(value), trim="-")
