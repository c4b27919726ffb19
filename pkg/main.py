"""
fusemot - 3D-подъём, фьюжн и оценка результатов многообъектного трекинга.

Запуск:
    python main.py <команда> [аргументы]

Или через скрипт:
    ./fusemot <команда> [аргументы]

Требования:
    - Python 3.10+
    - Установленные зависимости: pip install -r requirements.txt
"""

import sys
import logging
from pathlib import Path

# Добавляем корневую директорию в путь
ROOT_DIR = Path(__file__).parent
sys.path.insert(0, str(ROOT_DIR))

from src.config import get_config
from src.ui.cli import run_cli


# Настройка логирования
def setup_logging(level: str = "WARNING") -> None:
    """Настраивает логирование."""
    log_format = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format=log_format,
        handlers=[
            logging.StreamHandler(sys.stderr)
        ]
    )

    # Уменьшаем шум от библиотек
    logging.getLogger("shapely").setLevel(logging.WARNING)


def main(argv=None) -> int:
    """Точка входа в приложение."""
    # Уровень из FUSEMOT_LOG_LEVEL (DEBUG - журнал попаданий в кэш по узлам)
    setup_logging(get_config().log_level)
    return run_cli(argv)


def run() -> None:
    """Синхронная обёртка для запуска."""
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\nВыход...")
        sys.exit(130)


if __name__ == "__main__":
    run()
