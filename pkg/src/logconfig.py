import logging
import sys

from colorama import init, Fore, Style
from src.config import config


class RootLogger:
    """Логгер на корневом регистре, используется в режиме отладки"""

    def __init__(self):
        logging.basicConfig(
            level=self.convert_level(config.log_level),
            format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            handlers=[logging.StreamHandler(sys.stderr)]
        )
        self.root_logger = logging.getLogger()

    def setup_logger(self, name: str, level: str | int = config.log_level):
        """Вернуть логгер с указанным именем и уровнем"""
        logger = logging.getLogger(name)
        logger.setLevel(self.convert_level(level))
        return logger

    @staticmethod
    def convert_level(level: str | int):
        """Возвращает числовое значение уровня"""
        if isinstance(level, str):
            level = level.upper()
        return logging.getLevelName(level)


class CustomLogger:
    """ Логгер с цветным выделением уровней """

    init()  # colorama

    class ColorFormatter(logging.Formatter):
        """Форматтер, раскрашивающий только уровень логирования"""
        LEVEL_COLORS = {
            "DEBUG": Fore.CYAN,
            "INFO": Fore.GREEN,
            "WARNING": Fore.YELLOW,
            "ERROR": Fore.RED,
            "CRITICAL": Fore.RED + Style.BRIGHT,
        }

        # по самому длинному слову "CRITICAL"
        LEVEL_WIDTH = 8
        NAME_WIDTH = 16

        def format(self, record):
            original_levelname = record.levelname
            original_name = record.name

            record.levelname = (
                self.LEVEL_COLORS.get(original_levelname, "")
                + original_levelname.ljust(self.LEVEL_WIDTH)
                + Style.RESET_ALL
            )
            name = original_name
            if len(name) > self.NAME_WIDTH:
                name = name[: self.NAME_WIDTH - 3] + "..."
            record.name = name.center(self.NAME_WIDTH)

            formatted = super().format(record)

            record.levelname = original_levelname
            record.name = original_name
            return formatted

    def setup_logger(self, name=None, level: str | int = config.log_level):
        """Настройка логгера с цветным выводом уровней"""
        logger = logging.getLogger(name)
        logger.setLevel(self.convert_level(level))
        logger.handlers.clear()
        logger.propagate = False

        # stdout занят отчетами CLI
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(self.convert_level(level))
        console_handler.setFormatter(self.ColorFormatter(
            fmt="%(asctime)s - %(levelname)s - %(name)s - %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
        ))
        logger.addHandler(console_handler)
        return logger

    @staticmethod
    def convert_level(level):
        """Возвращает числовое значение уровня"""
        if isinstance(level, str):
            level = level.upper()
        return logging.getLevelName(level)


opt_logger = RootLogger() if config.debug.lower() == 'true' else CustomLogger()
