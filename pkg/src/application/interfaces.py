from abc import ABC, abstractmethod
from typing import Optional, List, Dict, Any, Sequence


class AbstractMetricsCollector(ABC):
    """ Интерфейс сборщика метрик """

    @abstractmethod
    async def record_steady_state(
            self,
            model: str,
            duration: float,
            residual: float,
            dimension: int,
            truncation_ok: bool
    ) -> None:
        """ Записать решение стационарного состояния """
        pass

    @abstractmethod
    async def record_sweep_point(self, status: str) -> None:
        """ Записать точку сканирования """
        pass

    @abstractmethod
    async def record_error(self, error_type: str) -> None:
        """ Записать ошибку """
        pass

    @abstractmethod
    async def get_metrics(self) -> Dict[str, Any]:
        """ Получить метрики """
        pass


class AbstractResultWriter(ABC):
    """ Интерфейс вывода результатов: таблицы и отчеты """

    @abstractmethod
    async def write_table(
            self,
            header: Sequence[str],
            rows: List[Sequence[Any]],
            out: Optional[str] = None
    ) -> str:
        """ Сериализовать таблицу; при заданном out записать в файл """
        raise NotImplementedError

    @abstractmethod
    async def write_report(self, payload: Dict[str, Any], out: Optional[str] = None) -> str:
        """ Сериализовать отчет одной команды """
        raise NotImplementedError
