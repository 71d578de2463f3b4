import time
from typing import Dict, Any, Callable, Awaitable

from src.application.interfaces import AbstractMetricsCollector, AbstractResultWriter
from src.application.use_cases import (
    SteadyStateUseCase, SweepUseCase, WignerUseCase, SensingUseCase, MeanFieldUseCase
)
from src.container import ServiceContainer
from src.domain.exceptions import DomainException, ParameterError, LayoutMismatchError
from src.domain.value_objects import ModelKind
from src.logconfig import opt_logger as log
from src.models.cli_models import RunConfigModel, CommandResult

logger = log.setup_logger(name='commands')

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FAILURE = 3

# формат по умолчанию: отчеты в JSON, таблицы в CSV
DEFAULT_FORMATS = {"steady": "json", "meanfield": "json", "sweep": "csv", "wigner": "csv", "sensing": "csv"}


def exit_code_for(error: Exception) -> int:
    """ Некорректный ввод -> 2, отказ вычисления -> 3 """
    if isinstance(error, (ParameterError, LayoutMismatchError)):
        return EXIT_USAGE
    return EXIT_FAILURE


class CommandHandler:
    """ Обработчик подкоманд CLI """

    def __init__(self, container: ServiceContainer):
        self.container = container
        self._commands: Dict[str, Callable[[RunConfigModel, AbstractResultWriter], Awaitable[str]]] = {
            "steady": self._steady,
            "sweep": self._sweep,
            "wigner": self._wigner,
            "sensing": self._sensing,
            "meanfield": self._meanfield,
        }

    async def handle(self, command: str, cfg: RunConfigModel) -> CommandResult:
        """ Выполнить подкоманду и вернуть код возврата вместе с выводом """
        start_time = time.time()
        if command not in self._commands:
            return CommandResult(command=command, exit_code=EXIT_USAGE, error=f"Unknown command '{command}'")

        try:
            writer: AbstractResultWriter = await self.container.get(AbstractResultWriter)
            output = await self._commands[command](cfg, writer)
            logger.info(f"Command {command} finished in {time.time() - start_time:.2f}s")
            result = CommandResult(command=command, exit_code=EXIT_OK, output=output)

        except DomainException as e:
            logger.error(f"Command {command} failed: {e}")
            result = CommandResult(command=command, exit_code=exit_code_for(e), error=str(e))

        except Exception as e:
            # файловый вывод и прочие сбои вне доменной модели
            logger.error(f"Unexpected error in command {command}: {e}")
            await self._record_error("unexpected_error")
            result = CommandResult(command=command, exit_code=EXIT_FAILURE, error=str(e))

        if cfg.metrics_out:
            try:
                await self._dump_metrics(cfg.metrics_out)
            except OSError as e:
                logger.error(f"Cannot write metrics to {cfg.metrics_out}: {e}")
                if result.exit_code == EXIT_OK:
                    result = CommandResult(command=command, exit_code=EXIT_FAILURE,
                                           error=f"cannot write metrics: {e}")
        return result

    async def _record_error(self, error_type: str) -> None:
        metrics: AbstractMetricsCollector = await self.container.get(AbstractMetricsCollector)
        await metrics.record_error(error_type)

    async def _steady(self, cfg: RunConfigModel, writer: AbstractResultWriter) -> str:
        use_case: SteadyStateUseCase = await self.container.get(SteadyStateUseCase)
        report = await use_case.execute(cfg.to_spec(), cfg.to_params(), adaptive=cfg.adaptive)
        return await writer.write_report(report, cfg.out)

    async def _sweep(self, cfg: RunConfigModel, writer: AbstractResultWriter) -> str:
        use_case: SweepUseCase = await self.container.get(SweepUseCase)
        header, rows = await use_case.execute(cfg.to_sweep(), cfg.jobs)
        return await writer.write_table(header, rows, cfg.out)

    async def _wigner(self, cfg: RunConfigModel, writer: AbstractResultWriter) -> str:
        use_case: WignerUseCase = await self.container.get(WignerUseCase)
        bounds = (cfg.re_min, cfg.re_max, cfg.im_min, cfg.im_max)
        header, rows = await use_case.execute(cfg.to_spec(), cfg.to_params(), bounds, cfg.resolution)
        return await writer.write_table(header, rows, cfg.out)

    async def _sensing(self, cfg: RunConfigModel, writer: AbstractResultWriter) -> str:
        use_case: SensingUseCase = await self.container.get(SensingUseCase)
        header, rows = await use_case.execute(
            cfg.to_params(), cfg.to_signal(), cfg.eta, cfg.r_values, cfg.intensity
        )
        return await writer.write_table(header, rows, cfg.out)

    async def _meanfield(self, cfg: RunConfigModel, writer: AbstractResultWriter) -> str:
        use_case: MeanFieldUseCase = await self.container.get(MeanFieldUseCase)
        report: Dict[str, Any] = await use_case.execute(ModelKind(cfg.model), cfg.to_params())
        return await writer.write_report(report, cfg.out)

    async def _dump_metrics(self, path: str) -> None:
        metrics: AbstractMetricsCollector = await self.container.get(AbstractMetricsCollector)
        data = await metrics.get_metrics()
        with open(path, "w", encoding="utf-8") as f:
            f.write(data["prometheus_metrics"])
        logger.debug(f"Metrics written to {path}")
