import pytest

from src.application.interfaces import AbstractMetricsCollector, AbstractResultWriter
from src.application.use_cases import SteadyStateUseCase, SweepUseCase, MeanFieldUseCase
from src.container import ServiceContainer, ServiceNotRegisteredError, get_container, cleanup_container
from src.infrastructure.services import PrometheusMetricsCollector, CsvResultWriter, JsonResultWriter


@pytest.mark.asyncio
async def test_create_service_container(container: ServiceContainer):
    """ Тест с созданием экземляра контейнера"""
    assert hasattr(container, '_services')
    assert hasattr(container, '_singletons')
    assert container._initialized


@pytest.mark.asyncio
async def test_with_container_fixture(container):
    """ Тест с извлечением зависимости """
    use_case = await container.get(SteadyStateUseCase)
    assert isinstance(use_case.metrics, PrometheusMetricsCollector)


@pytest.mark.asyncio
async def test_singletons_are_shared(container):
    """ Use case получают общий сборщик метрик, но сами создаются заново """
    first = await container.get(SweepUseCase)
    second = await container.get(MeanFieldUseCase)
    assert first is not await container.get(SweepUseCase)
    assert first.metrics is second.metrics
    assert await container.get(AbstractMetricsCollector) is first.metrics


@pytest.mark.asyncio
async def test_default_writer_is_csv(container):
    assert isinstance(await container.get(AbstractResultWriter), CsvResultWriter)


@pytest.mark.asyncio
async def test_unregistered_service():
    with pytest.raises(ServiceNotRegisteredError):
        await ServiceContainer().get(SteadyStateUseCase)


@pytest.mark.asyncio
async def test_cleanup_method(container):
    """ Тест с очисткой контейнера """
    await container.get(AbstractMetricsCollector)
    await container.cleanup()
    assert not container._singletons
    assert not container._initialized


@pytest.mark.asyncio
async def test_factory_creation(factory):
    """ Тестирую фабрику с ее статикой """
    c = await factory.create_container("json")
    assert isinstance(await c.get(AbstractResultWriter), JsonResultWriter)
    with pytest.raises(ServiceNotRegisteredError):
        await c.get(CsvResultWriter)


@pytest.mark.asyncio
async def test_global_container():
    """ Глобальный контейнер создается один раз и сбрасывается очисткой """
    try:
        container = await get_container()
        assert await get_container() is container
        assert isinstance(await container.get(AbstractMetricsCollector), PrometheusMetricsCollector)
        assert isinstance(await container.get(AbstractResultWriter), CsvResultWriter)
    finally:
        await cleanup_container()
    assert await get_container() is not container
    await cleanup_container()
