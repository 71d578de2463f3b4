import pytest

from src.domain.value_objects import ModelParams, ModelSpec, ModelKind
from src.infrastructure.services import PrometheusMetricsCollector


@pytest.fixture
async def container():
    """ Фикстура для создания тестового контейнера """
    from src.container import ServiceContainer
    container = ServiceContainer()

    await container.initialise()

    yield container

    # Очистка после теста
    await container.cleanup()


@pytest.fixture
async def factory():
    """ Фикстура для создания тестовой фабрики """
    from src.container import ServiceFactory
    return ServiceFactory()


@pytest.fixture
def metrics_collector():
    """Фикстура для создания экземпляра PrometheusMetricsCollector"""
    return PrometheusMetricsCollector()


@pytest.fixture
def lasing_params():
    """ Двухионный лазер выше порога: kappa_h > kappa_c, gamma_h < gamma_c """
    return ModelParams(g_h=1.0, g_c=1.0, gamma_h=1.5, gamma_c=3.0)


@pytest.fixture
def heating_params():
    """ Двухионный лазер в фазе нагрева: gamma_h > gamma_c """
    return ModelParams(g_h=1.0, g_c=0.5, gamma_h=1.5, gamma_c=1.0)


@pytest.fixture
def equal_gamma_params():
    """ Одноионный лазер с равными скоростями распада """
    return ModelParams(g_h=0.3, g_c=0.6, gamma_h=1.0, gamma_c=1.0)


@pytest.fixture
def two_ion_spec():
    return ModelSpec(kind=ModelKind.TWO_ION, n_max=20)


@pytest.fixture
def single_ion_spec():
    return ModelSpec(kind=ModelKind.SINGLE_ION, n_max=30)


@pytest.fixture
def ld3_sub_poissonian():
    """ Параметры LD3 с суб-пуассоновской статистикой и точка LD1 с тем же средним числом фононов """
    import json
    from pathlib import Path
    path = Path(__file__).parent / "fixtures" / "ld3_sub_poissonian.json"
    return json.loads(path.read_text(encoding="utf-8"))
