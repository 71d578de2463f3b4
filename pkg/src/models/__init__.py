__all__ = [
    'RunConfigModel',
    'SweepAxisModel',
    'CommandResult'
]

from src.models.cli_models import RunConfigModel, SweepAxisModel, CommandResult
