import argparse
import asyncio
import json
import sys
from typing import Optional, List, Dict, Any

from pydantic import ValidationError

from src.config import config
from src.container import get_container, cleanup_container
from src.handlers.command_handler import CommandHandler, DEFAULT_FORMATS
from src.logconfig import opt_logger as log
from src.models.cli_models import RunConfigModel, CommandResult

logger = log.setup_logger(name='cli')

COMMANDS = ("steady", "sweep", "wigner", "sensing", "meanfield")


def _float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")


def _name_list(text: str) -> List[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


def _add_common(parser: argparse.ArgumentParser) -> None:
    """ Флаги физических параметров и вывода, общие для всех подкоманд """
    parser.add_argument("--model", choices=("two-ion", "single-ion"))
    parser.add_argument("--gh", type=float, help="heating-ion coupling g_h")
    parser.add_argument("--gc", type=float, help="cooling-ion coupling g_c")
    parser.add_argument("--gamma-h", dest="gamma_h", type=float, help="heating-ion decay rate")
    parser.add_argument("--gamma-c", dest="gamma_c", type=float, help="cooling-ion decay rate")
    parser.add_argument("--eta-h", dest="eta_h", type=float)
    parser.add_argument("--eta-c", dest="eta_c", type=float)
    parser.add_argument("--r", type=float, help="squeeze magnitude")
    parser.add_argument("--beta", type=float, help="squeeze phase")
    parser.add_argument("--nmax", type=int, help="Fock truncation")
    parser.add_argument("--ld-order", dest="ld_order", type=int, choices=(1, 3))
    parser.add_argument("--squeezed", action="store_true", default=None)
    parser.add_argument("--out", help="write the result to this file instead of stdout")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--jobs", type=int)
    parser.add_argument("--config", help="JSON file with default flag values")
    parser.add_argument("--metrics-out", dest="metrics_out", help="write Prometheus metrics to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phonon-laser", description="Trapped-ion phonon laser toolkit")
    subparsers = parser.add_subparsers(dest="command", required=True)

    steady = subparsers.add_parser("steady", help="steady-state report for one parameter point")
    _add_common(steady)
    steady.add_argument("--adaptive", action="store_true", default=None,
                        help="double nmax until the truncation is sufficient")

    sweep = subparsers.add_parser("sweep", help="two-dimensional parameter sweep")
    _add_common(sweep)
    sweep.add_argument("--axis1", help="NAME:MIN:MAX:COUNT[:log|lin]")
    sweep.add_argument("--axis2", help="NAME:MIN:MAX:COUNT[:log|lin]")
    sweep.add_argument("--outputs", type=_name_list, help="comma-separated output columns")

    wigner = subparsers.add_parser("wigner", help="Wigner function grid of the steady state")
    _add_common(wigner)
    wigner.add_argument("--re-min", dest="re_min", type=float)
    wigner.add_argument("--re-max", dest="re_max", type=float)
    wigner.add_argument("--im-min", dest="im_min", type=float)
    wigner.add_argument("--im-max", dest="im_max", type=float)
    wigner.add_argument("--resolution", type=int)

    sensing = subparsers.add_parser("sensing", help="force-sensing table over squeeze values")
    _add_common(sensing)
    sensing.add_argument("--r-values", dest="r_values", type=_float_list)
    sensing.add_argument("--signal-amplitude", dest="signal_amplitude", type=float)
    sensing.add_argument("--signal-phase", dest="signal_phase", type=float)
    sensing.add_argument("--eta", type=float, help="Lamb-Dicke parameter for the squeeze limit")
    sensing.add_argument("--intensity", type=float, help="laser intensity, mean-field value by default")

    meanfield = subparsers.add_parser("meanfield", help="mean-field intensity and phase, no solve")
    _add_common(meanfield)
    return parser


def load_config(parser: argparse.ArgumentParser, args: argparse.Namespace) -> RunConfigModel:
    """ Значения файла --config, поверх которых применяются заданные флаги """
    overrides: Dict[str, Any] = {
        key: value for key, value in vars(args).items() if key not in ("command", "config")
    }
    try:
        base = RunConfigModel()
        if args.config:
            with open(args.config, encoding="utf-8") as f:
                base = RunConfigModel.model_validate(json.load(f))
        cfg = base.merged(overrides)
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        parser.error(f"invalid configuration: {e}")

    missing = cfg.missing_params()
    if missing:
        parser.error(f"the following arguments are required: {', '.join(missing)}")
    return cfg


async def run(command: str, cfg: RunConfigModel) -> CommandResult:
    """ Выполнить подкоманду с глобальным контейнером """
    container = await get_container(cfg.format or DEFAULT_FORMATS.get(command, "csv"))
    try:
        return await CommandHandler(container).handle(command, cfg)
    finally:
        await cleanup_container()


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = load_config(parser, args)
    except SystemExit as e:
        return int(e.code or 0)

    logger.debug(f"Configuration: Debug={config.debug}, Log Level={config.log_level}")
    result = asyncio.run(run(args.command, cfg))
    if result.exit_code == 0:
        if cfg.out is None:
            sys.stdout.write(result.output)
            if not result.output.endswith("\n"):
                sys.stdout.write("\n")
    else:
        sys.stderr.write(f"error: {result.error}\n")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
