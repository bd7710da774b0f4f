"""Command-line controller."""

import argparse
import logging
from pathlib import Path
from typing import Callable, Dict, List, Optional

from app.core.config import load_experiment_config, settings
from app.core.logging_config import setup_logging
from app.schemas.config import ExperimentConfig
from app.use_cases.embed import EmbedUseCase
from app.use_cases.pretrain import PretrainUseCase
from app.use_cases.probe import ProbeUseCase
from app.use_cases.synth import SynthUseCase
from app.use_cases.verification import VerificationUseCase
from exceptions.exceptions import CustomException, ExitStatus

logger = logging.getLogger(__name__)

VERBS = (
    "synth",
    "pretrain",
    "embed",
    "probe-classify",
    "probe-regress",
    "gradcheck",
    "relcheck",
)


class UsageError(Exception):
    """Argument parsing failed."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage()
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    """Parser with one sub-command per verb and the shared flags."""
    parser = _Parser(prog="nara", description="Relation-aware geoentity encoder.")
    commands = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    for verb in VERBS:
        command = commands.add_parser(verb)
        command.add_argument("--config", help="JSON config file")
        command.add_argument("--seed", type=int, help="root seed")
        command.add_argument("--out", default=settings.OUTPUT_DIR, help="output dir")
        command.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="config override, repeatable",
        )
        if verb in ("pretrain", "embed", "probe-classify", "probe-regress"):
            command.add_argument("--data", help="dataset file")
        if verb in ("embed", "probe-classify", "probe-regress"):
            command.add_argument("--checkpoint", help="checkpoint file")
        if verb in ("probe-classify", "probe-regress"):
            command.add_argument("--labels", help="labels file")
        if verb == "gradcheck":
            command.add_argument("--windows", type=int, default=20)
        if verb == "relcheck":
            command.add_argument("--pairs", type=int, default=1000)
    return parser


def _path(value: Optional[str], out: Path, name: str) -> Path:
    return Path(value) if value else out / name


def _synth(args, config: ExperimentConfig) -> int:
    SynthUseCase(args.out).generate(config)
    return ExitStatus.OK


def _pretrain(args, config: ExperimentConfig) -> int:
    data = _path(args.data, Path(args.out), settings.DATASET_NAME)
    PretrainUseCase(data, args.out).pretrain(config)
    return ExitStatus.OK


def _embed(args, config: ExperimentConfig) -> int:
    out = Path(args.out)
    data = _path(args.data, out, settings.DATASET_NAME)
    checkpoint = _path(args.checkpoint, out, settings.CHECKPOINT_NAME)
    EmbedUseCase(data, checkpoint, out).embed(config)
    return ExitStatus.OK


def _probe_use_case(args) -> ProbeUseCase:
    out = Path(args.out)
    return ProbeUseCase(
        _path(args.data, out, settings.DATASET_NAME),
        _path(args.labels, out, settings.LABELS_NAME),
        _path(args.checkpoint, out, settings.CHECKPOINT_NAME),
        out,
    )


def _probe_classify(args, config: ExperimentConfig) -> int:
    _probe_use_case(args).classify(config)
    return ExitStatus.OK


def _probe_regress(args, config: ExperimentConfig) -> int:
    _probe_use_case(args).regress(config)
    return ExitStatus.OK


def _gradcheck(args, config: ExperimentConfig) -> int:
    report = VerificationUseCase(args.out).gradcheck(config, n_windows=args.windows)
    for name, error in report.errors.items():
        print(f"{name:>6}  {error:.3e}")
    return ExitStatus.OK if report.passed else ExitStatus.CHECK_FAILED


def _relcheck(args, config: ExperimentConfig) -> int:
    report = VerificationUseCase(args.out).relcheck(config, n_pairs=args.pairs)
    print(
        f"agreement {report.agreement:.2f}% over {report.n_pairs} pairs, "
        f"{report.symmetry_violations} symmetry violations"
    )
    return ExitStatus.OK if report.passed else ExitStatus.CHECK_FAILED


HANDLERS: Dict[str, Callable[..., int]] = {
    "synth": _synth,
    "pretrain": _pretrain,
    "embed": _embed,
    "probe-classify": _probe_classify,
    "probe-regress": _probe_regress,
    "gradcheck": _gradcheck,
    "relcheck": _relcheck,
}


def run_command(argv: Optional[List[str]] = None) -> int:
    """Run one verb and return the process exit status."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        logger.error(f"Usage error: {e}")
        return ExitStatus.USAGE
    except SystemExit as e:
        return ExitStatus.OK if e.code in (0, None) else ExitStatus.USAGE

    try:
        config = load_experiment_config(args.config, args.overrides, args.seed)
        return int(HANDLERS[args.verb](args, config))

    except CustomException as e:
        logger.error(f"{args.verb} failed: {e.detail}")
        return int(e.status_code)


def main() -> None:
    """Console entry point."""
    setup_logging(settings.LOG_LEVEL)
    raise SystemExit(run_command())
