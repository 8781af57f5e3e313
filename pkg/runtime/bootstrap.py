"""
Bootstrap Layer - Parse the command line, initialize components and run one command
main.py only calls start() from here
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

# Add project root to path
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from utils.logger import setup_logger, get_logger, cleanup_old_logs
from core.constants import APP_NAME, APP_VERSION, EXIT_CONFIG_ERROR
from core.config import Command, ConfigManager
from core.commands.command_executor import CommandExecutor, CommandResult, CommandStatus
from core.errors import SchemaError

logger = get_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=APP_NAME,
        description="Structure-preserving integration of dissipative mechanical systems",
    )
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {APP_VERSION}")
    parser.add_argument("command", choices=[c.value for c in Command], help="What to do with the run description")
    parser.add_argument("--config", required=True, type=Path, help="JSON run description")
    parser.add_argument("--output", help="CSV output path (overrides the run description)")
    parser.add_argument("--seed", type=int, help="Seed for randomized initial conditions")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")
    parser.add_argument("--log-file", action="store_true", help="Also log to logs/gdr.log")
    return parser


class GdrApp:
    """Wires the configuration layer to the command executor for one invocation"""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config_manager: Optional[ConfigManager] = None
        self.command_executor: Optional[CommandExecutor] = None

    def initialize(self):
        """Load and validate the run description"""
        logger.info(f"Initializing {APP_NAME} {APP_VERSION}...")

        # 1. Load configuration
        self.config_manager = ConfigManager(self.args.config)
        self.config_manager.load()

        # The command line decides the command; the document may name one too
        self.config_manager.set("command", self.args.command)

        self.run_config = self.config_manager.parse(output=self.args.output, seed=self.args.seed)
        logger.info(f"Loaded {self.args.config}: system {self.config_manager.get('system')['kind']}")
        logger.info(f"Configuration ready: {self.run_config.command.value} -> {self.run_config.output}")

        # 2. Initialize command executor
        self.command_executor = CommandExecutor()

    def run(self) -> CommandResult:
        result = self.command_executor.execute(self.run_config)
        if result.status == CommandStatus.SUCCESS or result.outputs:
            config_copy = self.run_config.output.with_name(self.run_config.output.name + ".config.json")
            self.config_manager.save(config_copy)
        if result.status != CommandStatus.SUCCESS:
            sys.stderr.write(f"{APP_NAME}: {result.message}\n")
        return result


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command and return its exit code"""
    args = build_parser().parse_args(argv)

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    setup_logger(level=level, to_file=args.log_file)
    if args.log_file:
        cleanup_old_logs()

    app = GdrApp(args)
    try:
        app.initialize()
    except (SchemaError, FileNotFoundError) as e:
        logger.error(f"Invalid run description {args.config}: {e}")
        sys.stderr.write(f"{APP_NAME}: {e}\n")
        return EXIT_CONFIG_ERROR

    return app.run().exit_code


def start():
    """Entry point called by main.py and the gdr console script"""
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logger.info("Interrupted")
        sys.exit(130)
