"""
Command routing
CommandRouter collects subcommands the way APIRouter collects endpoints; CommandApp
includes routers under a prefix and dispatches parsed arguments to them
"""

import argparse
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from config import settings
from errors import CrsError, InvariantViolation
from models import RunConfig, TableRow
import storage

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

# Arguments that locate inputs/outputs rather than change results
_OUTPUT_KEYS = {"out", "csv", "map_out", "output_dir", "results_dir", "target_dir", "config", "log_level", "workers"}
_TOLERANCE_KEYS = {"tol", "skip_tol", "z"}


class CommandError(Exception):
    """Raised by handlers to stop with an exit code and a message"""

    def __init__(self, exit_code: int, detail: str):
        super().__init__(detail)
        self.exit_code = exit_code
        self.detail = detail


@dataclass
class CommandOutcome:
    """What a handler reports back: exit status and table rows for the summary"""
    exit_code: int = EXIT_OK
    rows: List[TableRow] = field(default_factory=list)
    extra: Dict[str, Any] = field(default_factory=dict)


Handler = Callable[[argparse.Namespace, RunConfig], CommandOutcome]


def arg(*flags: str, **kwargs: Any) -> Tuple[Tuple[str, ...], Dict[str, Any]]:
    """Argument spec for CommandRouter.command"""
    return flags, kwargs


@dataclass
class _Command:
    path: Tuple[str, ...]
    handler: Handler
    help: str
    arguments: Sequence[Tuple[Tuple[str, ...], Dict[str, Any]]]


class CommandRouter:
    """Group of subcommands registered with a decorator"""

    def __init__(self):
        self.commands: List[_Command] = []

    def command(self, path: str, help: str = "", arguments: Sequence = ()):
        def decorator(handler: Handler) -> Handler:
            self.commands.append(_Command(tuple(path.split()), handler, help, list(arguments)))
            return handler
        return decorator


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=settings.DEFAULT_SEED, help="Master seed")
    common.add_argument("--workers", type=int, default=None, help="Worker threads")
    common.add_argument("--output-dir", default=settings.OUTPUT_DIR, help="Directory for summaries")
    return common


def _as_bool(value: str) -> bool:
    return str(value).strip().lower() in ("1", "true", "yes", "on")


class CommandApp:
    """Top-level command tree"""

    def __init__(self, prog: str, description: str):
        self.prog = prog
        self.description = description
        self.commands: List[_Command] = []

    def include_router(self, router: CommandRouter, prefix: str = "") -> None:
        head = tuple(prefix.split())
        for cmd in router.commands:
            self.commands.append(_Command(head + cmd.path, cmd.handler, cmd.help, cmd.arguments))

    def build_parser(self, defaults: Optional[Dict[str, str]] = None) -> argparse.ArgumentParser:
        """
        Nested subparsers, one leaf per command path

        Args:
            defaults: Config-file values keyed by argument dest; flags override them
        """
        defaults = defaults or {}
        parser = argparse.ArgumentParser(prog=self.prog, description=self.description)
        parser.add_argument("--config", default=None, help="Key-value config file with flag defaults")
        parser.add_argument("--log-level", default=None, help="Override LOG_LEVEL")
        common = _common_parser()

        groups: Dict[Tuple[str, ...], Any] = {(): parser.add_subparsers(dest="command_0", required=True)}
        for cmd in self.commands:
            for depth in range(1, len(cmd.path)):
                prefix = cmd.path[:depth]
                if prefix in groups:
                    continue
                group_parser = groups[prefix[:-1]].add_parser(prefix[-1], help=f"{' '.join(prefix)} commands")
                groups[prefix] = group_parser.add_subparsers(dest=f"command_{depth}", required=True)

            leaf = groups[cmd.path[:-1]].add_parser(cmd.path[-1], help=cmd.help, parents=[common])
            for flags, kwargs in cmd.arguments:
                leaf.add_argument(*flags, **kwargs)
            leaf.set_defaults(_command=cmd)

            # config-file defaults for the flags this leaf knows
            known = {action.dest: action for action in leaf._actions}
            overrides = {}
            for key, value in defaults.items():
                action = known.get(key)
                if action is None:
                    continue
                if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
                    overrides[key] = _as_bool(value)
                else:
                    overrides[key] = value
            if overrides:
                leaf.set_defaults(**overrides)
        return parser

    def run_config(self, cmd: _Command, args: argparse.Namespace) -> RunConfig:
        values = {k: v for k, v in vars(args).items() if not k.startswith("command_") and k != "_command"}
        outputs = {k: str(v) for k, v in values.items() if k in _OUTPUT_KEYS and v is not None}
        tolerances = {k: float(v) for k, v in values.items() if k in _TOLERANCE_KEYS and v is not None}
        parameters = {
            k: v for k, v in values.items()
            if k not in _OUTPUT_KEYS and k not in _TOLERANCE_KEYS
            and k not in ("seed", "trials", "instance", "generator")
        }
        return RunConfig(
            subcommand=" ".join(cmd.path),
            instance=values.get("instance"),
            generator=values.get("generator") or (cmd.path[1] if cmd.path[0] == "gen" and len(cmd.path) > 1 else None),
            parameters=parameters,
            trials=values.get("trials"),
            seed=values["seed"],
            outputs=outputs,
            tolerances=tolerances,
        )

    def dispatch(self, args: argparse.Namespace) -> int:
        """
        Run the selected command and write its summary

        Returns:
            0 on success, 1 when a check failed, 2 on usage or input errors
        """
        cmd: _Command = args._command
        name = "-".join(cmd.path)
        run_config = self.run_config(cmd, args)
        try:
            outcome = cmd.handler(args, run_config)
        except CommandError as e:
            logger.error(f"❌ {name}: {e.detail}")
            return e.exit_code
        except InvariantViolation as e:
            logger.error(f"❌ {name}: invariant violated: {e}")
            return EXIT_CHECK_FAILED
        except CrsError as e:
            logger.error(f"❌ {name}: {type(e).__name__}: {e}")
            return EXIT_USAGE

        storage.save_summary(name, outcome.rows, run_config, args.output_dir,
                             {**outcome.extra, "exit_code": outcome.exit_code})
        if outcome.exit_code == EXIT_OK:
            logger.info(f"✅ {name} finished")
        else:
            logger.warning(f"⚠️ {name} finished with failed checks")
        return outcome.exit_code
