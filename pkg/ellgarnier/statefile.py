"""Reading and writing of states, run configurations and records.

All files are JSON. Complex numbers are stored as ``[re, im]`` pairs and
floats are written with ``repr`` precision, so a state survives a write/read
cycle bit-exactly. No timestamps are written: identical runs produce
identical files.

State sources are either fixture names or paths:

    * ``fixture-1``: the reference state of order ``m = 1``,
    * ``random-m<M>``: a seeded random state of order ``M``,
    * any other string is read as a JSON state file.
"""
import dataclasses
import json
import logging
import re
from pathlib import Path

from ellgarnier import __version__
from ellgarnier.garnier import GarnierState, fixture, random_state
from ellgarnier.painleve import PainleveState


__all__ = [
    "RunConfig",
    "COMMANDS",
    "state_from_dict",
    "load_state",
    "save_state",
    "dumps",
    "write_json",
    "write_records",
    "header",
]

logger = logging.getLogger(__name__)

COMMANDS = ("theta-eval", "verify", "orbit", "base-points", "deform")

_STATE_KINDS = {
    "garnier": GarnierState,
    "painleve": PainleveState,
}

_RANDOM_SOURCE = re.compile(r"random-m(?P<m>\d+)")


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Settings of one command line run.

    A configuration is read from an optional JSON file and then updated by
    the command line flags that were actually given.
    """

    command: str
    state: str = "fixture-1"
    steps: int = 0
    tol: float = None
    out: str = None
    seed: int = 0
    program: str = ""
    samples: int = 5
    log_level: str = "WARNING"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"Unknown command {self.command!r}.")
        if self.steps < 0:
            raise ValueError(f"Number of steps has to be >= 0, got {self.steps}.")
        if self.samples < 1:
            raise ValueError(f"Number of samples has to be >= 1, got {self.samples}.")
        if self.tol is not None and not self.tol > 0:
            raise ValueError(f"Tolerance has to be positive, got {self.tol}.")

    @classmethod
    def from_file(cls, path, **overrides):
        """Read a configuration file and apply all overrides that are not ``None``."""
        with open(path, encoding="utf-8") as fp:
            data = json.load(fp)

        if not isinstance(data, dict):
            raise ValueError(f'"{path}" does not contain a JSON object.')

        unknown = set(data) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ValueError(f"Unknown configuration keys: {sorted(unknown)}.")

        logger.info(f'Read configuration "{path}".')
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def replace(self, **overrides):
        """Return a copy with all overrides that are not ``None`` applied."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        return dataclasses.replace(self, **changes)

    def tolerance(self, default):
        return default if self.tol is None else self.tol

    def to_dict(self):
        return dataclasses.asdict(self)


def state_from_dict(data):
    """Create a Garnier or normalized state from a state dictionary."""
    try:
        kind = data["kind"]
    except KeyError:
        raise KeyError("State files have to name their `kind`.")

    if kind not in _STATE_KINDS:
        raise ValueError(f"Unknown state kind {kind!r}.")

    return _STATE_KINDS[kind].from_dict(data)


def load_state(source, seed=0):
    """Return the state named by ``source`` (fixture name or file path).

    Raises:
        OSError: If the file cannot be read.
        json.JSONDecodeError: If the file is no valid JSON.
        KeyError, ValueError: If the content is no valid state.
    """
    if source == "fixture-1":
        return fixture(seed=seed)

    match = _RANDOM_SOURCE.fullmatch(source)
    if match:
        return random_state(int(match["m"]), seed=seed)

    with open(source, encoding="utf-8") as fp:
        data = json.load(fp)

    logger.info(f'Read state "{source}".')
    return state_from_dict(data)


def dumps(data):
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def write_json(data, path=None, stream=None):
    """Write ``data`` to ``path`` or, if no path is given, to ``stream``."""
    text = dumps(data)
    if path is None:
        stream.write(text)
        return

    Path(path).write_text(text, encoding="utf-8")
    logger.info(f'Created "{path}".')


def save_state(state, path):
    write_json(state.to_dict(), path)


def write_records(records, head, path=None, stream=None):
    """Write a header line and one line per record (line-delimited JSON).

    Without ``path`` the lines go to ``stream``.
    """
    lines = [json.dumps(head, sort_keys=True)]
    lines += [json.dumps(record, sort_keys=True) for record in records]
    text = "\n".join(lines) + "\n"

    if path is None:
        stream.write(text)
        return

    Path(path).write_text(text, encoding="utf-8")
    logger.info(f'Created "{path}" with {len(records)} records.')


def header(config, tolerance=None):
    """Return the header common to all outputs of a run."""
    head = {
        "command": config.command,
        "seed": config.seed,
        "tolerance": tolerance if tolerance is not None else config.tol,
        "version": __version__,
    }
    if config.command != "theta-eval":
        head["source"] = config.state
    return head
