""" Functions for run directory management.

A run directory holds every artifact of a study: the reduced set, plans,
reports and traces. Commands read what earlier commands wrote, so a study
can be re-reported without solving again. Only run_meta.json holds
timestamps.
"""

import json
import logging
import os
import time
from pathlib import Path
from typing import Any, Dict, Union

import repday
from . import config
from .config import ENCODING
from .exceptions import RunDirectoryException

logger = logging.getLogger(__name__) # type: ignore

RUN_DIR = config.RUN_DIR # type: str

FULL_SET = "full_set.json"
REDUCED_SET = "reduced_set.json"
PARTITION = "partition.json"
PLAN = "plan.json"
PLAN_TRACE = "plan_trace.csv"
REFERENCE = "reference.json"
EVALUATION = "evaluation.json"
REPORT = "report.json"
FEEDBACK = "feedback.json"
FINAL_SET = "final_set.json"
TRACE_CSV = "trace.csv"
FEEDBACK_REPORTS = "feedback_reports"
SWEEP = "sweep.json"
SWEEP_CSV = "sweep.csv"
PER_DAY_CSV = "per_day_errors.csv"
PER_RD_CSV = "per_rd_errors.csv"
SUMMARY = "summary.md"
DISPATCH_CSV = "dispatch.csv"
RUN_META = "run_meta.json"

# The command that produces each artifact, for error messages.
PRODUCERS = {REDUCED_SET: "cluster", PARTITION: "cluster", PLAN: "plan",
             REFERENCE: "reference", EVALUATION: "evaluate", REPORT: "evaluate",
             FEEDBACK: "feedback", SWEEP: "sweep"}

def get_run_dir_num(parent_dir: str) -> int:
    """ Gets the number of the latest numbered run directory."""
    return max([int(fn.split(".")[0])
                for fn in os.listdir(parent_dir) if fn.split(".")[0].isdigit()]
               + [-1])

def prep_run_dir(directory: Union[str, Path, None] = None, numbered: bool = False) -> Path:
    """ Creates a run directory if needed.

    Args:
        directory: The run directory, or with `numbered` the parent under
            which a new directory named by the next free number is made.
            Defaults to RUN_DIR from settings.ini with `numbered` set.
        numbered: Whether to create a fresh numbered subdirectory.

    Returns:
        The path of the run directory.
    """

    if directory is None:
        directory, numbered = RUN_DIR, True
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    if numbered:
        path = path / str(get_run_dir_num(str(path)) + 1)
        path.mkdir()
    if not os.access(str(path), os.W_OK):
        raise RunDirectoryException("Run directory {} is not writable".format(path))
    return path

def artifact(run_dir: Path, name: str) -> Path:
    return Path(run_dir) / name

def require(run_dir: Path, name: str) -> Path:
    """ Path of an artifact that must already exist.

    Raises:
        repday.exceptions.RunDirectoryException: If it is missing, naming the
            command that produces it.
    """

    path = artifact(run_dir, name)
    if not path.is_file():
        producer = PRODUCERS.get(name)
        hint = " Run the {} command first.".format(producer) if producer else ""
        raise RunDirectoryException("{} is missing.{}".format(path, hint))
    return path

def write_json(path: Path, doc: Any) -> None:
    """ Writes JSON with sorted keys so reruns give identical bytes. """
    with Path(path).open("w", encoding=ENCODING) as f:
        json.dump(doc, f, indent=1, sort_keys=True)
        print(file=f)

def read_json(path: Path) -> Any:
    with Path(path).open(encoding=ENCODING) as f:
        return json.load(f)

def record_command(run_dir: Path, command: str, started: float) -> None:
    """ Adds a command's start time and duration to run_meta.json, along with
    the repday version. """

    path = artifact(run_dir, RUN_META)
    meta = read_json(path) if path.is_file() else {} # type: Dict[str, Any]
    meta["version"] = repday.__version__
    meta.setdefault("commands", []).append({
        "command": command,
        "started": time.strftime("%Y-%m-%dT%H:%M:%S", time.localtime(started)),
        "seconds": round(time.time() - started, 3)})
    write_json(path, meta)
