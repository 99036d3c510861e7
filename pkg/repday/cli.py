""" Command line interface.

Every command works in a run directory (--out). Commands compose through the
files they leave there:

    repday synthesize --out run
    repday cluster --out run --timeseries run/timeseries.csv -k 20
    repday plan --out run --system run/system.json
    repday reference --out run --system run/system.json --timeseries run/timeseries.csv
    repday evaluate --out run --system run/system.json --timeseries run/timeseries.csv
    repday report --out run

Settings may also come from an INI file given with --config, with keys under a
[run] section named like the long flags (with underscores). Flags win over
the file.

Exit codes: 0 ok, 1 internal error, 2 I/O error, 3 capacity exceeded,
4 invalid input.
"""

import argparse
import configparser
import logging
import logging.config
import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, NamedTuple, Optional

from . import config
from . import experiment
from . import utils
from .clustering import cluster_days
from .context_manager import RunLock
from .datasets import synthetic
from .exceptions import (ClusterCountException, ConfigurationException,
                         DimensionMismatchException, EmptyScenarioSetException,
                         EnumerationLimitException, FeedbackConfigurationException,
                         FormatException, NormalizationException,
                         ProvenanceException, ReferenceUnavailableException,
                         RunDirectoryException, ValidationException)
from .feedback import FeedbackConfig, FeedbackTrace, baseline_sweep, feedback_variants, run_feedback
from .metrics import ErrorReport, build_report
from .opcost import DayCostCache, op_cost, write_dispatch_csv
from .results import per_day_table, per_rd_table, sweep_row, sweep_table, write_summary, write_table
from .scenario import ScenarioSet, load_full_set, write_timeseries_csv
from .solve import (PlanResult, evaluate_decision, fingerprint, load_plan, plan,
                    reference_solution, save_plan, write_trace_csv)
from .sysmodel import SystemModel, decision_from_bits, describe, load_system, save_system

logger = logging.getLogger(__name__) # type: ignore

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_IO = 2
EXIT_CAPACITY = 3
EXIT_VALIDATION = 4

FIXTURES = {"three-bus": synthetic.three_bus_system,
            "five-bus": synthetic.five_bus_system,
            "six-bus": synthetic.six_bus_system} # type: Dict[str, Callable[[], SystemModel]]

class RunConfig(NamedTuple):
    """ Everything a command may need. Unset optional values are None. """
    system: Optional[Path] = None
    timeseries: Optional[Path] = None
    out: Optional[Path] = None
    jobs: int = config.JOBS
    enum_limit: int = config.ENUM_LIMIT
    k: Optional[int] = None
    rd_counts: List[int] = []
    starts: List[int] = []
    n0: Optional[int] = None
    n_loop: Optional[int] = None
    n_step: int = 1
    n_bad: int = 1
    decision: Optional[str] = None
    dispatch: bool = False
    fixture: str = "three-bus"
    seed: int = 0
    days: int = 365
    peak_days: int = 4
    # All algorithms are deterministic; kept so configs can state it.
    deterministic: bool = True

def _to_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError("not a boolean: {!r}".format(text))

_CONVERTERS = {"system": Path, "timeseries": Path, "out": Path,
               "jobs": int, "enum_limit": int, "k": int,
               "rd_counts": utils.parse_int_list, "starts": utils.parse_int_list,
               "n0": int, "n_loop": int, "n_step": int, "n_bad": int,
               "decision": str, "dispatch": _to_bool, "fixture": str,
               "seed": int, "days": int, "peak_days": int,
               "deterministic": _to_bool} # type: Dict[str, Callable[[str], Any]]

def read_config_file(path: Path) -> Dict[str, Any]:
    """ Reads the [run] section of an INI file into RunConfig field values.

    Raises:
        FileNotFoundError: If the file does not exist.
        repday.exceptions.ConfigurationException: On unknown keys or values
            that do not parse.
    """

    if not path.is_file():
        raise FileNotFoundError("Config file {} does not exist".format(path))
    parser = configparser.ConfigParser()
    try:
        parser.read(str(path), encoding=config.ENCODING)
    except configparser.Error as err:
        raise ConfigurationException("Cannot parse {}: {}".format(path, err))
    if not parser.has_section("run"):
        raise ConfigurationException("{} has no [run] section".format(path))
    values = {} # type: Dict[str, Any]
    for key, text in parser.items("run"):
        key = key.replace("-", "_")
        if key not in _CONVERTERS:
            raise ConfigurationException("{}: unknown key {!r}".format(path, key))
        try:
            values[key] = _CONVERTERS[key](text)
        except ValueError as err:
            raise ConfigurationException("{}: bad value for {}: {}".format(path, key, err))
    return values

def load_run_config(args: argparse.Namespace) -> RunConfig:
    """ Merges the config file, if any, with command line flags. Flags that
    were given win. """

    values = {} # type: Dict[str, Any]
    if getattr(args, "config", None) is not None:
        values.update(read_config_file(Path(args.config)))
    for key in RunConfig._fields:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return RunConfig(**values)

def _need(cfg: RunConfig, key: str) -> Any:
    value = getattr(cfg, key)
    if value is None:
        raise ConfigurationException(
            "Missing {0}: give --{1} or set {0} in the [run] section".format(
                key, key.replace("_", "-")))
    return value

def _existing(cfg: RunConfig, key: str) -> Path:
    path = Path(_need(cfg, key))
    if not path.is_file():
        raise FileNotFoundError("{} file {} does not exist".format(key, path))
    return path

def _reference_if_cached(model: SystemModel, full: ScenarioSet,
                         run_dir: Path) -> Optional[PlanResult]:
    """ The cached reference plan, if it was computed for these inputs. """

    path = experiment.artifact(run_dir, experiment.REFERENCE)
    if not path.is_file():
        return None
    doc = experiment.read_json(path)
    if doc.get("fingerprint") != fingerprint(model, full):
        logger.warning("Ignoring %s: it was computed for other inputs", path)
        return None
    return PlanResult.from_json(doc)

def _synthesize(cfg: RunConfig, run_dir: Path) -> None:
    if cfg.fixture not in FIXTURES:
        raise ConfigurationException("Unknown fixture {!r}; choose from {}".format(
            cfg.fixture, sorted(FIXTURES)))
    system_path = cfg.system or experiment.artifact(run_dir, "system.json")
    series_path = cfg.timeseries or experiment.artifact(run_dir, "timeseries.csv")
    save_system(FIXTURES[cfg.fixture](), system_path)
    load, wind = synthetic.synthetic_year(cfg.days, cfg.seed, cfg.peak_days)
    write_timeseries_csv(series_path, load, wind)
    logger.info("Wrote synthetic system to %s and %d days of data to %s",
                system_path, cfg.days, series_path)

def _cluster(cfg: RunConfig, run_dir: Path) -> None:
    full = load_full_set(_existing(cfg, "timeseries"))
    partition, reduced = cluster_days(full, _need(cfg, "k"))
    reduced.save(experiment.artifact(run_dir, experiment.REDUCED_SET))
    experiment.write_json(experiment.artifact(run_dir, experiment.PARTITION),
                          partition.to_json())

def _plan(cfg: RunConfig, run_dir: Path) -> None:
    model = load_system(_existing(cfg, "system"))
    reduced = ScenarioSet.load(experiment.require(run_dir, experiment.REDUCED_SET))
    result = plan(model, reduced, jobs=cfg.jobs, limit=cfg.enum_limit, keep_trace=True)
    save_plan(result, experiment.artifact(run_dir, experiment.PLAN),
              built=describe(model, result.decision))
    write_trace_csv(experiment.artifact(run_dir, experiment.PLAN_TRACE), result)

def _reference(cfg: RunConfig, run_dir: Path) -> None:
    model = load_system(_existing(cfg, "system"))
    full = load_full_set(_existing(cfg, "timeseries"))
    reference_solution(model, full, run_dir, jobs=cfg.jobs, limit=cfg.enum_limit)

def _evaluate(cfg: RunConfig, run_dir: Path) -> None:
    model = load_system(_existing(cfg, "system"))
    full = load_full_set(_existing(cfg, "timeseries"))
    approx = None # type: Optional[PlanResult]
    if cfg.decision is not None:
        bits = [int(ch) for ch in cfg.decision.strip() if ch in "01"]
        if len(bits) != len(cfg.decision.strip()):
            raise ConfigurationException(
                "Decision {!r} must be a string of 0s and 1s".format(cfg.decision))
        decision = decision_from_bits(model, bits)
    else:
        approx = load_plan(experiment.require(run_dir, experiment.PLAN))
        decision = decision_from_bits(model, approx.decision.bits)

    cache = DayCostCache(model)
    evaluation = evaluate_decision(model, decision, full, cache=cache, jobs=cfg.jobs)
    doc = evaluation.to_json()
    doc["built"] = describe(model, decision)
    experiment.write_json(experiment.artifact(run_dir, experiment.EVALUATION), doc)

    if cfg.dispatch:
        dispatches = op_cost(model, decision, full, keep_dispatch=True).dispatches
        write_dispatch_csv(experiment.artifact(run_dir, experiment.DISPATCH_CSV),
                           model, dispatches or [], full.day_ids())

    reduced_path = experiment.artifact(run_dir, experiment.REDUCED_SET)
    if approx is not None and reduced_path.is_file():
        reduced = ScenarioSet.load(reduced_path)
        report = build_report(model, full, reduced, approx,
                              _reference_if_cached(model, full, run_dir),
                              cache=cache, jobs=cfg.jobs)
        report.save(experiment.artifact(run_dir, experiment.REPORT))

def _feedback(cfg: RunConfig, run_dir: Path) -> None:
    model = load_system(_existing(cfg, "system"))
    full = load_full_set(_existing(cfg, "timeseries"))
    fb_cfg = FeedbackConfig(_need(cfg, "n0"), _need(cfg, "n_loop"), cfg.n_step, cfg.n_bad)
    final, trace = run_feedback(model, full, fb_cfg,
                                _reference_if_cached(model, full, run_dir),
                                jobs=cfg.jobs, limit=cfg.enum_limit)
    final.save(experiment.artifact(run_dir, experiment.FINAL_SET))
    trace.save(experiment.artifact(run_dir, experiment.FEEDBACK))
    trace.write_csv(experiment.artifact(run_dir, experiment.TRACE_CSV))
    reports_dir = experiment.artifact(run_dir, experiment.FEEDBACK_REPORTS)
    reports_dir.mkdir(exist_ok=True)
    for record in trace.records:
        record.report.save(reports_dir / "loop_{:03d}.json".format(record.loop))

def _sweep(cfg: RunConfig, run_dir: Path) -> None:
    model = load_system(_existing(cfg, "system"))
    full = load_full_set(_existing(cfg, "timeseries"))
    if not cfg.rd_counts:
        raise ConfigurationException("Missing rd_counts: give --rd-counts 20,40,60")
    reference = _reference_if_cached(model, full, run_dir)
    cache = DayCostCache(model)
    baseline = baseline_sweep(model, full, cfg.rd_counts, reference,
                              cache=cache, jobs=cfg.jobs, limit=cfg.enum_limit)
    variants = [] # type: List[Any]
    if cfg.starts:
        variants = feedback_variants(model, full, cfg.starts, _need(cfg, "n_loop"),
                                     cfg.n_step, cfg.n_bad, reference,
                                     cache=cache, jobs=cfg.jobs, limit=cfg.enum_limit)
    experiment.write_json(experiment.artifact(run_dir, experiment.SWEEP), {
        "baseline": [{"rd_count": count, "report": report.to_json()}
                     for count, report in baseline],
        "feedback": [{"start": start, "trace": trace.to_json()}
                     for start, trace in variants]})

def _report(cfg: RunConfig, run_dir: Path) -> None:
    report_path = experiment.artifact(run_dir, experiment.REPORT)
    feedback_path = experiment.artifact(run_dir, experiment.FEEDBACK)
    sweep_path = experiment.artifact(run_dir, experiment.SWEEP)
    trace = FeedbackTrace.load(feedback_path) if feedback_path.is_file() else None

    if report_path.is_file():
        report = ErrorReport.load(report_path)
    elif trace is not None:
        report = trace.final.report
    else:
        report = ErrorReport.load(experiment.require(run_dir, experiment.REPORT))

    write_table(per_day_table(report), experiment.artifact(run_dir, experiment.PER_DAY_CSV))
    write_table(per_rd_table(report), experiment.artifact(run_dir, experiment.PER_RD_CSV))

    if sweep_path.is_file():
        doc = experiment.read_json(sweep_path)
        baseline = [(entry["rd_count"], ErrorReport.from_json(entry["report"]))
                    for entry in doc["baseline"]]
        variants = [(entry["start"], FeedbackTrace.from_json(entry["trace"]))
                    for entry in doc["feedback"]]
    else:
        baseline = [(report.rd_count, report)] if report_path.is_file() else []
        variants = []
    if trace is not None:
        variants.append((trace.cfg.n0, trace))
    table = sweep_table(baseline, variants)
    if not len(table):
        table = sweep_table([(report.rd_count, report)])
    write_table(table, experiment.artifact(run_dir, experiment.SWEEP_CSV))

    extra = ["", "Sweep rows: {} baseline, {} feedback".format(
        len(baseline), sum(len(t) for _, t in variants))]
    write_summary(report, experiment.artifact(run_dir, experiment.SUMMARY), extra)

def exit_code(err: BaseException) -> int:
    """ Maps an exception to the exit code of the command that raised it. """

    if isinstance(err, EnumerationLimitException):
        return EXIT_CAPACITY
    if isinstance(err, (ValidationException, DimensionMismatchException,
                        FormatException, ConfigurationException,
                        FeedbackConfigurationException, ClusterCountException,
                        ProvenanceException, NormalizationException,
                        EmptyScenarioSetException, ReferenceUnavailableException)):
        return EXIT_VALIDATION
    if isinstance(err, (OSError, RunDirectoryException)):
        return EXIT_IO
    return EXIT_INTERNAL

def setup_logging() -> None:
    logging.config.fileConfig(
        config.LOGGING_INI_PATH,
        defaults={"logfilename": config.LOG_PATH},
        disable_existing_loggers=False)

def _run(name: str, body: Callable[[RunConfig, Path], None], cfg: RunConfig) -> int:
    """ Runs a command body in its run directory under the directory lock,
    turning exceptions into exit codes with the message on stderr. """

    started = time.time()
    try:
        run_dir = experiment.prep_run_dir(cfg.out)
        setup_logging()
        logger.info("repday %s in %s", name, run_dir)
        with RunLock(run_dir):
            body(cfg, run_dir)
            experiment.record_command(run_dir, name, started)
    except Exception as err: # pylint: disable=broad-except
        code = exit_code(err)
        if code == EXIT_INTERNAL:
            logger.exception("Internal error in %s", name)
        else:
            logger.debug("%s failed", name, exc_info=True)
        print("repday {}: error: {}".format(name, err), file=sys.stderr)
        return code
    return EXIT_OK

def cmd_synthesize(cfg: RunConfig) -> int:
    return _run("synthesize", _synthesize, cfg)

def cmd_cluster(cfg: RunConfig) -> int:
    """ Writes reduced_set.json and partition.json. """
    return _run("cluster", _cluster, cfg)

def cmd_plan(cfg: RunConfig) -> int:
    """ Writes plan.json and plan_trace.csv. """
    return _run("plan", _plan, cfg)

def cmd_reference(cfg: RunConfig) -> int:
    """ Writes reference.json, or reuses it when the inputs are unchanged. """
    return _run("reference", _reference, cfg)

def cmd_evaluate(cfg: RunConfig) -> int:
    """ Writes evaluation.json and, after cluster and plan, report.json. """
    return _run("evaluate", _evaluate, cfg)

def cmd_feedback(cfg: RunConfig) -> int:
    """ Writes trace.csv, final_set.json, feedback.json and one report per
    loop. """
    return _run("feedback", _feedback, cfg)

def cmd_sweep(cfg: RunConfig) -> int:
    return _run("sweep", _sweep, cfg)

def cmd_report(cfg: RunConfig) -> int:
    """ Writes per_day_errors.csv, per_rd_errors.csv, sweep.csv and
    summary.md. """
    return _run("report", _report, cfg)

COMMANDS = {"synthesize": cmd_synthesize, "cluster": cmd_cluster, "plan": cmd_plan,
            "reference": cmd_reference, "evaluate": cmd_evaluate,
            "feedback": cmd_feedback, "sweep": cmd_sweep,
            "report": cmd_report} # type: Dict[str, Callable[[RunConfig], int]]

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with a [run] section")
    common.add_argument("--system", type=Path, help="system JSON file")
    common.add_argument("--timeseries", type=Path, help="hourly load/wind CSV file")
    common.add_argument("--out", type=Path,
                        help="run directory (default: a new numbered directory"
                             " under RUN_DIR)")
    common.add_argument("--jobs", type=int, help="worker processes for daily LPs")
    common.add_argument("--enum-limit", dest="enum_limit", type=int,
                        help="largest candidate count to enumerate")

    parser = argparse.ArgumentParser(
        prog="repday",
        description="Representative-day aggregation for expansion planning")
    sub = parser.add_subparsers(dest="command")
    sub.required = True

    synth = sub.add_parser("synthesize", parents=[common],
                           help="write a synthetic system and year of data")
    synth.add_argument("--fixture", choices=sorted(FIXTURES))
    synth.add_argument("--seed", type=int)
    synth.add_argument("--days", type=int)
    synth.add_argument("--peak-days", dest="peak_days", type=int)

    clus = sub.add_parser("cluster", parents=[common], help="cluster days")
    clus.add_argument("-k", "--k", type=int, help="number of representative days")

    sub.add_parser("plan", parents=[common], help="plan on the reduced set")
    sub.add_parser("reference", parents=[common], help="plan on the full set")

    evaluate = sub.add_parser("evaluate", parents=[common],
                              help="evaluate a decision on the full set")
    evaluate.add_argument("--decision", help="decision bits, lines then wind, e.g. 0110")
    evaluate.add_argument("--dispatch", action="store_const", const=True,
                          help="also write dispatch.csv")

    fb = sub.add_parser("feedback", parents=[common], help="run feedback re-clustering")
    sweep = sub.add_parser("sweep", parents=[common],
                           help="baseline clustering at several counts")
    for p in (fb, sweep):
        p.add_argument("--n0", type=int)
        p.add_argument("--n-loop", dest="n_loop", type=int)
        p.add_argument("--n-step", dest="n_step", type=int)
        p.add_argument("--n-bad", dest="n_bad", type=int)
    sweep.add_argument("--rd-counts", dest="rd_counts", type=utils.parse_int_list)
    sweep.add_argument("--starts", type=utils.parse_int_list,
                       help="initial counts of feedback runs to add")

    sub.add_parser("report", parents=[common], help="write plot-ready tables")
    return parser

def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_run_config(args)
    except Exception as err: # pylint: disable=broad-except
        print("repday {}: error: {}".format(args.command, err), file=sys.stderr)
        return exit_code(err)
    return COMMANDS[args.command](cfg)

if __name__ == "__main__":
    sys.exit(main())
