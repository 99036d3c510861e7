""" Functions for writing error reports as plot-ready tables and a markdown
summary."""

from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd

from .config import ENCODING
from .feedback import FeedbackTrace
from .metrics import PRACTICAL_BOUND, ErrorReport, normalized

NA = "N/A"

SWEEP_COLUMNS = ["method", "start", "rd_count", "op_err", "decision_err",
                 "simplification_err", "op_err_norm", "decision_err_norm",
                 "simplification_err_norm", "practical_bound"]

def per_day_table(report: ErrorReport) -> pd.DataFrame:
    """ day_id, op_err, ts_err for every original day. """

    op_err = pd.DataFrame(report.per_day_errors, columns=["day_id", "op_err"])
    ts_err = pd.DataFrame(report.per_day_ts_errors, columns=["day_id", "ts_err"])
    return op_err.merge(ts_err, on="day_id").sort_values("day_id", kind="mergesort")

def per_rd_table(report: ErrorReport) -> pd.DataFrame:
    """ k, weight, op_err and, with a reference, op_err_ref per representative. """

    table = pd.DataFrame(report.per_rd_errors, columns=["k", "op_err"])
    table.insert(1, "weight", report.rd_weights)
    if report.per_rd_errors_ref is not None:
        table["op_err_ref"] = [error for _, error in report.per_rd_errors_ref]
    else:
        table["op_err_ref"] = None
    return table

def sweep_row(method: str, report: ErrorReport, start: Optional[int] = None) -> Dict:
    norm = normalized(report)
    verdict = (report.bound_verdicts or {}).get(PRACTICAL_BOUND)
    if verdict is None or not verdict.evaluable:
        bound = None
    else:
        bound = "pass" if verdict.passed else "FAIL"
    return {"method": method,
            "start": start,
            "rd_count": report.rd_count,
            "op_err": report.op_estimation_error,
            "decision_err": report.decision_error,
            "simplification_err": report.simplification_error,
            "op_err_norm": norm["op_estimation_error"],
            "decision_err_norm": norm["decision_error"],
            "simplification_err_norm": norm["simplification_error"],
            "practical_bound": bound}

def sweep_table(baseline: Sequence[Tuple[int, ErrorReport]],
                feedback: Sequence[Tuple[int, FeedbackTrace]] = ()) -> pd.DataFrame:
    """ Rows for the error against representative count curves: one per
    baseline count and one per feedback round, tagged by method. """

    rows = [sweep_row("baseline", report) for _, report in baseline]
    for start, trace in feedback:
        rows.extend(sweep_row("feedback", record.report, start)
                    for record in trace.records)
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)

def write_table(table: pd.DataFrame, path: Union[str, Path]) -> None:
    table.to_csv(str(path), index=False, encoding=ENCODING, na_rep=NA)

def _fmt(value: Optional[float]) -> str:
    return NA if value is None else "{:.6g}".format(value)

def fmt_markdown_summary(report: ErrorReport, title: str = "Planning errors") -> str:
    """ A markdown summary of the errors of a report and its bound
    verdicts. """

    norm = normalized(report)
    reference = NA if report.reference_decision is None else report.reference_decision or "-"
    lines = ["# {}".format(title), "",
             "Representative days: {}".format(report.rd_count), "",
             "Approximate decision: `{}`".format(report.decision or "-"),
             "Reference decision: `{}`".format(reference),
             "",
             "| error | value | normalized |",
             "|---|---|---|"]
    for name, value in (("simplification_error", report.simplification_error),
                        ("decision_error", report.decision_error),
                        ("op_estimation_error", report.op_estimation_error),
                        ("op_estimation_error_ref", report.op_estimation_error_ref)):
        lines.append("| {} | {} | {} |".format(name, _fmt(value), _fmt(norm[name])))

    lines.extend(["", "| bound | verdict | margin | bound value |", "|---|---|---|---|"])
    for name, verdict in sorted((report.bound_verdicts or {}).items()):
        if not verdict.evaluable:
            outcome = "not evaluable"
        else:
            outcome = "pass" if verdict.passed else "FAIL"
        lines.append("| {} | {} | {} | {} |".format(
            name, outcome, _fmt(verdict.margin), _fmt(verdict.bound)))

    worst = sorted(report.per_rd_errors, key=lambda pair: (-abs(pair[1]), pair[0]))[:5]
    lines.extend(["", "Largest per-representative errors:", ""])
    lines.extend("- representative {}: {}".format(k, _fmt(error)) for k, error in worst)
    return "\n".join(lines) + "\n"

def write_summary(report: ErrorReport, path: Union[str, Path],
                  extra: Sequence[str] = ()) -> None:
    with Path(path).open("w", encoding=ENCODING) as f:
        print(fmt_markdown_summary(report), end="", file=f)
        for line in extra:
            print(line, file=f)
