import pytest

@pytest.fixture
def report():
    from repday.metrics import ErrorReport, check_bounds
    report = ErrorReport(decision="01", reduced_total=80.0, full_total=100.0,
                         op_estimation_error=-20.0,
                         per_rd_errors=[(0, -5.0), (1, -15.0)],
                         rd_weights=[2.0, 1.0],
                         per_day_errors=[(2, -15.0), (0, -2.0), (1, -3.0)],
                         per_day_ts_errors=[(0, 0.5), (1, 0.25), (2, 0.0)],
                         reference_decision="01", reference_total=100.0,
                         simplification_error=-20.0, decision_error=0.0,
                         op_estimation_error_ref=-20.0,
                         per_rd_errors_ref=[(0, -5.0), (1, -15.0)],
                         normalizer=100.0)
    return report._replace(bound_verdicts=check_bounds(report))

def test_per_day_table(report):
    from repday.results import per_day_table

    table = per_day_table(report)
    assert list(table.columns) == ["day_id", "op_err", "ts_err"]
    assert list(table.day_id) == [0, 1, 2]
    assert list(table.op_err) == [-2.0, -3.0, -15.0]
    assert list(table.ts_err) == [0.5, 0.25, 0.0]

def test_per_rd_table(report):
    from repday.results import per_rd_table

    table = per_rd_table(report)
    assert list(table.columns) == ["k", "weight", "op_err", "op_err_ref"]
    assert list(table.weight) == [2.0, 1.0]
    without = per_rd_table(report._replace(per_rd_errors_ref=None))
    assert without.op_err_ref.isnull().all()

def test_sweep_table(report):
    from repday.results import SWEEP_COLUMNS, sweep_table

    table = sweep_table([(2, report), (2, report._replace(decision_error=None))])
    assert list(table.columns) == SWEEP_COLUMNS
    assert list(table.method) == ["baseline", "baseline"]
    assert table.op_err_norm[0] == pytest.approx(-0.2)
    assert table.practical_bound[0] == "pass"

def test_write_table_marks_missing_values(tmp_path, report):
    from repday.results import per_rd_table, write_table

    path = tmp_path / "per_rd_errors.csv"
    write_table(per_rd_table(report._replace(per_rd_errors_ref=None)), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "k,weight,op_err,op_err_ref"
    assert lines[1].endswith(",N/A")

def test_markdown_summary(tmp_path, report):
    from repday.results import fmt_markdown_summary, write_summary

    text = fmt_markdown_summary(report)
    assert text.startswith("# Planning errors")
    assert "| practical_bound | pass |" in text
    assert "| decision_error | 0 | 0 |" in text
    assert "- representative 1: -15" in text

    path = tmp_path / "summary.md"
    write_summary(report, path, ["", "extra line"])
    assert path.read_text().endswith("extra line\n")

def test_summary_without_reference(report):
    from repday.metrics import check_bounds
    from repday.results import fmt_markdown_summary

    bare = report._replace(reference_decision=None, reference_total=None,
                           simplification_error=None, decision_error=None,
                           op_estimation_error_ref=None, per_rd_errors_ref=None,
                           normalizer=None)
    text = fmt_markdown_summary(bare._replace(bound_verdicts=check_bounds(bare)))
    assert "Reference decision: `N/A`" in text
    assert "| practical_bound | not evaluable |" in text
