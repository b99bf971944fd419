import json
from pathlib import Path

REPORT_PATH = Path(__file__).resolve().parent.parent / "acceptance_report.json"

_results = {}


def pytest_runtest_logreport(report):
    if "acceptance" not in report.keywords:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        props = dict(report.user_properties)
        _results[report.nodeid] = {
            "criterion": props.pop("criterion", report.nodeid),
            "passed": report.outcome == "passed",
            "measured": props,
        }


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    rows = sorted(_results.values(), key=lambda r: r["criterion"])
    for row in rows:
        status = "PASS" if row["passed"] else "FAIL"
        detail = ", ".join(f"{k}={_fmt(v)}" for k, v in row["measured"].items()
                           if not isinstance(v, (dict, list)))
        terminalreporter.write_line(f"{status}  {row['criterion']}" + (f"  [{detail}]" if detail else ""))
    REPORT_PATH.write_text(json.dumps(rows, indent=2, default=float) + "\n", encoding="utf-8")
    terminalreporter.write_line(f"measurements written to {REPORT_PATH.name}")


def _fmt(v):
    return f"{v:.4g}" if isinstance(v, float) else str(v)
