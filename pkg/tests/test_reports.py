# tests/test_reports.py
import io
import json
import logging
import math

import numpy as np
from PyPDF2 import PdfReader

from reports.artifacts import read_rows, write_json, write_rows
from reports.pdf import create_pdf_report
from router.behavioral import Policy
from ui.templates import format_crossovers, format_error, format_run_summary, format_validation
from utils.logger import log_usage


# ------------------------
# ARTIFACTS
# ------------------------

def test_write_json_plain_values(tmp_path):
    path = write_json({"n": np.int64(3), "ratio": math.inf, "slots": {3, 1}, "policy": Policy.ROUND_ROBIN,
                       "out": tmp_path}, tmp_path / "a.json")
    data = json.loads(path.read_text())
    assert data == {"n": 3, "ratio": "inf", "slots": [1, 3], "policy": "round_robin", "out": str(tmp_path)}


def test_write_rows_sorted_and_stable(tmp_path):
    rows = [{"b": 2, "a": "x"}, {"b": 1, "a": "y"}]
    first = write_rows(rows, tmp_path / "one.csv", sort_by=["b"])
    second = write_rows(list(reversed(rows)), tmp_path / "two.csv", sort_by=["b"])
    assert first.read_text() == "b,a\n1,y\n2,x\n"
    assert first.read_bytes() == second.read_bytes()


def test_fixed_columns_keep_empty_tables(tmp_path):
    path = write_rows([], tmp_path / "hops.csv", columns=["hop", "prob"])
    assert path.read_text() == "hop,prob\n"
    assert read_rows(path) == []


def test_read_rows_keeps_text(tmp_path):
    path = write_rows([{"period": 300, "case": "uniform", "note": ""}], tmp_path / "r.csv")
    assert read_rows(path) == [{"period": "300", "case": "uniform", "note": ""}]
    assert read_rows(tmp_path / "missing.csv") == []


def test_pdf_report(tmp_path):
    path = tmp_path / "summary.pdf"
    payload = create_pdf_report({"router2 JJ": 481}, "PaST-NoC analysis", path=str(path),
                                tables={"Crossovers": [{"topology": "router2", "computed_ps": 75}]})
    assert payload.startswith(b"%PDF")
    assert path.read_bytes() == payload
    reader = PdfReader(io.BytesIO(payload))
    assert len(reader.pages) == 1
    assert "PaST-NoC" in reader.pages[0].extract_text()


# ------------------------
# TEMPLATES / LOGGING
# ------------------------

def test_format_error():
    assert format_error("bad rate") == "Input Error: bad rate"


def test_format_crossovers_marks_missing():
    text = format_crossovers([
        {"topology": "mesh8", "competitor": "banyan8", "case": "worst", "computed_ps": None, "published_ps": 360},
        {"topology": "router2", "competitor": "banyan2", "case": "uniform", "computed_ps": 75.0, "published_ps": 300},
    ])
    lines = text.splitlines()
    assert lines[0].startswith("topology")
    assert "none" in lines[1] and "360 ps" in lines[1]
    assert "75 ps" in lines[2]


def test_format_validation_and_summary():
    text = format_validation([{"policy": "round_robin", "mode": "exhaustive", "checked": 18, "mismatches": 0}])
    assert "checked=18" in text
    summary = format_run_summary("simulate", "mesh8", "flit", {})
    assert "outputs: none" in summary


def test_log_usage_returns_session(caplog):
    with caplog.at_level(logging.INFO, logger="pastnoc"):
        session = log_usage("simulate", {"config": "a.ini"}, ["results"], session_id="abc12345")
    assert session == "abc12345"
    assert "tool=simulate" in caplog.text
    assert len(log_usage("validate", {})) == 8
