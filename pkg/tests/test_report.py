import json
import math

from morreylab.bounds import CheckReport
from morreylab.report import CSV_HEADER, read_jsonl, to_csv, to_jsonl, write_reports


def sample():
    params = {"n": 1, "alpha": 0.4, "p1": 1.8, "q1": 1.6, "p2": 1.8, "q2": 1.6, "s": 1.40625, "t": 1.25}
    return [
        CheckReport("theorem", params, 0.5, 4.0, True, 2, 5, 42),
        CheckReport("theorem-probe", params, math.inf, math.nan, None, 2, 6, None),
    ]


def test_csv_header_exact():
    assert CSV_HEADER == "check,alpha,p1,q1,p2,q2,s,t,E,G,seed,ratio,constant,pass"
    lines = to_csv(sample()).splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[1] == "theorem,0.4,1.8,1.6,1.8,1.6,1.40625,1.25,2,5,42,0.5,4.0,true"
    assert lines[2].endswith(",2,6,,inf,nan,")


def test_jsonl_roundtrip(tmp_path):
    path = write_reports(sample(), tmp_path / "r.jsonl")
    text = path.read_text()
    assert text == to_jsonl(sample())
    rows = [json.loads(line) for line in text.splitlines()]
    assert rows[1]["ratio"] is None and rows[1]["pass"] is None
    back = read_jsonl(path)
    assert back[0].ratio == 0.5 and back[0].passed is True
    assert math.isnan(back[1].ratio) and back[1].passed is None


def test_csv_by_suffix(tmp_path):
    path = write_reports(sample(), tmp_path / "r.CSV")
    assert path.read_text().startswith(CSV_HEADER + "\n")
