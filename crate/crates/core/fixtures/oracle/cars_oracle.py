"""Brute-force reference values for the cars fixtures.

Reads the raw files directly (no shared code with the Rust crate) and writes
oracle/cars_oracle.json. Rerun only when the fixtures change.
"""
import json
import re
from pathlib import Path

here = Path(__file__).resolve().parent.parent

raw_text = (here / "vega_cars.json").read_text()
raw = json.loads(raw_text)
# independent record count: one "Name" key per record
record_count_by_scan = len(re.findall(r'"Name"\s*:', raw_text))
assert record_count_by_scan == len(raw)

cars = json.loads((here / "cars.json").read_text())

origin_counts = {}
for rec in cars:
    origin_counts[rec["Origin"]] = origin_counts.get(rec["Origin"], 0) + 1
origin_order = list(origin_counts)  # dict preserves first appearance

year_counts = {}
for rec in cars:
    year_counts[rec["Year"]] = year_counts.get(rec["Year"], 0) + 1
years_ascending = sorted(year_counts)

rows_1982 = [r for r in cars if r["Year"] == 1982]
with_mpg = [r for r in rows_1982 if r["Miles_per_Gallon"] is not None]
# Python's sort is stable: ties keep dataset order
by_mpg = sorted(with_mpg, key=lambda r: r["Miles_per_Gallon"])

voice_ids = {"Japan": 65, "Europe": 34, "USA": 0}

cmin, cmax = min(origin_counts.values()), max(origin_counts.values())
origin_pitch = {
    o: 0.75 + (c - cmin) / (cmax - cmin) * (2.0 - 0.75) for o, c in origin_counts.items()
}
ymin, ymax = min(year_counts.values()), max(year_counts.values())
year_rate = {y: 1.2 + (c - ymin) / (ymax - ymin) * (4.0 - 1.2) for y, c in year_counts.items()}

oracle = {
    "raw_record_count": len(raw),
    "origin_first_appearance": origin_order,
    "origin_counts": origin_counts,
    "origin_pitch": origin_pitch,
    "years_ascending": years_ascending,
    "year_counts": {str(k): v for k, v in year_counts.items()},
    "year_rate": {str(k): v for k, v in year_rate.items()},
    "count_1982": len(rows_1982),
    "count_1982_null_mpg": len(rows_1982) - len(with_mpg),
    "demo3_names": [r["Name"] for r in by_mpg],
    "demo3_voice_ids": [voice_ids[r["Origin"]] for r in by_mpg],
}
(here / "oracle" / "cars_oracle.json").write_text(json.dumps(oracle, indent=2) + "\n")
print(json.dumps({k: v for k, v in oracle.items() if not k.startswith("demo3")}, indent=1))
print(oracle["demo3_names"][:5], oracle["demo3_names"][-3:])
