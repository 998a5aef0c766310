"""Derive fixtures/cars.json from the upstream vega-datasets cars.json.

The upstream file stores Year as an ISO date string ("1971-01-01"); the
fixture keeps the four-digit year as an integer. Every other field and the
record order are copied unchanged.
"""
import json
import sys
from pathlib import Path

here = Path(__file__).resolve().parent.parent
src = json.loads((here / "vega_cars.json").read_text())
out = []
for rec in src:
    rec = dict(rec)
    rec["Year"] = int(rec["Year"][:4])
    out.append(rec)
(here / "cars.json").write_text(json.dumps(out, indent=1) + "\n")
print(f"wrote {len(out)} records", file=sys.stderr)
