"""CSV and JSON writers for scan results (schema version 1)."""

import csv
import datetime
import io
import json
import math

SCHEMA_VERSION = 1
CSV_COLUMNS = [
    "knob",
    "K_over_pi",
    "E_gs",
    "E_minus_offset",
    "mean_phonons",
    "bare_overlap",
    "n_sites",
    "max_phonons",
    "seed",
]


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def csv_rows(points):
    for pt in points:
        yield [
            pt.knob,
            pt.k_gs_over_pi,
            pt.e_gs,
            pt.binding_energy,
            pt.mean_phonons,
            pt.bare_overlap,
            pt.n_sites,
            pt.max_phonons,
            pt.seed,
        ]


def write_csv(path, points, config_lines=(), meta=None):
    """Write scan points; line 1 is a timestamp comment, the rest is stable.

    ``E_gs`` excludes eps_e; ``E_minus_offset`` is measured from the bare
    band minimum, E_gs + 2|t_e|.
    """
    buf = io.StringIO()
    buf.write(f"# generated: {datetime.datetime.now(datetime.timezone.utc).isoformat()}\n")
    buf.write(f"# schema_version: {SCHEMA_VERSION}\n")
    for key, val in sorted((meta or {}).items()):
        buf.write(f"# meta {key}: {val}\n")
    for line in config_lines:
        buf.write(f"# config {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in csv_rows(points):
        w.writerow([_fmt(x) for x in row])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def csv_body(path):
    """File content without the timestamp line, for reproducibility checks."""
    with open(path) as fh:
        lines = fh.readlines()
    return "".join(line for line in lines if not line.startswith("# generated:"))


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):
        return obj.item()
    return obj


def report(kind, config, **payload):
    return _clean(
        {
            "schema_version": SCHEMA_VERSION,
            "kind": kind,
            "generated": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "config": config,
            **payload,
        }
    )


def write_json(path, doc):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
