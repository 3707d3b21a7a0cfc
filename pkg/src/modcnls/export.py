"""File output for field, coefficient, diagnostic, and width-trace data.

Every file is written atomically (temp file then rename) and embeds the
resolved run configuration in its header, so a finished file is never a
partial write and always documents what produced it.  Floats are rendered
with repr, the shortest decimal that round-trips, which keeps reruns of the
same configuration byte-identical.

Two row formats: csv (a comment header of "# key = value" lines, then a
column-name row, then data rows) and json-lines (a meta object on the first
line, then one object per row).
"""

import json
import os

import numpy as np

FORMATS = ("csv", "json-lines")

FIELD_COLUMNS = ("x", "re_psi1", "im_psi1", "re_psi2", "im_psi2",
                 "abs2_psi1", "abs2_psi2")
COEFFICIENT_COLUMNS = ("x", "t", "v1", "v2", "g11", "g12", "g21", "g22")
DIAGNOSTICS_COLUMNS = ("t", "norm1", "norm2", "profile_error1",
                       "profile_error2", "peak_pos1")
TRACE_COLUMNS = ("t", "chi", "dchi_dt", "a")


def _fmt(value):
    return repr(float(value))


def atomic_write_text(path, text):
    """Write text to path via a temp file in the same directory."""
    tmp = f"{path}.tmp-{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _render(columns, rows, meta, fmt):
    if fmt == "csv":
        lines = [f"# {key} = {meta[key]}" for key in sorted(meta)]
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        return "\n".join(lines) + "\n"
    if fmt == "json-lines":
        lines = [json.dumps({"meta": meta}, sort_keys=True)]
        for row in rows:
            lines.append(json.dumps(
                {c: float(v) for c, v in zip(columns, row)}, sort_keys=True))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def write_table(path, columns, rows, meta, fmt="csv"):
    atomic_write_text(path, _render(columns, rows, meta, fmt))


def write_fields(path, fields, meta, fmt="csv"):
    """One snapshot of both components in the seven-column field layout."""
    rows = zip(fields.x, fields.psi1.real, fields.psi1.imag,
               fields.psi2.real, fields.psi2.imag,
               np.abs(fields.psi1) ** 2, np.abs(fields.psi2) ** 2)
    write_table(path, FIELD_COLUMNS, rows, meta, fmt)


def write_coefficients(path, sampler, x, times, meta, fmt="csv"):
    """Potential and coupling lattice, t outer, x inner."""
    rows = []
    for t in times:
        v = sampler.potential(x, t)
        g = sampler.couplings(x, t)
        for i in range(len(x)):
            rows.append((x[i], t, v[0, i], v[1, i],
                         g[0, 0, i], g[0, 1, i], g[1, 0, i], g[1, 1, i]))
    write_table(path, COEFFICIENT_COLUMNS, rows, meta, fmt)


def write_diagnostics(path, diag, meta, fmt="csv"):
    rows = zip(diag.times, diag.norm1, diag.norm2,
               diag.profile_error1, diag.profile_error2, diag.peak_pos1)
    write_table(path, DIAGNOSTICS_COLUMNS, rows, meta, fmt)


def write_modulation(path, trace, meta, fmt="csv"):
    rows = zip(trace.times, trace.chi, trace.dchi_dt, trace.a)
    write_table(path, TRACE_COLUMNS, rows, meta, fmt)


def write_manifest(path, config):
    atomic_write_text(path, json.dumps(config, sort_keys=True, indent=2) + "\n")
