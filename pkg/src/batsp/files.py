"""Instance parsing (JSON and TSPLIB FULL_MATRIX) and report serialization."""

from __future__ import annotations

import json
import math
import warnings
from pathlib import Path

import numpy as np

from .exceptions import ParseError
from .instance import MetricInstance, validate_metric

TSPLIB_KNOWN = {"NAME", "TYPE", "DIMENSION", "EDGE_WEIGHT_TYPE", "EDGE_WEIGHT_FORMAT", "COMMENT"}


def parse_instance(path, closure: bool = False) -> MetricInstance:
    """Read a JSON or TSPLIB instance and validate its metric."""
    path = Path(path)
    text = path.read_text()
    if text.lstrip().startswith("{"):
        inst = parse_json_instance(text, default_name=path.stem)
    else:
        inst = parse_tsplib(text, default_name=path.stem)
    return validate_metric(inst, "closure" if closure else "reject")


def parse_json_instance(text: str, default_name: str = "instance") -> MetricInstance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(data, dict):
        raise ParseError("top level must be an object")
    name = data.get("name", default_name)
    if not isinstance(name, str):
        raise ParseError("must be a string", field="name")
    if "costs" not in data:
        raise ParseError("missing", field="costs")
    costs = data["costs"]
    n = data.get("n", len(costs) if isinstance(costs, list) else None)
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError("must be a positive integer", field="n")
    if not isinstance(costs, list) or len(costs) != n:
        raise ParseError(f"must be a list of {n} rows", field="costs")
    for i, row in enumerate(costs):
        if not isinstance(row, list) or len(row) != n:
            raise ParseError(f"row {i} must have {n} entries", field="costs")
        for j, c in enumerate(row):
            if isinstance(c, bool) or not isinstance(c, (int, float)) or not math.isfinite(c):
                raise ParseError(f"entry [{i}][{j}] is not a finite number", field="costs")
    seed = data.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
        raise ParseError("must be an integer", field="seed")
    labels = data.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or len(labels) != n or not all(isinstance(s, str) for s in labels):
            raise ParseError(f"must be a list of {n} strings", field="labels")
        labels = tuple(labels)
    return MetricInstance(np.array(costs, dtype=np.float64), name=name, seed=seed, labels=labels)


def parse_tsplib(text: str, default_name: str = "instance") -> MetricInstance:
    header = {}
    weights: list[float] = []
    in_section = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line == "EOF":
            break
        if in_section:
            head = line.split()[0].rstrip(":")
            if head.isalpha() and head.isupper():
                in_section = False
            else:
                try:
                    weights.extend(float(tok) for tok in line.split())
                except ValueError as exc:
                    raise ParseError(f"bad weight {line!r}", line=lineno, field="EDGE_WEIGHT_SECTION") from exc
                continue
        if line.startswith("EDGE_WEIGHT_SECTION"):
            in_section = True
            continue
        if ":" in line:
            key, _, value = line.partition(":")
            key, value = key.strip(), value.strip()
        else:
            key, value = line, ""
        if key not in TSPLIB_KNOWN:
            warnings.warn(f"ignoring unsupported TSPLIB keyword {key!r} (line {lineno})", stacklevel=2)
            continue
        header[key] = (value, lineno)

    if "DIMENSION" not in header:
        raise ParseError("missing", field="DIMENSION")
    dim_text, dim_line = header["DIMENSION"]
    try:
        n = int(dim_text)
    except ValueError as exc:
        raise ParseError("not an integer", field="DIMENSION", line=dim_line) from exc
    fmt = header.get("EDGE_WEIGHT_FORMAT", ("FULL_MATRIX", None))
    if fmt[0] != "FULL_MATRIX":
        raise ParseError(f"unsupported format {fmt[0]!r}", field="EDGE_WEIGHT_FORMAT", line=fmt[1])
    etype = header.get("EDGE_WEIGHT_TYPE", ("EXPLICIT", None))
    if etype[0] != "EXPLICIT":
        raise ParseError(f"unsupported type {etype[0]!r}", field="EDGE_WEIGHT_TYPE", line=etype[1])
    if len(weights) != n * n:
        raise ParseError(f"expected {n * n} weights, found {len(weights)}", field="EDGE_WEIGHT_SECTION")
    cost = np.array(weights).reshape(n, n)
    # TSPLIB ATSP files often put a large sentinel on the diagonal.
    np.fill_diagonal(cost, 0.0)
    name = header.get("NAME", (default_name, None))[0]
    return MetricInstance(cost, name=name)


def _canonical(obj):
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if not math.isfinite(f):
            return None
        return f
    return obj


def report_json(report, timings: bool = True) -> str:
    data = report.to_dict(timings=timings) if hasattr(report, "to_dict") else dict(report)
    if not timings:
        data.pop("timings", None)
    return json.dumps(_canonical(data), sort_keys=True, indent=2) + "\n"


def summary_line(report) -> str:
    """Tab-separated ``n, tau_star, beta, k, bottleneck, ratio``."""
    beta = report.beta_certified
    fields = [
        report.n,
        report.tau_star,
        "" if beta is None else f"{beta:.6f}",
        report.k_used,
        report.bottleneck,
        "" if report.ratio is None else f"{report.ratio:.6f}",
    ]
    return "\t".join(str(f) for f in fields) + "\n"


def emit_report(report, path=None, *, timings: bool = True, summary: bool = False) -> str:
    """Write the report (or its summary line) to ``path``; returns the text."""
    text = summary_line(report) if summary else report_json(report, timings=timings)
    if path is not None:
        Path(path).write_text(text)
    return text


def load_report(path) -> dict:
    return json.loads(Path(path).read_text())
