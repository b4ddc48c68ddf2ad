"""JSON instance files, CSV sign matrices and allocation reports.

All indices in files are 0-based.
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from .errors import MalformedProblemError
from .models import KMedoidInstance, NonExpendableInstance, TransportInstance


def instance_from_dict(data: dict, k: int | None = None):
    """Parse an instance object; ``k`` overrides the file's ``"k"`` for k-medoid data."""
    if not isinstance(data, dict):
        raise MalformedProblemError("instance JSON must be an object")
    kind = data.get("kind")
    if kind is None:
        kind = "kmedoid" if ("points" in data or "distances" in data) else None
    try:
        if kind in ("expendable", "non_expendable"):
            cls = TransportInstance if kind == "expendable" else NonExpendableInstance
            return cls(data["supplies"], data["demands"], data["costs"])
        if kind == "kmedoid":
            kk = k if k is not None else data.get("k")
            if kk is None:
                raise MalformedProblemError("k-medoid instance needs \"k\" (in the file or as --k)")
            if "distances" in data:
                return KMedoidInstance(data["distances"], kk)
            if "points" in data:
                return KMedoidInstance.from_points(data["points"], kk)
            raise MalformedProblemError("k-medoid instance needs \"points\" or \"distances\"")
    except KeyError as exc:
        raise MalformedProblemError(f"missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, MalformedProblemError):
            raise
        raise MalformedProblemError(str(exc)) from None
    raise MalformedProblemError(f"unknown instance kind {kind!r}")


def instance_to_dict(inst) -> dict:
    if isinstance(inst, KMedoidInstance):
        return {"kind": "kmedoid", "k": inst.k, "distances": inst.distances.tolist()}
    return {"kind": inst.kind, "supplies": inst.supplies.tolist(),
            "demands": inst.demands.tolist(), "costs": inst.costs.tolist()}


def load_instance(path, k: int | None = None):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedProblemError(f"{path}: invalid JSON ({exc})") from None
    return instance_from_dict(data, k)


def dump_instance(inst) -> str:
    return json.dumps(instance_to_dict(inst))


def read_matrix_csv(text: str) -> np.ndarray:
    """Comma-separated integer rows, no header."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    try:
        data = [[int(c.strip()) for c in r] for r in rows]
    except ValueError as exc:
        raise MalformedProblemError(f"matrix CSV must hold integers: {exc}") from None
    if len({len(r) for r in data}) > 1:
        raise MalformedProblemError("matrix CSV rows have different lengths")
    return np.array(data, dtype=np.int64).reshape(len(data), len(data[0]) if data else 0)


def write_matrix_csv(m) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(np.asarray(m).astype(int).tolist())
    return buf.getvalue()


def allocation_report(objective, status, allocation, integrality, **extra) -> dict:
    if allocation is None:
        alloc = None
    elif allocation.kind == "kmedoid":
        alloc = {"medoids": list(allocation.medoids), "assignment": list(allocation.assignment)}
    else:
        alloc = allocation.grid.tolist()
    report = {
        "objective": None if objective is None else float(objective),
        "status": status,
        "allocation": alloc,
        "integrality": None if integrality is None else {
            "is_integral": integrality.is_integral,
            "max_deviation": integrality.max_fractional_deviation,
        },
    }
    report.update(extra)
    return report
