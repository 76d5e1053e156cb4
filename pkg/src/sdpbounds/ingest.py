"""Parsing of defect-prediction outcomes and derivation of the false omission rate.

Two input shapes are accepted: per-module prediction records (CSV) and a
pre-tallied confusion matrix (JSON object).  Records may omit the actual
label entirely (new-project mode), in which case only the predicted-clean
count can be derived.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Tuple, Union

__all__ = [
    "LABELS",
    "ParseError",
    "PredictionRecord",
    "ConfusionCounts",
    "ProjectSummary",
    "ValidationVerdict",
    "MODEL_CAVEATS",
    "parse_records",
    "load_records",
    "parse_confusion",
    "load_confusion",
    "tally_confusion",
    "false_omission_rate",
    "validate_assumptions",
    "summarize_project",
]

LABELS = ("clean", "defective")

_HEADER = ("module_id", "predicted", "actual")

# Model preconditions that cannot be verified from a confusion matrix; they are
# echoed on every validation verdict so reports state what the numbers assume.
MODEL_CAVEATS = (
    "each misclassified defective module contributes exactly one latent failure",
    "testing after release does not surface defects hidden in predicted-clean modules",
    "the predictor was trained on historical data drawn from the same distribution it now scores",
    "module-level predictions are independent",
    "the software outside the predicted-clean set follows a power-law hazard",
    "the same software is compared under both testing regimes",
)


class ParseError(ValueError):
    """Malformed input; carries the 1-based physical row number when known."""

    def __init__(self, message: str, row: Optional[int] = None) -> None:
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


@dataclass(frozen=True)
class PredictionRecord:
    module_id: str
    predicted: str
    actual: Optional[str] = None


@dataclass(frozen=True)
class ConfusionCounts:
    """FN/TN tallies over the predicted-clean set, with optional FP/TP."""

    fn_count: int
    tn_count: int
    fp_count: Optional[int] = None
    tp_count: Optional[int] = None

    def __post_init__(self) -> None:
        for name in ("fn_count", "tn_count", "fp_count", "tp_count"):
            value = getattr(self, name)
            if value is None:
                continue
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {value!r}")


@dataclass(frozen=True)
class ProjectSummary:
    n_total: int
    l_clean: int

    def __post_init__(self) -> None:
        if self.l_clean > self.n_total:
            raise ValueError(f"l_clean {self.l_clean} exceeds n_total {self.n_total}")


@dataclass(frozen=True)
class ValidationVerdict:
    ok: bool
    violations: Tuple[str, ...]
    caveats: Tuple[str, ...] = MODEL_CAVEATS


def _normalize_label(raw: str, row: int) -> str:
    label = raw.strip().lower()
    if label not in LABELS:
        raise ParseError(f"unknown label {raw.strip()!r} (expected one of {LABELS})", row)
    return label


def parse_records(source: Union[str, Iterable[str]]) -> List[PredictionRecord]:
    """Parse CSV prediction records, preserving row order.

    Layout: ``module_id,predicted[,actual]`` with an optional header row.  The
    actual column must be present on every data row or on none of them;
    labels are matched case-insensitively.
    """
    if isinstance(source, str):
        lines = io.StringIO(source)
    else:
        lines = source

    records: List[PredictionRecord] = []
    arity: Optional[int] = None
    for row_no, raw in enumerate(csv.reader(lines), start=1):
        if not raw or (len(raw) == 1 and not raw[0].strip()):
            continue  # blank line
        fields = [f.strip() for f in raw]
        if row_no == 1 and [f.lower() for f in fields] in (list(_HEADER), list(_HEADER[:2])):
            continue
        if len(fields) not in (2, 3):
            raise ParseError(f"expected 2 or 3 columns, got {len(fields)}", row_no)
        if arity is None:
            arity = len(fields)
        elif len(fields) != arity:
            raise ParseError(
                f"inconsistent column count: file started with {arity} columns, got {len(fields)}",
                row_no,
            )
        module_id = fields[0]
        predicted = _normalize_label(fields[1], row_no)
        actual = _normalize_label(fields[2], row_no) if len(fields) == 3 else None
        records.append(PredictionRecord(module_id, predicted, actual))

    if not records:
        raise ParseError("no data rows in input")
    return records


def load_records(path: Union[str, Path]) -> List[PredictionRecord]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_records(fh)


def parse_confusion(text: str) -> ConfusionCounts:
    """Parse a confusion matrix from a JSON object with fields fn, tn[, fp, tp]."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid confusion JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ParseError("confusion input must be a JSON object")
    unknown = set(payload) - {"fn", "tn", "fp", "tp"}
    if unknown:
        raise ParseError(f"unknown confusion fields: {sorted(unknown)}")
    for required in ("fn", "tn"):
        if required not in payload:
            raise ParseError(f"confusion object missing required field {required!r}")
    try:
        return ConfusionCounts(
            fn_count=payload["fn"],
            tn_count=payload["tn"],
            fp_count=payload.get("fp"),
            tp_count=payload.get("tp"),
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def load_confusion(path: Union[str, Path]) -> ConfusionCounts:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_confusion(fh.read())


def tally_confusion(records: List[PredictionRecord]) -> ConfusionCounts:
    """Count FN/TN/FP/TP; every record must carry an actual label."""
    if not records:
        raise ValueError("no records to tally")
    fn = tn = fp = tp = 0
    for idx, record in enumerate(records, start=1):
        if record.actual is None:
            raise ValueError(
                f"record {idx} (module {record.module_id!r}) has no actual label; "
                "confusion tallying needs test-set records"
            )
        if record.predicted == "clean":
            if record.actual == "defective":
                fn += 1
            else:
                tn += 1
        else:
            if record.actual == "defective":
                tp += 1
            else:
                fp += 1
    return ConfusionCounts(fn_count=fn, tn_count=tn, fp_count=fp, tp_count=tp)


def false_omission_rate(counts: ConfusionCounts) -> float:
    """FN / (FN + TN), the per-module probability a predicted-clean module fails."""
    denominator = counts.fn_count + counts.tn_count
    if denominator < 1:
        raise ValueError("no predicted-clean modules: FN + TN is zero")
    return counts.fn_count / denominator


def validate_assumptions(counts: ConfusionCounts) -> ValidationVerdict:
    """Gate requiring at least one FN and one TN so that 0 < p < 1.

    Degenerate matrices still yield a rate from false_omission_rate, but the
    deviation bounds are undefined for p in {0, 1}; this verdict is how the
    toolkit refuses to push such inputs downstream.  The unverifiable model
    preconditions ride along as caveats.
    """
    violations = []
    if counts.fn_count < 1:
        violations.append("no false negatives: p = 0, bounds undefined")
    if counts.tn_count < 1:
        violations.append("no true negatives: p = 1, bounds undefined")
    return ValidationVerdict(ok=not violations, violations=tuple(violations))


def summarize_project(records: List[PredictionRecord]) -> ProjectSummary:
    """Module count and predicted-clean count (actual labels not needed)."""
    l_clean = sum(1 for r in records if r.predicted == "clean")
    return ProjectSummary(n_total=len(records), l_clean=l_clean)
