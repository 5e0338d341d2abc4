"""CSV ingestion of study summaries.

Expected header columns (everything beyond ``study_id`` and ``n`` is
optional): ``study_id, t_stat, t_squared, lambda, p_two_sided, two_log_bf,
two_log_bf_jzs, n, n1, n2, ss_x, sign``. Exactly one statistic column must
be populated per row; ``two_log_bf`` is read as a g-prior 2 log BF10 and
``two_log_bf_jzs`` as its Cauchy-prior counterpart. Lines starting with
``#`` are comments, which lets emitted reports be re-ingested.

Validation is not fail-fast: every violation is collected with its row
number and raised as one ``ValidationError``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .errors import DomainError, ValidationError
from .synthesis import InformationCase, StudyRecord, build_record, detect_case

__all__ = ["IngestResult", "ingest_csv", "STATISTIC_COLUMNS"]

STATISTIC_COLUMNS = (
    "t_stat",
    "t_squared",
    "lambda",
    "p_two_sided",
    "two_log_bf",
    "two_log_bf_jzs",
)
_KNOWN_COLUMNS = set(STATISTIC_COLUMNS) | {"study_id", "n", "n1", "n2", "ss_x", "sign"}
_SIGNS = {"+", "-", "?"}


@dataclass(frozen=True)
class IngestResult:
    records: tuple[StudyRecord, ...]
    case: InformationCase
    issues: tuple[str, ...] = ()


def ingest_csv(path, nu_rule: str = "n_minus_2") -> IngestResult:
    """Read study records from a CSV file.

    ``nu_rule`` selects the degrees-of-freedom convention, ``n_minus_2``
    (two-sample / simple regression, default) or ``n_minus_1`` (one-sample).
    """
    if nu_rule not in ("n_minus_2", "n_minus_1"):
        raise ValidationError(f"unknown nu_rule {nu_rule!r}")
    try:
        with open(path, "r", encoding="utf-8", newline="") as handle:
            lines = [line for line in handle if not line.lstrip().startswith("#")]
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    reader = csv.DictReader(lines)
    if reader.fieldnames is None:
        raise ValidationError(f"{path}: no CSV header found")
    header = [name.strip() for name in reader.fieldnames]
    if "study_id" not in header:
        raise ValidationError(f"{path}: missing required column 'study_id'")

    issues = []
    records = []
    seen_ids = set()
    for row_no, raw in enumerate(reader, start=2):
        row = {
            (k or "").strip(): (v or "").strip()
            for k, v in raw.items()
            if k is not None
        }
        problems = _validate_row(row, row_no, seen_ids)
        if problems:
            issues.extend(problems)
            continue
        try:
            records.append(_row_to_record(row, nu_rule))
        except DomainError as exc:
            issues.append(f"row {row_no}: {exc}")
            continue
        seen_ids.add(row["study_id"])
    if issues:
        raise ValidationError(
            f"{path}: {len(issues)} invalid row(s):\n  " + "\n  ".join(issues),
            issues,
        )
    if not records:
        raise ValidationError(f"{path}: no valid study rows")
    return IngestResult(tuple(records), detect_case(records))


def _validate_row(row, row_no, seen_ids):
    problems = []
    sid = row.get("study_id", "")
    if not sid:
        problems.append(f"row {row_no}: empty study_id")
    elif sid in seen_ids:
        problems.append(f"row {row_no}: duplicate study_id {sid!r}")
    populated = [c for c in STATISTIC_COLUMNS if row.get(c)]
    if len(populated) == 0:
        problems.append(f"row {row_no}: no statistic column populated")
    elif len(populated) > 1:
        problems.append(
            f"row {row_no}: ambiguous statistic ({' and '.join(populated)})"
        )
    has_n1 = bool(row.get("n1"))
    has_n2 = bool(row.get("n2"))
    if has_n1 != has_n2:
        problems.append(f"row {row_no}: need both n1 and n2 or neither")
    if not row.get("n") and not (has_n1 and has_n2):
        problems.append(f"row {row_no}: sample size n (or n1 + n2) required")
    sign = row.get("sign", "")
    if sign and sign not in _SIGNS:
        problems.append(f"row {row_no}: sign must be one of +, -, ? (got {sign!r})")
    for column in ("t_stat", "t_squared", "lambda", "p_two_sided",
                   "two_log_bf", "two_log_bf_jzs", "ss_x"):
        value = row.get(column)
        if value and not _is_float(value):
            problems.append(f"row {row_no}: {column} is not a number: {value!r}")
    for column in ("n", "n1", "n2"):
        value = row.get(column)
        if value and not value.isdigit():
            problems.append(f"row {row_no}: {column} must be a positive integer")
    return problems


def _is_float(text):
    try:
        float(text)
        return True
    except ValueError:
        return False


def _row_to_record(row, nu_rule) -> StudyRecord:
    def num(column):
        value = row.get(column)
        return float(value) if value else None

    n = int(row["n"]) if row.get("n") else None
    n1 = int(row["n1"]) if row.get("n1") else None
    n2 = int(row["n2"]) if row.get("n2") else None
    total = n if n is not None else (n1 + n2)
    nu = float(total - 1) if nu_rule == "n_minus_1" else None
    return build_record(
        row["study_id"],
        t_stat=num("t_stat"),
        t_squared=num("t_squared"),
        lmbda=num("lambda"),
        p_two_sided=num("p_two_sided"),
        two_log_bf_g=num("two_log_bf"),
        two_log_bf_jzs=num("two_log_bf_jzs"),
        n=n,
        n1=n1,
        n2=n2,
        ss_x=num("ss_x"),
        sign=row.get("sign") or None,
        nu=nu,
    )
