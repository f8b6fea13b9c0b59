"""CSV rows and structured records for outcomes and sweeps.

Numbers are written as exact decimals when the fraction terminates and as
``p/q`` otherwise, so every row parses back to the same rationals.  A CSV
file starts with one ``#`` comment line echoing the run parameters, then a
header row naming every column.
"""

from __future__ import annotations

import csv
import io
import json
from decimal import Decimal
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from netgame.closedform import SpeOutcome
from netgame.errors import InvalidParameterError
from netgame.model import GameParams, to_fraction

OUTCOME_COLUMNS = (
    "n", "c_D", "c_A", "tau", "tau_R", "regime", "situation",
    "e1", "eA", "e2", "u_D", "u_A", "delta",
)


def format_number(x: Fraction | int | None) -> str:
    """Exact text for a rational: terminating decimal if possible, else ``p/q``."""
    if x is None:
        return ""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    d = x.denominator
    for prime in (2, 5):
        while d % prime == 0:
            d //= prime
    if d != 1:
        return f"{x.numerator}/{x.denominator}"
    text = format(Decimal(x.numerator) / Decimal(x.denominator), "f")
    return text.rstrip("0").rstrip(".") if "." in text else text


def parse_number(text: str) -> Fraction | None:
    return None if text == "" else to_fraction(text)


def outcome_row(p: GameParams, o: SpeOutcome) -> dict[str, str]:
    e1, eA, e2 = o.counts
    values: dict[str, Any] = {
        "n": p.n, "c_D": p.c_D, "c_A": p.c_A, "tau": p.tau, "tau_R": p.tau_R,
        "e1": e1, "eA": eA, "e2": e2, "u_D": o.u_D, "u_A": o.u_A, "delta": o.delta,
    }
    row = {k: format_number(v) for k, v in values.items()}
    row["regime"], row["situation"] = o.regime, o.situation
    return {k: row[k] for k in OUTCOME_COLUMNS}


def outcome_record(p: GameParams, o: SpeOutcome) -> dict[str, Any]:
    """Structured form of :func:`outcome_row`, with typed fields and the notes."""
    row = outcome_row(p, o)
    return {
        "params": p.to_dict(),
        "regime": o.regime,
        "situation": o.situation,
        "counts": list(o.counts),
        "u_D": row["u_D"],
        "u_A": row["u_A"],
        "delta": o.delta,
        "topology": o.topology,
        "degree": o.degree,
        "notes": list(o.notes),
    }


def record_to_row(record: Mapping[str, Any]) -> dict[str, str]:
    """Inverse of :func:`outcome_record` restricted to the CSV columns."""
    p = GameParams.from_mapping(record["params"])
    e1, eA, e2 = record["counts"]
    row = {
        "n": str(p.n),
        "c_D": format_number(p.c_D),
        "c_A": format_number(p.c_A),
        "tau": format_number(p.tau),
        "tau_R": format_number(p.tau_R),
        "regime": record["regime"],
        "situation": record["situation"],
        "e1": str(e1),
        "eA": str(eA),
        "e2": str(e2),
        "u_D": format_number(parse_number(record["u_D"])),
        "u_A": format_number(parse_number(record["u_A"])),
        "delta": "" if record["delta"] is None else str(record["delta"]),
    }
    return row


def row_to_record(row: Mapping[str, str]) -> dict[str, Any]:
    """Structured record rebuilt from one CSV row (topology and notes are not in the row)."""
    missing = [c for c in OUTCOME_COLUMNS if c not in row]
    if missing:
        raise InvalidParameterError(f"row lacks columns: {', '.join(missing)}")
    p = GameParams.from_mapping({k: row[k] for k in ("n", "c_D", "c_A", "tau", "tau_R")})
    return {
        "params": p.to_dict(),
        "regime": row["regime"],
        "situation": row["situation"],
        "counts": [int(row["e1"]), int(row["eA"]), int(row["e2"])],
        "u_D": row["u_D"],
        "u_A": row["u_A"],
        "delta": int(row["delta"]) if row["delta"] else None,
    }


def comment_line(params: Mapping[str, Any]) -> str:
    return "# " + " ".join(f"{k}={_text(v)}" for k, v in params.items())


def _text(v: Any) -> str:
    if isinstance(v, (Fraction, int)) and not isinstance(v, bool):
        return format_number(v)
    return "" if v is None else str(v)


def write_csv(
    rows: Iterable[Mapping[str, Any]],
    columns: Sequence[str],
    params: Mapping[str, Any] | None = None,
) -> str:
    """CSV text with an optional parameter comment line and a header row."""
    buf = io.StringIO()
    if params:
        buf.write(comment_line(params) + "\n")
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _text(row.get(k)) for k in columns})
    return buf.getvalue()


def read_csv(text: str) -> tuple[dict[str, str], list[dict[str, str]]]:
    """Parse :func:`write_csv` output into ``(comment params, rows)``."""
    lines = text.splitlines()
    params: dict[str, str] = {}
    while lines and lines[0].startswith("#"):
        for token in lines.pop(0)[1:].split():
            key, _, value = token.partition("=")
            params[key] = value
    return params, list(csv.DictReader(lines))


def write_json(record: Any) -> str:
    return json.dumps(record, indent=2, sort_keys=False) + "\n"
