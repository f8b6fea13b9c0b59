"""One status line per acceptance criterion, printed at the end of the run."""

LINES: dict[int, str] = {}


def record(number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
    LINES[number] = line
    print(line)
