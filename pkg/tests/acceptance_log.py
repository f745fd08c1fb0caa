"""Collects one summary line per acceptance criterion during a test run."""

LINES: list[str] = []


def record(number: int, title: str, ok: bool, detail: str) -> str:
    line = f"[{'PASS' if ok else 'FAIL'}] {number} {title}: {detail}"
    LINES.append(line)
    print(line)
    return line
