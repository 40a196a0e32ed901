"""Collects one verdict line per acceptance criterion for the terminal summary."""

_LINES: dict[int, str] = {}


def record(number: int, title: str, passed: bool, detail: str) -> None:
    _LINES[number] = f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {title}: {detail}"


def lines() -> list[str]:
    return [_LINES[k] for k in sorted(_LINES)]
