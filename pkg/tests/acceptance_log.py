"""Collects one verdict line per acceptance criterion for the terminal summary."""

RESULTS: dict[int, tuple[str, bool, str]] = {}


def record(number: int, name: str, ok: bool, detail: str) -> bool:
    RESULTS[number] = (name, bool(ok), detail)
    print(line(number))
    return bool(ok)


def line(number: int) -> str:
    name, ok, detail = RESULTS[number]
    return f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {name}: {detail}"
