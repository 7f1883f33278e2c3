"""Plain-text job reports ending in a ``key=value`` trailer."""

from __future__ import annotations

TRAILER = "[summary]"


def _value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return ",".join(_value(x) for x in v)
    return str(v)


class Report:
    """Free-form lines followed by ordered summary values.

    Nothing time-dependent goes into a report, so two runs on the same
    input give the same bytes.
    """

    def __init__(self, title: str):
        self.title = title
        self.lines: list = []
        self.values: dict = {}

    def line(self, text: str = ""):
        self.lines.append(text)

    def section(self, name: str):
        if self.lines:
            self.lines.append("")
        self.lines.append(f"== {name}")

    def put(self, key: str, value):
        if any(c in key for c in " =\n"):
            raise ValueError(f"bad report key {key!r}")
        self.values[key] = value

    def text(self) -> str:
        out = [self.title, ""] + self.lines + ["", TRAILER]
        out += [f"{k}={_value(v)}" for k, v in self.values.items()]
        return "\n".join(out) + "\n"


def parse_trailer(text: str) -> dict:
    """The ``key=value`` pairs after the trailer header, as strings."""
    lines = text.splitlines()
    try:
        i = lines.index(TRAILER)
    except ValueError:
        return {}
    out = {}
    for ln in lines[i + 1:]:
        if "=" in ln:
            k, v = ln.split("=", 1)
            out[k] = v
    return out
