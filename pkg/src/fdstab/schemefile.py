"""Reading and writing scheme definition files (TOML).

Layout::

    name = "leapfrog-extrapolation"

    [dimensions]
    d = 1
    s = 1

    [stencil]
    r = [1]       # backward extent per axis
    p = [1]       # forward extent per axis
    q = [0]       # boundary depth, then transverse half-widths

    [cfl]
    lambda = [0.8]

    [[interior]]  # one entry per coefficient a_{offset,sigma}
    sigma = 2
    offset = [0]
    value = 1.0

    [[boundary]]  # one entry per coefficient b_{offset,j1,sigma}
    sigma = 2
    j1 = 0
    offset = [0]
    value = -1.0

Unknown keys and missing keys are rejected with the offending line number.
"""

from __future__ import annotations

import re
import sys
from importlib import resources
from pathlib import Path
from typing import Any, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .scheme import SchemeDef

_TOP = {"name", "dimensions", "stencil", "cfl", "interior", "boundary"}
_TABLES = {
    "dimensions": {"d", "s"},
    "stencil": {"r", "p", "q"},
    "cfl": {"lambda"},
}
_ENTRIES = {
    "interior": {"sigma", "offset", "value"},
    "boundary": {"sigma", "j1", "offset", "value"},
}


def _line_of(text: str, pattern: str, occurrence: int = 0) -> int:
    hits = [m.start() for m in re.finditer(pattern, text, flags=re.MULTILINE)]
    if len(hits) <= occurrence:
        return 0
    return text.count("\n", 0, hits[occurrence]) + 1


def _fail(source: str, line: int, msg: str) -> ConfigError:
    where = f"{source}:{line}" if line else source
    return ConfigError(f"{where}: {msg}")


def _int(value: Any, what: str, source: str, line: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise _fail(source, line, f"{what} must be an integer")
    return value


def _number(value: Any, what: str, source: str, line: int) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _fail(source, line, f"{what} must be a number")
    return float(value)


def _int_list(value: Any, what: str, source: str, line: int) -> tuple[int, ...]:
    if not isinstance(value, list):
        raise _fail(source, line, f"{what} must be a list of integers")
    return tuple(_int(v, what, source, line) for v in value)


def parse_scheme(text: str, source: str = "<string>") -> SchemeDef:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from None

    for key in doc:
        if key not in _TOP:
            raise _fail(source, _line_of(text, rf"^\s*\[*\s*{re.escape(key)}\b"), f"unknown key {key!r}")
    for key in ("name", "dimensions", "stencil", "cfl", "interior"):
        if key not in doc:
            raise _fail(source, 0, f"missing required key {key!r}")
    if not isinstance(doc["name"], str):
        raise _fail(source, _line_of(text, r"^\s*name\b"), "name must be a string")

    for table, allowed in _TABLES.items():
        header = _line_of(text, rf"^\s*\[{table}\]")
        if not isinstance(doc[table], dict):
            raise _fail(source, header, f"{table} must be a table")
        for key in doc[table]:
            if key not in allowed:
                raise _fail(source, _line_of(text, rf"^\s*{re.escape(key)}\s*="),
                            f"unknown key {key!r} in [{table}]")
        for key in allowed:
            if key not in doc[table]:
                raise _fail(source, header, f"missing key {key!r} in [{table}]")

    dims, stencil = doc["dimensions"], doc["stencil"]
    line = _line_of(text, r"^\s*\[dimensions\]")
    d = _int(dims["d"], "d", source, line)
    s = _int(dims["s"], "s", source, line)
    line = _line_of(text, r"^\s*\[stencil\]")
    r = _int_list(stencil["r"], "r", source, line)
    p = _int_list(stencil["p"], "p", source, line)
    q = _int_list(stencil["q"], "q", source, line)
    line = _line_of(text, r"^\s*\[cfl\]")
    lam_raw = doc["cfl"]["lambda"]
    if not isinstance(lam_raw, list):
        raise _fail(source, line, "lambda must be a list of numbers")
    lam = tuple(_number(v, "lambda", source, line) for v in lam_raw)

    coeffs: dict[str, dict] = {"interior": {}, "boundary": {}}
    for kind, allowed in _ENTRIES.items():
        entries = doc.get(kind, [])
        if not isinstance(entries, list):
            raise _fail(source, _line_of(text, rf"^\s*\[*{kind}"), f"{kind} must be an array of tables")
        for n, entry in enumerate(entries):
            line = _line_of(text, rf"^\s*\[\[{kind}\]\]", n)
            for key in entry:
                if key not in allowed:
                    raise _fail(source, line, f"unknown key {key!r} in {kind} entry {n}")
            for key in allowed:
                if key not in entry:
                    raise _fail(source, line, f"missing key {key!r} in {kind} entry {n}")
            offset = _int_list(entry["offset"], "offset", source, line)
            sigma = _int(entry["sigma"], "sigma", source, line)
            value = _number(entry["value"], "value", source, line)
            key = (offset, sigma) if kind == "interior" else (offset, _int(entry["j1"], "j1", source, line), sigma)
            if key in coeffs[kind]:
                raise _fail(source, line, f"duplicate {kind} coefficient {key}")
            coeffs[kind][key] = value

    try:
        return SchemeDef(name=doc["name"], d=d, s=s, r=r, p=p, q=q, lam=lam,
                         interior=coeffs["interior"], boundary=coeffs["boundary"])
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_scheme(path: Union[str, Path]) -> SchemeDef:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read scheme file ({exc.strerror})") from None
    return parse_scheme(text, str(path))


def _fmt_list(values) -> str:
    return "[" + ", ".join(repr(v) for v in values) + "]"


def dump_scheme(scheme: SchemeDef) -> str:
    lines = [
        f"name = \"{scheme.name}\"",
        "",
        "[dimensions]",
        f"d = {scheme.d}",
        f"s = {scheme.s}",
        "",
        "[stencil]",
        f"r = {_fmt_list(scheme.r)}",
        f"p = {_fmt_list(scheme.p)}",
        f"q = {_fmt_list(scheme.q)}",
        "",
        "[cfl]",
        f"lambda = {_fmt_list(scheme.lam)}",
    ]
    for (offset, sigma), value in sorted(scheme.interior.items(), key=lambda kv: (-kv[0][1], kv[0][0])):
        lines += ["", "[[interior]]", f"sigma = {sigma}", f"offset = {_fmt_list(offset)}", f"value = {value!r}"]
    for (offset, j1, sigma), value in sorted(scheme.boundary.items(), key=lambda kv: (kv[0][1], -kv[0][2], kv[0][0])):
        lines += ["", "[[boundary]]", f"sigma = {sigma}", f"j1 = {j1}", f"offset = {_fmt_list(offset)}",
                  f"value = {value!r}"]
    return "\n".join(lines) + "\n"


def shipped_path(name: str) -> Path:
    """Path of a scheme file bundled with the package (``leapfrog`` etc.)."""
    path = Path(str(resources.files("fdstab") / "schemes" / f"{name}.toml"))
    if not path.exists():
        raise ConfigError(f"no bundled scheme named {name!r}")
    return path


def resolve_scheme(spec: str) -> SchemeDef:
    """Load a scheme from a file path, or from a bundled name."""
    path = Path(spec)
    if path.suffix == ".toml" or path.exists():
        return load_scheme(path)
    return load_scheme(shipped_path(spec))
