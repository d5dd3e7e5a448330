"""DIMACS CNF and textual DRAT proof files.

Writers emit LF-terminated ASCII; readers are token-based, so clauses and
proof steps may span lines (the `0` terminator is authoritative).  Reading
then writing, or writing then reading, preserves clause order, literal
order, and proof step order exactly.  A legacy `%` trailer in a CNF file
is accepted and ignored; comment lines are skipped in both formats.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional

from .core import Formula, GenerationMeta


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")


class DratStep(NamedTuple):
    kind: str  # "add" or "delete"
    literals: tuple[int, ...]


def add(*literals: int) -> DratStep:
    return DratStep("add", tuple(literals))


def delete(*literals: int) -> DratStep:
    return DratStep("delete", tuple(literals))


@dataclass
class DratProof:
    steps: list[DratStep]

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)


_META_RE = re.compile(r"^c\s+geosat\s+model=(\w+)(?:\s+dim=(\d+))?\s+seed=(\d+)\s*$")


def _meta_comment(meta: GenerationMeta) -> str:
    dim = f" dim={meta.dimension}" if meta.dimension is not None else ""
    return f"c geosat model={meta.model}{dim} seed={meta.seed}"


def _parse_meta(line: str) -> Optional[GenerationMeta]:
    m = _META_RE.match(line)
    if not m:
        return None
    model, dim, seed = m.groups()
    try:
        return GenerationMeta(model=model, seed=int(seed),
                              dimension=int(dim) if dim else None)
    except ValueError:
        return None


def _write(sink, text: str):
    try:
        sink.write(text)
    except TypeError:
        sink.write(text.encode("ascii"))


def write_dimacs(formula: Formula, sink) -> None:
    """Write a formula in DIMACS CNF format to a text or binary stream."""
    lines = []
    if formula.meta is not None:
        lines.append(_meta_comment(formula.meta))
    lines.append(f"p cnf {formula.n} {formula.m}")
    for row in formula.clauses.tolist():
        lines.append(" ".join(map(str, row)) + " 0")
    _write(sink, "\n".join(lines) + "\n")


def dimacs_to_string(formula: Formula) -> str:
    import io

    buf = io.StringIO()
    write_dimacs(formula, buf)
    return buf.getvalue()


def _tokens_with_lines(lines: Iterable[str]):
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("c"):
            yield lineno, "c", stripped
            continue
        if stripped.startswith("%"):
            yield lineno, "%", stripped
            return
        for tok in stripped.split():
            yield lineno, "t", tok


def _as_lines(source) -> Iterable[str]:
    if isinstance(source, str):
        return source.splitlines()
    if isinstance(source, bytes):
        return source.decode("ascii").splitlines()
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("ascii")
    return data.splitlines()


def read_dimacs(source) -> Formula:
    """Parse DIMACS CNF from a stream, string, or bytes.

    Validates the header against the body: every literal's variable must be
    at most n, the clause count must equal m, and all clauses must have the
    same length (this is a fixed-clause-length toolchain).
    """
    n = m = None
    k = None
    meta = None
    clauses: list[list[int]] = []
    current: list[int] = []
    header_re = re.compile(r"^p\s+cnf\s+(\d+)\s+(\d+)\s*$")
    lines = list(_as_lines(source))
    pending_header: Optional[str] = None

    for lineno, kind, payload in _tokens_with_lines(lines):
        if kind == "c":
            if meta is None:
                meta = _parse_meta(payload)
            continue
        if kind == "%":
            break
        if n is None:
            if payload == "p":
                pending_header = ""
                continue
            if pending_header is not None:
                pending_header = (pending_header + " " + payload).strip()
                hm = header_re.match("p " + pending_header)
                if hm:
                    n, m = int(hm.group(1)), int(hm.group(2))
                    pending_header = None
                elif len(pending_header.split()) >= 3:
                    raise ParseError(f"malformed header 'p {pending_header}'", lineno)
                continue
            raise ParseError(f"expected 'p cnf <n> <m>' header before {payload!r}", lineno)
        try:
            lit = int(payload)
        except ValueError:
            raise ParseError(f"non-integer token {payload!r}", lineno) from None
        if lit == 0:
            if k is None:
                k = len(current)
            elif len(current) != k:
                raise ParseError(
                    f"clause {len(clauses) + 1} has {len(current)} literals, "
                    f"expected {k} (fixed clause length required)", lineno)
            clauses.append(current)
            current = []
        else:
            if abs(lit) > n:
                raise ParseError(f"literal {lit} exceeds variable count {n}", lineno)
            current.append(lit)

    if n is None:
        raise ParseError("missing 'p cnf' header")
    if current:
        raise ParseError("unterminated clause at end of file")
    if len(clauses) != m:
        raise ParseError(f"header promises {m} clauses, file has {len(clauses)}")
    if k is None:
        k = 0
    if meta is not None and (meta.model == "geometric") != (meta.dimension is not None):
        meta = None
    return Formula(n, k, clauses, meta=meta)


# ---------------------------------------------------------------------------
# DRAT


def write_drat(proof: DratProof, sink) -> None:
    """Write a textual DRAT proof: additions as literal lines, deletions prefixed `d`."""
    lines = []
    for step in proof.steps:
        body = " ".join(map(str, step.literals))
        body = (body + " 0") if body else "0"
        lines.append(("d " + body) if step.kind == "delete" else body)
    _write(sink, "\n".join(lines) + ("\n" if lines else ""))


def drat_to_string(proof: DratProof) -> str:
    import io

    buf = io.StringIO()
    write_drat(proof, buf)
    return buf.getvalue()


def read_drat(source) -> DratProof:
    """Parse a textual DRAT proof; steps may span lines, `d` starts a deletion."""
    steps: list[DratStep] = []
    kind = "add"
    current: list[int] = []
    in_step = False
    for lineno, tkind, payload in _tokens_with_lines(_as_lines(source)):
        if tkind == "c":
            continue
        if tkind == "%":
            break
        if payload == "d":
            if in_step:
                raise ParseError("'d' may only start a proof step", lineno)
            kind = "delete"
            in_step = True
            continue
        try:
            lit = int(payload)
        except ValueError:
            raise ParseError(f"non-integer token {payload!r}", lineno) from None
        if lit == 0:
            steps.append(DratStep(kind, tuple(current)))
            current = []
            kind = "add"
            in_step = False
        else:
            current.append(lit)
            in_step = True
    if in_step or current:
        raise ParseError("unterminated proof step at end of file")
    return DratProof(steps)


# ---------------------------------------------------------------------------
# path helpers


def write_dimacs_file(formula: Formula, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fp:
        write_dimacs(formula, fp)


def read_dimacs_file(path) -> Formula:
    with open(path, "r", encoding="ascii") as fp:
        return read_dimacs(fp)


def write_drat_file(proof: DratProof, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fp:
        write_drat(proof, fp)


def read_drat_file(path) -> DratProof:
    with open(path, "r", encoding="ascii") as fp:
        return read_drat(fp)
