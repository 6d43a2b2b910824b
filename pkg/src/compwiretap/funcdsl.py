"""Parsing and serialization of function definitions.

Two concrete formats:

* A polynomial expression language over variables ``x1..xn`` with
  rational/decimal constants, ``+ - *`` and parentheses.  Grammar::

      expr     := term (('+'|'-') term)*
      term     := ('-')? factor ('*' factor)*
      factor   := rational | variable | '(' expr ')'
      variable := 'x' [1-9][0-9]*
      rational := integer ('/' positive-integer)? | decimal

  ``*`` binds tighter than binary ``+``/``-``; whitespace is
  insignificant between tokens (fraction literals like ``1/2`` are a
  single token, written without spaces).  Parsing uses exact rational
  arithmetic and returns the fully expanded multilinear normal form:
  products distributed, powers reduced by x_i**2 -> 1, like terms merged.

* A truth-table file, either CSV (a ``# n=<k>`` comment line, an
  ``index,value`` header, then one row per point) or a JSON object
  ``{"n": k, "values": [...]}``.  Rows may name the point by table index
  or by an explicit space-separated ±1 tuple such as ``+1 -1 +1``.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

import numpy as np

from .boolfn import MultilinearPolynomial, TruthTable, point_to_index


class ParseError(ValueError):
    """Syntax or format error; ``position`` is a 0-based offset when known."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


# ---------------------------------------------------------------------------
# Expression language
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<frac>\d+/\d+)
  | (?P<num>\d+\.\d*|\.\d+|\d+)
  | (?P<var>x\d+)
  | (?P<op>[+\-*()])
""", re.VERBOSE)


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup == "frac":
            num, den = m.group().split("/")
            if int(den) == 0:
                raise ParseError("zero denominator in rational", pos)
            tokens.append(("num", Fraction(int(num), int(den)), pos))
        elif m.lastgroup == "num":
            tokens.append(("num", Fraction(m.group()), pos))
        elif m.lastgroup == "var":
            digits = m.group()[1:]
            if digits[0] == "0":
                raise ParseError(
                    f"variable index must not start with 0: {m.group()!r}", pos)
            tokens.append(("var", int(digits), pos))
        elif m.lastgroup == "op":
            tokens.append((m.group(), None, pos))
        pos = m.end()
    return tokens


def _poly_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for mask, v in b.items():
        s = out.get(mask, 0) + v
        if s:
            out[mask] = s
        else:
            out.pop(mask, None)
    return out


def _poly_neg(a: dict) -> dict:
    return {mask: -v for mask, v in a.items()}


def _poly_mul(a: dict, b: dict) -> dict:
    out = {}
    for m1, v1 in a.items():
        for m2, v2 in b.items():
            mask = m1 ^ m2  # x_i**2 == 1 on the hypercube
            s = out.get(mask, 0) + v1 * v2
            if s:
                out[mask] = s
            else:
                out.pop(mask, None)
    return out


class _Parser:
    def __init__(self, tokens, text_len):
        self.tokens = tokens
        self.i = 0
        self.text_len = text_len
        self.max_var = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, self.text_len)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expr(self) -> dict:
        poly = self.term()
        while self.peek()[0] in ("+", "-"):
            op, _, _ = self.take()
            rhs = self.term()
            poly = _poly_add(poly, rhs if op == "+" else _poly_neg(rhs))
        return poly

    def term(self) -> dict:
        negate = False
        if self.peek()[0] == "-":
            self.take()
            negate = True
        poly = self.factor()
        while self.peek()[0] == "*":
            self.take()
            poly = _poly_mul(poly, self.factor())
        return _poly_neg(poly) if negate else poly

    def factor(self) -> dict:
        kind, value, pos = self.take()
        if kind == "num":
            return {0: value} if value else {}
        if kind == "var":
            if value < 1:
                raise ParseError("variable index must be at least 1", pos)
            self.max_var = max(self.max_var, value)
            return {1 << (value - 1): Fraction(1)}
        if kind == "(":
            poly = self.expr()
            kind, _, pos = self.take()
            if kind != ")":
                raise ParseError("expected ')'", pos)
            return poly
        raise ParseError(
            "expected a number, variable or '('"
            + (f", got {kind!r}" if kind else ""), pos)


def parse_poly(text: str, declared_n: int | None = None) -> MultilinearPolynomial:
    """Parse an expression into multilinear normal form.

    ``n`` is ``declared_n`` when given (every variable index must fit),
    otherwise the largest variable index seen (1 for a constant).
    """
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty expression", 0)
    parser = _Parser(tokens, len(text))
    coeffs = parser.expr()
    if parser.i < len(tokens):
        kind, _, pos = parser.peek()
        raise ParseError(f"unexpected {kind!r}", pos)
    if declared_n is not None:
        if declared_n < 1:
            raise ParseError(f"declared n must be positive, got {declared_n}")
        if parser.max_var > declared_n:
            raise ParseError(
                f"variable x{parser.max_var} exceeds declared n={declared_n}")
        n = declared_n
    else:
        n = max(parser.max_var, 1)
    return MultilinearPolynomial(n, coeffs)


# ---------------------------------------------------------------------------
# Canonical serialization
# ---------------------------------------------------------------------------

def _coeff_string(value) -> str:
    """Exact fraction when representable, decimal repr otherwise."""
    frac = Fraction(value)  # exact for Fraction, int and float inputs
    if not isinstance(value, Fraction):
        if abs(frac.numerator) > 2**53 or frac.denominator > 2**53:
            return repr(float(value))
    if frac.denominator == 1:
        return str(frac.numerator)
    return f"{frac.numerator}/{frac.denominator}"


def _monomial(mask: int) -> str:
    return "*".join(f"x{j + 1}" for j in range(mask.bit_length()) if mask >> j & 1)


def serialize_poly(poly: MultilinearPolynomial) -> str:
    """Canonical text form: terms sorted by (subset size, mask value).

    ``parse_poly(serialize_poly(p))`` reproduces ``p``; serializing again
    yields the same text.
    """
    if not poly.coeffs:
        return "0"
    parts = []
    for mask in sorted(poly.coeffs, key=lambda m: (m.bit_count(), m)):
        value = poly.coeffs[mask]
        negative = value < 0
        mag = _coeff_string(-value if negative else value)
        mono = _monomial(mask)
        if mono and mag == "1":
            body = mono
        elif mono:
            body = f"{mag}*{mono}"
        else:
            body = mag
        if not parts:
            parts.append(f"-{body}" if negative else body)
        else:
            parts.append(f"{' - ' if negative else ' + '}{body}")
    return "".join(parts)


# ---------------------------------------------------------------------------
# Truth-table files
# ---------------------------------------------------------------------------

_N_RE = re.compile(r"n\s*=\s*(\d+)")


def _parse_first_field(field: str, n: int, lineno: int) -> int:
    """A row's first field: a table index, or an explicit ±1 point."""
    field = field.strip()
    if re.fullmatch(r"\d+", field):
        index = int(field)
        if index >= (1 << n):
            raise ParseError(f"line {lineno}: index {index} out of range")
        return index
    parts = field.split()
    if len(parts) != n:
        raise ParseError(
            f"line {lineno}: point has {len(parts)} entries, expected {n}")
    point = []
    for p in parts:
        if p in ("1", "+1"):
            point.append(1)
        elif p == "-1":
            point.append(-1)
        else:
            raise ParseError(f"line {lineno}: non-±1 point entry {p!r}")
    return point_to_index(point)


def _parse_value(field: str, lineno: int) -> float:
    try:
        return float(Fraction(field.strip()))
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"line {lineno}: unparseable value {field!r}") from None


def _parse_table_csv(text: str) -> TruthTable:
    n = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _N_RE.search(line)
            if m:
                n = int(m.group(1))
            continue
        if re.fullmatch(r"n\s*=\s*\d+", line):
            n = int(_N_RE.search(line).group(1))
            continue
        if line.lower().replace(" ", "") == "index,value":
            continue
        rows.append((lineno, line))
    if not rows:
        raise ParseError("table file has no data rows")
    if n is None:
        count = len(rows)
        if count & (count - 1) or count < 2:
            raise ParseError(
                f"no 'n=' header and row count {count} is not a power of two")
        n = count.bit_length() - 1
    if len(rows) != (1 << n):
        raise ParseError(
            f"expected {1 << n} rows for n={n}, found {len(rows)}")
    values = np.full(1 << n, np.nan)
    for lineno, line in rows:
        fields = line.split(",")
        if len(fields) != 2:
            raise ParseError(f"line {lineno}: expected 'index,value'")
        index = _parse_first_field(fields[0], n, lineno)
        if not np.isnan(values[index]):
            raise ParseError(f"line {lineno}: duplicate index {index}")
        values[index] = _parse_value(fields[1], lineno)
    if np.any(np.isnan(values)):
        missing = int(np.flatnonzero(np.isnan(values))[0])
        raise ParseError(f"missing row for index {missing}")
    return TruthTable(n, values)


def _parse_table_json(text: str) -> TruthTable:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON table: {exc}") from None
    if not isinstance(obj, dict) or "n" not in obj or "values" not in obj:
        raise ParseError("JSON table must be an object with 'n' and 'values'")
    n = obj["n"]
    values = obj["values"]
    if not isinstance(n, int) or n < 1:
        raise ParseError(f"'n' must be a positive integer, got {n!r}")
    if not isinstance(values, list) or len(values) != (1 << n):
        raise ParseError(
            f"'values' must list all {1 << n} entries for n={n}")
    return TruthTable(n, np.array(values, dtype=np.float64))


def parse_table(text: str) -> TruthTable:
    """Parse a table file, auto-detecting JSON versus CSV."""
    stripped = text.lstrip()
    if not stripped:
        raise ParseError("empty table file")
    if stripped.startswith("{"):
        return _parse_table_json(text)
    return _parse_table_csv(text)


def serialize_table(table: TruthTable, fmt: str = "csv") -> str:
    """Render a table in one of the two accepted file formats."""
    if fmt == "json":
        return json.dumps(
            {"n": table.n, "values": [float(v) for v in table.values]})
    if fmt == "csv":
        lines = [f"# n={table.n}", "index,value"]
        lines += [f"{i},{float(v)!r}" for i, v in enumerate(table.values)]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown table format {fmt!r}")
