"""Text format for group specs.

    document := (item | options)*
    item     := "group" kind "{" (key "=" value ";")* "}"
    options  := "options" "{" (key "=" value ";")* "}"
    value    := integer | identifier | "[" value ("," value)* "]"

``#`` starts a comment that runs to the end of the line.  Affine groups use
keys ``lin1``, ``trans1``, ``lin2``, ``trans2``, ... for their generators.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .catalog import (
    Abelian,
    CustomAffine,
    MatrixSplit,
    MaxClass3,
    ScalarSplit,
    TorsionScalar,
    family,
)
from .errors import ConstgenError, SpecSemanticError, SpecSyntaxError

KINDS = ("abelian", "scalar", "matrix", "maxclass3", "torsion", "affine")
OPTION_KEYS = ("max_index", "precision", "budget", "seed")


@dataclass(frozen=True)
class SpecDocument:
    groups: tuple = ()
    max_index: int | None = None
    precision: int | str | None = None
    budget: int | None = None
    seed: int | None = None

    def options(self) -> dict:
        return {k: getattr(self, k) for k in OPTION_KEYS if getattr(self, k) is not None}


# --------------------------------------------------------------------------
# lexer

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) | (?P<nl>\n) | (?P<comment>\#[^\n]*)
  | (?P<int>[+-]?\d+) | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<punct>[{}\[\]=;,])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str) -> list[_Tok]:
    out = []
    pos, line, start = 0, 1, 0
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if mt is None:
            raise SpecSyntaxError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = mt.lastgroup
        if kind == "nl":
            line, start = line + 1, mt.end()
        elif kind not in ("ws", "comment"):
            out.append(_Tok(kind, mt.group(), line, pos - start + 1))
        pos = mt.end()
    out.append(_Tok("eof", "", line, pos - start + 1))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _lex(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, text=None):
        t = self.peek()
        if (kind and t.kind != kind) or (text and t.text != text):
            want = text or kind
            got = t.text or "end of input"
            raise SpecSyntaxError(f"expected {want!r}, found {got!r}", t.line, t.col)
        self.i += 1
        return t

    def value(self):
        t = self.peek()
        if t.kind == "int":
            self.i += 1
            return int(t.text)
        if t.kind == "ident":
            self.i += 1
            return t.text
        if t.text == "[":
            self.i += 1
            items = [self.value()]
            while self.peek().text == ",":
                self.i += 1
                items.append(self.value())
            self.take(text="]")
            return items
        raise SpecSyntaxError(f"expected a value, found {t.text or 'end of input'!r}", t.line, t.col)

    def block(self):
        self.take(text="{")
        fields: dict = {}
        while self.peek().text != "}":
            key = self.take("ident")
            self.take(text="=")
            val = self.value()
            self.take(text=";")
            if key.text in fields:
                raise SpecSyntaxError(f"duplicate key {key.text!r}", key.line, key.col)
            fields[key.text] = (val, key)
        self.take(text="}")
        return fields

    def document(self):
        groups, options = [], {}
        while self.peek().kind != "eof":
            head = self.take("ident")
            if head.text == "group":
                kind = self.take("ident")
                if kind.text not in KINDS:
                    raise SpecSyntaxError(f"unknown group kind {kind.text!r}", kind.line, kind.col)
                groups.append((kind, self.block()))
            elif head.text == "options":
                for k, v in self.block().items():
                    if k in options:
                        raise SpecSyntaxError(f"duplicate option {k!r}", v[1].line, v[1].col)
                    options[k] = v
            else:
                raise SpecSyntaxError(f"expected 'group' or 'options', found {head.text!r}",
                                      head.line, head.col)
        return groups, options


# --------------------------------------------------------------------------
# semantics


def _int(fields, key, default=None, required=True):
    if key not in fields:
        if required and default is None:
            raise SpecSemanticError(f"missing key {key!r}")
        return default
    val, tok = fields[key]
    if not isinstance(val, int):
        raise SpecSemanticError(f"{key!r} at line {tok.line} must be an integer")
    return val


def _matrix(fields, key):
    val, tok = fields[key]
    if not (isinstance(val, list) and val and all(isinstance(r, list) for r in val)
            and all(isinstance(x, int) for r in val for x in r)):
        raise SpecSemanticError(f"{key!r} at line {tok.line} must be an integer matrix")
    return val


def _vector(fields, key):
    val, tok = fields[key]
    if not (isinstance(val, list) and all(isinstance(x, int) for x in val)):
        raise SpecSemanticError(f"{key!r} at line {tok.line} must be an integer vector")
    return val


_ALLOWED = {
    "abelian": {"p", "rank"},
    "scalar": {"p", "rank", "lambda", "s", "sign"},
    "matrix": {"p", "T"},
    "maxclass3": set(),
    "torsion": {"p", "rank", "lambda"},
    "affine": {"p", "dim"},
}


def _group(kind, fields):
    k = kind.text
    for key, (_, tok) in fields.items():
        ok = key in _ALLOWED[k] or (k == "affine" and re.fullmatch(r"(lin|trans)[1-9]\d*", key))
        if not ok:
            raise SpecSemanticError(f"unknown key {key!r} for {k} at line {tok.line}, col {tok.col}")
    if k == "abelian":
        return Abelian(_int(fields, "p"), _int(fields, "rank"))
    if k == "scalar":
        p, d = _int(fields, "p"), _int(fields, "rank")
        if "lambda" in fields:
            if "s" in fields or "sign" in fields:
                raise SpecSemanticError("give either lambda or s/sign, not both")
            return ScalarSplit(p, d, _int(fields, "lambda"))
        spec = family(2, p=p, d=d, s=_int(fields, "s"), sign=_int(fields, "sign", 1))
        return ScalarSplit(spec.p, spec.d, spec.lam)
    if k == "matrix":
        return MatrixSplit(_int(fields, "p"), _matrix(fields, "T"))
    if k == "maxclass3":
        return MaxClass3()
    if k == "torsion":
        return TorsionScalar(_int(fields, "rank"), _int(fields, "p", 2), _int(fields, "lambda", -1))
    gens = []
    idx = sorted({int(re.sub(r"\D", "", key)) for key in fields if key[0] in "lt"})
    for i in idx:
        lin, trans = f"lin{i}", f"trans{i}"
        if lin not in fields or trans not in fields:
            raise SpecSemanticError(f"generator {i} needs both {lin} and {trans}")
        gens.append((_matrix(fields, lin), _vector(fields, trans)))
    if idx != list(range(1, len(idx) + 1)):
        raise SpecSemanticError("affine generators must be numbered 1, 2, ... without gaps")
    return CustomAffine(_int(fields, "p"), gens, dim=_int(fields, "dim", required=False))


def parse_spec(text: str) -> SpecDocument:
    groups, options = _Parser(text).document()
    specs = []
    for kind, fields in groups:
        try:
            specs.append(_group(kind, fields))
        except SpecSemanticError:
            raise
        except (ConstgenError, ValueError) as exc:
            raise SpecSemanticError(f"group at line {kind.line}: {exc}") from exc
    opts = {}
    for key, (val, tok) in options.items():
        if key not in OPTION_KEYS:
            raise SpecSemanticError(f"unknown option {key!r} at line {tok.line}, col {tok.col}")
        if key == "precision" and val == "auto":
            opts[key] = val
        elif not isinstance(val, int) or val < 0:
            raise SpecSemanticError(f"option {key!r} must be a non-negative integer")
        else:
            opts[key] = val
    return SpecDocument(tuple(specs), **opts)


# --------------------------------------------------------------------------
# printer


def _fmt(v) -> str:
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def print_group(spec) -> str:
    if isinstance(spec, Abelian):
        kind, body = "abelian", [("p", spec.p), ("rank", spec.d)]
    elif isinstance(spec, ScalarSplit):
        kind, body = "scalar", [("p", spec.p), ("rank", spec.d), ("lambda", spec.lam)]
    elif isinstance(spec, MatrixSplit):
        kind, body = "matrix", [("p", spec.p), ("T", spec.T)]
    elif isinstance(spec, MaxClass3):
        kind, body = "maxclass3", []
    elif isinstance(spec, TorsionScalar):
        kind, body = "torsion", [("p", spec.p), ("rank", spec.rank), ("lambda", spec.lam)]
    elif isinstance(spec, CustomAffine):
        kind, body = "affine", [("p", spec.p)]
        if spec.dim is not None:
            body.append(("dim", spec.dim))
        for i, (M, v) in enumerate(spec.gens, 1):
            body += [(f"lin{i}", M), (f"trans{i}", v)]
    else:
        raise TypeError(f"cannot print {spec!r}")
    if not body:
        return f"group {kind} {{}}"
    inner = "\n".join(f"  {k} = {_fmt(v)};" for k, v in body)
    return f"group {kind} {{\n{inner}\n}}"


def print_spec(doc: SpecDocument) -> str:
    parts = [print_group(g) for g in doc.groups]
    opts = doc.options()
    if opts:
        inner = "\n".join(f"  {k} = {v};" for k, v in opts.items())
        parts.append(f"options {{\n{inner}\n}}")
    return "\n\n".join(parts) + "\n"
