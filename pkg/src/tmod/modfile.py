"""Module definition files: an INI-style text format read with :mod:`configparser`.

::

    [field]
    p = 3
    m = 1               # modulus = "g^2+1" when m > 1
    [place]
    pi = "t"
    [module]
    dim = 1
    M0 = [["t"]]        # tau^0 coefficient, entries rational in t
    M1 = [["1"]]

Matrix values are Python literals (nested lists of strings).  An optional
``[motive]`` section declares an abelian certificate with keys
``generators``, ``coords`` and ``relations``; generator indices are 1-based.
"""
from __future__ import annotations

import ast
import configparser
import re
from pathlib import Path

from .anderson import AndersonModule, MotiveDeclaration, validate_module
from .errors import ParseError, ValidationError
from .fields import FqField, LocalField, Place
from .gf import FiniteField, format_fp_poly
from .parsing import parse_poly, parse_rational

_MKEY = re.compile(r"^m(\d+)$")


def _line_of(text, section, key):
    current = None
    for n, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("[") and "]" in stripped:
            current = stripped[1:stripped.index("]")].strip().lower()
        elif current == section and re.match(rf"{re.escape(key)}\s*[=:]", stripped, re.I):
            return n
    return None


class _Reader:
    def __init__(self, text, source):
        self.text = text
        self.source = source
        cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
        try:
            cp.read_string(text, source=source)
        except configparser.ParsingError as exc:
            errors = getattr(exc, "errors", None)
            lineno = errors[0][0] if errors else getattr(exc, "lineno", None)
            raise ParseError(f"{source}: malformed line", lineno, 1) from None
        except configparser.Error as exc:
            raise ParseError(f"{source}: {exc.message}", getattr(exc, "lineno", None), 1) from None
        self.cp = cp

    def where(self, section, key):
        return _line_of(self.text, section, key)

    def fail(self, section, key, msg):
        line = self.where(section, key)
        raise ParseError(f"{self.source}: [{section}] {key}: {msg}", line, 1)

    def raw(self, section, key, required=True):
        if not self.cp.has_section(section) or not self.cp.has_option(section, key):
            if required:
                raise ParseError(f"{self.source}: missing [{section}] {key}")
            return None
        return self.cp.get(section, key)

    def literal(self, section, key, required=True):
        raw = self.raw(section, key, required)
        if raw is None:
            return None
        try:
            return ast.literal_eval(raw.strip())
        except (ValueError, SyntaxError):
            self.fail(section, key, f"not a literal: {raw.strip()!r}")

    def integer(self, section, key, required=True):
        value = self.literal(section, key, required)
        if value is not None and not isinstance(value, int):
            self.fail(section, key, "expected an integer")
        return value

    def string(self, section, key, required=True):
        value = self.literal(section, key, required)
        if value is not None and not isinstance(value, str):
            value = str(value)
        return value


def parse_module_text(text, source="<string>", prec=None) -> AndersonModule:
    """Parse and validate a module definition."""
    rd = _Reader(text, source)
    p = rd.integer("field", "p")
    m = rd.integer("field", "m", required=False) or 1
    modulus_text = rd.string("field", "modulus", required=False)
    modulus = None
    if modulus_text is not None:
        try:
            modulus = parse_poly(modulus_text.replace("g", "t"), FiniteField(p)).c
        except ParseError as exc:
            rd.fail("field", "modulus", str(exc))
        except ValidationError as exc:
            rd.fail("field", "p", str(exc))
    try:
        F = FqField(p, m, modulus)
    except ValidationError as exc:
        line = rd.where("field", "modulus") or rd.where("field", "p")
        raise ValidationError(f"{source}:{line}: {exc}") from None
    pi_text = rd.string("place", "pi")
    try:
        pi = parse_poly(pi_text, F)
    except ParseError as exc:
        rd.fail("place", "pi", str(exc))
    try:
        place = Place.from_poly(F, pi)
    except ValidationError as exc:
        line = rd.where("place", "pi")
        raise ValidationError(f"{source}:{line}: {exc}") from None
    d = rd.integer("module", "dim")
    keys = sorted((int(mt.group(1)), key) for key in rd.cp.options("module")
                  if (mt := _MKEY.match(key)))
    if not keys or keys[0][0] != 0:
        raise ParseError(f"{source}: [module] needs M0")
    if [j for j, _ in keys] != list(range(len(keys))):
        raise ParseError(f"{source}: [module] coefficients must be M0, M1, ... without gaps")
    rational = []
    for j, key in keys:
        value = rd.literal("module", key)
        if not isinstance(value, (list, tuple)) or not all(isinstance(r, (list, tuple)) for r in value):
            rd.fail("module", key.upper(), "expected a list of rows")
        try:
            rational.append([[parse_rational(str(e), F) for e in row] for row in value])
        except ParseError as exc:
            rd.fail("module", key.upper(), str(exc))
    motive = _read_motive(rd, F) if rd.cp.has_section("motive") else None
    K = LocalField(place, prec) if prec is not None else None
    name = Path(source).stem if source != "<string>" else None
    return validate_module(F, place, d, rational, motive=motive, K=K, name=name)


def _read_motive(rd, F):
    gens = rd.literal("motive", "generators")
    coords = rd.literal("motive", "coords")
    rels = rd.literal("motive", "relations")

    def terms(section_key, data):
        out = []
        for expr in data:
            row = []
            for term in expr:
                if not isinstance(term, (list, tuple)) or len(term) != 3 \
                        or not isinstance(term[0], int) or term[0] < 1:
                    rd.fail("motive", section_key, "terms are [index >= 1, f, c]")
                idx, f, c = term
                row.append((idx - 1, parse_poly(str(f), F), parse_rational(str(c), F)))
            out.append(tuple(row))
        return tuple(out)

    try:
        generators = tuple(tuple(tuple(parse_rational(str(c), F) for c in entry) for entry in g)
                           for g in gens)
        return MotiveDeclaration(generators, terms("coords", coords), terms("relations", rels))
    except ParseError as exc:
        rd.fail("motive", "generators", str(exc))


def parse_module_file(path, prec=None) -> AndersonModule:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_module_text(text, str(path), prec)


def format_module(M: AndersonModule) -> str:
    """Definition text that parses back to ``M``."""
    F = M.field
    lines = ["[field]", f"p = {F.p}", f"m = {F.r}"]
    if F.r > 1:
        lines.append(f'modulus = "{format_fp_poly(F.modulus, F.name)}"')
    lines += ["", "[place]", f'pi = "{M.place.pi.format()}"', "", "[module]", f"dim = {M.d}"]
    for j, mat in enumerate(M.rational):
        rows = ", ".join("[" + ", ".join(f'"{e.format()}"' for e in row) + "]" for row in mat)
        lines.append(f"M{j} = [{rows}]")
    if M.motive is not None:
        mot = M.motive
        gens = [[[c.format() for c in entry] for entry in g] for g in mot.generators]

        def dump(exprs):
            return [[[i + 1, f.format(), c.format()] for i, f, c in e] for e in exprs]

        lines += ["", "[motive]", f"generators = {gens!r}", f"coords = {dump(mot.coords)!r}",
                  f"relations = {dump(mot.relations)!r}"]
    return "\n".join(lines) + "\n"


def corpus_dir() -> Path:
    return Path(__file__).parent / "corpus"


def corpus_files():
    return sorted(corpus_dir().glob("*.tmod"))


def load_corpus(name, prec=None) -> AndersonModule:
    return parse_module_file(corpus_dir() / f"{name}.tmod", prec)


__all__ = [
    "corpus_dir", "corpus_files", "format_module", "load_corpus", "parse_module_file",
    "parse_module_text",
]
