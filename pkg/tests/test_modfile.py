import pytest

from tmod import ParseError, ValidationError, format_module, parse_module_file, parse_module_text
from tmod.anderson import DECLARED
from tmod.modfile import corpus_files

from conftest import CORPUS, TENSOR2_TEXT

F9_TEXT = """
# Carlitz-type module over F_9
[field]
p = 3
m = 2
modulus = "g^2+1"

[place]
pi = "t+g"        # residue field F_9

[module]
dim = 1
M0 = [["t"]]
M1 = [["g*t + 1"]]
"""


def roundtrip(M):
    again = parse_module_text(format_module(M), source=M.name or "<string>", prec=M.K.prec)
    assert again.rational == M.rational
    assert again.place.pi == M.place.pi
    assert again.field.order == M.field.order
    assert again.phi_t.equals(M.phi_t)
    return again


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_roundtrip(corpus, name):
    roundtrip(corpus[name])


def test_f9_base_roundtrip():
    M = parse_module_text(F9_TEXT, source="f9")
    assert M.q == 9 and M.field.p == 3
    again = roundtrip(M)
    assert "modulus" in format_module(again)


def test_motive_roundtrip():
    M = parse_module_text(TENSOR2_TEXT, source="tensor2", prec=32)
    again = roundtrip(M)
    assert again.abelian_cert == DECLARED
    assert again.motive == M.motive


def test_read_file(tmp_path):
    path = tmp_path / "carlitz.tmod"
    path.write_text(format_module(parse_module_file(corpus_files()[0])))
    M = parse_module_file(path, prec=16)
    assert M.K.prec == 16 and M.name == "carlitz"
    with pytest.raises(ParseError, match="cannot read"):
        parse_module_file(tmp_path / "missing.tmod")


BASE = """[field]
p = 3
m = 1

[place]
pi = "t"

[module]
dim = 1
M0 = [["t"]]
M1 = [["1"]]
"""


@pytest.mark.parametrize("old,new,line,match", [
    ('M1 = [["1"]]', 'M1 = [["1 +"]]', 11, "M1"),
    ('pi = "t"', 'pi = "t^^2"', 6, "pi"),
    ('M1 = [["1"]]', 'M1 = [1]', 11, "list of rows"),
    ('M1 = [["1"]]', 'M1 = [["1"]', 11, "not a literal"),
    ("p = 3", "p = three", 2, "not a literal"),
    ("p = 3", "p = 3.5", 2, "integer"),
])
def test_errors_carry_line_numbers(old, new, line, match):
    with pytest.raises(ParseError, match=match) as info:
        parse_module_text(BASE.replace(old, new), source="bad.tmod")
    assert info.value.line == line


def test_structural_errors():
    with pytest.raises(ParseError, match="missing"):
        parse_module_text(BASE.replace("dim = 1\n", ""), source="bad")
    with pytest.raises(ParseError, match="without gaps"):
        parse_module_text(BASE.replace("M1", "M2"), source="bad")
    with pytest.raises(ParseError, match="malformed"):
        parse_module_text(BASE + "this is not ini\n", source="bad")
    with pytest.raises(ParseError):
        parse_module_text("M0 = 1\n", source="bad")
    with pytest.raises(ParseError) as info:
        parse_module_text(BASE.replace("[place]", "[place"), source="bad")
    assert info.value.line == 5


def test_semantic_errors():
    with pytest.raises(ValidationError, match="not prime"):
        parse_module_text(BASE.replace("p = 3", "p = 4"), source="bad")
    with pytest.raises(ValidationError, match="irreducible|reducible"):
        parse_module_text(BASE.replace('pi = "t"', 'pi = "t^2-1"'), source="bad")
    with pytest.raises(ValidationError):
        parse_module_text(BASE.replace('M0 = [["t"]]', 'M0 = [["t+1"]]'), source="bad")


def test_motive_term_errors():
    bad = TENSOR2_TEXT.replace('coords = [[[1, "1", "1"]]', 'coords = [[[0, "1", "1"]]')
    with pytest.raises(ParseError, match="index >= 1") as info:
        parse_module_text(bad, source="bad")
    assert info.value.line is not None
