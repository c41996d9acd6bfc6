import pytest
from hypothesis import given, strategies as st

from dappnet.extract.lexer import LexError, tokenize_text


def texts(src):
    return [t.text for t in tokenize_text(src)]


def test_comments_and_whitespace_dropped():
    src = "a // line comment b()\n/* block\n c() */ d"
    assert texts(src) == ["a", "d"]


def test_string_is_one_opaque_token():
    toks = tokenize_text('x = "foo(); // not a comment";')
    kinds = [t.kind for t in toks]
    assert "string" in kinds
    assert [t.text for t in toks if t.kind == "ident"] == ["x"]


def test_line_numbers_track_newlines():
    toks = tokenize_text("a\n\n/* x\n y */ b")
    assert [(t.text, t.line) for t in toks] == [("a", 1), ("b", 4)]


@pytest.mark.parametrize("src", ["/* never closed", '"open string', "x = 'abc"])
def test_unterminated_constructs_raise(src):
    with pytest.raises(LexError):
        tokenize_text(src, "bad.sol")


@given(st.text(alphabet="abc(){};.\n ", max_size=60))
def test_commented_out_code_never_produces_tokens(body):
    assert tokenize_text("/*" + body.replace("*/", "") + "*/") == []
