import json

from pydantic import ValidationError
from pytest import approx, mark, raises

from src.function_specs import load_function_spec, parse_function_spec, to_spec
from src.funcspace import (
    GznFamily,
    LinearCombo,
    LogExtremal,
    MobiusAtom,
    Polynomial,
    Precomposed,
    eval_deriv,
    eval_value,
)


COMBO = {
    "type": "combo",
    "terms": [
        {"coef": [2.0, 0.0], "fn": {"type": "log_extremal"}},
        {"coef": [0.0, 1.0], "fn": {"type": "mobius", "lambda": [0.3, -0.2]}},
        {"coef": [1.0, 0.0], "fn": {
            "type": "composed",
            "outer": {"type": "polynomial", "coeffs": [[0, 0], [1, 0], [0, 0.5]]},
            "lambda": [0.1, 0.1],
            "theta": 0.3,
        }},
    ],
}


@mark.parametrize("document kind".split(), (
    ({"type": "polynomial", "coeffs": [[1, 0], [0, 2]]}, Polynomial),
    ({"type": "mobius", "lambda": [0.5, 0.0]}, MobiusAtom),
    ({"type": "log_extremal"}, LogExtremal),
    ({"type": "gzn", "n": 10, "base": [0.5, 0.1]}, GznFamily),
    ({"type": "composed", "outer": {"type": "log_extremal"}, "theta": 1.0}, Precomposed),
    (COMBO, LinearCombo),
))
def test_parse_each_variant(document, kind):
    assert isinstance(parse_function_spec(document), kind)


def test_parsed_polynomial_values():
    f = parse_function_spec({"type": "polynomial", "coeffs": [[1, 0], [0, 2]]})
    assert eval_value(f, 0.5) == approx(1 + 1j)


@mark.parametrize("document", (
    {"type": "mobius", "lambda": [1.5, 0.0]},
    {"type": "gzn", "n": 10, "base": [0.8, 0.8]},
    {"type": "gzn", "n": 100_000, "base": [0.5, 0.0]},
    {"type": "polynomial", "coeffs": []},
    {"type": "polynomial", "coeffs": [[1, 0]], "extra": 1},
    {"type": "bessel"},
    {"type": "combo", "terms": []},
))
def test_invalid_documents_are_rejected(document):
    with raises(ValidationError):
        parse_function_spec(document)


def test_encoding_round_trips_through_evaluation():
    f = parse_function_spec(COMBO)
    g = parse_function_spec(to_spec(f))
    for z in (0.2, -0.4 + 0.3j):
        assert eval_value(g, z) == approx(eval_value(f, z))
        assert eval_deriv(g, z) == approx(eval_deriv(f, z))


def test_load_from_file(tmp_path):
    path = tmp_path / "f.json"
    path.write_text(json.dumps({"type": "gzn", "n": 3, "base": [0.2, 0.0]}))
    f = load_function_spec(path)
    assert isinstance(f, GznFamily)
    assert f.n == 3


def test_load_malformed_file(tmp_path):
    path = tmp_path / "f.json"
    path.write_text("{not json")
    with raises(ValidationError):
        load_function_spec(path)
