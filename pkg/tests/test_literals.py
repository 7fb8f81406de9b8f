"""
Tests for ncerg literal parsing and formatting.
"""

import math

import numpy as np
import pytest

from ncerg.algebra import AlgebraShape, Operator
from ncerg.exceptions import (
    FamilySpecError,
    InvalidDescriptorError,
    InvalidParameterError,
    LiteralParseError,
    ShapeMismatchError,
)
from ncerg.literals import (
    descriptor_from_text,
    detect_format,
    family_from_text,
    operator_from_literal,
    operator_to_literal,
    parse_literal,
    parse_number_list,
    step_from_text,
    step_to_text,
    weights_from_text,
)
from ncerg.rearrangement import StepFunction
from ncerg.spaces import LorentzNorm, LpNorm, L1CapLinfNorm, MarcinkiewiczNorm, OrliczNorm


MIXED = AlgebraShape(((1, 1.0), (2, 0.5)))


def test_blocks_literal():
    x = operator_from_literal({"algebra": [[1, 1.0], [2, 0.5]], "blocks": [[[3.0]], [[1.0, 2.0], [2.0, 1.0]]]})
    assert x.shape == MIXED
    assert x.blocks[1][0, 1] == 2.0


def test_complex_entries_as_pairs():
    x = operator_from_literal({"blocks": [[[[0.0, 1.0]]], [[[1, 0], [0, -1]], [[0, 1], [2, 0]]]]}, MIXED)
    assert x.blocks[0][0, 0] == 1j
    assert x.blocks[1][0, 1] == -1j
    assert x.blocks[1][1, 1] == 2.0


def test_bare_list_of_blocks():
    x = operator_from_literal([[[3.0]], [[1.0, 0.0], [0.0, 1.0]]], MIXED)
    assert x.blocks[0][0, 0] == 3.0


def test_diag_literal_defaults_to_unit_weights():
    x = operator_from_literal({"diag": [3, 1, -2]})
    assert x.shape == AlgebraShape.diagonal(3)
    np.testing.assert_array_equal(x.diagonal_values().real, [3.0, 1.0, -2.0])


def test_diag_literal_with_weights_and_pairs():
    x = operator_from_literal({"diag": [[1.0, 2.0], [3.0, 0.0]], "weights": [1.0, 0.5]})
    assert x.shape == AlgebraShape.diagonal(2, [1.0, 0.5])
    np.testing.assert_array_equal(x.diagonal_values(), [1 + 2j, 3.0])


def test_bare_diag_list_uses_given_shape():
    x = operator_from_literal([1.0, 2.0, 3.0], MIXED)
    assert x.shape == MIXED
    np.testing.assert_array_equal(x.diagonal_values().real, [1.0, 2.0, 3.0])


def test_literal_shape_conflict():
    with pytest.raises(ShapeMismatchError):
        operator_from_literal({"diag": [1, 2], "weights": [1, 1]}, AlgebraShape.diagonal(2, [1.0, 0.5]))
    with pytest.raises(ShapeMismatchError):
        operator_from_literal({"blocks": [[[1.0]]]}, MIXED)


@pytest.mark.parametrize("data", [
    {"values": [1, 2]},
    "diag",
    {"blocks": [[[[1, 2, 3]]]], "algebra": [[1, 1]]},
    {"blocks": [["a"]], "algebra": [[1, 1]]},
])
def test_malformed_literals(data):
    with pytest.raises(LiteralParseError):
        operator_from_literal(data)


def test_literal_needs_an_algebra():
    with pytest.raises(LiteralParseError):
        operator_from_literal({"blocks": [[[1.0]]]})


def test_operator_to_literal():
    x = Operator(MIXED, [[[2.0]], [[1.0, 1j], [-1j, 0.0]]])
    literal = operator_to_literal(x)
    assert literal["algebra"] == [[1, 1.0], [2, 0.5]]
    assert literal["blocks"][0] == [[2.0]]
    assert literal["blocks"][1][0][1] == [0.0, 1.0]
    assert operator_from_literal(literal).allclose(x)


def test_parse_number_list():
    assert parse_number_list("3, 1,-2") == [3.0, 1.0, -2.0]
    values = parse_number_list("0.5+1j, 2")
    assert values == [0.5 + 1j, 2.0]
    assert isinstance(values[1], float)
    with pytest.raises(LiteralParseError):
        parse_number_list("1, two")
    with pytest.raises(LiteralParseError):
        parse_number_list(" , ")


def test_step_text():
    f = step_from_text("step:1:2,3:0.5")
    assert f == StepFunction(((1.0, 2.0), (3.0, 0.5)))
    assert f(0.5) == 2.0 and f(2.0) == 0.5 and f(3.0) == 0.0
    assert step_to_text(f) == "step:1:2,3:0.5"
    with pytest.raises(LiteralParseError):
        step_from_text("step:1:2:3")
    with pytest.raises(LiteralParseError):
        step_from_text("step:one:2")


@pytest.mark.parametrize("text,expected", [
    ('{"diag": [1]}', "json"),
    ("[1, 2]", "json"),
    ("diag:1,2", "diag"),
    ("  step:1:1", "step"),
])
def test_detect_format(text, expected):
    assert detect_format(text) == expected


def test_detect_format_rejects_unknown():
    with pytest.raises(LiteralParseError):
        detect_format("3,1,-2")


def test_parse_literal():
    assert isinstance(parse_literal("step:2:1"), StepFunction)
    x = parse_literal("diag:3,1,-2")
    assert x.shape == AlgebraShape.diagonal(3)
    y = parse_literal('{"diag": [1, 2, 3]}', MIXED)
    assert y.shape == MIXED
    with pytest.raises(LiteralParseError):
        parse_literal('{"diag": [1, 2')


@pytest.mark.parametrize("text,cls", [
    ("lp:2", LpNorm),
    ("lp:inf", LpNorm),
    ("l1&linf", L1CapLinfNorm),
    ("orlicz:power:3", OrliczNorm),
    ("orlicz:exp_minus_one", OrliczNorm),
    ("lorentz:sqrt", LorentzNorm),
    ("lorentz:power:0.25", LorentzNorm),
    ("marcinkiewicz:min_linear:2", MarcinkiewiczNorm),
    ('{"kind": "lp", "p": 1}', LpNorm),
])
def test_descriptor_shorthands(text, cls):
    assert isinstance(descriptor_from_text(text), cls)


def test_descriptor_shorthand_params():
    assert math.isinf(descriptor_from_text("lp:inf").p)
    assert descriptor_from_text("lorentz:power:0.25").phi.params == {"alpha": 0.25}
    assert descriptor_from_text("marcinkiewicz:min_linear:2").phi.params == {"c": 2.0}


@pytest.mark.parametrize("text,error", [
    ("lp", LiteralParseError),
    ("lp:x", LiteralParseError),
    ("lp:0.5", InvalidParameterError),
    ("sobolev:2", LiteralParseError),
    ("orlicz", LiteralParseError),
    ("lorentz:cosh", InvalidDescriptorError),
])
def test_descriptor_rejects(text, error):
    with pytest.raises(error):
        descriptor_from_text(text)


def test_family_shorthands():
    assert family_from_text("heat_cycle:4").name == "heat_cycle(4)"
    assert family_from_text("builtin:schur_abs_3").shape == AlgebraShape.matrix(3)
    assert family_from_text('{"family": "heat_cycle", "n": 2}').d == 1
    with pytest.raises(LiteralParseError):
        family_from_text("heat_cycle:x")
    with pytest.raises(LiteralParseError):
        family_from_text("builtin:nope")
    with pytest.raises(LiteralParseError):
        family_from_text("brownian")
    with pytest.raises(FamilySpecError):
        family_from_text('{"family": "heat_cycle", "n": 1}')


def test_weights_from_text():
    assert weights_from_text(None, 3) == [1.0, 1.0, 1.0]
    assert weights_from_text("1, 2", 2) == [1.0, 2.0]
    with pytest.raises(LiteralParseError):
        weights_from_text("1", 2)
    with pytest.raises(LiteralParseError):
        weights_from_text("1, 1j", 2)
