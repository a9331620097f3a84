"""
Text forms: the descriptor grammar used in config files, and the CSV tables
written by the management commands.

Grammar::

    function := factor ("*" factor)*
    factor   := "const(" num ")" | "modulus(" num ")" | "height(" num ")"
              | "truncated(" num "," num ")" | "kernel(" num "," num ")"
              | "box(" num "," num ")"
    num      := float literal | float "/" float
"""
from __future__ import annotations

import csv
import logging
import re

from rest_framework import serializers

from .exceptions import GrammarError, InputError
from .functions import (BoxIndicator, PowerOfHeight, PowerOfModulus, Product, Scalar, ShiftedKernelPower,
                        TruncatedPower)
from .geometry import Interval

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

_FACTOR = re.compile(r"\s*([a-z]+)\s*\(([^()]*)\)\s*")
_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")

_ARITY = {
    "const": (1, lambda c: Scalar(c)),
    "modulus": (1, lambda s: PowerOfModulus(s)),
    "height": (1, lambda s: PowerOfHeight(s)),
    "truncated": (2, lambda s, r: TruncatedPower(s, r)),
    "kernel": (2, lambda t, g: ShiftedKernelPower(t, g)),
    "box": (2, lambda left, length: BoxIndicator(Interval(left, length))),
}


def parse_number(text):
    text = text.strip()
    if "/" in text:
        num, _, den = text.partition("/")
        if not (_NUMBER.match(num.strip()) and _NUMBER.match(den.strip())):
            raise GrammarError(f"not a number: {text!r}")
        if float(den) == 0:
            raise GrammarError(f"zero denominator in {text!r}")
        return float(num) / float(den)
    if not _NUMBER.match(text):
        raise GrammarError(f"not a number: {text!r}")
    return float(text)


def parse_function(text: str):
    """Parse the grammar above into a SymbolicFunction."""
    if not isinstance(text, str) or not text.strip():
        raise GrammarError(f"empty function description: {text!r}")
    factors = []
    for position, part in enumerate(text.split("*")):
        match = _FACTOR.fullmatch(part)
        if not match:
            raise GrammarError(f"factor {position + 1} of {text!r} is malformed: {part.strip()!r}")
        name, body = match.groups()
        if name not in _ARITY:
            raise GrammarError(f"unknown factor {name!r} in {text!r}; expected one of {sorted(_ARITY)}")
        arity, build = _ARITY[name]
        args = [parse_number(arg) for arg in body.split(",")] if body.strip() else []
        if len(args) != arity:
            raise GrammarError(f"{name}() takes {arity} argument(s), got {len(args)} in {text!r}")
        try:
            factors.append(build(*args))
        except InputError as exc:
            raise GrammarError(f"invalid factor {part.strip()!r}: {exc}") from exc
    return factors[0] if len(factors) == 1 else Product(tuple(factors))




METADATA = ["schema", "command", "p", "q", "alpha", "a", "delta"]

# ---------------------------------------------------------------- CSV tables

def _float():
    return serializers.FloatField(required=False, allow_null=True)


def _int():
    return serializers.IntegerField(required=False, allow_null=True)


def _bool():
    return serializers.BooleanField(required=False, allow_null=True)


def _text():
    return serializers.CharField(required=False, allow_null=True)


class FunctionField(serializers.CharField):
    """A SymbolicFunction column, stored in the grammar above."""

    def to_representation(self, value):
        return value.to_text() if hasattr(value, "to_text") else str(value)

    def to_internal_value(self, data):
        text = super().to_internal_value(data)
        try:
            return parse_function(text).to_text()
        except GrammarError as exc:
            raise serializers.ValidationError(str(exc)) from exc


def _function():
    return FunctionField(required=False, allow_null=True)


class TableSerializer(serializers.Serializer):
    """Fixed-column CSV rows for one command; metadata columns come first."""
    table = None

    schema = serializers.IntegerField()
    command = serializers.CharField()
    p = _float()
    q = _float()
    alpha = _float()
    a = _float()
    delta = _float()

    def validate_schema(self, value):
        if value != SCHEMA_VERSION:
            raise serializers.ValidationError(f"schema {value!r} is not {SCHEMA_VERSION}")
        return value

    def validate_command(self, value):
        if value != self.table:
            raise serializers.ValidationError(f"row belongs to {value!r}, not {self.table!r}")
        return value

    @classmethod
    def header(cls):
        return list(cls().fields)

    def row_cells(self, row: dict):
        unknown = set(row) - set(self.header())
        if unknown:
            raise InputError(f"{self.table} rows have no column(s) {sorted(unknown)}")
        data = type(self)(dict(row, schema=SCHEMA_VERSION, command=self.table)).data
        return [_cell(value) for value in data.values()]

    def parse_cells(self, values):
        """Validated row from one CSV record, or InputError listing the bad columns."""
        data = {name: (value if value != "" else None) for name, value in zip(self.header(), values)}
        reader = type(self)(data=data)
        if not reader.is_valid():
            problems = "; ".join(f"{name}: {' '.join(map(str, errors))}" for name, errors in reader.errors.items())
            raise InputError(problems)
        return dict(reader.validated_data)


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


class ApplySerializer(TableSerializer):
    table = "apply"

    operator = _text()
    function = _function()
    x = _float()
    y = _float()
    value = _float()
    error_estimate = _float()
    converged = _bool()


class NormRatioSerializer(TableSerializer):
    table = "norm_ratio"

    operator = _text()
    function = _function()
    source_order = _float()
    target_order = _float()
    truncation = _text()
    numerator = _float()
    denominator = _float()
    ratio = _float()


class WeightConstantSerializer(TableSerializer):
    table = "weight_constant"

    weight = _function()
    kind = serializers.ChoiceField(choices=["bp", "bpq"], required=False, allow_null=True)
    value = _float()
    interval_left = _float()
    interval_length = _float()
    family_size = _int()


class DyadicApplySerializer(TableSerializer):
    table = "dyadic_apply"

    function = _function()
    grid_tag = _float()
    j_min = _int()
    j_max = _int()
    x = _float()
    y = _float()
    value = _float()
    boxes = _int()


class DominationSerializer(TableSerializer):
    table = "domination"

    function = _function()
    j_min = _int()
    j_max = _int()
    x = _float()
    y = _float()
    s_value = _float()
    model_sum = _float()
    ratio = _float()


class MaximalSerializer(TableSerializer):
    table = "maximal"

    function = _function()
    grid_tag = _float()
    x = _float()
    y = _float()
    maximal = _float()
    s_value = _float()
    bound = _float()
    violation = _bool()


class SchurSerializer(TableSerializer):
    table = "schur"

    beta_tgt = _float()
    b = _float()
    omega_param = _float()
    r = _float()
    s = _float()
    t = _float()
    y = _float()
    ratio_first = _float()
    ratio_second = _float()
    m1 = _float()
    m2 = _float()
    spread = _float()


class LemmaScalingSerializer(TableSerializer):
    table = "lemma_scaling"

    nu = _float()
    gamma = _float()
    t = _float()
    norm_power = _float()
    slope = _float()
    expected_slope = _float()
    residual = _float()


class SharpnessSerializer(TableSerializer):
    table = "sharpness"

    operator = _text()
    weight_constant = _float()
    source_norm = _float()
    target_norm = _float()
    ratio = _float()
    error = _text()
    weight_slope = _float()
    source_slope = _float()
    ratio_slope = _float()
    pott_reguera = _float()
    weight_exponent = _float()


class OffdiagSweepSerializer(TableSerializer):
    table = "offdiag_sweep"

    beta_tgt = _float()
    b = _float()
    admissible = _bool()
    test_function = _function()
    ratio_small = _float()
    ratio_medium = _float()
    ratio_large = _float()
    growth = _float()
    verdict = serializers.ChoiceField(choices=["stable", "growing", "unclear", "error"], required=False,
                                      allow_null=True)
    consistent = _bool()


class TilingCheckSerializer(TableSerializer):
    table = "tiling_check"

    grid_tag = _float()
    j_min = _int()
    j_max = _int()
    x0 = _float()
    x1 = _float()
    y0 = _float()
    y1 = _float()
    samples = _int()
    violations = _int()


SERIALIZERS = {cls.table: cls for cls in TableSerializer.__subclasses__()}


def write_csv(path, serializer: TableSerializer, rows):
    """Write rows in the serializer's column order; the file is fully determined by the rows."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(serializer.header())
        for row in rows:
            writer.writerow(serializer.row_cells(row))
    logger.debug("wrote %s table to %s", serializer.table, path)


def read_csv(path):
    """Re-parse a table written by :func:`write_csv`; returns (command, rows)."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file, expected a header row") from None
        records = list(reader)
    if header[:len(METADATA)] != METADATA:
        raise InputError(f"{path}: header does not start with {METADATA}")
    commands = {record[1] for record in records if len(record) > 1}
    if len(commands) > 1:
        raise InputError(f"{path}: mixed commands {sorted(commands)}")
    command = commands.pop() if commands else _command_for_header(path, header)
    if command not in SERIALIZERS:
        raise InputError(f"{path}: unknown command {command!r}")
    serializer = SERIALIZERS[command]()
    if header != serializer.header():
        raise InputError(f"{path}: header does not match the {command} table")
    rows = []
    for number, record in enumerate(records, start=2):
        if len(record) != len(header):
            raise InputError(f"{path}:{number}: expected {len(header)} fields, got {len(record)}")
        try:
            rows.append(serializer.parse_cells(record))
        except InputError as exc:
            raise InputError(f"{path}:{number}: {exc}") from exc
    return command, rows


def _command_for_header(path, header):
    for command, cls in SERIALIZERS.items():
        if cls.header() == header:
            return command
    raise InputError(f"{path}: header matches no known table")
