"""Text format for group definitions and deterministic report files.

A group file declares the dimension, optionally a preserved form of
signature (p, q) (with an optional custom reference basis) or the 3+3
product splitting marker, an ambient descriptor, and named generators as
row-major matrices with a translation vector.  Reports are JSON documents
with every float rendered to 17 significant digits, so identical runs are
byte-identical and round-trip exactly.
"""

import json
import re

import numpy as np

from .affine import AffineMap
from .certificates import GroupSpec
from .dynamics import AmbientGroup
from .errors import GroupFileError
from .signs import ProductSplit, QuadraticForm

SCHEMA_VERSION = 1


def _ambient_from_descriptor(text, dim):
    text = text.strip()
    m = re.fullmatch(r"SO\((\d+),(\d+)\)", text)
    if m:
        return AmbientGroup.so_pq(int(m.group(1)), int(m.group(2)))
    m = re.fullmatch(r"SL\((\d+)\)", text)
    if m:
        return AmbientGroup.sl(int(m.group(1)))
    if text.replace(" ", "") in ("SO(2,1)xSL3(R)", "SO(2,1)XSL3(R)"):
        return AmbientGroup.product_so21_sl3()
    m = re.fullmatch(r"generic\s+(\d+)\s+(\d+)", text)
    if m:
        return AmbientGroup.generic(int(m.group(1)), int(m.group(2)))
    raise ValueError(f"unknown ambient descriptor '{text}'")


def parse_group_file(text):
    """Parse a group definition document into a GroupSpec."""
    dim = None
    form_sig = None
    basis_rows = None
    product_split = False
    ambient_text = None
    generators = []
    current = None  # [name, rows, translation]

    def fail(message, lineno, column=None):
        raise GroupFileError(message, line=lineno, column=column)

    def finish_generator(lineno):
        if current is None:
            return
        name, rows, translation = current
        if len(rows) != dim:
            fail(f"generator '{name}' has {len(rows)} rows, expected {dim}", lineno)
        if translation is None:
            fail(f"generator '{name}' is missing its translation", lineno)
        try:
            generators.append(AffineMap(np.array(rows), np.array(translation),
                                        name=name))
        except Exception as exc:
            fail(f"generator '{name}': {exc}", lineno)

    lines = text.splitlines()
    in_basis = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        tokens = line.split()
        key = tokens[0]
        try:
            if key == "schema":
                if int(tokens[1]) != SCHEMA_VERSION:
                    fail(f"unsupported schema version {tokens[1]}", lineno)
            elif key == "dim":
                dim = int(tokens[1])
                if not 1 <= dim <= 8:
                    fail(f"dimension must be in 1..8, got {dim}", lineno)
            elif key == "form":
                form_sig = (int(tokens[1]), int(tokens[2]))
            elif key == "product-split":
                product_split = True
            elif key == "ambient":
                ambient_text = line.partition(" ")[2].strip()
            elif key == "basis":
                in_basis = True
                basis_rows = []
            elif key == "generator":
                finish_generator(lineno)
                in_basis = False
                if len(tokens) != 2:
                    fail("generator needs exactly one name", lineno)
                current = [tokens[1], [], None]
            elif key == "row":
                values = [float(t) for t in tokens[1:]]
                if dim is None:
                    fail("row before dim", lineno)
                if len(values) != dim:
                    fail(f"row has {len(values)} entries, expected {dim}", lineno,
                         column=len(tokens[0]) + 2)
                if in_basis:
                    basis_rows.append(values)
                elif current is not None:
                    current[1].append(values)
                else:
                    fail("row outside basis or generator block", lineno)
            elif key == "translate":
                values = [float(t) for t in tokens[1:]]
                if current is None:
                    fail("translate outside a generator block", lineno)
                if len(values) != dim:
                    fail(f"translation has {len(values)} entries, expected {dim}",
                         lineno, column=len(tokens[0]) + 2)
                current[2] = values
            else:
                fail(f"unknown directive '{key}'", lineno, column=1)
        except GroupFileError:
            raise
        except (ValueError, IndexError) as exc:
            fail(f"cannot parse: {exc}", lineno)
    finish_generator(len(lines))

    if dim is None:
        raise GroupFileError("missing dim declaration")
    form = None
    psplit = None
    if product_split:
        if dim != 6:
            raise GroupFileError("product-split needs dimension 6")
        psplit = ProductSplit.standard()
    elif form_sig is not None:
        p, q = form_sig
        if p + q != dim:
            raise GroupFileError(f"signature ({p},{q}) does not match dimension {dim}")
        basis = np.array(basis_rows).T if basis_rows else None
        if basis is not None and basis.shape != (dim, dim):
            raise GroupFileError("form basis must have one row per basis vector")
        form = QuadraticForm(p, q, basis=basis)
    if ambient_text is not None:
        try:
            ambient = _ambient_from_descriptor(ambient_text, dim)
        except ValueError as exc:
            raise GroupFileError(str(exc)) from None
    elif psplit is not None:
        ambient = AmbientGroup.product_so21_sl3()
    elif form is not None:
        ambient = AmbientGroup.so_pq(*form_sig)
    else:
        ambient = AmbientGroup.generic(0, 0)
    try:
        return GroupSpec(dim=dim, generators=generators, ambient=ambient,
                         form=form, product_split=psplit)
    except ValueError as exc:
        raise GroupFileError(str(exc)) from None


def write_group_file(spec, note=""):
    """Serialize a GroupSpec back to the text format."""
    out = []
    if note:
        out.append(f"# {note}")
    out.append(f"schema {SCHEMA_VERSION}")
    out.append(f"dim {spec.dim}")
    if spec.product_split is not None:
        out.append("product-split")
    elif spec.form is not None:
        out.append(f"form {spec.form.p} {spec.form.q}")
        if not np.array_equal(spec.form.basis, np.eye(spec.dim)):
            out.append("basis")
            for col in spec.form.basis.T:
                out.append("row " + " ".join(fmt_float(x) for x in col))
    out.append(f"ambient {spec.ambient.kind}")
    for g in spec.generators:
        out.append(f"generator {g.name}")
        for row in g.linear:
            out.append("row " + " ".join(fmt_float(x) for x in row))
        out.append("translate " + " ".join(fmt_float(x) for x in g.translation))
    return "\n".join(out) + "\n"


def fmt_float(x):
    """Decimal rendering with 17 significant digits (exact round trip)."""
    return format(float(x), ".17g")


def _render(obj, out):
    if obj is None or obj is True or obj is False:
        out.append("null" if obj is None else ("true" if obj else "false"))
    elif isinstance(obj, (float, np.floating)):
        out.append(fmt_float(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, np.ndarray):
        _render(obj.tolist(), out)
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(str(k) for k in obj)):
            if i:
                out.append(",")
            out.append(json.dumps(key) + ":")
            value = obj[key] if key in obj else obj[_orig_key(obj, key)]
            _render(value, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _render(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def _orig_key(obj, key):
    for k in obj:
        if str(k) == key:
            return k
    raise KeyError(key)


def render_report(report):
    """Canonical JSON text: sorted keys, 17-significant-digit floats.

    Hand-rendered so the float formatting is under our control; identical
    inputs produce byte-identical documents.
    """
    out = []
    _render(report, out)
    return "".join(out) + "\n"


def parse_report(text):
    return json.loads(text)
