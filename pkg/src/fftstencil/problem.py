"""Problem specs: a TOML document describing one solve.

Example::

    shape = [256]
    kernel = "heat1d"            # builtin name, or a [kernel] table
    boundary = "periodic"        # or "dirichlet", "dirichlet:0.5", "dirichlet:1,2", "file(b.csv)"
    T = 100
    solver = "both"              # fft | naive | both
    cutoff = 32
    init = "random(42)"          # zeros | delta | random(SEED) | file(PATH)
    output = "csv"               # csv | raw | none
    mode = "verify"              # solve | verify | bench | accuracy

An inline kernel is a table::

    [kernel]
    taps = [
      { offset = -1, coeff = 0.25 },
      { offset = 0,  coeff = 0.5 },
      { offset = 1,  coeff = 0.25 },
    ]

Offsets are an integer (1-D) or a list of integers; ``coeff`` is a number,
or an ``m x m`` nested list for vector fields.  ``[kernel] name = "heat2d"``
with an optional ``alpha`` selects a builtin with a non-default coefficient.
Relative file paths resolve against the spec file's directory.  Unknown
keys are errors.
"""

from __future__ import annotations

import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from fftstencil.grid import BoundaryRule, FieldGrid, GridShape, StencilKernel
from fftstencil.gridio import read_grid
from fftstencil.stencils import DEFAULT_ALPHA, builtin_stencil

__all__ = ["SpecError", "ProblemSpec", "load_spec", "parse_spec", "initial_grid", "MODES", "SOLVERS"]

MODES = ("solve", "verify", "bench", "accuracy")
SOLVERS = ("fft", "naive", "both")
OUTPUTS = ("csv", "raw", "none")
_KEYS = {"shape", "kernel", "boundary", "T", "solver", "cutoff", "init", "output", "mode"}
_REQUIRED = {"shape", "kernel", "T"}
_KERNEL_KEYS = {"name", "alpha", "taps"}
_TAP_KEYS = {"offset", "coeff"}

_FILE_RE = re.compile(r"^file\((.+)\)$")
_RANDOM_RE = re.compile(r"^random\(\s*(\d+)\s*\)$")


class SpecError(ValueError):
    """The problem spec is malformed or inconsistent."""


@dataclass(frozen=True)
class ProblemSpec:
    shape: tuple[int, ...]
    kernel: StencilKernel
    boundary: BoundaryRule | None
    T: int
    solver: str = "fft"
    cutoff: int = 32
    init: str = "zeros"
    output: str = "csv"
    mode: str = "solve"
    base_dir: Path = field(default=Path("."), compare=False)
    kernel_label: str = "inline"

    @property
    def periodic(self) -> bool:
        return self.boundary is None

    @property
    def grid_shape(self) -> GridShape:
        return GridShape(self.shape, self.kernel.fields)


def _parse_kernel(value) -> tuple[StencilKernel, str]:
    if isinstance(value, str):
        try:
            return builtin_stencil(value), value
        except ValueError as exc:
            raise SpecError(str(exc)) from None
    if not isinstance(value, dict):
        raise SpecError("kernel must be a builtin name or a table")
    unknown = set(value) - _KERNEL_KEYS
    if unknown:
        raise SpecError(f"unknown kernel keys: {sorted(unknown)}")
    if ("name" in value) == ("taps" in value):
        raise SpecError("kernel table needs exactly one of 'name' or 'taps'")
    if "name" in value:
        try:
            return builtin_stencil(value["name"], float(value.get("alpha", DEFAULT_ALPHA))), value["name"]
        except ValueError as exc:
            raise SpecError(str(exc)) from None
    if "alpha" in value:
        raise SpecError("'alpha' only applies to builtin kernels")
    taps = {}
    for n, tap in enumerate(value["taps"]):
        if not isinstance(tap, dict) or set(tap) != _TAP_KEYS:
            raise SpecError(f"kernel tap {n} must have exactly the keys 'offset' and 'coeff'")
        off = tap["offset"]
        off = (int(off),) if isinstance(off, int) else tuple(int(o) for o in off)
        if off in taps:
            raise SpecError(f"kernel tap {n} repeats offset {off}")
        taps[off] = tap["coeff"]
    if not taps:
        raise SpecError("kernel has no taps")
    try:
        return StencilKernel(taps), "inline"
    except (ValueError, TypeError) as exc:
        raise SpecError(f"bad kernel: {exc}") from None


def _resolve(base: Path, text: str) -> Path:
    p = Path(text.strip())
    return p if p.is_absolute() else base / p


def _parse_boundary(text: str, shape: GridShape, base: Path) -> BoundaryRule | None:
    text = text.strip()
    if text == "periodic":
        return None
    m = _FILE_RE.match(text)
    if m:
        try:
            grid = read_grid(_resolve(base, m.group(1)))
        except (OSError, ValueError) as exc:
            raise SpecError(f"boundary file: {exc}") from None
        if grid.shape != shape:
            raise SpecError(f"boundary file has shape {grid.shape.array_shape}, expected {shape.array_shape}")
        return BoundaryRule.profile(grid)
    if text == "dirichlet":
        return BoundaryRule.dirichlet(0.0)
    if text.startswith("dirichlet:"):
        try:
            vals = [float(v) for v in text[len("dirichlet:"):].split(",")]
        except ValueError:
            raise SpecError(f"cannot parse boundary values in {text!r}") from None
        if len(vals) not in (1, shape.fields):
            raise SpecError(f"boundary gives {len(vals)} values for {shape.fields} fields")
        return BoundaryRule.dirichlet(vals)
    raise SpecError(f"boundary must be 'periodic', 'dirichlet[:v,...]' or 'file(PATH)', got {text!r}")


def _check_choice(name, value, choices):
    if value not in choices:
        raise SpecError(f"{name} must be one of {', '.join(choices)}; got {value!r}")
    return value


def _check_init(text: str) -> str:
    if text in ("zeros", "delta") or _RANDOM_RE.match(text) or _FILE_RE.match(text):
        return text
    if text.startswith("random"):
        raise SpecError("init=random needs a non-negative integer seed, e.g. random(42)")
    raise SpecError(f"init must be zeros, delta, random(SEED) or file(PATH); got {text!r}")


def _as_int(name, value, minimum=0) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SpecError(f"{name} must be an integer")
    if value < minimum:
        raise SpecError(f"{name} must be at least {minimum}")
    return value


def parse_spec(doc: dict, base_dir=".") -> ProblemSpec:
    """Validate a decoded TOML document and build a :class:`ProblemSpec`."""
    base = Path(base_dir)
    unknown = set(doc) - _KEYS
    if unknown:
        raise SpecError(f"unknown keys: {sorted(unknown)}")
    missing = _REQUIRED - set(doc)
    if missing:
        raise SpecError(f"missing keys: {sorted(missing)}")

    shape = doc["shape"]
    if isinstance(shape, int):
        shape = [shape]
    if not isinstance(shape, list) or not shape:
        raise SpecError("shape must be a non-empty list of positive integers")
    shape = tuple(_as_int("shape entry", n, 1) for n in shape)

    kernel, label = _parse_kernel(doc["kernel"])
    if kernel.ndim != len(shape):
        raise SpecError(f"kernel is {kernel.ndim}-D but shape is {len(shape)}-D")
    gshape = GridShape(shape, kernel.fields)
    for axis, (reach, n) in enumerate(zip(kernel.axis_reach(), shape)):
        if reach >= n:
            raise SpecError(f"kernel reach {reach} along axis {axis} does not fit {n} cells")

    boundary = _parse_boundary(str(doc.get("boundary", "periodic")), gshape, base)
    if boundary is not None:
        if kernel.radius < 1:
            raise SpecError("Dirichlet boundaries need a kernel radius of at least 1")
        if 2 * kernel.radius >= min(shape):
            raise SpecError(f"shape {shape} is too small for radius {kernel.radius} with Dirichlet boundaries")

    T = _as_int("T", doc["T"])
    if T >= 2**64:
        raise SpecError("T must fit an unsigned 64-bit integer")
    spec = ProblemSpec(
        shape=shape,
        kernel=kernel,
        boundary=boundary,
        T=T,
        solver=_check_choice("solver", doc.get("solver", "fft"), SOLVERS),
        cutoff=_as_int("cutoff", doc.get("cutoff", 32), 1),
        init=_check_init(str(doc.get("init", "zeros")).strip()),
        output=_check_choice("output", doc.get("output", "csv"), OUTPUTS),
        mode=_check_choice("mode", doc.get("mode", "solve"), MODES),
        base_dir=base,
        kernel_label=label,
    )
    return spec


def load_spec(path) -> ProblemSpec:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror or exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise SpecError(f"{path}: {exc}") from None
    return parse_spec(doc, path.parent)


def initial_grid(spec: ProblemSpec) -> FieldGrid:
    """Materialize ``spec.init``.

    ``random(SEED)`` draws uniform ``[-1, 1)`` values from numpy's PCG64
    generator seeded with ``SEED``, filling the ``dims + (fields,)`` array in
    row-major order.  ``delta`` puts 1 in every field of cell ``dims // 2``.
    """
    shape = spec.grid_shape
    init = spec.init
    if init == "zeros":
        return FieldGrid.zeros(shape)
    if init == "delta":
        data = np.zeros(shape.array_shape)
        data[tuple(n // 2 for n in shape.dims)] = 1.0
        return FieldGrid(shape, data)
    m = _RANDOM_RE.match(init)
    if m:
        rng = np.random.Generator(np.random.PCG64(int(m.group(1))))
        return FieldGrid(shape, rng.uniform(-1.0, 1.0, size=shape.array_shape))
    m = _FILE_RE.match(init)
    path = _resolve(spec.base_dir, m.group(1))
    try:
        grid = read_grid(path)
    except (OSError, ValueError) as exc:
        raise SpecError(f"init file: {exc}") from None
    if grid.shape != shape:
        raise SpecError(f"init file {os.fspath(path)} has shape {grid.shape.array_shape}, expected {shape.array_shape}")
    return grid
