"""Flat ``key = value`` run configuration.

Lines may hold several ``key=value`` pairs separated by whitespace; ``#``
starts a comment. Unknown keys are rejected so typos fail fast.
"""
import math
import re
from dataclasses import dataclass, field

from .basis import BasisSpec, Box, CellUnion, Interval, build_basis
from .errors import EmptyBasis, ParseError, ValidationError

MODES = ("spectrum", "count", "bound-table", "verify", "oracle")

_PAIR = re.compile(r"([A-Za-z_][\w\-]*)\s*=\s*(.*?)(?=\s+[A-Za-z_][\w\-]*\s*=|\s*$)")
_KEY_START = re.compile(r"\s*[A-Za-z_][\w\-]*\s*=")

KEYS = {
    "mode", "dim", "domain", "a", "b", "lo", "hi", "h", "union", "m", "degree", "cells",
    "refine", "boundary", "lambda_min", "lambda_max", "lambda_ratio", "lambdas",
    "friedrichs", "how_many", "n_max", "m_max", "seed", "out", "json", "dump_matrices",
    "eigensolver",
}


@dataclass
class RunConfig:
    mode: str = "spectrum"
    domain: object = None
    m: int = 1
    degree: int | None = None
    cells: int = 32
    refine: int = 4
    boundary: str | None = None
    lambda_min: float | None = None
    lambda_max: float | None = None
    lambda_ratio: float = 1.2
    lambdas: list | None = None
    friedrichs: bool = True
    how_many: int = 10
    n_max: int = 3
    m_max: int = 3
    seed: int = 42
    out: str | None = None
    json: bool = False
    dump_matrices: str | None = None
    eigensolver: str = "jacobi"
    raw: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.domain.dim

    def basis_spec(self):
        return BasisSpec(m=self.m, degree=self.degree, cells=self.cells, refine=self.refine,
                         boundary=self.boundary)

    def echo(self):
        """Plain-data view for reports."""
        dom = self.domain
        if isinstance(dom, Interval):
            d = {"kind": "interval", "a": dom.a, "b": dom.b}
        elif isinstance(dom, Box):
            d = {"kind": "box", "lo": list(dom.lo), "hi": list(dom.hi)}
        else:
            d = {"kind": "cells", "h": dom.h, "cells": [list(c) for c in sorted(dom.cells)]}
        d["volume"] = dom.volume()
        return {
            "mode": self.mode, "domain": d, "m": self.m, "degree": self.degree, "cells": self.cells,
            "refine": self.refine, "boundary": self.boundary, "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max, "lambda_ratio": self.lambda_ratio, "lambdas": self.lambdas,
            "friedrichs": self.friedrichs, "how_many": self.how_many, "n_max": self.n_max,
            "m_max": self.m_max, "seed": self.seed, "eigensolver": self.eigensolver,
        }


def _split_pairs(text):
    pairs = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if not _KEY_START.match(body):
            raise ParseError(lineno, f"expected 'key = value', got {body!r}")
        for key, value in _PAIR.findall(body):
            key = key.lower().replace("-", "_")
            if key not in KEYS:
                raise ParseError(lineno, f"unknown key {key!r}")
            if key in pairs:
                raise ParseError(lineno, f"duplicate key {key!r}")
            pairs[key] = (value.strip(), lineno)
    return pairs


def _numbers(text, conv, lineno, key):
    parts = [p for p in re.split(r"[,\s]+", text) if p]
    try:
        return [conv(p) for p in parts]
    except ValueError:
        raise ParseError(lineno, f"{key}: cannot parse {text!r}") from None


def _scalar(pairs, key, conv, default=None):
    if key not in pairs:
        return default
    text, lineno = pairs[key]
    if conv is bool:
        low = text.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ParseError(lineno, f"{key}: expected a boolean, got {text!r}")
    try:
        value = conv(text)
    except ValueError:
        raise ParseError(lineno, f"{key}: cannot parse {text!r} as {conv.__name__}") from None
    if conv is float and not math.isfinite(value):
        raise ParseError(lineno, f"{key}: value must be finite")
    return value


def _domain(pairs, dim):
    kind = _scalar(pairs, "domain", str)
    if kind is None:
        kind = "cells" if "union" in pairs else ("interval" if dim in (None, 1) else "box")
    kind = kind.lower()
    if kind == "interval":
        if dim not in (None, 1):
            raise ValidationError("an interval domain needs dim = 1")
        return Interval(_scalar(pairs, "a", float, 0.0), _scalar(pairs, "b", float, 1.0))
    if kind == "box":
        n = dim or 2
        lo = _numbers(pairs["lo"][0], float, pairs["lo"][1], "lo") if "lo" in pairs else [0.0] * n
        hi = _numbers(pairs["hi"][0], float, pairs["hi"][1], "hi") if "hi" in pairs else [1.0] * n
        if len(lo) != n or len(hi) != n:
            raise ValidationError(f"box corners must have {n} components")
        return Box(tuple(lo), tuple(hi))
    if kind == "cells":
        if "union" not in pairs or "h" not in pairs:
            raise ValidationError("a cell-union domain needs 'h' and 'union'")
        text, lineno = pairs["union"]
        cells = []
        for tok in text.split():
            cells.append(tuple(_numbers(tok, int, lineno, "union")))
        dom = CellUnion(_scalar(pairs, "h", float), cells)
        if dim is not None and dom.dim != dim:
            raise ValidationError(f"union cells have dimension {dom.dim}, expected dim = {dim}")
        return dom
    raise ValidationError(f"unknown domain kind {kind!r}")


def parse_config(text, mode=None):
    """Parse and validate a configuration document.

    ``mode`` (e.g. from the command line) overrides the ``mode`` key. All
    module preconditions are checked here, before any computation.
    """
    pairs = _split_pairs(text)
    cfg = RunConfig(raw={k: v for k, (v, _) in pairs.items()})
    cfg.mode = mode or _scalar(pairs, "mode", str, "spectrum")
    if cfg.mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {cfg.mode!r}")
    dim = _scalar(pairs, "dim", int)
    if dim is not None and dim < 1:
        raise ValidationError("dim must be >= 1")
    cfg.domain = _domain(pairs, dim)
    cfg.m = _scalar(pairs, "m", int, 1)
    cfg.degree = _scalar(pairs, "degree", int)
    cfg.cells = _scalar(pairs, "cells", int, 32)
    cfg.refine = _scalar(pairs, "refine", int, 4)
    cfg.boundary = _scalar(pairs, "boundary", str)
    cfg.lambda_min = _scalar(pairs, "lambda_min", float)
    cfg.lambda_max = _scalar(pairs, "lambda_max", float)
    cfg.lambda_ratio = _scalar(pairs, "lambda_ratio", float, 1.2)
    if "lambdas" in pairs:
        text, lineno = pairs["lambdas"]
        cfg.lambdas = _numbers(text, float, lineno, "lambdas")
    cfg.friedrichs = _scalar(pairs, "friedrichs", bool, True)
    cfg.how_many = _scalar(pairs, "how_many", int, 10)
    cfg.n_max = _scalar(pairs, "n_max", int, 3)
    cfg.m_max = _scalar(pairs, "m_max", int, 3)
    cfg.seed = _scalar(pairs, "seed", int, 42)
    cfg.out = _scalar(pairs, "out", str)
    cfg.json = _scalar(pairs, "json", bool, False)
    cfg.dump_matrices = _scalar(pairs, "dump_matrices", str)
    cfg.eigensolver = _scalar(pairs, "eigensolver", str, "jacobi").lower()
    validate(cfg)
    return cfg


def validate(cfg):
    spec = cfg.basis_spec()  # raises on degree < 2m and friends
    cfg.degree = spec.degree
    if cfg.lambda_ratio <= 1.0:
        raise ValidationError("lambda_ratio must exceed 1")
    if (cfg.lambda_min is None) != (cfg.lambda_max is None):
        raise ValidationError("give both lambda_min and lambda_max, or neither")
    if cfg.lambda_min is not None:
        if not 0 < cfg.lambda_min < cfg.lambda_max:
            raise ValidationError("need 0 < lambda_min < lambda_max")
        if cfg.lambdas is not None:
            raise ValidationError("give either an explicit lambdas list or a lambda range")
    if cfg.lambdas is not None:
        lams = cfg.lambdas
        if not lams or any(v <= 0 for v in lams) or any(b <= a for a, b in zip(lams, lams[1:])):
            raise ValidationError("lambdas must be positive and strictly ascending")
    if cfg.mode == "oracle":
        if not isinstance(cfg.domain, Interval):
            raise ValidationError("oracle mode needs a one-dimensional interval")
        if cfg.m not in (1, 2):
            raise ValidationError("oracle mode supports m = 1 or m = 2")
    if cfg.eigensolver not in ("jacobi", "lapack"):
        raise ValidationError("eigensolver must be 'jacobi' or 'lapack'")
    if cfg.how_many < 1:
        raise ValidationError("how_many must be >= 1")
    if cfg.n_max < 1 or cfg.m_max < 1:
        raise ValidationError("n_max and m_max must be >= 1")
    if cfg.mode in ("spectrum", "count", "verify"):
        try:
            build_basis(cfg.domain, spec)
        except EmptyBasis as exc:
            raise ValidationError(str(exc)) from None
    return cfg
