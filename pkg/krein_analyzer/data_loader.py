"""
Data Loading Module

Reads extension job files. A job file is a JSON object:

    {"n": 1, "a": "0", "b": "1",
     "C": {"rows": 2, "cols": 2, "data": [["-1", "0"], ["0", "-1"]]},
     "D": {"rows": 2, "cols": 2, "data": [["1", "0"], ["0", "1"]]}}

Instead of C and D a job may name a canonical extension with
"extension": "krein" or "friedrichs".
"""

import json
import logging
from dataclasses import dataclass
from typing import Optional

from .errors import DimensionMismatch, InvalidInput
from .exact_linalg import RationalMatrix, format_rational
from .extension_classify import ExtensionParams, canonical_extensions
from .triplet_core import TripletSpec

log = logging.getLogger(__name__)

CANONICAL_NAMES = ("krein", "friedrichs")


@dataclass(frozen=True)
class JobInput:
    spec: TripletSpec
    params: ExtensionParams
    extension: Optional[str] = None

    def to_dict(self):
        record = {"n": self.spec.n, "a": format_rational(self.spec.a), "b": format_rational(self.spec.b)}
        if self.extension:
            record["extension"] = self.extension
        else:
            record.update(self.params.to_dict())
        return record


def parse_job(obj):
    """
    Build a JobInput from a decoded job object.

    Args:
        obj: dict decoded from JSON

    Returns:
        JobInput: TripletSpec plus exact (C, D); the pair is not yet validated

    Raises:
        InvalidInput: For missing fields, malformed rationals or a bad interval
        DimensionMismatch: If C or D is not 2n x 2n
    """
    if not isinstance(obj, dict):
        raise InvalidInput("Job file must contain a JSON object")
    for key in ("n", "a", "b"):
        if key not in obj:
            raise InvalidInput(f"Job file is missing the field '{key}'")

    spec = TripletSpec(obj["n"], obj["a"], obj["b"])
    extension = obj.get("extension")

    if extension is not None:
        if "C" in obj or "D" in obj:
            raise InvalidInput("Give either 'extension' or the matrices 'C' and 'D', not both")
        if extension not in CANONICAL_NAMES:
            raise InvalidInput(f"Unknown extension {extension!r}; expected one of {CANONICAL_NAMES}")
        params = getattr(canonical_extensions(spec), extension)
        return JobInput(spec, params, extension)

    if "C" not in obj or "D" not in obj:
        raise InvalidInput("Job file needs both 'C' and 'D' (or an 'extension' name)")
    c = RationalMatrix.from_json(obj["C"])
    d = RationalMatrix.from_json(obj["D"])
    size = spec.dimension
    for name, matrix in (("C", c), ("D", d)):
        if matrix.shape != (size, size):
            raise DimensionMismatch(f"{name} must be {size}x{size} for n={spec.n}, got {matrix.rows}x{matrix.cols}")
    return JobInput(spec, ExtensionParams(c, d))


def load_job(path):
    """
    Read and parse a job file.

    Raises:
        InvalidInput: If the file cannot be read or is not valid JSON
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            obj = json.load(handle)
    except OSError as exc:
        raise InvalidInput(f"Cannot read job file {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"Job file {path} is not valid JSON: {exc.msg} (line {exc.lineno})") from None
    job = parse_job(obj)
    log.debug("loaded job %s: n=%d on (%s, %s)", path, job.spec.n, job.spec.a, job.spec.b)
    return job
