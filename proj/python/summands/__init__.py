"""Direct-sum decompositions of graded and local modules.

    >>> import summands
    >>> r = summands.run("field GF(3); ring x,y,z; task frobenius R e=1 output=F; task decompose F;")
    >>> r.records[-1]["summary"]
    'O(0)^1 + O(-1)^7 + O(-2)^1'
"""

import json
from dataclasses import dataclass

from ._core import Error, TaskFileError, field_name
from ._core import _run

__all__ = ["Error", "TaskFileError", "Result", "run", "decompose", "field_name"]


@dataclass
class Result:
    exit_code: int
    output: str
    errors: str
    records: list


def run(text, seed=None, autoextend=None, emit_basis=False, implicit_mult=False):
    """Run a task file given as text. Parse errors raise TaskFileError."""
    d = _run(text, seed=seed, autoextend=autoextend, emit_basis=emit_basis, implicit_mult=implicit_mult)
    return Result(d["exit_code"], d["output"], d["errors"], json.loads(d["records"]))


def decompose(text, module, **kwargs):
    """Decompose `module` from the blocks in `text`; returns its JSON record."""
    r = run(f"{text}\ntask decompose {module};", **kwargs)
    if r.exit_code != 0:
        raise Error(r.errors.strip())
    return r.records[-1]
