"""Thin wrapper around the ``dsig`` command line tool.

Everything numeric happens on the other side of a process boundary: inputs
are written as the tool's tab-separated event-stream format, outputs are read
back from its TSV (both at 17 significant digits, so values round-trip
exactly). The engine is never imported here.
"""

from __future__ import annotations

import os
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np


class ClientError(RuntimeError):
    """The dsig tool rejected the request or could not be run."""

    def __init__(self, message: str, exit_code: Optional[int] = None):
        super().__init__(message)
        self.exit_code = exit_code


def _cli_command() -> list[str]:
    override = os.environ.get("DSIG_CLI")
    if override:
        return override.split()
    executable = shutil.which("dsig")
    if executable:
        return [executable]
    return [sys.executable, "-m", "dsig.cli"]


def _run(args: Sequence[str]) -> str:
    command = _cli_command() + list(args)
    try:
        completed = subprocess.run(command, capture_output=True, text=True)
    except OSError as exc:
        raise ClientError(f"cannot run {command[0]!r}: {exc}") from None
    if completed.returncode != 0:
        detail = completed.stderr.strip() or completed.stdout.strip()
        raise ClientError(
            f"dsig exited with code {completed.returncode}: {detail}", completed.returncode
        )
    return completed.stdout


def _selector_args(restrict, pattern, half) -> list[str]:
    args: list[str] = []
    if restrict is not None:
        labels = [str(r) for r in restrict]
        if not labels:
            raise ValueError("restrict must name at least one component")
        args += ["--restrict", ",".join(labels)]
    if pattern is not None:
        letters = [str(p) for p in pattern]
        if not letters:
            raise ValueError("pattern must contain at least one letter")
        args += ["--pattern", ",".join(letters)]
    if half is not None and half != "auto":
        args.append("--half" if half else "--full")
    return args


def words(
    d: int,
    max_len: int,
    restrict: Optional[Sequence[Union[int, str]]] = None,
    pattern: Optional[Sequence[str]] = None,
    half: bool = True,
) -> list[str]:
    """Word universe texts in canonical order (the empty word excluded)."""
    if d < 1:
        raise ValueError("alphabet size must be >= 1")
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    out = _run(["words", "-d", str(d), "-k", str(max_len)] + _selector_args(restrict, pattern, half))
    lines = out.splitlines()
    count = int(lines[0])
    result = lines[1:]
    if len(result) != count:
        raise ClientError(f"word list length {len(result)} disagrees with count {count}")
    return result


def _events_text(times: np.ndarray, values: np.ndarray) -> str:
    lines = []
    for t, row in zip(times, values):
        for component, value in enumerate(row, start=1):
            lines.append(f"{t:.17g}\t{component}\t{value:.17g}")
    return "\n".join(lines) + "\n"


def signature(
    times: Sequence[float],
    values: Sequence[Sequence[float]],
    max_len: int,
    mu: float = 0.0,
    restrict: Optional[Sequence[Union[int, str]]] = None,
    pattern: Optional[Sequence[str]] = None,
    half: Union[str, bool, None] = "auto",
) -> dict[str, float]:
    """Signature of the path over its full span, as word text -> value.

    ``times`` must be strictly increasing and ``values`` one row per time.
    ``half`` defaults to "auto": half universe exactly when mu is zero.
    """
    time_array = np.asarray(times, dtype=float)
    value_matrix = np.asarray(values, dtype=float)
    if time_array.ndim != 1:
        raise ValueError(f"times must be 1-D, got shape {time_array.shape}")
    if value_matrix.ndim != 2 or value_matrix.shape[0] != time_array.shape[0]:
        raise ValueError(
            f"values must be 2-D with one row per time, got {value_matrix.shape} "
            f"for {time_array.shape[0]} times"
        )
    if np.any(np.diff(time_array) <= 0):
        raise ValueError("times must be strictly increasing")
    if not (np.all(np.isfinite(time_array)) and np.all(np.isfinite(value_matrix))):
        raise ValueError("times and values must be finite")
    if mu < 0:
        raise ValueError("mu must be >= 0")
    if max_len < 0:
        raise ValueError("max_len must be >= 0")

    with tempfile.TemporaryDirectory() as scratch:
        events = Path(scratch) / "path.dat"
        out = Path(scratch) / "signature.tsv"
        events.write_text(_events_text(time_array, value_matrix))
        _run(
            ["compute", "--input", str(events), "--mu", f"{mu:.17g}", "-k", str(max_len),
             "--out", str(out)]
            + _selector_args(restrict, pattern, half)
        )
        header, row = out.read_text().splitlines()
    return {word: float(cell) for word, cell in zip(header.split("\t"), row.split("\t"))}
