"""Versioned text checkpoint: metadata lines plus named row-major tensors.

Layout (one record per line, UTF-8, '\n' endings):

    swarmcov-checkpoint 1
    meta <key> <value>
    ...
    tensor <name> <dim0,dim1,...>
    <hex float64 values, space separated, row major>
    ...
    end

Values are written with float.hex(), so round-trips are bit-exact and the
file is platform independent.
"""

from __future__ import annotations

import numpy as np

MAGIC = "swarmcov-checkpoint"
VERSION = 1


class CheckpointError(ValueError):
    """Malformed, truncated, or wrong-version checkpoint file."""


def save_checkpoint(
    path,
    meta: dict[str, str],
    tensors: list[tuple[str, np.ndarray]],
) -> None:
    lines = [f"{MAGIC} {VERSION}"]
    for key in meta:
        value = str(meta[key])
        if "\n" in key or "\n" in value or " " in key:
            raise CheckpointError(f"meta key/value not encodable: {key!r}")
        lines.append(f"meta {key} {value}")
    for name, arr in tensors:
        arr = np.asarray(arr, dtype=np.float64)
        shape = ",".join(str(d) for d in arr.shape)
        lines.append(f"tensor {name} {shape}")
        lines.append(" ".join(float.hex(float(v)) for v in arr.ravel(order="C")))
    lines.append("end")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_checkpoint(path) -> tuple[dict[str, str], list[tuple[str, np.ndarray]]]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise CheckpointError(f"{path}: empty file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != MAGIC:
        raise CheckpointError(f"{path}: not a {MAGIC} file")
    if head[1] != str(VERSION):
        raise CheckpointError(
            f"{path}: unsupported version {head[1]} (expected {VERSION})"
        )
    meta: dict[str, str] = {}
    tensors: list[tuple[str, np.ndarray]] = []
    i = 1
    ended = False
    while i < len(lines):
        line = lines[i]
        if line == "end":
            ended = True
            break
        kind, _, rest = line.partition(" ")
        if kind == "meta":
            key, _, value = rest.partition(" ")
            meta[key] = value
            i += 1
        elif kind == "tensor":
            name, _, shape_s = rest.rpartition(" ")
            try:
                shape = tuple(int(d) for d in shape_s.split(","))
            except ValueError as exc:
                raise CheckpointError(f"{path}: bad tensor shape {shape_s!r}") from exc
            if i + 1 >= len(lines):
                raise CheckpointError(f"{path}: truncated tensor {name!r}")
            words = lines[i + 1].split()
            expected = int(np.prod(shape)) if shape else 1
            if len(words) != expected:
                raise CheckpointError(
                    f"{path}: tensor {name!r} has {len(words)} values, "
                    f"expected {expected}"
                )
            try:
                values = np.array([float.fromhex(w) for w in words])
            except ValueError as exc:
                raise CheckpointError(f"{path}: bad value in tensor {name!r}") from exc
            tensors.append((name, values.reshape(shape)))
            i += 2
        else:
            raise CheckpointError(f"{path}: unexpected line {i + 1}: {line!r}")
    if not ended:
        raise CheckpointError(f"{path}: missing end marker (truncated file)")
    return meta, tensors
