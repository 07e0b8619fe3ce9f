"""JSON schemas for channels, codes and strategies, plus distribution CSV.

Matrices are row-major nested lists of [re, im] pairs.  Channel objects:

* quantum: {"kind": "quantum", "d_in": n, "d_out": m, "kraus": [mat, ...]}
* qc:      {"kind": "qc", "d": n, "povm": [mat, ...]}
* cq:      {"kind": "cq", "d_out": n, "letter_states": [mat, ...]}

Codes: {"kind": "id-code", "dims": [...], "entries": [{"state": mat,
"decoder": mat}, ...]}; classical codes: {"kind": "classical-id-code",
"M": ..., "N": ..., "functions": [[...], ...]} (0-based values).

Feedback strategies are trees keyed by history strings over the digit
alphabet 0-9a-z: {"kind": "feedback-strategy", "n": ..., "y_size": ...,
"nodes": {"": mat, "0": mat, ...}}.  Coherent strategies:
{"kind": "coherent-strategy", "ancilla_dim": ..., "sigma0": mat,
"maps": [channel, ...]}.

Distributions are CSV with header "string,probability", strings in the
same digit alphabet, rows in index order, LF line endings.
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from . import feedback as fb
from .channels import CqChannel, QcChannel, QuantumChannel
from .feedback import CoherentFeedbackStrategy, FeedbackStrategy
from .idcodes import ClassicalIdCode, IdCode
from .linalg import DensityOperator, HermitianOperator


def matrix_to_json(mat: np.ndarray) -> list:
    m = np.asarray(mat, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError("matrix JSON must be a nested list of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def channel_to_json(channel) -> dict:
    if isinstance(channel, QuantumChannel):
        return {
            "kind": "quantum",
            "d_in": channel.d_in,
            "d_out": channel.d_out,
            "kraus": [matrix_to_json(k) for k in channel.kraus],
        }
    if isinstance(channel, QcChannel):
        return {
            "kind": "qc",
            "d": channel.d,
            "povm": [matrix_to_json(m) for m in channel.povm],
        }
    if isinstance(channel, CqChannel):
        return {
            "kind": "cq",
            "d_out": channel.d_out,
            "letter_states": [matrix_to_json(s.mat) for s in channel.letter_states],
        }
    raise TypeError(f"not a serialisable channel: {type(channel)!r}")


def channel_from_json(data: dict):
    kind = data.get("kind")
    if kind == "quantum":
        kraus = np.stack([matrix_from_json(k) for k in data["kraus"]])
        if kraus.shape[1] != data["d_out"] or kraus.shape[2] != data["d_in"]:
            raise ValueError("kraus shapes contradict the declared dimensions")
        return QuantumChannel(kraus)
    if kind == "qc":
        povm = np.stack([matrix_from_json(m) for m in data["povm"]])
        if povm.shape[1] != data["d"]:
            raise ValueError("povm shapes contradict the declared dimension")
        return QcChannel(povm)
    if kind == "cq":
        states = tuple(
            DensityOperator(matrix_from_json(s)) for s in data["letter_states"]
        )
        if states and states[0].d != data["d_out"]:
            raise ValueError("letter states contradict the declared dimension")
        return CqChannel(states)
    raise ValueError(f"unknown channel kind {kind!r}")


def code_to_json(code: IdCode) -> dict:
    return {
        "kind": "id-code",
        "dims": list(code.dims),
        "entries": [
            {"state": matrix_to_json(s.mat), "decoder": matrix_to_json(d.mat)}
            for s, d in zip(code.states, code.decoders)
        ],
    }


def code_from_json(data: dict) -> IdCode:
    if data.get("kind") != "id-code":
        raise ValueError("not an id-code object")
    dims = tuple(int(x) for x in data["dims"])
    states = []
    decoders = []
    for entry in data["entries"]:
        states.append(DensityOperator(matrix_from_json(entry["state"]), dims))
        decoders.append(HermitianOperator(matrix_from_json(entry["decoder"]), dims))
    return IdCode(tuple(states), tuple(decoders))


def classical_code_to_json(code: ClassicalIdCode) -> dict:
    return {
        "kind": "classical-id-code",
        "M": code.m,
        "N": code.n_symbols,
        "functions": code.functions.tolist(),
    }


def classical_code_from_json(data: dict) -> ClassicalIdCode:
    if data.get("kind") != "classical-id-code":
        raise ValueError("not a classical-id-code object")
    return ClassicalIdCode(int(data["M"]), int(data["N"]), np.asarray(data["functions"]))


def strategy_to_json(strategy: FeedbackStrategy) -> dict:
    nodes = {}
    for t, level in enumerate(strategy.levels):
        for h in range(level.shape[0]):
            key = fb.index_to_string(h, t, strategy.y_size) if t else ""
            nodes[key] = matrix_to_json(level[h])
    return {
        "kind": "feedback-strategy",
        "n": strategy.n,
        "y_size": strategy.y_size,
        "nodes": nodes,
    }


def strategy_from_json(data: dict) -> FeedbackStrategy:
    if data.get("kind") != "feedback-strategy":
        raise ValueError("not a feedback-strategy object")
    n = int(data["n"])
    y = int(data["y_size"])
    nodes = data["nodes"]
    levels = []
    for t in range(n):
        mats = []
        for h in range(y**t):
            key = fb.index_to_string(h, t, y) if t else ""
            if key not in nodes:
                raise ValueError(f"strategy tree is missing history {key!r}")
            mats.append(matrix_from_json(nodes[key]))
        levels.append(np.stack(mats))
    return FeedbackStrategy(n, y, tuple(levels))


def coherent_strategy_to_json(strategy: CoherentFeedbackStrategy) -> dict:
    return {
        "kind": "coherent-strategy",
        "ancilla_dim": strategy.ancilla_dim,
        "sigma0": matrix_to_json(strategy.sigma0.mat),
        "maps": [channel_to_json(m) for m in strategy.maps],
    }


def coherent_strategy_from_json(data: dict) -> CoherentFeedbackStrategy:
    if data.get("kind") != "coherent-strategy":
        raise ValueError("not a coherent-strategy object")
    return CoherentFeedbackStrategy(
        ancilla_dim=int(data["ancilla_dim"]),
        sigma0=DensityOperator(matrix_from_json(data["sigma0"])),
        maps=tuple(channel_from_json(m) for m in data["maps"]),
    )


def dist_to_csv(probs: np.ndarray, n: int, y_size: int) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["string", "probability"])
    for idx, p in enumerate(np.asarray(probs, dtype=np.float64)):
        writer.writerow([fb.index_to_string(idx, n, y_size), repr(float(p))])
    return buf.getvalue()


def dist_from_csv(text: str, y_size: int) -> np.ndarray:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["string", "probability"]:
        raise ValueError("distribution CSV must start with 'string,probability'")
    body = rows[1:]
    probs = np.zeros(len(body))
    for s, p in body:
        probs[fb.string_to_index(s, y_size)] = float(p)
    return probs


def dump(obj, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
