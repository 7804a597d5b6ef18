"""Versioned binary container for trained models.

Layout: 4-byte magic ``HTAX``, little-endian uint16 format version,
uint64 header length, a UTF-8 JSON header, then the raw float64 bytes of
every array in header order.  The header carries the taxonomy (leaf codes
and segment lengths), the TF-IDF vocabulary, the training config
snapshot, and the model inventory; class lists are reconstructed from the
tree's canonical ordering rather than stored.

A JSON metadata sidecar (``<path>.meta.json``) summarizes the container
for humans and tooling.  Writes are atomic (temp file + rename).
"""

from __future__ import annotations

import dataclasses
import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .errors import ModelFormatError
from .estimators import HierarchicalEstimator
from .features import TfidfModel
from .hierarchy import ClassCode, HierarchyTree, build_hierarchy
from .linear import SoftmaxModel, TrainConfig

MAGIC = b"HTAX"
FORMAT_VERSION = 1


def _atomic_write(path: Path, payload: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    _atomic_write(Path(path), text.encode("utf-8"))


def _pack(header: dict, arrays: list[np.ndarray]) -> bytes:
    header_bytes = json.dumps(header, ensure_ascii=False, sort_keys=True).encode("utf-8")
    parts = [MAGIC, struct.pack("<HQ", FORMAT_VERSION, len(header_bytes)), header_bytes]
    parts.extend(np.ascontiguousarray(a, dtype="<f8").tobytes() for a in arrays)
    return b"".join(parts)


def _unpack(blob: bytes) -> tuple[dict, memoryview]:
    if blob[:4] != MAGIC:
        raise ModelFormatError("not a HTAX container (bad magic)")
    version, header_len = struct.unpack_from("<HQ", blob, 4)
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported container version {version}")
    start = 4 + struct.calcsize("<HQ")
    header = json.loads(blob[start : start + header_len].decode("utf-8"))
    return header, memoryview(blob)[start + header_len :]


def _read_arrays(header: dict, body: memoryview) -> dict[str, np.ndarray]:
    sizes = [int(np.prod(entry["shape"])) if entry["shape"] else 1
             for entry in header["arrays"]]
    if sum(sizes) * 8 != len(body):
        raise ModelFormatError("container body length does not match manifest")
    arrays = {}
    offset = 0
    for entry, count in zip(header["arrays"], sizes):
        nbytes = count * 8
        arr = np.frombuffer(body[offset : offset + nbytes], dtype="<f8")
        arrays[entry["name"]] = arr.reshape(tuple(entry["shape"])).copy()
        offset += nbytes
    return arrays


def _tree_header(tree: HierarchyTree) -> dict:
    labels = {
        code.render(): tree.label(code)
        for code in tree.leaves
        if tree.label(code) is not None
    }
    return {
        "segment_lengths": list(tree.segment_lengths),
        "leaf_codes": [c.render() for c in tree.leaves],
        "labels": labels,
    }


def _tfidf_header(tfidf: TfidfModel) -> dict:
    return {
        "vocabulary": tfidf.vocabulary,
        "min_df": tfidf.min_df,
        "document_count": tfidf.document_count,
        "ngram": tfidf.ngram,
    }


def save_estimator(est: HierarchicalEstimator, path) -> None:
    """Write the estimator bundle and its JSON metadata sidecar."""
    path = Path(path)
    arrays: list[np.ndarray] = [est.tfidf.idf]
    manifest = [{"name": "idf", "shape": list(est.tfidf.idf.shape)}]
    models: list[dict] = []

    def add_model(name: str, model: SoftmaxModel) -> None:
        arrays.extend([model.weights, model.bias])
        manifest.append({"name": f"{name}.weights", "shape": list(model.weights.shape)})
        manifest.append({"name": f"{name}.bias", "shape": list(model.bias.shape)})
        models.append({"node": name, "config": dataclasses.asdict(model.config)})

    if est.mode == "bottom_up":
        add_model("", est.leaf_model)
    else:
        for node in est.tree.internal_nodes():
            add_model(node.render(), est.node_models[node])

    header = {
        "kind": "estimator",
        "mode": est.mode,
        "tree": _tree_header(est.tree),
        "tfidf": _tfidf_header(est.tfidf),
        "vocabulary_hash": est.tfidf.vocabulary_hash(),
        "models": models,
        "arrays": manifest,
    }
    _atomic_write(path, _pack(header, arrays))

    sidecar = {
        "format": "HTAX",
        "version": FORMAT_VERSION,
        "kind": "estimator",
        "mode": est.mode,
        "levels": est.tree.level_count,
        "leaf_count": len(est.tree.leaves),
        "vocabulary_size": est.tfidf.width,
        "vocabulary_hash": header["vocabulary_hash"],
        "ngram": est.tfidf.ngram,
        "model_count": len(models),
        "config": models[0]["config"],
    }
    atomic_write_text(
        Path(str(path) + ".meta.json"), json.dumps(sidecar, indent=2, sort_keys=True)
    )


def save_softmax(model: SoftmaxModel, tfidf: TfidfModel, path) -> None:
    """Persist a single softmax model against its feature space.

    Same container as the estimator bundle, with kind "softmax"; the
    class codes are stored explicitly since there is no tree to
    reconstruct them from.
    """
    path = Path(path)
    header = {
        "kind": "softmax",
        "classes": [c.render() for c in model.class_list],
        "class_segments": [list(c.segments) for c in model.class_list],
        "tfidf": _tfidf_header(tfidf),
        "vocabulary_hash": tfidf.vocabulary_hash(),
        "config": dataclasses.asdict(model.config),
        "arrays": [
            {"name": "idf", "shape": list(tfidf.idf.shape)},
            {"name": "weights", "shape": list(model.weights.shape)},
            {"name": "bias", "shape": list(model.bias.shape)},
        ],
    }
    _atomic_write(path, _pack(header, [tfidf.idf, model.weights, model.bias]))
    sidecar = {
        "format": "HTAX",
        "version": FORMAT_VERSION,
        "kind": "softmax",
        "classes": len(model.class_list),
        "vocabulary_size": tfidf.width,
        "vocabulary_hash": header["vocabulary_hash"],
        "config": header["config"],
    }
    atomic_write_text(
        Path(str(path) + ".meta.json"), json.dumps(sidecar, indent=2, sort_keys=True)
    )


def load_softmax(path) -> tuple[SoftmaxModel, TfidfModel]:
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise ModelFormatError(f"cannot read model {path}: {exc}") from exc
    header, body = _unpack(blob)
    if header.get("kind") != "softmax":
        raise ModelFormatError(f"container holds {header.get('kind')!r}, not a softmax")
    arrays = _read_arrays(header, body)
    t = header["tfidf"]
    tfidf = TfidfModel(
        vocabulary={k: int(v) for k, v in t["vocabulary"].items()},
        idf=arrays["idf"],
        min_df=int(t["min_df"]),
        document_count=int(t["document_count"]),
        ngram=t["ngram"],
    )
    class_list = tuple(
        ClassCode(tuple(segments)) for segments in header["class_segments"]
    )
    model = SoftmaxModel(
        class_list=class_list,
        weights=arrays["weights"],
        bias=arrays["bias"],
        config=TrainConfig(**header["config"]),
    )
    return model, tfidf


def load_estimator(path) -> HierarchicalEstimator:
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise ModelFormatError(f"cannot read model {path}: {exc}") from exc
    header, body = _unpack(blob)
    if header.get("kind") != "estimator":
        raise ModelFormatError(f"container holds {header.get('kind')!r}, not an estimator")
    arrays = _read_arrays(header, body)

    tree = build_hierarchy(
        header["tree"]["leaf_codes"],
        header["tree"]["segment_lengths"],
        header["tree"]["labels"] or None,
    )
    t = header["tfidf"]
    tfidf = TfidfModel(
        vocabulary={k: int(v) for k, v in t["vocabulary"].items()},
        idf=arrays["idf"],
        min_df=int(t["min_df"]),
        document_count=int(t["document_count"]),
        ngram=t["ngram"],
    )

    def make_model(entry: dict, class_list) -> SoftmaxModel:
        name = entry["node"]
        return SoftmaxModel(
            class_list=class_list,
            weights=arrays[f"{name}.weights"],
            bias=arrays[f"{name}.bias"],
            config=TrainConfig(**entry["config"]),
        )

    if header["mode"] == "bottom_up":
        leaf_model = make_model(header["models"][0], tree.leaves)
        return HierarchicalEstimator(
            mode="bottom_up", tree=tree, tfidf=tfidf, leaf_model=leaf_model
        )
    node_models = {}
    for entry in header["models"]:
        node = tree.root if entry["node"] == "" else tree.parse(entry["node"])
        node_models[node] = make_model(entry, tree.children(node))
    return HierarchicalEstimator(
        mode="top_down", tree=tree, tfidf=tfidf, node_models=node_models
    )
