"""On-disk formats: corpus JSONL + manifest, checkpoints, reports and CSV tables."""

from __future__ import annotations

import csv
import json
import re
from pathlib import Path

import numpy as np

from .languages import ASCII_ALIASES, Corpus, LanguageSpec
from .nets import BLOCK_ORDER, NetParams

UNICODE = "unicode"
ASCII = "ascii"

_FROM_ASCII = {v: k for k, v in ASCII_ALIASES.items()}
_ASCII_TOKEN = re.compile(r"lc|rc|lf|rf|.", re.S)


def to_ascii(s: str) -> str:
    return "".join(ASCII_ALIASES.get(c, c) for c in s)


def from_ascii(s: str) -> str:
    return "".join(_FROM_ASCII.get(tok, tok) for tok in _ASCII_TOKEN.findall(s))


def _dump(obj, path: Path):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")


def corpus_paths(directory, split: str) -> tuple[Path, Path]:
    d = Path(directory)
    return d / f"{split}.jsonl", d / f"{split}.manifest.json"


def write_corpus(corpus: Corpus, directory, symbol_encoding: str = UNICODE) -> tuple[Path, Path]:
    """Write ``<split>.jsonl`` (one ``{"s": ...}`` per line) and ``<split>.manifest.json``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    data_path, manifest_path = corpus_paths(directory, corpus.split)
    encode = to_ascii if symbol_encoding == ASCII else (lambda s: s)
    with data_path.open("w", encoding="utf-8") as f:
        for s in corpus.strings:
            f.write(json.dumps({"s": encode(s)}, ensure_ascii=False) + "\n")
    manifest = dict(corpus.manifest)
    manifest.update({
        "language": corpus.spec.to_dict(),
        "split": corpus.split,
        "count": len(corpus.strings),
        "symbol_encoding": symbol_encoding,
    })
    _dump(manifest, manifest_path)
    return data_path, manifest_path


def read_corpus(directory, split: str) -> Corpus:
    data_path, manifest_path = corpus_paths(directory, split)
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    spec = LanguageSpec.from_dict(manifest["language"])
    decode = from_ascii if manifest.get("symbol_encoding") == ASCII else (lambda s: s)
    with data_path.open(encoding="utf-8") as f:
        strings = tuple(decode(json.loads(line)["s"]) for line in f if line.strip())
    return Corpus(spec, split, strings, manifest)


def read_splits(directory, splits=None) -> dict[str, Corpus]:
    directory = Path(directory)
    if splits is None:
        splits = sorted(p.name[:-len(".manifest.json")] for p in directory.glob("*.manifest.json"))
    if not splits:
        raise FileNotFoundError(f"no corpus manifests in {directory}")
    return {name: read_corpus(directory, name) for name in splits}


# --- checkpoints ------------------------------------------------------------------

def checkpoint_dict(params: NetParams, **meta) -> dict:
    blocks = params.blocks()
    order = [name for name in BLOCK_ORDER if name in blocks]
    return {
        "architecture": params.architecture,
        "D": params.D,
        "H": params.H,
        "readout_bias": params.readout_bias,
        "block_order": order,
        "blocks": {name: blocks[name].ravel().tolist() for name in order},
        "shapes": {name: list(blocks[name].shape) for name in order},
        **meta,
    }


def save_checkpoint(params: NetParams, path, **meta) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    _dump(checkpoint_dict(params, **meta), path)
    return path


def load_checkpoint(path) -> tuple[NetParams, dict]:
    d = json.loads(Path(path).read_text(encoding="utf-8"))
    theta = np.concatenate([np.asarray(d["blocks"][name], dtype=np.float64) for name in d["block_order"]])
    params = NetParams(d["architecture"], int(d["D"]), int(d["H"]), theta, bool(d.get("readout_bias", False)))
    meta = {k: v for k, v in d.items() if k not in ("blocks", "shapes", "block_order")}
    return params, meta


# --- reports and tables --------------------------------------------------------------

def write_json(obj, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    _dump(obj, path)
    return path


TABLE_HEADER = ["task", "model", "split", "min", "max", "median"]


def write_table(rows: list[dict], path) -> Path:
    """One CSV row per (task, model, split) with min, max and median accuracy."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        w = csv.DictWriter(f, fieldnames=TABLE_HEADER, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: row[k] for k in TABLE_HEADER})
    return path


def table_rows(task: str, model: str, stats: dict[str, dict[str, float]]) -> list[dict]:
    return [{"task": task, "model": model, "split": split, **{k: f"{v[k]:.2f}" for k in ("min", "max", "median")}}
            for split, v in stats.items()]


def write_histogram(hist: dict[int, int], path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["bin", "count"])
        for b in range(min(hist), max(hist) + 1) if hist else ():
            w.writerow([b, hist.get(b, 0)])
    return path
