"""Triple ingestion and persistent indexes.

A store maps node and label strings to dense 0-based ids (first-seen
order) and keeps one Boolean adjacency matrix per label, all sharing a
power-of-two side.  The on-disk format is a small tagged binary file;
see save_index.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

from sparseq import csrmatrix as _csr_algebra
from sparseq import k2algebra as _k2_algebra
from sparseq.csrmatrix import CsrcMatrix
from sparseq.k2matrix import K2Matrix, next_pow2

MAGIC = b"SPQ1"
VERSION = 1

#: backend name -> (matrix class, algebra module)
BACKENDS = {
    "k2": (K2Matrix, _k2_algebra),
    "csr": (CsrcMatrix, _csr_algebra),
}


class Dictionary:
    """String <-> dense id bimap with first-seen-order assignment."""

    def __init__(self):
        self._ids: dict[str, int] = {}
        self._names: list[str] = []

    def intern(self, name: str) -> int:
        got = self._ids.get(name)
        if got is None:
            got = len(self._names)
            self._ids[name] = got
            self._names.append(name)
        return got

    def lookup(self, name: str) -> int | None:
        return self._ids.get(name)

    def name(self, ident: int) -> str:
        return self._names[ident]

    def __len__(self) -> int:
        return len(self._names)

    def __iter__(self):
        return iter(self._names)


@dataclass
class GraphStore:
    backend: str
    nodes: Dictionary
    labels: Dictionary
    side: int
    n: int  # deduplicated triple count
    matrices: list = field(default_factory=list)

    def matrix(self, label_id: int):
        return self.matrices[label_id]


class TripleFormatError(ValueError):
    pass


class IndexFormatError(ValueError):
    pass


def _read_triples(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3 or not all(parts):
                raise TripleFormatError(
                    "%s:%d: expected 'subject<TAB>label<TAB>object'" % (path, lineno)
                )
            yield parts


def load_triples(path: str, backend: str = "k2") -> GraphStore:
    """Build a store from a TAB-separated triple file.

    One triple per line, '#' lines are comments, duplicates collapse."""
    if backend not in BACKENDS:
        raise ValueError("unknown backend %r" % backend)
    matrix_cls = BACKENDS[backend][0]
    nodes = Dictionary()
    labels = Dictionary()
    per_label: list[set] = []
    for subj, pred, obj in _read_triples(path):
        s = nodes.intern(subj)
        p = labels.intern(pred)
        o = nodes.intern(obj)
        if p == len(per_label):
            per_label.append(set())
        per_label[p].add((s, o))
    side = next_pow2(len(nodes))
    matrices = [matrix_cls.build(cells, side) for cells in per_label]
    n = sum(len(cells) for cells in per_label)
    return GraphStore(backend, nodes, labels, side, n, matrices)


# --- index serialization ----------------------------------------------


def _pack_str(s: str) -> bytes:
    raw = s.encode("utf-8")
    return struct.pack("<Q", len(raw)) + raw


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, count: int) -> bytes:
        if self.pos + count > len(self.data):
            raise IndexFormatError("truncated index file")
        out = self.data[self.pos : self.pos + count]
        self.pos += count
        return out

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]

    def string(self) -> str:
        return self.take(self.u64()).decode("utf-8")


def save_index(store: GraphStore, path: str) -> None:
    """Write ``MAGIC, version u16, backend, side, n, node strings,
    label strings, per-label matrix blobs`` (all little-endian)."""
    parts = [MAGIC, struct.pack("<H", VERSION), _pack_str(store.backend)]
    parts.append(struct.pack("<QQ", store.side, store.n))
    parts.append(struct.pack("<Q", len(store.nodes)))
    parts.extend(_pack_str(name) for name in store.nodes)
    parts.append(struct.pack("<Q", len(store.labels)))
    parts.extend(_pack_str(name) for name in store.labels)
    for mat in store.matrices:
        blob = mat.to_bytes()
        parts.append(struct.pack("<Q", len(blob)))
        parts.append(blob)
    with open(path, "wb") as fh:
        fh.write(b"".join(parts))


def load_index(path: str) -> GraphStore:
    with open(path, "rb") as fh:
        rd = _Reader(fh.read())
    if rd.take(4) != MAGIC:
        raise IndexFormatError("%s: bad magic" % path)
    version = struct.unpack("<H", rd.take(2))[0]
    if version != VERSION:
        raise IndexFormatError("%s: unsupported version %d" % (path, version))
    backend = rd.string()
    if backend not in BACKENDS:
        raise IndexFormatError("%s: unknown backend tag %r" % (path, backend))
    matrix_cls = BACKENDS[backend][0]
    side, n = rd.u64(), rd.u64()
    nodes = Dictionary()
    for _ in range(rd.u64()):
        nodes.intern(rd.string())
    labels = Dictionary()
    for _ in range(rd.u64()):
        labels.intern(rd.string())
    matrices = [matrix_cls.from_bytes(rd.take(rd.u64())) for _ in range(len(labels))]
    if rd.pos != len(rd.data):
        raise IndexFormatError("%s: trailing bytes" % path)
    return GraphStore(backend, nodes, labels, side, n, matrices)


def stats(store: GraphStore) -> dict:
    """Size and shape summary; bytes are the serialized index size."""
    total = (
        4
        + 2
        + 8
        + len(store.backend.encode("utf-8"))
        + 16
        + 8
        + sum(8 + len(s.encode("utf-8")) for s in store.nodes)
        + 8
        + sum(8 + len(s.encode("utf-8")) for s in store.labels)
        + sum(8 + len(m.to_bytes()) for m in store.matrices)
    )
    report = {
        "backend": store.backend,
        "nodes": len(store.nodes),
        "labels": len(store.labels),
        "triples": store.n,
        "side": store.side,
        "index_bytes": total,
        "bytes_per_triple": (total / store.n) if store.n else 0.0,
    }
    for i, mat in enumerate(store.matrices):
        report["ones[%s]" % store.labels.name(i)] = mat.ones
    return report
