"""Opt-in on-disk cache of canonical forms.

Entries are keyed by a SHA-256 digest of the digraph rows.  A stored entry is
used only after two checks: the stored rows equal the digraph being looked
up (guards against digest collisions), and relabelling the digraph by the
stored labelling reproduces the stored canonical adjacency (rejects damaged
or mismatched entries).  Anything else is recomputed and overwritten.
"""

from __future__ import annotations

import hashlib
import json
import os

from .digraph import Digraph, write_atomic
from .iso import CanonicalForm, canonical_form, decode_canonical

ENV_VAR = "QDCI_CACHE_DIR"


def _digest(G: Digraph) -> str:
    h = hashlib.sha256()
    h.update(G.n.to_bytes(4, "big"))
    width = (G.n + 7) // 8
    for row in G.rows:
        h.update(row.to_bytes(width, "little"))
    return h.hexdigest()


class CanonCache:
    def __init__(self, directory: str | os.PathLike):
        self.directory = os.fspath(directory)
        os.makedirs(self.directory, exist_ok=True)
        self.hits = 0
        self.misses = 0
        self.rejected = 0

    def _path(self, key: str) -> str:
        return os.path.join(self.directory, key[:2], key + ".json")

    def _load(self, G: Digraph, path: str) -> CanonicalForm | None:
        try:
            with open(path, encoding="utf-8") as fh:
                entry = json.load(fh)
            rows = tuple(int(r, 16) for r in entry["rows"])
            data = bytes.fromhex(entry["canonical"])
            labeling = tuple(entry["labeling"])
        except (OSError, ValueError, KeyError, TypeError):
            return None
        if entry.get("n") != G.n or rows != G.rows:
            return None
        if sorted(labeling) != list(range(G.n)):
            return None
        try:
            if G.relabel(labeling) != decode_canonical(data):
                return None
        except ValueError:
            return None
        return CanonicalForm(data, labeling)

    def canonical_form(self, G: Digraph, cap: int) -> CanonicalForm:
        key = _digest(G)
        path = self._path(key)
        if os.path.exists(path):
            found = self._load(G, path)
            if found is not None:
                self.hits += 1
                return found
            self.rejected += 1
        self.misses += 1
        form = canonical_form(G, cap)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        entry = {
            "n": G.n,
            "rows": [format(r, "x") for r in G.rows],
            "canonical": form.hex(),
            "labeling": list(form.canonical_labeling),
        }
        write_atomic(path, json.dumps(entry))
        return form


_OPEN: dict[str, CanonCache] = {}


def open_cache(directory: str) -> CanonCache:
    cache = _OPEN.get(directory)
    if cache is None:
        cache = _OPEN[directory] = CanonCache(directory)
    return cache


def resolve_cache_dir(flag: str | None) -> str | None:
    """The ``--cache-dir`` flag wins over the environment variable."""
    return flag or os.environ.get(ENV_VAR) or None
