"""On-disk store of canonical networks, their regions and provenance.

Layout of a database directory::

    index.tsv                 one row per network
    nets/<id>.ncnet           canonical (Q, W) pair
    regions/<id>.<bound>.ncrr region files keyed by bound label
    prov/<id>.txt             provenance lines

The id is a content hash of the canonical ``.ncnet`` text.  Writers hold
``.lock`` while they touch the directory.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass, field

from filelock import FileLock

from .errors import NetCodingError
from .io import parse_network, read_region, write_network, write_region
from .netmodel import EdgeRep
from .rateregion import RateRegion, region_coords
from .symmetry import canonicalize, stabilizer

__all__ = ["DbEntry", "Database", "entry_id"]

COLUMNS = ("id", "K", "L", "stab", "orbit", "rep", "bounds", "flags")


def entry_id(rep: EdgeRep) -> str:
    return hashlib.sha256(write_network(rep).encode()).hexdigest()[:16]


@dataclass
class DbEntry:
    id: str
    rep: EdgeRep
    stab: int
    orbit: int
    bounds: list = field(default_factory=list)
    flags: dict = field(default_factory=dict)

    def row(self):
        flags = ",".join(f"{k}={v}" for k, v in sorted(self.flags.items())) or "-"
        bounds = ",".join(sorted(self.bounds)) or "-"
        return "\t".join(map(str, (self.id, self.rep.K, self.rep.L, self.stab, self.orbit, self.rep, bounds, flags)))

    @classmethod
    def from_row(cls, line, text):
        cols = line.rstrip("\n").split("\t")
        if len(cols) != len(COLUMNS):
            raise NetCodingError(f"corrupt index row: {line!r}")
        rep = parse_network(text)
        bounds = [] if cols[6] == "-" else cols[6].split(",")
        flags = {} if cols[7] == "-" else dict(x.split("=", 1) for x in cols[7].split(","))
        return cls(cols[0], rep, int(cols[3]), int(cols[4]), bounds, flags)


class Database:
    def __init__(self, path):
        self.path = os.fspath(path)
        for sub in ("nets", "regions", "prov"):
            os.makedirs(os.path.join(self.path, sub), exist_ok=True)
        self.lock = FileLock(os.path.join(self.path, ".lock"))
        self.entries = {}
        idx = os.path.join(self.path, "index.tsv")
        if os.path.exists(idx):
            with open(idx, encoding="utf-8") as fh:
                lines = fh.read().splitlines()
            for line in lines[1:]:
                i = line.split("\t", 1)[0]
                with open(self._file("nets", i, ".ncnet"), encoding="utf-8") as fh:
                    e = DbEntry.from_row(line, fh.read())
                if entry_id(e.rep) != e.id:
                    raise NetCodingError(f"id {e.id} does not match its stored network")
                self.entries[e.id] = e

    def _file(self, sub, i, ext):
        return os.path.join(self.path, sub, i + ext)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(sorted(self.entries.values(), key=lambda e: (e.rep.K, e.rep.L, e.rep.key)))

    def __contains__(self, rep):
        return entry_id(canonicalize(rep)[0]) in self.entries

    def add(self, rep: EdgeRep, provenance=(), stab=None):
        """Store the canonical form of ``rep``; returns its entry."""
        rep = canonicalize(rep)[0]
        i = entry_id(rep)
        with self.lock:
            e = self.entries.get(i)
            if e is None:
                order = stab if stab is not None else stabilizer(rep).order
                orbit = math.factorial(rep.K) * math.factorial(rep.L) // order
                e = DbEntry(i, rep, order, orbit)
                self.entries[i] = e
                with open(self._file("nets", i, ".ncnet"), "w", encoding="utf-8", newline="\n") as fh:
                    fh.write(write_network(rep))
            if provenance:
                with open(self._file("prov", i, ".txt"), "a", encoding="utf-8", newline="\n") as fh:
                    for p in provenance:
                        fh.write(f"{p}\n")
        return e

    def put_region(self, i, R: RateRegion):
        e = self.entries[i]
        if R.coords != region_coords(e.rep.K, e.rep.L):
            raise NetCodingError(f"region coordinates {R.coords} do not fit ({e.rep.K},{e.rep.L})")
        with self.lock:
            with open(self._file("regions", i, f".{R.bound}.ncrr"), "w", encoding="utf-8", newline="\n") as fh:
                fh.write(write_region(R))
            if R.bound not in e.bounds:
                e.bounds.append(R.bound)

    def region(self, i, bound):
        return read_region(self._file("regions", i, f".{bound}.ncrr"))

    def provenance(self, i):
        p = self._file("prov", i, ".txt")
        if not os.path.exists(p):
            return []
        with open(p, encoding="utf-8") as fh:
            return fh.read().splitlines()

    def set_flag(self, i, key, value):
        self.entries[i].flags[key] = value

    def save(self):
        with self.lock:
            tmp = os.path.join(self.path, "index.tsv.tmp")
            with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
                fh.write("\t".join(COLUMNS) + "\n")
                for e in self:
                    fh.write(e.row() + "\n")
            os.replace(tmp, os.path.join(self.path, "index.tsv"))
