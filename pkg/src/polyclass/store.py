"""Keyed store of canonical forms and representative systems.

Layout under the data directory:

    index.db                 embedded B-tree index (sqlite)
    objects/<k2>/<k62>.graph canonical form text, digest = record key
    objects/<k2>/<k62>.pols  representative system + note, parseable .pols

The index row carries the count fields in lookup order: node counts first,
then degree data, then graph length.  A composite index in that exact
order makes each narrowing stage an O(log n) range probe; the final stage
always compares the full canonical text, so a hit is never a false
positive.  Re-inserting an isomorphic system is a no-op returning the
existing key.

One writer at a time; a lock serializes mutations so a single open handle
can be shared across service request handlers.
"""

from __future__ import annotations

import hashlib
import os
import sqlite3
import tempfile
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .canon import DIGEST_ALGORITHM, FORMAT_VERSION, CanonicalForm
from .core import PolySystem, format_system

_SCHEMA = """
CREATE TABLE IF NOT EXISTS meta (
    name TEXT PRIMARY KEY,
    value TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS records (
    key TEXT PRIMARY KEY,
    n_node_variable INTEGER NOT NULL,
    n_node_monomial INTEGER NOT NULL,
    n_node_equation INTEGER NOT NULL,
    n_node_degree INTEGER NOT NULL,
    n_degree INTEGER NOT NULL,
    degrees TEXT NOT NULL,
    graph_length INTEGER NOT NULL,
    graph_filename TEXT NOT NULL,
    poly_filename TEXT NOT NULL,
    note TEXT NOT NULL,
    created_at TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS narrowing ON records (
    n_node_variable, n_node_monomial, n_node_equation, n_node_degree,
    n_degree, degrees, graph_length
);
"""

_COLUMNS = (
    "key, n_node_variable, n_node_monomial, n_node_equation, n_node_degree, "
    "n_degree, degrees, graph_length, graph_filename, poly_filename, note, created_at"
)


class StoreCorruption(RuntimeError):
    """A stored object no longer matches its digest key."""


@dataclass(frozen=True)
class DbRecord:
    key: str
    n_node_variable: int
    n_node_monomial: int
    n_node_equation: int
    n_node_degree: int
    n_degree: int
    degrees: str
    graph_length: int
    graph_filename: str
    poly_filename: str
    note: str
    created_at: str


@dataclass(frozen=True)
class StoreStats:
    records: int
    disk_bytes: int
    by_equation_count: dict[int, int]


def _degrees_text(form: CanonicalForm) -> str:
    return ",".join(str(d) for d in form.degrees)


class ClassStore:
    """Persistent map from canonical forms to system records."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "objects").mkdir(exist_ok=True)
        self._lock = threading.RLock()
        self._db = sqlite3.connect(self.root / "index.db", check_same_thread=False)
        self._db.executescript(_SCHEMA)
        self._check_meta()

    def _check_meta(self) -> None:
        with self._lock, self._db:
            for name, value in (
                ("format_version", FORMAT_VERSION),
                ("digest_algorithm", DIGEST_ALGORITHM),
            ):
                row = self._db.execute(
                    "SELECT value FROM meta WHERE name = ?", (name,)
                ).fetchone()
                if row is None:
                    self._db.execute(
                        "INSERT INTO meta (name, value) VALUES (?, ?)", (name, value)
                    )
                elif row[0] != value:
                    raise StoreCorruption(
                        f"store {name} is {row[0]!r}, this build uses {value!r}"
                    )

    # -- paths ------------------------------------------------------------

    def _object_paths(self, key: str) -> tuple[Path, Path]:
        d = self.root / "objects" / key[:2]
        return d / f"{key[2:]}.graph", d / f"{key[2:]}.pols"

    def _read_graph_text(self, record_filename: str) -> str:
        return (self.root / record_filename).read_text(encoding="utf-8")

    def _verify_object(self, key: str, graph_filename: str) -> str:
        text = self._read_graph_text(graph_filename)
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        if digest != key:
            raise StoreCorruption(
                f"object {graph_filename} digests to {digest}, expected {key}"
            )
        return text

    # -- operations ---------------------------------------------------------

    def insert(self, form: CanonicalForm, sys: PolySystem, note: str = "") -> tuple[str, bool]:
        """Store a canonical class; returns (key, created).

        Idempotent on key: an isomorph of a stored system returns the
        existing key, after re-verifying the stored object's digest.
        """
        with self._lock:
            existing = self.get(form.key)
            if existing is not None:
                self._verify_object(existing.key, existing.graph_filename)
                return existing.key, False

            graph_path, poly_path = self._object_paths(form.key)
            graph_path.parent.mkdir(parents=True, exist_ok=True)
            graph_path.write_text(form.text, encoding="utf-8")
            poly_lines = [f"# {line}" for line in note.splitlines()] if note else []
            poly_path.write_text(
                "\n".join(poly_lines + [format_system(sys)]), encoding="utf-8"
            )
            record = DbRecord(
                key=form.key,
                n_node_variable=form.counts.n_node_variable,
                n_node_monomial=form.counts.n_node_monomial,
                n_node_equation=form.counts.n_node_equation,
                n_node_degree=form.counts.n_node_degree,
                n_degree=form.n_degree,
                degrees=_degrees_text(form),
                graph_length=len(form.text),
                graph_filename=str(graph_path.relative_to(self.root)),
                poly_filename=str(poly_path.relative_to(self.root)),
                note=note,
                created_at=datetime.now(timezone.utc).isoformat(),
            )
            with self._db:
                self._db.execute(
                    f"INSERT INTO records ({_COLUMNS}) VALUES "
                    "(?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                    (
                        record.key,
                        record.n_node_variable,
                        record.n_node_monomial,
                        record.n_node_equation,
                        record.n_node_degree,
                        record.n_degree,
                        record.degrees,
                        record.graph_length,
                        record.graph_filename,
                        record.poly_filename,
                        record.note,
                        record.created_at,
                    ),
                )
            return record.key, True

    def lookup(self, form: CanonicalForm) -> DbRecord | None:
        """Narrow section by section, then confirm on the full text."""
        stages = [
            (
                "n_node_variable = ? AND n_node_monomial = ? "
                "AND n_node_equation = ? AND n_node_degree = ?",
                [
                    form.counts.n_node_variable,
                    form.counts.n_node_monomial,
                    form.counts.n_node_equation,
                    form.counts.n_node_degree,
                ],
            ),
            ("n_degree = ? AND degrees = ?", [form.n_degree, _degrees_text(form)]),
            ("graph_length = ?", [len(form.text)]),
        ]
        with self._lock:
            where: list[str] = []
            args: list = []
            rows: list = []
            for clause, values in stages:
                where.append(clause)
                args.extend(values)
                rows = self._db.execute(
                    f"SELECT {_COLUMNS} FROM records WHERE " + " AND ".join(where),
                    args,
                ).fetchall()
                if not rows:
                    return None
            for row in rows:
                record = DbRecord(*row)
                if self._read_graph_text(record.graph_filename) == form.text:
                    return record
            return None

    def get(self, key: str) -> DbRecord | None:
        """Direct fetch by digest key."""
        with self._lock:
            row = self._db.execute(
                f"SELECT {_COLUMNS} FROM records WHERE key = ?", (key,)
            ).fetchone()
        return DbRecord(*row) if row else None

    def graph_text(self, record: DbRecord) -> str:
        """Canonical text for a record, digest-checked."""
        with self._lock:
            return self._verify_object(record.key, record.graph_filename)

    def linear_scan(self, form: CanonicalForm) -> DbRecord | None:
        """Reference lookup without narrowing (differential testing)."""
        with self._lock:
            rows = self._db.execute(f"SELECT {_COLUMNS} FROM records").fetchall()
            for row in rows:
                record = DbRecord(*row)
                if self._read_graph_text(record.graph_filename) == form.text:
                    return record
            return None

    def stats(self) -> StoreStats:
        with self._lock:
            count = self._db.execute("SELECT COUNT(*) FROM records").fetchone()[0]
            hist = dict(
                self._db.execute(
                    "SELECT n_node_equation, COUNT(*) FROM records "
                    "GROUP BY n_node_equation"
                ).fetchall()
            )
        disk = 0
        for path in self.root.rglob("*"):
            if path.is_file():
                disk += path.stat().st_size
        return StoreStats(records=count, disk_bytes=disk, by_equation_count=hist)

    def writable(self) -> bool:
        """Probe whether new objects can be written."""
        try:
            objects = self.root / "objects"
            objects.mkdir(exist_ok=True)
            with tempfile.NamedTemporaryFile(dir=objects, prefix=".probe"):
                pass
            return True
        except OSError:
            return False

    def close(self) -> None:
        with self._lock:
            self._db.close()

    def __enter__(self) -> "ClassStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def data_dir_from_env(explicit: str | None = None) -> Path:
    """Resolve the data directory: flag, then POLYCLASS_DATA, then cwd."""
    if explicit:
        return Path(explicit)
    env = os.environ.get("POLYCLASS_DATA")
    if env:
        return Path(env)
    return Path("polyclass-data")
