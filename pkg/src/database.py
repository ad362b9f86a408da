"""SQLite ledger of verification runs and extremal searches."""

import json
import sqlite3
from contextlib import contextmanager
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from src.extremal import SearchConfig, SearchResult
from src.reports import CheckReport, aggregate_passed


@dataclass
class RunRecord:
    """One recorded verification run."""
    id: int | None
    started_at: datetime
    passed: bool
    check_count: int
    config_json: str


class ResultsDatabase:
    """SQLite database storing verification reports and search outcomes."""

    def __init__(self, db_path: str | Path = "results.db"):
        self.db_path = Path(db_path)
        self._init_db()

    def _init_db(self):
        """Initialize database schema."""
        with self._connect() as conn:
            conn.execute("""
                CREATE TABLE IF NOT EXISTS verification_runs (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    started_at TEXT NOT NULL,
                    passed INTEGER NOT NULL,
                    check_count INTEGER NOT NULL,
                    config_json TEXT NOT NULL
                )
            """)

            conn.execute("""
                CREATE TABLE IF NOT EXISTS check_results (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    run_id INTEGER NOT NULL REFERENCES verification_runs(id),
                    position INTEGER NOT NULL,
                    name TEXT NOT NULL,
                    passed INTEGER NOT NULL,
                    informational INTEGER NOT NULL,
                    tolerance REAL NOT NULL,
                    runtime REAL NOT NULL,
                    report_json TEXT NOT NULL
                )
            """)

            conn.execute("""
                CREATE TABLE IF NOT EXISTS search_runs (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    started_at TEXT NOT NULL,
                    family TEXT NOT NULL,
                    degree INTEGER NOT NULL,
                    seed INTEGER NOT NULL,
                    restarts_run INTEGER NOT NULL,
                    best_value REAL NOT NULL,
                    best_params_json TEXT NOT NULL
                )
            """)

            conn.execute("""
                CREATE INDEX IF NOT EXISTS idx_check_name ON check_results(name)
            """)

    @contextmanager
    def _connect(self):
        """Get database connection."""
        conn = sqlite3.connect(self.db_path)
        conn.row_factory = sqlite3.Row
        try:
            yield conn
            conn.commit()
        finally:
            conn.close()

    def record_verification(self, reports: list[CheckReport], config: dict | None = None) -> int:
        """Store a verification run and its reports; returns the run id."""
        with self._connect() as conn:
            cursor = conn.execute("""
                INSERT INTO verification_runs (started_at, passed, check_count, config_json)
                VALUES (?, ?, ?, ?)
            """, (
                datetime.now().isoformat(),
                1 if aggregate_passed(reports) else 0,
                len(reports),
                json.dumps(config or {}, sort_keys=True, default=str),
            ))
            run_id = cursor.lastrowid

            conn.executemany("""
                INSERT INTO check_results (
                    run_id, position, name, passed, informational,
                    tolerance, runtime, report_json
                ) VALUES (?, ?, ?, ?, ?, ?, ?, ?)
            """, [
                (
                    run_id, i, r.name,
                    1 if r.passed else 0, 1 if r.informational else 0,
                    r.tolerance, r.runtime,
                    json.dumps(r.to_record(timings=True)),
                )
                for i, r in enumerate(reports)
            ])
            return run_id

    def record_search(self, config: SearchConfig, result: SearchResult) -> int:
        """Store one extremal search outcome."""
        with self._connect() as conn:
            cursor = conn.execute("""
                INSERT INTO search_runs (
                    started_at, family, degree, seed, restarts_run,
                    best_value, best_params_json
                ) VALUES (?, ?, ?, ?, ?, ?, ?)
            """, (
                datetime.now().isoformat(),
                config.family,
                config.degree,
                config.seed,
                result.restarts_run,
                result.best_value,
                json.dumps(result.best_params),
            ))
            return cursor.lastrowid

    def get_recent_runs(self, limit: int = 10) -> list[RunRecord]:
        """Most recent verification runs first."""
        with self._connect() as conn:
            cursor = conn.execute(
                "SELECT * FROM verification_runs ORDER BY id DESC LIMIT ?",
                (limit,)
            )
            return [self._row_to_run(row) for row in cursor]

    def get_run_reports(self, run_id: int) -> list[dict]:
        """Stored report documents of one run, in check order."""
        with self._connect() as conn:
            cursor = conn.execute(
                "SELECT report_json FROM check_results WHERE run_id = ? ORDER BY position",
                (run_id,)
            )
            return [json.loads(row["report_json"]) for row in cursor]

    def get_check_history(self, name: str) -> list[dict]:
        """Pass/fail history of one check across runs, oldest first."""
        with self._connect() as conn:
            cursor = conn.execute("""
                SELECT
                    r.id as run_id,
                    r.started_at,
                    c.passed,
                    c.informational,
                    c.runtime
                FROM check_results c
                JOIN verification_runs r ON r.id = c.run_id
                WHERE c.name = ?
                ORDER BY r.id
            """, (name,))
            return [dict(row) for row in cursor]

    def get_search_history(self, limit: int = 10) -> list[dict]:
        """Most recent searches first."""
        with self._connect() as conn:
            cursor = conn.execute("""
                SELECT id, started_at, family, degree, seed, restarts_run, best_value
                FROM search_runs
                ORDER BY id DESC
                LIMIT ?
            """, (limit,))
            return [dict(row) for row in cursor]

    def _row_to_run(self, row: sqlite3.Row) -> RunRecord:
        """Convert database row to RunRecord."""
        return RunRecord(
            id=row["id"],
            started_at=datetime.fromisoformat(row["started_at"]),
            passed=bool(row["passed"]),
            check_count=row["check_count"],
            config_json=row["config_json"],
        )
