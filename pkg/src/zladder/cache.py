"""Evaluation cache shared across CLI runs.

Two stores under one directory:

* ``tables/``: ladder tables and zeta-window grids as .npz files keyed by
  a hash of their build parameters (binary, bit-exact round trip).
* ``zeta_em.jsonl``: one-off Euler-Maclaurin zeta values keyed by
  (sigma, t, tol) with arguments rounded to 1e-9 before hashing; append
  is serialized through a file lock so concurrent writers stay safe.

Cached and fresh runs agree to full double precision because both stores
round-trip the exact float64 payloads.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np
from filelock import FileLock

from .ladder import LadderTable

ROUND_DIGITS = 9  # argument rounding granularity for value keys


def _round_key(x: float) -> float:
    return round(float(x), ROUND_DIGITS)


def _hash_key(parts: dict) -> str:
    canon = json.dumps(parts, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:24]


class EvalCache:
    """Directory-backed cache for expensive evaluations."""

    def __init__(self, path):
        self.root = Path(path)
        self.tables_dir = self.root / "tables"
        self.tables_dir.mkdir(parents=True, exist_ok=True)
        self.zeta_path = self.root / "zeta_em.jsonl"
        self.lock = FileLock(str(self.root / ".lock"))
        self._zeta: dict[tuple, complex] = {}
        self._pending: list[str] = []
        self._load_zeta()

    # -- scalar zeta values ------------------------------------------------
    def _load_zeta(self) -> None:
        if not self.zeta_path.exists():
            return
        with open(self.zeta_path, "r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                rec = json.loads(line)
                key = (rec["sigma"], rec["t"], rec.get("tol"))
                self._zeta[key] = complex(rec["re"], rec["im"])

    def zeta_get(self, sigma: float, t: float, tol=None) -> complex | None:
        return self._zeta.get((_round_key(sigma), _round_key(t), tol))

    def zeta_put(self, sigma: float, t: float, value: complex, tol=None) -> None:
        key = (_round_key(sigma), _round_key(t), tol)
        if key in self._zeta:
            return
        self._zeta[key] = value
        self._pending.append(json.dumps(
            {"sigma": key[0], "t": key[1], "tol": tol,
             "re": value.real, "im": value.imag}))

    def flush(self) -> None:
        if not self._pending:
            return
        with self.lock:
            with open(self.zeta_path, "a", encoding="utf-8") as fh:
                fh.write("\n".join(self._pending) + "\n")
        self._pending = []

    # -- ladder tables and window grids -------------------------------------
    def table_get(self, key: dict) -> LadderTable | None:
        path = self.tables_dir / (_hash_key(key) + ".npz")
        if not path.exists():
            return None
        data = np.load(path)
        return LadderTable(data["t"], data["phi"], data["slopes"],
                           (float(data["anchor"][0]), float(data["anchor"][1])),
                           float(data["tol"][()]))

    def table_put(self, key: dict, table: LadderTable) -> None:
        path = self.tables_dir / (_hash_key(key) + ".npz")
        tmp = path.with_suffix(".tmp.npz")
        with self.lock:
            np.savez(tmp, t=table.t_grid, phi=table.phi_values,
                     slopes=table.slopes, anchor=np.array(table.anchor),
                     tol=np.float64(table.quadrature_tol))
            os.replace(tmp, path)

    def grid_get(self, key: dict) -> tuple[np.ndarray, np.ndarray] | None:
        path = self.tables_dir / (_hash_key(key) + ".npz")
        if not path.exists():
            return None
        data = np.load(path)
        return data["x"], data["y"]

    def grid_put(self, key: dict, x: np.ndarray, y: np.ndarray) -> None:
        path = self.tables_dir / (_hash_key(key) + ".npz")
        tmp = path.with_suffix(".tmp.npz")
        with self.lock:
            np.savez(tmp, x=x, y=y)
            os.replace(tmp, path)

    def sieve_get(self, limit: int) -> np.ndarray | None:
        hit = self.grid_get({"kind": "sieve", "limit": limit})
        return None if hit is None else hit[0]

    def sieve_put(self, limit: int, values: np.ndarray) -> None:
        self.grid_put({"kind": "sieve", "limit": limit}, values,
                      np.empty(0, dtype=np.int8))
