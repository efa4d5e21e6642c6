"""Content-addressed artifact store with atomic writes.

Artifact ids are sha256 hashes of the stored bytes, so equal ids imply equal
bytes and nothing is ever mutated in place. A memo table maps deterministic
stage keys to previously produced artifact ids, which is what makes pipelines
resumable.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

STORE_ENV_VAR = "COOKBENCH_STORE"
DEFAULT_STORE = "./artifacts"


def canonical_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


class ArtifactStore:
    def __init__(self, root: str | Path | None = None):
        if root is None:
            root = os.environ.get(STORE_ENV_VAR, DEFAULT_STORE)
        self.root = Path(root)
        (self.root / "objects").mkdir(parents=True, exist_ok=True)
        (self.root / "memo").mkdir(parents=True, exist_ok=True)

    # -- objects ---------------------------------------------------------------

    def _object_path(self, artifact_id: str) -> Path:
        return self.root / "objects" / artifact_id[:2] / artifact_id

    def put_bytes(self, data: bytes) -> str:
        artifact_id = hashlib.sha256(data).hexdigest()
        path = self._object_path(artifact_id)
        if not path.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
            try:
                with os.fdopen(fd, "wb") as f:
                    f.write(data)
                os.replace(tmp, path)  # atomic: readers never see partial objects
            finally:
                if os.path.exists(tmp):
                    os.unlink(tmp)
        return artifact_id

    def put_json(self, obj) -> str:
        return self.put_bytes(canonical_json(obj))

    def put_text(self, text: str) -> str:
        return self.put_bytes(text.encode("utf-8"))

    def has(self, artifact_id: str) -> bool:
        return self._object_path(artifact_id).exists()

    def get_bytes(self, artifact_id: str) -> bytes:
        path = self._object_path(artifact_id)
        data = path.read_bytes()
        if hashlib.sha256(data).hexdigest() != artifact_id:
            raise IOError(f"artifact {artifact_id} is corrupt")
        return data

    def get_json(self, artifact_id: str):
        return json.loads(self.get_bytes(artifact_id))

    def get_text(self, artifact_id: str) -> str:
        return self.get_bytes(artifact_id).decode("utf-8")

    def delete(self, artifact_id: str) -> None:
        path = self._object_path(artifact_id)
        if path.exists():
            path.unlink()

    # -- stage memo -------------------------------------------------------------

    def stage_key(self, descriptor: dict) -> str:
        return hashlib.sha256(canonical_json(descriptor)).hexdigest()

    def memo_get(self, key: str) -> dict | None:
        path = self.root / "memo" / f"{key}.json"
        if not path.exists():
            return None
        memo = json.loads(path.read_text(encoding="utf-8"))
        # A memo only counts if every output object still exists.
        for artifact_id in memo.get("outputs", {}).values():
            if not self.has(artifact_id):
                return None
        return memo

    def memo_put(self, key: str, outputs: dict[str, str]) -> None:
        path = self.root / "memo" / f"{key}.json"
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "w") as f:
                json.dump({"key": key, "outputs": outputs}, f, sort_keys=True)
            os.replace(tmp, path)
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)
