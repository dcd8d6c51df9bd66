"""Snapshot persistence and run manifests.

Snapshot format (little-endian throughout):

    bytes 0..3   magic "NSEB"
    bytes 4..7   format version, u32 (currently 1)
    bytes 8..15  header length H, u64
    H bytes      UTF-8 JSON header {n, nu, time, dtype, order, components}
    payload      components * n^3 float64 values in C order, physical space

Physical samples were chosen for portability to external tools; spectral
coefficients are recomputed on load. Reads validate magic, version, header
and payload sizes and fail with the name of the violated check.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import asdict, dataclass
from pathlib import Path
from warnings import warn

import numpy as np

from .errors import ConfigError, SnapshotFormatError
from .fields import PhysicalField, SpectralField, divergence_defect, leray_project, to_physical, to_spectral
from .grid import GridSpec

MAGIC = b"NSEB"
VERSION = 1
DIVERGENCE_WARN = 1e-10


@dataclass(frozen=True)
class SnapshotHeader:
    n: int
    nu: float
    time: float
    dtype: str = "f64"
    order: str = "C"
    components: int = 3


@dataclass(frozen=True)
class SnapshotFile:
    path: Path
    header: SnapshotHeader
    sha256: str


def _encode(header: SnapshotHeader, payload: np.ndarray) -> bytes:
    head = json.dumps(asdict(header), sort_keys=True).encode("utf-8")
    return b"".join(
        [
            MAGIC,
            struct.pack("<I", VERSION),
            struct.pack("<Q", len(head)),
            head,
            np.ascontiguousarray(payload, dtype="<f8").tobytes(),
        ]
    )


def write_snapshot(f: SpectralField, path: str | Path) -> SnapshotFile:
    """Serialize a snapshot (via its physical samples) to the given path."""
    path = Path(path)
    header = SnapshotHeader(n=f.grid.n, nu=f.nu, time=f.time)
    blob = _encode(header, to_physical(f).values)
    path.write_bytes(blob)
    return SnapshotFile(path, header, hashlib.sha256(blob).hexdigest())


def read_snapshot(path: str | Path) -> SpectralField:
    """Load a snapshot; validates structure, warns if the stored field is
    not solenoidal to 1e-10, and re-projects so the invariant holds."""
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < 16:
        raise SnapshotFormatError("truncation", f"{path} holds {len(blob)} bytes")
    if blob[:4] != MAGIC:
        raise SnapshotFormatError("magic", f"expected {MAGIC!r}, got {blob[:4]!r}")
    (version,) = struct.unpack("<I", blob[4:8])
    if version != VERSION:
        raise SnapshotFormatError("version", f"expected {VERSION}, got {version}")
    (head_len,) = struct.unpack("<Q", blob[8:16])
    if len(blob) < 16 + head_len:
        raise SnapshotFormatError("header", "header extends past end of file")
    try:
        raw = json.loads(blob[16 : 16 + head_len].decode("utf-8"))
        header = SnapshotHeader(**raw)
    except (ValueError, TypeError) as exc:
        raise SnapshotFormatError("header", f"malformed JSON header: {exc}") from exc
    if header.dtype != "f64" or header.order != "C" or header.components != 3:
        raise SnapshotFormatError("header", f"unsupported layout {header}")

    n = header.n
    expected = 3 * n**3 * 8
    payload = blob[16 + head_len :]
    if len(payload) != expected:
        raise SnapshotFormatError(
            "payload_size", f"expected {expected} bytes, got {len(payload)}"
        )
    values = np.frombuffer(payload, dtype="<f8").reshape(3, n, n, n)
    try:
        grid = GridSpec(n)
    except ConfigError as exc:
        raise SnapshotFormatError("header", str(exc)) from exc
    f = to_spectral(PhysicalField(grid, values.copy()), time=header.time, nu=header.nu)
    f.coeffs[:, 0, 0, 0] = 0.0
    defect = divergence_defect(f)
    if defect > DIVERGENCE_WARN:
        warn(
            f"{path}: stored field has divergence defect {defect:.3e} > "
            f"{DIVERGENCE_WARN:.0e}; re-projecting",
            RuntimeWarning,
            stacklevel=2,
        )
    return leray_project(f)


@dataclass(frozen=True)
class RunManifest:
    """Index of a simulation run: config echo plus snapshot files and hashes."""

    config: dict
    snapshots: list[dict]  # {"time", "file", "sha256"}
    energy_file: str
    energy_sha256: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "config": self.config,
                "snapshots": self.snapshots,
                "energy_file": self.energy_file,
                "energy_sha256": self.energy_sha256,
            },
            sort_keys=True,
            indent=2,
        )


def write_manifest(manifest: RunManifest, run_dir: str | Path) -> Path:
    path = Path(run_dir) / "manifest.json"
    path.write_text(manifest.to_json() + "\n", encoding="utf-8")
    return path


def read_manifest(run_dir: str | Path) -> RunManifest:
    path = Path(run_dir) / "manifest.json"
    data = json.loads(path.read_text(encoding="utf-8"))
    return RunManifest(
        config=data["config"],
        snapshots=data["snapshots"],
        energy_file=data["energy_file"],
        energy_sha256=data["energy_sha256"],
    )


def file_sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def verify_manifest(run_dir: str | Path) -> list[str]:
    """Return a list of problems (missing files, hash mismatches); empty if
    the manifest checks out."""
    run_dir = Path(run_dir)
    manifest = read_manifest(run_dir)
    problems = []
    for entry in manifest.snapshots:
        p = run_dir / entry["file"]
        if not p.exists():
            problems.append(f"missing snapshot {entry['file']}")
        elif file_sha256(p) != entry["sha256"]:
            problems.append(f"hash mismatch for {entry['file']}")
    energy = run_dir / manifest.energy_file
    if not energy.exists():
        problems.append(f"missing {manifest.energy_file}")
    elif file_sha256(energy) != manifest.energy_sha256:
        problems.append(f"hash mismatch for {manifest.energy_file}")
    return problems
