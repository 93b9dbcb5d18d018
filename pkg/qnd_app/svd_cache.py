"""
On-disk cache of joint SVDs, one `jsvd-N<N>.npz` archive per ensemble size.

The archive holds a JSON header, U, V and one (row, col, amplitude) triple
array per (dx, dz) pair. A SHA-256 digest over the header and every array is
stored alongside and checked on load.
"""

import hashlib
import json
import logging
import zipfile
from pathlib import Path

import numpy as np

from .config import cache_dir, tool_version
from .exceptions import CacheChecksumError, CacheMissingError
from .joint_svd import JointSVD, LambdaFactor, compute_joint_svd

logger = logging.getLogger(__name__)

CACHE_FORMAT = 1
FILE_PATTERN = "jsvd-N*.npz"


def cache_path(n: int, directory: Path | None = None) -> Path:
    return Path(directory or cache_dir()) / f"jsvd-N{n}.npz"


def _factor_key(dx: int, dz: int) -> str:
    return f"lambda_{dx}_{dz}"


def _digest(header: str, arrays: dict[str, np.ndarray]) -> str:
    digest = hashlib.sha256(header.encode("utf-8"))
    for name in sorted(arrays):
        digest.update(name.encode("utf-8"))
        digest.update(np.ascontiguousarray(arrays[name]).tobytes())
    return digest.hexdigest()


def save(jsvd: JointSVD, directory: Path | None = None) -> Path:
    path = cache_path(jsvd.n, directory)
    path.parent.mkdir(parents=True, exist_ok=True)
    arrays = {"u": jsvd.u, "v": jsvd.v}
    for (dx, dz), factor in jsvd.factors.items():
        arrays[_factor_key(dx, dz)] = np.column_stack(
            [factor.rows.astype(float), factor.cols.astype(float), factor.amplitudes]
        ).reshape(-1, 3)
    header = json.dumps({"format": CACHE_FORMAT, "N": jsvd.n, "toolVersion": tool_version()}, sort_keys=True)
    checksum = _digest(header, arrays)
    with path.open("wb") as handle:
        np.savez(handle, header=np.array(header), checksum=np.array(checksum), **arrays)
    logger.info("cached joint SVD for N=%d at %s", jsvd.n, path)
    return path


def load(n: int, directory: Path | None = None) -> JointSVD:
    path = cache_path(n, directory)
    if not path.exists():
        raise CacheMissingError(f"no cached joint SVD for N={n} at {path}; rerun with --build-cache")
    try:
        with np.load(path, allow_pickle=False) as archive:
            header = str(archive["header"])
            stored = str(archive["checksum"])
            arrays = {name: archive[name] for name in archive.files if name not in ("header", "checksum")}
    except (OSError, ValueError, KeyError, zipfile.BadZipFile) as exc:
        raise CacheChecksumError(f"cache file {path} is unreadable: {exc}") from exc
    if _digest(header, arrays) != stored:
        raise CacheChecksumError(f"cache file {path} failed its checksum")
    meta = json.loads(header)
    if meta.get("format") != CACHE_FORMAT or meta.get("N") != n:
        raise CacheChecksumError(f"cache file {path} holds format {meta.get('format')} for N={meta.get('N')}")
    dim = (n + 1) ** 2
    factors = {}
    for dx in range(n + 1):
        for dz in range(n + 1):
            triples = arrays[_factor_key(dx, dz)]
            factors[(dx, dz)] = LambdaFactor(
                dz, dx, dim,
                triples[:, 0].astype(np.int64), triples[:, 1].astype(np.int64), triples[:, 2],
            )
    logger.info("loaded joint SVD for N=%d from %s", n, path)
    return JointSVD(n, arrays["u"], arrays["v"], factors)


def load_or_build(n: int, build: bool = False, directory: Path | None = None,
                  rng: np.random.Generator | None = None) -> JointSVD:
    """Load the cached decomposition; compute and store it when `build` is set."""
    try:
        return load(n, directory)
    except CacheMissingError:
        if not build:
            raise
    jsvd = compute_joint_svd(n, rng)
    save(jsvd, directory)
    return jsvd


def clear(n: int | None = None, directory: Path | None = None) -> list[Path]:
    """Delete cache archives (all of them, or only the one for N). Other files are left alone."""
    root = Path(directory or cache_dir())
    if not root.exists():
        return []
    targets = [cache_path(n, root)] if n is not None else sorted(root.glob(FILE_PATTERN))
    removed = []
    for path in targets:
        if path.exists():
            path.unlink()
            removed.append(path)
    logger.info("removed %d cache file(s) from %s", len(removed), root)
    return removed


def inspect(jsvd: JointSVD) -> dict:
    """Sector table and a histogram of the nonzero |Lambda| entries."""
    sectors = np.bincount(jsvd.v_sectors(), minlength=jsvd.n + 1)
    amplitudes = np.concatenate([np.abs(f.amplitudes) for f in jsvd.factors.values()])
    # entries may exceed 1 by an ulp
    counts, edges = np.histogram(np.clip(amplitudes, 0.0, 1.0), bins=10, range=(0.0, 1.0))
    return {
        "N": jsvd.n,
        "sectors": {int(delta): int(count) for delta, count in enumerate(sectors)},
        "nonzero": int(amplitudes.size),
        "histogram": [
            {"low": float(low), "high": float(high), "count": int(count)}
            for low, high, count in zip(edges[:-1], edges[1:], counts)
        ],
    }
