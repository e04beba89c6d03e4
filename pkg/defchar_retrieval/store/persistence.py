"""
On-disk datastore format.

A store is a directory holding:

    manifest.json   magic, format version, feature kind, column names,
                    entry count, row shape, extraction settings, and the
                    SHA-256 of every data file
    entries.csv     index,class,source[,<payload columns>]; vector values
                    written with 17 significant digits
    payload.bin     image stores only: uint8 little-endian blocks, one per
                    entry in index order
"""

import csv
import hashlib
import io
import json
from pathlib import Path
from typing import Dict, Union

import numpy as np

from defchar_retrieval.exceptions import (
    ChecksumMismatch, CorruptStore, FormatVersionMismatch, StoreIOError,
)
from defchar_retrieval.metrics import InputKind
from defchar_retrieval.store.datastore import Datastore, column_names
from defchar_retrieval.utils.logger import setup_logger

logger = setup_logger(__name__)

STORE_MAGIC = 'DEFCHAR-DATASTORE'
FORMAT_VERSION = 1
MANIFEST_FILE = 'manifest.json'
ENTRIES_FILE = 'entries.csv'
PAYLOAD_FILE = 'payload.bin'
FIXED_COLUMNS = ('index', 'class', 'source')


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _value_columns(store: Datastore):
    if store.input_kind is not InputKind.FEATURE_VECTOR:
        return ()
    width = store.row_shape[0] if store.row_shape else 0
    return column_names(store.feature_kind, width)


def _entries_csv(store: Datastore) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    with_values = store.input_kind is InputKind.FEATURE_VECTOR
    writer.writerow(list(FIXED_COLUMNS) + list(_value_columns(store)))
    for entry in store.entries:
        row = [entry.index, entry.class_label, entry.source_image]
        if with_values:
            row.extend(format(float(v), '.17g') for v in store.payload(entry.index))
        writer.writerow(row)
    return buffer.getvalue().encode('utf-8')


def save(store: Datastore, path: Union[str, Path]) -> Path:
    """Write ``store`` into directory ``path``; identical stores give identical bytes."""
    path = Path(path)
    files: Dict[str, bytes] = {ENTRIES_FILE: _entries_csv(store)}
    if store.input_kind is InputKind.IMAGE:
        files[PAYLOAD_FILE] = b''.join(
            np.ascontiguousarray(store.payload(e.index), dtype='<u1').tobytes() for e in store.entries
        )

    manifest = {
        'magic': STORE_MAGIC,
        'format_version': FORMAT_VERSION,
        'feature_kind': store.feature_kind,
        'slot_names': list(_value_columns(store)),
        'entry_count': len(store),
        'row_shape': list(store.row_shape) if store.row_shape else None,
        'image_side': store.image_side,
        'extraction': store.extraction,
        'package_version': store.package_version,
        'checksums': {name: _sha256(data) for name, data in sorted(files.items())},
    }

    try:
        path.mkdir(parents=True, exist_ok=True)
        for name, data in files.items():
            (path / name).write_bytes(data)
        (path / MANIFEST_FILE).write_text(json.dumps(manifest, indent=2, sort_keys=True) + '\n', encoding='utf-8')
    except OSError as e:
        raise StoreIOError(f"cannot write datastore to {path}: {e}") from e

    logger.info(f"Saved {store.feature_kind} datastore with {len(store)} entries to {path}")
    return path


def _read(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError as e:
        raise StoreIOError(f"cannot read {path}: {e}") from e


def _read_manifest(path: Path) -> dict:
    raw = _read(path / MANIFEST_FILE)
    try:
        manifest = json.loads(raw.decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FormatVersionMismatch(f"{path / MANIFEST_FILE} is not a datastore manifest: {e}") from e
    if not isinstance(manifest, dict) or manifest.get('magic') != STORE_MAGIC:
        raise FormatVersionMismatch(f"{path / MANIFEST_FILE} does not carry the datastore magic")
    if manifest.get('format_version') != FORMAT_VERSION:
        raise FormatVersionMismatch(
            f"datastore format version {manifest.get('format_version')} is not supported (expected {FORMAT_VERSION})"
        )
    return manifest


def load(path: Union[str, Path]) -> Datastore:
    """Read a datastore written by ``save``. Any inconsistency fails the whole load."""
    path = Path(path)
    manifest = _read_manifest(path)

    try:
        checksums = manifest['checksums']
        entry_count = int(manifest['entry_count'])
        row_shape = tuple(manifest['row_shape']) if manifest['row_shape'] else None
        feature_kind = manifest['feature_kind']
    except (KeyError, TypeError, ValueError) as e:
        raise CorruptStore(f"datastore manifest is missing fields: {e}") from e

    files = {}
    for name, expected in checksums.items():
        data = _read(path / name)
        if _sha256(data) != expected:
            raise ChecksumMismatch(f"{path / name} does not match its recorded checksum")
        files[name] = data

    store = Datastore(feature_kind, image_side=manifest.get('image_side'), extraction=manifest.get('extraction'))
    store.package_version = manifest.get('package_version', store.package_version)
    store._row_shape = row_shape

    rows = list(csv.reader(io.StringIO(files.get(ENTRIES_FILE, b'').decode('utf-8'))))
    if not rows:
        raise CorruptStore(f"{ENTRIES_FILE} has no header")
    header, body = rows[0], rows[1:]
    with_values = store.input_kind is InputKind.FEATURE_VECTOR
    expected_header = list(FIXED_COLUMNS) + (list(manifest.get('slot_names', [])) if with_values else [])
    if header != expected_header:
        raise CorruptStore(f"{ENTRIES_FILE} header does not match the manifest")
    if len(body) != entry_count:
        raise CorruptStore(f"{ENTRIES_FILE} holds {len(body)} entries, manifest says {entry_count}")

    payloads = None
    if not with_values:
        block = int(np.prod(row_shape)) if row_shape else 0
        data = files.get(PAYLOAD_FILE, b'')
        if len(data) != block * entry_count:
            raise CorruptStore(f"{PAYLOAD_FILE} holds {len(data)} bytes, expected {block * entry_count}")
        if entry_count:
            payloads = np.frombuffer(data, dtype='<u1').reshape((entry_count,) + row_shape)

    for position, row in enumerate(body):
        if len(row) != len(expected_header):
            raise CorruptStore(
                f"{ENTRIES_FILE} row {position + 1} has {len(row)} fields, expected {len(expected_header)}"
            )
        try:
            index, class_label = int(row[0]), int(row[1])
            payload = (np.array([float(v) for v in row[3:]], dtype=np.float64) if with_values
                       else payloads[position].astype(np.uint8))
        except ValueError as e:
            raise CorruptStore(f"{ENTRIES_FILE} row {position + 1} is malformed: {e}") from e
        if index != position:
            raise CorruptStore(f"{ENTRIES_FILE} row {position + 1} has index {index}, expected {position}")
        if row_shape is not None and payload.shape != row_shape:
            raise CorruptStore(f"{ENTRIES_FILE} row {position + 1} has payload shape {payload.shape}")
        store._add(payload, class_label, row[2])

    logger.info(f"Loaded {store.feature_kind} datastore with {len(store)} entries from {path}")
    return store
