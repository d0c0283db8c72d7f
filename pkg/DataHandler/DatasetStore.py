import json
from pathlib import Path
import numpy as np
from GlobalUtils.globalUtils import FileFormatError
from GlobalUtils.logger import logger
from DataHandler.Dataset import Dataset, LabelSpace

FORMAT_VERSION = 1
MANIFEST_FILE = 'manifest.json'
DATA_FILE = 'data.bin'
LABELS_FILE = 'labels.bin'
FEATURE_DTYPES = {'f32le': np.dtype('<f4')}
LABEL_DTYPE = np.dtype('<u2')
MANIFEST_FIELDS = ('format_version', 'num_samples', 'feature_shape', 'dtype', 'class_names', 'data_file', 'labels_file')


def save_dataset(dataset: Dataset, path) -> Path:
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    if dataset.label_space.N > np.iinfo(LABEL_DTYPE).max + 1:
        raise FileFormatError(f"DatasetStore - class_names: {dataset.label_space.N} classes do not fit u16 labels")

    manifest = {
        'format_version': FORMAT_VERSION,
        'num_samples': len(dataset),
        'feature_shape': list(dataset.feature_shape),
        'dtype': 'f32le',
        'class_names': list(dataset.label_space.class_names),
        'data_file': DATA_FILE,
        'labels_file': LABELS_FILE,
    }
    (directory / DATA_FILE).write_bytes(np.ascontiguousarray(dataset.features, dtype=FEATURE_DTYPES['f32le']).tobytes())
    (directory / LABELS_FILE).write_bytes(np.ascontiguousarray(dataset.labels, dtype=LABEL_DTYPE).tobytes())
    with open(directory / MANIFEST_FILE, 'w', encoding='utf-8') as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write('\n')
    logger.info(f"DatasetStore - Saved {dataset.describe()} to {directory}.")
    return directory

def _read_manifest(directory: Path) -> dict:
    manifest_path = directory / MANIFEST_FILE
    try:
        with open(manifest_path, 'r', encoding='utf-8') as f:
            manifest = json.load(f)
    except FileNotFoundError:
        raise FileFormatError(f"DatasetStore - manifest: {manifest_path} does not exist")
    except json.JSONDecodeError as e:
        raise FileFormatError(f"DatasetStore - manifest: {manifest_path} is not valid JSON ({e})")
    if not isinstance(manifest, dict):
        raise FileFormatError("DatasetStore - manifest: top level must be an object")
    for field_name in MANIFEST_FIELDS:
        if field_name not in manifest:
            raise FileFormatError(f"DatasetStore - {field_name}: missing from manifest")
    if manifest['format_version'] != FORMAT_VERSION:
        raise FileFormatError(f"DatasetStore - format_version: expected {FORMAT_VERSION}, got {manifest['format_version']}")
    if manifest['dtype'] not in FEATURE_DTYPES:
        raise FileFormatError(f"DatasetStore - dtype: unknown dtype '{manifest['dtype']}'")
    if not isinstance(manifest['num_samples'], int) or manifest['num_samples'] < 0:
        raise FileFormatError(f"DatasetStore - num_samples: expected a nonnegative integer, got {manifest['num_samples']!r}")
    shape = manifest['feature_shape']
    if not isinstance(shape, list) or not all(isinstance(extent, int) and extent >= 0 for extent in shape):
        raise FileFormatError(f"DatasetStore - feature_shape: expected a list of nonnegative integers, got {shape!r}")
    if not isinstance(manifest['class_names'], list):
        raise FileFormatError("DatasetStore - class_names: expected a list of strings")
    return manifest

def _read_payload(path: Path, dtype: np.dtype, expected_count: int, field_name: str) -> np.ndarray:
    try:
        payload = path.read_bytes()
    except FileNotFoundError:
        raise FileFormatError(f"DatasetStore - {field_name}: {path} does not exist")
    expected_bytes = expected_count * dtype.itemsize
    if len(payload) != expected_bytes:
        raise FileFormatError(f"DatasetStore - {field_name}: manifest implies {expected_bytes} bytes, {path.name} holds {len(payload)}")
    return np.frombuffer(payload, dtype=dtype)

def load_dataset(path) -> Dataset:
    directory = Path(path)
    manifest = _read_manifest(directory)
    num_samples = manifest['num_samples']
    feature_shape = tuple(manifest['feature_shape'])
    per_sample = int(np.prod(feature_shape, dtype=np.int64))

    features = _read_payload(directory / manifest['data_file'], FEATURE_DTYPES[manifest['dtype']], num_samples * per_sample, 'data_file')
    labels = _read_payload(directory / manifest['labels_file'], LABEL_DTYPE, num_samples, 'labels_file')
    try:
        label_space = LabelSpace(tuple(manifest['class_names']))
        dataset = Dataset(features.astype(np.float64).reshape((num_samples,) + feature_shape), labels.astype(np.int64), label_space)
    except ValueError as e:
        raise FileFormatError(f"DatasetStore - class_names/labels: {e}")
    logger.info(f"DatasetStore - Loaded {dataset.describe()} from {directory}.")
    return dataset
