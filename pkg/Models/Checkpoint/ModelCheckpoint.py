import json
from pathlib import Path
import numpy as np
from GlobalUtils.globalUtils import FileFormatError
from GlobalUtils.logger import logger
from Models.ModelUtils import Architecture, BaseLearner, ParameterVector
from Models.Master.MasterLearner import parameter_count

MODEL_MANIFEST = 'model.json'
PARAMS_FILE = 'params.bin'
PARAMS_DTYPE = np.dtype('<f8')


def save_model(model: BaseLearner, path) -> Path:
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = {
        'format_version': 1,
        'kind': model.kind.value,
        'hyper': model.architecture.to_dict(),
        'param_count': len(model.params),
        'params_file': PARAMS_FILE,
    }
    (directory / PARAMS_FILE).write_bytes(np.ascontiguousarray(model.params.values, dtype=PARAMS_DTYPE).tobytes())
    with open(directory / MODEL_MANIFEST, 'w', encoding='utf-8') as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write('\n')
    return directory

def is_model_checkpoint(path) -> bool:
    return (Path(path) / MODEL_MANIFEST).is_file()

def load_model(path) -> BaseLearner:
    directory = Path(path)
    try:
        with open(directory / MODEL_MANIFEST, 'r', encoding='utf-8') as f:
            manifest = json.load(f)
    except FileNotFoundError:
        raise FileFormatError(f"ModelCheckpoint - model.json: no checkpoint manifest in {directory}")
    except json.JSONDecodeError as e:
        raise FileFormatError(f"ModelCheckpoint - model.json: invalid JSON ({e})")

    try:
        architecture = Architecture.from_dict(manifest['hyper'])
        declared = int(manifest['param_count'])
        params_file = manifest.get('params_file', PARAMS_FILE)
    except (KeyError, TypeError, ValueError) as e:
        raise FileFormatError(f"ModelCheckpoint - hyper/param_count: {e}")
    if manifest.get('kind') != architecture.kind.value:
        raise FileFormatError(f"ModelCheckpoint - kind: manifest says {manifest.get('kind')}, hyper says {architecture.kind.value}")
    if declared != parameter_count(architecture):
        raise FileFormatError(f"ModelCheckpoint - param_count: {declared} does not match the architecture ({parameter_count(architecture)})")

    try:
        payload = (directory / params_file).read_bytes()
    except FileNotFoundError:
        raise FileFormatError(f"ModelCheckpoint - params_file: {directory / params_file} does not exist")
    if len(payload) != declared * PARAMS_DTYPE.itemsize:
        raise FileFormatError(f"ModelCheckpoint - params_file: expected {declared * PARAMS_DTYPE.itemsize} bytes, found {len(payload)}")
    model = BaseLearner(architecture, ParameterVector(architecture.kind, np.frombuffer(payload, dtype=PARAMS_DTYPE)))
    logger.info(f"ModelCheckpoint - Loaded {architecture.kind.value} checkpoint from {directory}.")
    return model
