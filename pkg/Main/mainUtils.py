import json
from dataclasses import fields
from pathlib import Path
from GlobalUtils.globalUtils import ArgumentError, ConfigError, get_seed_from_env
from GlobalUtils.logger import logger
from Ensemble.EnsembleUtils import VoteMethod, VoteWeighting
from Federation.FederationUtils import FederationConfig, GlobalStrategy, PartitionScheme, SyntheticSpec
from Models.ModelUtils import ArchitectureKind, TrainConfig

ENUM_KEYS = {
    'strategy': GlobalStrategy,
    'vote_method': VoteMethod,
    'vote_weighting': VoteWeighting,
    'partition': PartitionScheme,
}
INT_KEYS = ('num_clients', 'rounds', 'hidden_width', 'seed')
FLOAT_KEYS = ('dirichlet_alpha', 'train_fraction', 'val_fraction')
BOOL_KEYS = ('parallel_clients', 'record_wall_time')
PATH_KEYS = ('dataset_path', 'output_dir')
NESTED_KEYS = {'train': TrainConfig, 'synthetic': SyntheticSpec}
TRAIN_TYPES = {'learning_rate': float, 'epochs': int, 'batch_size': int}
SYNTHETIC_TYPES = {'per_class': int, 'dim': int, 'separation': float}

# flag dest -> config key
FLAG_OVERRIDES = {
    'seed': 'seed',
    'clients': 'num_clients',
    'rounds': 'rounds',
    'strategy': 'strategy',
    'vote_method': 'vote_method',
    'output_dir': 'output_dir',
    'dataset': 'dataset_path',
    'partition': 'partition',
}


def config_keys() -> set:
    return {f.name for f in fields(FederationConfig)}

def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)

def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)

def load_config_file(path) -> dict:
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            raw = json.load(f)
    except FileNotFoundError:
        raise ConfigError([f"config file {path} does not exist"])
    except json.JSONDecodeError as e:
        raise ConfigError([f"config file {path} is not valid JSON: {e}"])
    if not isinstance(raw, dict):
        raise ConfigError([f"config file {path} must hold a JSON object"])
    logger.info(f"MainUtils - Loaded config file {path}.")
    return raw

def _nested_values(section: str, raw, expected_types: dict, problems: list) -> dict:
    if not isinstance(raw, dict):
        problems.append(f"{section} must be an object")
        return {}
    values = {}
    for key, value in raw.items():
        if key not in expected_types:
            problems.append(f"unknown key '{section}.{key}'")
            continue
        check = _is_int if expected_types[key] is int else _is_number
        if not check(value):
            problems.append(f"{section}.{key} must be {'an integer' if expected_types[key] is int else 'a number'}, got {value!r}")
            continue
        values[key] = expected_types[key](value)
    return values

def _top_level_value(key: str, value, problems: list):
    if key in ENUM_KEYS:
        try:
            return ENUM_KEYS[key](value)
        except ValueError:
            allowed = ", ".join(member.value for member in ENUM_KEYS[key])
            problems.append(f"{key} must be one of {allowed}, got {value!r}")
    elif key in INT_KEYS:
        if _is_int(value):
            return value
        problems.append(f"{key} must be an integer, got {value!r}")
    elif key in FLOAT_KEYS:
        if _is_number(value):
            return float(value)
        problems.append(f"{key} must be a number, got {value!r}")
    elif key in BOOL_KEYS:
        if isinstance(value, bool):
            return value
        problems.append(f"{key} must be true or false, got {value!r}")
    elif key in PATH_KEYS:
        if value is None or isinstance(value, str):
            return value
        problems.append(f"{key} must be a path string or null, got {value!r}")
    elif key == 'architectures':
        try:
            kinds = tuple(ArchitectureKind(str(kind).upper()) for kind in value)
            if len(set(kinds)) != len(kinds):
                problems.append(f"architectures must not repeat a kind, got {list(value)}")
            return kinds
        except (TypeError, ValueError):
            problems.append(f"architectures must list kinds from {[kind.value for kind in ArchitectureKind]}, got {value!r}")
    return None

def build_config(raw: dict = None, overrides: dict = None) -> FederationConfig:
    """Merge defaults, FEDVOTE_SEED, the config file and flag overrides, in rising precedence.

    Every problem found is collected before a single ConfigError is raised.
    """
    raw = dict(raw or {})
    overrides = {key: value for key, value in (overrides or {}).items() if value is not None}
    problems = []
    values = {}

    for key in sorted(set(raw) - config_keys()):
        problems.append(f"unknown key '{key}'")
    merged = {key: value for key, value in raw.items() if key in config_keys()}
    merged.update(overrides)

    for key, value in merged.items():
        if key == 'train':
            values[key] = _nested_values(key, value, TRAIN_TYPES, problems)
        elif key == 'synthetic':
            values[key] = _nested_values(key, value, SYNTHETIC_TYPES, problems)
        else:
            converted = _top_level_value(key, value, problems)
            if converted is not None or key in PATH_KEYS:
                values[key] = converted

    if 'seed' not in merged:
        try:
            values['seed'] = get_seed_from_env()
        except ConfigError as e:
            problems.extend(e.problems)

    train_values = values.pop('train', {})
    try:
        values['train'] = TrainConfig(**train_values)
    except ArgumentError as e:
        problems.append(str(e))
    values['synthetic'] = SyntheticSpec(**values.pop('synthetic', {}))

    if problems:
        raise ConfigError(problems)
    config = FederationConfig(**values)
    problems = config.problems()
    if problems:
        raise ConfigError(problems)
    return config

def overrides_from_args(args) -> dict:
    overrides = {key: getattr(args, dest, None) for dest, key in FLAG_OVERRIDES.items()}
    if getattr(args, 'parallel_clients', False):
        overrides['parallel_clients'] = True
    return overrides
