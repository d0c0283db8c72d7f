import os
from enum import Enum
from dotenv import load_dotenv
from GlobalUtils.logger import logger

load_dotenv()

DEFAULT_SEED = 0
SEED_ENV_VAR = 'FEDVOTE_SEED'

class EventsDirectory(Enum):
    GLOBAL_MODEL_BROADCAST = "global_model_broadcast"
    CLIENT_UPDATE_SENT = "client_update_sent"
    ROUND_COMPLETED = "round_completed"

class ExitCode(Enum):
    SUCCESS = 0
    RUNTIME_FAILURE = 1
    USAGE_ERROR = 2


class FedVoteError(Exception):
    pass

class ShapeError(FedVoteError, ValueError):
    pass

class ArgumentError(FedVoteError, ValueError):
    pass

class CompatibilityError(FedVoteError, ValueError):
    pass

class FileFormatError(FedVoteError, ValueError):
    pass

class ConfigError(FedVoteError, ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("Invalid configuration: " + "; ".join(self.problems))

class ClientTrainingError(FedVoteError):
    def __init__(self, client_id: int, cause: Exception):
        self.client_id = client_id
        self.cause = cause
        super().__init__(f"Client {client_id} failed during local training: {cause}")


def get_seed_from_env(default: int = DEFAULT_SEED) -> int:
    raw = os.getenv(SEED_ENV_VAR)
    if raw is None or raw.strip() == '':
        return default
    try:
        seed = int(raw)
    except ValueError:
        raise ConfigError([f"{SEED_ENV_VAR} must be an integer, got '{raw}'"])
    if not 0 <= seed < 2**64:
        raise ConfigError([f"{SEED_ENV_VAR} must fit in 64 unsigned bits, got {seed}"])
    logger.info(f"GlobalUtils - Using seed {seed} from {SEED_ENV_VAR}.")
    return seed

def format_shape(shape) -> str:
    return "x".join(str(extent) for extent in shape) if len(shape) else "scalar"
