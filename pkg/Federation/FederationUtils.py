from dataclasses import dataclass, field
from enum import Enum
from DataHandler.Dataset import Dataset
from Ensemble.EnsembleModel import EnsembleModel
from Ensemble.EnsembleUtils import VoteMethod, VoteWeighting
from Metrics.ConfusionMatrix import MetricsReport
from Models.ModelUtils import ArchitectureKind, TrainConfig, cnn_input_problem

DEFAULT_ARCHITECTURES = (ArchitectureKind.LINEAR, ArchitectureKind.MLP, ArchitectureKind.CNN)


class GlobalStrategy(Enum):
    FEDAVG_ENSEMBLE = "fedavg_ensemble"
    MODE_OF_CLIENT_ENSEMBLES = "mode_of_client_ensembles"

class PartitionScheme(Enum):
    IID = "iid"
    DIRICHLET = "dirichlet"


@dataclass
class ClientState:
    client_id: int
    train_set: Dataset
    val_set: Dataset
    # locally trained ensemble from the latest round
    ensemble: EnsembleModel = None
    # latest model received from the server; local training starts from it
    global_model: 'GlobalModel' = None
    # held-out samples routed to this client for the prediction step
    test_set: Dataset = None


@dataclass(frozen=True)
class ClientUpdate:
    """parameters and architectures are keyed by ArchitectureKind, one entry per ensemble member."""
    client_id: int
    parameters: dict
    sample_count: int
    val_metrics: MetricsReport
    architectures: dict = field(default_factory=dict)
    member_val_metrics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class GlobalModel:
    parameters: dict
    ensemble: EnsembleModel
    strategy: GlobalStrategy = GlobalStrategy.FEDAVG_ENSEMBLE


@dataclass(frozen=True)
class RoundRecord:
    round: int
    client_metrics: tuple
    global_metrics: MetricsReport
    wall_time: float = 0.0

    def to_dict(self, include_wall_time: bool = False) -> dict:
        record = {
            'round': self.round,
            'clients': [{'client_id': client_id, 'val_metrics': metrics.to_dict()} for client_id, metrics in self.client_metrics],
            'global_metrics': self.global_metrics.to_dict(),
        }
        if include_wall_time:
            record['wall_time'] = self.wall_time
        return record


@dataclass(frozen=True)
class SyntheticSpec:
    per_class: int = 500
    dim: int = 16
    separation: float = 6.0


@dataclass(frozen=True)
class FederationConfig:
    dataset_path: str = None
    synthetic: SyntheticSpec = field(default_factory=SyntheticSpec)
    num_clients: int = 4
    rounds: int = 1
    strategy: GlobalStrategy = GlobalStrategy.FEDAVG_ENSEMBLE
    vote_method: VoteMethod = VoteMethod.VOTE
    vote_weighting: VoteWeighting = VoteWeighting.VALIDATION
    partition: PartitionScheme = PartitionScheme.IID
    dirichlet_alpha: float = 0.5
    train_fraction: float = 0.8
    val_fraction: float = 0.1
    hidden_width: int = 32
    train: TrainConfig = field(default_factory=TrainConfig)
    seed: int = 0
    output_dir: str = None
    parallel_clients: bool = False
    record_wall_time: bool = False
    architectures: tuple = DEFAULT_ARCHITECTURES

    def problems(self) -> list:
        problems = []
        if self.num_clients < 1:
            problems.append(f"num_clients must be >= 1, got {self.num_clients}")
        if self.rounds < 1:
            problems.append(f"rounds must be >= 1, got {self.rounds}")
        if not 0 < self.train_fraction < 1:
            problems.append(f"train_fraction must lie strictly between 0 and 1, got {self.train_fraction}")
        if not 0 < self.val_fraction < 1:
            problems.append(f"val_fraction must lie strictly between 0 and 1, got {self.val_fraction}")
        if not self.dirichlet_alpha > 0:
            problems.append(f"dirichlet_alpha must be > 0, got {self.dirichlet_alpha}")
        if self.hidden_width < 1:
            problems.append(f"hidden_width must be >= 1, got {self.hidden_width}")
        if not 0 <= self.seed < 2**64:
            problems.append(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.dataset_path is None:
            if self.synthetic.per_class < 1:
                problems.append(f"synthetic.per_class must be >= 1, got {self.synthetic.per_class}")
            if self.synthetic.dim < 1:
                problems.append(f"synthetic.dim must be >= 1, got {self.synthetic.dim}")
            elif ArchitectureKind.CNN in self.architectures:
                problem = cnn_input_problem((self.synthetic.dim,))
                if problem:
                    problems.append(f"synthetic.dim {self.synthetic.dim} cannot feed the CNN: {problem}")
            if not self.synthetic.separation > 0:
                problems.append(f"synthetic.separation must be > 0, got {self.synthetic.separation}")
        if not self.architectures:
            problems.append("architectures must name at least one architecture kind")
        return problems

    def dataset_problems(self, feature_shape: tuple) -> list:
        if ArchitectureKind.CNN not in self.architectures:
            return []
        problem = cnn_input_problem(feature_shape)
        return [f"dataset_path {self.dataset_path or '(in-memory dataset)'} cannot feed the CNN: {problem}"] if problem else []
