from pubsub import pub
from GlobalUtils.globalUtils import ArgumentError, ClientTrainingError, EventsDirectory
from GlobalUtils.logger import logger
from DataHandler.Dataset import Dataset
from DataHandler.Partitioner import partition_clients, stratified_split
from Ensemble.EnsembleModel import build_ensemble
from Ensemble.EnsembleUtils import VoteMethod, VoteWeighting
from Federation.FederationUtils import ClientState, ClientUpdate, GlobalModel
from Metrics.Evaluation import evaluate_ensemble, evaluate_model
from Models.Master.MasterLearner import get_params, train_local
from Models.ModelUtils import TrainConfig
from Numerics.rngStream import RngStream


def distribute(data: Dataset, P: int, rng: RngStream, val_fraction: float = 0.1, dirichlet_alpha: float = None) -> list:
    """Deal the data to P clients, then carve a stratified validation split out of every shard."""
    partition = partition_clients(data, P, rng.child('partition'), dirichlet_alpha=dirichlet_alpha)
    clients = []
    for client_id, shard in enumerate(partition.client_shards):
        train_set, val_set = stratified_split(shard, 1.0 - val_fraction, rng.child('validation', client_id), require_all_classes=False)
        if len(train_set) == 0 or len(val_set) == 0:
            raise ArgumentError(f"FederatedClient - client {client_id} ended with {len(train_set)} training and {len(val_set)} validation samples")
        clients.append(ClientState(client_id=client_id, train_set=train_set, val_set=val_set))
        logger.info(f"FederatedClient - Client {client_id}: {len(train_set)} training / {len(val_set)} validation samples.")
    return clients

def training_stream(cfg: TrainConfig, round_index: int, client_id: int, kind) -> RngStream:
    return RngStream.named(cfg.seed, 'train', round_index, client_id, kind.value)

def client_round(client: ClientState, cfg: TrainConfig, round_index: int = 1,
                 vote_method: VoteMethod = VoteMethod.VOTE,
                 vote_weighting: VoteWeighting = VoteWeighting.VALIDATION) -> ClientUpdate:
    """Train every member on the client's shard, evaluate locally and package the update.

    Members start from the last global model the client received. The trained ensemble
    replaces client.ensemble.
    """
    if len(client.train_set) == 0 or len(client.val_set) == 0:
        raise ArgumentError(f"FederatedClient - client {client.client_id} needs non-empty training and validation sets")
    if client.global_model is None:
        raise ArgumentError(f"FederatedClient - client {client.client_id} has not received a global model to train from")
    try:
        trained = []
        for member in client.global_model.ensemble.members:
            stream = training_stream(cfg, round_index, client.client_id, member.kind)
            trained.append(train_local(member, client.train_set, cfg, stream))

        client.ensemble = build_ensemble(trained, client.val_set, vote_method, vote_weighting)
        update = ClientUpdate(
            client_id=client.client_id,
            parameters={member.kind: get_params(member) for member in trained},
            sample_count=len(client.train_set),
            val_metrics=evaluate_ensemble(client.ensemble, client.val_set),
            architectures={member.kind: member.architecture for member in trained},
            member_val_metrics={member.kind: evaluate_model(member, client.val_set) for member in trained},
        )
    except Exception as e:
        logger.error(f"FederatedClient - Client {client.client_id} failed in round {round_index}: {e}", exc_info=True)
        raise ClientTrainingError(client.client_id, e) from e

    logger.info(f"FederatedClient - Client {client.client_id} round {round_index}: ensemble validation accuracy {update.val_metrics.accuracy:.4f}.")
    return update


class FederatedClient:

    def __init__(self, state: ClientState, vote_method: VoteMethod = VoteMethod.VOTE,
                 vote_weighting: VoteWeighting = VoteWeighting.VALIDATION):
        self.state = state
        self.vote_method = vote_method
        self.vote_weighting = vote_weighting
        pub.subscribe(self.on_global_model, EventsDirectory.GLOBAL_MODEL_BROADCAST.value)

    @property
    def client_id(self) -> int:
        return self.state.client_id

    def on_global_model(self, global_model: GlobalModel):
        self.state.global_model = global_model

    def run_round(self, cfg: TrainConfig, round_index: int) -> ClientUpdate:
        return client_round(self.state, cfg, round_index, self.vote_method, self.vote_weighting)

    def send_update(self, update: ClientUpdate):
        pub.sendMessage(EventsDirectory.CLIENT_UPDATE_SENT.value, update=update)

    def detach(self):
        if pub.isSubscribed(self.on_global_model, EventsDirectory.GLOBAL_MODEL_BROADCAST.value):
            pub.unsubscribe(self.on_global_model, EventsDirectory.GLOBAL_MODEL_BROADCAST.value)
