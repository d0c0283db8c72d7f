import numpy as np
from pubsub import pub
from GlobalUtils.globalUtils import ArgumentError, CompatibilityError, EventsDirectory
from GlobalUtils.logger import logger
from Ensemble.EnsembleModel import EnsembleModel, ensemble_predict
from Ensemble.EnsembleUtils import VoteMethod, VoteWeights, vote_matrix
from Federation.FederationUtils import ClientUpdate, GlobalModel, GlobalStrategy
from Models.Master.MasterLearner import architecture_for, init_model
from Models.ModelUtils import BaseLearner, ParameterVector
from Numerics.rngStream import RngStream


def _check_compatible(reference: ClientUpdate, update: ClientUpdate):
    if set(update.parameters) != set(reference.parameters):
        raise CompatibilityError(
            f"AggregationServer - client {update.client_id} sent architectures {sorted(kind.value for kind in update.parameters)}, "
            f"expected {sorted(kind.value for kind in reference.parameters)}")
    for kind, params in update.parameters.items():
        try:
            reference.parameters[kind].check_averageable(params)
        except CompatibilityError as e:
            raise CompatibilityError(f"AggregationServer - client {update.client_id} sent unusable {kind.value} parameters: {e}")
        if update.architectures and reference.architectures and update.architectures.get(kind) != reference.architectures.get(kind):
            raise CompatibilityError(f"AggregationServer - client {update.client_id} trained a differently shaped {kind.value} model")
    if update.sample_count <= 0:
        raise CompatibilityError(f"AggregationServer - client {update.client_id} reported {update.sample_count} training samples")

def weighted_average(vectors: list, weights: list) -> np.ndarray:
    """Sample-weighted mean, accumulated in the given order.

    Written as reference + sum_i (w_i / W)(theta_i - reference) so the mean of equal vectors is
    exactly that vector, then clipped to the per-coordinate [min, max] of the inputs.
    """
    total = float(sum(weights))
    reference = vectors[0]
    acc = np.zeros_like(reference)
    for vector, weight in zip(vectors, weights):
        acc += (weight / total) * (vector - reference)
    stacked = np.stack(vectors)
    return np.clip(reference + acc, stacked.min(axis=0), stacked.max(axis=0))

def aggregate_fedavg(updates, vote_method: VoteMethod = VoteMethod.VOTE) -> GlobalModel:
    """Per architecture kind: theta_g = sum_i w_i theta_i / sum_i w_i with w_i the client's sample count."""
    updates = sorted(updates, key=lambda update: update.client_id)
    if not updates:
        raise ArgumentError("AggregationServer - nothing to aggregate")
    reference = updates[0]
    for update in updates[1:]:
        _check_compatible(reference, update)
    if reference.sample_count <= 0:
        raise CompatibilityError(f"AggregationServer - client {reference.client_id} reported {reference.sample_count} training samples")

    weights = [update.sample_count for update in updates]
    parameters, members = {}, []
    for kind in reference.parameters:
        averaged = weighted_average([update.parameters[kind].values for update in updates], weights)
        parameters[kind] = ParameterVector(kind, averaged)
        if kind in reference.architectures:
            members.append(BaseLearner(reference.architectures[kind], parameters[kind]))

    ensemble = EnsembleModel(tuple(members), VoteWeights.uniform(len(members)), vote_method) if members else None
    logger.info(f"AggregationServer - Averaged {len(updates)} client updates over {sum(weights)} samples.")
    return GlobalModel(parameters=parameters, ensemble=ensemble, strategy=GlobalStrategy.FEDAVG_ENSEMBLE)

def global_predict(global_model: GlobalModel, clients, batch: np.ndarray) -> np.ndarray:
    if global_model.strategy == GlobalStrategy.FEDAVG_ENSEMBLE:
        return ensemble_predict(global_model.ensemble, batch)

    clients = sorted(clients, key=lambda client: client.client_id)
    if not clients:
        raise ArgumentError("AggregationServer - the mode of client ensembles needs at least one client")
    missing = [client.client_id for client in clients if client.ensemble is None]
    if missing:
        raise ArgumentError(f"AggregationServer - clients {missing} have no trained ensemble")
    predictions = np.stack([ensemble_predict(client.ensemble, batch) for client in clients])
    return vote_matrix(predictions, VoteWeights.uniform(len(clients)), clients[0].ensemble.num_classes)


class AggregationServer:
    """Server end of the message contract: queues client updates, averages them and broadcasts the result."""

    def __init__(self, strategy: GlobalStrategy = GlobalStrategy.FEDAVG_ENSEMBLE, vote_method: VoteMethod = VoteMethod.VOTE):
        self.strategy = GlobalStrategy(strategy)
        self.vote_method = VoteMethod(vote_method)
        self.update_queue = []
        self.global_model = None
        pub.subscribe(self.on_client_update, EventsDirectory.CLIENT_UPDATE_SENT.value)

    def on_client_update(self, update: ClientUpdate):
        if any(queued.client_id == update.client_id for queued in self.update_queue):
            raise CompatibilityError(f"AggregationServer - duplicate update from client {update.client_id} in one round")
        self.update_queue.append(update)
        logger.info(f"AggregationServer - Received update from client {update.client_id} ({update.sample_count} samples).")

    def initialize_global_model(self, architectures, input_shape: tuple, num_classes: int, hidden_width: int, seed: int) -> GlobalModel:
        members = []
        for kind in architectures:
            arch = architecture_for(kind, input_shape, num_classes, hidden_width)
            members.append(init_model(arch, RngStream.named(seed, 'init', kind.value)))
        ensemble = EnsembleModel(tuple(members), VoteWeights.uniform(len(members)), self.vote_method)
        self.global_model = GlobalModel({member.kind: member.params for member in members}, ensemble, self.strategy)
        return self.global_model

    def aggregate(self, round_index: int) -> GlobalModel:
        try:
            averaged = aggregate_fedavg(self.update_queue, self.vote_method)
        except Exception as e:
            logger.error(f"AggregationServer - Aggregation failed in round {round_index}: {e}", exc_info=True)
            raise
        finally:
            self.update_queue = []
        self.global_model = GlobalModel(averaged.parameters, averaged.ensemble, self.strategy)
        logger.info(f"AggregationServer - Round {round_index} global model ready ({self.strategy.value}).")
        return self.global_model

    def broadcast(self):
        pub.sendMessage(EventsDirectory.GLOBAL_MODEL_BROADCAST.value, global_model=self.global_model)

    def detach(self):
        if pub.isSubscribed(self.on_client_update, EventsDirectory.CLIENT_UPDATE_SENT.value):
            pub.unsubscribe(self.on_client_update, EventsDirectory.CLIENT_UPDATE_SENT.value)
