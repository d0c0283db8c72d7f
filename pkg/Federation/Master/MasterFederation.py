import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
import numpy as np
from pubsub import pub
from GlobalUtils.globalUtils import ArgumentError, ConfigError, EventsDirectory
from GlobalUtils.logger import logger, setup_topics
from DataHandler.Dataset import Dataset
from DataHandler.DatasetStore import load_dataset
from DataHandler.Partitioner import stratified_split
from DataHandler.SyntheticData import generate_blobs
from Ensemble.EnsembleModel import ensemble_loss
from Federation.Client.FederatedClient import FederatedClient, distribute
from Federation.FederationUtils import FederationConfig, GlobalStrategy, PartitionScheme, RoundRecord
from Federation.RoundLog.RoundLogger import RoundLogger
from Federation.Server.AggregationServer import AggregationServer, global_predict
from Metrics.Evaluation import evaluate_ensemble, evaluate_model, evaluate_predictions
from Models.ModelUtils import TrainConfig
from Numerics.rngStream import RngStream

GLOBAL_ROW = 'Global Model (FL)'
ENSEMBLE_ROW = 'Ensemble Model'


class MasterFederation:
    """Runs the three phases: deal the data to clients, train locally, aggregate and redistribute."""

    def __init__(self, config: FederationConfig, data: Dataset = None):
        problems = config.problems()
        if problems:
            raise ConfigError(problems)
        setup_topics()
        self.config = config
        self.train_config = replace(config.train, seed=config.seed)
        self.data = data
        self.server = AggregationServer(config.strategy, config.vote_method)
        self.round_logger = RoundLogger(config.output_dir, config.record_wall_time) if config.output_dir else None
        self.clients = []
        self.records = []
        self.train_set = None
        self.test_set = None

    ###################
    ### DATA PHASE ###
    ###################

    def load_data(self) -> Dataset:
        if self.data is None and not self.config.dataset_path:
            blobs = self.config.synthetic
            self.data = generate_blobs(RngStream.named(self.config.seed, 'data'), blobs.per_class, blobs.dim, blobs.separation)
            return self.data
        data = self.data if self.data is not None else load_dataset(self.config.dataset_path)
        problems = self.config.dataset_problems(data.feature_shape)
        if problems:
            raise ConfigError(problems)
        self.data = data
        return self.data

    def prepare(self):
        data = self.load_data()
        self.train_set, self.test_set = stratified_split(data, self.config.train_fraction, RngStream.named(self.config.seed, 'split'))
        alpha = self.config.dirichlet_alpha if self.config.partition == PartitionScheme.DIRICHLET else None
        states = distribute(self.train_set, self.config.num_clients, RngStream.named(self.config.seed, 'distribute'),
                            self.config.val_fraction, alpha)
        for state in states:
            state.test_set = self.test_set.subset(np.arange(state.client_id, len(self.test_set), self.config.num_clients))
        self.clients = [FederatedClient(state, self.config.vote_method, self.config.vote_weighting) for state in states]
        logger.info(f"MasterFederation - Prepared {len(self.clients)} clients; train {len(self.train_set)}, test {len(self.test_set)}.")

    @property
    def client_states(self) -> list:
        return [client.state for client in self.clients]

    ####################
    ### ROUND PHASES ###
    ####################

    def initialize(self):
        self.server.initialize_global_model(self.config.architectures, self.train_set.feature_shape,
                                            self.train_set.label_space.N, self.config.hidden_width, self.config.seed)
        self.server.broadcast()

    def _train_clients(self, cfg: TrainConfig, round_index: int) -> list:
        if self.config.parallel_clients and len(self.clients) > 1:
            with ThreadPoolExecutor(max_workers=len(self.clients)) as executor:
                return list(executor.map(lambda client: client.run_round(cfg, round_index), self.clients))
        return [client.run_round(cfg, round_index) for client in self.clients]

    def run_round(self, round_index: int, cfg: TrainConfig = None) -> RoundRecord:
        cfg = cfg or self.train_config
        started = time.perf_counter()
        updates = self._train_clients(cfg, round_index)
        for client, update in sorted(zip(self.clients, updates), key=lambda pair: pair[0].client_id):
            client.send_update(update)
        global_model = self.server.aggregate(round_index)
        self.server.broadcast()

        global_metrics = self.evaluate_global(self.test_set)
        wall_time = time.perf_counter() - started
        record = RoundRecord(
            round=round_index,
            client_metrics=tuple((update.client_id, update.val_metrics) for update in updates),
            global_metrics=global_metrics,
            wall_time=wall_time,
        )
        logger.info(f"MasterFederation - Round {round_index} ({global_model.strategy.value}) global accuracy {global_metrics.accuracy:.4f}, wall time {wall_time:.2f}s.")
        pub.sendMessage(EventsDirectory.ROUND_COMPLETED.value, record=record)
        self.records.append(record)
        return record

    def run(self) -> list:
        try:
            if not self.clients:
                self.prepare()
            self.initialize()
            for round_index in range(1, self.config.rounds + 1):
                self.run_round(round_index)
            return list(self.records)
        except Exception as e:
            logger.error(f"MasterFederation - Federation run failed: {e}", exc_info=True)
            raise

    def close(self):
        self.server.detach()
        for client in self.clients:
            client.detach()
        if self.round_logger:
            self.round_logger.detach()

    ##################
    ### EVALUATION ###
    ##################

    @property
    def global_model(self):
        return self.server.global_model

    def _global_loss(self, data: Dataset) -> float:
        if self.global_model.strategy == GlobalStrategy.FEDAVG_ENSEMBLE:
            return ensemble_loss(self.global_model.ensemble, data)
        return float(np.mean([ensemble_loss(state.ensemble, data) for state in self.client_states]))

    def evaluate_global(self, data: Dataset):
        if len(data) == 0:
            return evaluate_predictions(data, [], 0.0)
        predictions = global_predict(self.global_model, self.client_states, data.features)
        return evaluate_predictions(data, predictions, self._global_loss(data))

    def predict_clients(self) -> dict:
        predictions = {}
        for state in self.client_states:
            if len(state.test_set) == 0:
                predictions[state.client_id] = np.zeros(0, dtype=np.int64)
                continue
            predictions[state.client_id] = global_predict(self.global_model, self.client_states, state.test_set.features)
        return predictions

    def summary_rows(self) -> list:
        """(row, training report, validation report) triples in table order."""
        if not self.records:
            raise ArgumentError("MasterFederation - no completed round to summarise")
        representative = self.client_states[0]
        client_train = representative.train_set
        rows = [(GLOBAL_ROW, self.evaluate_global(self.train_set), self.evaluate_global(self.test_set))]
        for member in representative.ensemble.members:
            rows.append((member.kind.value, evaluate_model(member, client_train), evaluate_model(member, self.test_set)))
        rows.append((ENSEMBLE_ROW, evaluate_ensemble(representative.ensemble, client_train),
                     evaluate_ensemble(representative.ensemble, self.test_set)))
        return rows


def run_federation(config: FederationConfig, data: Dataset = None) -> list:
    master = MasterFederation(config, data)
    try:
        return master.run()
    finally:
        master.close()
