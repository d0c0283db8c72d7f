import json
from dataclasses import replace
import numpy as np
import pytest

from GlobalUtils.globalUtils import ArgumentError, ClientTrainingError, CompatibilityError, ConfigError
from DataHandler.Dataset import Dataset, LabelSpace
from DataHandler.SyntheticData import generate_blobs
from Ensemble.EnsembleModel import EnsembleModel, ensemble_predict, load_ensemble
from Federation.Client.FederatedClient import FederatedClient, client_round, distribute
from Federation.FederationUtils import (
    ClientState, ClientUpdate, FederationConfig, GlobalModel, GlobalStrategy, PartitionScheme, SyntheticSpec,
)
from Federation.Master.MasterFederation import ENSEMBLE_ROW, GLOBAL_ROW, MasterFederation, run_federation
from Federation.RoundLog.RoundLogger import ROUNDS_FILE, checkpoint_path
from Federation.Server.AggregationServer import AggregationServer, aggregate_fedavg, global_predict
from Metrics.ConfusionMatrix import confusion, report
from Models.Master.MasterLearner import architecture_for, set_params
from Models.ModelUtils import Architecture, ArchitectureKind, BaseLearner, ParameterVector, TrainConfig
from Numerics.rngStream import RngStream

EMPTY_REPORT = report(confusion([], [], LabelSpace()))
SMALL_RUN = dict(synthetic=SyntheticSpec(per_class=100, dim=16, separation=6.0), train=TrainConfig(epochs=5))


def update(client_id: int, vectors: dict, sample_count: int) -> ClientUpdate:
    parameters = {kind: ParameterVector(kind, values) for kind, values in vectors.items()}
    return ClientUpdate(client_id=client_id, parameters=parameters, sample_count=sample_count, val_metrics=EMPTY_REPORT)

def constant_ensemble(class_index: int, dim: int = 3) -> EnsembleModel:
    arch = Architecture(ArchitectureKind.LINEAR, (dim,))
    bias = np.zeros(4)
    bias[class_index] = 10.0
    return EnsembleModel((BaseLearner(arch, ParameterVector(arch.kind, np.concatenate([np.zeros(dim * 4), bias]))),))

def bare_client(client_id: int, ensemble: EnsembleModel = None) -> ClientState:
    placeholder = Dataset(np.zeros((1, 3)), [0])
    return ClientState(client_id=client_id, train_set=placeholder, val_set=placeholder, ensemble=ensemble)

def counted_dataset(counts) -> Dataset:
    labels = np.repeat(np.arange(len(counts)), counts)
    return Dataset(np.arange(labels.size, dtype=np.float64).reshape(-1, 1), labels)

def blob_clients(P: int, seed: int = 0, separation: float = 10.0, per_class: int = 200) -> list:
    data = generate_blobs(RngStream.named(seed, 'data'), per_class, 16, separation)
    clients = distribute(data, P, RngStream.named(seed, 'distribute'))
    server = AggregationServer()
    global_model = server.initialize_global_model((ArchitectureKind.LINEAR, ArchitectureKind.MLP, ArchitectureKind.CNN),
                                                  (16,), 4, 32, seed)
    for client in clients:
        client.global_model = global_model
    server.detach()
    return clients


class TestAggregation:

    def test_weighted_mean_example(self):
        averaged = aggregate_fedavg([update(0, {ArchitectureKind.LINEAR: [1.0, 2.0]}, 1),
                                     update(1, {ArchitectureKind.LINEAR: [3.0, 4.0]}, 3)])
        np.testing.assert_array_equal(averaged.parameters[ArchitectureKind.LINEAR].values, [2.5, 3.5])

    def test_oracle_on_random_update_sets(self):
        rng = np.random.default_rng(7)
        kinds = (ArchitectureKind.LINEAR, ArchitectureKind.MLP)
        for _ in range(100):
            P = int(rng.integers(1, 9))
            lengths = {kind: int(rng.integers(1, 30)) for kind in kinds}
            vectors = [{kind: rng.normal(size=lengths[kind]) for kind in kinds} for _ in range(P)]
            counts = rng.integers(1, 500, size=P)
            averaged = aggregate_fedavg([update(i, vectors[i], int(counts[i])) for i in range(P)])
            for kind in kinds:
                stacked = np.stack([vector[kind] for vector in vectors])
                oracle = (counts[:, np.newaxis] * stacked).sum(axis=0) / counts.sum()
                result = averaged.parameters[kind].values
                np.testing.assert_allclose(result, oracle, rtol=0, atol=1e-12)
                assert np.all(result >= stacked.min(axis=0)) and np.all(result <= stacked.max(axis=0))

    def test_equal_weights_give_plain_mean(self):
        rng = np.random.default_rng(8)
        vectors = [rng.normal(size=12) for _ in range(5)]
        averaged = aggregate_fedavg([update(i, {ArchitectureKind.MLP: v}, 40) for i, v in enumerate(vectors)])
        np.testing.assert_allclose(averaged.parameters[ArchitectureKind.MLP].values, np.mean(vectors, axis=0), rtol=0, atol=1e-12)

    def test_average_of_equals_is_exact(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            theta = rng.normal(size=25) * 10 ** rng.uniform(-3, 3)
            updates = [update(i, {ArchitectureKind.CNN: theta}, int(rng.integers(1, 1000))) for i in range(int(rng.integers(1, 9)))]
            np.testing.assert_array_equal(aggregate_fedavg(updates).parameters[ArchitectureKind.CNN].values, theta)

    def test_permuting_clients(self):
        rng = np.random.default_rng(10)
        updates = [update(i, {ArchitectureKind.LINEAR: rng.normal(size=9)}, int(rng.integers(1, 50))) for i in range(6)]
        reference = aggregate_fedavg(updates).parameters[ArchitectureKind.LINEAR].values
        for _ in range(10):
            shuffled = [updates[i] for i in rng.permutation(6)]
            np.testing.assert_array_equal(aggregate_fedavg(shuffled).parameters[ArchitectureKind.LINEAR].values, reference)

    def test_length_mismatch_names_client(self):
        with pytest.raises(CompatibilityError, match="client 1"):
            aggregate_fedavg([update(0, {ArchitectureKind.LINEAR: [1.0, 2.0]}, 1),
                              update(1, {ArchitectureKind.LINEAR: [1.0]}, 1)])

    def test_kind_mismatch_names_client(self):
        with pytest.raises(CompatibilityError, match="client 2"):
            aggregate_fedavg([update(0, {ArchitectureKind.LINEAR: [1.0]}, 1),
                              update(2, {ArchitectureKind.MLP: [1.0]}, 1)])

    def test_architecture_order_does_not_matter(self):
        first = update(0, {ArchitectureKind.LINEAR: [1.0, 2.0], ArchitectureKind.MLP: [3.0]}, 1)
        second = update(1, {ArchitectureKind.MLP: [5.0], ArchitectureKind.LINEAR: [3.0, 4.0]}, 1)
        averaged = aggregate_fedavg([first, second]).parameters
        np.testing.assert_array_equal(averaged[ArchitectureKind.LINEAR].values, [2.0, 3.0])
        np.testing.assert_array_equal(averaged[ArchitectureKind.MLP].values, [4.0])

    def test_nothing_to_aggregate(self):
        with pytest.raises(ArgumentError):
            aggregate_fedavg([])


class TestGlobalPredict:

    def test_mode_of_client_ensembles(self):
        clients = [bare_client(0, constant_ensemble(2)), bare_client(1, constant_ensemble(2)), bare_client(2, constant_ensemble(0))]
        model = GlobalModel({}, None, GlobalStrategy.MODE_OF_CLIENT_ENSEMBLES)
        np.testing.assert_array_equal(global_predict(model, clients, np.zeros((4, 3))), [2, 2, 2, 2])

    def test_mode_of_single_client(self):
        client = bare_client(0, constant_ensemble(3))
        model = GlobalModel({}, None, GlobalStrategy.MODE_OF_CLIENT_ENSEMBLES)
        batch = np.zeros((2, 3))
        np.testing.assert_array_equal(global_predict(model, [client], batch), ensemble_predict(client.ensemble, batch))

    def test_mode_needs_clients(self):
        with pytest.raises(ArgumentError):
            global_predict(GlobalModel({}, None, GlobalStrategy.MODE_OF_CLIENT_ENSEMBLES), [], np.zeros((1, 3)))

    def test_fedavg_of_identical_clients_matches_each_client(self):
        clients = blob_clients(1)
        trained = client_round(clients[0], TrainConfig(epochs=2), vote_method='vote')
        members = tuple(set_params(member, trained.parameters[member.kind]) for member in clients[0].ensemble.members)
        identical = [replace(trained, client_id=i) for i in range(4)]
        global_model = aggregate_fedavg(identical)
        batch = np.random.default_rng(0).normal(scale=5.0, size=(200, 16))
        np.testing.assert_array_equal(global_predict(global_model, [], batch), ensemble_predict(EnsembleModel(members), batch))


class TestClients:

    def test_distribute_brain_mri_fixture(self):
        data = counted_dataset((1621, 1645, 1775, 2000))
        clients = distribute(data, 4, RngStream.named(0, 'distribute'))
        per_class = np.array([[a + b for a, b in zip(c.train_set.class_counts(), c.val_set.class_counts())] for c in clients])
        assert (per_class.max(axis=0) - per_class.min(axis=0)).max() <= 1
        assert per_class.sum() == 7041
        for client in clients:
            shard = len(client.train_set) + len(client.val_set)
            assert abs(len(client.val_set) - 0.1 * shard) <= 4

    def test_single_client_owns_everything(self):
        data = counted_dataset((20, 20, 20, 20))
        (client,) = distribute(data, 1, RngStream(0))
        assert len(client.train_set) + len(client.val_set) == 80

    def test_distribute_is_deterministic(self):
        data = counted_dataset((30, 30, 30, 30))
        first, second = distribute(data, 3, RngStream(5)), distribute(data, 3, RngStream(5))
        for a, b in zip(first, second):
            assert a.train_set == b.train_set and a.val_set == b.val_set

    def test_client_round(self):
        (client,) = blob_clients(1)
        result = client_round(client, TrainConfig())
        assert result.sample_count == len(client.train_set)
        assert set(result.parameters) == {ArchitectureKind.LINEAR, ArchitectureKind.MLP, ArchitectureKind.CNN}
        for member in client.ensemble.members:
            assert set_params(member, result.parameters[member.kind]).params == member.params
            assert result.member_val_metrics[member.kind].accuracy >= 0.9
        assert result.val_metrics.num_samples == len(client.val_set)

    def test_failures_carry_the_client_id(self):
        (client,) = blob_clients(1)
        wrong = architecture_for(ArchitectureKind.LINEAR, (8,), 4)
        member = BaseLearner(wrong, ParameterVector(wrong.kind, np.zeros(36)))
        client.global_model = GlobalModel({}, EnsembleModel((member,)))
        with pytest.raises(ClientTrainingError) as caught:
            client_round(client, TrainConfig())
        assert caught.value.client_id == 0

    def test_needs_a_global_model(self):
        (client,) = blob_clients(1)
        client.global_model = None
        with pytest.raises(ArgumentError):
            client_round(client, TrainConfig())


class TestMessageContract:

    def test_broadcast_reaches_clients(self):
        clients = blob_clients(2)
        server = AggregationServer()
        listeners = [FederatedClient(state) for state in clients]
        server.initialize_global_model((ArchitectureKind.LINEAR,), (16,), 4, 32, 3)
        server.broadcast()
        assert all(state.global_model is server.global_model for state in clients)
        for listener in listeners:
            listener.detach()
        server.detach()

    def test_duplicate_update_rejected(self):
        server = AggregationServer()
        server.on_client_update(update(0, {ArchitectureKind.LINEAR: [1.0]}, 1))
        with pytest.raises(CompatibilityError):
            server.on_client_update(update(0, {ArchitectureKind.LINEAR: [2.0]}, 1))
        server.detach()


class TestRunFederation:

    def test_round_structure(self, tmp_path):
        records = run_federation(FederationConfig(output_dir=str(tmp_path), **SMALL_RUN))
        assert len(records) == 1
        assert records[0].round == 1
        assert [client_id for client_id, _ in records[0].client_metrics] == [0, 1, 2, 3]
        lines = (tmp_path / ROUNDS_FILE).read_text().splitlines()
        assert len(lines) == 1
        assert 'wall_time' not in json.loads(lines[0])
        ensemble = load_ensemble(checkpoint_path(tmp_path, 1))
        assert [member.kind for member in ensemble.members] == [ArchitectureKind.LINEAR, ArchitectureKind.MLP, ArchitectureKind.CNN]

    def test_zero_learning_rate_keeps_global_parameters(self):
        master = MasterFederation(FederationConfig(rounds=2, **SMALL_RUN))
        try:
            master.prepare()
            master.initialize()
            master.run_round(1)
            after_first = dict(master.global_model.parameters)
            master.run_round(2, replace(master.train_config, learning_rate=0.0))
            for kind, params in master.global_model.parameters.items():
                assert params == after_first[kind]
        finally:
            master.close()

    def test_rounds_file_is_reproducible(self, tmp_path):
        outputs = []
        for name, parallel in (('first', False), ('second', False), ('parallel', True)):
            run_federation(FederationConfig(output_dir=str(tmp_path / name), rounds=2, parallel_clients=parallel, **SMALL_RUN))
            outputs.append((tmp_path / name / ROUNDS_FILE).read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]

    def test_wall_time_opt_in(self, tmp_path):
        run_federation(FederationConfig(output_dir=str(tmp_path), record_wall_time=True, **SMALL_RUN))
        assert json.loads((tmp_path / ROUNDS_FILE).read_text())['wall_time'] >= 0

    def test_mode_strategy_and_client_predictions(self):
        master = MasterFederation(FederationConfig(strategy=GlobalStrategy.MODE_OF_CLIENT_ENSEMBLES, **SMALL_RUN))
        try:
            records = master.run()
            predictions = master.predict_clients()
        finally:
            master.close()
        assert records[0].global_metrics.accuracy >= 0.8
        assert sorted(predictions) == [0, 1, 2, 3]
        assert sum(len(p) for p in predictions.values()) == len(master.test_set)

    def test_dirichlet_partition(self):
        records = run_federation(FederationConfig(partition=PartitionScheme.DIRICHLET, dirichlet_alpha=100.0, **SMALL_RUN))
        assert len(records[0].client_metrics) == 4

    def test_config_problems_reported_together(self):
        with pytest.raises(ConfigError) as caught:
            MasterFederation(FederationConfig(num_clients=0, rounds=0, train_fraction=1.0))
        assert len(caught.value.problems) == 3

    @pytest.mark.parametrize("dim", [8, 12, 13])
    def test_synthetic_dim_too_small_for_cnn(self, dim):
        config = FederationConfig(synthetic=SyntheticSpec(per_class=40, dim=dim))
        assert any(problem.startswith('synthetic.dim') for problem in config.problems())
        with pytest.raises(ConfigError, match='synthetic.dim'):
            MasterFederation(config)

    def test_small_dim_is_fine_without_cnn(self):
        config = FederationConfig(synthetic=SyntheticSpec(per_class=40, dim=12),
                                  architectures=(ArchitectureKind.LINEAR, ArchitectureKind.MLP))
        assert config.problems() == []

    def test_dataset_too_small_for_cnn(self):
        data = generate_blobs(RngStream.named(0, 'data'), per_class=20, dim=12, separation=6.0)
        master = MasterFederation(FederationConfig(train=TrainConfig(epochs=1)), data)
        try:
            with pytest.raises(ConfigError, match='dataset_path') as caught:
                master.run()
        finally:
            master.close()
        assert '3x4' in caught.value.problems[0]
        assert master.clients == []

    def test_desk_scale_run(self):
        master = MasterFederation(FederationConfig())
        try:
            records = master.run()
            rows = master.summary_rows()
        finally:
            master.close()
        assert records[0].global_metrics.accuracy >= 0.90
        names = [name for name, _, _ in rows]
        assert names == [GLOBAL_ROW, 'LINEAR', 'MLP', 'CNN', ENSEMBLE_ROW]
        member_accuracy = max(validation.accuracy for name, _, validation in rows[1:4])
        assert rows[-1][2].accuracy >= member_accuracy - 0.02
