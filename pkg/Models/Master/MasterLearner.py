import numpy as np
from GlobalUtils.globalUtils import ArgumentError, CompatibilityError, ShapeError, format_shape
from GlobalUtils.logger import logger
from DataHandler.Dataset import Dataset
from Models.ModelUtils import (
    INIT_WEIGHT_STD, Architecture, ArchitectureKind, BaseLearner, ParameterVector, TrainConfig,
    argmax_lowest, cross_entropy, one_hot,
)
from Models.Linear.LinearLearner import LinearLearner
from Models.MLP.MLPLearner import MLPLearner
from Models.CNN.CNNLearner import CNNLearner
from Numerics.rngStream import RngStream
from Numerics.tensorOps import rng_normal, softmax


class MasterLearner:

    def __init__(self):
        self.linear = LinearLearner()
        self.mlp = MLPLearner()
        self.cnn = CNNLearner()

    def learner_for(self, kind: ArchitectureKind):
        return getattr(self, ArchitectureKind(kind).value.lower())

    ############################
    ### PARAMETER BOOKKEEPING ###
    ############################

    def parameter_count(self, arch: Architecture) -> int:
        return sum(int(np.prod(shape)) for _, shape in self.learner_for(arch.kind).layer_shapes(arch))

    def unflatten(self, arch: Architecture, params: ParameterVector) -> dict:
        self.check_params(arch, params)
        layers, offset = {}, 0
        for name, shape in self.learner_for(arch.kind).layer_shapes(arch):
            size = int(np.prod(shape))
            layers[name] = params.values[offset:offset + size].reshape(shape)
            offset += size
        return layers

    def flatten(self, arch: Architecture, layers: dict) -> ParameterVector:
        ordered = [np.asarray(layers[name], dtype=np.float64).reshape(-1) for name, _ in self.learner_for(arch.kind).layer_shapes(arch)]
        return ParameterVector(arch.kind, np.concatenate(ordered))

    def check_params(self, arch: Architecture, params: ParameterVector):
        if params.arch_kind != arch.kind:
            raise CompatibilityError(f"MasterLearner - parameters for {params.arch_kind.value} cannot drive a {arch.kind.value} model")
        expected = self.parameter_count(arch)
        if len(params) != expected:
            raise CompatibilityError(f"MasterLearner - {arch.kind.value} model needs {expected} parameters, got {len(params)}")

    ###########################
    ### MODEL CONSTRUCTION ###
    ###########################

    def init_model(self, arch: Architecture, rng: RngStream) -> BaseLearner:
        """Weights ~ Normal(0, 0.05), biases 0, drawn layer by layer in flattening order."""
        learner = self.learner_for(arch.kind)
        learner.validate_architecture(arch)
        layers = {}
        for name, shape in learner.layer_shapes(arch):
            size = int(np.prod(shape))
            if 'bias' in name:
                layers[name] = np.zeros(shape)
            else:
                layers[name] = rng_normal(rng, size, 0.0, INIT_WEIGHT_STD).reshape(shape)
        model = BaseLearner(arch, self.flatten(arch, layers))
        logger.info(f"MasterLearner - Initialised {arch.kind.value} model with {len(model.params)} parameters.")
        return model

    def get_params(self, model: BaseLearner) -> ParameterVector:
        return model.params

    def set_params(self, model: BaseLearner, params: ParameterVector) -> BaseLearner:
        self.check_params(model.architecture, params)
        return BaseLearner(model.architecture, ParameterVector(params.arch_kind, params.values))

    ##########################
    ### FORWARD / BACKWARD ###
    ##########################

    def _check_batch(self, arch: Architecture, batch: np.ndarray) -> np.ndarray:
        batch = np.asarray(batch, dtype=np.float64)
        if batch.ndim < 1 or tuple(batch.shape[1:]) != arch.input_shape:
            raise ShapeError(f"MasterLearner - batch shape {format_shape(batch.shape)} does not match {arch.kind.value} input shape (B)x{format_shape(arch.input_shape)}")
        return batch

    def forward(self, model: BaseLearner, batch: np.ndarray) -> np.ndarray:
        arch = model.architecture
        batch = self._check_batch(arch, batch)
        logits, _ = self.learner_for(arch.kind).logits(arch, self.unflatten(arch, model.params), batch)
        return softmax(logits)

    def predict_classes(self, model: BaseLearner, batch: np.ndarray) -> np.ndarray:
        return argmax_lowest(self.forward(model, batch))

    def loss_and_gradient(self, model: BaseLearner, batch: np.ndarray, labels):
        arch = model.architecture
        batch = self._check_batch(arch, batch)
        labels = np.asarray(labels, dtype=np.int64).reshape(-1)
        if batch.shape[0] == 0:
            raise ArgumentError("MasterLearner - gradient of an empty batch is undefined")
        if labels.size != batch.shape[0]:
            raise ShapeError(f"MasterLearner - {batch.shape[0]} samples but {labels.size} labels")
        learner = self.learner_for(arch.kind)
        layers = self.unflatten(arch, model.params)
        logits, cache = learner.logits(arch, layers, batch)
        probs = softmax(logits)
        # d(mean CE)/d(logits) for a softmax head
        logits_grad = (probs - one_hot(labels, arch.num_classes)) / batch.shape[0]
        grads = learner.backward(arch, layers, cache, logits_grad)
        return cross_entropy(probs, labels), self.flatten(arch, grads)

    def gradient(self, model: BaseLearner, batch: np.ndarray, labels) -> ParameterVector:
        _, grad = self.loss_and_gradient(model, batch, labels)
        return grad

    ################
    ### TRAINING ###
    ################

    def train_local(self, model: BaseLearner, train: Dataset, cfg: TrainConfig, rng: RngStream = None) -> BaseLearner:
        """Mini-batch SGD over shuffled batches; returns a new learner carrying its per-epoch loss history."""
        if len(train) == 0:
            raise ArgumentError(f"MasterLearner - cannot train {model.kind.value} on an empty dataset")
        self._check_batch(model.architecture, train.features[:1])
        rng = rng or RngStream.named(cfg.seed, 'train', model.kind.value)

        values = model.params.values.copy()
        current = model
        history = []
        for epoch in range(cfg.epochs):
            order = rng.permutation(len(train))
            epoch_loss = 0.0
            for start in range(0, len(train), cfg.batch_size):
                batch_indices = order[start:start + cfg.batch_size]
                loss, grad = self.loss_and_gradient(current, train.features[batch_indices], train.labels[batch_indices])
                values = values - cfg.learning_rate * grad.values
                current = BaseLearner(model.architecture, ParameterVector(model.kind, values))
                epoch_loss += loss * batch_indices.size
            history.append(epoch_loss / len(train))
            logger.debug(f"MasterLearner - {model.kind.value} epoch {epoch + 1}/{cfg.epochs} train loss {history[-1]:.6f}")

        logger.info(f"MasterLearner - Trained {model.kind.value} on {len(train)} samples for {cfg.epochs} epochs, final loss {history[-1]:.6f}.")
        return BaseLearner(model.architecture, current.params, tuple(model.loss_history) + tuple(history))


master_learner = MasterLearner()

def init_model(arch: Architecture, rng: RngStream) -> BaseLearner:
    return master_learner.init_model(arch, rng)

def forward(model: BaseLearner, batch: np.ndarray) -> np.ndarray:
    return master_learner.forward(model, batch)

def predict_classes(model: BaseLearner, batch: np.ndarray) -> np.ndarray:
    return master_learner.predict_classes(model, batch)

def gradient(model: BaseLearner, batch: np.ndarray, labels) -> ParameterVector:
    return master_learner.gradient(model, batch, labels)

def train_local(model: BaseLearner, train: Dataset, cfg: TrainConfig, rng: RngStream = None) -> BaseLearner:
    return master_learner.train_local(model, train, cfg, rng)

def get_params(model: BaseLearner) -> ParameterVector:
    return master_learner.get_params(model)

def set_params(model: BaseLearner, params: ParameterVector) -> BaseLearner:
    return master_learner.set_params(model, params)

def parameter_count(arch: Architecture) -> int:
    return master_learner.parameter_count(arch)

def architecture_for(kind: ArchitectureKind, input_shape: tuple, num_classes: int, hidden_width: int = 32) -> Architecture:
    return Architecture(kind=kind, input_shape=tuple(input_shape), num_classes=num_classes, hidden_width=hidden_width)
