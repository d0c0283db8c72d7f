import numpy as np
from Models.ModelUtils import Architecture
from Numerics.tensorOps import matmul


class LinearLearner:

    def layer_shapes(self, arch: Architecture) -> list:
        return [
            ('weights', (arch.input_size, arch.num_classes)),
            ('bias', (arch.num_classes,)),
        ]

    def validate_architecture(self, arch: Architecture):
        pass

    def logits(self, arch: Architecture, layers: dict, batch: np.ndarray):
        inputs = batch.reshape(batch.shape[0], arch.input_size)
        return matmul(inputs, layers['weights']) + layers['bias'], {'inputs': inputs}

    def backward(self, arch: Architecture, layers: dict, cache: dict, logits_grad: np.ndarray) -> dict:
        return {
            'weights': matmul(cache['inputs'].T, logits_grad),
            'bias': logits_grad.sum(axis=0),
        }
