import numpy as np
from Models.ModelUtils import Architecture
from Numerics.tensorOps import matmul, relu, relu_grad


class MLPLearner:
    """One hidden ReLU layer of `hidden_width` units followed by a dense softmax head."""

    def layer_shapes(self, arch: Architecture) -> list:
        return [
            ('hidden_weights', (arch.input_size, arch.hidden_width)),
            ('hidden_bias', (arch.hidden_width,)),
            ('output_weights', (arch.hidden_width, arch.num_classes)),
            ('output_bias', (arch.num_classes,)),
        ]

    def validate_architecture(self, arch: Architecture):
        pass

    def logits(self, arch: Architecture, layers: dict, batch: np.ndarray):
        inputs = batch.reshape(batch.shape[0], arch.input_size)
        pre_activation = matmul(inputs, layers['hidden_weights']) + layers['hidden_bias']
        hidden = relu(pre_activation)
        logits = matmul(hidden, layers['output_weights']) + layers['output_bias']
        return logits, {'inputs': inputs, 'pre_activation': pre_activation, 'hidden': hidden}

    def backward(self, arch: Architecture, layers: dict, cache: dict, logits_grad: np.ndarray) -> dict:
        hidden_grad = matmul(logits_grad, layers['output_weights'].T) * relu_grad(cache['pre_activation'])
        return {
            'hidden_weights': matmul(cache['inputs'].T, hidden_grad),
            'hidden_bias': hidden_grad.sum(axis=0),
            'output_weights': matmul(cache['hidden'].T, logits_grad),
            'output_bias': logits_grad.sum(axis=0),
        }
