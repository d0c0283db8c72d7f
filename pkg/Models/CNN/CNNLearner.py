import numpy as np
from GlobalUtils.globalUtils import ArgumentError
from Models.ModelUtils import Architecture, cnn_input_problem, image_shape
from Numerics.tensorOps import conv2d_valid_batch, maxpool2_backward, maxpool2_batch, matmul, relu, relu_grad


class CNNLearner:
    """conv (valid, stride 1) -> ReLU -> 2x2 max pool -> flatten -> dense softmax head."""

    def _geometry(self, arch: Architecture):
        height, width, channels = image_shape(arch.input_shape)
        conv_h = height - arch.kernel_size + 1
        conv_w = width - arch.kernel_size + 1
        return (height, width, channels), (conv_h, conv_w), (conv_h // 2) * (conv_w // 2) * arch.conv_filters

    def validate_architecture(self, arch: Architecture):
        problem = cnn_input_problem(arch.input_shape, arch.kernel_size)
        if problem:
            raise ArgumentError(f"CNNLearner - {problem}")

    def layer_shapes(self, arch: Architecture) -> list:
        (_, _, channels), _, pooled_size = self._geometry(arch)
        return [
            ('kernels', (arch.kernel_size, arch.kernel_size, channels, arch.conv_filters)),
            ('conv_bias', (arch.conv_filters,)),
            ('dense_weights', (pooled_size, arch.num_classes)),
            ('dense_bias', (arch.num_classes,)),
        ]

    def logits(self, arch: Architecture, layers: dict, batch: np.ndarray):
        images = batch.reshape((batch.shape[0],) + image_shape(arch.input_shape))
        response, patches = conv2d_valid_batch(images, layers['kernels'], layers['conv_bias'])
        activated = relu(response)
        pooled, winners = maxpool2_batch(activated)
        flat = pooled.reshape(batch.shape[0], -1)
        logits = matmul(flat, layers['dense_weights']) + layers['dense_bias']
        cache = {'patches': patches, 'response': response, 'winners': winners, 'pooled_shape': pooled.shape, 'flat': flat}
        return logits, cache

    def backward(self, arch: Architecture, layers: dict, cache: dict, logits_grad: np.ndarray) -> dict:
        flat_grad = matmul(logits_grad, layers['dense_weights'].T)
        pooled_grad = flat_grad.reshape(cache['pooled_shape'])
        response_grad = maxpool2_backward(pooled_grad, cache['winners'], cache['response'].shape) * relu_grad(cache['response'])
        patches = cache['patches']
        patch_rows = patches.reshape(-1, patches.shape[-1])
        response_rows = response_grad.reshape(-1, response_grad.shape[-1])
        return {
            'kernels': matmul(patch_rows.T, response_rows).reshape(layers['kernels'].shape),
            'conv_bias': response_rows.sum(axis=0),
            'dense_weights': matmul(cache['flat'].T, logits_grad),
            'dense_bias': logits_grad.sum(axis=0),
        }
