import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from GlobalUtils.globalUtils import ArgumentError, ShapeError, format_shape
from Numerics.rngStream import RngStream

# Tensors are plain float64 ndarrays; this alias only documents intent.
Tensor = np.ndarray


def as_tensor(values, shape=None) -> Tensor:
    tensor = np.array(values, dtype=np.float64)
    if shape is not None:
        shape = tuple(shape)
        if int(np.prod(shape, dtype=np.int64)) != tensor.size:
            raise ShapeError(f"TensorOps - cannot view {tensor.size} values as shape {format_shape(shape)}")
        tensor = tensor.reshape(shape)
    if not np.all(np.isfinite(tensor)):
        raise ArgumentError("TensorOps - tensor values must be finite (no NaN/Inf)")
    return tensor

def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"TensorOps - matmul shape mismatch: {format_shape(a.shape)} x {format_shape(b.shape)}")
    return a @ b

def _image_patches(images: Tensor, kh: int, kw: int) -> Tensor:
    # (B, h, w, c) -> (B, oh, ow, kh*kw*c), patch entries ordered (kh, kw, c)
    windows = sliding_window_view(images, (kh, kw), axis=(1, 2))
    windows = windows.transpose(0, 1, 2, 4, 5, 3)
    batch, oh, ow = windows.shape[:3]
    return windows.reshape(batch, oh, ow, kh * kw * images.shape[3])

def conv2d_valid_batch(images: Tensor, kernels: Tensor, bias: Tensor):
    """Valid, stride-1 cross-correlation over a batch of (h, w, c) images.

    Returns the (B, oh, ow, f) response and the patch matrix reused by the backward pass.
    """
    if images.ndim != 4 or kernels.ndim != 4:
        raise ShapeError(f"TensorOps - conv2d expects (B,h,w,c) input and (kh,kw,c,f) kernels, got {format_shape(images.shape)} and {format_shape(kernels.shape)}")
    kh, kw, channels, filters = kernels.shape
    if channels != images.shape[3]:
        raise ShapeError(f"TensorOps - conv2d channel mismatch: input {format_shape(images.shape[1:])}, kernels {format_shape(kernels.shape)}")
    if kh > images.shape[1] or kw > images.shape[2]:
        raise ShapeError(f"TensorOps - conv2d kernel {format_shape(kernels.shape)} larger than input {format_shape(images.shape[1:])}")
    if bias.shape != (filters,):
        raise ShapeError(f"TensorOps - conv2d bias shape {format_shape(bias.shape)} does not match {filters} filters")
    patches = _image_patches(images, kh, kw)
    response = patches @ kernels.reshape(kh * kw * channels, filters) + bias
    return response, patches

def conv2d_valid(image: Tensor, kernels: Tensor, bias: Tensor) -> Tensor:
    if image.ndim != 3:
        raise ShapeError(f"TensorOps - conv2d expects an (h,w,c) input, got {format_shape(image.shape)}")
    response, _ = conv2d_valid_batch(image[np.newaxis], kernels, bias)
    return response[0]

def _pool_windows(activations: Tensor) -> Tensor:
    batch, h, w, filters = activations.shape
    ph, pw = h // 2, w // 2
    cropped = activations[:, :2 * ph, :2 * pw, :]
    return cropped.reshape(batch, ph, 2, pw, 2, filters).transpose(0, 1, 3, 5, 2, 4).reshape(batch, ph, pw, filters, 4)

def maxpool2_batch(activations: Tensor):
    """2x2 non-overlapping max pooling; a trailing odd row/column is dropped.

    Returns the pooled tensor and the winning position (first maximum) of every window.
    """
    if activations.ndim != 4 or activations.shape[1] < 2 or activations.shape[2] < 2:
        raise ShapeError(f"TensorOps - maxpool2 needs at least a 2x2 spatial extent, got {format_shape(activations.shape[1:])}")
    windows = _pool_windows(activations)
    winners = windows.argmax(axis=-1)
    pooled = np.take_along_axis(windows, winners[..., np.newaxis], axis=-1)[..., 0]
    return pooled, winners

def maxpool2_backward(pooled_grad: Tensor, winners: Tensor, input_shape) -> Tensor:
    batch, ph, pw, filters = pooled_grad.shape
    window_grad = np.zeros((batch, ph, pw, filters, 4))
    np.put_along_axis(window_grad, winners[..., np.newaxis], pooled_grad[..., np.newaxis], axis=-1)
    spread = window_grad.reshape(batch, ph, pw, filters, 2, 2).transpose(0, 1, 4, 2, 5, 3).reshape(batch, 2 * ph, 2 * pw, filters)
    grad = np.zeros(input_shape)
    grad[:, :2 * ph, :2 * pw, :] = spread
    return grad

def maxpool2(activation: Tensor) -> Tensor:
    if activation.ndim != 3:
        raise ShapeError(f"TensorOps - maxpool2 expects an (h,w,f) input, got {format_shape(activation.shape)}")
    pooled, _ = maxpool2_batch(activation[np.newaxis])
    return pooled[0]

def relu(x: Tensor) -> Tensor:
    return np.maximum(x, 0.0)

def relu_grad(x: Tensor) -> Tensor:
    # subgradient at exactly 0 is 0
    return (x > 0).astype(np.float64)

def softmax(logits: Tensor) -> Tensor:
    if logits.shape[-1] < 1:
        raise ShapeError("TensorOps - softmax needs at least one logit")
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    exps = np.exp(shifted)
    return exps / np.sum(exps, axis=-1, keepdims=True)

def rng_normal(rng: RngStream, n: int, mean: float = 0.0, std: float = 1.0) -> Tensor:
    if std < 0:
        raise ArgumentError(f"TensorOps - rng_normal std must be >= 0, got {std}")
    if n < 0:
        raise ArgumentError(f"TensorOps - rng_normal count must be >= 0, got {n}")
    if std == 0:
        return np.full(n, float(mean))
    return mean + std * rng.normal(n)
