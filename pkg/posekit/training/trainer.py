import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from posekit.exceptions import DivergenceDetected, InsufficientData, InvalidConfig
from posekit.losses.compositional import stack_ground_truth
from posekit.losses.variants import Variant, VariantLoss, get_variant
from posekit.training.regressor import ToyRegressor
from posekit.training.synth import SynthDataset

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    """
    SGD settings.

    Parameters
    ----------
    epochs : int
    lr : float
        Base learning rate; multiplied by 0.1 at every epoch in `lr_steps`.
    batch_size : int
    momentum, weight_decay : float
    lr_steps : tuple of int
        Epochs (1-based) from which the rate drops by another factor 10.
    balanced_batches : bool
        Half 2D and half 3D samples in every mini-batch.
    seed : int
        Seeds the weight initialization and the batch order.
    init_scale : float
    divergence_factor : float
        Training stops with DivergenceDetected once the loss exceeds this
        multiple of the initial loss.
    shared_delta_stats : bool
        Derive pair-delta stats from joint stats instead of fitting them.
    variant_lr : dict
        Base learning rate per variant name, replacing `lr` for that variant.
        The compositional losses sum over their pairs, so larger pair sets
        take proportionally larger steps at the same rate.
    """

    epochs: int = 50
    lr: float = 0.01
    batch_size: int = 64
    momentum: float = 0.0
    weight_decay: float = 0.0
    lr_steps: tuple = ()
    balanced_batches: bool = False
    seed: int = 0
    init_scale: float = 0.01
    divergence_factor: float = 1e6
    shared_delta_stats: bool = False
    variant_lr: dict = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.variant_lr, dict):
            raise InvalidConfig(f"[!] variant_lr must map variant names to rates, got {self.variant_lr!r}.")
        rates = {}
        for name, rate in self.variant_lr.items():
            get_variant(name)
            if isinstance(rate, bool) or not isinstance(rate, (int, float)) or not rate >= 0.0:
                raise InvalidConfig(f"[!] Learning rate for variant '{name}' must be a number >= 0, got {rate!r}.")
            rates[name] = float(rate)
        object.__setattr__(self, "variant_lr", rates)
        object.__setattr__(self, "lr_steps", tuple(int(e) for e in self.lr_steps))
        if self.epochs < 0 or self.batch_size < 1:
            raise InvalidConfig(f"[!] epochs must be >= 0 and batch_size >= 1, got {self.epochs}, {self.batch_size}.")
        if self.lr < 0 or self.weight_decay < 0 or not 0.0 <= self.momentum < 1.0:
            raise InvalidConfig("[!] lr and weight_decay must be >= 0 and momentum in [0, 1).")
        if self.balanced_batches and self.batch_size < 2:
            raise InvalidConfig("[!] Balanced batches need batch_size >= 2.")

    def base_lr(self, variant: str | None = None) -> float:
        return self.variant_lr.get(variant, self.lr)

    def lr_at(self, epoch: int, variant: str | None = None) -> float:
        return self.base_lr(variant) * 0.1 ** sum(1 for step in self.lr_steps if epoch >= step)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["lr_steps"] = list(self.lr_steps)
        data["variant_lr"] = dict(self.variant_lr)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "TrainConfig":
        unknown = sorted(set(data) - set(cls.__dataclass_fields__))
        if unknown:
            raise InvalidConfig(f"[!] Unknown training config keys: {unknown}.")
        return cls(**data)


@dataclass(frozen=True, eq=False)
class TrainResult:
    """
    Trained model and diagnostics.

    `loss_curve[0]` is the mean per-sample training loss before any update and
    `loss_curve[e]` the same quantity after epoch e.
    """

    model: ToyRegressor
    loss: VariantLoss
    loss_curve: list
    instrumentation: dict = field(default_factory=dict)

    @property
    def variant(self) -> Variant:
        return self.loss.variant

    def predict_joints(self, features) -> np.ndarray:
        """Native working-frame joints, shape (N, K, dims)."""
        return self.loss.to_joints(self.model.predict(features))


class Trainer:
    def __init__(
        self,
        dataset: SynthDataset,
        variant: Variant | str,
        config: TrainConfig | None = None,
        debug: bool = False,
    ):
        """
        SGD on one variant's loss over a synthetic training split.

        Parameters
        ----------
        dataset : SynthDataset
            Training split; stats and whitening are fitted on it.
        variant : Variant or str
            Which output and loss to train.
        config : TrainConfig, optional
        debug : bool
            If True, log the loss after every epoch.
        """
        self.dataset = dataset
        self.variant = get_variant(variant) if isinstance(variant, str) else variant
        self.config = TrainConfig() if config is None else config
        self.debug = debug

        if len(dataset) < 2:
            raise InsufficientData(f"[!] Need at least 2 training samples, got {len(dataset)}.")
        is_3d = dataset.is_3d
        self.mixed = not bool(is_3d.all())
        if self.mixed and is_3d.sum() < 2:
            raise InsufficientData("[!] Mixed training needs at least 2 3D samples to fit z statistics.")
        if self.config.balanced_batches and (is_3d.all() or not is_3d.any()):
            raise InvalidConfig("[!] Balanced batches need both 2D and 3D samples.")

    def _prepare(self):
        self.loss = VariantLoss.fit(
            self.variant,
            self.dataset.topology,
            self.dataset.poses,
            allow_mixed=self.mixed,
            shared_delta_stats=self.config.shared_delta_stats,
        )
        dims = self.loss.dims
        self.targets, self.is_3d = stack_ground_truth(self.dataset.poses, dims=dims)
        self.model = ToyRegressor(
            num_features=self.dataset.features.shape[1],
            num_joints=self.dataset.topology.num_joints,
            dims=dims,
            seed=self.config.seed,
            init_scale=self.config.init_scale,
        ).fit_whitening(self.dataset.features)
        self.whitened = self.model.whiten(self.dataset.features)
        self.rng = np.random.default_rng(self.config.seed)
        self.velocity = [np.zeros_like(p) for p in self.model.parameters()]
        self.z_grad_from_2d = 0.0

    def _mean_loss(self) -> float:
        batch = self.loss.batch(self.model.forward_whitened(self.whitened), self.targets, self.is_3d)
        return batch.value / len(self.dataset)

    def _batches(self) -> list[np.ndarray]:
        size = self.config.batch_size
        if not self.config.balanced_batches:
            order = self.rng.permutation(len(self.dataset))
            return [order[i:i + size] for i in range(0, len(order), size)]

        planar = self.rng.permutation(np.flatnonzero(~self.is_3d))
        spatial = self.rng.permutation(np.flatnonzero(self.is_3d))
        half = size // 2
        num_batches = -(-len(self.dataset) // size)
        batches = []
        for b in range(num_batches):
            take_2d = np.take(planar, np.arange(b * half, (b + 1) * half), mode="wrap")
            take_3d = np.take(spatial, np.arange(b * (size - half), (b + 1) * (size - half)), mode="wrap")
            batches.append(np.concatenate([take_2d, take_3d]))
        return batches

    def _step(self, indices: np.ndarray, lr: float):
        whitened = self.whitened[indices]
        outputs = self.model.forward_whitened(whitened)
        batch = self.loss.batch(outputs, self.targets[indices], self.is_3d[indices])

        planar = ~self.is_3d[indices]
        if self.loss.dims == 3 and planar.any():
            self.z_grad_from_2d = max(self.z_grad_from_2d, float(np.abs(batch.grad[planar, :, 2]).max()))

        grads = self.model.gradients(whitened, batch.grad / len(indices))
        for param, grad, velocity in zip(self.model.parameters(), grads, self.velocity):
            if self.config.weight_decay:
                grad = grad + self.config.weight_decay * param
            velocity *= self.config.momentum
            velocity += grad
            param -= lr * velocity

    def _check_divergence(self, value: float, initial: float, epoch: int):
        limit = self.config.divergence_factor * max(initial, np.finfo(float).tiny)
        if not np.isfinite(value) or value > limit or not self.model.is_finite():
            raise DivergenceDetected(
                f"[!] Training diverged at epoch {epoch}: loss {value:.6g} against initial {initial:.6g}."
            )

    def _debug_display(self, epoch: int, value: float, lr: float):
        if self.debug:
            logger.info("[%s] epoch %d/%d lr %.3g loss %.6g", self.variant.name, epoch, self.config.epochs, lr, value)

    def train(self) -> TrainResult:
        """
        Run the training loop.

        1. Fit output/pair stats and the input whitening on the training split.
        2. Record the initial loss.
        3. For every epoch: shuffle (or balance) the batches, take one SGD step
           per batch, record the epoch loss and check for divergence.

        Returns
        -------
        TrainResult
        """
        self._prepare()
        initial = self._mean_loss()
        curve = [initial]
        for epoch in range(1, self.config.epochs + 1):
            lr = self.config.lr_at(epoch, self.variant.name)
            for indices in self._batches():
                self._step(indices, lr)
            value = self._mean_loss()
            self._check_divergence(value, initial, epoch)
            curve.append(value)
            self._debug_display(epoch, value, lr)

        instrumentation = dict(self.loss.instrumentation())
        instrumentation["z_grad_from_2d"] = self.z_grad_from_2d
        return TrainResult(model=self.model, loss=self.loss, loss_curve=curve, instrumentation=instrumentation)


def train(
    dataset: SynthDataset,
    variant: Variant | str,
    epochs: int = 50,
    lr: float = 0.01,
    seed: int = 0,
    **options,
) -> TrainResult:
    """Train a toy regressor on `dataset` under one variant's loss; extra options go to TrainConfig."""
    config = TrainConfig(epochs=epochs, lr=lr, seed=seed, **options)
    return Trainer(dataset, variant, config).train()
