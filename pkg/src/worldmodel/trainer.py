"""
Supervised training of the predictive model on buffered episodes.
"""
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from src.diffcore.optim import AdamState, adam_step, clip_global_norm, global_norm
from src.diffcore.tensor import Tape, backward
from src.worldmodel.buffer import ModelBuffer, ModelEpisode
from src.worldmodel.model import PredictiveModel, model_loss


@dataclass(frozen=True)
class ModelTrainResult:
    """
    @param loss - Mean NLL per step before the update; None while warming up
    @param warming_up - True when the buffer could not fill a batch
    @param grad_norm - Global gradient norm before clipping
    """
    loss: Optional[float]
    warming_up: bool
    grad_norm: Optional[float] = None


class ModelTrainer:
    """
    Optimizer state and hyperparameters of one predictive model.

    @param model - Model to train
    @param lr - Adam learning rate
    @param grad_clip - Global norm ceiling
    @param batch_size - Episodes per step
    """
    def __init__(self, model: PredictiveModel, lr: float = 1e-3, grad_clip: float = 1.0, batch_size: int = 32):
        self.model = model
        self.lr = lr
        self.grad_clip = grad_clip
        self.batch_size = batch_size
        self.adam = AdamState.for_params(model.params)
        self.steps = 0

    def train_on_batch(self, episodes: Sequence[ModelEpisode]) -> ModelTrainResult:
        """One BPTT pass, clip and Adam step on the given episodes."""
        with Tape() as tape:
            record = model_loss(self.model, [e.as_pair() for e in episodes])
        grads = backward(tape, record.loss, self.model.params)
        norm = global_norm(grads)
        grads = clip_global_norm(grads, self.grad_clip)
        adam_step(self.model.params, grads, self.adam, self.lr)
        self.steps += 1
        return ModelTrainResult(loss=record.loss.item(), warming_up=False, grad_norm=norm)


def train_model_step(trainer: ModelTrainer, buffer: ModelBuffer, rng: np.random.Generator) -> ModelTrainResult:
    """
    Sample a batch of whole episodes and take one training step.

    @param trainer - Model and optimizer
    @param buffer - Episode source
    @param rng - Sampling stream
    @return Loss record, or a warm-up signal with no parameter change
    """
    if len(buffer) < trainer.batch_size:
        return ModelTrainResult(loss=None, warming_up=True)
    return trainer.train_on_batch(buffer.sample(trainer.batch_size, rng))
