"""
Predictive model of teammates' observations and its per-agent imputation instances.
"""

from src.worldmodel.model import LOGVAR_MAX, LOGVAR_MIN, ModelLoss, ModelOutput, PredictiveModel, model_forward, model_loss
from src.worldmodel.buffer import ModelBuffer, ModelEpisode
from src.worldmodel.instance import AgentModelInstance, instance_reset, instance_step, rollout_predict
from src.worldmodel.trainer import ModelTrainResult, ModelTrainer, train_model_step
