"""
Recurrent value-based controllers: Q-networks, mixing, replay and learners.
"""

from src.controllers.qnet import RecurrentQNet, q_forward
from src.controllers.mixer import QMixer, mix
from src.controllers.replay import EpisodeBatch, EpisodeRecord, EpisodeReplay, pad_batch
from src.controllers.exploration import EpsilonSchedule, select_action
from src.controllers.reward import RewardStandardizer, standardize_reward
from src.controllers.learners import QLearner, QOptimizer, iql_train, qmix_train, target_update, td_targets
