"""
Minimal reverse-mode differentiation core used by every learned component.
"""

from src.diffcore.tensor import Tape, Tensor, as_tensor, backward
from src.diffcore.params import ParamStore, ParamScope, init_gru, init_linear, init_lstm
from src.diffcore.nn import gaussian_nll, gru_cell, linear, lstm_cell
from src.diffcore.optim import AdamState, adam_step, clip_global_norm, global_norm
from src.diffcore.gradcheck import finite_diff_check
from src.diffcore.checkpoint import MAGIC, load_params, save_params
