"""
Input-construction strategies for the controllers.
"""

from src.strategies.inputs import (
    JOINT_STRATEGIES,
    TrainingDropout,
    build_exec_input,
    build_train_input,
    input_dim,
    zero_filled,
)
