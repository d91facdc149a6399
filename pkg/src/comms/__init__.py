"""
Communication layer: matrix schemes, per-step masks and shared views.
"""

from src.comms.schemes import CommScheme, maybe_resample, off_diagonal_mean, sample_matrix
from src.comms.channel import CommChannel, SharedView, draw_mask, shared_view
