"""
Hybrid-execution multi-agent reinforcement learning workbench
"""
