"""
Test suite for the hybrid-execution workbench
"""
