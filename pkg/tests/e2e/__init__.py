"""
End-to-end reproduction tests of the hybrid-execution workbench
"""
