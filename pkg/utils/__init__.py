"""
Utilities package initialization.
"""