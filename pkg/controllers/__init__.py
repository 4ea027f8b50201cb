"""
Controllers package initialization.
"""
