"""
Views package initialization.
"""
