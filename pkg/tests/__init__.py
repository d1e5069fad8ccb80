"""
Combinatorial embedding toolkit tests.
"""
