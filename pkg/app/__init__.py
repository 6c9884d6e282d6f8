"""
Two-qubit spin-boson ground state - App Package
"""
