"""
FEM vs Kansa RBF benchmark suite
"""
