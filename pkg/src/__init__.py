"""
FEM vs Kansa RBF benchmark source package
"""
