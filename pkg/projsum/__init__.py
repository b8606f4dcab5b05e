# Sums of two random projections: samplers, Jacobi correspondence, limit shapes, edge statistics
__version__ = "0.3.0"
