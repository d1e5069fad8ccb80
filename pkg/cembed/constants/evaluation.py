"""
Clustering evaluation constants.
"""

# K-means over the test embeddings
KMEANS_MAX_ITER = 300
KMEANS_TOLERANCE = 1e-6
KMEANS_RESTARTS = 10
