"""
DefChar Retrieval

Content-based retrieval of irregular patterns (defects, infections, ice
patches) using morphological defect characteristics, with the leave-one-out
mAP@K benchmark and raw-image / LBP baselines.
"""

__version__ = "0.1.0"
__author__ = "DefChar Retrieval Team"
__email__ = "contact@defchar-retrieval.org"
