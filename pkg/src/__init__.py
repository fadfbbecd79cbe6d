"""hpd-depth: intrinsic data depth for samples of Hermitian positive definite matrices."""

__version__ = "0.1.0"
