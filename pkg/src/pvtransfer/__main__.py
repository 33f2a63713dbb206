"""python -m pvtransfer entry point."""
from .cli import entrypoint

entrypoint()
