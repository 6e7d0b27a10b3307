from .protocol import AdapterState, serve

__version__ = "0.1.0"
__all__ = ["AdapterState", "serve"]
