"""HTTP session API, on-disk persistence, and the headless CLI."""

from .app import create_app
from .store import SessionStore

__all__ = ["create_app", "SessionStore"]
