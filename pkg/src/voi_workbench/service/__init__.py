from .app import DEFAULT_PORT, create_app
from .sessions import Session, SessionStore

__all__ = ["DEFAULT_PORT", "create_app", "Session", "SessionStore"]
