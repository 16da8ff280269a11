# utils/logger.py
import logging
import uuid
from typing import Any, Optional

LOG_FORMAT = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"

logger = logging.getLogger("pastnoc")


def configure_logging(log_file: Optional[str] = "pastnoc.log", level: int = logging.INFO) -> None:
    """Route every ``pastnoc`` and library logger to ``log_file`` (or stderr when None)."""
    if log_file:
        logging.basicConfig(filename=log_file, level=level, format=LOG_FORMAT, force=True)
    else:
        logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


def new_session_id() -> str:
    return str(uuid.uuid4())[:8]  # short random session id


def log_usage(tool_name: str, inputs: Any, outputs: Any = None, session_id: Optional[str] = None) -> str:
    session_id = session_id or new_session_id()
    logger.info(f"session={session_id} tool={tool_name} inputs={inputs} outputs={outputs}")
    return session_id
