"""
Utility functions shared by the command line, reports and scripts
"""

import logging
import os
from pathlib import Path
from typing import Optional, Sequence, Tuple

import pandas as pd

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
HANDLER_PREFIX = 'behaviours-'

logger = logging.getLogger(__name__)


def configure_logging(level="INFO", log_file: Optional[str] = None):
    """
    Install the project log format on the root logger (stderr, plus an
    optional file). Calling it again replaces only the handlers it added.
    """
    root = logging.getLogger()
    for handler in [h for h in root.handlers if (h.name or "").startswith(HANDLER_PREFIX)]:
        root.removeHandler(handler)
        handler.close()

    handlers = [logging.StreamHandler()]
    if log_file:
        os.makedirs(os.path.dirname(os.path.abspath(log_file)), exist_ok=True)
        handlers.append(logging.FileHandler(log_file))
    formatter = logging.Formatter(LOG_FORMAT)
    for i, handler in enumerate(handlers):
        handler.name = f"{HANDLER_PREFIX}{i}"
        handler.setFormatter(formatter)
        root.addHandler(handler)
    root.setLevel(level.upper() if isinstance(level, str) else level)


def save_dataframe(df: pd.DataFrame, filepath, description: str = "Table") -> bool:
    """Write a report table as CSV, creating parent directories; False if the write fails."""
    path = Path(filepath)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(path, index=False)
    except OSError as e:
        logger.error(f"Could not write {description.lower()} to {path}: {e}")
        return False
    logger.info(f"{description} ({len(df)} rows) written to {path}")
    return True


def load_dataframe(filepath) -> Optional[pd.DataFrame]:
    """
    Read a CSV written by save_dataframe. Words stay strings: 'ε' and empty
    cells are not turned into NaN. Returns None if the file cannot be read.
    """
    path = Path(filepath)
    try:
        df = pd.read_csv(path, keep_default_na=False)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        logger.error(f"Could not read {path}: {e}")
        return None
    logger.info(f"Read {len(df)} rows from {path}")
    return df


def parse_input_word(text: str) -> Tuple[str, ...]:
    """
    Input words on the command line: 'a.b.c' splits on dots, 'abc' into
    characters; '' and 'ε' are the empty word.
    """
    text = text.strip()
    if text in ("", "ε"):
        return ()
    if "." in text:
        return tuple(text.split("."))
    return tuple(text)


def format_input_word(w: Sequence[str]) -> str:
    """Inverse of parse_input_word for display; multi-character letters are dot-joined"""
    if not w:
        return "ε"
    if all(len(a) == 1 for a in w):
        return "".join(w)
    return ".".join(w)
