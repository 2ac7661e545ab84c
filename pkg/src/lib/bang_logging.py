#
# MIT License
#
# (C) Copyright 2026 Hewlett Packard Enterprise Development LP
#
# Permission is hereby granted, free of charge, to any person obtaining a
# copy of this software and associated documentation files (the "Software"),
# to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense,
# and/or sell copies of the Software, and to permit persons to whom the
# Software is furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included
# in all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR
# OTHER LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE,
# ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR
# OTHER DEALINGS IN THE SOFTWARE.
#
"""
This module provides logging utilities to generate and manage log IDs,
convert log levels from strings to integers, and configure the root logger
from the BANGKIT_LOG environment variable.
"""

import logging
import os
import uuid
from typing import Optional
from src.lib.bang_constants import DEFAULT_LOG_LEVEL, LOG_ENV_VAR, LOG_FORMAT


def get_log_id() -> str:
    """
    Generate a unique log ID that can be used to tie related log entries together.

    Returns:
        str: A unique 8-character string ID.
    """
    return str(uuid.uuid4())[:8]


def str_to_log_level(level: str) -> int:
    """
    Convert a string representation of a log level to its corresponding logging level constant.

    Args:
        level (str): The log level as a string, e.g., "info", "DEBUG", "error".

    Returns:
        int: The corresponding logging level constant from the logging module.
    """
    name_to_level = logging.getLevelNamesMapping()
    return name_to_level.get(level.upper(), logging.INFO)


def configure_logging(level: Optional[str] = None) -> int:
    """
    Configure the root logger to stream to stderr in the project format.

    Args:
        level (str, optional): Explicit level name. When None, the value of the
            BANGKIT_LOG environment variable is used, falling back to "info".

    Returns:
        int: The numeric log level that was applied.
    """
    if level is None:
        level = os.getenv(LOG_ENV_VAR, DEFAULT_LOG_LEVEL)
    log_level = str_to_log_level(level)

    root = logging.getLogger()
    if root.hasHandlers():
        root.handlers.clear()
    root.setLevel(log_level)
    stream_handler = logging.StreamHandler()
    stream_handler.setLevel(log_level)
    stream_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(stream_handler)
    return log_level
