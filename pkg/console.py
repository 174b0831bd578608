#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Console Logging
Status-line logging for the experiment runner (messages carry their own emoji).
"""

import logging
import sys

FORMAT = "%(message)s"
DEBUG_FORMAT = "%(name)s: %(message)s"


def setup_logging(verbose: bool = False, stream=None) -> logging.Logger:
    """Installs a single stream handler on the root logger."""
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_multact", False):
            root.removeHandler(handler)

    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(logging.Formatter(DEBUG_FORMAT if verbose else FORMAT))
    handler._multact = True
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if verbose else logging.INFO)
    return root
