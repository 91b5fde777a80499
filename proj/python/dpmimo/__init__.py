# Copyright (c) 2026 dpmimo authors
#
# SPDX-License-Identifier: Apache-2.0

"""Slot-level downlink simulator of 2-stream MIMO spatial multiplexing over
dual-polarized antenna subarrays."""

try:
    from dpmimo._dpmimo import *  # noqa: F401,F403
except ImportError:
    # development layout: the extension sits on PYTHONPATH next to the
    # CMake build tree instead of inside the installed package
    from _dpmimo import *  # noqa: F401,F403

__version__ = "0.1.0"
