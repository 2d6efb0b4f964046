# Copyright 2024 The SteerNeedle Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

from pathlib import Path
from typing import Dict

__version__ = "0.1.0"

# Keys that may be overridden from a .steerneedlerc file in the home directory.
_RC_KEYS = ("DEFAULT_THREADS", "DEFAULT_TIME_BUDGET")


def _read_rc_file(path: Path) -> Dict[str, str]:
    """Parses KEY=VALUE lines from an rc file, ignoring unknown keys."""
    values: Dict[str, str] = {}
    if not path.exists():
        return values
    with open(path, "r") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            key, value = line.split("=", 1)
            if key.strip() in _RC_KEYS:
                values[key.strip()] = value.strip()
    return values


# We first check if the user has a .steerneedlerc file in their home directory. If
# so, its values take precedence over the built-in defaults used by the CLI.
_RC_FILE = Path.home() / ".steerneedlerc"
RC_DEFAULTS = _read_rc_file(_RC_FILE)


__all__ = [
    "__version__",
    "RC_DEFAULTS",
]
