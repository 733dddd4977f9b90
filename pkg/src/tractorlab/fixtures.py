"""
Location, loading and guarded writing of frozen fixture files.

Fixtures live in the package's ``fixture_data`` directory unless the
environment variable TRACTORLAB_FIXTURES names another directory.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

ENV_VAR = "TRACTORLAB_FIXTURES"
_PACKAGE_DIR = Path(__file__).resolve().parent / "fixture_data"


class FixtureExists(FileExistsError):
    pass


def fixture_dir() -> Path:
    override = os.environ.get(ENV_VAR)
    return Path(override) if override else _PACKAGE_DIR


def fixture_path(name: str) -> Path:
    return fixture_dir() / name


def load_fixture(name: str) -> dict:
    path = fixture_path(name)
    if not path.exists() and os.environ.get(ENV_VAR):
        # an override directory may hold only some files
        path = _PACKAGE_DIR / name
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_fixture(name: str, doc: dict, force: bool = False) -> Path:
    """Write a fixture; refuses to replace an existing file unless ``force``."""
    path = fixture_path(name)
    if path.exists() and not force:
        raise FixtureExists("%s exists; pass force=True (--force) to overwrite" % path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_json(doc), encoding="utf-8")
    return path
