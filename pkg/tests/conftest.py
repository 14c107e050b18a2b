import time

import pytest

from horolab.harness import resolve_config, run


@pytest.fixture(scope="session")
def preset_run(tmp_path_factory):
    """Run a shipped preset once per session and cache (outcome, elapsed)."""
    cache = {}

    def _get(name):
        if name not in cache:
            out_dir = tmp_path_factory.mktemp(name)
            t0 = time.monotonic()
            outcome = run(resolve_config(name), out_dir)
            cache[name] = (outcome, time.monotonic() - t0)
        return cache[name]

    return _get
