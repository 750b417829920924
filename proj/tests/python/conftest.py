import os
import pathlib

import pytest

SOURCE = pathlib.Path(os.environ.get("AUCTIONMETRICS_SOURCE", pathlib.Path(__file__).resolve().parents[2]))


@pytest.fixture(scope="session")
def source_dir():
    return SOURCE


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("AUCTIONMETRICS_CLI")
    if not path or not os.path.exists(path):
        pytest.skip("command-line tool not built")
    return path
