import socket
from pathlib import Path

import pytest

from scriptflow.registry import load_catalog
from scriptflow.wire import parse_document_strict

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "scriptflow" / "agents" / "fixtures"

_real_connect = socket.socket.connect


def _loopback_only(self, address, *args, **kwargs):
    # unix sockets pass a path; those are local by definition
    if isinstance(address, tuple):
        host = address[0]
        if host not in ("127.0.0.1", "::1", "localhost"):
            raise RuntimeError(f"network egress blocked in tests: {address!r}")
    return _real_connect(self, address, *args, **kwargs)


@pytest.fixture(autouse=True)
def no_egress(monkeypatch):
    """The whole suite must run without external network access."""
    monkeypatch.setattr(socket.socket, "connect", _loopback_only)


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def scene_docs():
    return {
        name: parse_document_strict((FIXTURES / f"{name}.pscript.json").read_text())
        for name in ("truss", "umbrella", "bridge")
    }
