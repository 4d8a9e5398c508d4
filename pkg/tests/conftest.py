import pytest

from fftstencil import _backend

BACKENDS = sorted(_backend.available())


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run the test once per importable kernel backend."""
    module = _backend.available()[request.param]
    monkeypatch.setattr(_backend, "active", module)
    return request.param
