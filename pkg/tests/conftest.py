import pytest

from qfp import backend


@pytest.fixture(params=["numba", "numpy"])
def any_backend(request):
    """Run the test once per execution backend, restoring the default."""
    if request.param == "numba" and not backend.HAVE_NUMBA:
        pytest.skip("numba not installed")
    previous = backend.active()
    backend.set_backend(request.param)
    yield request.param
    backend.set_backend(previous)


@pytest.fixture
def numpy_backend():
    previous = backend.active()
    backend.set_backend("numpy")
    yield
    backend.set_backend(previous)
