import sys

import hypothesis
import pytest

# Thread timing makes per-example deadlines meaningless here; example counts
# are kept moderate so the suite stays quick.
hypothesis.settings.register_profile(
    "stealpool",
    deadline=None,
    max_examples=60,
    derandomize=True,
)
hypothesis.settings.load_profile("stealpool")


def pytest_addoption(parser):
    parser.addoption(
        "--switch-interval",
        type=float,
        default=None,
        help="run the whole suite under this interpreter thread-switch "
             "interval (e.g. 1e-6) to flush out interleaving bugs",
    )


@pytest.fixture(scope="session", autouse=True)
def _switch_interval(request):
    interval = request.config.getoption("--switch-interval")
    if interval is None:
        yield
        return
    old = sys.getswitchinterval()
    sys.setswitchinterval(interval)
    try:
        yield
    finally:
        sys.setswitchinterval(old)
