import pytest

# criterion number -> (passed, message), filled by the acceptance tests
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion.

    The test calls ``criterion(n, message)`` up front; the outcome is decided by
    whether the test body finishes without raising.
    """
    state = {}

    def start(n, message):
        state["n"], state["msg"] = n, message

    yield start
    if "n" in state:
        rep = getattr(request.node, "rep_call", None)
        ok = rep is not None and rep.passed
        # parametrized criteria pass only if every case does
        prev = ACCEPTANCE.get(state["n"], (True, ""))[0]
        ACCEPTANCE[state["n"]] = (prev and ok, state["msg"])
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {state['n']}: {state['msg']}")


@pytest.hookimpl(wrapper=True, tryfirst=True)
def pytest_runtest_makereport(item, call):
    rep = yield
    if rep.when == "call":
        item.rep_call = rep
    return rep


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, msg = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n:>2}: {msg}")
