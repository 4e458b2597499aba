import pytest

from mira_rules.core import DEFAULT_GESTURES, InductionConfig, Literal, Rule, RuleSet
from mira_rules.data import gesture_spec, split_fractions, synthesize


@pytest.fixture(scope="session")
def separable_splits():
    ds = synthesize(gesture_spec(samples_per_class_user=200, separation=5.0), seed=3)
    return split_fractions(ds, [0.6, 0.2, 0.2], seed=0)


@pytest.fixture
def swipe_rules():
    return RuleSet(
        (
            Rule((Literal("azimuth", "<=", -0.3),), "SwipeLeft"),
            Rule((Literal("azimuth", ">", 0.3),), "SwipeRight"),
            Rule((), "SwipeUp", "default"),
        ),
        InductionConfig(),
        DEFAULT_GESTURES,
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion reported in the summary")
    config._criteria = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        item.config._criteria.append((marker.args[0], rep.outcome.upper()))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not config._criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in config._criteria:
        label = {"PASSED": "PASS", "FAILED": "FAIL", "SKIPPED": "SKIP"}.get(outcome, outcome)
        terminalreporter.write_line(f"{label:4}  {name}")
