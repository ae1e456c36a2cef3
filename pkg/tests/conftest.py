import pytest
from hypothesis import settings

from wgtune.simoracle import OracleConfig, collect
from wgtune.space import SampleTable, wg
from wgtune.synthgen import standard_scenarios
from wgtune.techniques import Corpus

settings.register_profile("default", deadline=None)
settings.load_profile("default")


def table_from(rows):
    """``{sid: {(c, r): [runtimes]}}`` -> SampleTable."""
    return SampleTable((sid, wg(*w), ts) for sid, sizes in rows.items() for w, ts in sizes.items())


@pytest.fixture(scope="session")
def scenarios():
    return standard_scenarios()


@pytest.fixture(scope="session")
def corpus(scenarios):
    table, refused = collect(scenarios, OracleConfig(noise_sigma=0.05, seed=1))
    return Corpus({s.id: s for s in scenarios}, table, refused)


@pytest.fixture(scope="session")
def quiet_corpus(scenarios):
    table, refused = collect(scenarios, OracleConfig(noise_sigma=0.0, seed=1, min_samples=1))
    return Corpus({s.id: s for s in scenarios}, table, refused)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
