import pytest

from occurlab import corpus


@pytest.fixture(scope="session")
def nqueens():
    return corpus.nqueens_program()
