import os
import tempfile
import pytest

# point the application log somewhere disposable before GlobalUtils.logger is imported
os.environ.setdefault('FEDVOTE_LOG_FILE', os.path.join(tempfile.gettempdir(), 'fedvote-tests.log'))

from pubsub import pub
from GlobalUtils.logger import setup_topics


@pytest.fixture(autouse=True)
def clean_message_bus():
    pub.unsubAll()
    setup_topics()
    yield
    pub.unsubAll()


@pytest.fixture(autouse=True)
def no_env_seed(monkeypatch):
    monkeypatch.delenv('FEDVOTE_SEED', raising=False)
