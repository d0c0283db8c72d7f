import logging
import os
from pubsub import pub
from dotenv import load_dotenv

load_dotenv()

# Setup for the general application logger
logger = logging.getLogger('fedvote')
app_handler = logging.FileHandler(os.getenv('FEDVOTE_LOG_FILE', 'app.log'))
app_handler.setLevel(logging.DEBUG)
app_formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
app_handler.setFormatter(app_formatter)
logger.addHandler(app_handler)
logger.setLevel(os.getenv('FEDVOTE_LOG_LEVEL', 'INFO').upper())


def _global_model_broadcast(global_model):
    """The server's aggregated model, pushed to every client."""

def _client_update_sent(update):
    """One client's trained parameters, sample count and validation report."""

def _round_completed(record):
    """The RoundRecord closing a communication round."""

TOPIC_PROTOTYPES = {
    'global_model_broadcast': _global_model_broadcast,
    'client_update_sent': _client_update_sent,
    'round_completed': _round_completed,
}

def setup_topics():
    manager = pub.getDefaultTopicMgr()
    for topic_name, prototype in TOPIC_PROTOTYPES.items():
        manager.getOrCreateTopic(topic_name, prototype)
