import json
from pathlib import Path
from pubsub import pub
from GlobalUtils.globalUtils import EventsDirectory
from GlobalUtils.logger import logger
from Ensemble.EnsembleModel import save_ensemble
from Federation.FederationUtils import GlobalModel, RoundRecord

ROUNDS_FILE = 'rounds.jsonl'
CHECKPOINT_DIR = 'checkpoints'


def serialize_record(record: RoundRecord, include_wall_time: bool = False) -> str:
    return json.dumps(record.to_dict(include_wall_time), sort_keys=True, separators=(',', ':'))

def checkpoint_path(output_dir, round_index: int) -> Path:
    return Path(output_dir) / CHECKPOINT_DIR / f"round_{round_index:03d}"


class RoundLogger:

    def __init__(self, output_dir, include_wall_time: bool = False):
        self.output_dir = Path(output_dir)
        self.include_wall_time = include_wall_time
        self.rounds_path = self.output_dir / ROUNDS_FILE
        self.latest_global_model = None
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
            self.rounds_path.write_text('', encoding='utf-8')
        except OSError as e:
            logger.error(f"RoundLogger - Error preparing output directory {self.output_dir}: {e}")
            raise e
        pub.subscribe(self.on_global_model, EventsDirectory.GLOBAL_MODEL_BROADCAST.value)
        pub.subscribe(self.on_round_completed, EventsDirectory.ROUND_COMPLETED.value)

    def on_global_model(self, global_model: GlobalModel):
        self.latest_global_model = global_model

    def on_round_completed(self, record: RoundRecord):
        with open(self.rounds_path, 'a', encoding='utf-8', newline='\n') as f:
            f.write(serialize_record(record, self.include_wall_time) + '\n')
        if self.latest_global_model is not None and self.latest_global_model.ensemble is not None:
            save_ensemble(self.latest_global_model.ensemble, checkpoint_path(self.output_dir, record.round))
        logger.info(f"RoundLogger - Logged round {record.round} to {self.rounds_path}.")

    def detach(self):
        for listener, event in ((self.on_global_model, EventsDirectory.GLOBAL_MODEL_BROADCAST),
                                (self.on_round_completed, EventsDirectory.ROUND_COMPLETED)):
            if pub.isSubscribed(listener, event.value):
                pub.unsubscribe(listener, event.value)
