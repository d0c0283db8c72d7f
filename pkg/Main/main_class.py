from pathlib import Path
import numpy as np
import pandas as pd
from GlobalUtils.globalUtils import ConfigError, ExitCode, ShapeError, format_shape
from GlobalUtils.logger import logger
from DataHandler.DatasetStore import load_dataset, save_dataset
from DataHandler.Partitioner import partition_clients
from DataHandler.SyntheticData import generate_blobs
from Ensemble.EnsembleModel import ensemble_predict, is_ensemble_checkpoint, load_ensemble
from Federation.Master.MasterFederation import MasterFederation
from Metrics.ConfusionMatrix import confusion
from Metrics.Evaluation import evaluate_ensemble, evaluate_model
from Metrics.MetricsExport import render_table, save_confusion_csv, save_report_json
from Main.mainUtils import build_config, load_config_file, overrides_from_args
from Models.Checkpoint.ModelCheckpoint import is_model_checkpoint, load_model
from Models.Master.MasterLearner import predict_classes
from Numerics.rngStream import RngStream

REPORT_FILE = 'report.json'
CONFUSION_FILE = 'confusion.csv'
PREDICTIONS_FILE = 'predictions.csv'
TABLE_FILE = 'table.txt'


class Main:
    def __init__(self, out=print):
        self.out = out

    def dispatch(self, args) -> int:
        handler = getattr(self, f"cmd_{args.command}")
        try:
            return handler(args).value
        except ConfigError as e:
            logger.error(f"MainClass - Configuration rejected: {e}")
            for problem in e.problems:
                self.out(f"config error: {problem}")
            return ExitCode.USAGE_ERROR.value
        except Exception as e:
            logger.error(f"MainClass - {args.command} failed: {e}", exc_info=True)
            self.out(f"error: {e}")
            return ExitCode.RUNTIME_FAILURE.value

    ###################
    ### SUBCOMMANDS ###
    ###################

    def cmd_generate(self, args) -> ExitCode:
        seed = args.seed if args.seed is not None else build_config().seed
        dataset = generate_blobs(RngStream.named(seed, 'data'), args.per_class, args.dim, args.separation)
        save_dataset(dataset, args.out)
        self.out(f"wrote {dataset.describe()} to {args.out}")
        return ExitCode.SUCCESS

    def cmd_partition(self, args) -> ExitCode:
        seed = args.seed if args.seed is not None else build_config().seed
        dataset = load_dataset(args.dataset)
        rng = RngStream.named(seed, 'distribute').child('partition')
        partition = partition_clients(dataset, args.clients, rng, dirichlet_alpha=args.dirichlet_alpha)
        out = Path(args.out)
        for client_id, shard in enumerate(partition.client_shards):
            save_dataset(shard, out / f"client_{client_id:03d}")
            self.out(f"client {client_id}: {shard.describe()}")
        return ExitCode.SUCCESS

    def cmd_run(self, args) -> ExitCode:
        raw = load_config_file(args.config) if args.config else {}
        config = build_config(raw, overrides_from_args(args))
        master = MasterFederation(config)
        try:
            master.run()
            table = render_table(master.summary_rows())
        finally:
            master.close()
        self.out(table.rstrip('\n'))
        if config.output_dir:
            (Path(config.output_dir) / TABLE_FILE).write_text(table, encoding='utf-8')
        return ExitCode.SUCCESS

    def _load_checkpoint(self, path):
        if is_ensemble_checkpoint(path):
            ensemble = load_ensemble(path)
            return ensemble.members[0].architecture, ensemble, None
        if is_model_checkpoint(path):
            model = load_model(path)
            return model.architecture, None, model
        return None, None, None

    def _checked_inputs(self, args):
        architecture, ensemble, model = self._load_checkpoint(args.checkpoint)
        if architecture is None:
            self.out(f"error: no model or ensemble checkpoint at {args.checkpoint}")
            return None
        dataset = load_dataset(args.dataset)
        if tuple(dataset.feature_shape) != architecture.input_shape:
            raise ShapeError(f"checkpoint expects samples of shape {format_shape(architecture.input_shape)}, "
                             f"dataset holds {format_shape(dataset.feature_shape)}")
        if dataset.label_space.N != architecture.num_classes:
            raise ShapeError(f"checkpoint predicts {architecture.num_classes} classes, dataset has {dataset.label_space.N}")
        return dataset, ensemble, model

    def cmd_evaluate(self, args) -> ExitCode:
        try:
            inputs = self._checked_inputs(args)
        except ShapeError as e:
            logger.error(f"MainClass - evaluate rejected: {e}")
            self.out(f"error: {e}")
            return ExitCode.USAGE_ERROR
        if inputs is None:
            return ExitCode.USAGE_ERROR
        dataset, ensemble, model = inputs
        if ensemble is not None:
            metrics = evaluate_ensemble(ensemble, dataset)
            predictions = ensemble_predict(ensemble, dataset.features) if len(dataset) else []
        else:
            metrics = evaluate_model(model, dataset)
            predictions = predict_classes(model, dataset.features) if len(dataset) else []
        out = Path(args.out)
        save_report_json(metrics, out / REPORT_FILE)
        save_confusion_csv(confusion(dataset.labels, predictions, dataset.label_space), out / CONFUSION_FILE)
        self.out(f"accuracy {metrics.accuracy:.4f}, macro F1 {metrics.f1:.4f} on {metrics.num_samples} samples")
        return ExitCode.SUCCESS

    def cmd_predict(self, args) -> ExitCode:
        try:
            inputs = self._checked_inputs(args)
        except ShapeError as e:
            logger.error(f"MainClass - predict rejected: {e}")
            self.out(f"error: {e}")
            return ExitCode.USAGE_ERROR
        if inputs is None:
            return ExitCode.USAGE_ERROR
        dataset, ensemble, model = inputs
        if len(dataset) == 0:
            predictions = np.zeros(0, dtype=np.int64)
        elif ensemble is not None:
            predictions = ensemble_predict(ensemble, dataset.features)
        else:
            predictions = predict_classes(model, dataset.features)

        names = np.asarray(dataset.label_space.class_names, dtype=object)
        frame = pd.DataFrame({
            'index': np.arange(len(dataset)),
            'predicted': predictions.astype(np.int64),
            'class_name': names[predictions] if len(dataset) else [],
        })
        path = Path(args.out) / PREDICTIONS_FILE
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, lineterminator='\n')
        logger.info(f"MainClass - Wrote {len(frame)} predictions to {path}.")
        self.out(f"wrote {len(frame)} predictions to {path}")
        return ExitCode.SUCCESS
