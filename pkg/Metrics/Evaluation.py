from DataHandler.Dataset import Dataset
from Ensemble.EnsembleModel import EnsembleModel, ensemble_loss, ensemble_predict
from Metrics.ConfusionMatrix import MetricsReport, confusion, report
from Models.Master.MasterLearner import forward
from Models.ModelUtils import BaseLearner, argmax_lowest, cross_entropy


def evaluate_predictions(data: Dataset, predictions, mean_loss: float) -> MetricsReport:
    return report(confusion(data.labels, predictions, data.label_space), mean_loss)

def evaluate_model(model: BaseLearner, data: Dataset) -> MetricsReport:
    if len(data) == 0:
        return evaluate_predictions(data, [], 0.0)
    probs = forward(model, data.features)
    return evaluate_predictions(data, argmax_lowest(probs), cross_entropy(probs, data.labels))

def evaluate_ensemble(ensemble: EnsembleModel, data: Dataset) -> MetricsReport:
    if len(data) == 0:
        return evaluate_predictions(data, [], 0.0)
    return evaluate_predictions(data, ensemble_predict(ensemble, data.features), ensemble_loss(ensemble, data))
