import json
from pathlib import Path
import pandas as pd
from GlobalUtils.globalUtils import ArgumentError
from GlobalUtils.logger import logger
from Metrics.ConfusionMatrix import ConfusionMatrix, MetricsReport

TABLE_COLUMNS = (
    'Precision (%)',
    'Recall (%)',
    'F1-Score (%)',
    'Training Accuracy (%)',
    'Training loss',
    'Validation Accuracy (%)',
    'Validation loss',
)


def _percent(value: float) -> str:
    return f"{value * 100:.2f}"

def _loss(value: float) -> str:
    return f"{value:.2f}"

def table_frame(reports) -> pd.DataFrame:
    """reports: sequence of (row name, training report, validation report)."""
    rows = []
    for name, train_report, validation_report in reports:
        rows.append({
            'Algorithms': name,
            'Precision (%)': _percent(validation_report.precision),
            'Recall (%)': _percent(validation_report.recall),
            'F1-Score (%)': _percent(validation_report.f1),
            'Training Accuracy (%)': _percent(train_report.accuracy),
            'Training loss': _loss(train_report.mean_loss),
            'Validation Accuracy (%)': _percent(validation_report.accuracy),
            'Validation loss': _loss(validation_report.mean_loss),
        })
    return pd.DataFrame(rows, columns=('Algorithms',) + TABLE_COLUMNS)

def render_table(reports) -> str:
    reports = list(reports)
    if not reports:
        raise ArgumentError("MetricsExport - render_table needs at least one report row")
    return table_frame(reports).to_string(index=False) + "\n"

def confusion_frame(cm: ConfusionMatrix) -> pd.DataFrame:
    names = list(cm.label_space.class_names)
    frame = pd.DataFrame(cm.counts, index=names, columns=names)
    frame.index.name = 'true\\predicted'
    return frame

def save_confusion_csv(cm: ConfusionMatrix, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    confusion_frame(cm).to_csv(path, lineterminator='\n')
    logger.info(f"MetricsExport - Confusion matrix written to {path}.")
    return path

def load_confusion_csv(path) -> pd.DataFrame:
    return pd.read_csv(path, index_col=0)

def save_report_json(metrics: MetricsReport, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(metrics.to_dict(), f, indent=2, sort_keys=True)
        f.write('\n')
    logger.info(f"MetricsExport - Report written to {path}.")
    return path

def load_report_json(path) -> MetricsReport:
    with open(path, 'r', encoding='utf-8') as f:
        return MetricsReport.from_dict(json.load(f))
