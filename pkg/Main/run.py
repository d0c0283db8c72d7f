import argparse
from Main.main_class import Main
from Federation.FederationUtils import GlobalStrategy, PartitionScheme
from Ensemble.EnsembleUtils import VoteMethod


def positive_int(raw: str) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got '{raw}'")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value

def positive_float(raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"must be a positive number, got '{raw}'")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be a positive number, got {value}")
    return value

def seed_value(raw: str) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"must be an unsigned 64-bit integer, got '{raw}'")
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"must be an unsigned 64-bit integer, got {value}")
    return value

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='fedvote', description="Ensemble-based federated learning simulator")
    commands = parser.add_subparsers(dest='command', required=True)

    generate = commands.add_parser('generate', help='Write a synthetic 4-class blob dataset')
    generate.add_argument('--per-class', type=positive_int, default=500, help='Samples per class')
    generate.add_argument('--dim', type=positive_int, default=16, help='Feature dimension')
    generate.add_argument('--separation', type=positive_float, default=6.0, help='Distance between class centers')
    generate.add_argument('--seed', type=seed_value, default=None, help='Root seed (falls back to FEDVOTE_SEED)')
    generate.add_argument('--out', required=True, help='Output dataset directory')

    partition = commands.add_parser('partition', help='Deal a dataset into per-client shard directories')
    partition.add_argument('--dataset', required=True, help='Dataset directory')
    partition.add_argument('--clients', type=positive_int, default=4, help='Number of clients')
    partition.add_argument('--dirichlet-alpha', type=positive_float, default=None, help='Deal classes non-IID with this Dirichlet concentration')
    partition.add_argument('--seed', type=seed_value, default=None, help='Root seed (falls back to FEDVOTE_SEED)')
    partition.add_argument('--out', required=True, help='Directory receiving client_000, client_001, ...')

    run_cmd = commands.add_parser('run', help='Run the federation and print the summary table')
    run_cmd.add_argument('--config', default=None, help='JSON run configuration')
    run_cmd.add_argument('--seed', type=seed_value, default=None)
    run_cmd.add_argument('--clients', type=positive_int, default=None)
    run_cmd.add_argument('--rounds', type=positive_int, default=None)
    run_cmd.add_argument('--strategy', choices=[strategy.value for strategy in GlobalStrategy], default=None)
    run_cmd.add_argument('--vote-method', choices=[method.value for method in VoteMethod], default=None)
    run_cmd.add_argument('--partition', choices=[scheme.value for scheme in PartitionScheme], default=None)
    run_cmd.add_argument('--dataset', default=None, help='Dataset directory; synthetic blobs when omitted')
    run_cmd.add_argument('--output-dir', default=None, help='Where rounds.jsonl and checkpoints are written')
    run_cmd.add_argument('--parallel-clients', action='store_true', help='Train clients concurrently')

    for name, description in (('evaluate', 'Write report.json and confusion.csv for a checkpoint'),
                              ('predict', 'Write predictions.csv for a checkpoint')):
        sub = commands.add_parser(name, help=description)
        sub.add_argument('--checkpoint', required=True, help='Model or ensemble checkpoint directory')
        sub.add_argument('--dataset', required=True, help='Dataset directory')
        sub.add_argument('--out', required=True, help='Output directory')
    return parser

def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code
    return Main().dispatch(args)

if __name__ == "__main__":
    raise SystemExit(run())
