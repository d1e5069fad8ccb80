"""
Command-line interface - one verb per pipeline stage, handing files over from one stage to the next.

Results are printed to standard output as JSON objects, diagnostics go to standard error through the logger.
"""
import argparse
import json
import sys
from typing import Callable, Dict, List, Optional, Sequence
import numpy as np
from .config import Config, load_config
from .data import generate_synthetic, permute_classes, make_open_set_split
from .data import load_feature_table, save_feature_table, save_split, load_split
from .embedding import IdentityEncoder, load_model, save_model
from .enums import ExitCode, Representation
from .evaluation import eval_open_set
from .exceptions import CembedException, ConfigurationError, ParameterError, NumericError, NormalizationError
from .retrieval import CodeIndex, save_codes, load_codes, search, evaluate_retrieval, code_bytes
from .scheme import class_embeddings, build_scheme, save_scheme, load_scheme, code_bits
from .training import train, save_trace
from .utils import logger


def _gen_data(config: Config, args: argparse.Namespace) -> dict:
    data = config.data
    table = generate_synthetic(data.n_classes, data.dim, data.n_per_class, data.separation, data.noise_sigma,
                               config.seed)
    if data.class_permutation:
        table = permute_classes(table, config.seed)
    save_feature_table(table, args.out)
    return {"records": len(table), "dim": table.dim, "classes": int(table.classes.size)}


def _split(config: Config, args: argparse.Namespace) -> dict:
    table = load_feature_table(args.table)
    split = make_open_set_split(table, config.data.seen_fraction, config.data.labeled_fraction, config.seed)
    save_split(split, args.out)
    return {
        "seen_classes": len(split.seen_classes),
        "novel_classes": len(split.novel_classes),
        "labeled": len(split.labeled_ids),
        "unlabeled": len(split.unlabeled_ids),
    }


def _build_scheme(config: Config, args: argparse.Namespace) -> dict:
    table = load_feature_table(args.table)
    split = load_split(args.split)
    encoder = load_model(args.model).encoder if args.model else IdentityEncoder(table.dim)
    embeddings = class_embeddings(table, split, encoder, config.scheme.embedding_mode)
    scheme = build_scheme(embeddings, config.scheme.num_sets, config.scheme.meta_classes, config.scheme.subspace_dim,
                          config.seed)
    save_scheme(scheme, args.out)
    return {"num_sets": scheme.num_sets, "sizes": list(scheme.sizes), "subspace_dim": scheme.subspace_dim,
            "bits": code_bits(scheme)}


def _train(config: Config, args: argparse.Namespace) -> dict:
    table = load_feature_table(args.table)
    split = load_split(args.split)
    scheme = load_scheme(args.scheme)
    result = train(table, split, scheme, config.train)
    save_model(result.model, args.out)
    if args.trace:
        save_trace(result.trace, args.trace)

    final = {}
    if len(result.trace):
        final = {column: float(value) for column, value in result.trace.iloc[-1].drop("step").items()}
    return {"steps": len(result.trace), "final": final}


def _encode(config: Config, args: argparse.Namespace) -> dict:
    model = load_model(args.model)
    index = CodeIndex.build(model, load_feature_table(args.table))
    save_codes(index, args.out)
    return {"items": len(index), "bits": index.bits, "bytes_per_code": code_bytes(index.sizes)}


def _search(config: Config, args: argparse.Namespace) -> dict:
    model = load_model(args.model)
    index = load_codes(args.codes, model.thetas)
    query = load_feature_table(args.table).subset([args.query_id])
    ids, distances = search(model.encode(query.features)[0], index, args.topk)
    return {
        "query": args.query_id,
        "results": [{"id": int(item), "distance": float(distance)} for item, distance in zip(ids, distances)],
    }


def _eval_retrieval(config: Config, args: argparse.Namespace) -> dict:
    model = load_model(args.model)
    index = load_codes(args.codes, model.thetas)
    return evaluate_retrieval(model, index, load_feature_table(args.table), load_split(args.split),
                              config.eval.num_queries, config.seed)


def _eval_cluster(config: Config, args: argparse.Namespace) -> dict:
    model = load_model(args.model)
    split = load_split(args.split)
    test = load_feature_table(args.table).subset(sorted(split.unlabeled_ids))
    if config.eval.representation == Representation.COMBINATORIAL:
        vectors = model.embed(test.features)
    else:
        vectors = model.encode(test.features)
    k = int(np.unique(test.labels).size)
    return eval_open_set(vectors, test.labels, split.seen_classes, k, config.seed).to_dict()


_VERBS: Dict[str, Callable[[Config, argparse.Namespace], dict]] = {
    "gen-data": _gen_data,
    "split": _split,
    "build-scheme": _build_scheme,
    "train": _train,
    "encode": _encode,
    "search": _search,
    "eval-retrieval": _eval_retrieval,
    "eval-cluster": _eval_cluster,
}


def make_parser() -> argparse.ArgumentParser:
    """
    Create the argument parser, with the global options accepted before and after the verb.
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="flat key = value configuration file")
    common.add_argument("--set", action="append", default=argparse.SUPPRESS, metavar="KEY=VALUE",
                        help="override a configuration value (repeatable)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="override the seed of every stage")

    parser = argparse.ArgumentParser(prog="cembed", description="Combinatorial embeddings for open-set learning",
                                     parents=[common])
    verbs = parser.add_subparsers(dest="verb", metavar="VERB")
    verbs.required = True

    def verb(name: str, description: str) -> argparse.ArgumentParser:
        return verbs.add_parser(name, parents=[common], help=description, description=description)

    gen_data = verb("gen-data", "generate a synthetic Gaussian feature table")
    gen_data.add_argument("--out", required=True)

    split = verb("split", "split a feature table into seen/novel classes and labeled/unlabeled records")
    split.add_argument("--table", required=True)
    split.add_argument("--out", required=True)

    scheme = verb("build-scheme", "build meta-class sets from class embeddings")
    scheme.add_argument("--table", required=True)
    scheme.add_argument("--split", required=True)
    scheme.add_argument("--out", required=True)
    scheme.add_argument("--model", help="encode the features with this model's encoder first")

    training = verb("train", "train a combinatorial embedding model")
    training.add_argument("--table", required=True)
    training.add_argument("--split", required=True)
    training.add_argument("--scheme", required=True)
    training.add_argument("--out", required=True)
    training.add_argument("--trace", help="write the per-step loss trace to this file")

    encode = verb("encode", "encode a feature table into compact codes")
    encode.add_argument("--model", required=True)
    encode.add_argument("--table", required=True)
    encode.add_argument("--out", required=True)

    searching = verb("search", "rank the coded database for one query record")
    searching.add_argument("--model", required=True)
    searching.add_argument("--codes", required=True)
    searching.add_argument("--table", required=True)
    searching.add_argument("--query-id", type=int, required=True)
    searching.add_argument("--topk", type=int, default=10)

    retrieval = verb("eval-retrieval", "score novel-class queries by mean average precision")
    retrieval.add_argument("--model", required=True)
    retrieval.add_argument("--codes", required=True)
    retrieval.add_argument("--table", required=True)
    retrieval.add_argument("--split", required=True)

    cluster = verb("eval-cluster", "cluster the unlabeled records and score them per scope")
    cluster.add_argument("--model", required=True)
    cluster.add_argument("--table", required=True)
    cluster.add_argument("--split", required=True)

    return parser


def _exit_code(ex: CembedException) -> ExitCode:
    if isinstance(ex, (ConfigurationError, ParameterError)):
        return ExitCode.USAGE
    if isinstance(ex, (NumericError, NormalizationError)):
        return ExitCode.NUMERIC
    return ExitCode.FILE


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one verb and return the process exit code.

        - 0 on success, with the verb's JSON result on standard output
        - 2 for usage, parameter and configuration errors
        - 3 for file, format and data errors
        - 4 for numeric failures (non-finite losses, collapsed branches)

    """
    try:
        args = make_parser().parse_args(argv)
    except SystemExit as ex:
        return ex.code if isinstance(ex.code, int) else ExitCode.USAGE.value

    overrides: List[str] = getattr(args, "set", None) or []
    try:
        config = load_config(getattr(args, "config", None), overrides, getattr(args, "seed", None))
        logger.debug(f"Running {args.verb} with seed {config.seed}")
        result = _VERBS[args.verb](config, args)
    except CembedException as ex:
        logger.error(f"error: {args.verb} failed - {ex}")
        return _exit_code(ex).value

    print(json.dumps(result))
    return ExitCode.SUCCESS.value


def main():
    """
    Console entry point.
    """
    sys.exit(run())
