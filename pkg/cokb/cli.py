"""Command line interface.

    cokb run "Which year was ...?" --replay fixtures/ --fixtures kb.json
    cokb eval --dataset hotpot.jsonl --method cok --out report.json
    cokb build-dataset corpus.jsonl --out train.jsonl
    cokb corrupt "select ..." --op strip-entity
    cokb query "(Barack Obama, spouse, ?)" --execute --fixtures kb.json
    cokb link "Barack Obama" --fixtures kb.json

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""
from __future__ import absolute_import, print_function

import io
import sys
import json
import logging

import click
from tqdm import tqdm

from cokb import config
from cokb.errors import CokError
from cokb.contrastive import (
    CannotCorrupt,
    CorruptionOp,
    InvalidCorrectQuery,
    Lexicon,
    build_record,
    corrupt,
    export_jsonl,
)
from cokb.evaluation import (
    KINDS,
    METHODS,
    EvalReport,
    load_dataset,
    render_table,
    run_eval,
)
from cokb.kb import link_entity
from cokb.pipeline import Backends, build_source, retrieve_for, run_cok
from cokb.query import (
    ENTITY,
    PROPERTY,
    Format,
    ParseError,
    SparqlQuery,
    parse_query,
    serialize_query,
    validate,
)
from cokb.util import format_measurements

log = logging.getLogger('cokb')

MODE = click.Choice(config.MODES)
FORMAT = click.Choice(config.FORMATS)


class State(object):

    def __init__(self, settings):
        self.settings = settings

    def override(self, mode=None, format=None, fixtures=None, replay=None):
        pipeline = self.settings.pipeline.replace(
            mode=mode, query_format=format)
        return self.settings.replace(
            pipeline=pipeline, kb_fixture=fixtures, replay=replay)


def fixtures_option(func):
    return click.option(
        '--fixtures', type=click.Path(exists=True),
        help='KB fixture JSON used instead of live Wikidata.')(func)


def replay_option(func):
    return click.option(
        '--replay', type=click.Path(exists=True),
        help='Recorded completions (file or directory) to replay.')(func)


def _lexicon(path):
    return Lexicon.load(path) if path else Lexicon.default()


def _write(path, text):
    with io.open(path, 'w', encoding='utf8') as f:
        f.write(text)
        f.write('\n')


@click.group()
@click.option('--config', 'config_path', type=click.Path(exists=True),
              help='TOML settings file.')
@click.option('-v', '--verbose', is_flag=True, help='Debug logging.')
@click.option('--timings', is_flag=True,
              help='Print per-stage timings on exit.')
@click.pass_context
def main(ctx, config_path, verbose, timings):
    """Knowledge-grounded answering with black-box LLMs."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s')
    ctx.obj = State(config.load_settings(config_path))
    if timings:
        ctx.call_on_close(
            lambda: click.echo(format_measurements(), err=True))


@main.command()
@click.argument('question')
@click.option('--mode', type=MODE)
@click.option('--format', type=FORMAT)
@click.option('--patterns', type=click.Path(exists=True),
              help='Pattern table for the rule-template generator.')
@fixtures_option
@replay_option
@click.option('--out', type=click.Path(), help='Write the trace here.')
@click.pass_obj
def run(state, question, mode, format, patterns, fixtures, replay, out):
    """Answer one question (or verify one claim)."""
    settings = state.override(mode, format, fixtures, replay)
    settings = settings.replace(generator_patterns=patterns)
    result = run_cok(question, settings.pipeline,
                     Backends.from_settings(settings))
    click.echo(result.answer)
    if out:
        _write(out, result.trace.dumps())
        click.echo('trace: %s' % out)


@main.command('eval')
@click.option('--dataset', type=click.Path(exists=True))
@click.option('--kind', type=click.Choice(KINDS))
@click.option('--method', type=click.Choice(METHODS), required=True)
@click.option('--mode', type=MODE)
@click.option('--format', type=FORMAT)
@click.option('--patterns', type=click.Path(exists=True))
@click.option('--baseline', type=click.Path(exists=True),
              help='Report JSON to compute the delta against.')
@click.option('--predictions', type=click.Path(),
              help='Where to write per-example predictions.')
@fixtures_option
@replay_option
@click.option('--out', type=click.Path(), help='Write the report here.')
@click.pass_obj
def evaluate(state, dataset, kind, method, mode, format, patterns, baseline,
             predictions, fixtures, replay, out):
    """Run one method over a dataset and score it."""
    settings = state.override(mode, format, fixtures, replay)
    settings = settings.replace(generator_patterns=patterns)
    dataset = dataset or settings.dataset
    if not dataset:
        raise click.UsageError('no dataset given (--dataset or [eval])')
    examples = load_dataset(dataset, kind)
    if baseline:
        with io.open(baseline, encoding='utf8') as f:
            baseline = EvalReport.from_json(json.load(f))
    if predictions is None and out:
        predictions = out + '.predictions.jsonl'
    report = run_eval(examples, method, settings.pipeline,
                      Backends.from_settings(settings),
                      predictions_path=predictions, baseline=baseline,
                      progress=True)
    if out:
        _write(out, report.dumps())
    reports = [baseline, report] if baseline else [report]
    click.echo(render_table(reports))


@main.command('build-dataset')
@click.argument('corpus', type=click.Path(exists=True))
@click.option('--out', type=click.Path(), required=True)
@click.option('--seed', type=int, default=0)
@click.option('--lexicon', type=click.Path(exists=True))
def build_dataset(corpus, out, seed, lexicon):
    """Contrastive records from a JSONL corpus of {question, query}."""
    lexicon = _lexicon(lexicon)
    skipped = []

    def records():
        with io.open(corpus, encoding='utf8') as f:
            for line_no, line in enumerate(tqdm(f, desc='records'), 1):
                if not line.strip():
                    continue
                try:
                    item = json.loads(line)
                    question, query = item['question'], item['query']
                except (ValueError, KeyError, TypeError) as e:
                    log.warning("line %d skipped: not a {question, query} "
                                "object: %s", line_no, e)
                    skipped.append(line_no)
                    continue
                try:
                    yield build_record(question, query, seed, lexicon)
                except (CannotCorrupt, InvalidCorrectQuery, ParseError) as e:
                    log.warning("line %d skipped: %s", line_no, e)
                    skipped.append(line_no)

    count = export_jsonl(records(), out)
    click.echo('%d records written to %s (%d skipped)'
               % (count, out, len(skipped)))


@main.command('corrupt')
@click.argument('query')
@click.option('--op', type=click.Choice([op.value for op in CorruptionOp]),
              required=True)
@click.option('--seed', type=int, default=0)
@click.option('--lexicon', type=click.Path(exists=True))
def corrupt_command(query, op, seed, lexicon):
    """Apply one corruption operator to a query."""
    click.echo(corrupt(query, op, seed, _lexicon(lexicon)))


@main.command('query')
@click.argument('text')
@click.option('--format', type=FORMAT)
@click.option('--execute', is_flag=True,
              help='Link mentions and run the query.')
@fixtures_option
@click.pass_obj
def query_command(state, text, format, execute, fixtures):
    """Parse, validate and optionally execute a query."""
    query = parse_query(text, Format(format) if format else None)
    click.echo(serialize_query(query))
    if isinstance(query, SparqlQuery):
        for issue in validate(query):
            click.echo(json.dumps(issue.to_json()))
    if not execute:
        return
    source = build_source(state.override(fixtures=fixtures))
    retrieval = retrieve_for(source, text, query)
    for message in retrieval.warnings:
        click.echo('warning: %s' % message, err=True)
    click.echo(json.dumps({'bindings': retrieval.bindings}, sort_keys=True))
    for fact in retrieval.facts:
        click.echo(fact.verbalization)


@main.command('link')
@click.argument('mention')
@click.option('--kind', type=click.Choice([ENTITY, PROPERTY]),
              default=ENTITY)
@click.option('--limit', type=int, default=5)
@fixtures_option
@click.pass_obj
def link_command(state, mention, kind, limit, fixtures):
    """List KB candidates for a mention."""
    source = build_source(state.override(fixtures=fixtures))
    for candidate in link_entity(source, mention, kind, limit):
        click.echo(json.dumps(candidate.to_json(), ensure_ascii=False))


def cli(argv=None):
    """Run the command line; returns the exit code."""
    if argv is None:
        argv = sys.argv[1:]
    try:
        main.main(args=list(argv), prog_name='cokb', standalone_mode=False)
    except click.UsageError as e:
        click.echo(e.format_message(), err=True)
        ctx = e.ctx or click.Context(main, info_name='cokb')
        click.echo(ctx.get_help(), err=True)
        return 1
    except click.Abort:
        return 1
    except click.ClickException as e:
        e.show()
        return 2
    except (CokError, IOError, OSError) as e:
        click.echo('error: %s' % e, err=True)
        return 2
    return 0


def entry_point():
    sys.exit(cli())
