"""Convert upstream FEVER / HotpotQA releases to cokb's JSONL schema.

    python -m cokb.tools.convert_upstream fever shared_task_dev.jsonl fever.jsonl
    python -m cokb.tools.convert_upstream hotpot hotpot_dev_distractor_v1.json hotpot.jsonl

FEVER releases are JSONL with {id, claim, label}; HotpotQA releases are a
single JSON array with {_id, question, answer}.
"""
from __future__ import absolute_import

import io
import json

import click
from tqdm import tqdm

from cokb.gate import LABELS


def fever_rows(path):
    with io.open(path, encoding='utf8') as f:
        for line in f:
            if not line.strip():
                continue
            item = json.loads(line)
            if item.get('label') not in LABELS:
                continue
            yield {'id': str(item['id']), 'claim': item['claim'],
                   'label': item['label']}


def hotpot_rows(path):
    with io.open(path, encoding='utf8') as f:
        items = json.load(f)
    for item in items:
        answer = item.get('answer', '')
        if not answer.strip():
            continue
        yield {'id': item['_id'], 'question': item['question'],
               'answer': answer}


READERS = {'fever': fever_rows, 'hotpot': hotpot_rows}


@click.command()
@click.argument('kind', type=click.Choice(sorted(READERS)))
@click.argument('source', type=click.Path(exists=True))
@click.argument('out', type=click.File('w', encoding='utf8'))
@click.option('--limit', type=int, default=None)
def main(kind, source, out, limit):
    count = 0
    for row in tqdm(READERS[kind](source)):
        if limit is not None and count >= limit:
            break
        out.write(json.dumps(row, ensure_ascii=False) + '\n')
        count += 1
    click.echo('%d examples written' % count, err=True)


if __name__ == '__main__':
    main()
