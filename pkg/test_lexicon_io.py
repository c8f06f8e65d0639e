import io

import pytest

from errors import ParseError
from lexicon_io import (dump_frequencies, dump_lexicon, filter_for_evaluation, known_word_lexicon,
                        load_closed_class_tags, load_frequencies, load_lexicon)
from models import Lexicon, POSClass


def test_pos_class_is_canonical():
    assert POSClass.of('VBN VBD JJ VBD') == POSClass.of('JJ VBD VBN')
    assert str(POSClass.of('VBN JJ')) == 'JJ VBN'
    assert POSClass.of('-').is_void
    assert POSClass.of('NN VB').render() == '(NN VB)'
    assert hash(POSClass.of('VB NN')) == hash(POSClass.of('NN VB'))


def test_load_lexicon_merges_duplicates_and_skips_comments():
    src = io.StringIO('# header\n\nbook\tNN\nbook\tVB\nbooked\tVBD VBN JJ\n')
    lex = load_lexicon(src, ['DT'])
    assert len(lex) == 2
    assert lex.get('book') == POSClass.of('NN VB')
    assert lex.get('booked') == POSClass.of('JJ VBD VBN')
    assert lex.closed_class_tags == frozenset({'DT'})
    assert 'books' not in lex


def test_load_lexicon_shares_class_instances():
    lex = load_lexicon(io.StringIO('walk\tNN VB\nlook\tVB NN\n'))
    assert lex.entries['walk'] is lex.entries['look']


@pytest.mark.parametrize('text', ['book NN VB\n', 'book\t\n', '\tNN\n', 'bo ok\tNN\n'])
def test_load_lexicon_rejects_malformed_lines(text):
    with pytest.raises(ParseError) as err:
        load_lexicon(io.StringIO('walk\tNN\n' + text))
    assert err.value.line == 2
    assert ':2:' in str(err.value)


def test_load_frequencies_sums_duplicates():
    freqs = load_frequencies(io.StringIO('the\t10\nthe\t5\nbook\t3\n'))
    assert freqs.get('the') == 15
    assert freqs.get('missing') == 0
    assert freqs.tokens == 18


@pytest.mark.parametrize('line', ['the\t0', 'the\t-3', 'the\tmany', 'the', 'the\t1\t2', 'the\t٣'])
def test_load_frequencies_rejects_bad_counts(line):
    with pytest.raises(ParseError):
        load_frequencies(io.StringIO(line + '\n'))


def test_closed_class_tags(closed_tags):
    assert {'DT', 'IN', 'CC'} <= closed_tags
    assert 'NN' not in closed_tags
    with pytest.raises(ParseError):
        load_closed_class_tags(io.StringIO('DT IN\n'))


def test_dump_is_sorted_and_reloads(lexicon, freqs):
    out = io.StringIO()
    dump_lexicon(lexicon, out)
    lines = out.getvalue().splitlines()
    assert lines == sorted(lines)
    assert load_lexicon(io.StringIO(out.getvalue())).entries == lexicon.entries

    out = io.StringIO()
    dump_frequencies(freqs, out)
    assert load_frequencies(io.StringIO(out.getvalue())) == freqs


def test_filter_for_evaluation(lexicon):
    ev = filter_for_evaluation(lexicon, 5)
    assert ev.words() == ['booked', 'books', 'developed', 'looked', 'looks',
                          'undeveloped', 'walked', 'walks']
    # length threshold is inclusive
    assert 'book' in filter_for_evaluation(lexicon, 4)
    assert 'the' not in filter_for_evaluation(lexicon, 1)
    with pytest.raises(ValueError):
        filter_for_evaluation(lexicon, 0)


def test_known_word_lexicon_is_the_complement(lexicon):
    ev = filter_for_evaluation(lexicon, 5)
    small = known_word_lexicon(lexicon, 5)
    assert set(ev.words()) | set(small.words()) == set(lexicon.words())
    assert not set(ev.words()) & set(small.words())
    assert 'the' in small and 'book' in small


def test_closed_class_override():
    lex = Lexicon(entries={'across': POSClass.of('IN RB'), 'quickly': POSClass.of('RB')})
    assert filter_for_evaluation(lex, 5).words() == ['across', 'quickly']
    assert filter_for_evaluation(lex, 5, ['IN']).words() == ['quickly']


def test_filter_drops_short_and_closed_class_words():
    lex = Lexicon(entries={'book': POSClass.of('NN VB'), 'the': POSClass.of('DT'), 'cat': POSClass.of('NN')})
    assert len(filter_for_evaluation(lex, 5, ['DT'])) == 0
    lex = Lexicon(entries={'booked': POSClass.of('JJ VBD VBN')})
    assert filter_for_evaluation(lex, 5, []).words() == ['booked']
