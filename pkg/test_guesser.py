import io

import pytest

from errors import GuesserBuildError
from guesser import (AffixTrie, RuleSet, build_cascade, build_guesser, guess, guess_batch, guess_rule,
                     guess_with_fallback)
from models import GuessingRule, Lexicon, POSClass, RuleKind, TrialCounts
from rule_scoring import score

LEX = Lexicon(entries={'developed': POSClass.of('VBD VBN'), 'book': POSClass.of('NN VB'),
                       'water': POSClass.of('NN VB')})


def scored(kind, affix, r_class, x=20, n=20, i_class='-'):
    rule = GuessingRule(kind=RuleKind(kind), affix=affix, i_class=POSClass.of(i_class),
                        r_class=POSClass.of(r_class), f=3)
    return score(rule, TrialCounts(x=x, n=n))


PREFIX = RuleSet(RuleKind.PREFIX, [scored('prefix', 'un', 'JJ', i_class='VBD VBN')])
SUFFIX = RuleSet(RuleKind.SUFFIX, [scored('suffix', 'ed', 'JJ VBD VBN', i_class='NN VB')])
ENDING = RuleSet(RuleKind.ENDING, [scored('ending', 'd', 'VBD'), scored('ending', 'ing', 'JJ NN VBG'),
                                   scored('ending', 's', 'NNS'), scored('ending', 'ous', 'JJ')])


@pytest.fixture
def guesser():
    return build_guesser(PREFIX, SUFFIX, ENDING, LEX)


def test_affix_trie_longest_first():
    trie = AffixTrie(((a, a) for a in ('s', 'ous', 'us')), reverse=True)
    assert len(trie) == 3
    assert [values for _, values in trie.matches('famous')] == [['ous'], ['us'], ['s']]
    assert [depth for depth, _ in trie.matches('famous')] == [3, 2, 1]
    assert trie.matches('cat') == []

    forward = AffixTrie([('un', 'un'), ('u', 'u')])
    assert [v for _, v in forward.matches('undo')] == [['un'], ['u']]
    assert AffixTrie().matches('undo') == []


def test_affix_trie_orders_values_per_affix():
    trie = AffixTrie([('ed', 3), ('ed', 1), ('d', 2)], reverse=True, order=lambda v: -v)
    assert trie.matches('walked') == [(2, [3, 1]), (1, [2])]


def test_prefix_stage_wins(guesser):
    assert guess(guesser, 'undeveloped') == POSClass.of('JJ')
    assert guess_rule(guesser, 'undeveloped').rule.kind is RuleKind.PREFIX


def test_suffix_before_ending(guesser):
    assert guess(guesser, 'watered') == POSClass.of('JJ VBD VBN')
    # no stem in the lexicon: the ending rule answers
    assert guess(guesser, 'jumped') == POSClass.of('VBD')
    assert guess(guesser, 'going') == POSClass.of('JJ NN VBG')


def test_longest_affix_wins(guesser):
    assert guess(guesser, 'famous') == POSClass.of('JJ')
    longer = RuleSet(RuleKind.ENDING, list(ENDING.rules) + [scored('ending', 'us', 'NN', 100, 100)])
    assert guess(build_cascade([longer], LEX), 'famous') == POSClass.of('JJ')


def test_same_affix_prefers_higher_score_then_class():
    weak, strong = scored('ending', 'ly', 'JJ', 10, 20), scored('ending', 'ly', 'RB', 19, 20)
    assert guess(build_cascade([RuleSet(RuleKind.ENDING, [weak, strong])], LEX), 'quickly') == POSClass.of('RB')
    a, b = scored('ending', 'ly', 'RB'), scored('ending', 'ly', 'JJ')
    assert guess(build_cascade([RuleSet(RuleKind.ENDING, [a, b])], LEX), 'quickly') == POSClass.of('JJ')


def test_nothing_applies(guesser):
    assert guess(guesser, 'zzz') is None
    empty = build_guesser(RuleSet(RuleKind.PREFIX), RuleSet(RuleKind.SUFFIX), RuleSet(RuleKind.ENDING), LEX)
    assert guess(empty, 'undeveloped') is None


@pytest.mark.parametrize('word, initial, expected', [
    ('xyzzy', False, 'NN'), ('Xyzzy', False, 'NP'), ('Xyzzy', True, 'NN'),
    ('Élan', False, 'NP'), ('3com', False, 'NN'), ('Jumped', True, 'VBD'),
])
def test_fallback(guesser, word, initial, expected):
    result = guess_with_fallback(guesser, word, initial)
    assert result == POSClass.of(expected)
    assert not result.is_void


def test_slots_are_checked():
    with pytest.raises(GuesserBuildError):
        build_guesser(SUFFIX, PREFIX, ENDING, LEX)
    with pytest.raises(GuesserBuildError):
        RuleSet(RuleKind.SUFFIX, [scored('ending', 's', 'NNS')])


def test_guesser_accessors(guesser):
    assert guesser.name == 'P+S+E'
    assert guesser.prefix_set is PREFIX and guesser.ending_set is ENDING
    assert build_cascade([ENDING, SUFFIX], LEX).name == 'E+S'
    assert build_cascade([ENDING], LEX).prefix_set is None


def test_guess_batch(guesser):
    out = io.StringIO()
    count = guess_batch(guesser, io.StringIO('undeveloped\nXyzzy\n\nXyzzy\tI\n'), out)
    assert count == 3
    assert out.getvalue() == 'undeveloped\tJJ\nXyzzy\t-\nXyzzy\t-\n'

    out = io.StringIO()
    guess_batch(guesser, ['Xyzzy\n', 'Xyzzy\tI\n', 'jumped\n'], out, fallback=True)
    assert out.getvalue() == 'Xyzzy\tNP\nXyzzy\tNN\njumped\tVBD\n'


def test_guess_is_deterministic():
    a = build_guesser(PREFIX, SUFFIX, ENDING, LEX)
    b = build_guesser(PREFIX, SUFFIX, ENDING, LEX)
    for word in ('undeveloped', 'watered', 'famous', 'going', 'zzz'):
        assert guess(a, word) == guess(b, word)
