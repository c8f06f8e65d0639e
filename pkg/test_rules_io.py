import io

import pytest

from errors import ParseError
from models import GuessingRule, POSClass, RuleKind, ScoredRule, ScoringConfig, TrialCounts
from rule_scoring import score
from rules_io import as_scored, format_rule, read_rules, write_rules

ED = GuessingRule(kind=RuleKind.SUFFIX, affix='ed', i_class=POSClass.of('NN VB'),
                  r_class=POSClass.of('JJ VBD VBN'), f=3)


def test_plain_rule_uses_placeholders():
    assert format_rule(ED) == 'suffix\ted\tNN VB\tJJ VBD VBN\t3\t-\t-\t-'
    assert format_rule(ED, audit=True).endswith('\t-\t-')


def test_scored_rule_round_trip_rescores():
    scored = score(ED, TrialCounts(x=34, n=34), merged=True)
    out = io.StringIO()
    assert write_rules([scored], out, audit=True) == 1
    line = out.getvalue().rstrip('\n').split('\t')
    assert line[5:] == ['34', '34', f'{scored.score:.6f}', 'merged']
    (back,) = read_rules(io.StringIO(out.getvalue()))
    assert back == scored


def test_written_scores_are_not_trusted():
    text = 'ending\ts\t-\tNNS\t3\t25\t25\t0.000001\n'
    (rule,) = read_rules(io.StringIO(text))
    assert rule.score == pytest.approx(0.935449, abs=1e-5)
    (strict,) = read_rules(io.StringIO(text), ScoringConfig(z=3.0))
    assert strict.score < rule.score


def test_unscored_file_gives_plain_rules():
    rules = read_rules(io.StringIO('# induced\n\nending\ting\t-\tJJ NN VBG\t7\t-\t-\t-\n'))
    assert isinstance(rules[0], GuessingRule)
    (wrapped,) = as_scored(rules)
    assert isinstance(wrapped, ScoredRule) and wrapped.score is None


@pytest.mark.parametrize('line', [
    'suffix\ted\tNN VB\tJJ\t3\t-\t-',             # seven columns
    'infix\ted\tNN VB\tJJ\t3\t-\t-\t-',           # unknown kind
    'ending\ted\tNN\tJJ\t3\t-\t-\t-',             # ending with an I-class
    'ending\tabcdef\t-\tJJ\t3\t-\t-\t-',          # ending too long
    'suffix\ted\tNN\t-\t3\t-\t-\t-',              # empty R-class
    'suffix\ted\tNN\tJJ\tthree\t-\t-\t-',         # bad f
    'suffix\ted\tNN\tJJ\t3\t5\t4\t-',             # x > n
    'suffix\ted\tNN\tJJ\t3\t-1\t4\t-',            # negative x
])
def test_malformed_rows(line):
    with pytest.raises(ParseError) as err:
        read_rules(io.StringIO('ending\ts\t-\tNNS\t3\t-\t-\t-\n' + line + '\n'))
    assert err.value.line == 2


def test_kind_filter():
    with pytest.raises(ParseError):
        read_rules(io.StringIO(format_rule(ED) + '\n'), kind=RuleKind.PREFIX)
