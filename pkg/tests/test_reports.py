"""Tabular reports and their plots."""
import pytest

from src.nfa import ends_with, nfa_determinize
from src.reports import behaviour_table, census_table, language_growth, series_table, summarize_checks
from src.visualization import BehaviourVisualizer


def test_behaviour_table():
    system = nfa_determinize(ends_with("a"))
    df = behaviour_table(system, {"{0}": (0,), "{1}": (1,)}, 2)
    assert df['word'].tolist() == ["ε", "a", "b", "aa", "ab", "ba", "bb"]
    assert df['length'].tolist() == [0, 1, 1, 2, 2, 2, 2]
    assert df['{0}'].tolist() == [0, 1, 0, 1, 0, 1, 0]
    assert df['{1}'].tolist() == [1, 0, 0, 0, 0, 0, 0]


def test_series_table():
    df = series_table({("a",): 1, ("a", "a"): 2})
    assert list(df.columns) == ['word', 'length', 'coefficient']
    assert df['coefficient'].tolist() == [1, 2]


def test_language_growth_includes_empty_lengths():
    df = language_growth([(), ("a", "b"), ("b", "a")], 3)
    assert df['length'].tolist() == [0, 1, 2, 3]
    assert df['words'].tolist() == [1, 0, 2, 0]


def test_census_table(nested_products):
    df = census_table(nested_products, nested_products.parse("φ(z)"), [3, 4])
    assert df['census'].tolist() == [3, 4]
    assert df['prefix'].iloc[0] == "+(z, +(×(⋆, z), ⊥))"
    assert (df['height'].diff().dropna() > 0).all()


def test_summarize_checks_puts_failures_first(capsys):
    results = [
        {'Check': 'b', 'Cases': 10, 'Mismatches': 0, 'Passed': True, 'Seconds': 0.12345},
        {'Check': 'a', 'Cases': 5, 'Mismatches': 1, 'Passed': False, 'Seconds': 1.0},
    ]
    df = summarize_checks(results, verbose=True)
    assert df['Check'].tolist() == ['a', 'b']
    assert df['Seconds'].tolist() == [1.0, 0.123]
    out = capsys.readouterr().out
    assert "ACCEPTANCE SUMMARY" in out
    assert "1/2 checks passed" in out


def test_summarize_nothing():
    df = summarize_checks([], verbose=False)
    assert df.empty
    assert list(df.columns) == ['Check', 'Cases', 'Mismatches', 'Passed', 'Seconds']


@pytest.fixture
def visualizer():
    return BehaviourVisualizer(show=False)


def test_plots_are_written(tmp_path, visualizer, nested_products):
    system = nfa_determinize(ends_with("a"))
    table = behaviour_table(system, {"{0}": (0,)}, 3)
    visualizer.plot_behaviour_heatmap(table, save_path=str(tmp_path / "heatmap.png"))
    visualizer.plot_language_growth(language_growth([(), ("a",)], 2), save_path=str(tmp_path / "growth.png"))
    visualizer.plot_coefficient_series(series_table({("a",): 1, ("a", "a"): 3}),
                                       save_path=str(tmp_path / "series.png"))
    visualizer.plot_census_growth(census_table(nested_products, nested_products.parse("φ(z)"), range(5)),
                                  save_path=str(tmp_path / "census.png"))
    for name in ("heatmap", "growth", "series", "census"):
        assert (tmp_path / f"{name}.png").stat().st_size > 0
