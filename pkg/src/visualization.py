import logging
from typing import Optional

import matplotlib.pyplot as plt
import pandas as pd
import seaborn as sns

logger = logging.getLogger(__name__)


class BehaviourVisualizer:
    """
    Plots of behaviour reports (see src.reports) with matplotlib and seaborn
    """

    def __init__(self, show: bool = False):
        self.show = show
        plt.rcParams['figure.figsize'] = (10, 6)
        plt.rcParams['font.size'] = 10

    def _finish(self, fig, save_path):
        fig.tight_layout()
        if save_path:
            fig.savefig(save_path, dpi=150, bbox_inches='tight')
            logger.info(f"Plot saved to {save_path}")
        if self.show:
            plt.show()
        plt.close(fig)
        return fig

    def plot_behaviour_heatmap(self, table: pd.DataFrame, save_path: Optional[str] = None):
        """
        Heatmap of a behaviour table: words down, start values across
        """
        values = table.drop(columns=['length']).set_index('word').astype(float)
        fig, ax = plt.subplots(figsize=(max(4, 1.5 * values.shape[1] + 2), max(4, 0.3 * len(values))))
        sns.heatmap(values, annot=len(values) <= 40, fmt='g', cmap='Blues', cbar=True, ax=ax)
        ax.set_title('Behaviour per Word', fontsize=14, fontweight='bold')
        ax.set_xlabel('Start')
        ax.set_ylabel('Word')
        return self._finish(fig, save_path)

    def plot_language_growth(self, growth: pd.DataFrame, title: str = 'Accepted Words per Length',
                             save_path: Optional[str] = None):
        fig, ax = plt.subplots(figsize=(8, 5))
        bars = ax.bar(growth['length'], growth['words'], color='steelblue', edgecolor='black')
        for bar in bars:
            h = bar.get_height()
            ax.text(bar.get_x() + bar.get_width() / 2., h, f'{int(h)}', ha='center', va='bottom', fontsize=9)
        ax.set_title(title, fontsize=14, fontweight='bold')
        ax.set_xlabel('Word length', fontsize=12)
        ax.set_ylabel('Count', fontsize=12)
        ax.grid(axis='y', alpha=0.3)
        return self._finish(fig, save_path)

    def plot_coefficient_series(self, series: pd.DataFrame, save_path: Optional[str] = None):
        """
        Coefficient of each word, grouped by length
        """
        fig, ax = plt.subplots(figsize=(10, 5))
        sns.stripplot(data=series, x='length', y='coefficient', ax=ax, color='salmon', size=6, jitter=0.2)
        ax.set_title('Coefficients by Word Length', fontsize=14, fontweight='bold')
        ax.set_xlabel('Word length', fontsize=12)
        ax.set_ylabel('Coefficient', fontsize=12)
        ax.grid(alpha=0.3)
        return self._finish(fig, save_path)

    def plot_census_growth(self, census: pd.DataFrame, save_path: Optional[str] = None):
        fig, ax = plt.subplots(figsize=(8, 5))
        ax.plot(census['depth'], census['census'], marker='o', color='darkorange', lw=2, label='distinct complete subtrees')
        ax.plot(census['depth'], census['height'], marker='s', color='navy', lw=1, linestyle='--', label='prefix height')
        ax.set_title('Subtree Census by Unfolding Depth', fontsize=14, fontweight='bold')
        ax.set_xlabel('Depth', fontsize=12)
        ax.set_ylabel('Count', fontsize=12)
        ax.legend(loc='upper left')
        ax.grid(alpha=0.3)
        return self._finish(fig, save_path)
