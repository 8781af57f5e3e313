"""
Plot a run or quotient CSV written by gdr.

    python scripts/plot_run.py results/example1_full.csv --save energy.png
"""

import argparse
import sys
from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd

PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from utils.logger import get_logger, setup_logger
from utils.run_summary import load_summary, summary_path

logger = get_logger(__name__)


def figure_title(csv: Path) -> str:
    """CSV name, plus system and scheme from the run summary when it exists"""
    if not summary_path(csv).exists():
        return csv.stem
    summary = load_summary(csv)
    parts = [summary.get(key) for key in ("system", "scheme") if isinstance(summary.get(key), str)]
    return " / ".join([csv.stem, *parts])


def plot_run(frame: pd.DataFrame, ax_energy, ax_momenta):
    for column in ("T", "V", "E"):
        ax_energy.plot(frame["t"], frame[column], label=column)
    ax_energy.set_ylabel("energy [J]")
    ax_energy.legend()

    momenta = [c for c in ("l_x", "l_y", "l_z", "j_x", "j_y", "j_z") if frame[c].notna().any()]
    if momenta:
        for column in momenta:
            ax_momenta.plot(frame["t"], frame[column], label=column)
        ax_momenta.set_ylabel("momentum")
        ax_momenta.legend(ncol=2)
    else:
        ax_momenta.plot(frame["t"], frame["newton_iters"], drawstyle="steps-post")
        ax_momenta.set_ylabel("Newton iterations")
    ax_momenta.set_xlabel("t [s]")


def plot_quotient(frame: pd.DataFrame, ax):
    for label in ("I", "II"):
        column = f"log2Q_{label}"
        if column in frame:
            ax.plot(frame["t"], frame[column], ".", markersize=2, label=f"log2 Q_{label}")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("observed order")
    ax.legend()


def main() -> int:
    parser = argparse.ArgumentParser(description="Plot a gdr CSV")
    parser.add_argument("csv", type=Path)
    parser.add_argument("--save", type=Path, help="Write the figure instead of showing it")
    args = parser.parse_args()
    setup_logger(to_file=False)

    frame = pd.read_csv(args.csv)
    if "Q_II" in frame:
        fig, ax = plt.subplots(figsize=(8, 4))
        plot_quotient(frame, ax)
    elif "E" in frame:
        fig, (ax_energy, ax_momenta) = plt.subplots(2, 1, sharex=True, figsize=(8, 6))
        plot_run(frame, ax_energy, ax_momenta)
    else:
        logger.error(f"{args.csv} is neither a run nor a quotient CSV")
        return 2

    fig.suptitle(figure_title(args.csv))
    fig.tight_layout()
    if args.save:
        fig.savefig(args.save, dpi=150)
        logger.info(f"Figure saved to {args.save}")
    else:
        plt.show()
    return 0


if __name__ == "__main__":
    sys.exit(main())
